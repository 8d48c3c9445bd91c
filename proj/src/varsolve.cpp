#include "opennet/varsolve.hpp"

#include <cmath>
#include <deque>

#include "opennet/blackbox.hpp"
#include "opennet/dynamics.hpp"
#include "opennet/errors.hpp"

namespace opennet {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kPivotThreshold = 1e-10;

MatrixXd take(const MatrixXd& m, const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) {
  MatrixXd out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      out(static_cast<Index>(i), static_cast<Index>(j)) = m(static_cast<Index>(rows[i]), static_cast<Index>(cols[j]));
    }
  }
  return out;
}

// Minimum-norm solution of a x = b (column by column) via complete
// orthogonal decomposition; a is square.
MatrixXd pinv_solve(const MatrixXd& a, const MatrixXd& b) {
  if (a.rows() == 0) return MatrixXd(0, b.cols());
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod;
  cod.setThreshold(kPivotThreshold);
  cod.compute(a);
  return cod.solve(b);
}

void require_kind(const OpenNetwork& net, NetworkKind kind, const char* op) {
  if (net.kind() != kind) {
    throw PreconditionError(std::string(op) + ": expected a " + std::string(to_string(kind)) + " network, got " +
                            std::string(to_string(net.kind())));
  }
}

void require_boundary(const OpenNetwork& net, const VectorXd& boundary, const char* op) {
  if (boundary.size() != static_cast<Index>(net.terminals().size())) {
    throw PreconditionError(std::string(op) + ": boundary has " + std::to_string(boundary.size()) +
                            " entries but the network has " + std::to_string(net.terminals().size()) +
                            " terminals");
  }
  if (!boundary.allFinite()) throw PreconditionError(std::string(op) + ": boundary values must be finite");
}

VectorXd terminal_populations(const OpenNetwork& net) {
  VectorXd q(static_cast<Index>(net.terminals().size()));
  for (std::size_t k = 0; k < net.terminals().size(); ++k) {
    q(static_cast<Index>(k)) = net.network().population(net.terminals()[k]);
  }
  return q;
}

std::vector<std::string> isolation_warnings(const OpenNetwork& net) {
  std::vector<std::string> out;
  for (const auto& comp : isolated_internal_components(net)) {
    std::string msg = "internal component not connected to any terminal:";
    for (const auto& id : comp) msg += " " + id;
    out.push_back(std::move(msg));
  }
  return out;
}

// Steady state of the open master equation from the generator:
// p_I = -H_II^+ H_IT b.
VectorXd generator_steady_state(const OpenNetwork& net, const VectorXd& boundary) {
  const MatrixXd h = hamiltonian(net.network()).entries;
  const auto& t = net.terminals();
  const auto& in = net.internal_nodes();
  const VectorXd p_internal = pinv_solve(take(h, in, in), -take(h, in, t) * boundary);
  VectorXd p(h.rows());
  for (std::size_t k = 0; k < t.size(); ++k) p(static_cast<Index>(t[k])) = boundary(static_cast<Index>(k));
  for (std::size_t k = 0; k < in.size(); ++k) p(static_cast<Index>(in[k])) = p_internal(static_cast<Index>(k));
  return p;
}

}  // namespace

double extended_power(const Network& circuit, const VectorXd& potential) {
  if (circuit.kind() != NetworkKind::circuit) throw PreconditionError("extended_power: expected a circuit");
  if (potential.size() != static_cast<Index>(circuit.node_count())) {
    throw PreconditionError("extended_power: potential has the wrong length");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < circuit.edge_count(); ++k) {
    const double v = potential(static_cast<Index>(circuit.source_index(k))) -
                     potential(static_cast<Index>(circuit.target_index(k)));
    sum += circuit.edges()[k].label * v * v;
  }
  return 0.5 * sum;
}

double extended_dissipation(const Network& markov, const VectorXd& population) {
  if (markov.kind() != NetworkKind::detailed_balanced_markov) {
    throw PreconditionError("extended_dissipation: expected a detailed_balanced_markov network");
  }
  if (population.size() != static_cast<Index>(markov.node_count())) {
    throw PreconditionError("extended_dissipation: population has the wrong length");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < markov.edge_count(); ++k) {
    const auto s = markov.source_index(k);
    const auto t = markov.target_index(k);
    const double qs = markov.population(s);
    const double dev = population(static_cast<Index>(s)) / qs - population(static_cast<Index>(t)) / markov.population(t);
    sum += markov.edges()[k].label * qs * dev * dev;
  }
  return 0.25 * sum;
}

QuadraticFunctional laplacian(const Network& circuit) {
  if (circuit.kind() != NetworkKind::circuit) throw PreconditionError("laplacian: expected a circuit");
  const Index n = static_cast<Index>(circuit.node_count());
  MatrixXd l = MatrixXd::Zero(n, n);
  for (std::size_t k = 0; k < circuit.edge_count(); ++k) {
    const auto s = static_cast<Index>(circuit.source_index(k));
    const auto t = static_cast<Index>(circuit.target_index(k));
    if (s == t) continue;
    const double c = circuit.edges()[k].label;
    l(s, s) += c;
    l(t, t) += c;
    l(s, t) -= c;
    l(t, s) -= c;
  }
  return {circuit.nodes(), std::move(l)};
}

std::vector<std::vector<std::string>> isolated_internal_components(const OpenNetwork& net) {
  const Network& g = net.network();
  std::vector<std::vector<std::size_t>> adj(g.node_count());
  for (std::size_t k = 0; k < g.edge_count(); ++k) {
    adj[g.source_index(k)].push_back(g.target_index(k));
    adj[g.target_index(k)].push_back(g.source_index(k));
  }
  std::vector<int> mark(g.node_count(), 0);  // 0 unseen, 1 reached from a terminal, 2 isolated
  std::deque<std::size_t> queue(net.terminals().begin(), net.terminals().end());
  for (auto t : net.terminals()) mark[t] = 1;
  while (!queue.empty()) {
    const auto n = queue.front();
    queue.pop_front();
    for (auto m : adj[n]) {
      if (!mark[m]) {
        mark[m] = 1;
        queue.push_back(m);
      }
    }
  }
  std::vector<std::vector<std::string>> out;
  for (auto start : net.internal_nodes()) {
    if (mark[start]) continue;
    std::vector<std::string> comp;
    queue.push_back(start);
    mark[start] = 2;
    while (!queue.empty()) {
      const auto n = queue.front();
      queue.pop_front();
      comp.push_back(g.nodes()[n]);
      for (auto m : adj[n]) {
        if (!mark[m]) {
          mark[m] = 2;
          queue.push_back(m);
        }
      }
    }
    out.push_back(std::move(comp));
  }
  return out;
}

Minimizer minimize_power(const OpenNetwork& circuit, const VectorXd& boundary) {
  require_kind(circuit, NetworkKind::circuit, "minimize_power");
  require_boundary(circuit, boundary, "minimize_power");
  const MatrixXd l = laplacian(circuit.network()).coefficients;
  const auto& t = circuit.terminals();
  const auto& in = circuit.internal_nodes();

  const VectorXd phi_internal = pinv_solve(take(l, in, in), -take(l, in, t) * boundary);
  Minimizer out;
  out.state.resize(l.rows());
  for (std::size_t k = 0; k < t.size(); ++k) out.state(static_cast<Index>(t[k])) = boundary(static_cast<Index>(k));
  for (std::size_t k = 0; k < in.size(); ++k) {
    out.state(static_cast<Index>(in[k])) = phi_internal(static_cast<Index>(k));
  }
  out.value = extended_power(circuit.network(), out.state);
  out.warnings = isolation_warnings(circuit);
  return out;
}

Minimizer minimize_dissipation(const OpenNetwork& markov, const VectorXd& boundary) {
  require_kind(markov, NetworkKind::detailed_balanced_markov, "minimize_dissipation");
  require_boundary(markov, boundary, "minimize_dissipation");
  const VectorXd deviation = boundary.cwiseQuotient(terminal_populations(markov));
  Minimizer m = minimize_power(to_circuit(markov), deviation);
  const auto& q = *markov.network().populations();
  for (Index k = 0; k < m.state.size(); ++k) m.state(k) *= q[static_cast<std::size_t>(k)];
  const auto& t = markov.terminals();
  for (std::size_t k = 0; k < t.size(); ++k) m.state(static_cast<Index>(t[k])) = boundary(static_cast<Index>(k));
  m.value = extended_dissipation(markov.network(), m.state);
  return m;
}

double power_functional(const OpenNetwork& circuit, const VectorXd& boundary) {
  return minimize_power(circuit, boundary).value;
}

double dissipation_functional(const OpenNetwork& markov, const VectorXd& boundary) {
  require_kind(markov, NetworkKind::detailed_balanced_markov, "dissipation_functional");
  require_boundary(markov, boundary, "dissipation_functional");
  return extended_dissipation(markov.network(), generator_steady_state(markov, boundary));
}

MatrixXd dirichlet_to_neumann(const OpenNetwork& circuit) {
  require_kind(circuit, NetworkKind::circuit, "dirichlet_to_neumann");
  const MatrixXd l = laplacian(circuit.network()).coefficients;
  const auto& t = circuit.terminals();
  const auto& in = circuit.internal_nodes();
  return take(l, t, t) - take(l, t, in) * pinv_solve(take(l, in, in), take(l, in, t));
}

MatrixXd markov_flow_map(const OpenNetwork& markov) {
  if (markov.kind() == NetworkKind::circuit) throw PreconditionError("markov_flow_map: expected a Markov network");
  const MatrixXd h = hamiltonian(markov.network()).entries;
  const auto& t = markov.terminals();
  const auto& in = markov.internal_nodes();
  return -(take(h, t, t) - take(h, t, in) * pinv_solve(take(h, in, in), take(h, in, t)));
}

VectorXd boundary_current(const OpenNetwork& circuit, const VectorXd& boundary) {
  require_boundary(circuit, boundary, "boundary_current");
  return dirichlet_to_neumann(circuit) * boundary;
}

VectorXd boundary_flow(const OpenNetwork& markov, const VectorXd& boundary) {
  const VectorXd p = minimize_dissipation(markov, boundary).state;
  const VectorXd hp = hamiltonian(markov.network()).entries * p;
  VectorXd j(static_cast<Index>(markov.terminals().size()));
  for (std::size_t k = 0; k < markov.terminals().size(); ++k) {
    j(static_cast<Index>(k)) = -hp(static_cast<Index>(markov.terminals()[k]));
  }
  return j;
}

BoundaryGraphSubspace graph_of_boundary_map(const OpenNetwork& net) {
  const MatrixXd map = net.kind() == NetworkKind::circuit ? dirichlet_to_neumann(net) : markov_flow_map(net);
  BoundaryGraphSubspace out;
  for (auto t : net.terminals()) out.terminals.push_back(net.network().nodes()[t]);
  out.space = graph_of(map).space();
  return out;
}

}  // namespace opennet
