#include "opennet/blackbox.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "opennet/errors.hpp"
#include "opennet/varsolve.hpp"

namespace opennet {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

Index as_index(std::size_t n) { return static_cast<Index>(n); }

VectorXd signature_vector(const PortSignature& sig) {
  const auto& q = *sig.populations;
  return Eigen::Map<const VectorXd>(q.data(), as_index(q.size()));
}

void require_kind(const OpenNetwork& net, NetworkKind kind, const char* op) {
  if (net.kind() != kind) {
    throw PreconditionError(std::string(op) + ": expected a " + std::string(to_string(kind)) + " network, got " +
                            std::string(to_string(net.kind())));
  }
}

std::vector<std::size_t> slots(const OpenNetwork& net, const std::vector<std::size_t>& nodes) {
  std::vector<std::size_t> out;
  out.reserve(nodes.size());
  for (auto n : nodes) out.push_back(net.terminal_slot(n));
  return out;
}

LinearRelation behavior_relation(const OpenNetwork& net) {
  const auto in = slots(net, net.input_indices());
  const auto out = slots(net, net.output_indices());
  const LinearRelation s = port_relation(in, out, net.terminals().size());
  const Subspace space = apply_relation_to_subspace(s, graph_of_boundary_map(net).space);
  return LinearRelation(2 * in.size(), 2 * out.size(), space);
}

std::string format_coefficient(double c) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", c);
  return buf;
}

// Gauss-Jordan elimination in place; returns the pivot column of each
// nonzero row.
std::vector<Index> row_reduce(MatrixXd& m, double tol) {
  std::vector<Index> pivots;
  Index row = 0;
  for (Index col = 0; col < m.cols() && row < m.rows(); ++col) {
    Index best = row;
    for (Index r = row + 1; r < m.rows(); ++r) {
      if (std::abs(m(r, col)) > std::abs(m(best, col))) best = r;
    }
    if (std::abs(m(best, col)) <= tol) continue;
    m.row(row).swap(m.row(best));
    m.row(row) /= m(row, col);
    for (Index r = 0; r < m.rows(); ++r) {
      if (r != row) m.row(r) -= m(r, col) * m.row(row);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

std::vector<std::string> port_names(char side, std::size_t count) {
  if (count == 1) return {std::string(1, side)};
  std::vector<std::string> out;
  for (std::size_t k = 0; k < count; ++k) out.push_back(side + std::to_string(k + 1));
  return out;
}

}  // namespace

BoundaryBehavior::BoundaryBehavior(std::size_t input_ports, std::size_t output_ports, LinearRelation relation,
                                   std::optional<VectorXd> input_populations,
                                   std::optional<VectorXd> output_populations)
    : inputs_(input_ports),
      outputs_(output_ports),
      relation_(std::move(relation)),
      input_pops_(std::move(input_populations)),
      output_pops_(std::move(output_populations)) {
  if (relation_.source_dim() != 2 * inputs_ || relation_.target_dim() != 2 * outputs_) {
    throw PreconditionError("behavior relation must map R^" + std::to_string(2 * inputs_) + " to R^" +
                            std::to_string(2 * outputs_));
  }
  if (relation_.dim() != inputs_ + outputs_) {
    throw PreconditionError("behavior has dimension " + std::to_string(relation_.dim()) + ", expected " +
                            std::to_string(inputs_ + outputs_));
  }
  if (input_pops_ && static_cast<std::size_t>(input_pops_->size()) != inputs_) {
    throw PreconditionError("input populations do not match the input port count");
  }
  if (output_pops_ && static_cast<std::size_t>(output_pops_->size()) != outputs_) {
    throw PreconditionError("output populations do not match the output port count");
  }
}

OpenNetwork to_circuit(const OpenNetwork& markov) {
  require_kind(markov, NetworkKind::detailed_balanced_markov, "to_circuit");
  const Network& g = markov.network();
  std::vector<Edge> edges = g.edges();
  for (std::size_t k = 0; k < edges.size(); ++k) edges[k].label = 0.5 * edges[k].label * g.population(g.source_index(k));
  return OpenNetwork(Network(NetworkKind::circuit, g.nodes(), std::move(edges)), markov.inputs(), markov.outputs());
}

BoundaryBehavior blackbox_circuit(const OpenNetwork& circuit) {
  require_kind(circuit, NetworkKind::circuit, "blackbox_circuit");
  return BoundaryBehavior(circuit.inputs().size(), circuit.outputs().size(), behavior_relation(circuit));
}

BoundaryBehavior blackbox_markov(const OpenNetwork& markov) {
  require_kind(markov, NetworkKind::detailed_balanced_markov, "blackbox_markov");
  const VectorXd qx = signature_vector(markov.input_signature());
  const VectorXd qy = signature_vector(markov.output_signature());
  const LinearRelation k = blackbox_circuit(to_circuit(markov)).relation();
  const LinearRelation r = compose_relations(compose_relations(alpha_inverse(qx), k), alpha(qy));
  return BoundaryBehavior(qx.size(), qy.size(), r, qx, qy);
}

BoundaryBehavior blackbox_markov_direct(const OpenNetwork& markov) {
  require_kind(markov, NetworkKind::detailed_balanced_markov, "blackbox_markov_direct");
  return BoundaryBehavior(markov.inputs().size(), markov.outputs().size(), behavior_relation(markov),
                          signature_vector(markov.input_signature()), signature_vector(markov.output_signature()));
}

TriangleReport check_triangle(const OpenNetwork& markov, double tol) {
  TriangleReport report;
  report.distance = relation_distance(blackbox_markov_direct(markov).relation(), blackbox_markov(markov).relation());
  report.passed = report.distance < tol;
  return report;
}

bool check_lagrangian_behavior(const BoundaryBehavior& b, BehaviorSemantics semantics, double tol) {
  VectorXd sw = VectorXd::Ones(as_index(b.input_ports()));
  VectorXd tw = VectorXd::Ones(as_index(b.output_ports()));
  if (semantics == BehaviorSemantics::markov) {
    if (!b.input_populations() || !b.output_populations()) {
      throw PreconditionError("Lagrangian check for a Markov behavior needs port populations");
    }
    sw = *b.input_populations();
    tw = *b.output_populations();
  }
  return is_lagrangian(b.relation(), sw, tw, tol);
}

BoundaryBehavior compose_behaviors(const BoundaryBehavior& first, const BoundaryBehavior& second, double tol) {
  if (first.output_ports() != second.input_ports()) {
    throw PreconditionError("cannot compose behaviors: " + std::to_string(first.output_ports()) + " outputs vs " +
                            std::to_string(second.input_ports()) + " inputs");
  }
  std::optional<VectorXd> qx, qy;
  if (first.input_populations() && second.output_populations()) {
    qx = first.input_populations();
    qy = second.output_populations();
  }
  return BoundaryBehavior(first.input_ports(), second.output_ports(),
                          compose_relations(first.relation(), second.relation(), tol), qx, qy);
}

BoundaryBehavior tensor_behaviors(const BoundaryBehavior& a, const BoundaryBehavior& b) {
  const LinearRelation sum = oplus(a.relation(), b.relation());
  const std::size_t x1 = a.input_ports(), x2 = b.input_ports();
  const std::size_t y1 = a.output_ports(), y2 = b.output_ports();
  // oplus layout: (phi_X1, iota_X1, phi_X2, iota_X2 | phi_Y1, iota_Y1, phi_Y2, iota_Y2)
  std::vector<std::size_t> order;
  auto side = [&](std::size_t base, std::size_t n1, std::size_t n2) {
    for (std::size_t k = 0; k < n1; ++k) order.push_back(base + k);
    for (std::size_t k = 0; k < n2; ++k) order.push_back(base + 2 * n1 + k);
    for (std::size_t k = 0; k < n1; ++k) order.push_back(base + n1 + k);
    for (std::size_t k = 0; k < n2; ++k) order.push_back(base + 2 * n1 + n2 + k);
  };
  side(0, x1, x2);
  side(2 * (x1 + x2), y1, y2);

  auto join = [](const std::optional<VectorXd>& u, const std::optional<VectorXd>& v) -> std::optional<VectorXd> {
    if (!u || !v) return std::nullopt;
    VectorXd out(u->size() + v->size());
    out << *u, *v;
    return out;
  };
  std::optional<VectorXd> qx = join(a.input_populations(), b.input_populations());
  std::optional<VectorXd> qy = join(a.output_populations(), b.output_populations());
  if (!qx || !qy) qx = qy = std::nullopt;
  return BoundaryBehavior(x1 + x2, y1 + y2, permute_relation(sum, order, 2 * (x1 + x2)), qx, qy);
}

BoundaryBehavior dagger_behavior(const BoundaryBehavior& b) {
  const LinearRelation t = transpose_relation(b.relation());
  MatrixXd basis = t.space().basis();
  const Index y = as_index(b.output_ports());
  const Index x = as_index(b.input_ports());
  basis.middleRows(y, y) *= -1.0;
  basis.bottomRows(x) *= -1.0;
  const Subspace space = subspace_from_spanning(t.space().ambient_dim(), basis);
  return BoundaryBehavior(b.output_ports(), b.input_ports(), LinearRelation(2 * b.output_ports(), 2 * b.input_ports(), space),
                          b.output_populations(), b.input_populations());
}

std::vector<std::string> behavior_equations(const BoundaryBehavior& b, const OpenNetwork& labels,
                                            BehaviorSemantics semantics) {
  const std::size_t nx = b.input_ports(), ny = b.output_ports();
  if (labels.inputs().size() != nx || labels.outputs().size() != ny) {
    throw PreconditionError("behavior_equations: port counts of the labelling network do not match");
  }
  const std::string pot = semantics == BehaviorSemantics::markov ? "p_" : "phi_";
  const std::string flow = semantics == BehaviorSemantics::markov ? "j_" : "iota_";

  std::vector<std::string> names;
  for (const auto& p : port_names('x', nx)) names.push_back(flow + p);
  for (const auto& p : port_names('y', ny)) names.push_back(flow + p);
  std::map<std::string, std::size_t> node_column;
  auto column_of = [&](const std::string& node) {
    auto [it, fresh] = node_column.emplace(node, names.size());
    if (fresh) names.push_back(pot + node);
    return it->second;
  };

  // E expands (flows, node potentials) into behavior coordinates.
  const std::size_t ambient = 2 * (nx + ny);
  std::vector<std::pair<std::size_t, std::size_t>> entries;  // (row, column)
  for (std::size_t k = 0; k < nx; ++k) {
    entries.emplace_back(k, column_of(labels.inputs()[k]));
    entries.emplace_back(nx + k, k);
  }
  for (std::size_t k = 0; k < ny; ++k) {
    entries.emplace_back(2 * nx + k, column_of(labels.outputs()[k]));
    entries.emplace_back(2 * nx + ny + k, nx + k);
  }
  MatrixXd e = MatrixXd::Zero(as_index(ambient), as_index(names.size()));
  for (auto [r, c] : entries) e(as_index(r), as_index(c)) = 1.0;

  const MatrixXd& basis = b.relation().space().basis();
  MatrixXd m = (MatrixXd::Identity(as_index(ambient), as_index(ambient)) - basis * basis.transpose()) * e;
  const double scale = std::max(1.0, m.size() ? m.cwiseAbs().maxCoeff() : 0.0);
  const auto pivots = row_reduce(m, 1e-9 * scale);

  std::vector<std::string> lines;
  for (std::size_t r = 0; r < pivots.size(); ++r) {
    std::string rhs;
    for (Index c = 0; c < m.cols(); ++c) {
      if (c == pivots[r]) continue;
      const double coef = -m(as_index(r), c);
      if (std::abs(coef) < 1e-12) continue;
      const std::string mag = format_coefficient(std::abs(coef));
      const std::string term = (mag == "1" ? "" : mag + "*") + names[static_cast<std::size_t>(c)];
      if (rhs.empty()) {
        rhs = (coef < 0 ? "-" : "") + term;
      } else {
        rhs += (coef < 0 ? " - " : " + ") + term;
      }
    }
    lines.push_back(names[static_cast<std::size_t>(pivots[r])] + " = " + (rhs.empty() ? "0" : rhs));
  }
  return lines;
}

}  // namespace opennet
