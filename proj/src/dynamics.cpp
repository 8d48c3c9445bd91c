#include "opennet/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "opennet/errors.hpp"
#include "opennet/format.hpp"

namespace opennet {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

HamiltonianMatrix hamiltonian(const Network& net) {
  const Index n = static_cast<Index>(net.node_count());
  MatrixXd h = MatrixXd::Zero(n, n);
  for (std::size_t k = 0; k < net.edge_count(); ++k) {
    const auto s = static_cast<Index>(net.source_index(k));
    const auto t = static_cast<Index>(net.target_index(k));
    if (s == t) continue;
    const double r = net.edges()[k].label;
    h(t, s) += r;
    h(s, s) -= r;
  }
  return {net.nodes(), std::move(h)};
}

bool is_infinitesimal_stochastic(const MatrixXd& a, double tol) {
  if (a.rows() != a.cols()) return false;
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) {
      if (i != j && a(i, j) < -tol) return false;
    }
    if (std::abs(a.col(j).sum()) > tol) return false;
  }
  return true;
}

bool check_detailed_balance(const Network& net, double tol) {
  if (!net.populations()) throw PreconditionError("check_detailed_balance: network has no populations");
  const MatrixXd h = hamiltonian(net).entries;
  const Index n = h.rows();
  const VectorXd q = Eigen::Map<const VectorXd>(net.populations()->data(), n);
  double residual = 0.0;
  double scale = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      scale = std::max(scale, std::abs(h(i, j) * q(j)));
      residual = std::max(residual, std::abs(h(i, j) * q(j) - h(j, i) * q(i)));
    }
  }
  if (scale == 0.0) scale = 1.0;
  return residual <= tol * scale;
}

bool check_equilibrium(const Network& net, double tol) {
  if (!net.populations()) throw PreconditionError("check_equilibrium: network has no populations");
  const MatrixXd h = hamiltonian(net).entries;
  if (h.size() == 0) return true;
  const VectorXd q = Eigen::Map<const VectorXd>(net.populations()->data(), h.rows());
  const double hq = (h * q).cwiseAbs().maxCoeff();
  const double h_norm = h.cwiseAbs().rowwise().sum().maxCoeff();
  return hq <= tol * h_norm * q.cwiseAbs().maxCoeff();
}

BoundarySignal BoundarySignal::constant(double value) {
  if (!std::isfinite(value)) throw PreconditionError("boundary signal value must be finite");
  BoundarySignal s;
  s.constant_ = value;
  return s;
}

BoundarySignal BoundarySignal::sampled(std::vector<double> times, std::vector<double> values) {
  if (times.empty() || times.size() != values.size()) {
    throw PreconditionError("sampled boundary signal needs one value per sample time");
  }
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!std::isfinite(times[k]) || !std::isfinite(values[k])) {
      throw PreconditionError("boundary signal samples must be finite");
    }
    if (k && !(times[k] > times[k - 1])) throw PreconditionError("boundary signal times must increase strictly");
  }
  BoundarySignal s;
  s.times_ = std::move(times);
  s.values_ = std::move(values);
  return s;
}

double BoundarySignal::operator()(double t) const {
  if (times_.empty()) return constant_;
  if (t <= times_.front()) return values_.front();
  if (t >= times_.back()) return values_.back();
  const auto hi = static_cast<std::size_t>(std::upper_bound(times_.begin(), times_.end(), t) - times_.begin());
  const std::size_t lo = hi - 1;
  if (t == times_[lo]) return values_[lo];
  const double w = (t - times_[lo]) / (times_[hi] - times_[lo]);
  return values_[lo] + w * (values_[hi] - values_[lo]);
}

bool BoundarySignal::covers(double t0, double t1) const {
  return times_.empty() || (times_.front() <= t0 && times_.back() >= t1);
}

namespace {

void check_window(double t_end, double dt) {
  if (!std::isfinite(t_end) || t_end < 0.0) throw PreconditionError("t_end must be finite and non-negative");
  if (!std::isfinite(dt) || dt <= 0.0) throw PreconditionError("dt must be finite and positive");
}

// Sample times 0, dt, 2dt, ..., t_end with the final step shortened.
std::vector<double> step_times(double t_end, double dt) {
  std::vector<double> times{0.0};
  if (t_end == 0.0) return times;
  const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(t_end / dt - 1e-9)));
  times.reserve(steps + 1);
  for (std::size_t k = 1; k < steps; ++k) times.push_back(static_cast<double>(k) * dt);
  times.push_back(t_end);
  return times;
}

void note_negative(Trajectory& traj, const VectorXd& p, double t) {
  if (!traj.warnings.empty() || p.size() == 0 || p.minCoeff() >= -1e-9) return;
  std::ostringstream os;
  os << "population below -1e-9 at t = " << format_double(t);
  traj.warnings.push_back(os.str());
}

}  // namespace

Trajectory integrate_closed(const Network& net, const VectorXd& p0, double t_end, double dt) {
  check_window(t_end, dt);
  if (p0.size() != static_cast<Index>(net.node_count())) {
    throw PreconditionError("initial state has " + std::to_string(p0.size()) + " entries, network has " +
                            std::to_string(net.node_count()) + " nodes");
  }
  if (!p0.allFinite()) throw PreconditionError("initial state must be finite");

  const MatrixXd h = hamiltonian(net).entries;
  Trajectory traj;
  traj.nodes = net.nodes();
  traj.times = step_times(t_end, dt);
  traj.states.reserve(traj.times.size());
  traj.states.push_back(p0);
  VectorXd p = p0;
  for (std::size_t k = 1; k < traj.times.size(); ++k) {
    const double step = traj.times[k] - traj.times[k - 1];
    const VectorXd k1 = h * p;
    const VectorXd k2 = h * (p + 0.5 * step * k1);
    const VectorXd k3 = h * (p + 0.5 * step * k2);
    const VectorXd k4 = h * (p + step * k3);
    p += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    note_negative(traj, p, traj.times[k]);
    traj.states.push_back(p);
  }
  return traj;
}

Trajectory integrate_open(const OpenNetwork& net, const std::map<std::string, BoundarySignal>& boundary,
                          const std::map<std::string, double>& initial_internal, double t_end, double dt) {
  check_window(t_end, dt);
  const Network& g = net.network();
  const Index n = static_cast<Index>(g.node_count());

  std::vector<const BoundarySignal*> signal(g.node_count(), nullptr);
  for (const auto& [id, s] : boundary) {
    auto node = g.find(id);
    if (!node || !net.is_terminal(*node)) throw PreconditionError("boundary given for non-terminal '" + id + "'");
    if (!s.covers(0.0, t_end)) throw PreconditionError("boundary signal for '" + id + "' does not cover [0, t_end]");
    signal[*node] = &s;
  }
  for (auto t : net.terminals()) {
    if (!signal[t]) throw PreconditionError("missing boundary signal for terminal '" + g.nodes()[t] + "'");
  }

  VectorXd p = VectorXd::Zero(n);
  for (const auto& [id, v] : initial_internal) {
    auto node = g.find(id);
    if (!node || net.is_terminal(*node)) throw PreconditionError("initial value given for non-internal '" + id + "'");
    if (!std::isfinite(v)) throw PreconditionError("initial value for '" + id + "' must be finite");
    p(static_cast<Index>(*node)) = v;
  }
  for (auto i : net.internal_nodes()) {
    if (!initial_internal.contains(g.nodes()[i])) {
      throw PreconditionError("missing initial value for internal node '" + g.nodes()[i] + "'");
    }
  }

  const MatrixXd h = hamiltonian(g).entries;
  auto clamp = [&](VectorXd& y, double t) {
    for (auto k : net.terminals()) y(static_cast<Index>(k)) = (*signal[k])(t);
  };
  auto rhs = [&](VectorXd y, double t) {
    clamp(y, t);
    VectorXd dy = h * y;
    for (auto k : net.terminals()) dy(static_cast<Index>(k)) = 0.0;
    return dy;
  };

  Trajectory traj;
  traj.nodes = g.nodes();
  traj.times = step_times(t_end, dt);
  traj.states.reserve(traj.times.size());
  clamp(p, 0.0);
  traj.states.push_back(p);
  for (std::size_t k = 1; k < traj.times.size(); ++k) {
    const double t = traj.times[k - 1];
    const double step = traj.times[k] - t;
    const VectorXd k1 = rhs(p, t);
    const VectorXd k2 = rhs(p + 0.5 * step * k1, t + 0.5 * step);
    const VectorXd k3 = rhs(p + 0.5 * step * k2, t + 0.5 * step);
    const VectorXd k4 = rhs(p + step * k3, traj.times[k]);
    p += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    clamp(p, traj.times[k]);
    note_negative(traj, p, traj.times[k]);
    traj.states.push_back(p);
  }
  return traj;
}

std::string trajectory_to_csv(const Trajectory& traj) {
  std::string out = "t";
  for (const auto& id : traj.nodes) out += "," + id;
  out += "\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    out += format_double(traj.times[k]);
    for (Index j = 0; j < traj.states[k].size(); ++j) out += "," + format_double(traj.states[k](j));
    out += "\n";
  }
  return out;
}

}  // namespace opennet
