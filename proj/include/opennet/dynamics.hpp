#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "opennet/netcore.hpp"

namespace opennet {

struct HamiltonianMatrix {
  std::vector<std::string> nodes;
  Eigen::MatrixXd entries;
};

/// H_ij = sum of rates of edges j -> i (i != j), H_ii = -(outgoing rate of i).
/// Self-loops contribute nothing.
HamiltonianMatrix hamiltonian(const Network& net);

/// Off-diagonals >= -tol and every column sums to zero within tol.
bool is_infinitesimal_stochastic(const Eigen::MatrixXd& a, double tol = 1e-12);

/// max_ij |H_ij q_j - H_ji q_i| <= tol * max_ij |H_ij q_j|. Requires populations.
bool check_detailed_balance(const Network& net, double tol = 1e-9);

/// |Hq|_inf <= tol * |H|_inf |q|_inf. Requires populations.
bool check_equilibrium(const Network& net, double tol = 1e-9);

/// A terminal's boundary value as a function of time: a constant, or samples
/// joined by linear interpolation. Sampled signals are only defined on
/// [first sample time, last sample time].
class BoundarySignal {
 public:
  static BoundarySignal constant(double value);
  static BoundarySignal sampled(std::vector<double> times, std::vector<double> values);

  double operator()(double t) const;
  bool covers(double t0, double t1) const;
  bool is_constant() const { return times_.empty(); }

 private:
  double constant_ = 0.0;
  std::vector<double> times_;
  std::vector<double> values_;
};

struct Trajectory {
  std::vector<std::string> nodes;
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<std::string> warnings;
};

/// Fixed-step classical RK4 on dp/dt = Hp; the last step is shortened to land
/// on t_end. Every step is recorded.
Trajectory integrate_closed(const Network& net, const Eigen::VectorXd& p0, double t_end, double dt = 1e-3);

/// RK4 on the open master equation: internal nodes follow (Hp)_i, terminals
/// are clamped to their signal at every stage time (t, t + dt/2, t + dt).
/// `boundary` and `initial_internal` are keyed by node id.
Trajectory integrate_open(const OpenNetwork& net, const std::map<std::string, BoundarySignal>& boundary,
                          const std::map<std::string, double>& initial_internal, double t_end, double dt = 1e-3);

/// Header `t,<node ids...>`, one row per sample, shortest round-trip floats.
std::string trajectory_to_csv(const Trajectory& traj);

}  // namespace opennet
