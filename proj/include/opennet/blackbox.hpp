#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "opennet/linrel.hpp"
#include "opennet/netcore.hpp"

namespace opennet {

enum class BehaviorSemantics { circuit, markov };

/// The steady-state behavior of an open network: a linear relation from
/// (potential, current) at the inputs to the same pair at the outputs, with
/// coordinates laid out as (phi_X, iota_X) -> (phi_Y, iota_Y). Markov
/// behaviors read these as (population, flow) and usually carry the port
/// populations.
class BoundaryBehavior {
 public:
  BoundaryBehavior() = default;
  /// Throws PreconditionError unless the relation lives in
  /// R^2X -> R^2Y and has dimension |X| + |Y|.
  BoundaryBehavior(std::size_t input_ports, std::size_t output_ports, LinearRelation relation,
                   std::optional<Eigen::VectorXd> input_populations = std::nullopt,
                   std::optional<Eigen::VectorXd> output_populations = std::nullopt);

  std::size_t input_ports() const { return inputs_; }
  std::size_t output_ports() const { return outputs_; }
  const LinearRelation& relation() const { return relation_; }
  const std::optional<Eigen::VectorXd>& input_populations() const { return input_pops_; }
  const std::optional<Eigen::VectorXd>& output_populations() const { return output_pops_; }

 private:
  std::size_t inputs_ = 0;
  std::size_t outputs_ = 0;
  LinearRelation relation_;
  std::optional<Eigen::VectorXd> input_pops_;
  std::optional<Eigen::VectorXd> output_pops_;
};

/// Same nodes, edges and ports; conductance c_e = 1/2 r_e q_{s(e)}.
OpenNetwork to_circuit(const OpenNetwork& markov);

/// S[i,o] applied to the graph of the Dirichlet-to-Neumann map.
BoundaryBehavior blackbox_circuit(const OpenNetwork& circuit);

/// alpha_Y o blackbox_circuit(to_circuit(m)) o alpha_X^-1.
BoundaryBehavior blackbox_markov(const OpenNetwork& markov);

/// S[i,o] applied to the graph of the boundary flow map, computed from the
/// generator without going through the circuit.
BoundaryBehavior blackbox_markov_direct(const OpenNetwork& markov);

struct TriangleReport {
  double distance = 0.0;
  bool passed = false;
};

TriangleReport check_triangle(const OpenNetwork& markov, double tol = 1e-8);

/// Lagrangian test with the standard form (circuit) or with the port
/// populations as weights (markov; throws PreconditionError if absent).
bool check_lagrangian_behavior(const BoundaryBehavior& b, BehaviorSemantics semantics, double tol = 1e-8);

/// `second` after `first`; the port counts in the middle must agree.
BoundaryBehavior compose_behaviors(const BoundaryBehavior& first, const BoundaryBehavior& second,
                                   double tol = default_rank_tol);

/// Direct sum laid out to match tensor(): (phi_X1, phi_X2, iota_X1, iota_X2)
/// on each side.
BoundaryBehavior tensor_behaviors(const BoundaryBehavior& a, const BoundaryBehavior& b);

/// Behavior of dagger(m): inputs and outputs swap and, because currents are
/// measured on the other side of the network, they change sign.
BoundaryBehavior dagger_behavior(const BoundaryBehavior& b);

/// One linear equation per line, solved for flow variables where possible.
/// Potentials are named after the terminal node they sit on (p_a or phi_a),
/// flows after the port (j_x, j_y; j_x1, j_x2, ... when a side has several).
std::vector<std::string> behavior_equations(const BoundaryBehavior& b, const OpenNetwork& labels,
                                            BehaviorSemantics semantics);

}  // namespace opennet
