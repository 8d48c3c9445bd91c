#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "opennet/linrel.hpp"
#include "opennet/netcore.hpp"

namespace opennet {

/// value(v) = 1/2 v^T L v for a weighted graph Laplacian L.
struct QuadraticFunctional {
  std::vector<std::string> nodes;
  Eigen::MatrixXd coefficients;

  double value(const Eigen::VectorXd& v) const { return 0.5 * v.dot(coefficients * v); }
};

/// P(phi) = 1/2 sum_e c_e (phi_s - phi_t)^2. Requires a circuit.
double extended_power(const Network& circuit, const Eigen::VectorXd& potential);

/// C(p) = 1/4 sum_e r_e q_s (p_s/q_s - p_t/q_t)^2. Requires a detailed
/// balanced Markov network.
double extended_dissipation(const Network& markov, const Eigen::VectorXd& population);

/// L_nm = -(sum of conductances between n and m), L_nn = sum of non-loop
/// conductances at n.
QuadraticFunctional laplacian(const Network& circuit);

struct Minimizer {
  Eigen::VectorXd state;  // over all nodes, in node order
  double value = 0.0;     // the functional at `state`
  std::vector<std::string> warnings;
};

/// Minimises P subject to phi|_T = boundary (terminal order of the open
/// network). Internal components that touch no terminal make L_II singular;
/// the minimum-norm minimiser is returned and a warning lists them.
Minimizer minimize_power(const OpenNetwork& circuit, const Eigen::VectorXd& boundary);

/// Minimises C subject to p|_T = boundary by minimising P on the converted
/// circuit in deviation coordinates x = p / q.
Minimizer minimize_dissipation(const OpenNetwork& markov, const Eigen::VectorXd& boundary);

/// Q(psi) = min P and D(b) = min C.
double power_functional(const OpenNetwork& circuit, const Eigen::VectorXd& boundary);
double dissipation_functional(const OpenNetwork& markov, const Eigen::VectorXd& boundary);

/// The Dirichlet-to-Neumann map L_TT - L_TI L_II^+ L_IT.
Eigen::MatrixXd dirichlet_to_neumann(const OpenNetwork& circuit);

/// Boundary flow map b -> -(Hp)|_T of a Markov network, computed from the
/// generator alone: -(H_TT - H_TI H_II^+ H_IT). Independent of the circuit
/// conversion.
Eigen::MatrixXd markov_flow_map(const OpenNetwork& markov);

/// iota = DtN psi.
Eigen::VectorXd boundary_current(const OpenNetwork& circuit, const Eigen::VectorXd& boundary);

/// j_n = -(Hp)_n at the minimum-dissipation state p, for terminals n.
Eigen::VectorXd boundary_flow(const OpenNetwork& markov, const Eigen::VectorXd& boundary);

/// Internal components (node ids) that are not connected to any terminal.
std::vector<std::vector<std::string>> isolated_internal_components(const OpenNetwork& net);

struct BoundaryGraphSubspace {
  std::vector<std::string> terminals;
  Subspace space;  // in R^T + R^T, potentials/populations first
};

/// {(psi, DtN psi)} for circuits, {(b, flow(b))} for Markov networks.
BoundaryGraphSubspace graph_of_boundary_map(const OpenNetwork& net);

}  // namespace opennet
