#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace opennet {

enum class NetworkKind { markov, detailed_balanced_markov, circuit };

std::string_view to_string(NetworkKind kind);
std::optional<NetworkKind> parse_kind(std::string_view text);

/// A directed edge. `label` is a rate constant for Markov kinds and a
/// conductance for circuits.
struct Edge {
  std::string id;
  std::string source;
  std::string target;
  double label = 0.0;

  bool operator==(const Edge&) const = default;
};

/// Controls the detailed-balance check performed when a
/// detailed_balanced_markov network is constructed. The tolerance is
/// relative to the largest one-way flow H_ij q_j.
struct BalanceCheck {
  bool enabled = true;
  double tol = 1e-9;

  static BalanceCheck skip() { return {false, 0.0}; }
};

/// Immutable labelled multigraph. Populations are present iff the kind is
/// detailed_balanced_markov, aligned with `nodes()`.
///
/// Self-loops and parallel edges are allowed. Construction throws
/// InvalidNetwork when a structural invariant fails (duplicate ids, dangling
/// endpoints, non-positive labels or populations) and, unless disabled, when
/// detailed balance does not hold.
class Network {
 public:
  Network() = default;
  Network(NetworkKind kind, std::vector<std::string> nodes, std::vector<Edge> edges,
          std::optional<std::vector<double>> populations = std::nullopt,
          BalanceCheck check = {});

  NetworkKind kind() const { return kind_; }
  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::optional<std::vector<double>>& populations() const { return populations_; }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  std::optional<std::size_t> find(std::string_view id) const;
  std::size_t index_of(std::string_view id) const;  // throws InvalidNetwork

  std::size_t source_index(std::size_t edge) const { return source_index_[edge]; }
  std::size_t target_index(std::size_t edge) const { return target_index_[edge]; }

  // Requires populations.
  double population(std::size_t node) const;

 private:
  NetworkKind kind_ = NetworkKind::markov;
  std::vector<std::string> nodes_;
  std::vector<Edge> edges_;
  std::optional<std::vector<double>> populations_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::size_t> source_index_;
  std::vector<std::size_t> target_index_;
};

/// Port count plus, for detailed balanced networks, the population each port
/// carries (the population of the node it lands on).
struct PortSignature {
  std::size_t count = 0;
  std::optional<std::vector<double>> populations;
};

/// A network decorated onto the cospan X -> N <- Y. Ports are ordered:
/// inputs()[k] is the image of input port k. Port maps need not be
/// injective and a node may be both an input and an output.
class OpenNetwork {
 public:
  OpenNetwork() = default;
  OpenNetwork(Network network, std::vector<std::string> inputs, std::vector<std::string> outputs);

  const Network& network() const { return network_; }
  NetworkKind kind() const { return network_.kind(); }
  const std::vector<std::string>& inputs() const { return inputs_; }
  const std::vector<std::string>& outputs() const { return outputs_; }
  const std::vector<std::size_t>& input_indices() const { return input_index_; }
  const std::vector<std::size_t>& output_indices() const { return output_index_; }

  /// Terminal node indices in network node order.
  const std::vector<std::size_t>& terminals() const { return terminals_; }
  const std::vector<std::size_t>& internal_nodes() const { return internal_; }
  bool is_terminal(std::size_t node) const { return terminal_slot_[node].has_value(); }
  /// Position of a terminal node within terminals().
  std::size_t terminal_slot(std::size_t node) const;

  PortSignature input_signature() const;
  PortSignature output_signature() const;

 private:
  Network network_;
  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
  std::vector<std::size_t> input_index_;
  std::vector<std::size_t> output_index_;
  std::vector<std::size_t> terminals_;
  std::vector<std::size_t> internal_;
  std::vector<std::optional<std::size_t>> terminal_slot_;
};

struct Finding {
  std::string code;  // "structure" or "detailed_balance"
  std::string message;
  double residual = 0.0;
};

struct ValidationReport {
  std::vector<Finding> findings;
  bool ok() const { return findings.empty(); }
};

/// Structural findings for raw network data; empty means a Network can be
/// built from it.
std::vector<Finding> structural_findings(NetworkKind kind, std::span<const std::string> nodes,
                                         std::span<const Edge> edges,
                                         const std::optional<std::vector<double>>& populations);

struct BalanceResidual {
  double residual = 0.0;  // max |H_ij q_j - H_ji q_i|
  double scale = 1.0;     // max |H_ij q_j|, or 1 when there is no flow
};

/// Detailed-balance residual computed from pairwise edge flows. Requires
/// populations.
BalanceResidual detailed_balance_residual(const Network& net);

/// Never throws; every violated invariant becomes a finding.
ValidationReport validate(const OpenNetwork& net, double tol = 1e-9);

struct Pushout {
  std::vector<std::string> nodes;
  std::vector<std::size_t> from_left;   // N  -> P
  std::vector<std::size_t> from_right;  // N' -> P
};

/// Quotient of N + N' by the equivalence generated by
/// left_legs[y] ~ right_legs[y]. Members are named "l.<id>" / "r.<id>" and a
/// class takes the lexicographically least member name. Classes are ordered
/// by first appearance scanning N then N'.
Pushout pushout(std::span<const std::string> left_nodes, std::span<const std::string> right_nodes,
                std::span<const std::size_t> left_legs, std::span<const std::size_t> right_legs);

/// Glues outputs of `first` to inputs of `second` (port k to port k).
/// For detailed balanced networks the populations of glued ports must agree
/// within relative tolerance `tol`.
OpenNetwork compose(const OpenNetwork& first, const OpenNetwork& second, double tol = 1e-9);

/// Disjoint union; ports are concatenated.
OpenNetwork tensor(const OpenNetwork& a, const OpenNetwork& b);

OpenNetwork dagger(const OpenNetwork& m);

OpenNetwork forget_populations(const OpenNetwork& m);

/// The identity cospan X -> X <- X with no edges. Populations are required
/// for (and only for) the detailed balanced kind.
OpenNetwork identity_network(NetworkKind kind, std::size_t ports,
                             const std::optional<std::vector<double>>& populations = std::nullopt);

}  // namespace opennet
