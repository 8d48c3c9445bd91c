#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "opennet/blackbox.hpp"
#include "opennet/errors.hpp"
#include "opennet/netcore.hpp"

namespace opennet {

inline constexpr std::string_view format_version = "1.0";

/// A document that does not match the schema. `pointer` is a JSON pointer to
/// the offending value ("" for the whole document).
class SchemaError : public Error {
 public:
  SchemaError(std::string pointer, const std::string& message)
      : Error((pointer.empty() ? std::string("/") : pointer) + ": " + message), pointer_(std::move(pointer)) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

struct ParseOptions {
  /// When false, detailed_balanced_markov documents are accepted even if
  /// they violate detailed balance (so that validate can report on them).
  bool check_balance = true;
  double tol = 1e-9;
};

/// Network document:
///   {"format_version": "1.0", "kind": ..., "nodes": [{"id", "population"?}],
///    "edges": [{"id"?, "source", "target", "rate" | "conductance"}],
///    "inputs": [...], "outputs": [...]}
/// Circuits label edges with "conductance", Markov kinds with "rate".
/// Unknown fields are rejected. Throws SchemaError.
OpenNetwork parse_network(std::string_view text, const ParseOptions& options = {});
std::string emit_network(const OpenNetwork& net);

/// Relation document:
///   {"source_dim", "target_dim", "basis": [[...], ...],
///    "port_populations"?: {"inputs": [...], "outputs": [...]}}
/// `basis` has one row per ambient coordinate and one column per basis vector.
BoundaryBehavior parse_behavior(std::string_view text);
std::string emit_behavior(const BoundaryBehavior& b);

/// Graphviz rendering with edge labels and dashed port arrows.
std::string to_dot(const OpenNetwork& net);

/// Deterministic pretty printer: two-space indent, shortest round-trip
/// floats, flat arrays and objects of scalars kept on one line.
std::string dump_json(const nlohmann::ordered_json& value);

}  // namespace opennet
