#pragma once

#include <filesystem>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "opennet/cli.hpp"
#include "test_util.hpp"

namespace opennet::testing {

struct Case {
  std::string name;
  std::vector<std::string> args;
  int exit_code;
  bool writes_file = false;  // args contain "-o OUT"; OUT is replaced with a scratch path
};

inline void PrintTo(const Case& c, std::ostream* os) { *os << c.name; }

inline const std::vector<Case>& cli_cases() {
  static const std::vector<Case> all = {
      {"help", {"--help"}, exit_ok},
      {"no_subcommand", {}, exit_parse},
      {"unknown_subcommand", {"frobnicate"}, exit_parse},
      {"missing_file", {"dagger", "does_not_exist.json"}, exit_parse},
      {"validate_ok", {"validate", "twostate.json"}, exit_ok},
      {"validate_unbalanced", {"validate", "unbalanced.json"}, exit_check_failed},
      {"validate_malformed", {"validate", "malformed.json"}, exit_parse},
      {"validate_negative_population", {"validate", "negative_population.json"}, exit_parse},
      {"validate_petri", {"validate", "petri.json"}, exit_parse},
      {"validate_unknown_field", {"validate", "unknown_field.json"}, exit_parse},
      {"validate_bad_tol", {"validate", "twostate.json", "--tol", "-1"}, exit_parse},
      {"compose_overview", {"compose", "overview_m.json", "overview_n.json"}, exit_ok},
      {"compose_series_to_file", {"compose", "resistor.json", "resistor3.json", "-o", "OUT"}, exit_ok, true},
      {"compose_port_mismatch", {"compose", "twostate.json", "overview_m.json"}, exit_precondition},
      {"compose_population_mismatch", {"compose", "overview_m.json", "path.json"}, exit_precondition},
      {"compose_kind_mismatch", {"compose", "twostate.json", "resistor.json"}, exit_precondition},
      {"compose_one_file", {"compose", "twostate.json"}, exit_parse},
      {"tensor", {"tensor", "resistor.json", "resistor3.json"}, exit_ok},
      {"tensor_kind_mismatch", {"tensor", "resistor.json", "twostate.json"}, exit_precondition},
      {"dagger", {"dagger", "twostate.json"}, exit_ok},
      {"to_circuit", {"to-circuit", "twostate.json"}, exit_ok},
      {"to_circuit_wrong_kind", {"to-circuit", "resistor.json"}, exit_precondition},
      {"blackbox_twostate", {"blackbox", "twostate.json"}, exit_ok},
      {"blackbox_twostate_equations", {"blackbox", "twostate.json", "--equations"}, exit_ok},
      {"blackbox_resistor_equations", {"blackbox", "resistor.json", "--equations"}, exit_ok},
      {"blackbox_overview_equations", {"blackbox", "overview_m.json", "--equations"}, exit_ok},
      {"blackbox_plain_markov", {"blackbox", "plain_markov.json"}, exit_precondition},
      {"steady_state_path", {"steady-state", "path.json", "--boundary", "a=1,c=0"}, exit_ok},
      {"steady_state_resistor", {"steady-state", "resistor.json", "--boundary", "u=1,v=0"}, exit_ok},
      {"steady_state_missing_terminal", {"steady-state", "path.json", "--boundary", "a=1"}, exit_precondition},
      {"steady_state_internal_boundary", {"steady-state", "path.json", "--boundary", "a=1,b=2,c=0"},
       exit_precondition},
      {"steady_state_bad_number", {"steady-state", "path.json", "--boundary", "a=one,c=0"}, exit_parse},
      {"steady_state_no_boundary", {"steady-state", "path.json"}, exit_parse},
      {"flows_twostate", {"flows", "twostate.json", "--boundary", "a=2,b=0"}, exit_ok},
      {"flows_resistor", {"flows", "resistor.json", "--boundary", "u=1,v=0"}, exit_ok},
      {"flows_plain_markov", {"flows", "plain_markov.json", "--boundary", "a=1,b=0"}, exit_precondition},
      {"simulate_csv",
       {"simulate", "twostate.json", "--boundary-csv", "twostate_boundary.csv", "--t-end", "2", "--dt", "0.5"},
       exit_ok},
      {"simulate_constant",
       {"simulate", "path.json", "--boundary", "a=1,c=0", "--initial", "b=0.5", "--t-end", "1", "--dt", "0.25"},
       exit_ok},
      {"simulate_to_file",
       {"simulate", "path.json", "--boundary", "a=1,c=0", "--t-end", "0.5", "--dt", "0.25", "-o", "OUT"},
       exit_ok, true},
      {"simulate_bad_csv",
       {"simulate", "twostate.json", "--boundary-csv", "bad_boundary.csv", "--t-end", "1"}, exit_parse},
      {"simulate_csv_too_short",
       {"simulate", "twostate.json", "--boundary-csv", "twostate_boundary.csv", "--t-end", "5"}, exit_precondition},
      {"simulate_both_boundaries",
       {"simulate", "path.json", "--boundary", "a=1,c=0", "--boundary-csv", "twostate_boundary.csv", "--t-end", "1"},
       exit_parse},
      {"simulate_no_t_end", {"simulate", "path.json", "--boundary", "a=1,c=0"}, exit_parse},
      {"simulate_circuit", {"simulate", "resistor.json", "--boundary", "u=1,v=0", "--t-end", "1"},
       exit_precondition},
      {"check_triangle_twostate", {"check-triangle", "twostate.json"}, exit_ok},
      {"check_triangle_overview", {"check-triangle", "overview_n.json", "--tol", "1e-10"}, exit_ok},
      {"check_triangle_zero_tol", {"check-triangle", "overview_m.json", "--tol", "0"}, exit_check_failed},
      {"check_triangle_circuit", {"check-triangle", "resistor.json"}, exit_precondition},
      {"check_lagrangian_twostate", {"check-lagrangian", "twostate.json"}, exit_ok},
      {"check_lagrangian_resistor", {"check-lagrangian", "resistor.json"}, exit_ok},
      {"check_lagrangian_not_lagrangian", {"check-lagrangian", "not_lagrangian.json"}, exit_check_failed},
      {"check_lagrangian_full_relation", {"check-lagrangian", "full_relation.json"}, exit_parse},
      {"dot_twostate", {"dot", "twostate.json"}, exit_ok},
      {"dot_overview", {"dot", "overview_m.json"}, exit_ok},
  };
  return all;
}

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
  std::string file;
};

inline CliRun run_case(const Case& c, const std::filesystem::path& scratch) {
  std::vector<std::string> args = c.args;
  if (c.writes_file) {
    std::filesystem::remove(scratch);
    for (auto& a : args) {
      if (a == "OUT") a = scratch.string();
    }
  }
  std::ostringstream out, err;
  CliRun r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  if (c.writes_file) r.file = read_text(scratch.string());
  return r;
}

inline std::string render_case(const Case& c, const CliRun& r) {
  std::string text = "$ opennet";
  for (const auto& a : c.args) text += " " + a;
  text += "\nexit " + std::to_string(r.code) + "\n--- stdout\n" + r.out + "--- stderr\n" + r.err;
  if (c.writes_file) text += "--- OUT\n" + r.file;
  return text;
}

/// Golden file for a case, under the golden directory.
inline std::filesystem::path golden_path(const Case& c) {
  return std::filesystem::path(OPENNET_GOLDEN_DIR) / (c.name + ".txt");
}

}  // namespace opennet::testing
