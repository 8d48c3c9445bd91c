#include "opennet/cli.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "opennet/blackbox.hpp"
#include "opennet/dynamics.hpp"
#include "opennet/format.hpp"
#include "opennet/netio.hpp"
#include "opennet/varsolve.hpp"

namespace opennet {

namespace {

using Eigen::Index;
using Eigen::VectorXd;

// Bad command-line input or unreadable files; maps to exit 1.
class UsageError : public Error {
 public:
  using Error::Error;
};

// A check ran and failed; the report has already been written.
struct CheckFailed {};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

double parse_double(const std::string& text, const std::string& what) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || !std::isfinite(v)) {
    throw UsageError("invalid number '" + text + "' in " + what);
  }
  return v;
}

std::map<std::string, double> parse_assignments(const std::vector<std::string>& items, const std::string& what) {
  std::map<std::string, double> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("expected key=value in " + what + ", got '" + item + "'");
    const std::string key = item.substr(0, eq);
    if (!out.emplace(key, parse_double(item.substr(eq + 1), what)).second) {
      throw UsageError("duplicate key '" + key + "' in " + what);
    }
  }
  return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

// Header "t,<terminal ids...>", then one row per sample time.
std::map<std::string, BoundarySignal> parse_boundary_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  std::vector<std::string> header;
  std::vector<double> times;
  std::vector<std::vector<double>> columns;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split(line, ',');
    const std::string where = "boundary CSV line " + std::to_string(line_no);
    if (header.empty()) {
      if (cells.size() < 2) throw UsageError(where + ": header needs a time column and at least one terminal");
      header = std::move(cells);
      columns.resize(header.size() - 1);
      continue;
    }
    if (cells.size() != header.size()) throw UsageError(where + ": expected " + std::to_string(header.size()) + " cells");
    times.push_back(parse_double(cells[0], where));
    for (std::size_t c = 1; c < cells.size(); ++c) columns[c - 1].push_back(parse_double(cells[c], where));
  }
  if (header.empty() || times.empty()) throw UsageError("boundary CSV has no samples");
  std::map<std::string, BoundarySignal> out;
  for (std::size_t c = 1; c < header.size(); ++c) {
    if (!out.emplace(header[c], BoundarySignal::sampled(times, columns[c - 1])).second) {
      throw UsageError("boundary CSV repeats column '" + header[c] + "'");
    }
  }
  return out;
}

OpenNetwork load_network(const std::string& path) { return parse_network(read_file(path)); }

void write_output(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << text)) throw UsageError("cannot write '" + path + "'");
}

VectorXd boundary_vector(const OpenNetwork& net, const std::map<std::string, double>& values) {
  const Network& g = net.network();
  for (const auto& [id, v] : values) {
    auto node = g.find(id);
    if (!node || !net.is_terminal(*node)) throw PreconditionError("boundary given for non-terminal '" + id + "'");
  }
  VectorXd b(static_cast<Index>(net.terminals().size()));
  for (std::size_t k = 0; k < net.terminals().size(); ++k) {
    const std::string& id = g.nodes()[net.terminals()[k]];
    auto it = values.find(id);
    if (it == values.end()) throw PreconditionError("missing boundary value for terminal '" + id + "'");
    b(static_cast<Index>(k)) = it->second;
  }
  return b;
}

BehaviorSemantics semantics_of(const OpenNetwork& net) {
  return net.kind() == NetworkKind::circuit ? BehaviorSemantics::circuit : BehaviorSemantics::markov;
}

BoundaryBehavior behavior_of(const OpenNetwork& net) {
  switch (net.kind()) {
    case NetworkKind::circuit:
      return blackbox_circuit(net);
    case NetworkKind::detailed_balanced_markov:
      return blackbox_markov(net);
    case NetworkKind::markov:
      break;
  }
  throw PreconditionError("black-boxing needs a circuit or a detailed_balanced_markov network");
}

void check_tol(double tol) {
  if (!std::isfinite(tol) || tol < 0.0) throw UsageError("--tol must be finite and non-negative");
}

struct Options {
  std::vector<std::string> files;
  std::string output;
  double tol = 1e-9;
  double check_tol = 1e-8;
  bool equations = false;
  std::vector<std::string> boundary;
  std::vector<std::string> initial;
  std::string boundary_csv;
  double t_end = 0.0;
  double dt = 1e-3;
};

void cmd_validate(const Options& o, std::ostream& out) {
  check_tol(o.tol);
  ParseOptions po;
  po.check_balance = false;
  const OpenNetwork net = parse_network(read_file(o.files[0]), po);
  const ValidationReport report = validate(net, o.tol);
  if (report.ok()) {
    out << "ok\n";
    return;
  }
  out << "invalid\n";
  for (const auto& f : report.findings) {
    out << f.code << ": " << f.message;
    if (f.code == "detailed_balance") out << " (residual " << format_double(f.residual) << ")";
    out << "\n";
  }
  throw CheckFailed{};
}

void cmd_steady_state(const Options& o, std::ostream& out, std::ostream& err) {
  const OpenNetwork net = load_network(o.files[0]);
  const VectorXd b = boundary_vector(net, parse_assignments(o.boundary, "--boundary"));
  Minimizer m;
  if (net.kind() == NetworkKind::circuit) {
    m = minimize_power(net, b);
  } else if (net.kind() == NetworkKind::detailed_balanced_markov) {
    m = minimize_dissipation(net, b);
  } else {
    throw PreconditionError("steady-state needs a circuit or a detailed_balanced_markov network");
  }
  nlohmann::ordered_json doc;
  const char* key = net.kind() == NetworkKind::circuit ? "potentials" : "populations";
  doc[key] = nlohmann::ordered_json::object();
  for (std::size_t k = 0; k < net.network().node_count(); ++k) {
    doc[key][net.network().nodes()[k]] = m.state(static_cast<Index>(k));
  }
  doc[net.kind() == NetworkKind::circuit ? "power" : "dissipation"] = m.value;
  for (const auto& w : m.warnings) err << "warning: " << w << "\n";
  write_output(dump_json(doc), o.output, out);
}

void cmd_flows(const Options& o, std::ostream& out) {
  const OpenNetwork net = load_network(o.files[0]);
  const VectorXd b = boundary_vector(net, parse_assignments(o.boundary, "--boundary"));
  VectorXd j;
  const char* key = "flows";
  if (net.kind() == NetworkKind::circuit) {
    j = boundary_current(net, b);
    key = "currents";
  } else if (net.kind() == NetworkKind::detailed_balanced_markov) {
    j = boundary_flow(net, b);
  } else {
    throw PreconditionError("flows needs a circuit or a detailed_balanced_markov network");
  }
  nlohmann::ordered_json doc;
  doc[key] = nlohmann::ordered_json::object();
  for (std::size_t k = 0; k < net.terminals().size(); ++k) {
    doc[key][net.network().nodes()[net.terminals()[k]]] = j(static_cast<Index>(k));
  }
  write_output(dump_json(doc), o.output, out);
}

void cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
  const OpenNetwork net = load_network(o.files[0]);
  if (net.kind() == NetworkKind::circuit) throw PreconditionError("simulate needs a Markov network");
  if (o.boundary.empty() == o.boundary_csv.empty()) {
    throw UsageError("give exactly one of --boundary and --boundary-csv");
  }
  std::map<std::string, BoundarySignal> signals;
  if (!o.boundary_csv.empty()) {
    signals = parse_boundary_csv(read_file(o.boundary_csv));
  } else {
    for (const auto& [id, v] : parse_assignments(o.boundary, "--boundary")) signals.emplace(id, BoundarySignal::constant(v));
  }
  std::map<std::string, double> initial = parse_assignments(o.initial, "--initial");
  for (auto i : net.internal_nodes()) initial.emplace(net.network().nodes()[i], 0.0);
  const Trajectory traj = integrate_open(net, signals, initial, o.t_end, o.dt);
  for (const auto& w : traj.warnings) err << "warning: " << w << "\n";
  write_output(trajectory_to_csv(traj), o.output, out);
}

void cmd_check_triangle(const Options& o, std::ostream& out) {
  check_tol(o.check_tol);
  const TriangleReport r = check_triangle(load_network(o.files[0]), o.check_tol);
  out << "distance " << format_double(r.distance) << "\n" << (r.passed ? "pass" : "fail") << "\n";
  if (!r.passed) throw CheckFailed{};
}

void cmd_check_lagrangian(const Options& o, std::ostream& out) {
  check_tol(o.check_tol);
  const std::string text = read_file(o.files[0]);
  BoundaryBehavior b;
  BehaviorSemantics sem = BehaviorSemantics::circuit;
  // A relation document can be checked directly; anything else is a network.
  const nlohmann::json probe = nlohmann::json::parse(text, nullptr, false);
  if (probe.is_object() && probe.contains("source_dim")) {
    b = parse_behavior(text);
    if (b.input_populations()) sem = BehaviorSemantics::markov;
  } else {
    const OpenNetwork net = parse_network(text);
    b = behavior_of(net);
    sem = semantics_of(net);
  }
  Eigen::VectorXd sw = Eigen::VectorXd::Ones(static_cast<Index>(b.input_ports()));
  Eigen::VectorXd tw = Eigen::VectorXd::Ones(static_cast<Index>(b.output_ports()));
  if (sem == BehaviorSemantics::markov) {
    sw = *b.input_populations();
    tw = *b.output_populations();
  }
  const bool ok = check_lagrangian_behavior(b, sem, o.check_tol);
  out << "dimension " << b.relation().dim() << " of " << (b.relation().source_dim() + b.relation().target_dim())
      << "\n";
  out << "isotropy residual " << format_double(isotropy_residual(b.relation(), sw, tw)) << "\n";
  out << (ok ? "lagrangian" : "not lagrangian") << "\n";
  if (!ok) throw CheckFailed{};
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Compose, black-box and simulate open Markov processes and circuits", "opennet"};
  app.require_subcommand(1);
  Options o;

  auto file_arg = [&](CLI::App* sub, int count) {
    sub->add_option("files", o.files, count == 1 ? "network document" : "network documents")
        ->required()
        ->expected(count);
  };
  auto output_arg = [&](CLI::App* sub) { sub->add_option("-o,--output", o.output, "write to a file instead of stdout"); };

  auto* validate_cmd = app.add_subcommand("validate", "check a network document (exit 3 on violations)");
  file_arg(validate_cmd, 1);
  validate_cmd->add_option("--tol", o.tol, "relative detailed-balance tolerance")->capture_default_str();

  auto* compose_cmd = app.add_subcommand("compose", "glue the outputs of A to the inputs of B");
  file_arg(compose_cmd, 2);
  output_arg(compose_cmd);
  compose_cmd->add_option("--tol", o.tol, "relative tolerance for port population matching")->capture_default_str();

  auto* tensor_cmd = app.add_subcommand("tensor", "disjoint union of A and B");
  file_arg(tensor_cmd, 2);
  output_arg(tensor_cmd);

  auto* dagger_cmd = app.add_subcommand("dagger", "swap inputs and outputs");
  file_arg(dagger_cmd, 1);
  output_arg(dagger_cmd);

  auto* circuit_cmd = app.add_subcommand("to-circuit", "convert a detailed balanced process to a circuit");
  file_arg(circuit_cmd, 1);
  output_arg(circuit_cmd);

  auto* blackbox_cmd = app.add_subcommand("blackbox", "print the steady-state behavior");
  file_arg(blackbox_cmd, 1);
  output_arg(blackbox_cmd);
  blackbox_cmd->add_flag("--equations", o.equations, "print linear equations instead of a relation document");

  auto* steady_cmd = app.add_subcommand("steady-state", "minimise power or dissipation for fixed boundary values");
  file_arg(steady_cmd, 1);
  output_arg(steady_cmd);
  steady_cmd->add_option("--boundary", o.boundary, "terminal values, k=v[,k=v...]")->delimiter(',')->required();

  auto* flows_cmd = app.add_subcommand("flows", "boundary flows (Markov) or currents (circuit)");
  file_arg(flows_cmd, 1);
  output_arg(flows_cmd);
  flows_cmd->add_option("--boundary", o.boundary, "terminal values, k=v[,k=v...]")->delimiter(',')->required();

  auto* simulate_cmd = app.add_subcommand("simulate", "integrate the open master equation with RK4");
  file_arg(simulate_cmd, 1);
  output_arg(simulate_cmd);
  simulate_cmd->add_option("--boundary", o.boundary, "constant terminal values, k=v[,k=v...]")->delimiter(',');
  simulate_cmd->add_option("--boundary-csv", o.boundary_csv, "CSV with header t,<terminals...>");
  simulate_cmd->add_option("--initial", o.initial, "initial internal values, k=v[,k=v...] (default 0)")
      ->delimiter(',');
  simulate_cmd->add_option("--t-end", o.t_end, "final time")->required();
  simulate_cmd->add_option("--dt", o.dt, "step size")->capture_default_str();

  auto* triangle_cmd = app.add_subcommand("check-triangle", "compare the direct and circuit routes to the behavior");
  file_arg(triangle_cmd, 1);
  triangle_cmd->add_option("--tol", o.check_tol, "principal-angle tolerance")->capture_default_str();
  auto* lagrangian_cmd = app.add_subcommand("check-lagrangian", "check that a behavior is a Lagrangian relation");
  file_arg(lagrangian_cmd, 1);
  lagrangian_cmd->add_option("--tol", o.check_tol, "isotropy tolerance")->capture_default_str();

  auto* dot_cmd = app.add_subcommand("dot", "Graphviz rendering");
  file_arg(dot_cmd, 1);
  output_arg(dot_cmd);

  if (!args.empty() && !args[0].empty() && args[0][0] != '-' && !app.get_subcommand_no_throw(args[0])) {
    err << "error: unknown subcommand '" << args[0] << "'\n";
    return exit_parse;
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return exit_ok;
    }
    err << "error: " << e.what() << "\n";
    return exit_parse;
  }

  try {
    if (app.got_subcommand(validate_cmd)) {
      cmd_validate(o, out);
    } else if (app.got_subcommand(compose_cmd)) {
      check_tol(o.tol);
      write_output(emit_network(compose(load_network(o.files[0]), load_network(o.files[1]), o.tol)), o.output, out);
    } else if (app.got_subcommand(tensor_cmd)) {
      write_output(emit_network(tensor(load_network(o.files[0]), load_network(o.files[1]))), o.output, out);
    } else if (app.got_subcommand(dagger_cmd)) {
      write_output(emit_network(dagger(load_network(o.files[0]))), o.output, out);
    } else if (app.got_subcommand(circuit_cmd)) {
      write_output(emit_network(to_circuit(load_network(o.files[0]))), o.output, out);
    } else if (app.got_subcommand(blackbox_cmd)) {
      const OpenNetwork net = load_network(o.files[0]);
      const BoundaryBehavior b = behavior_of(net);
      std::string text;
      if (o.equations) {
        for (const auto& line : behavior_equations(b, net, semantics_of(net))) text += line + "\n";
      } else {
        text = emit_behavior(b);
      }
      write_output(text, o.output, out);
    } else if (app.got_subcommand(steady_cmd)) {
      cmd_steady_state(o, out, err);
    } else if (app.got_subcommand(flows_cmd)) {
      cmd_flows(o, out);
    } else if (app.got_subcommand(simulate_cmd)) {
      cmd_simulate(o, out, err);
    } else if (app.got_subcommand(triangle_cmd)) {
      cmd_check_triangle(o, out);
    } else if (app.got_subcommand(lagrangian_cmd)) {
      cmd_check_lagrangian(o, out);
    } else if (app.got_subcommand(dot_cmd)) {
      write_output(to_dot(load_network(o.files[0])), o.output, out);
    }
  } catch (const CheckFailed&) {
    return exit_check_failed;
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << "\n";
    return exit_parse;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return exit_parse;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_precondition;
  }
  return exit_ok;
}

}  // namespace opennet
