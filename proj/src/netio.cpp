#include "opennet/netio.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "opennet/format.hpp"

namespace opennet {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using nlohmann::json;

namespace {

json parse_text(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("", std::string("malformed JSON: ") + e.what());
  }
}

void require_object(const json& v, const std::string& ptr, std::initializer_list<std::string_view> allowed,
                    std::initializer_list<std::string_view> required) {
  if (!v.is_object()) throw SchemaError(ptr, "expected an object");
  for (const auto& [key, value] : v.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw SchemaError(ptr + "/" + key, "unknown field");
  }
  for (auto r : required) {
    if (!v.contains(r)) throw SchemaError(ptr + "/" + std::string(r), "missing required field");
  }
}

std::string get_string(const json& v, const std::string& ptr) {
  if (!v.is_string()) throw SchemaError(ptr, "expected a string");
  return v.get<std::string>();
}

double get_number(const json& v, const std::string& ptr) {
  if (!v.is_number()) throw SchemaError(ptr, "expected a number");
  return v.get<double>();
}

double get_positive(const json& v, const std::string& ptr, const char* what) {
  const double x = get_number(v, ptr);
  if (!std::isfinite(x) || x <= 0.0) throw SchemaError(ptr, std::string(what) + " must be finite and positive");
  return x;
}

std::size_t get_count(const json& v, const std::string& ptr) {
  if (!v.is_number_unsigned()) throw SchemaError(ptr, "expected a non-negative integer");
  return v.get<std::size_t>();
}

const json& get_array(const json& v, const std::string& ptr) {
  if (!v.is_array()) throw SchemaError(ptr, "expected an array");
  return v;
}

std::vector<double> number_list(const json& v, const std::string& ptr) {
  std::vector<double> out;
  for (std::size_t k = 0; k < get_array(v, ptr).size(); ++k) {
    out.push_back(get_number(v[k], ptr + "/" + std::to_string(k)));
  }
  return out;
}

std::vector<std::string> port_list(const json& v, const std::string& ptr, const std::set<std::string>& nodes) {
  std::vector<std::string> out;
  for (std::size_t k = 0; k < get_array(v, ptr).size(); ++k) {
    const std::string p = ptr + "/" + std::to_string(k);
    out.push_back(get_string(v[k], p));
    if (!nodes.contains(out.back())) throw SchemaError(p, "unknown node '" + out.back() + "'");
  }
  return out;
}


void dump(const nlohmann::ordered_json& v, int depth, std::string& out);

bool is_flat(const nlohmann::ordered_json& v) {
  for (const auto& e : v) {
    if (e.is_structured()) return false;
  }
  return true;
}

void dump_scalar(const nlohmann::ordered_json& v, std::string& out) {
  if (v.is_number_float()) {
    out += format_double(v.get<double>());
  } else {
    out += v.dump();
  }
}

void dump(const nlohmann::ordered_json& v, int depth, std::string& out) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(2 * depth), ' ');
  if (v.is_object()) {
    if (v.empty()) {
      out += "{}";
      return;
    }
    const bool flat = is_flat(v);
    out += flat ? "{" : "{\n";
    bool first = true;
    for (const auto& [key, value] : v.items()) {
      if (!first) out += flat ? ", " : ",\n";
      first = false;
      if (!flat) out += pad;
      out += nlohmann::ordered_json(key).dump() + ": ";
      dump(value, depth + 1, out);
    }
    out += flat ? "}" : "\n" + close_pad + "}";
  } else if (v.is_array()) {
    if (v.empty()) {
      out += "[]";
      return;
    }
    const bool flat = is_flat(v);
    out += flat ? "[" : "[\n";
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (k) out += flat ? ", " : ",\n";
      if (!flat) out += pad;
      dump(v[k], depth + 1, out);
    }
    out += flat ? "]" : "\n" + close_pad + "]";
  } else {
    dump_scalar(v, out);
  }
}

std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string dump_json(const nlohmann::ordered_json& value) {
  std::string out;
  dump(value, 0, out);
  return out + "\n";
}

OpenNetwork parse_network(std::string_view text, const ParseOptions& options) {
  const json doc = parse_text(text);
  require_object(doc, "", {"format_version", "kind", "nodes", "edges", "inputs", "outputs"},
                 {"format_version", "kind", "nodes", "edges", "inputs", "outputs"});

  const std::string version = get_string(doc["format_version"], "/format_version");
  if (version != format_version) {
    throw SchemaError("/format_version", "unsupported version '" + version + "' (expected " +
                                             std::string(format_version) + ")");
  }
  const std::string kind_text = get_string(doc["kind"], "/kind");
  const auto kind = parse_kind(kind_text);
  if (!kind) throw SchemaError("/kind", "unknown kind '" + kind_text + "'");
  const bool balanced = *kind == NetworkKind::detailed_balanced_markov;
  const char* label_key = *kind == NetworkKind::circuit ? "conductance" : "rate";

  std::vector<std::string> nodes;
  std::vector<double> pops;
  std::set<std::string> seen;
  const json& node_list = get_array(doc["nodes"], "/nodes");
  for (std::size_t k = 0; k < node_list.size(); ++k) {
    const std::string ptr = "/nodes/" + std::to_string(k);
    const json& n = node_list[k];
    if (balanced) {
      require_object(n, ptr, {"id", "population"}, {"id", "population"});
    } else {
      require_object(n, ptr, {"id"}, {"id"});
    }
    const std::string id = get_string(n["id"], ptr + "/id");
    if (id.empty()) throw SchemaError(ptr + "/id", "node id must not be empty");
    if (!seen.insert(id).second) throw SchemaError(ptr + "/id", "duplicate node id '" + id + "'");
    nodes.push_back(id);
    if (balanced) {
      const double q = get_number(n["population"], ptr + "/population");
      if (!std::isfinite(q) || q <= 0.0) {
        throw SchemaError(ptr + "/population", "population of node '" + id + "' must be finite and positive");
      }
      pops.push_back(q);
    }
  }

  std::vector<Edge> edges;
  std::set<std::string> edge_ids;
  const json& edge_list = get_array(doc["edges"], "/edges");
  for (std::size_t k = 0; k < edge_list.size(); ++k) {
    const std::string ptr = "/edges/" + std::to_string(k);
    const json& e = edge_list[k];
    require_object(e, ptr, {"id", "source", "target", label_key}, {"source", "target", label_key});
    Edge edge;
    edge.id = e.contains("id") ? get_string(e["id"], ptr + "/id") : "e" + std::to_string(k);
    if (edge.id.empty()) throw SchemaError(ptr + "/id", "edge id must not be empty");
    if (!edge_ids.insert(edge.id).second) throw SchemaError(ptr + "/id", "duplicate edge id '" + edge.id + "'");
    edge.source = get_string(e["source"], ptr + "/source");
    edge.target = get_string(e["target"], ptr + "/target");
    if (!seen.contains(edge.source)) throw SchemaError(ptr + "/source", "unknown node '" + edge.source + "'");
    if (!seen.contains(edge.target)) throw SchemaError(ptr + "/target", "unknown node '" + edge.target + "'");
    edge.label = get_positive(e[label_key], ptr + "/" + label_key, label_key);
    edges.push_back(std::move(edge));
  }

  auto inputs = port_list(doc["inputs"], "/inputs", seen);
  auto outputs = port_list(doc["outputs"], "/outputs", seen);

  BalanceCheck check;
  check.enabled = options.check_balance;
  check.tol = options.tol;
  try {
    Network net(*kind, std::move(nodes), std::move(edges),
                balanced ? std::optional<std::vector<double>>(std::move(pops)) : std::nullopt, check);
    return OpenNetwork(std::move(net), std::move(inputs), std::move(outputs));
  } catch (const InvalidNetwork& e) {
    throw SchemaError("", e.what());
  }
}

std::string emit_network(const OpenNetwork& net) {
  const Network& g = net.network();
  nlohmann::ordered_json doc;
  doc["format_version"] = std::string(format_version);
  doc["kind"] = std::string(to_string(g.kind()));
  doc["nodes"] = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < g.node_count(); ++k) {
    nlohmann::ordered_json n;
    n["id"] = g.nodes()[k];
    if (g.populations()) n["population"] = g.population(k);
    doc["nodes"].push_back(std::move(n));
  }
  doc["edges"] = nlohmann::ordered_json::array();
  const char* label_key = g.kind() == NetworkKind::circuit ? "conductance" : "rate";
  for (const auto& e : g.edges()) {
    nlohmann::ordered_json j;
    j["id"] = e.id;
    j["source"] = e.source;
    j["target"] = e.target;
    j[label_key] = e.label;
    doc["edges"].push_back(std::move(j));
  }
  doc["inputs"] = net.inputs();
  doc["outputs"] = net.outputs();
  return dump_json(doc);
}

BoundaryBehavior parse_behavior(std::string_view text) {
  const json doc = parse_text(text);
  require_object(doc, "", {"source_dim", "target_dim", "basis", "port_populations"},
                 {"source_dim", "target_dim", "basis"});
  const std::size_t source = get_count(doc["source_dim"], "/source_dim");
  const std::size_t target = get_count(doc["target_dim"], "/target_dim");
  if (source % 2 || target % 2) throw SchemaError("", "source_dim and target_dim must be even");

  const json& rows = get_array(doc["basis"], "/basis");
  if (rows.size() != source + target) {
    throw SchemaError("/basis", "expected " + std::to_string(source + target) + " rows, got " +
                                    std::to_string(rows.size()));
  }
  MatrixXd basis;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::string ptr = "/basis/" + std::to_string(r);
    const auto row = number_list(rows[r], ptr);
    if (r == 0) basis.resize(static_cast<Index>(rows.size()), static_cast<Index>(row.size()));
    if (row.size() != static_cast<std::size_t>(basis.cols())) throw SchemaError(ptr, "ragged basis row");
    for (std::size_t c = 0; c < row.size(); ++c) basis(static_cast<Index>(r), static_cast<Index>(c)) = row[c];
  }
  if (rows.empty()) basis.resize(0, 0);

  std::optional<VectorXd> qx, qy;
  if (doc.contains("port_populations")) {
    const json& p = doc["port_populations"];
    require_object(p, "/port_populations", {"inputs", "outputs"}, {"inputs", "outputs"});
    const auto in = number_list(p["inputs"], "/port_populations/inputs");
    const auto out = number_list(p["outputs"], "/port_populations/outputs");
    qx = Eigen::Map<const VectorXd>(in.data(), static_cast<Index>(in.size()));
    qy = Eigen::Map<const VectorXd>(out.data(), static_cast<Index>(out.size()));
  }
  try {
    Subspace space(source + target, std::move(basis));
    return BoundaryBehavior(source / 2, target / 2, LinearRelation(source, target, std::move(space)), qx, qy);
  } catch (const Error& e) {
    throw SchemaError("/basis", e.what());
  }
}

std::string emit_behavior(const BoundaryBehavior& b) {
  const LinearRelation& r = b.relation();
  nlohmann::ordered_json doc;
  doc["source_dim"] = r.source_dim();
  doc["target_dim"] = r.target_dim();
  doc["basis"] = nlohmann::ordered_json::array();
  const MatrixXd& basis = r.space().basis();
  for (Index i = 0; i < basis.rows(); ++i) {
    auto row = nlohmann::ordered_json::array();
    for (Index j = 0; j < basis.cols(); ++j) row.push_back(basis(i, j));
    doc["basis"].push_back(std::move(row));
  }
  if (b.input_populations() && b.output_populations()) {
    auto list = [](const VectorXd& v) {
      auto a = nlohmann::ordered_json::array();
      for (Index k = 0; k < v.size(); ++k) a.push_back(v(k));
      return a;
    };
    doc["port_populations"]["inputs"] = list(*b.input_populations());
    doc["port_populations"]["outputs"] = list(*b.output_populations());
  }
  return dump_json(doc);
}

std::string to_dot(const OpenNetwork& net) {
  const Network& g = net.network();
  std::ostringstream os;
  os << "digraph " << dot_quote(std::string(to_string(g.kind()))) << " {\n";
  os << "  rankdir=LR;\n";
  os << "  node [shape=circle];\n";
  for (std::size_t k = 0; k < g.node_count(); ++k) {
    os << "  " << dot_quote(g.nodes()[k]);
    if (g.populations()) os << " [label=" << dot_quote(g.nodes()[k] + " (q=" + format_double(g.population(k)) + ")") << "]";
    os << ";\n";
  }
  const char* prefix = g.kind() == NetworkKind::circuit ? "c=" : "r=";
  for (const auto& e : g.edges()) {
    os << "  " << dot_quote(e.source) << " -> " << dot_quote(e.target)
       << " [label=" << dot_quote(e.id + ": " + prefix + format_double(e.label)) << "];\n";
  }
  auto ports = [&](const std::vector<std::string>& nodes, const char* side, bool incoming) {
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const std::string name = "__" + std::string(side) + std::to_string(k);
      os << "  " << dot_quote(name) << " [shape=plaintext];\n";
      if (incoming) {
        os << "  " << dot_quote(name) << " -> " << dot_quote(nodes[k]) << " [style=dashed];\n";
      } else {
        os << "  " << dot_quote(nodes[k]) << " -> " << dot_quote(name) << " [style=dashed];\n";
      }
    }
  };
  ports(net.inputs(), "in", true);
  ports(net.outputs(), "out", false);
  os << "}\n";
  return os.str();
}

}  // namespace opennet
