#include "opennet/netcore.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "opennet/errors.hpp"

namespace opennet {

std::string_view to_string(NetworkKind kind) {
  switch (kind) {
    case NetworkKind::markov:
      return "markov";
    case NetworkKind::detailed_balanced_markov:
      return "detailed_balanced_markov";
    case NetworkKind::circuit:
      return "circuit";
  }
  return "markov";
}

std::optional<NetworkKind> parse_kind(std::string_view text) {
  if (text == "markov") return NetworkKind::markov;
  if (text == "detailed_balanced_markov") return NetworkKind::detailed_balanced_markov;
  if (text == "circuit") return NetworkKind::circuit;
  return std::nullopt;
}

namespace {

std::string join_messages(const std::vector<Finding>& findings) {
  std::ostringstream os;
  for (std::size_t k = 0; k < findings.size(); ++k) {
    if (k) os << "; ";
    os << findings[k].message;
  }
  return os.str();
}

bool populations_match(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

}  // namespace

std::vector<Finding> structural_findings(NetworkKind kind, std::span<const std::string> nodes,
                                         std::span<const Edge> edges,
                                         const std::optional<std::vector<double>>& populations) {
  std::vector<Finding> out;
  auto add = [&](std::string msg) { out.push_back({"structure", std::move(msg), 0.0}); };

  std::unordered_set<std::string> seen;
  for (const auto& id : nodes) {
    if (id.empty()) add("node id must be non-empty");
    if (!seen.insert(id).second) add("duplicate node id '" + id + "'");
  }

  const bool wants_populations = kind == NetworkKind::detailed_balanced_markov;
  if (wants_populations && !populations) add("detailed balanced network requires populations");
  if (!wants_populations && populations) {
    add(std::string(to_string(kind)) + " network must not carry populations");
  }
  if (populations) {
    if (populations->size() != nodes.size()) {
      add("population count " + std::to_string(populations->size()) + " does not match node count " +
          std::to_string(nodes.size()));
    } else {
      for (std::size_t k = 0; k < nodes.size(); ++k) {
        const double q = (*populations)[k];
        if (!std::isfinite(q) || q <= 0.0) {
          add("population of node '" + nodes[k] + "' must be finite and positive");
        }
      }
    }
  }

  std::unordered_set<std::string> edge_ids;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const Edge& e = edges[k];
    const std::string name = e.id.empty() ? "#" + std::to_string(k) : "'" + e.id + "'";
    if (!e.id.empty() && !edge_ids.insert(e.id).second) add("duplicate edge id '" + e.id + "'");
    if (!seen.contains(e.source)) add("edge " + name + " has unknown source '" + e.source + "'");
    if (!seen.contains(e.target)) add("edge " + name + " has unknown target '" + e.target + "'");
    if (!std::isfinite(e.label) || e.label <= 0.0) {
      add("edge " + name + " label must be finite and positive");
    }
  }
  return out;
}

Network::Network(NetworkKind kind, std::vector<std::string> nodes, std::vector<Edge> edges,
                 std::optional<std::vector<double>> populations, BalanceCheck check)
    : kind_(kind), nodes_(std::move(nodes)), edges_(std::move(edges)), populations_(std::move(populations)) {
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    if (edges_[k].id.empty()) edges_[k].id = "e" + std::to_string(k);
  }
  if (auto findings = structural_findings(kind_, nodes_, edges_, populations_); !findings.empty()) {
    throw InvalidNetwork(join_messages(findings));
  }
  index_.reserve(nodes_.size());
  for (std::size_t k = 0; k < nodes_.size(); ++k) index_.emplace(nodes_[k], k);
  source_index_.reserve(edges_.size());
  target_index_.reserve(edges_.size());
  for (const Edge& e : edges_) {
    source_index_.push_back(index_.at(e.source));
    target_index_.push_back(index_.at(e.target));
  }
  if (kind_ == NetworkKind::detailed_balanced_markov && check.enabled) {
    const BalanceResidual r = detailed_balance_residual(*this);
    if (r.residual > check.tol * r.scale) {
      std::ostringstream os;
      os << "detailed balance violated: residual " << r.residual << " exceeds " << check.tol * r.scale;
      throw InvalidNetwork(os.str());
    }
  }
}

std::optional<std::size_t> Network::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Network::index_of(std::string_view id) const {
  if (auto k = find(id)) return *k;
  throw InvalidNetwork("unknown node '" + std::string(id) + "'");
}

double Network::population(std::size_t node) const {
  if (!populations_) throw PreconditionError("network has no populations");
  return populations_->at(node);
}

OpenNetwork::OpenNetwork(Network network, std::vector<std::string> inputs, std::vector<std::string> outputs)
    : network_(std::move(network)), inputs_(std::move(inputs)), outputs_(std::move(outputs)) {
  auto resolve = [&](const std::vector<std::string>& ports, const char* side) {
    std::vector<std::size_t> idx;
    idx.reserve(ports.size());
    for (std::size_t k = 0; k < ports.size(); ++k) {
      auto n = network_.find(ports[k]);
      if (!n) {
        throw InvalidNetwork(std::string(side) + " port " + std::to_string(k) + " names unknown node '" +
                             ports[k] + "'");
      }
      idx.push_back(*n);
    }
    return idx;
  };
  input_index_ = resolve(inputs_, "input");
  output_index_ = resolve(outputs_, "output");

  terminal_slot_.assign(network_.node_count(), std::nullopt);
  std::vector<bool> hit(network_.node_count(), false);
  for (auto k : input_index_) hit[k] = true;
  for (auto k : output_index_) hit[k] = true;
  for (std::size_t n = 0; n < hit.size(); ++n) {
    if (hit[n]) {
      terminal_slot_[n] = terminals_.size();
      terminals_.push_back(n);
    } else {
      internal_.push_back(n);
    }
  }
}

std::size_t OpenNetwork::terminal_slot(std::size_t node) const {
  if (!terminal_slot_.at(node)) {
    throw PreconditionError("node '" + network_.nodes()[node] + "' is not a terminal");
  }
  return *terminal_slot_[node];
}

namespace {

PortSignature signature_of(const Network& net, const std::vector<std::size_t>& ports) {
  PortSignature sig{ports.size(), std::nullopt};
  if (net.populations()) {
    std::vector<double> q;
    q.reserve(ports.size());
    for (auto n : ports) q.push_back(net.population(n));
    sig.populations = std::move(q);
  }
  return sig;
}

}  // namespace

PortSignature OpenNetwork::input_signature() const { return signature_of(network_, input_index_); }
PortSignature OpenNetwork::output_signature() const { return signature_of(network_, output_index_); }

BalanceResidual detailed_balance_residual(const Network& net) {
  if (!net.populations()) throw PreconditionError("detailed balance requires populations");
  // flow[(i, j)] = sum over edges j -> i of r_e q_j, self-loops excluded.
  std::map<std::pair<std::size_t, std::size_t>, double> flow;
  for (std::size_t k = 0; k < net.edge_count(); ++k) {
    const auto s = net.source_index(k);
    const auto t = net.target_index(k);
    if (s == t) continue;
    flow[{t, s}] += net.edges()[k].label * net.population(s);
  }
  BalanceResidual out{0.0, 0.0};
  for (const auto& [key, f] : flow) {
    out.scale = std::max(out.scale, std::abs(f));
    auto back = flow.find({key.second, key.first});
    const double g = back == flow.end() ? 0.0 : back->second;
    out.residual = std::max(out.residual, std::abs(f - g));
  }
  if (out.scale == 0.0) out.scale = 1.0;
  return out;
}

ValidationReport validate(const OpenNetwork& net, double tol) {
  ValidationReport report;
  const Network& n = net.network();
  report.findings = structural_findings(n.kind(), n.nodes(), n.edges(), n.populations());
  for (std::size_t k = 0; k < net.inputs().size(); ++k) {
    if (!n.find(net.inputs()[k])) {
      report.findings.push_back({"structure", "input port " + std::to_string(k) + " is dangling", 0.0});
    }
  }
  for (std::size_t k = 0; k < net.outputs().size(); ++k) {
    if (!n.find(net.outputs()[k])) {
      report.findings.push_back({"structure", "output port " + std::to_string(k) + " is dangling", 0.0});
    }
  }
  if (n.kind() == NetworkKind::detailed_balanced_markov && n.populations() && report.ok()) {
    const BalanceResidual r = detailed_balance_residual(n);
    if (r.residual > tol * r.scale) {
      std::ostringstream os;
      os.precision(17);
      os << "detailed balance violated: max |H_ij q_j - H_ji q_i| = " << r.residual << " exceeds tolerance "
         << tol * r.scale;
      report.findings.push_back({"detailed_balance", os.str(), r.residual});
    }
  }
  return report;
}

Pushout pushout(std::span<const std::string> left_nodes, std::span<const std::string> right_nodes,
                std::span<const std::size_t> left_legs, std::span<const std::size_t> right_legs) {
  if (left_legs.size() != right_legs.size()) {
    throw PreconditionError("pushout legs must share the gluing set");
  }
  const std::size_t nl = left_nodes.size();
  const std::size_t total = nl + right_nodes.size();
  std::vector<std::size_t> parent(total);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto root = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t y = 0; y < left_legs.size(); ++y) {
    if (left_legs[y] >= nl || right_legs[y] >= right_nodes.size()) {
      throw PreconditionError("pushout leg out of range");
    }
    const auto a = root(left_legs[y]);
    const auto b = root(nl + right_legs[y]);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }

  auto member_name = [&](std::size_t x) {
    return x < nl ? "l." + left_nodes[x] : "r." + right_nodes[x - nl];
  };

  std::vector<std::size_t> class_of(total);
  std::unordered_map<std::size_t, std::size_t> slot;
  Pushout out;
  for (std::size_t x = 0; x < total; ++x) {
    const auto r = root(x);
    auto [it, fresh] = slot.emplace(r, out.nodes.size());
    std::string name = member_name(x);
    if (fresh) {
      out.nodes.push_back(std::move(name));
    } else if (name < out.nodes[it->second]) {
      out.nodes[it->second] = std::move(name);
    }
    class_of[x] = it->second;
  }
  out.from_left.assign(class_of.begin(), class_of.begin() + static_cast<std::ptrdiff_t>(nl));
  out.from_right.assign(class_of.begin() + static_cast<std::ptrdiff_t>(nl), class_of.end());
  return out;
}

namespace {

// Pushes both networks forward along the pushout maps and takes the
// disjoint union of their edge sets. Rates and conductances are unchanged.
Network glue(const Network& a, const Network& b, const Pushout& p, double balance_tol) {
  std::vector<Edge> edges;
  edges.reserve(a.edge_count() + b.edge_count());
  for (std::size_t k = 0; k < a.edge_count(); ++k) {
    const Edge& e = a.edges()[k];
    edges.push_back({"l." + e.id, p.nodes[p.from_left[a.source_index(k)]],
                     p.nodes[p.from_left[a.target_index(k)]], e.label});
  }
  for (std::size_t k = 0; k < b.edge_count(); ++k) {
    const Edge& e = b.edges()[k];
    edges.push_back({"r." + e.id, p.nodes[p.from_right[b.source_index(k)]],
                     p.nodes[p.from_right[b.target_index(k)]], e.label});
  }

  std::optional<std::vector<double>> q;
  if (a.kind() == NetworkKind::detailed_balanced_markov) {
    // Each class takes the population of its representative member.
    std::vector<double> pops(p.nodes.size(), 0.0);
    for (std::size_t n = 0; n < a.node_count(); ++n) {
      if (p.nodes[p.from_left[n]] == "l." + a.nodes()[n]) pops[p.from_left[n]] = a.population(n);
    }
    for (std::size_t n = 0; n < b.node_count(); ++n) {
      if (p.nodes[p.from_right[n]] == "r." + b.nodes()[n]) pops[p.from_right[n]] = b.population(n);
    }
    q = std::move(pops);
  }
  return Network(a.kind(), p.nodes, std::move(edges), std::move(q), BalanceCheck{true, balance_tol});
}

void require_same_kind(const OpenNetwork& a, const OpenNetwork& b, const char* op) {
  if (a.kind() != b.kind()) {
    throw PreconditionError(std::string(op) + ": kind mismatch (" + std::string(to_string(a.kind())) + " vs " +
                            std::string(to_string(b.kind())) + ")");
  }
}

}  // namespace

OpenNetwork compose(const OpenNetwork& first, const OpenNetwork& second, double tol) {
  require_same_kind(first, second, "compose");
  if (first.outputs().size() != second.inputs().size()) {
    throw PreconditionError("compose: " + std::to_string(first.outputs().size()) + " outputs vs " +
                            std::to_string(second.inputs().size()) + " inputs");
  }
  const Network& a = first.network();
  const Network& b = second.network();
  if (a.kind() == NetworkKind::detailed_balanced_markov) {
    for (std::size_t y = 0; y < first.outputs().size(); ++y) {
      const double qa = a.population(first.output_indices()[y]);
      const double qb = b.population(second.input_indices()[y]);
      if (!populations_match(qa, qb, tol)) {
        std::ostringstream os;
        os.precision(17);
        os << "compose: population mismatch at port " << y << " (" << qa << " vs " << qb << ")";
        throw PreconditionError(os.str());
      }
    }
  }

  const Pushout p = pushout(a.nodes(), b.nodes(), first.output_indices(), second.input_indices());
  Network glued = glue(a, b, p, 4.0 * std::max(tol, 1e-12));

  std::vector<std::string> inputs, outputs;
  for (auto n : first.input_indices()) inputs.push_back(p.nodes[p.from_left[n]]);
  for (auto n : second.output_indices()) outputs.push_back(p.nodes[p.from_right[n]]);
  return OpenNetwork(std::move(glued), std::move(inputs), std::move(outputs));
}

OpenNetwork tensor(const OpenNetwork& a, const OpenNetwork& b) {
  require_same_kind(a, b, "tensor");
  const Pushout p = pushout(a.network().nodes(), b.network().nodes(), {}, {});
  Network glued = glue(a.network(), b.network(), p, 1e-9);

  std::vector<std::string> inputs, outputs;
  for (auto n : a.input_indices()) inputs.push_back(p.nodes[p.from_left[n]]);
  for (auto n : b.input_indices()) inputs.push_back(p.nodes[p.from_right[n]]);
  for (auto n : a.output_indices()) outputs.push_back(p.nodes[p.from_left[n]]);
  for (auto n : b.output_indices()) outputs.push_back(p.nodes[p.from_right[n]]);
  return OpenNetwork(std::move(glued), std::move(inputs), std::move(outputs));
}

OpenNetwork dagger(const OpenNetwork& m) { return OpenNetwork(m.network(), m.outputs(), m.inputs()); }

OpenNetwork forget_populations(const OpenNetwork& m) {
  if (m.kind() != NetworkKind::detailed_balanced_markov) {
    throw PreconditionError("forget_populations: expected a detailed_balanced_markov network");
  }
  const Network& n = m.network();
  return OpenNetwork(Network(NetworkKind::markov, n.nodes(), n.edges()), m.inputs(), m.outputs());
}

OpenNetwork identity_network(NetworkKind kind, std::size_t ports,
                             const std::optional<std::vector<double>>& populations) {
  std::vector<std::string> nodes;
  nodes.reserve(ports);
  for (std::size_t k = 0; k < ports; ++k) nodes.push_back("x" + std::to_string(k));
  Network net(kind, nodes, {}, populations);
  return OpenNetwork(std::move(net), nodes, nodes);
}

}  // namespace opennet
