#include "generators.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "opennet/dynamics.hpp"

namespace opennet::testing {

namespace {

struct Skeleton {
  std::size_t n = 0;
  std::size_t body = 0;  // nodes [0, body) are connected; the rest form an isolated piece
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<std::size_t> loops;
};

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

double log_uniform(Rng& rng, double lo, double hi) { return std::exp(uniform(rng, std::log(lo), std::log(hi))); }

std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

Skeleton draw_skeleton(Rng& rng, const GenOptions& opts, std::size_t min_nodes) {
  Skeleton s;
  s.n = pick(rng, std::max(opts.min_nodes, min_nodes), std::max(opts.max_nodes, min_nodes));
  s.body = s.n;
  if (opts.allow_isolated && s.n >= min_nodes + 2 && s.n >= 4 && coin(rng, 0.1)) s.body = s.n - pick(rng, 1, 2);
  for (std::size_t i = 1; i < s.body; ++i) s.pairs.emplace_back(pick(rng, 0, i - 1), i);
  const double density = std::min(1.0, 2.0 / static_cast<double>(s.body));
  for (std::size_t i = 0; i < s.body; ++i) {
    for (std::size_t j = i + 1; j < s.body; ++j) {
      if (coin(rng, density)) s.pairs.emplace_back(i, j);
    }
  }
  if (s.n - s.body == 2) s.pairs.emplace_back(s.body, s.body + 1);
  if (!s.pairs.empty() && coin(rng, 0.2)) s.pairs.push_back(s.pairs[pick(rng, 0, s.pairs.size() - 1)]);
  if (opts.allow_self_loops && coin(rng, 0.2)) s.loops.push_back(pick(rng, 0, s.n - 1));
  return s;
}

std::vector<std::string> node_names(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t k = 0; k < n; ++k) out.push_back("n" + std::to_string(k));
  return out;
}

std::size_t port_count(Rng& rng, const GenOptions& opts) { return pick(rng, 0, opts.max_ports); }

std::vector<std::string> draw_ports(Rng& rng, const Skeleton& s, std::size_t count,
                                    const std::vector<std::string>& names) {
  std::vector<std::string> out;
  for (std::size_t k = 0; k < count; ++k) out.push_back(names[pick(rng, 0, s.body - 1)]);
  return out;
}

// Fixed input populations: port k must land on a node whose population is
// fixed[k]; nodes already claimed with a different value are avoided.
std::vector<std::string> draw_constrained_ports(Rng& rng, const Skeleton& s, const std::vector<double>& fixed,
                                                const std::vector<std::string>& names,
                                                std::map<std::size_t, double>& claimed) {
  std::vector<std::string> out;
  for (double q : fixed) {
    std::vector<std::size_t> options;
    for (std::size_t v = 0; v < s.body; ++v) {
      auto it = claimed.find(v);
      if (it == claimed.end() || it->second == q) options.push_back(v);
    }
    const std::size_t v = options[pick(rng, 0, options.size() - 1)];
    claimed[v] = q;
    out.push_back(names[v]);
  }
  return out;
}

OpenNetwork build_balanced(Rng& rng, const GenOptions& opts, const Skeleton& s, std::vector<double> pops,
                           std::vector<std::string> inputs, std::vector<std::string> outputs) {
  const auto names = node_names(s.n);
  std::vector<double> flows;
  for (std::size_t k = 0; k < s.pairs.size(); ++k) flows.push_back(log_uniform(rng, 0.1, 10.0));
  std::vector<double> loop_rates;
  for (std::size_t k = 0; k < s.loops.size(); ++k) loop_rates.push_back(uniform(rng, 0.1, 5.0));

  auto build = [&](double scale) {
    std::vector<Edge> edges;
    for (std::size_t k = 0; k < s.pairs.size(); ++k) {
      const auto [i, j] = s.pairs[k];
      const double f = scale * flows[k];
      edges.push_back({"", names[i], names[j], f / pops[i]});
      edges.push_back({"", names[j], names[i], f / pops[j]});
    }
    for (std::size_t k = 0; k < s.loops.size(); ++k) {
      edges.push_back({"", names[s.loops[k]], names[s.loops[k]], loop_rates[k]});
    }
    return Network(NetworkKind::detailed_balanced_markov, names, std::move(edges), pops);
  };
  Network net = build(1.0);
  if (opts.max_generator_norm > 0.0) {
    const double norm = generator_norm(net);
    if (norm > opts.max_generator_norm) net = build(opts.max_generator_norm / norm);
  }
  return OpenNetwork(std::move(net), std::move(inputs), std::move(outputs));
}

void ensure_terminal(Rng& rng, const GenOptions& opts, std::size_t& nx, std::size_t& ny) {
  nx = port_count(rng, opts);
  ny = port_count(rng, opts);
  if (nx + ny == 0) (coin(rng, 0.5) ? nx : ny) = 1;
}

std::vector<double> draw_populations(Rng& rng, std::size_t n) {
  std::vector<double> q;
  for (std::size_t k = 0; k < n; ++k) q.push_back(log_uniform(rng, 0.1, 10.0));
  return q;
}

OpenNetwork build_circuit(Rng& rng, const Skeleton& s, std::vector<std::string> inputs,
                          std::vector<std::string> outputs) {
  const auto names = node_names(s.n);
  std::vector<Edge> edges;
  for (const auto& [i, j] : s.pairs) {
    const double c = log_uniform(rng, 0.1, 10.0);
    if (coin(rng, 0.5)) {
      edges.push_back({"", names[i], names[j], c});
    } else {
      edges.push_back({"", names[j], names[i], c});
    }
  }
  for (auto v : s.loops) edges.push_back({"", names[v], names[v], uniform(rng, 0.1, 5.0)});
  return OpenNetwork(Network(NetworkKind::circuit, names, std::move(edges)), std::move(inputs), std::move(outputs));
}

}  // namespace

double generator_norm(const Network& net) {
  const auto h = hamiltonian(net).entries;
  return h.size() ? h.cwiseAbs().rowwise().sum().maxCoeff() : 0.0;
}

OpenNetwork random_balanced(Rng& rng, const GenOptions& opts) {
  const Skeleton s = draw_skeleton(rng, opts, 2);
  std::size_t nx = 0, ny = 0;
  ensure_terminal(rng, opts, nx, ny);
  const auto names = node_names(s.n);
  auto inputs = draw_ports(rng, s, nx, names);
  auto outputs = draw_ports(rng, s, ny, names);
  return build_balanced(rng, opts, s, draw_populations(rng, s.n), std::move(inputs), std::move(outputs));
}

OpenNetwork random_circuit(Rng& rng, const GenOptions& opts) {
  const Skeleton s = draw_skeleton(rng, opts, 2);
  std::size_t nx = 0, ny = 0;
  ensure_terminal(rng, opts, nx, ny);
  const auto names = node_names(s.n);
  auto inputs = draw_ports(rng, s, nx, names);
  auto outputs = draw_ports(rng, s, ny, names);
  return build_circuit(rng, s, std::move(inputs), std::move(outputs));
}

std::pair<OpenNetwork, OpenNetwork> random_composable_balanced(Rng& rng, const GenOptions& opts) {
  OpenNetwork first = random_balanced(rng, opts);
  std::vector<double> fixed;
  for (auto v : first.output_indices()) fixed.push_back(first.network().population(v));

  const Skeleton s = draw_skeleton(rng, opts, fixed.size() + 1);
  const auto names = node_names(s.n);
  std::map<std::size_t, double> claimed;
  auto inputs = draw_constrained_ports(rng, s, fixed, names, claimed);
  auto outputs = draw_ports(rng, s, port_count(rng, opts), names);
  std::vector<double> pops = draw_populations(rng, s.n);
  for (const auto& [v, q] : claimed) pops[v] = q;
  OpenNetwork second = build_balanced(rng, opts, s, std::move(pops), std::move(inputs), std::move(outputs));
  return {std::move(first), std::move(second)};
}

std::pair<OpenNetwork, OpenNetwork> random_composable_circuits(Rng& rng, const GenOptions& opts) {
  OpenNetwork first = random_circuit(rng, opts);
  const Skeleton s = draw_skeleton(rng, opts, 2);
  const auto names = node_names(s.n);
  auto inputs = draw_ports(rng, s, first.outputs().size(), names);
  auto outputs = draw_ports(rng, s, port_count(rng, opts), names);
  return {std::move(first), build_circuit(rng, s, std::move(inputs), std::move(outputs))};
}

}  // namespace opennet::testing
