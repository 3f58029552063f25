#include "countgraph/simulate.hpp"

#include <cmath>
#include <numeric>
#include <vector>

#include "countgraph/count_family.hpp"
#include "countgraph/errors.hpp"

namespace countgraph {

void TopologySpec::validate() const {
  if (p < 2) throw UsageError("topology: p must be >= 2");
  switch (kind) {
    case Kind::ScaleFree:
      if (!(power >= 0.0)) throw UsageError("topology: power must be >= 0");
      break;
    case Kind::Hub:
      if (n_hubs < 1 || n_hubs > p) throw UsageError("topology: n_hubs must lie in [1, p]");
      break;
    case Kind::Random:
      if (!(edge_prob >= 0.0 && edge_prob <= 1.0))
        throw UsageError("topology: edge_prob must lie in [0, 1]");
      break;
  }
}

UndirectedGraph gen_scale_free(int p, double power, Rng& rng) {
  if (p < 2) throw UsageError("gen_scale_free: p must be >= 2");
  UndirectedGraph g(p);
  std::vector<double> degree(static_cast<std::size_t>(p), 0.0);
  for (int j = 1; j < p; ++j) {
    double total = 0.0;
    for (int v = 0; v < j; ++v) total += std::pow(degree[static_cast<std::size_t>(v)], power);
    int target = 0;
    if (total <= 0.0) {
      target = static_cast<int>(rng.next_u01() * j);
      if (target >= j) target = j - 1;
    } else {
      const double u = rng.next_u01() * total;
      double acc = 0.0;
      target = j - 1;
      for (int v = 0; v < j; ++v) {
        acc += std::pow(degree[static_cast<std::size_t>(v)], power);
        if (u < acc) {
          target = v;
          break;
        }
      }
    }
    g.add_edge(j, target);
    degree[static_cast<std::size_t>(j)] += 1.0;
    degree[static_cast<std::size_t>(target)] += 1.0;
  }
  return g;
}

UndirectedGraph gen_hub(int p, int n_hubs, Rng& rng) {
  if (p < 2) throw UsageError("gen_hub: p must be >= 2");
  if (n_hubs < 1 || n_hubs > p) throw UsageError("gen_hub: n_hubs must lie in [1, p]");
  std::vector<int> perm(static_cast<std::size_t>(p));
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = p - 1; i >= 1; --i) {
    int j = static_cast<int>(rng.next_u01() * (i + 1));
    if (j > i) j = i;
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  UndirectedGraph g(p);
  for (int i = n_hubs; i < p; ++i) {
    const int hub = perm[static_cast<std::size_t>((i - n_hubs) % n_hubs)];
    g.add_edge(perm[static_cast<std::size_t>(i)], hub);
  }
  return g;
}

UndirectedGraph gen_random(int p, double edge_prob, Rng& rng) {
  if (p < 2) throw UsageError("gen_random: p must be >= 2");
  if (!(edge_prob >= 0.0 && edge_prob <= 1.0))
    throw UsageError("gen_random: edge_prob must lie in [0, 1]");
  UndirectedGraph g(p);
  for (int s = 0; s < p; ++s)
    for (int t = s + 1; t < p; ++t)
      if (rng.next_u01() < edge_prob) g.add_edge(s, t);
  return g;
}

UndirectedGraph gen_topology(const TopologySpec& spec, Rng& rng) {
  spec.validate();
  switch (spec.kind) {
    case TopologySpec::Kind::ScaleFree:
      return gen_scale_free(spec.p, spec.power, rng);
    case TopologySpec::Kind::Hub:
      return gen_hub(spec.p, spec.n_hubs, rng);
    case TopologySpec::Kind::Random:
      return gen_random(spec.p, spec.edge_prob, rng);
  }
  throw UsageError("gen_topology: unknown kind");
}

CountMatrix simulate_counts(const UndirectedGraph& graph, const SimConfig& config, Rng& rng) {
  config.topology.validate();
  if (graph.p() != config.topology.p)
    throw UsageError("simulate_counts: graph and topology disagree on p");
  if (!(config.lambda_true > 0.0) || !(config.lambda_noise > 0.0))
    throw UsageError("simulate_counts: rates must be positive");
  if (config.n < 1) throw UsageError("simulate_counts: n must be >= 1");

  const int p = graph.p();
  const auto edges = graph.edges();

  CountMatrix out;
  out.counts.setZero(config.n, p);
  out.names = default_column_names(p);

  std::vector<long> node_latent(static_cast<std::size_t>(p));
  for (long i = 0; i < config.n; ++i) {
    for (int j = 0; j < p; ++j)
      node_latent[static_cast<std::size_t>(j)] = sample_poisson(config.lambda_true, rng);
    for (int j = 0; j < p; ++j)
      out.counts(i, j) = static_cast<int>(node_latent[static_cast<std::size_t>(j)]);
    for (const auto& [u, v] : edges) {
      const int shared = static_cast<int>(sample_poisson(config.lambda_true, rng));
      out.counts(i, u) += shared;
      out.counts(i, v) += shared;
    }
    for (int j = 0; j < p; ++j)
      out.counts(i, j) += static_cast<int>(sample_poisson(config.lambda_noise, rng));
  }
  return out;
}

}  // namespace countgraph
