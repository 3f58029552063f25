#pragma once

#include <cstdint>

#include "countgraph/graph.hpp"
#include "countgraph/matrix.hpp"
#include "countgraph/rng.hpp"

namespace countgraph {

struct TopologySpec {
  enum class Kind { ScaleFree, Hub, Random };

  Kind kind = Kind::ScaleFree;
  int p = 2;
  double power = 1.0;     // scale-free: preferential-attachment exponent (1 = linear)
  int n_hubs = 1;         // hub
  double edge_prob = 0.1; // random

  void validate() const;
};

struct SimConfig {
  TopologySpec topology;
  long n = 1;
  double lambda_true = 1.0;   // rate of node and edge latents
  double lambda_noise = 0.5;  // rate of the additive noise (0.5 high SNR, 5 low SNR)
  std::uint64_t seed = 0;
};

// Preferential-attachment tree: node j >= 1 attaches to one earlier node
// chosen with weight degree^power (uniform while all degrees are zero).
// Exactly p - 1 edges.
UndirectedGraph gen_scale_free(int p, double power, Rng& rng);

// n_hubs hub nodes; every non-hub connects to exactly one hub, assigned
// round-robin over a random permutation. p - n_hubs edges.
UndirectedGraph gen_hub(int p, int n_hubs, Rng& rng);

// Each of the C(p,2) pairs included independently with probability edge_prob.
UndirectedGraph gen_random(int p, double edge_prob, Rng& rng);

UndirectedGraph gen_topology(const TopologySpec& spec, Rng& rng);

// Shared-latent Poisson construction: per row,
//   X_j = Y_j + sum_{edges e incident to j} Y_e + eps_j
// with Y_* ~ Pois(lambda_true) and eps_j ~ Pois(lambda_noise), so
// E[X_j] = lambda_true * (1 + deg(j)) + lambda_noise and adjacent nodes share
// one latent per edge. Draw order per row: node latents ascending, edge
// latents in canonical edge order, then noise ascending.
CountMatrix simulate_counts(const UndirectedGraph& graph, const SimConfig& config, Rng& rng);

}  // namespace countgraph
