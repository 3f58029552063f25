#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "countgraph/metrics.hpp"
#include "countgraph/simulate.hpp"
#include "countgraph/skeleton.hpp"

namespace countgraph {

enum class FamilyChoice { TruncatedAuto, TruncatedFixed, Poisson };

struct BenchConfig {
  TopologySpec topology;
  long n = 200;
  double lambda_true = 1.0;
  double lambda_noise = 0.5;
};

struct BenchSpec {
  std::vector<BenchConfig> configs;
  double alpha = 0.01;
  FamilyChoice family = FamilyChoice::TruncatedAuto;
  int truncation = 0;  // for TruncatedFixed
  int max_cond_size = -1;
  bool include_intercept = false;
  bool wald_literal = false;
};

// JSON spec file:
// {
//   "alpha": 0.01, "family": "truncated"|"poisson", "truncation": 0,
//   "m": -1, "intercept": false,
//   "configs": [ {"topology": "scale-free"|"hub"|"random", "p": 10, "n": 1000,
//                 "power": 1.0, "hubs": 2, "edge_prob": 0.2,
//                 "lambda_true": 1.0, "lambda_noise": 0.5}, ... ]
// }
// Syntax errors report the line; validation errors name the offending config.
BenchSpec parse_bench_spec(const std::string& path);

struct BenchRow {
  BenchConfig config;
  BenchSummary summary;
};

// One benchmark row per config: a truth graph is drawn once from the config
// substream, then `replicates` datasets are simulated, learned, and scored.
// Replicates run on independent substreams, so results do not depend on the
// thread count.
std::vector<BenchRow> run_bench(const BenchSpec& spec, long replicates, std::uint64_t seed,
                                int threads);

// Per-replicate confusions for a single config (used by the acceptance
// checks for distribution-level assertions).
std::vector<Confusion> run_bench_config(const BenchSpec& spec, const BenchConfig& config,
                                        std::uint64_t config_seed, long replicates,
                                        int threads);

std::string topology_name(TopologySpec::Kind kind);
std::string family_name(FamilyChoice family);

void write_bench_csv(const std::string& path, const std::vector<BenchRow>& rows,
                     const BenchSpec& spec, long replicates);

// Per-replicate skeleton options with the truncation point resolved against
// the simulated matrix (max observed count when family is TruncatedAuto).
SkeletonOptions bench_skeleton_options(const BenchSpec& spec, const CountMatrix& data);

}  // namespace countgraph
