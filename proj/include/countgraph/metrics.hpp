#pragma once

#include <optional>
#include <vector>

#include "countgraph/graph.hpp"

namespace countgraph {

// Edge-set confusion counts over unordered pairs. ppv is undefined (not zero)
// when the estimate is empty; se is undefined when the truth is empty.
struct Confusion {
  long tp = 0;
  long fp = 0;
  long fn = 0;
  std::optional<double> ppv;  // tp / (tp + fp)
  std::optional<double> se;   // tp / (tp + fn)
};

Confusion confusion(const UndirectedGraph& truth, const UndirectedGraph& estimate);

// Monte Carlo mean and sample (n-1) standard deviation; sd = 0 for a single
// value. excluded counts replicates whose ratio was undefined.
struct MetricSummary {
  double mean = 0.0;
  double sd = 0.0;
  long excluded = 0;
};

struct BenchSummary {
  long replicates = 0;
  MetricSummary tp, fp, fn, ppv, se;
};

BenchSummary aggregate(const std::vector<Confusion>& confusions);

}  // namespace countgraph
