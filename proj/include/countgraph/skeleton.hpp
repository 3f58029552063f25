#pragma once

#include <string>
#include <vector>

#include "countgraph/count_family.hpp"
#include "countgraph/graph.hpp"
#include "countgraph/local_glm.hpp"
#include "countgraph/matrix.hpp"
#include "countgraph/wald.hpp"

namespace countgraph {

enum class Execution {
  Sequential,     // Algorithm-style early-exit deletion within a level
  LevelParallel,  // all tests of a level evaluated against the frozen snapshot
};

struct SkeletonOptions {
  double alpha = 0.01;
  int max_cond_size = -1;  // stopping level m; -1 means unbounded (p - 2)
  CountFamily family = CountFamily::poisson();
  bool include_intercept = false;
  Execution execution = Execution::Sequential;
  int workers = 1;  // used by LevelParallel
  bool wald_literal = false;
  FitOptions fit_options;
};

struct SkeletonResult {
  UndirectedGraph graph;
  std::vector<TestOutcome> trace;  // canonical order: (level, response, tested, lex cond_set)
  long tests_performed = 0;
  int levels_completed = 0;
  std::vector<std::string> warnings;
};

// All size-l subsets of the sorted candidate list, in lexicographic order of
// index tuples. l = 0 yields the single empty set; l > |candidates| yields
// nothing.
std::vector<std::vector<int>> k_subsets(const std::vector<int>& sorted_candidates, int l);

// Size-l conditioning sets for the ordered pair (s, t): subsets of
// snapshot[s] \ {t}, lexicographic.
std::vector<std::vector<int>> enumerate_cond_sets(
    const std::vector<std::vector<int>>& adjacency_snapshot, int s, int t, int l);

// Fit response s on cond_set + {t} and Wald-test the coefficient of t.
// Numerical failures (non-convergence, singular average Hessian) become
// degenerate outcomes; support violations propagate as DataError.
TestOutcome test_ordered_pair(const CountMatrix& data, int s, int t,
                              const std::vector<int>& cond_set,
                              const SkeletonOptions& options);

// PC-stable skeleton search: starting from the complete graph, levels of
// increasing conditioning size l are processed with adjacency sets frozen at
// level start; the edge (s, t) is deleted as soon as some test in either
// direction fails to reject. The estimated edge set is invariant to variable
// ordering, execution mode, and worker count.
SkeletonResult learn_skeleton(const CountMatrix& data, const SkeletonOptions& options);

}  // namespace countgraph
