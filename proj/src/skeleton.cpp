#include "countgraph/skeleton.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "countgraph/errors.hpp"

namespace countgraph {

std::vector<std::vector<int>> k_subsets(const std::vector<int>& sorted_candidates, int l) {
  std::vector<std::vector<int>> out;
  const int m = static_cast<int>(sorted_candidates.size());
  if (l < 0 || l > m) return out;
  if (l == 0) {
    out.emplace_back();
    return out;
  }
  std::vector<int> pick(static_cast<std::size_t>(l));
  for (int i = 0; i < l; ++i) pick[static_cast<std::size_t>(i)] = i;
  while (true) {
    std::vector<int> subset(static_cast<std::size_t>(l));
    for (int i = 0; i < l; ++i)
      subset[static_cast<std::size_t>(i)] = sorted_candidates[static_cast<std::size_t>(pick[static_cast<std::size_t>(i)])];
    out.push_back(std::move(subset));
    int i = l - 1;
    while (i >= 0 && pick[static_cast<std::size_t>(i)] == m - l + i) --i;
    if (i < 0) break;
    ++pick[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < l; ++j)
      pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

std::vector<std::vector<int>> enumerate_cond_sets(
    const std::vector<std::vector<int>>& adjacency_snapshot, int s, int t, int l) {
  if (s < 0 || s >= static_cast<int>(adjacency_snapshot.size()))
    throw UsageError("enumerate_cond_sets: node out of range");
  std::vector<int> candidates;
  for (int v : adjacency_snapshot[static_cast<std::size_t>(s)])
    if (v != t) candidates.push_back(v);
  return k_subsets(candidates, l);
}

TestOutcome test_ordered_pair(const CountMatrix& data, int s, int t,
                              const std::vector<int>& cond_set,
                              const SkeletonOptions& options) {
  const int p = data.p();
  if (s < 0 || s >= p || t < 0 || t >= p || s == t)
    throw UsageError("test_ordered_pair: invalid node pair");
  for (int v : cond_set)
    if (v == s || v == t || v < 0 || v >= p)
      throw UsageError("test_ordered_pair: conditioning set must exclude s and t");

  TestOutcome out;
  out.response = s;
  out.tested = t;
  out.cond_set = cond_set;
  std::sort(out.cond_set.begin(), out.cond_set.end());
  if (std::adjacent_find(out.cond_set.begin(), out.cond_set.end()) != out.cond_set.end())
    throw UsageError("test_ordered_pair: duplicate node in conditioning set");

  DesignView dv;
  dv.data = &data;
  dv.response = s;
  dv.predictors = out.cond_set;
  dv.predictors.push_back(t);
  std::sort(dv.predictors.begin(), dv.predictors.end());
  dv.family = options.family;
  dv.include_intercept = options.include_intercept;
  const int t_pos = static_cast<int>(
      std::lower_bound(dv.predictors.begin(), dv.predictors.end(), t) - dv.predictors.begin());

  const double nan = std::numeric_limits<double>::quiet_NaN();
  try {
    const NodeFit f = fit(dv, options.fit_options);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(f.avg_hessian,
                                                       Eigen::EigenvaluesOnly);
    if (!f.converged || eig.eigenvalues().minCoeff() <= 1e-12) {
      out.degenerate = true;
      out.z = nan;
      out.p_value = nan;
      return out;
    }
    out.z = wald_statistic(f, t_pos, options.wald_literal);
    out.p_value = p_value_two_sided(out.z);
    out.rejected = decide(out.z, options.alpha);
  } catch (const std::domain_error&) {
    out.degenerate = true;
    out.z = nan;
    out.p_value = nan;
    out.rejected = false;
  }
  return out;
}

namespace {

struct LevelTask {
  int s;
  int t;
  std::vector<int> cond_set;
};

void validate_input(const CountMatrix& data, const SkeletonOptions& options,
                    std::vector<std::string>& warnings) {
  if (data.p() < 2) throw UsageError("learn_skeleton: need at least two columns");
  if (data.counts.size() > 0 && data.counts.minCoeff() < 0)
    throw DataError("learn_skeleton: negative entry in the count matrix");
  if (!(options.alpha > 0.0 && options.alpha < 1.0))
    throw UsageError("learn_skeleton: alpha must lie in (0,1)");
  if (options.max_cond_size < -1)
    throw UsageError("learn_skeleton: max_cond_size must be >= 0 (or -1 for unbounded)");
  if (data.n() < 3L * data.p()) {
    warnings.push_back("sample size n=" + std::to_string(data.n()) +
                       " is below the recommended 3*p=" + std::to_string(3L * data.p()));
  }
}

std::vector<std::vector<int>> snapshot_adjacency(const UndirectedGraph& g) {
  std::vector<std::vector<int>> snap(static_cast<std::size_t>(g.p()));
  for (int s = 0; s < g.p(); ++s) snap[static_cast<std::size_t>(s)] = g.neighbors(s);
  return snap;
}

// Evaluate all tasks of one level; deterministic regardless of worker count
// since outcomes land in their task slot.
std::vector<TestOutcome> run_tasks(const CountMatrix& data, const SkeletonOptions& options,
                                   const std::vector<LevelTask>& tasks, int workers) {
  std::vector<TestOutcome> outcomes(tasks.size());
  if (workers <= 1 || tasks.size() <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i)
      outcomes[i] = test_ordered_pair(data, tasks[i].s, tasks[i].t, tasks[i].cond_set, options);
    return outcomes;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      try {
        outcomes[i] =
            test_ordered_pair(data, tasks[i].s, tasks[i].t, tasks[i].cond_set, options);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int count = std::min<int>(workers, static_cast<int>(tasks.size()));
  pool.reserve(static_cast<std::size_t>(count));
  for (int w = 0; w < count; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
  return outcomes;
}

}  // namespace

SkeletonResult learn_skeleton(const CountMatrix& data, const SkeletonOptions& options) {
  SkeletonResult result{UndirectedGraph(std::max(data.p(), 1)), {}, 0, 0, {}};
  validate_input(data, options, result.warnings);

  const int p = data.p();
  const int max_level = options.max_cond_size < 0 ? p - 2 : options.max_cond_size;
  UndirectedGraph graph = UndirectedGraph::complete(p);

  int level = -1;
  while (true) {
    ++level;
    const auto snapshot = snapshot_adjacency(graph);

    if (options.execution == Execution::Sequential) {
      for (int s = 0; s < p; ++s) {
        if (static_cast<int>(snapshot[static_cast<std::size_t>(s)].size()) - 1 < level)
          continue;
        for (int t = 0; t < p; ++t) {
          if (t == s || !graph.has_edge(s, t)) continue;
          for (const auto& cond : enumerate_cond_sets(snapshot, s, t, level)) {
            TestOutcome outcome = test_ordered_pair(data, s, t, cond, options);
            const bool keep = outcome.rejected;
            result.trace.push_back(std::move(outcome));
            if (!keep) {
              graph.remove_edge(s, t);
              break;
            }
          }
        }
      }
    } else {
      std::vector<LevelTask> tasks;
      for (int s = 0; s < p; ++s) {
        if (static_cast<int>(snapshot[static_cast<std::size_t>(s)].size()) - 1 < level)
          continue;
        for (int t : snapshot[static_cast<std::size_t>(s)]) {
          for (auto& cond : enumerate_cond_sets(snapshot, s, t, level))
            tasks.push_back({s, t, std::move(cond)});
        }
      }
      const auto outcomes = run_tasks(data, options, tasks, options.workers);
      for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (!outcomes[i].rejected && graph.has_edge(tasks[i].s, tasks[i].t))
          graph.remove_edge(tasks[i].s, tasks[i].t);
      }
      result.trace.insert(result.trace.end(), outcomes.begin(), outcomes.end());
    }

    result.levels_completed = level + 1;
    if (level >= max_level) break;

    bool more = false;
    for (int s = 0; s < p && !more; ++s) {
      const int deg = graph.degree(s);
      if (deg >= 1 && deg - 1 >= level) more = true;
    }
    if (!more) break;
  }

  // canonical trace order: (level, response, tested, lexicographic cond_set)
  std::stable_sort(result.trace.begin(), result.trace.end(),
                   [](const TestOutcome& a, const TestOutcome& b) {
                     if (a.level() != b.level()) return a.level() < b.level();
                     if (a.response != b.response) return a.response < b.response;
                     if (a.tested != b.tested) return a.tested < b.tested;
                     return a.cond_set < b.cond_set;
                   });
  result.tests_performed = static_cast<long>(result.trace.size());
  result.graph = graph;
  return result;
}

}  // namespace countgraph
