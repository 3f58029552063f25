#include "countgraph/metrics.hpp"

#include <cmath>
#include <limits>

#include "countgraph/errors.hpp"

namespace countgraph {

Confusion confusion(const UndirectedGraph& truth, const UndirectedGraph& estimate) {
  if (truth.p() != estimate.p()) throw UsageError("confusion: vertex counts differ");
  Confusion c;
  for (int s = 0; s < truth.p(); ++s) {
    for (int t = s + 1; t < truth.p(); ++t) {
      const bool in_truth = truth.has_edge(s, t);
      const bool in_est = estimate.has_edge(s, t);
      if (in_truth && in_est) ++c.tp;
      else if (!in_truth && in_est) ++c.fp;
      else if (in_truth && !in_est) ++c.fn;
    }
  }
  if (c.tp + c.fp > 0) c.ppv = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  if (c.tp + c.fn > 0) c.se = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  return c;
}

namespace {

MetricSummary summarize(const std::vector<double>& values, long excluded) {
  MetricSummary s;
  s.excluded = excluded;
  if (values.empty()) {
    s.mean = std::numeric_limits<double>::quiet_NaN();
    s.sd = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  double acc = 0.0;
  for (double v : values) acc += v;
  s.mean = acc / static_cast<double>(values.size());
  if (values.size() == 1) {
    s.sd = 0.0;
    return s;
  }
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  return s;
}

}  // namespace

BenchSummary aggregate(const std::vector<Confusion>& confusions) {
  if (confusions.empty()) throw UsageError("aggregate: empty replicate list");
  BenchSummary out;
  out.replicates = static_cast<long>(confusions.size());
  std::vector<double> tp, fp, fn, ppv, se;
  long ppv_excluded = 0;
  long se_excluded = 0;
  for (const auto& c : confusions) {
    tp.push_back(static_cast<double>(c.tp));
    fp.push_back(static_cast<double>(c.fp));
    fn.push_back(static_cast<double>(c.fn));
    if (c.ppv) ppv.push_back(*c.ppv); else ++ppv_excluded;
    if (c.se) se.push_back(*c.se); else ++se_excluded;
  }
  out.tp = summarize(tp, 0);
  out.fp = summarize(fp, 0);
  out.fn = summarize(fn, 0);
  out.ppv = summarize(ppv, ppv_excluded);
  out.se = summarize(se, se_excluded);
  return out;
}

}  // namespace countgraph
