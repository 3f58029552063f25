#include "countgraph/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "countgraph/errors.hpp"

namespace countgraph {

namespace {

// Linear-interpolation quantile (R type 7) of a sorted vector.
double quantile_sorted(const std::vector<double>& sorted, double q) {
  const std::size_t m = sorted.size();
  if (m == 1) return sorted[0];
  const double h = q * static_cast<double>(m - 1);
  const std::size_t lo = static_cast<std::size_t>(h);
  const double frac = h - static_cast<double>(lo);
  if (lo + 1 >= m) return sorted[m - 1];
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double row_q75_nonzero(const Eigen::MatrixXd& m, Eigen::Index i) {
  std::vector<double> nz;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const double v = m(i, j);
    if (!(v >= 0.0) || !std::isfinite(v))
      throw DataError("quantile_match_75: entry at row " + std::to_string(i) + ", column " +
                      std::to_string(j) + " is negative or not finite");
    if (v > 0.0) nz.push_back(v);
  }
  if (nz.empty())
    throw DataError("quantile_match_75: row " + std::to_string(i) + " is all zeros");
  std::sort(nz.begin(), nz.end());
  return quantile_sorted(nz, 0.75);
}

}  // namespace

Eigen::MatrixXd quantile_match_75(const Eigen::MatrixXd& raw, std::vector<double>& scales) {
  const Eigen::Index n = raw.rows();
  std::vector<double> q75(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) q75[static_cast<std::size_t>(i)] = row_q75_nonzero(raw, i);

  std::vector<double> sorted = q75;
  std::sort(sorted.begin(), sorted.end());
  const double target = quantile_sorted(sorted, 0.5);

  Eigen::MatrixXd out = raw;
  scales.assign(static_cast<std::size_t>(n), 1.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = target / q75[static_cast<std::size_t>(i)];
    scales[static_cast<std::size_t>(i)] = s;
    out.row(i) *= s;
  }
  return out;
}

Eigen::MatrixXd quantile_match_75(const Eigen::MatrixXd& raw) {
  std::vector<double> scales;
  return quantile_match_75(raw, scales);
}

std::pair<Eigen::MatrixXd, std::vector<int>> filter_top_variable(const Eigen::MatrixXd& matrix,
                                                                 double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw UsageError("filter_top_variable: fraction must lie in (0, 1]");
  const Eigen::Index n = matrix.rows();
  const Eigen::Index p = matrix.cols();

  std::vector<double> variance(static_cast<std::size_t>(p), 0.0);
  for (Eigen::Index j = 0; j < p; ++j) {
    if (n > 1) {
      const double mean = matrix.col(j).mean();
      variance[static_cast<std::size_t>(j)] =
          (matrix.col(j).array() - mean).square().sum() / static_cast<double>(n - 1);
    }
  }

  const int keep = static_cast<int>(std::ceil(fraction * static_cast<double>(p)));
  std::vector<int> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double va = variance[static_cast<std::size_t>(a)];
    const double vb = variance[static_cast<std::size_t>(b)];
    if (va != vb) return va > vb;
    return a < b;
  });
  std::vector<int> kept(order.begin(), order.begin() + keep);
  std::sort(kept.begin(), kept.end());

  Eigen::MatrixXd out(n, keep);
  for (int j = 0; j < keep; ++j) out.col(j) = matrix.col(kept[static_cast<std::size_t>(j)]);
  return {out, kept};
}

namespace {

double ks_vs_matched_poisson(const std::vector<long>& pooled) {
  long maxv = 0;
  double sum = 0.0;
  for (long v : pooled) {
    maxv = std::max(maxv, v);
    sum += static_cast<double>(v);
  }
  const double lambda = sum / static_cast<double>(pooled.size());

  std::vector<double> hist(static_cast<std::size_t>(maxv) + 1, 0.0);
  for (long v : pooled) hist[static_cast<std::size_t>(v)] += 1.0;

  double f_emp = 0.0;
  double f_pois = 0.0;
  double pmf = std::exp(-lambda);  // lambda = 0 gives a point mass at zero
  double dmax = 0.0;
  for (long k = 0; k <= maxv; ++k) {
    f_emp += hist[static_cast<std::size_t>(k)] / static_cast<double>(pooled.size());
    f_pois += pmf;
    dmax = std::max(dmax, std::abs(f_emp - f_pois));
    pmf *= lambda / static_cast<double>(k + 1);
  }
  return dmax;
}

}  // namespace

PowerTransformResult power_transform_ks(const Eigen::MatrixXd& matrix) {
  const Eigen::Index n = matrix.rows();
  const Eigen::Index p = matrix.cols();
  if (n * p == 0) throw UsageError("power_transform_ks: empty matrix");
  if ((matrix.array() < 0.0).any())
    throw DataError("power_transform_ks: negative entries");

  PowerTransformResult best;
  bool have_best = false;
  std::vector<long> pooled(static_cast<std::size_t>(n * p));
  for (int step = 0; step <= 100; ++step) {
    const double alpha = static_cast<double>(step) / 100.0;
    Eigen::MatrixXi transformed(n, p);
    std::size_t idx = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < p; ++j) {
        const long v = static_cast<long>(std::floor(std::pow(matrix(i, j), alpha) + 0.5));
        transformed(i, j) = static_cast<int>(v);
        pooled[idx++] = v;
      }
    }
    const double ks = ks_vs_matched_poisson(pooled);
    if (!have_best || ks < best.ks) {
      best.counts = std::move(transformed);
      best.alpha = alpha;
      best.ks = ks;
      have_best = true;
    }
  }
  return best;
}

std::pair<CountMatrix, PreprocessReport> preprocess_pipeline(
    const Eigen::MatrixXd& raw, const std::vector<std::string>& names,
    double variance_fraction) {
  if (static_cast<Eigen::Index>(names.size()) != raw.cols())
    throw UsageError("preprocess_pipeline: name count does not match columns");

  PreprocessReport report;
  const Eigen::MatrixXd matched = quantile_match_75(raw, report.row_scale_factors);
  auto [filtered, kept] = filter_top_variable(matched, variance_fraction);
  report.kept_columns = kept;
  PowerTransformResult pt = power_transform_ks(filtered);
  report.chosen_alpha = pt.alpha;
  report.ks_statistic = pt.ks;

  CountMatrix out;
  out.counts = std::move(pt.counts);
  out.names.reserve(kept.size());
  for (int j : kept) out.names.push_back(names[static_cast<std::size_t>(j)]);
  return {std::move(out), std::move(report)};
}

}  // namespace countgraph
