#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "countgraph/matrix.hpp"

namespace countgraph {

struct PreprocessReport {
  double chosen_alpha = 1.0;
  std::vector<int> kept_columns;          // ascending original indices
  std::vector<double> row_scale_factors;  // one per sample (row)
  double ks_statistic = 0.0;
};

// Rescale every sample (row) so that the 75th percentile of its nonzero
// entries equals the across-sample median of those percentiles. Rows are
// samples per the sequencing-depth convention. Throws DataError for an
// all-zero row (named).
Eigen::MatrixXd quantile_match_75(const Eigen::MatrixXd& raw);

// With row scale factors reported.
Eigen::MatrixXd quantile_match_75(const Eigen::MatrixXd& raw, std::vector<double>& scales);

// Keep the ceil(fraction * p) columns of largest sample variance; ties break
// toward the lower column index. Returns the reduced matrix and the kept
// indices in ascending order.
std::pair<Eigen::MatrixXd, std::vector<int>> filter_top_variable(const Eigen::MatrixXd& matrix,
                                                                 double fraction = 0.25);

struct PowerTransformResult {
  Eigen::MatrixXi counts;  // floor(x^alpha + 0.5)
  double alpha = 1.0;
  double ks = 0.0;
};

// Grid-search alpha over {0, 0.01, ..., 1}; for each alpha the matrix is
// transformed elementwise to floor(x^alpha + 0.5) and scored by the
// Kolmogorov-Smirnov distance between the pooled values and a Poisson law
// with matched mean. Returns the transform at the minimizing alpha (ties
// toward smaller alpha).
PowerTransformResult power_transform_ks(const Eigen::MatrixXd& matrix);

// Full pipeline: quantile matching, variance filtering, KS-minimizing power
// transform. Column names follow the kept columns.
std::pair<CountMatrix, PreprocessReport> preprocess_pipeline(
    const Eigen::MatrixXd& raw, const std::vector<std::string>& names,
    double variance_fraction = 0.25);

}  // namespace countgraph
