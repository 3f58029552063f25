#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace countgraph {

// n x p matrix of nonnegative integer observations with column labels.
// Rows are samples, columns are variables.
struct CountMatrix {
  Eigen::MatrixXi counts;
  std::vector<std::string> names;

  long n() const { return counts.rows(); }
  int p() const { return static_cast<int>(counts.cols()); }

  int max_count() const { return counts.size() == 0 ? 0 : counts.maxCoeff(); }
};

// Default labels c0..c{p-1}.
std::vector<std::string> default_column_names(int p);

}  // namespace countgraph
