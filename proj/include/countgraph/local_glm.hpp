#pragma once

#include <Eigen/Dense>
#include <vector>

#include "countgraph/count_family.hpp"
#include "countgraph/matrix.hpp"

namespace countgraph {

// Node-conditional design: the response column regressed on the predictor
// columns through the family's natural parameter, optionally with an
// intercept. Predictor order defines the coefficient layout.
struct DesignView {
  const CountMatrix* data = nullptr;
  int response = 0;
  std::vector<int> predictors;
  CountFamily family = CountFamily::poisson();
  bool include_intercept = false;

  int dim() const {
    return static_cast<int>(predictors.size()) + (include_intercept ? 1 : 0);
  }
};

struct FitOptions {
  int max_iter = 100;
  double grad_tol = 1e-8;
  double box_bound = 30.0;  // coefficients constrained to [-M, M]
  double ridge = 1e-10;     // added to the Hessian diagonal only on singular solves
};

// Fitted local model. theta_hat is aligned with DesignView::predictors; the
// intercept (when enabled) occupies the last slot.
struct NodeFit {
  Eigen::VectorXd theta_hat;
  Eigen::MatrixXd avg_hessian;  // (1/n) sum_i D''(<theta,x_i>) x_i x_i^T at theta_hat
  long n = 0;
  bool converged = false;
  int iterations = 0;          // accepted Newton steps
  bool boundary_hit = false;   // some coordinate clamped at +-box_bound
  bool curvature_deficient = false;     // some avg_hessian diagonal ~ 0
  std::vector<double> objective_path;   // objective at start, then after each accepted step
};

// Rescaled negative conditional log-likelihood
//   l(theta) = (1/n) sum_i [ -y_i <theta, x_i> + log y_i! + D(<theta, x_i>) ],
// jointly convex in theta. Throws DataError when a response value lies
// outside the family support (the offending cell is named).
double neg_loglik(const Eigen::VectorXd& theta, const DesignView& design);

// (1/n) sum_i x_i (D'(<theta,x_i>) - y_i).
Eigen::VectorXd gradient(const Eigen::VectorXd& theta, const DesignView& design);

// (1/n) sum_i D''(<theta,x_i>) x_i x_i^T, symmetrized.
Eigen::MatrixXd hessian(const Eigen::VectorXd& theta, const DesignView& design);

// Damped Newton minimizer of neg_loglik over the box [-M, M]^dim: full Newton
// step, halved until the objective strictly decreases (at most 30 halvings),
// iterates clamped to the box. Deterministic: identical inputs and options
// give a bitwise-identical NodeFit.
NodeFit fit(const DesignView& design, const FitOptions& options = {});

}  // namespace countgraph
