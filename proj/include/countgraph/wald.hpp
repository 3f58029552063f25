#pragma once

#include <vector>

#include "countgraph/local_glm.hpp"

namespace countgraph {

// Outcome of one conditional-independence test: response regressed on
// cond_set plus the tested predictor, Wald test on the tested coefficient.
// Degenerate outcomes (non-converged fit, singular average Hessian) carry
// NaN z / p_value and count as not rejected.
struct TestOutcome {
  int response = 0;               // the node used as regression response
  int tested = 0;                 // the node whose coefficient is tested
  std::vector<int> cond_set;      // conditioning set, ascending
  double z = 0.0;
  double p_value = 1.0;
  bool rejected = false;
  bool degenerate = false;

  int level() const { return static_cast<int>(cond_set.size()); }
};

// Z = sqrt(n) * theta_hat[t] / sqrt([H^{-1}]_tt) with H the average Hessian
// stored in the fit. With literal=true the statistic picks up an extra
// sqrt(n) factor (the reading in which the information matrix is n times the
// average Hessian yet the sqrt(n) prefactor is kept).
// Throws UsageError on a bad index and std::domain_error when the average
// Hessian is singular.
double wald_statistic(const NodeFit& fit, int t_index, bool literal = false);

// Two-sided p-value 2 * (1 - Phi(|z|)).
double p_value_two_sided(double z);

// Reject iff |z| > Phi^{-1}(1 - alpha/2); ties resolve to not-reject.
// Evaluated as p_value_two_sided(z) < alpha, which is the same decision.
bool decide(double z, double alpha);

// Theoretical significance schedule alpha_n = 2 * (1 - Phi(n^d)), 0 < d < 1/2;
// strictly decreasing in n. Clamped away from zero when the tail underflows.
double alpha_schedule(long n, double d);

}  // namespace countgraph
