#include "countgraph/wald.hpp"

#include <cfloat>
#include <cmath>
#include <stdexcept>

#include "countgraph/errors.hpp"
#include "countgraph/normal.hpp"

namespace countgraph {

double wald_statistic(const NodeFit& fit, int t_index, bool literal) {
  const int d = static_cast<int>(fit.theta_hat.size());
  if (t_index < 0 || t_index >= d)
    throw UsageError("wald_statistic: coefficient index out of range");

  Eigen::VectorXd unit = Eigen::VectorXd::Zero(d);
  unit(t_index) = 1.0;
  const Eigen::VectorXd column = fit.avg_hessian.ldlt().solve(unit);
  const double inv_tt = column(t_index);
  if (!std::isfinite(inv_tt) || inv_tt <= 0.0)
    throw std::domain_error("wald_statistic: singular average Hessian");

  const double root_n = std::sqrt(static_cast<double>(fit.n));
  double z = root_n * fit.theta_hat(t_index) / std::sqrt(inv_tt);
  if (literal) z *= root_n;
  return z;
}

double p_value_two_sided(double z) {
  return std::erfc(std::abs(z) / 1.4142135623730951);
}

bool decide(double z, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw UsageError("decide: alpha must lie in (0,1)");
  return p_value_two_sided(z) < alpha;
}

double alpha_schedule(long n, double d) {
  if (n < 1) throw UsageError("alpha_schedule: n must be >= 1");
  if (!(d > 0.0 && d < 0.5))
    throw UsageError("alpha_schedule: d must lie in (0, 0.5)");
  const double alpha = std::erfc(std::pow(static_cast<double>(n), d) / 1.4142135623730951);
  return alpha > 0.0 ? alpha : DBL_MIN;
}

}  // namespace countgraph
