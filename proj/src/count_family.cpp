#include "countgraph/count_family.hpp"

#include <cmath>
#include <stdexcept>

#include "countgraph/errors.hpp"

namespace countgraph {

CountFamily::CountFamily(FamilyKind kind, int truncation)
    : kind_(kind), truncation_(truncation) {
  if (kind_ == FamilyKind::TruncatedPoisson) {
    log_factorial_.resize(static_cast<std::size_t>(truncation_) + 1, 0.0);
    double acc = 0.0;
    for (int k = 1; k <= truncation_; ++k) {
      acc += std::log(static_cast<double>(k));
      log_factorial_[static_cast<std::size_t>(k)] = acc;
    }
  }
}

CountFamily CountFamily::truncated_poisson(int truncation) {
  if (truncation < 1) throw UsageError("truncated_poisson: truncation point must be >= 1");
  return CountFamily(FamilyKind::TruncatedPoisson, truncation);
}

CountFamily CountFamily::poisson() { return CountFamily(FamilyKind::Poisson, 0); }

namespace {

void require_finite(double eta) {
  if (!std::isfinite(eta)) throw std::domain_error("count family: eta must be finite");
}

}  // namespace

double log_normalizer(const CountFamily& family, double eta) {
  require_finite(eta);
  if (!family.truncated()) return std::exp(eta);

  const int r = family.truncation();
  // max-shifted sum: terms a_k = k*eta - log k! can reach |eta|*R.
  double shift = 0.0;
  for (int k = 1; k <= r; ++k) {
    const double a = k * eta - family.log_factorial(k);
    if (a > shift) shift = a;
  }
  double acc = 0.0;
  for (int k = 0; k <= r; ++k) {
    acc += std::exp(k * eta - family.log_factorial(k) - shift);
  }
  return shift + std::log(acc);
}

LogNormalizerDerivs log_normalizer_derivs(const CountFamily& family, double eta) {
  require_finite(eta);
  if (!family.truncated()) {
    const double e = std::exp(eta);
    return {e, e, e};
  }

  const int r = family.truncation();
  double shift = 0.0;
  for (int k = 1; k <= r; ++k) {
    const double a = k * eta - family.log_factorial(k);
    if (a > shift) shift = a;
  }
  double s0 = 0.0;
  double s1 = 0.0;
  for (int k = 0; k <= r; ++k) {
    const double w = std::exp(k * eta - family.log_factorial(k) - shift);
    s0 += w;
    s1 += k * w;
  }
  const double mean = s1 / s0;
  // centered pass for the variance and third moment
  double m2 = 0.0;
  double m3 = 0.0;
  for (int k = 0; k <= r; ++k) {
    const double w = std::exp(k * eta - family.log_factorial(k) - shift);
    const double c = k - mean;
    m2 += w * c * c;
    m3 += w * c * c * c;
  }
  return {mean, m2 / s0, m3 / s0};
}

double pmf(const CountFamily& family, double eta, long k) {
  require_finite(eta);
  if (!family.in_support(k)) throw std::domain_error("pmf: k outside family support");
  const double d = log_normalizer(family, eta);
  const double lf = family.truncated() ? family.log_factorial(static_cast<int>(k))
                                       : std::lgamma(static_cast<double>(k) + 1.0);
  return std::exp(k * eta - lf - d);
}

long sample_poisson(double lambda, Rng& rng) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::domain_error("sample_poisson: lambda must be positive and finite");
  long total = 0;
  // keep exp(-chunk) well away from underflow
  while (lambda > 32.0) {
    double chunk = 32.0;
    const double p0 = std::exp(-chunk);
    double u = rng.next_u01();
    double p = p0;
    double f = p;
    long k = 0;
    while (u > f && k < 4096) {
      ++k;
      p *= chunk / k;
      f += p;
    }
    total += k;
    lambda -= chunk;
  }
  const double u = rng.next_u01();
  double p = std::exp(-lambda);
  double f = p;
  long k = 0;
  while (u > f && k < 4096) {
    ++k;
    p *= lambda / k;
    f += p;
  }
  return total + k;
}

long sample(const CountFamily& family, double eta, Rng& rng) {
  require_finite(eta);
  if (!family.truncated()) return sample_poisson(std::exp(eta), rng);

  const int r = family.truncation();
  double shift = 0.0;
  for (int k = 1; k <= r; ++k) {
    const double a = k * eta - family.log_factorial(k);
    if (a > shift) shift = a;
  }
  double total = 0.0;
  std::vector<double> w(static_cast<std::size_t>(r) + 1);
  for (int k = 0; k <= r; ++k) {
    w[static_cast<std::size_t>(k)] = std::exp(k * eta - family.log_factorial(k) - shift);
    total += w[static_cast<std::size_t>(k)];
  }
  const double u = rng.next_u01() * total;
  double acc = 0.0;
  for (int k = 0; k < r; ++k) {
    acc += w[static_cast<std::size_t>(k)];
    if (u < acc) return k;
  }
  return r;
}

}  // namespace countgraph
