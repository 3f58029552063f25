#pragma once

#include <vector>

#include "countgraph/rng.hpp"

namespace countgraph {

enum class FamilyKind { TruncatedPoisson, Poisson };

// Exponential-family law of a count response with natural parameter eta:
// either a Poisson distribution truncated (and renormalized) on {0,...,R},
// or the unrestricted Poisson on the nonnegative integers.
//
// Log-normalizer:
//   truncated:  D(eta) = log sum_{k=0}^{R} exp(k*eta - log k!)
//   Poisson:    D(eta) = exp(eta)
// and pmf(k) = exp(k*eta - log k! - D(eta)).
class CountFamily {
 public:
  static CountFamily truncated_poisson(int truncation);
  static CountFamily poisson();

  FamilyKind kind() const { return kind_; }
  bool truncated() const { return kind_ == FamilyKind::TruncatedPoisson; }

  // Truncation point R; valid for the truncated kind only.
  int truncation() const { return truncation_; }

  bool in_support(long k) const {
    if (k < 0) return false;
    return !truncated() || k <= truncation_;
  }

  // log k! for k in {0..R}, exact log summation (truncated kind).
  double log_factorial(int k) const { return log_factorial_[static_cast<std::size_t>(k)]; }

 private:
  CountFamily(FamilyKind kind, int truncation);

  FamilyKind kind_;
  int truncation_ = 0;
  std::vector<double> log_factorial_;
};

struct LogNormalizerDerivs {
  double d1;  // conditional mean
  double d2;  // conditional variance
  double d3;  // conditional third central moment
};

// D(eta). Overflow-safe in the truncated case via a max-shifted sum.
// Throws std::domain_error on non-finite eta.
double log_normalizer(const CountFamily& family, double eta);

// (D', D'', D''') at eta.
LogNormalizerDerivs log_normalizer_derivs(const CountFamily& family, double eta);

// P(X = k) under natural parameter eta. Throws std::domain_error when k is
// outside the family support.
double pmf(const CountFamily& family, double eta, long k);

// One draw from the family at natural parameter eta, consuming the stream.
long sample(const CountFamily& family, double eta, Rng& rng);

// One Poisson(lambda) draw by sequential CDF inversion (chunked for large
// lambda so exp(-lambda) never underflows).
long sample_poisson(double lambda, Rng& rng);

}  // namespace countgraph
