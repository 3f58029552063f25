#pragma once

namespace countgraph {

// Standard normal density, CDF and quantile.
//
// normal_quantile combines a rational initial guess with two Halley
// refinements against the erfc-based CDF, so the round trip
// |normal_cdf(normal_quantile(p)) - p| stays below 1e-12 for
// p in [1e-12, 1 - 1e-12].
double normal_pdf(double x);
double normal_cdf(double x);
double normal_quantile(double p);  // throws std::domain_error for p outside (0,1)

}  // namespace countgraph
