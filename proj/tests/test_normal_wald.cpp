#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "countgraph/errors.hpp"
#include "countgraph/local_glm.hpp"
#include "countgraph/normal.hpp"
#include "countgraph/rng.hpp"
#include "countgraph/wald.hpp"
#include "oracles.hpp"

using namespace countgraph;

TEST_CASE("normal cdf basics") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  for (double x = 0.0; x <= 8.0; x += 0.25)
    CHECK(normal_cdf(-x) == doctest::Approx(1.0 - normal_cdf(x)).epsilon(1e-13));
}

TEST_CASE("normal quantile reference values and round trip") {
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-9));
  CHECK(normal_quantile(0.995) == doctest::Approx(2.5758293035489004).epsilon(1e-9));

  for (double p : {1e-12, 1e-9, 1e-4, 0.01, 0.3, 0.5, 0.7, 0.99, 1.0 - 1e-4,
                   1.0 - 1e-9, 1.0 - 1e-12}) {
    CHECK(std::abs(normal_cdf(normal_quantile(p)) - p) <= 1e-12);
  }

  CHECK_THROWS_AS(normal_quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(normal_quantile(1.0), std::domain_error);
  CHECK_THROWS_AS(normal_quantile(-0.1), std::domain_error);
}

TEST_CASE("decide applies the two-sided rule with ties not rejected") {
  CHECK_FALSE(decide(0.0, 0.01));
  CHECK_FALSE(decide(2.5758, 0.01));  // below Phi^{-1}(0.995) = 2.57583...
  CHECK(decide(2.5759, 0.01));
  CHECK(decide(-10.0, 0.01));
  // exact tie: alpha set to the p-value itself
  const double z = 1.96;
  CHECK_FALSE(decide(z, p_value_two_sided(z)));
  CHECK_THROWS_AS(decide(1.0, 0.0), UsageError);
  CHECK_THROWS_AS(decide(1.0, 1.0), UsageError);
}

TEST_CASE("p_value is a monotone decreasing function of |z|") {
  double prev = 1.1;
  for (double z = 0.0; z <= 12.0; z += 0.1) {
    const double p = p_value_two_sided(z);
    CHECK(p <= prev);
    prev = p;
    CHECK(p_value_two_sided(-z) == p);
  }
  CHECK(p_value_two_sided(0.0) == doctest::Approx(1.0));
}

TEST_CASE("alpha schedule") {
  CHECK(alpha_schedule(1, 0.25) == doctest::Approx(0.3173105078629141).epsilon(1e-12));
  const double deep = alpha_schedule(10000, 0.25);
  CHECK(deep < 1e-22);
  CHECK(deep > 0.0);
  CHECK(alpha_schedule(100, 0.3) > alpha_schedule(1000, 0.3));
  CHECK_THROWS_AS(alpha_schedule(0, 0.25), UsageError);
  CHECK_THROWS_AS(alpha_schedule(100, 0.5), UsageError);
  CHECK_THROWS_AS(alpha_schedule(100, 0.0), UsageError);
}

namespace {

CountMatrix two_columns(const std::vector<int>& y, const std::vector<int>& x) {
  CountMatrix m;
  m.counts.resize(static_cast<long>(y.size()), 2);
  for (std::size_t i = 0; i < y.size(); ++i) {
    m.counts(static_cast<long>(i), 0) = y[i];
    m.counts(static_cast<long>(i), 1) = x[i];
  }
  m.names = default_column_names(2);
  return m;
}

}  // namespace

TEST_CASE("wald statistic closed forms") {
  SUBCASE("zero coefficient gives zero statistic") {
    NodeFit f;
    f.theta_hat = Eigen::VectorXd::Zero(1);
    f.avg_hessian = Eigen::MatrixXd::Constant(1, 1, 0.25);
    f.n = 100;
    f.converged = true;
    CHECK(wald_statistic(f, 0) == 0.0);
    CHECK_THROWS_AS(wald_statistic(f, 1), UsageError);
    CHECK_THROWS_AS(wald_statistic(f, -1), UsageError);
  }
  SUBCASE("singular average Hessian") {
    NodeFit f;
    f.theta_hat = Eigen::VectorXd::Constant(1, 0.5);
    f.avg_hessian = Eigen::MatrixXd::Zero(1, 1);
    f.n = 50;
    CHECK_THROWS_AS(wald_statistic(f, 0), std::domain_error);
  }
  SUBCASE("scalar design matches the hand formula") {
    Rng rng(77);
    std::vector<int> y(60), x(60);
    for (std::size_t i = 0; i < y.size(); ++i) {
      x[i] = rng.next_u01() < 0.5 ? 0 : 1;
      const double eta = 0.6 * x[i];
      y[i] = static_cast<int>(sample(CountFamily::truncated_poisson(1), eta, rng));
    }
    const CountMatrix m = two_columns(y, x);
    DesignView dv;
    dv.data = &m;
    dv.response = 0;
    dv.predictors = {1};
    dv.family = CountFamily::truncated_poisson(1);
    const NodeFit f = fit(dv);
    REQUIRE(f.converged);

    auto obj = [&](const Eigen::VectorXd& t) { return neg_loglik(t, dv); };
    const double theta_grid = oracle::grid_minimize(obj, 1, 30.0, 1e-1, 1e-6)(0);
    const double h = f.avg_hessian(0, 0);
    const double z_hand = std::sqrt(static_cast<double>(f.n)) * theta_grid * std::sqrt(h);
    CHECK(wald_statistic(f, 0) == doctest::Approx(z_hand).epsilon(1e-6));

    // literal reading carries one extra sqrt(n)
    CHECK(wald_statistic(f, 0, true) ==
          doctest::Approx(std::sqrt(static_cast<double>(f.n)) * wald_statistic(f, 0))
              .epsilon(1e-12));
  }
}

TEST_CASE("|Z| doubles when the data are replicated four times") {
  Rng rng(123);
  std::vector<int> y, x;
  for (int i = 0; i < 80; ++i) {
    x.push_back(static_cast<int>(rng.next_u01() * 3));
    const double eta = 0.3 * x.back();
    y.push_back(static_cast<int>(sample(CountFamily::truncated_poisson(3), eta, rng)));
  }
  const CountMatrix base = two_columns(y, x);
  std::vector<int> y4, x4;
  for (int rep = 0; rep < 4; ++rep) {
    y4.insert(y4.end(), y.begin(), y.end());
    x4.insert(x4.end(), x.begin(), x.end());
  }
  const CountMatrix quad = two_columns(y4, x4);

  DesignView dv;
  dv.data = &base;
  dv.response = 0;
  dv.predictors = {1};
  dv.family = CountFamily::truncated_poisson(3);
  const NodeFit f1 = fit(dv);
  dv.data = &quad;
  const NodeFit f4 = fit(dv);
  REQUIRE(f1.converged);
  REQUIRE(f4.converged);
  CHECK(wald_statistic(f4, 0) == doctest::Approx(2.0 * wald_statistic(f1, 0)).epsilon(1e-12));
}

TEST_CASE("complement relabel on a binary design flips the statistic") {
  Rng rng(321);
  std::vector<int> y(300), x(300), xc(300);
  for (std::size_t i = 0; i < y.size(); ++i) {
    x[i] = rng.next_u01() < 0.4 ? 1 : 0;
    xc[i] = 1 - x[i];
    const double eta = -0.4 + 0.9 * x[i];
    y[i] = static_cast<int>(sample(CountFamily::truncated_poisson(1), eta, rng));
  }
  const CountMatrix a = two_columns(y, x);
  const CountMatrix b = two_columns(y, xc);
  DesignView dv;
  dv.response = 0;
  dv.predictors = {1};
  dv.family = CountFamily::truncated_poisson(1);
  dv.include_intercept = true;  // exact flip needs the intercept to absorb the shift
  dv.data = &a;
  const NodeFit fa = fit(dv);
  dv.data = &b;
  const NodeFit fb = fit(dv);
  REQUIRE(fa.converged);
  REQUIRE(fb.converged);
  CHECK(fb.theta_hat(0) == doctest::Approx(-fa.theta_hat(0)).epsilon(1e-8));
  CHECK(wald_statistic(fb, 0) == doctest::Approx(-wald_statistic(fa, 0)).epsilon(1e-8));
}

TEST_CASE("marginal test is calibrated under the null") {
  // N replicates of a single marginal test on independent Poisson(1) columns
  const int replicates = 2000;
  const long n = 2000;
  const double alpha = 0.05;
  int rejections = 0;
  for (int rep = 0; rep < replicates; ++rep) {
    Rng rng = Rng::substream(998877, static_cast<std::uint64_t>(rep));
    CountMatrix m;
    m.counts.resize(n, 2);
    m.names = default_column_names(2);
    for (long i = 0; i < n; ++i) {
      m.counts(i, 0) = static_cast<int>(sample_poisson(1.0, rng));
      m.counts(i, 1) = static_cast<int>(sample_poisson(1.0, rng));
    }
    DesignView dv;
    dv.data = &m;
    dv.response = 0;
    dv.predictors = {1};
    dv.family = CountFamily::poisson();
    const NodeFit f = fit(dv);
    if (!f.converged) continue;
    if (decide(wald_statistic(f, 0), alpha)) ++rejections;
  }
  const double rate = static_cast<double>(rejections) / replicates;
  const double band = 3.0 * std::sqrt(alpha * (1.0 - alpha) / replicates);
  CHECK(rate >= alpha - band);
  CHECK(rate <= alpha + band);
}
