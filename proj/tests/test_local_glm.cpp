#include <doctest.h>

#include <cmath>
#include <cstring>

#include "countgraph/errors.hpp"
#include "countgraph/local_glm.hpp"
#include "countgraph/rng.hpp"
#include "oracles.hpp"

using namespace countgraph;

namespace {

CountMatrix make_matrix(std::initializer_list<std::initializer_list<int>> rows) {
  CountMatrix m;
  const long n = static_cast<long>(rows.size());
  const int p = static_cast<int>(rows.begin()->size());
  m.counts.resize(n, p);
  long i = 0;
  for (const auto& row : rows) {
    int j = 0;
    for (int v : row) m.counts(i, j++) = v;
    ++i;
  }
  m.names = default_column_names(p);
  return m;
}

// Random design with predictors uniform on {0..R} and the response drawn
// from the family conditional at theta_true.
CountMatrix random_design(Rng& rng, long n, int n_pred, const CountFamily& fam,
                          const Eigen::VectorXd& theta_true) {
  const int r = fam.truncated() ? fam.truncation() : 4;
  CountMatrix m;
  m.counts.resize(n, n_pred + 1);
  m.names = default_column_names(n_pred + 1);
  for (long i = 0; i < n; ++i) {
    double eta = 0.0;
    for (int j = 0; j < n_pred; ++j) {
      const int v = static_cast<int>(rng.next_u01() * (r + 1));
      m.counts(i, j + 1) = v;
      eta += theta_true(j) * v;
    }
    m.counts(i, 0) = static_cast<int>(sample(fam, eta, rng));
  }
  return m;
}

DesignView design_of(const CountMatrix& m, std::vector<int> predictors, CountFamily fam,
                     bool intercept = false) {
  DesignView dv;
  dv.data = &m;
  dv.response = 0;
  dv.predictors = std::move(predictors);
  dv.family = std::move(fam);
  dv.include_intercept = intercept;
  return dv;
}

}  // namespace

TEST_CASE("neg_loglik closed forms") {
  SUBCASE("binary chain example") {
    const CountMatrix m = make_matrix({{0, 0}, {1, 1}, {0, 1}, {1, 0}});
    const DesignView dv = design_of(m, {1}, CountFamily::truncated_poisson(1));
    CHECK(neg_loglik(Eigen::VectorXd::Zero(1), dv) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-12));
  }
  SUBCASE("theta = 0 general form") {
    Rng rng(3);
    const CountFamily fam = CountFamily::truncated_poisson(3);
    const CountMatrix m = random_design(rng, 40, 2, fam, Eigen::Vector2d(0.2, -0.1));
    const DesignView dv = design_of(m, {1, 2}, fam);
    double expect = 0.0;
    for (long i = 0; i < m.n(); ++i) expect += fam.log_factorial(m.counts(i, 0));
    expect = expect / static_cast<double>(m.n()) + oracle::trunc_log_normalizer(3, 0.0);
    CHECK(neg_loglik(Eigen::VectorXd::Zero(2), dv) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("neg_loglik equals the per-row pmf-product oracle") {
  Rng rng(5);
  for (int trial = 0; trial < 25; ++trial) {
    const int r = 1 + static_cast<int>(rng.next_u01() * 4);
    const CountFamily fam = trial % 5 == 0 ? CountFamily::poisson()
                                           : CountFamily::truncated_poisson(r);
    const int n_pred = 1 + (trial % 2);
    Eigen::VectorXd theta_true(n_pred);
    for (int j = 0; j < n_pred; ++j) theta_true(j) = -0.5 + rng.next_u01();
    const CountMatrix m = random_design(rng, 30, n_pred, fam, theta_true);
    const bool intercept = trial % 3 == 0;
    std::vector<int> preds;
    for (int j = 0; j < n_pred; ++j) preds.push_back(j + 1);
    const DesignView dv = design_of(m, preds, fam, intercept);

    Eigen::VectorXd theta(dv.dim());
    for (int j = 0; j < dv.dim(); ++j) theta(j) = -0.8 + 1.6 * rng.next_u01();
    CHECK(neg_loglik(theta, dv) ==
          doctest::Approx(oracle::pmf_product_nll(dv, theta)).epsilon(1e-12));
  }
}

TEST_CASE("neg_loglik names the offending cell on a support violation") {
  const CountMatrix m = make_matrix({{3, 1}, {0, 0}});
  const DesignView dv = design_of(m, {1}, CountFamily::truncated_poisson(2));
  CHECK_THROWS_WITH_AS(neg_loglik(Eigen::VectorXd::Zero(1), dv),
                       doctest::Contains("row 0"), DataError);
}

TEST_CASE("design contract violations") {
  const CountMatrix m = make_matrix({{0, 1, 2}, {1, 0, 1}});
  CHECK_THROWS_AS(neg_loglik(Eigen::VectorXd::Zero(1),
                             design_of(m, {0}, CountFamily::poisson())),
                  UsageError);
  CHECK_THROWS_AS(neg_loglik(Eigen::VectorXd::Zero(2),
                             design_of(m, {1, 1}, CountFamily::poisson())),
                  UsageError);
  CHECK_THROWS_AS(neg_loglik(Eigen::VectorXd::Zero(1),
                             design_of(m, {3}, CountFamily::poisson())),
                  UsageError);
  CHECK_THROWS_AS(neg_loglik(Eigen::VectorXd::Zero(2),
                             design_of(m, {1}, CountFamily::poisson())),
                  UsageError);
}

TEST_CASE("gradient vanishes on balanced data") {
  // response mean equals D'(0) = 1/2 within every predictor pattern
  const CountMatrix m = make_matrix({{0, 0}, {1, 0}, {0, 1}, {1, 1}});
  const DesignView dv = design_of(m, {1}, CountFamily::truncated_poisson(1), true);
  const Eigen::VectorXd g = gradient(Eigen::VectorXd::Zero(2), dv);
  CHECK(g.lpNorm<Eigen::Infinity>() == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("gradient and hessian match finite differences") {
  Rng rng(9);
  for (int trial = 0; trial < 25; ++trial) {
    const CountFamily fam = trial % 4 == 0 ? CountFamily::poisson()
                                           : CountFamily::truncated_poisson(3);
    Eigen::VectorXd theta_true(2);
    theta_true << 0.3, -0.2;
    const CountMatrix m = random_design(rng, 25, 2, fam, theta_true);
    const DesignView dv = design_of(m, {1, 2}, fam, trial % 2 == 0);

    Eigen::VectorXd theta(dv.dim());
    for (int j = 0; j < dv.dim(); ++j) theta(j) = -0.6 + 1.2 * rng.next_u01();

    auto f = [&](const Eigen::VectorXd& t) { return neg_loglik(t, dv); };
    auto fgrad = [&](const Eigen::VectorXd& t) { return gradient(t, dv); };

    const Eigen::VectorXd g = gradient(theta, dv);
    const Eigen::VectorXd g_fd = oracle::fd_gradient(f, theta, 1e-4);
    for (int j = 0; j < dv.dim(); ++j)
      CHECK(g(j) == doctest::Approx(g_fd(j)).epsilon(1e-6));

    const Eigen::MatrixXd h = hessian(theta, dv);
    const Eigen::MatrixXd h_fd = oracle::fd_jacobian(fgrad, theta, 1e-4);
    for (int a = 0; a < dv.dim(); ++a)
      for (int b = 0; b < dv.dim(); ++b)
        CHECK(h(a, b) == doctest::Approx(h_fd(a, b)).epsilon(1e-5));
  }
}

TEST_CASE("hessian closed forms") {
  SUBCASE("identically-zero predictor zeroes its row and column") {
    const CountMatrix m = make_matrix({{1, 2, 0}, {0, 1, 0}, {2, 0, 0}});
    const DesignView dv = design_of(m, {1, 2}, CountFamily::truncated_poisson(2));
    const Eigen::MatrixXd h = hessian(Eigen::Vector2d(0.4, -0.3), dv);
    CHECK(h(1, 1) == 0.0);
    CHECK(h(0, 1) == 0.0);
    CHECK(h(1, 0) == 0.0);
    CHECK(h(0, 0) > 0.0);
  }
  SUBCASE("binary design at zero: D''(0) = 1/4") {
    const CountMatrix m = make_matrix({{0, 1}, {1, 0}, {1, 1}, {0, 0}});
    const DesignView dv = design_of(m, {1}, CountFamily::truncated_poisson(1));
    const Eigen::MatrixXd h = hessian(Eigen::VectorXd::Zero(1), dv);
    const double mean_sq = (0.0 + 1.0 + 1.0 + 0.0) / 4.0;
    CHECK(h(0, 0) == doctest::Approx(0.25 * mean_sq).epsilon(1e-12));
  }
}

TEST_CASE("fit recovers independence and satisfies optimality") {
  Rng rng(20240802);
  const CountFamily fam = CountFamily::truncated_poisson(3);
  const CountMatrix m = random_design(rng, 5000, 2, fam, Eigen::Vector2d(0.0, 0.0));
  const DesignView dv = design_of(m, {1, 2}, fam);
  const NodeFit f = fit(dv);
  CHECK(f.converged);
  CHECK(f.theta_hat.lpNorm<Eigen::Infinity>() <= 0.1);
  CHECK(gradient(f.theta_hat, dv).lpNorm<Eigen::Infinity>() <= 1e-8);
  CHECK_FALSE(f.boundary_hit);

  // grid oracle confirms the minimizer is near zero
  auto obj = [&](const Eigen::VectorXd& t) { return neg_loglik(t, dv); };
  const Eigen::VectorXd best = oracle::grid_minimize(obj, 2, 2.0, 0.05, 1e-4);
  CHECK((best - f.theta_hat).lpNorm<Eigen::Infinity>() <= 2e-4);
}

TEST_CASE("fit matches 1-D grid search") {
  Rng rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    const int r = 1 + static_cast<int>(rng.next_u01() * 3);
    const CountFamily fam = CountFamily::truncated_poisson(r);
    Eigen::VectorXd theta_true(1);
    theta_true(0) = -0.8 + 1.6 * rng.next_u01();
    const CountMatrix m = random_design(rng, 40, 1, fam, theta_true);
    const DesignView dv = design_of(m, {1}, fam);
    const NodeFit f = fit(dv);
    REQUIRE(f.converged);
    auto obj = [&](const Eigen::VectorXd& t) { return neg_loglik(t, dv); };
    const Eigen::VectorXd best = oracle::grid_minimize(obj, 1, 30.0, 1e-1, 1e-5);
    CHECK(std::abs(best(0) - f.theta_hat(0)) <= 1e-4);
  }
}

TEST_CASE("empty predictor set without intercept is a no-op fit") {
  const CountMatrix m = make_matrix({{1, 0}, {2, 1}});
  const DesignView dv = design_of(m, {}, CountFamily::truncated_poisson(2));
  const NodeFit f = fit(dv);
  CHECK(f.theta_hat.size() == 0);
  CHECK(f.converged);
  CHECK(f.iterations == 0);
}

TEST_CASE("objective is convex along random segments") {
  Rng rng(17);
  const CountFamily fam = CountFamily::truncated_poisson(3);
  const CountMatrix m = random_design(rng, 30, 2, fam, Eigen::Vector2d(0.4, -0.2));
  const DesignView dv = design_of(m, {1, 2}, fam, true);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd a(3), b(3);
    for (int j = 0; j < 3; ++j) {
      a(j) = -2.0 + 4.0 * rng.next_u01();
      b(j) = -2.0 + 4.0 * rng.next_u01();
    }
    const double lam = rng.next_u01();
    const double chord = lam * neg_loglik(a, dv) + (1.0 - lam) * neg_loglik(b, dv);
    const double mid = neg_loglik(lam * a + (1.0 - lam) * b, dv);
    CHECK(mid <= chord + 1e-9);
  }
}

TEST_CASE("fit is bitwise deterministic and monotone") {
  Rng rng(23);
  const CountFamily fam = CountFamily::truncated_poisson(4);
  const CountMatrix m = random_design(rng, 200, 2, fam, Eigen::Vector2d(0.5, -0.4));
  const DesignView dv = design_of(m, {1, 2}, fam, true);

  const NodeFit a = fit(dv);
  const NodeFit b = fit(dv);
  REQUIRE(a.theta_hat.size() == b.theta_hat.size());
  CHECK(std::memcmp(a.theta_hat.data(), b.theta_hat.data(),
                    sizeof(double) * static_cast<std::size_t>(a.theta_hat.size())) == 0);
  CHECK(std::memcmp(a.avg_hessian.data(), b.avg_hessian.data(),
                    sizeof(double) * static_cast<std::size_t>(a.avg_hessian.size())) == 0);
  CHECK(a.iterations == b.iterations);

  for (std::size_t i = 1; i < a.objective_path.size(); ++i)
    CHECK(a.objective_path[i] < a.objective_path[i - 1]);

  // avg_hessian is symmetric PSD
  CHECK((a.avg_hessian - a.avg_hessian.transpose()).lpNorm<Eigen::Infinity>() <= 1e-10);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a.avg_hessian, Eigen::EigenvaluesOnly);
  CHECK(eig.eigenvalues().minCoeff() >= -1e-10);
}

TEST_CASE("Poisson fit agrees with textbook IRLS") {
  Rng rng(41);
  const CountFamily fam = CountFamily::poisson();
  for (int trial = 0; trial < 5; ++trial) {
    const CountMatrix m = random_design(rng, 300, 2, fam, Eigen::Vector2d(0.3, -0.25));
    const DesignView dv = design_of(m, {1, 2}, fam, true);
    const NodeFit f = fit(dv);
    REQUIRE(f.converged);

    Eigen::MatrixXd x(m.n(), 3);
    Eigen::VectorXd y(m.n());
    for (long i = 0; i < m.n(); ++i) {
      x(i, 0) = m.counts(i, 1);
      x(i, 1) = m.counts(i, 2);
      x(i, 2) = 1.0;
      y(i) = m.counts(i, 0);
    }
    const Eigen::VectorXd beta = oracle::irls_poisson(x, y);
    for (int j = 0; j < 3; ++j)
      CHECK(f.theta_hat(j) == doctest::Approx(beta(j)).epsilon(1e-6));
  }
}

TEST_CASE("response exceeding an explicit truncation point is a hard error") {
  const CountMatrix m = make_matrix({{5, 1}, {1, 0}});
  const DesignView dv = design_of(m, {1}, CountFamily::truncated_poisson(3));
  CHECK_THROWS_AS(fit(dv), DataError);
}
