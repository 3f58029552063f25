#include "countgraph/local_glm.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

#include "countgraph/errors.hpp"

namespace countgraph {

namespace {

// Sums collapsed over distinct predictor rows. The likelihood depends on the
// responses only through sum_i y_i x_i and sum_i log y_i!, so after grouping
// each objective/gradient/Hessian evaluation costs O(#groups) rather than
// O(n) rows.
struct CompiledDesign {
  Eigen::MatrixXd x;       // g x d distinct predictor rows (intercept column last)
  Eigen::VectorXd weight;  // multiplicity per distinct row; sums to n
  Eigen::VectorXd sum_yx;  // sum_i y_i x_i
  double sum_lfact = 0.0;  // sum_i log y_i!
  double n = 0.0;
};

void validate(const DesignView& dv) {
  if (!dv.data) throw UsageError("design: data is null");
  if (dv.data->n() < 1) throw UsageError("design: need at least one row");
  const int p = dv.data->p();
  if (dv.response < 0 || dv.response >= p)
    throw UsageError("design: response index out of range");
  std::vector<char> seen(static_cast<std::size_t>(p), 0);
  for (int j : dv.predictors) {
    if (j < 0 || j >= p) throw UsageError("design: predictor index out of range");
    if (j == dv.response) throw UsageError("design: response cannot be its own predictor");
    if (seen[static_cast<std::size_t>(j)]) throw UsageError("design: duplicate predictor");
    seen[static_cast<std::size_t>(j)] = 1;
  }
}

CompiledDesign compile(const DesignView& dv) {
  validate(dv);
  const auto& m = dv.data->counts;
  const long n = m.rows();
  const int k = static_cast<int>(dv.predictors.size());
  const int d = dv.dim();

  CompiledDesign c;
  c.n = static_cast<double>(n);
  c.sum_yx = Eigen::VectorXd::Zero(d);

  std::map<std::vector<int>, int> index;
  std::vector<double> weights;
  std::vector<std::vector<int>> distinct;
  std::vector<int> key(static_cast<std::size_t>(k));
  for (long i = 0; i < n; ++i) {
    const int y = m(i, dv.response);
    if (y < 0 || !dv.family.in_support(y)) {
      throw DataError("response value " + std::to_string(y) + " at row " + std::to_string(i) +
                      ", column '" + dv.data->names[static_cast<std::size_t>(dv.response)] +
                      "' is outside the family support");
    }
    for (int j = 0; j < k; ++j) key[static_cast<std::size_t>(j)] = m(i, dv.predictors[j]);
    auto [it, inserted] = index.try_emplace(key, static_cast<int>(weights.size()));
    if (inserted) {
      weights.push_back(0.0);
      distinct.push_back(key);
    }
    weights[static_cast<std::size_t>(it->second)] += 1.0;
    for (int j = 0; j < k; ++j)
      c.sum_yx(j) += static_cast<double>(y) * key[static_cast<std::size_t>(j)];
    if (dv.include_intercept) c.sum_yx(d - 1) += y;
    c.sum_lfact += dv.family.truncated() ? dv.family.log_factorial(y)
                                         : std::lgamma(static_cast<double>(y) + 1.0);
  }

  const int g = static_cast<int>(weights.size());
  c.x.resize(g, d);
  c.weight.resize(g);
  for (int gi = 0; gi < g; ++gi) {
    for (int j = 0; j < k; ++j) c.x(gi, j) = distinct[static_cast<std::size_t>(gi)][static_cast<std::size_t>(j)];
    if (dv.include_intercept) c.x(gi, d - 1) = 1.0;
    c.weight(gi) = weights[static_cast<std::size_t>(gi)];
  }
  return c;
}

double nll_at(const CompiledDesign& c, const CountFamily& fam, const Eigen::VectorXd& theta) {
  const Eigen::VectorXd eta = c.x * theta;
  double acc = 0.0;
  for (Eigen::Index gi = 0; gi < eta.size(); ++gi)
    acc += c.weight(gi) * log_normalizer(fam, eta(gi));
  return (acc + c.sum_lfact - theta.dot(c.sum_yx)) / c.n;
}

Eigen::VectorXd grad_at(const CompiledDesign& c, const CountFamily& fam,
                        const Eigen::VectorXd& theta) {
  const Eigen::VectorXd eta = c.x * theta;
  Eigen::VectorXd wd1(eta.size());
  for (Eigen::Index gi = 0; gi < eta.size(); ++gi)
    wd1(gi) = c.weight(gi) * log_normalizer_derivs(fam, eta(gi)).d1;
  return (c.x.transpose() * wd1 - c.sum_yx) / c.n;
}

Eigen::MatrixXd hess_at(const CompiledDesign& c, const CountFamily& fam,
                        const Eigen::VectorXd& theta) {
  const Eigen::VectorXd eta = c.x * theta;
  Eigen::VectorXd wd2(eta.size());
  for (Eigen::Index gi = 0; gi < eta.size(); ++gi)
    wd2(gi) = c.weight(gi) * log_normalizer_derivs(fam, eta(gi)).d2;
  Eigen::MatrixXd h = c.x.transpose() * wd2.asDiagonal() * c.x / c.n;
  Eigen::MatrixXd sym = 0.5 * (h + h.transpose());
  return sym;
}

// -H^{-1} g; retries once with the ridge when the plain solve is singular.
Eigen::VectorXd newton_direction(const Eigen::MatrixXd& h, const Eigen::VectorXd& g,
                                 double ridge) {
  const double gnorm = g.lpNorm<Eigen::Infinity>();
  auto acceptable = [&](const Eigen::VectorXd& delta, const Eigen::MatrixXd& hh) {
    if (!delta.allFinite()) return false;
    return (hh * delta + g).lpNorm<Eigen::Infinity>() <= 1e-6 * (1.0 + gnorm);
  };
  Eigen::VectorXd delta = h.ldlt().solve(-g);
  if (acceptable(delta, h)) return delta;
  Eigen::MatrixXd hr = h;
  hr.diagonal().array() += ridge;
  return hr.ldlt().solve(-g);
}

void check_theta(const Eigen::VectorXd& theta, const DesignView& dv) {
  if (theta.size() != dv.dim())
    throw UsageError("theta length does not match the design dimension");
}

}  // namespace

double neg_loglik(const Eigen::VectorXd& theta, const DesignView& design) {
  check_theta(theta, design);
  return nll_at(compile(design), design.family, theta);
}

Eigen::VectorXd gradient(const Eigen::VectorXd& theta, const DesignView& design) {
  check_theta(theta, design);
  return grad_at(compile(design), design.family, theta);
}

Eigen::MatrixXd hessian(const Eigen::VectorXd& theta, const DesignView& design) {
  check_theta(theta, design);
  return hess_at(compile(design), design.family, theta);
}

NodeFit fit(const DesignView& design, const FitOptions& options) {
  const CompiledDesign c = compile(design);
  const CountFamily& fam = design.family;
  const int d = design.dim();
  const double bound = options.box_bound;

  NodeFit out;
  out.n = static_cast<long>(c.n);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(d);

  double obj = nll_at(c, fam, theta);
  if (!std::isfinite(obj))
    throw std::runtime_error("fit: objective not finite at the starting point");
  out.objective_path.push_back(obj);

  bool converged = false;
  if (d == 0) {
    converged = true;
  } else {
    for (int iter = 0; iter < options.max_iter; ++iter) {
      const Eigen::VectorXd g = grad_at(c, fam, theta);
      if (g.lpNorm<Eigen::Infinity>() <= options.grad_tol) {
        converged = true;
        break;
      }
      const Eigen::MatrixXd h = hess_at(c, fam, theta);
      Eigen::VectorXd delta = newton_direction(h, g, options.ridge);
      if (!delta.allFinite() || g.dot(delta) >= 0.0) delta = -g;

      double step = 1.0;
      bool accepted = false;
      for (int halving = 0; halving < 30; ++halving) {
        Eigen::VectorXd cand = (theta + step * delta).cwiseMax(-bound).cwiseMin(bound);
        if ((cand - theta).lpNorm<Eigen::Infinity>() == 0.0) break;
        const double cand_obj = nll_at(c, fam, cand);
        if (std::isfinite(cand_obj) && cand_obj < obj) {
          theta = std::move(cand);
          obj = cand_obj;
          out.objective_path.push_back(obj);
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;  // stalled at a box face or at the numerical floor
    }
    if (!converged) {
      converged = grad_at(c, fam, theta).lpNorm<Eigen::Infinity>() <= options.grad_tol;
    }
  }

  out.theta_hat = theta;
  out.iterations = static_cast<int>(out.objective_path.size()) - 1;
  out.converged = converged;
  out.boundary_hit = d > 0 && theta.cwiseAbs().maxCoeff() >= bound;
  out.avg_hessian = d > 0 ? hess_at(c, fam, theta) : Eigen::MatrixXd(0, 0);
  for (int j = 0; j < d; ++j)
    if (out.avg_hessian(j, j) < 1e-12) out.curvature_deficient = true;
  return out;
}

}  // namespace countgraph
