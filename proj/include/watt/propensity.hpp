#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <vector>

#include "watt/error.hpp"
#include "watt/types.hpp"

// Logistic propensity model e(x; beta) fit by Newton-Raphson on the Bernoulli
// log-likelihood (equivalently IRLS), with step-halving so accepted steps never
// decrease the log-likelihood. Separation is not an error: the fit is returned
// with converged=false and fitted probabilities clamped, so downstream weights
// stay finite.

namespace watt {

// Fitted probabilities are clamped into [kProbClamp, 1-kProbClamp].
inline constexpr double kProbClamp = 1e-12;

struct FitOptions {
  int max_iter = 100;
  double tol = 1e-8;   // convergence on max-norm of the score
};

struct PropensityFit {
  std::vector<double> beta;     // length p+1, intercept first
  std::vector<double> fitted;   // length n, clamped into (0,1)
  double loglik = 0.0;
  int iterations = 0;
  bool converged = false;
  double grad_norm = 0.0;
};

namespace detail {

inline double clamp_prob(double e) {
  if (e < kProbClamp) return kProbClamp;
  if (e > 1.0 - kProbClamp) return 1.0 - kProbClamp;
  return e;
}

inline double inv_logit(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double u = std::exp(t);
  return u / (1.0 + u);
}

// log P(z | eta) summed; stable in both tails.
inline double bernoulli_loglik(const Eigen::VectorXd& eta, const std::vector<int>& z) {
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    const double t = eta[i];
    // log(1 + exp(t)) without overflow
    const double log1pexp = (t > 0.0) ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
    ll += z[static_cast<std::size_t>(i)] * t - log1pexp;
  }
  return ll;
}

inline Eigen::MatrixXd design_with_intercept(const Matrix& X) {
  const auto n = static_cast<Eigen::Index>(X.rows());
  const auto p = static_cast<Eigen::Index>(X.cols());
  Eigen::MatrixXd D(n, p + 1);
  D.col(0).setOnes();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < p; ++j)
      D(i, j + 1) = X(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  return D;
}

}  // namespace detail

inline PropensityFit fit_logistic(const Dataset& data, FitOptions opts = {}) {
  const Eigen::MatrixXd D = detail::design_with_intercept(data.X);
  const auto n = D.rows();
  const auto q = D.cols();  // p+1

  {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(D);
    if (qr.rank() < q)
      throw Error(errc::rank_deficient, "design matrix [1, X] is rank deficient");
  }

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(q);
  Eigen::VectorXd eta = Eigen::VectorXd::Zero(n);
  double ll = detail::bernoulli_loglik(eta, data.z);

  PropensityFit fit;
  fit.iterations = 0;
  fit.converged = false;

  Eigen::VectorXd e(n), w(n), grad(q);
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    for (Eigen::Index i = 0; i < n; ++i) e[i] = detail::clamp_prob(detail::inv_logit(eta[i]));
    Eigen::VectorXd resid(n);
    for (Eigen::Index i = 0; i < n; ++i)
      resid[i] = static_cast<double>(data.z[static_cast<std::size_t>(i)]) - e[i];
    grad = D.transpose() * resid;
    const double gnorm = grad.lpNorm<Eigen::Infinity>();
    if (gnorm <= opts.tol) {
      fit.converged = true;
      break;
    }

    for (Eigen::Index i = 0; i < n; ++i) w[i] = e[i] * (1.0 - e[i]);
    const Eigen::MatrixXd H = D.transpose() * w.asDiagonal() * D;
    Eigen::VectorXd delta = H.ldlt().solve(grad);
    if (!delta.allFinite()) break;  // weighted system degenerate; keep last beta

    // step-halving: accept the first step that does not decrease the log-likelihood
    double step = 1.0;
    bool accepted = false;
    for (int h = 0; h <= 30; ++h) {
      const Eigen::VectorXd cand = beta + step * delta;
      const Eigen::VectorXd eta_cand = D * cand;
      const double ll_cand = detail::bernoulli_loglik(eta_cand, data.z);
      if (std::isfinite(ll_cand) && ll_cand >= ll) {
        beta = cand;
        eta = eta_cand;
        ll = ll_cand;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    ++fit.iterations;
  }

  fit.beta.assign(beta.data(), beta.data() + q);
  fit.fitted.resize(static_cast<std::size_t>(n));
  Eigen::VectorXd resid(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double ei = detail::clamp_prob(detail::inv_logit(eta[i]));
    fit.fitted[static_cast<std::size_t>(i)] = ei;
    resid[i] = static_cast<double>(data.z[static_cast<std::size_t>(i)]) - ei;
  }
  fit.grad_norm = (D.transpose() * resid).lpNorm<Eigen::Infinity>();
  fit.loglik = ll;
  if (fit.grad_norm <= opts.tol) fit.converged = true;
  return fit;
}

inline std::vector<double> predict(const PropensityFit& fit, const Matrix& X_new) {
  if (X_new.cols() + 1 != fit.beta.size())
    throw Error(errc::dimension_mismatch, "X_new column count does not match fit");
  std::vector<double> out(X_new.rows());
  for (std::size_t i = 0; i < X_new.rows(); ++i) {
    double t = fit.beta[0];
    for (std::size_t j = 0; j < X_new.cols(); ++j) t += fit.beta[j + 1] * X_new(i, j);
    out[i] = detail::clamp_prob(detail::inv_logit(t));
  }
  return out;
}

}  // namespace watt
