#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>

#include "parachain/chain.hpp"
#include "parachain/distributions.hpp"
#include "parachain/errors.hpp"
#include "parachain/estimators.hpp"
#include "parachain/matrix.hpp"

namespace parachain {

// How the target covariance Lambda is estimated from m chains.
enum class LambdaCentering {
  per_chain,  // average of per-chain sample covariances (default)
  global,     // one sample covariance of all m*n rows about the global mean
};

inline Matrix target_covariance(const ChainSet& cs,
                                LambdaCentering centering = LambdaCentering::per_chain) {
  const std::size_t p = cs.p();
  if (cs.n() < 2) throw DegenerateInput("target_covariance: need n >= 2");
  Matrix out(p, p);
  if (centering == LambdaCentering::per_chain) {
    for (const auto& c : cs) out += sample_covariance(c);
    out *= 1.0 / static_cast<double>(cs.m());
    return out;
  }
  Vector mu(p, 0.0);
  for (const auto& c : cs) {
    const Vector mk = sample_mean(c);
    for (std::size_t j = 0; j < p; ++j) mu[j] += mk[j];
  }
  for (double& v : mu) v /= static_cast<double>(cs.m());
  Vector d(p);
  for (const auto& c : cs)
    for (std::size_t t = 0; t < c.n(); ++t) {
      const auto r = c.row(t);
      for (std::size_t j = 0; j < p; ++j) d[j] = r[j] - mu[j];
      add_outer(out, d, d);
    }
  out *= 1.0 / static_cast<double>(cs.m() * cs.n() - 1);
  return out;
}

struct EssReport {
  double ess = 0.0;
  double per_sample = 0.0;  // ess / (m n)
  double lambda_det = 0.0;
  double sigma_det = 0.0;
  Method method = Method::rbm;
};

// ESS = m n (det Lambda / det Sigma)^(1/p) from an explicit Lambda.
inline EssReport ess_from(const Matrix& lambda, const CovarianceEstimate& sigma_hat,
                          std::size_t m, std::size_t n) {
  const std::size_t p = lambda.rows();
  if (sigma_hat.matrix.rows() != p) throw DomainError("ess: dimension mismatch");
  Matrix l_lambda;
  try {
    l_lambda = cholesky(lambda);
  } catch (const NotPositiveDefinite&) {
    throw DegenerateInput("ess: sample covariance is singular");
  }
  const Matrix l_sigma = cholesky(sigma_hat.matrix);
  const double log_lambda = log_det_from_cholesky(l_lambda);
  const double log_sigma = log_det_from_cholesky(l_sigma);
  const double mn = static_cast<double>(m) * static_cast<double>(n);
  EssReport rep;
  rep.per_sample = std::exp((log_lambda - log_sigma) / static_cast<double>(p));
  rep.ess = mn * rep.per_sample;
  rep.lambda_det = std::exp(log_lambda);
  rep.sigma_det = std::exp(log_sigma);
  rep.method = sigma_hat.method;
  return rep;
}

// Multivariate effective sample size for the chains behind sigma_hat.
inline EssReport ess(const ChainSet& cs, const CovarianceEstimate& sigma_hat,
                     LambdaCentering centering = LambdaCentering::per_chain) {
  return ess_from(target_covariance(cs, centering), sigma_hat, cs.m(), cs.n());
}

// Stop once the estimated ESS strictly exceeds threshold_m.
inline bool termination_check(const EssReport& report, double threshold_m) {
  if (!(threshold_m > 0.0)) throw DomainError("termination_check: threshold must be > 0");
  return report.ess > threshold_m;
}

struct RegionTest {
  double level = 0.95;
  double statistic = 0.0;
  double threshold = 0.0;
  bool contains = false;
};

using QuantileFn = std::function<double(unsigned dof, double level)>;

// Large-sample confidence ellipsoid for the mean:
//   { mu0 : m n (mu_hat - mu0)^T Sigma_hat^{-1} (mu_hat - mu0) <= q_p(level) },
// q_p the chi-squared quantile unless another calibration is supplied.
inline RegionTest confidence_region_test(std::span<const double> mu_hat, const Matrix& sigma_hat,
                                         std::span<const double> mu0, double level,
                                         std::size_t m, std::size_t n,
                                         const QuantileFn& quantile = chisq_quantile) {
  if (mu_hat.size() != mu0.size() || sigma_hat.rows() != mu0.size())
    throw DomainError("confidence_region_test: dimension mismatch");
  Vector d(mu0.size());
  for (std::size_t j = 0; j < d.size(); ++j) d[j] = mu_hat[j] - mu0[j];
  RegionTest t;
  t.level = level;
  t.statistic = static_cast<double>(m) * static_cast<double>(n) * quad_form_inv(sigma_hat, d);
  t.threshold = quantile(static_cast<unsigned>(mu0.size()), level);
  t.contains = t.statistic <= t.threshold;
  return t;
}

inline RegionTest confidence_region_test(std::span<const double> mu_hat,
                                         const CovarianceEstimate& sigma_hat,
                                         std::span<const double> mu0, double level,
                                         std::size_t m, std::size_t n,
                                         const QuantileFn& quantile = chisq_quantile) {
  return confidence_region_test(mu_hat, sigma_hat.matrix, mu0, level, m, n, quantile);
}

// Grand mean over all chains, each chain weighted equally.
inline Vector pooled_mean(const ChainSet& cs) {
  Vector mu(cs.p(), 0.0);
  for (const auto& c : cs) {
    const Vector mk = sample_mean(c);
    for (std::size_t j = 0; j < mu.size(); ++j) mu[j] += mk[j];
  }
  for (double& v : mu) v /= static_cast<double>(cs.m());
  return mu;
}

}  // namespace parachain
