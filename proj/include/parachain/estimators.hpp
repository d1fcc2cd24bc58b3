#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "parachain/chain.hpp"
#include "parachain/errors.hpp"
#include "parachain/matrix.hpp"

namespace parachain {

// Estimators of the asymptotic covariance matrix Sigma of Monte Carlo
// averages, for one chain or m independent chains.
//
// Batching keeps the first a*b rows of each chain (a = floor(n / b)) and drops
// the tail. All reductions run in chain-index order, so results do not depend
// on how or whether callers parallelize over chains.

enum class Method { bm, abm, rbm, naive };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::bm: return "bm";
    case Method::abm: return "abm";
    case Method::rbm: return "rbm";
    case Method::naive: return "naive";
  }
  return "?";
}

inline std::optional<Method> parse_method(std::string_view s) {
  if (s == "bm") return Method::bm;
  if (s == "abm") return Method::abm;
  if (s == "rbm") return Method::rbm;
  if (s == "naive") return Method::naive;
  return std::nullopt;
}

// Batch size b plus lugsail parameters. r = 1 or c = 0 gives plain batch means.
struct BatchSpec {
  std::size_t b = 1;
  unsigned r = 1;
  double c = 0.0;

  std::size_t batch_count(std::size_t n) const { return b == 0 ? 0 : n / b; }
  std::size_t reduced_batch_size() const { return r == 0 ? 0 : b / r; }
  bool is_lugsail() const { return r > 1 && c != 0.0; }
};

struct CovarianceEstimate {
  Matrix matrix;
  Method method = Method::bm;
  std::size_t b = 0;  // 0 for the naive estimator, which does not batch
  unsigned r = 1;
  double c = 0.0;
  std::size_t n = 0;
  std::size_t m = 1;
};

inline void check_lugsail_params(unsigned r, double c) {
  if (r < 1) throw BadLugsailParams("lugsail: r must be >= 1");
  if (!(c >= 0.0 && c < 1.0)) throw BadLugsailParams("lugsail: c must lie in [0, 1)");
}

inline void check_batch_spec(const BatchSpec& spec, std::size_t n) {
  check_lugsail_params(spec.r, spec.c);
  if (spec.b < 1) throw TooFewBatches("batch size must be >= 1");
  if (spec.batch_count(n) < 2)
    throw TooFewBatches("batch size " + std::to_string(spec.b) + " leaves fewer than 2 batches of " +
                        std::to_string(n) + " iterations");
  if (spec.r > 1 && spec.reduced_batch_size() < 1)
    throw TooFewBatches("lugsail: floor(b / r) must be >= 1");
}

// Means of the a = floor(n / b) consecutive non-overlapping batches.
inline std::vector<Vector> batch_means(const ChainMatrix& c, std::size_t b) {
  if (b < 1 || c.n() / b < 2)
    throw TooFewBatches("batch_means: need at least 2 batches");
  const std::size_t a = c.n() / b;
  const std::size_t p = c.p();
  std::vector<Vector> out(a, Vector(p, 0.0));
  for (std::size_t l = 0; l < a; ++l) {
    Vector& mean = out[l];
    for (std::size_t t = l * b; t < (l + 1) * b; ++t) {
      const auto r = c.row(t);
      for (std::size_t j = 0; j < p; ++j) mean[j] += r[j];
    }
    for (double& v : mean) v /= static_cast<double>(b);
  }
  return out;
}

namespace detail {

// Mean of the batch means equals the mean of the retained a*b rows.
inline Vector mean_of(const std::vector<Vector>& xs) {
  Vector mu(xs.front().size(), 0.0);
  for (const auto& x : xs)
    for (std::size_t j = 0; j < mu.size(); ++j) mu[j] += x[j];
  for (double& v : mu) v /= static_cast<double>(xs.size());
  return mu;
}

// scale * sum_l (x_l - center)(x_l - center)^T
inline Matrix scatter(const std::vector<Vector>& xs, const Vector& center, double scale,
                      Matrix acc) {
  Vector d(center.size());
  for (const auto& x : xs) {
    for (std::size_t j = 0; j < d.size(); ++j) d[j] = x[j] - center[j];
    add_outer(acc, d, d, scale);
  }
  return acc;
}

inline Matrix bm_matrix(const ChainMatrix& c, std::size_t b) {
  const auto means = batch_means(c, b);
  const std::size_t a = means.size();
  const Vector mu = mean_of(means);
  return scatter(means, mu, static_cast<double>(b) / static_cast<double>(a - 1),
                 Matrix(c.p(), c.p()));
}

inline Matrix rbm_matrix(const ChainSet& cs, std::size_t b) {
  std::vector<Vector> pooled;
  for (const auto& c : cs) {
    auto means = batch_means(c, b);
    pooled.insert(pooled.end(), std::make_move_iterator(means.begin()),
                  std::make_move_iterator(means.end()));
  }
  const Vector mu = mean_of(pooled);
  const double am = static_cast<double>(pooled.size());
  return scatter(pooled, mu, static_cast<double>(b) / (am - 1.0), Matrix(cs.p(), cs.p()));
}

}  // namespace detail

// Single-chain batch means:  b/(a-1) sum_l (Ybar_l - mu_k)(Ybar_l - mu_k)^T,
// mu_k the mean of the retained rows.
inline CovarianceEstimate bm(const ChainMatrix& c, std::size_t b) {
  return {detail::bm_matrix(c, b), Method::bm, b, 1, 0.0, c.n(), 1};
}

// 1/(1-c) * est_b - c/(1-c) * est_br. The result may be indefinite; that is
// reported only by consumers that need a factorization.
inline CovarianceEstimate lugsail_combine(const CovarianceEstimate& est_b,
                                          const CovarianceEstimate& est_br, unsigned r,
                                          double c) {
  check_lugsail_params(r, c);
  CovarianceEstimate out = est_b;
  out.r = r;
  out.c = c;
  if (r == 1 || c == 0.0) return out;
  if (est_b.matrix.rows() != est_br.matrix.rows() || est_b.matrix.cols() != est_br.matrix.cols())
    throw DomainError("lugsail_combine: estimates differ in shape");
  if (est_b.method != est_br.method)
    throw DomainError("lugsail_combine: estimates come from different methods");
  out.matrix = est_b.matrix * (1.0 / (1.0 - c)) - est_br.matrix * (c / (1.0 - c));
  return out;
}

// Lugsail batch means for one chain.
inline CovarianceEstimate bm(const ChainMatrix& c, const BatchSpec& spec) {
  check_batch_spec(spec, c.n());
  const CovarianceEstimate full = bm(c, spec.b);
  if (!spec.is_lugsail()) return lugsail_combine(full, full, spec.r, spec.c);
  return lugsail_combine(full, bm(c, spec.reduced_batch_size()), spec.r, spec.c);
}

// Averaged batch means: (1/m) sum_k of the per-chain lugsail BM estimates.
inline CovarianceEstimate abm(const ChainSet& cs, const BatchSpec& spec) {
  check_batch_spec(spec, cs.n());
  Matrix sum(cs.p(), cs.p());
  for (const auto& c : cs) sum += bm(c, spec).matrix;
  sum *= 1.0 / static_cast<double>(cs.m());
  return {std::move(sum), Method::abm, spec.b, spec.r, spec.c, cs.n(), cs.m()};
}

// Replicated batch means. All a*m batch means are pooled and centered at the
// global mean of the retained rows:
//   b/(am-1) sum_k sum_l (Ybar_kl - mu)(Ybar_kl - mu)^T,
// then combined with the floor(b/r) version for the lugsail variant.
inline CovarianceEstimate rbm(const ChainSet& cs, const BatchSpec& spec) {
  check_batch_spec(spec, cs.n());
  const CovarianceEstimate full{detail::rbm_matrix(cs, spec.b), Method::rbm, spec.b, 1, 0.0,
                                cs.n(), cs.m()};
  if (!spec.is_lugsail()) return lugsail_combine(full, full, spec.r, spec.c);
  const std::size_t br = spec.reduced_batch_size();
  const CovarianceEstimate reduced{detail::rbm_matrix(cs, br), Method::rbm, br, 1, 0.0,
                                   cs.n(), cs.m()};
  return lugsail_combine(full, reduced, spec.r, spec.c);
}

// Naive between-chain estimator: n/(m-1) sum_k (mu_k - mu)(mu_k - mu)^T over the
// full chains. Inconsistent for fixed m (scaled Wishart limit with m-1 dof).
inline CovarianceEstimate naive(const ChainSet& cs) {
  if (cs.m() < 2) throw TooFewChains("naive: need at least 2 chains");
  std::vector<Vector> means;
  means.reserve(cs.m());
  for (const auto& c : cs) means.push_back(sample_mean(c));
  const Vector mu = detail::mean_of(means);
  const double scale = static_cast<double>(cs.n()) / static_cast<double>(cs.m() - 1);
  return {detail::scatter(means, mu, scale, Matrix(cs.p(), cs.p())), Method::naive, 0, 1, 0.0,
          cs.n(), cs.m()};
}

// Lag-s sample autocovariance with divisor n:
//   (1/n) sum_{t=1}^{n-s} (Y_t - Ybar)(Y_{t+s} - Ybar)^T.
inline Matrix autocovariance(const ChainMatrix& c, std::size_t s) {
  if (s >= c.n()) throw DomainError("autocovariance: lag must be < n");
  const std::size_t p = c.p();
  const Vector mu = sample_mean(c);
  Matrix out(p, p);
  Vector x(p), y(p);
  for (std::size_t t = 0; t + s < c.n(); ++t) {
    const auto r0 = c.row(t);
    const auto r1 = c.row(t + s);
    for (std::size_t j = 0; j < p; ++j) {
      x[j] = r0[j] - mu[j];
      y[j] = r1[j] - mu[j];
    }
    add_outer(out, x, y);
  }
  out *= 1.0 / static_cast<double>(c.n());
  return out;
}

enum class BatchMode { sqrt, cube_root };

namespace detail {

// floor(n^(1/k)) by integer correction of the floating-point root.
inline std::size_t integer_root(std::size_t n, unsigned k) {
  auto pow_k = [k](std::size_t x) {
    std::size_t v = 1;
    for (unsigned i = 0; i < k; ++i) v *= x;
    return v;
  };
  auto r = static_cast<std::size_t>(std::pow(static_cast<double>(n), 1.0 / k));
  while (r > 0 && pow_k(r) > n) --r;
  while (pow_k(r + 1) <= n) ++r;
  return r;
}

}  // namespace detail

// sqrt:      floor(sqrt(n))
// cube_root: max(1, floor(multiplier * floor(n^(1/3))))
// then clamped to n / 2 so that at least two batches remain.
inline std::size_t default_batch_size(std::size_t n, BatchMode mode, double multiplier = 1.0) {
  if (n < 4) throw DomainError("default_batch_size: need n >= 4");
  if (!(multiplier > 0.0)) throw DomainError("default_batch_size: multiplier must be > 0");
  std::size_t b = 0;
  if (mode == BatchMode::sqrt) {
    b = detail::integer_root(n, 2);
  } else {
    const double scaled = multiplier * static_cast<double>(detail::integer_root(n, 3));
    b = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(scaled)));
  }
  b = std::min(b, n / 2);
  if (n / b < 2) throw DomainError("default_batch_size: fewer than 2 batches");
  return b;
}

}  // namespace parachain
