#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "parachain/errors.hpp"
#include "parachain/matrix.hpp"

namespace parachain {

// One chain's output: n iterations by p components, row t = h(X_t).
class ChainMatrix {
 public:
  ChainMatrix(std::size_t n, std::size_t p, std::vector<double> values)
      : n_(n), p_(p), values_(std::move(values)) {
    if (n_ < 1 || p_ < 1) throw DegenerateInput("ChainMatrix: need n >= 1 and p >= 1");
    if (values_.size() != n_ * p_)
      throw DegenerateInput("ChainMatrix: value count does not match n * p");
    for (double v : values_)
      if (!std::isfinite(v)) throw DegenerateInput("ChainMatrix: non-finite entry");
  }

  // Rows given as a list of equal-length vectors.
  static ChainMatrix from_rows(const std::vector<Vector>& rows) {
    if (rows.empty()) throw DegenerateInput("ChainMatrix: no rows");
    const std::size_t p = rows.front().size();
    std::vector<double> v;
    v.reserve(rows.size() * p);
    for (const auto& r : rows) {
      if (r.size() != p) throw DegenerateInput("ChainMatrix: ragged rows");
      v.insert(v.end(), r.begin(), r.end());
    }
    return ChainMatrix(rows.size(), p, std::move(v));
  }

  // Univariate convenience.
  static ChainMatrix from_values(std::vector<double> xs) {
    const std::size_t n = xs.size();
    return ChainMatrix(n, 1, std::move(xs));
  }

  std::size_t n() const noexcept { return n_; }
  std::size_t p() const noexcept { return p_; }

  std::span<const double> row(std::size_t t) const { return {values_.data() + t * p_, p_}; }
  double operator()(std::size_t t, std::size_t j) const { return values_[t * p_ + j]; }
  const std::vector<double>& values() const noexcept { return values_; }

  // First `len` iterations.
  ChainMatrix prefix(std::size_t len) const {
    if (len < 1 || len > n_) throw DomainError("ChainMatrix::prefix: bad length");
    return ChainMatrix(len, p_,
                       std::vector<double>(values_.begin(),
                                           values_.begin() + static_cast<std::ptrdiff_t>(len * p_)));
  }

  friend bool operator==(const ChainMatrix&, const ChainMatrix&) = default;

 private:
  std::size_t n_;
  std::size_t p_;
  std::vector<double> values_;
};

// m equal-shaped chains from independent runs on the same target.
class ChainSet {
 public:
  explicit ChainSet(std::vector<ChainMatrix> chains) : chains_(std::move(chains)) {
    if (chains_.empty()) throw DegenerateInput("ChainSet: need at least one chain");
    for (const auto& c : chains_)
      if (c.n() != chains_.front().n() || c.p() != chains_.front().p())
        throw UnequalChainLengths("ChainSet: chains differ in shape");
  }

  std::size_t m() const noexcept { return chains_.size(); }
  std::size_t n() const noexcept { return chains_.front().n(); }
  std::size_t p() const noexcept { return chains_.front().p(); }

  const ChainMatrix& operator[](std::size_t k) const { return chains_[k]; }
  const std::vector<ChainMatrix>& chains() const noexcept { return chains_; }
  auto begin() const noexcept { return chains_.begin(); }
  auto end() const noexcept { return chains_.end(); }

  ChainSet prefix(std::size_t len) const {
    std::vector<ChainMatrix> out;
    out.reserve(chains_.size());
    for (const auto& c : chains_) out.push_back(c.prefix(len));
    return ChainSet(std::move(out));
  }

  friend bool operator==(const ChainSet&, const ChainSet&) = default;

 private:
  std::vector<ChainMatrix> chains_;
};

// Componentwise mean of rows [0, len).
inline Vector sample_mean(const ChainMatrix& c, std::size_t len) {
  Vector mu(c.p(), 0.0);
  for (std::size_t t = 0; t < len; ++t) {
    const auto r = c.row(t);
    for (std::size_t j = 0; j < c.p(); ++j) mu[j] += r[j];
  }
  for (double& v : mu) v /= static_cast<double>(len);
  return mu;
}

inline Vector sample_mean(const ChainMatrix& c) { return sample_mean(c, c.n()); }

// Unbiased (divisor n - 1) sample covariance.
inline Matrix sample_covariance(const ChainMatrix& c) {
  if (c.n() < 2) throw DegenerateInput("sample_covariance: need n >= 2");
  const Vector mu = sample_mean(c);
  Matrix s(c.p(), c.p());
  Vector d(c.p());
  for (std::size_t t = 0; t < c.n(); ++t) {
    const auto r = c.row(t);
    for (std::size_t j = 0; j < c.p(); ++j) d[j] = r[j] - mu[j];
    add_outer(s, d, d);
  }
  s *= 1.0 / static_cast<double>(c.n() - 1);
  return s;
}

}  // namespace parachain
