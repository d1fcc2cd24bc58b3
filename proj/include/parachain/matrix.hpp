#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "parachain/errors.hpp"

namespace parachain {

using Vector = std::vector<double>;

// Small dense row-major matrix. Sized for p up to a few dozen; no expression
// templates, no blocking.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  Matrix(std::initializer_list<std::initializer_list<double>> init)
      : rows_(init.size()), cols_(init.size() ? init.begin()->size() : 0) {
    data_.reserve(rows_ * cols_);
    for (const auto& row : init) {
      if (row.size() != cols_) throw DomainError("Matrix: ragged initializer");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static Matrix zero(std::size_t n) { return Matrix(n, n); }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix from_row_major(std::size_t rows, std::size_t cols,
                               std::vector<double> values) {
    if (values.size() != rows * cols)
      throw DomainError("Matrix: entry count does not match shape");
    Matrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.data_ = std::move(values);
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) {
    assert(i < rows_ && j < cols_);
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    assert(i < rows_ && j < cols_);
    return data_[i * cols_ + j];
  }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  const std::vector<double>& values() const noexcept { return data_; }

  Matrix& operator+=(const Matrix& o) {
    check_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    check_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  Matrix& operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, double s) { return a *= s; }
  friend Matrix operator*(double s, Matrix a) { return a *= s; }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw DomainError("Matrix: product shape mismatch");
    Matrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const double aik = a(i, k);
        for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
      }
    return out;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  double trace() const {
    double s = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) s += (*this)(i, i);
    return s;
  }

  // |M_ij - M_ji| <= 1e-12 (1 + |M_ij|) for all i, j.
  bool is_symmetric(double tol = 1e-12) const {
    if (!square()) return false;
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = i + 1; j < cols_; ++j) {
        const double a = (*this)(i, j);
        if (std::abs(a - (*this)(j, i)) > tol * (1.0 + std::abs(a))) return false;
      }
    return true;
  }

 private:
  void check_same_shape(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw DomainError("Matrix: shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Adds scale * x y^T into acc.
inline void add_outer(Matrix& acc, std::span<const double> x, std::span<const double> y,
                      double scale = 1.0) {
  assert(acc.rows() == x.size() && acc.cols() == y.size());
  // scale * (x_i y_j) keeps add_outer(acc, d, d) exactly symmetric.
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) acc(i, j) += scale * (x[i] * y[j]);
}

inline Vector mat_vec(const Matrix& a, std::span<const double> v) {
  if (a.cols() != v.size()) throw DomainError("mat_vec: shape mismatch");
  Vector out(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out[i] += a(i, j) * v[j];
  return out;
}

inline double frobenius_norm(const Matrix& m) {
  double s = 0.0;
  for (double v : m.values()) s += v * v;
  return std::sqrt(s);
}

// Lower-triangular L with L L^T = m. A pivot at or below
// 1e-12 * trace(m) / p is reported as NotPositiveDefinite.
inline Matrix cholesky(const Matrix& m) {
  if (!m.square()) throw DomainError("cholesky: matrix is not square");
  if (!m.is_symmetric()) throw DomainError("cholesky: matrix is not symmetric");
  const std::size_t p = m.rows();
  const double tol = 1e-12 * m.trace() / static_cast<double>(p);
  Matrix l(p, p);
  for (std::size_t j = 0; j < p; ++j) {
    double d = m(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > tol) || !(d > 0.0))
      throw NotPositiveDefinite("cholesky: pivot " + std::to_string(j) +
                                " is not positive (" + std::to_string(d) + ")");
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < p; ++i) {
      double s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return l;
}

// log det(m) from an existing Cholesky factor.
inline double log_det_from_cholesky(const Matrix& l) {
  double s = 0.0;
  for (std::size_t i = 0; i < l.rows(); ++i) s += std::log(l(i, i));
  return 2.0 * s;
}

// Solves L y = v for lower-triangular L.
inline Vector forward_substitute(const Matrix& l, std::span<const double> v) {
  const std::size_t p = l.rows();
  if (v.size() != p) throw DomainError("forward_substitute: shape mismatch");
  Vector y(p);
  for (std::size_t i = 0; i < p; ++i) {
    double s = v[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
    y[i] = s / l(i, i);
  }
  return y;
}

// Solves L^T x = y for lower-triangular L.
inline Vector back_substitute_transposed(const Matrix& l, std::span<const double> y) {
  const std::size_t p = l.rows();
  if (y.size() != p) throw DomainError("back_substitute_transposed: shape mismatch");
  Vector x(p);
  for (std::size_t ii = p; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t k = ii + 1; k < p; ++k) s -= l(k, ii) * x[k];
    x[ii] = s / l(ii, ii);
  }
  return x;
}

// v^T m^{-1} v via m = L L^T and two triangular solves.
inline double quad_form_inv(const Matrix& m, std::span<const double> v) {
  const Matrix l = cholesky(m);
  const Vector x = back_substitute_transposed(l, forward_substitute(l, v));
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * x[i];
  return std::max(s, 0.0);
}

}  // namespace parachain
