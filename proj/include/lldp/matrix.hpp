#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lldp/errors.hpp"

namespace lldp {

using Vector = std::vector<double>;

/// Row-major dense real matrix. This is the only linear-algebra carrier in
/// the library: Jacobians, augmented matrices and their exponentials.
class DenseMatrix {
 public:
  DenseMatrix(std::size_t rows, std::size_t cols) : DenseMatrix(rows, cols, Vector(rows * cols, 0.0)) {}

  DenseMatrix(std::size_t rows, std::size_t cols, Vector entries)
      : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (rows_ == 0 || cols_ == 0) {
      throw usage_error("DenseMatrix: rows and cols must be positive");
    }
    if (entries_.size() != rows_ * cols_) {
      throw usage_error("DenseMatrix: entry count " + std::to_string(entries_.size()) + " does not match " +
                        std::to_string(rows_) + "x" + std::to_string(cols_));
    }
  }

  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows) : rows_(rows.size()), cols_(0) {
    if (rows_ == 0) throw usage_error("DenseMatrix: empty initializer");
    cols_ = rows.begin()->size();
    if (cols_ == 0) throw usage_error("DenseMatrix: empty row");
    entries_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw usage_error("DenseMatrix: ragged initializer");
      entries_.insert(entries_.end(), r.begin(), r.end());
    }
  }

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static DenseMatrix diagonal(std::span<const double> diag) {
    DenseMatrix m(diag.size(), diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) noexcept { return entries_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return entries_[i * cols_ + j]; }

  std::span<double> entries() noexcept { return entries_; }
  std::span<const double> entries() const noexcept { return entries_; }

  bool all_finite() const noexcept {
    return std::all_of(entries_.begin(), entries_.end(), [](double v) { return std::isfinite(v); });
  }

  DenseMatrix& operator*=(double s) noexcept {
    for (auto& v : entries_) v *= s;
    return *this;
  }

  DenseMatrix& operator+=(const DenseMatrix& other) {
    require_same_shape(other, "operator+=");
    for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] += other.entries_[k];
    return *this;
  }

  DenseMatrix& operator-=(const DenseMatrix& other) {
    require_same_shape(other, "operator-=");
    for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] -= other.entries_[k];
    return *this;
  }

  friend DenseMatrix operator*(DenseMatrix m, double s) noexcept { return m *= s; }
  friend DenseMatrix operator*(double s, DenseMatrix m) noexcept { return m *= s; }
  friend DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
  friend DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) { return a -= b; }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  void require_same_shape(const DenseMatrix& other, const char* op) const {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
      throw usage_error(std::string("DenseMatrix::") + op + ": shape mismatch");
    }
  }

  std::size_t rows_;
  std::size_t cols_;
  Vector entries_;
};

inline DenseMatrix mat_mul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw usage_error("mat_mul: inner dimensions differ (" + std::to_string(a.cols()) + " vs " +
                      std::to_string(b.rows()) + ")");
  }
  DenseMatrix c(a.rows(), b.cols());
  // i-k-j order keeps the inner loop contiguous in both b and c.
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

inline Vector mat_vec(const DenseMatrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw usage_error("mat_vec: dimension mismatch");
  Vector y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

/// Maximum absolute row sum.
inline double inf_norm(const DenseMatrix& a) noexcept {
  double best = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += std::abs(a(i, j));
    best = std::max(best, s);
  }
  return best;
}

inline double inf_norm(std::span<const double> v) noexcept {
  double best = 0.0;
  for (double x : v) best = std::max(best, std::abs(x));
  return best;
}

/// Solves a·X = b by LU with partial pivoting. Throws computation_error when a
/// pivot is zero, non-finite, or negligible relative to inf_norm(a).
inline DenseMatrix lu_solve(DenseMatrix a, DenseMatrix b) {
  if (!a.is_square()) throw usage_error("lu_solve: matrix is not square");
  if (a.rows() != b.rows()) throw usage_error("lu_solve: right-hand side has wrong row count");

  const std::size_t n = a.rows();
  const std::size_t m = b.cols();
  const double scale = inf_norm(a);
  if (!std::isfinite(scale)) throw computation_error("lu_solve: non-finite matrix");
  const double tiny = scale * static_cast<double>(n) * std::numeric_limits<double>::epsilon();

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(a(i, k)) > best) {
        best = std::abs(a(i, k));
        piv = i;
      }
    }
    if (!(best > tiny)) throw computation_error("lu_solve: singular or badly scaled matrix");
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      for (std::size_t j = 0; j < m; ++j) std::swap(b(k, j), b(piv, j));
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double l = a(i, k) / a(k, k);
      if (l == 0.0) continue;
      a(i, k) = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= l * a(k, j);
      for (std::size_t j = 0; j < m; ++j) b(i, j) -= l * b(k, j);
    }
  }
  for (std::size_t kk = n; kk-- > 0;) {
    for (std::size_t j = 0; j < m; ++j) {
      double s = b(kk, j);
      for (std::size_t i = kk + 1; i < n; ++i) s -= a(kk, i) * b(i, j);
      b(kk, j) = s / a(kk, kk);
    }
  }
  if (!b.all_finite()) throw computation_error("lu_solve: non-finite solution");
  return b;
}

}  // namespace lldp
