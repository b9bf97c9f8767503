#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "wsos/errors.hpp"
#include "wsos/rational.hpp"

namespace wsos {

/// Dense row-major matrix.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, const T& fill = T())
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n, T(0));
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw UsageError("matrix product dimension mismatch");
    Matrix c(a.rows_, b.cols_, T(0));
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const T& aik = a(i, k);
        if (aik == T(0)) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<T> data_;
};

/// Symmetric matrix with a single packed copy of the upper triangle; (i, j)
/// and (j, i) address the same storage.
template <class T>
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t n, const T& fill = T()) : n_(n), data_(n * (n + 1) / 2, fill) {}

  static SymMatrix identity(std::size_t n) {
    SymMatrix m(n, T(0));
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  std::size_t n() const { return n_; }
  T& operator()(std::size_t i, std::size_t j) { return data_[offset(i, j)]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[offset(i, j)]; }
  const std::vector<T>& packed() const { return data_; }

  friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

  SymMatrix& operator+=(const SymMatrix& o) {
    if (o.n_ != n_) throw UsageError("symmetric matrix size mismatch");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }

  Matrix<T> dense() const {
    Matrix<T> m(n_, n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) m(i, j) = (*this)(i, j);
    return m;
  }

 private:
  std::size_t offset(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    return i * n_ - (i * (i + 1)) / 2 + j;
  }

  std::size_t n_ = 0;
  std::vector<T> data_;
};

inline SymMatrix<double> to_double(const SymMatrix<Rational>& a) {
  SymMatrix<double> r(a.n());
  for (std::size_t i = 0; i < a.n(); ++i)
    for (std::size_t j = i; j < a.n(); ++j) r(i, j) = a(i, j).get_d();
  return r;
}

/// Symmetric matrix from a dense one, reading the upper triangle.
template <class T>
SymMatrix<T> symmetric_from_upper(const Matrix<T>& m) {
  if (m.rows() != m.cols()) throw UsageError("symmetric_from_upper needs a square matrix");
  SymMatrix<T> s(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i; j < m.cols(); ++j) s(i, j) = m(i, j);
  return s;
}

/// Frobenius norm of a symmetric matrix (off-diagonal entries counted twice).
inline double frobenius_norm(const SymMatrix<double>& a) {
  double s = 0;
  for (std::size_t i = 0; i < a.n(); ++i)
    for (std::size_t j = i; j < a.n(); ++j) s += (i == j ? 1.0 : 2.0) * a(i, j) * a(i, j);
  return std::sqrt(s);
}

template <class T>
T quadratic(const SymMatrix<T>& a, const std::vector<T>& x) {
  if (x.size() != a.n()) throw UsageError("vector length does not match matrix");
  T s(0);
  for (std::size_t i = 0; i < a.n(); ++i) {
    if (x[i] == T(0)) continue;
    T row(0);
    for (std::size_t j = 0; j < a.n(); ++j) row += a(i, j) * x[j];
    s += x[i] * row;
  }
  return s;
}

/// Sorted 1-based row/column selection of a principal submatrix.
class PsmIndex {
 public:
  PsmIndex() = default;
  explicit PsmIndex(std::vector<std::size_t> rows) : rows_(std::move(rows)) {
    for (std::size_t k = 0; k < rows_.size(); ++k) {
      if (rows_[k] == 0) throw UsageError("PSM indices are 1-based");
      if (k > 0 && rows_[k] <= rows_[k - 1]) throw UsageError("PSM indices must be strictly increasing");
    }
  }
  PsmIndex(std::initializer_list<std::size_t> rows) : PsmIndex(std::vector<std::size_t>(rows)) {}

  static PsmIndex all(std::size_t n) {
    std::vector<std::size_t> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = i + 1;
    return PsmIndex(std::move(r));
  }

  std::size_t size() const { return rows_.size(); }
  const std::vector<std::size_t>& rows() const { return rows_; }
  std::size_t operator[](std::size_t k) const { return rows_[k]; }

  std::string to_string() const {
    std::string s = "{";
    for (std::size_t k = 0; k < rows_.size(); ++k) s += (k ? "," : "") + std::to_string(rows_[k]);
    return s + "}";
  }

  friend bool operator==(const PsmIndex&, const PsmIndex&) = default;

 private:
  std::vector<std::size_t> rows_;
};

/// Index composition: selecting `inner` (positions into outer) from psm(a, outer).
inline PsmIndex compose(const PsmIndex& outer, const PsmIndex& inner) {
  std::vector<std::size_t> r;
  for (auto k : inner.rows()) {
    if (k > outer.size()) throw UsageError("inner PSM index out of range");
    r.push_back(outer[k - 1]);
  }
  return PsmIndex(std::move(r));
}

template <class T>
SymMatrix<T> psm(const SymMatrix<T>& a, const PsmIndex& idx) {
  for (auto r : idx.rows())
    if (r > a.n()) throw UsageError("PSM index " + std::to_string(r) + " out of range for n=" + std::to_string(a.n()));
  SymMatrix<T> s(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = i; j < idx.size(); ++j) s(i, j) = a(idx[i] - 1, idx[j] - 1);
  return s;
}

}  // namespace wsos
