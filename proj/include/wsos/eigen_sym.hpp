#pragma once

// Cyclic Jacobi eigensolver for dense real symmetric matrices, plus a
// Hermitian front end through the real embedding [[Re, -Im], [Im, Re]].

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>
#include <vector>

#include "wsos/errors.hpp"
#include "wsos/matrix.hpp"

namespace wsos {

struct EigResult {
  std::vector<double> values;  // ascending
  Matrix<double> vectors;      // column k pairs with values[k]
};

inline EigResult eig_sym(const SymMatrix<double>& a, double tol = 1e-13, int max_sweeps = 100) {
  const std::size_t n = a.n();
  Matrix<double> m = a.dense();
  for (double x : a.packed())
    if (!std::isfinite(x)) throw NumericError("eig_sym: non-finite matrix entry");
  Matrix<double> q = Matrix<double>::identity(n);

  const double norm = frobenius_norm(a);
  auto off_norm = [&] {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * m(i, j) * m(i, j);
    return std::sqrt(s);
  };

  int sweep = 0;
  double off = off_norm();
  while (off > tol * norm) {
    if (sweep++ >= max_sweeps)
      throw NumericError("eig_sym: no convergence after " + std::to_string(max_sweeps) +
                         " sweeps (off-diagonal norm " + std::to_string(off) + ", |A|_F " +
                         std::to_string(norm) + ")");
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t r = p + 1; r < n; ++r) {
        const double apr = m(p, r);
        if (apr == 0.0) continue;
        // Rotation zeroing (p, r): t = tan(theta), smaller root for stability.
        const double theta = (m(r, r) - m(p, p)) / (2.0 * apr);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double mkp = m(k, p), mkr = m(k, r);
          m(k, p) = c * mkp - s * mkr;
          m(k, r) = s * mkp + c * mkr;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double mpk = m(p, k), mrk = m(r, k);
          m(p, k) = c * mpk - s * mrk;
          m(r, k) = s * mpk + c * mrk;
        }
        m(p, r) = m(r, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double qkp = q(k, p), qkr = q(k, r);
          q(k, p) = c * qkp - s * qkr;
          q(k, r) = s * qkp + c * qkr;
        }
      }
    }
    off = off_norm();
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto x, auto y) { return m(x, x) < m(y, y); });
  EigResult out{std::vector<double>(n), Matrix<double>(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = m(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = q(i, order[k]);
  }
  return out;
}

/// eig_sym after rotating into an orthogonal basis q0 (columns) that nearly
/// diagonalizes a, e.g. the eigenvectors of a nearby matrix.
inline EigResult eig_sym_warm(const SymMatrix<double>& a, const Matrix<double>& q0, double tol = 1e-13) {
  const std::size_t n = a.n();
  if (q0.rows() != n || q0.cols() != n) return eig_sym(a, tol);
  Matrix<double> aq(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) aq(i, j) += aik * q0(k, j);
    }
  SymMatrix<double> b(n, 0.0);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i) {
      const double qki = q0(k, i);
      for (std::size_t j = i; j < n; ++j) b(i, j) += qki * aq(k, j);
    }
  EigResult e = eig_sym(b, tol);
  Matrix<double> v(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const double qik = q0(i, k);
      for (std::size_t j = 0; j < n; ++j) v(i, j) += qik * e.vectors(k, j);
    }
  e.vectors = std::move(v);
  return e;
}

using CMatrix = Matrix<std::complex<double>>;
using CVector = std::vector<std::complex<double>>;

struct HermitianEig {
  std::vector<double> values;  // ascending, each eigenvalue once (with multiplicity)
  std::vector<CVector> vectors;
};

inline HermitianEig eig_hermitian(const CMatrix& h, double tol = 1e-13) {
  const std::size_t n = h.rows();
  if (h.cols() != n) throw UsageError("eig_hermitian needs a square matrix");
  SymMatrix<double> emb(2 * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const auto z = 0.5 * (h(i, j) + std::conj(h(j, i)));
      emb(i, j) = z.real();
      emb(n + i, n + j) = z.real();
      emb(i, n + j) = -z.imag();
      emb(j, n + i) = z.imag();
    }
  const EigResult e = eig_sym(emb, tol);
  HermitianEig out;
  // Each eigenvalue appears twice; keep columns that add a new complex direction.
  for (std::size_t k = 0; k < 2 * n && out.values.size() < n; ++k) {
    CVector v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = {e.vectors(i, k), e.vectors(n + i, k)};
    for (const auto& u : out.vectors) {
      std::complex<double> dot = 0;
      for (std::size_t i = 0; i < n; ++i) dot += std::conj(u[i]) * v[i];
      for (std::size_t i = 0; i < n; ++i) v[i] -= dot * u[i];
    }
    double nrm = 0;
    for (const auto& x : v) nrm += std::norm(x);
    nrm = std::sqrt(nrm);
    if (nrm < 0.5) continue;
    for (auto& x : v) x /= nrm;
    out.values.push_back(e.values[k]);
    out.vectors.push_back(std::move(v));
  }
  return out;
}

inline double lambda_min(const SymMatrix<double>& a) { return eig_sym(a).values.front(); }

}  // namespace wsos
