#pragma once

// Exact rational linear algebra: PSD decisions with witnesses, affine solves,
// characteristic polynomials and Sturm-sequence root brackets.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "wsos/errors.hpp"
#include "wsos/matrix.hpp"
#include "wsos/rational.hpp"

namespace wsos {

struct LdlFactor {
  std::vector<std::size_t> order;  // pivot rows, in elimination order
  std::vector<Rational> pivots;    // D entries for `order`
  std::vector<std::vector<Rational>> columns;  // L columns: A = sum_k pivots[k] columns[k] columns[k]^T when PSD
  std::size_t rank = 0;
};

struct PsdVerdict {
  bool psd = false;
  LdlFactor ldl;                   // the (partial) factorization that produced the verdict
  std::vector<Rational> witness;   // NotPSD only: x with x^T A x < 0
  Rational witness_value;          // x^T A x
};

/// Symmetric-pivoted LDL^T over Q. PSD iff every pivot is non-negative and
/// every row left with a zero pivot has a zero remainder.
inline PsdVerdict psd_exact(const SymMatrix<Rational>& a) {
  const std::size_t n = a.n();
  SymMatrix<Rational> s = a;  // Schur complement on the active rows
  std::vector<bool> active(n, true);
  // mult[r][k]: elimination multiplier of row r against the k-th pivot.
  std::vector<std::vector<Rational>> mult(n);
  PsdVerdict out;

  auto lift = [&](const std::vector<Rational>& y) {
    // x_R = y on active rows; pivots solved by back substitution through L^T.
    std::vector<Rational> x(n);
    for (std::size_t r = 0; r < n; ++r)
      if (active[r]) x[r] = y[r];
    for (std::size_t kk = out.ldl.order.size(); kk-- > 0;) {
      const std::size_t p = out.ldl.order[kk];
      Rational acc(0);
      for (std::size_t r = 0; r < n; ++r) {
        if (r == p || x[r] == 0) continue;
        if (mult[r].size() > kk) acc += mult[r][kk] * x[r];
      }
      x[p] = -acc;
    }
    return x;
  };

  auto fail = [&](std::vector<Rational> y) {
    out.psd = false;
    out.witness = lift(y);
    out.witness_value = quadratic(a, out.witness);
    return out;
  };

  for (std::size_t step = 0; step < n; ++step) {
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      if (s(i, i) < 0) {
        std::vector<Rational> y(n);
        y[i] = 1;
        return fail(std::move(y));
      }
      if (best == n || s(i, i) > s(best, best)) best = i;
    }
    if (best == n) break;
    if (s(best, best) == 0) {
      // All remaining diagonals vanish: PSD iff the remainder is zero.
      for (std::size_t i = 0; i < n; ++i) {
        if (!active[i]) continue;
        for (std::size_t j = i + 1; j < n; ++j) {
          if (!active[j] || s(i, j) == 0) continue;
          std::vector<Rational> y(n);
          y[i] = 1;
          y[j] = -s(i, j);
          return fail(std::move(y));
        }
      }
      break;
    }
    const std::size_t p = best;
    const Rational piv = s(p, p);
    const std::size_t k = out.ldl.order.size();
    out.ldl.order.push_back(p);
    out.ldl.pivots.push_back(piv);
    active[p] = false;
    std::vector<Rational> col(n);
    col[p] = 1;
    for (std::size_t r = 0; r < n; ++r) {
      if (!active[r]) continue;
      mult[r].resize(k + 1);
      mult[r][k] = s(r, p) / piv;
      col[r] = mult[r][k];
    }
    out.ldl.columns.push_back(std::move(col));
    for (std::size_t r = 0; r < n; ++r) {
      if (!active[r] || mult[r][k] == 0) continue;
      for (std::size_t c = r; c < n; ++c) {
        if (!active[c]) continue;
        s(r, c) -= mult[r][k] * s(p, c);
      }
    }
  }
  out.ldl.rank = out.ldl.order.size();
  out.psd = true;
  return out;
}

struct AffineSolution {
  std::vector<Rational> particular;
  std::vector<std::vector<Rational>> nullspace;
};

/// Reduced row echelon form in place; returns pivot columns.
inline std::vector<std::size_t> rref(Matrix<Rational>& m) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
    std::size_t sel = m.rows();
    for (std::size_t r = row; r < m.rows(); ++r)
      if (m(r, col) != 0) {
        sel = r;
        break;
      }
    if (sel == m.rows()) continue;
    if (sel != row)
      for (std::size_t c = 0; c < m.cols(); ++c) std::swap(m(sel, c), m(row, c));
    const Rational inv = 1 / m(row, col);
    for (std::size_t c = col; c < m.cols(); ++c) m(row, c) *= inv;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (r == row || m(r, col) == 0) continue;
      const Rational f = m(r, col);
      for (std::size_t c = col; c < m.cols(); ++c)
        if (m(row, c) != 0) m(r, c) -= f * m(row, c);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

/// All solutions of A x = b as particular + span(nullspace); nullopt when inconsistent.
inline std::optional<AffineSolution> solve_affine(const Matrix<Rational>& a, const std::vector<Rational>& b) {
  if (b.size() != a.rows()) throw UsageError("solve_affine: right-hand side length mismatch");
  const std::size_t nv = a.cols();
  Matrix<Rational> aug(a.rows(), nv + 1);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < nv; ++c) aug(r, c) = a(r, c);
    aug(r, nv) = b[r];
  }
  auto pivots = rref(aug);
  if (!pivots.empty() && pivots.back() == nv) return std::nullopt;
  AffineSolution sol;
  sol.particular.assign(nv, Rational(0));
  std::vector<bool> is_pivot(nv, false);
  for (std::size_t k = 0; k < pivots.size(); ++k) {
    is_pivot[pivots[k]] = true;
    sol.particular[pivots[k]] = aug(k, nv);
  }
  for (std::size_t f = 0; f < nv; ++f) {
    if (is_pivot[f]) continue;
    std::vector<Rational> v(nv);
    v[f] = 1;
    for (std::size_t k = 0; k < pivots.size(); ++k) v[pivots[k]] = -aug(k, f);
    sol.nullspace.push_back(std::move(v));
  }
  return sol;
}

inline std::vector<std::vector<Rational>> nullspace(const Matrix<Rational>& a) {
  return solve_affine(a, std::vector<Rational>(a.rows()))->nullspace;
}

/// Solves a square non-singular system exactly.
inline std::vector<Rational> solve_square(const Matrix<Rational>& a, const std::vector<Rational>& b) {
  auto sol = solve_affine(a, b);
  if (!sol || !sol->nullspace.empty()) throw NumericError("solve_square: singular system");
  return sol->particular;
}

// Univariate polynomials over Q as coefficient vectors, lowest degree first.
using UPoly = std::vector<Rational>;

inline void upoly_trim(UPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

inline Rational upoly_eval(const UPoly& p, const Rational& x) {
  Rational r(0);
  for (std::size_t k = p.size(); k-- > 0;) r = r * x + p[k];
  return r;
}

inline UPoly upoly_derivative(const UPoly& p) {
  UPoly d;
  for (std::size_t k = 1; k < p.size(); ++k) d.push_back(p[k] * static_cast<long>(k));
  upoly_trim(d);
  return d;
}

/// Quotient and remainder of p / q (q non-zero).
inline std::pair<UPoly, UPoly> upoly_divmod(UPoly p, UPoly q) {
  upoly_trim(p);
  upoly_trim(q);
  if (q.empty()) throw UsageError("division by the zero polynomial");
  if (p.size() < q.size()) return {UPoly{}, p};
  UPoly quot(p.size() - q.size() + 1);
  while (p.size() >= q.size() && !p.empty()) {
    const std::size_t shift = p.size() - q.size();
    const Rational f = p.back() / q.back();
    quot[shift] = f;
    for (std::size_t k = 0; k < q.size(); ++k) p[k + shift] -= f * q[k];
    upoly_trim(p);
  }
  upoly_trim(quot);
  return {quot, p};
}

/// Characteristic polynomial det(xI - A) by Faddeev-LeVerrier; monic, lowest degree first.
inline UPoly charpoly(const SymMatrix<Rational>& a) {
  const std::size_t n = a.n();
  const Matrix<Rational> am = a.dense();
  UPoly c(n + 1);
  c[n] = 1;
  Matrix<Rational> m(n, n, Rational(0));  // M_0 = 0
  for (std::size_t k = 1; k <= n; ++k) {
    Matrix<Rational> mk = am * m;
    for (std::size_t i = 0; i < n; ++i) mk(i, i) += c[n - k + 1];
    Matrix<Rational> amk = am * mk;
    Rational tr(0);
    for (std::size_t i = 0; i < n; ++i) tr += amk(i, i);
    c[n - k] = -tr / static_cast<long>(k);
    m = std::move(mk);
  }
  return c;
}

/// Sturm sequence of p.
inline std::vector<UPoly> sturm_sequence(const UPoly& p) {
  std::vector<UPoly> seq{p, upoly_derivative(p)};
  upoly_trim(seq[0]);
  while (!seq.back().empty()) {
    auto [q, r] = upoly_divmod(seq[seq.size() - 2], seq.back());
    for (auto& x : r) x = -x;
    if (r.empty()) break;
    seq.push_back(std::move(r));
  }
  return seq;
}

inline int sign_changes(const std::vector<UPoly>& seq, const Rational& x) {
  int changes = 0, last = 0;
  for (const auto& p : seq) {
    const int s = sgn(upoly_eval(p, x));
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

/// Number of distinct real roots of p in (lo, hi]; lo, hi must not be roots.
inline int count_roots(const std::vector<UPoly>& seq, const Rational& lo, const Rational& hi) {
  return sign_changes(seq, lo) - sign_changes(seq, hi);
}

/// Rational interval [lo, hi] of width <= width containing the smallest real
/// root of p (a characteristic polynomial with only real roots).
inline std::pair<Rational, Rational> smallest_root_bracket(const UPoly& p, const Rational& width) {
  auto seq = sturm_sequence(p);
  // Cauchy bound on root magnitude.
  Rational bound(0);
  for (std::size_t k = 0; k + 1 < p.size(); ++k) bound = std::max(bound, Rational(abs(p[k] / p.back())));
  Rational lo = -(bound + 1), hi = bound + 1;
  if (count_roots(seq, lo, hi) == 0) throw NumericError("polynomial has no real roots");
  while (hi - lo > width) {
    Rational mid = (lo + hi) / 2;
    if (upoly_eval(p, mid) == 0) {
      // mid is a root; it is the smallest one iff nothing lies below it.
      const Rational eps = (mid - lo) / 1024;
      if (count_roots(seq, lo, mid - eps) == 0 && count_roots(seq, mid - eps, mid) >= 1) return {mid, mid};
      mid += (hi - lo) / 4096;
    }
    if (count_roots(seq, lo, mid) > 0)
      hi = mid;
    else
      lo = mid;
  }
  return {lo, hi};
}

/// Connected components of the nonzero pattern of a symmetric matrix (0-based rows).
template <class T>
std::vector<std::vector<std::size_t>> connected_blocks(const SymMatrix<T>& a) {
  const std::size_t n = a.n();
  std::vector<int> comp(n, -1);
  std::vector<std::vector<std::size_t>> blocks;
  for (std::size_t s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    std::vector<std::size_t> stack{s}, members;
    comp[s] = static_cast<int>(blocks.size());
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      members.push_back(i);
      for (std::size_t j = 0; j < n; ++j)
        if (comp[j] < 0 && a(i, j) != T(0)) {
          comp[j] = comp[s];
          stack.push_back(j);
        }
    }
    std::sort(members.begin(), members.end());
    blocks.push_back(std::move(members));
  }
  return blocks;
}

}  // namespace wsos
