#pragma once

// Monomial bases, Gram families {M : X^T M X = f}, affine symmetric matrix
// families, the hand-derived 17x17 matrices M(1/2) and M(1/3), and exact
// principal-submatrix forcing of free parameters.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "wsos/errors.hpp"
#include "wsos/exact_linalg.hpp"
#include "wsos/matrix.hpp"
#include "wsos/poly.hpp"
#include "wsos/rational.hpp"

namespace wsos {

enum class BasisKind { Full, Reduced };

struct MonomialBasis {
  VarTablePtr vars;
  std::vector<Monomial> monomials;
  BasisKind kind = BasisKind::Full;
  int half_degree = 0;

  std::size_t size() const { return monomials.size(); }
  Polynomial element(std::size_t i) const { return Polynomial::term(vars, monomials.at(i), Rational(1)); }
  std::string name(std::size_t i) const { return element(i).to_string(); }

  template <class T>
  std::vector<T> evaluate(const std::vector<T>& point) const {
    std::vector<T> out;
    out.reserve(monomials.size());
    for (const auto& m : monomials) {
      T v(1);
      for (std::size_t k = 0; k < m.size(); ++k)
        for (unsigned e = 0; e < m[k]; ++e) v *= point[k];
      out.push_back(v);
    }
    return out;
  }
};

/// Full basis: every monomial of degree <= half_degree, ascending degree and
/// grlex-descending within a degree. Reduced basis (homogeneous target of degree
/// 2*half_degree): the degree-half_degree monomials, minus those whose square
/// can never receive a coefficient (not in the target and not produced by any
/// other pair of kept monomials), pruned to a fixed point.
inline MonomialBasis enumerate_basis(const VarTablePtr& vars, int half_degree, BasisKind kind,
                                     const Polynomial* target = nullptr) {
  if (half_degree < 0) throw UsageError("half degree must be non-negative");
  MonomialBasis b{vars, {}, kind, half_degree};
  if (kind == BasisKind::Full) {
    for (int deg = 0; deg <= half_degree; ++deg)
      for (auto& m : monomials_of_degree(vars->size(), deg)) b.monomials.push_back(std::move(m));
    return b;
  }
  if (!target) throw UsageError("a reduced basis needs a target polynomial");
  if (!same_table(target->vars(), vars)) throw UsageError("target lives over a different variable table");
  const auto hd = is_homogeneous(*target);
  if (!hd || (*hd != 2 * half_degree && !target->is_zero()))
    throw UsageError("reduced basis requires a target homogeneous of degree " + std::to_string(2 * half_degree));
  b.monomials = monomials_of_degree(vars->size(), half_degree);
  for (bool changed = true; changed;) {
    changed = false;
    std::map<Monomial, int> cross;  // products of distinct kept pairs
    for (std::size_t i = 0; i < b.size(); ++i)
      for (std::size_t j = i + 1; j < b.size(); ++j) ++cross[b.monomials[i] * b.monomials[j]];
    std::vector<Monomial> kept;
    for (const auto& m : b.monomials) {
      const Monomial sq = m * m;
      if (target->coefficient(sq) != 0 || cross.count(sq)) {
        kept.push_back(m);
      } else {
        changed = true;
      }
    }
    b.monomials = std::move(kept);
  }
  return b;
}

/// Symmetric matrix with few nonzeros; entries (i <= j) stand for both (i, j) and (j, i).
struct SparseSym {
  std::vector<std::tuple<std::size_t, std::size_t, Rational>> entries;

  void add(std::size_t i, std::size_t j, const Rational& v) {
    if (i > j) std::swap(i, j);
    entries.emplace_back(i, j, v);
  }

  template <class T>
  T quadratic(const std::vector<T>& x) const {
    T s(0);
    for (const auto& [i, j, v] : entries) {
      const double w = (i == j ? 1.0 : 2.0);
      s += T(w) * T(to_value<T>(v)) * x[i] * x[j];
    }
    return s;
  }

  template <class T>
  static T to_value(const Rational& v) {
    if constexpr (std::is_same_v<T, double>)
      return v.get_d();
    else
      return T(v);
  }
};

/// Affine family base + sum_k t_k dirs[k].
struct AffineSymMatrix {
  SymMatrix<Rational> base;
  std::vector<SparseSym> dirs;
  std::vector<std::string> param_names;

  std::size_t n() const { return base.n(); }
  std::size_t num_params() const { return dirs.size(); }

  SymMatrix<Rational> at(const std::vector<Rational>& t) const {
    check(t.size());
    SymMatrix<Rational> m = base;
    for (std::size_t k = 0; k < dirs.size(); ++k) {
      if (t[k] == 0) continue;
      for (const auto& [i, j, v] : dirs[k].entries) m(i, j) += t[k] * v;
    }
    return m;
  }

  SymMatrix<double> at(const std::vector<double>& t) const {
    check(t.size());
    SymMatrix<double> m = to_double(base);
    for (std::size_t k = 0; k < dirs.size(); ++k) {
      if (t[k] == 0) continue;
      for (const auto& [i, j, v] : dirs[k].entries) m(i, j) += t[k] * v.get_d();
    }
    return m;
  }

  /// Fixes some parameters; the remaining ones keep their relative order.
  AffineSymMatrix fix(const std::map<std::size_t, Rational>& values) const {
    AffineSymMatrix r;
    r.base = base;
    for (std::size_t k = 0; k < dirs.size(); ++k) {
      auto it = values.find(k);
      if (it == values.end()) {
        r.dirs.push_back(dirs[k]);
        if (!param_names.empty()) r.param_names.push_back(param_names[k]);
        continue;
      }
      for (const auto& [i, j, v] : dirs[k].entries) r.base(i, j) += it->second * v;
    }
    return r;
  }

  std::string param_name(std::size_t k) const {
    return k < param_names.size() ? param_names[k] : "t" + std::to_string(k + 1);
  }

 private:
  void check(std::size_t len) const {
    if (len != dirs.size()) throw UsageError("parameter vector has the wrong length");
  }
};

struct MonomialClass {
  Monomial product;
  Rational coeff;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (i <= j) with X_i X_j = product

  static Rational weight(const std::pair<std::size_t, std::size_t>& p) { return p.first == p.second ? 1 : 2; }
  Rational total_weight() const {
    Rational s(0);
    for (const auto& p : pairs) s += weight(p);
    return s;
  }
};

/// The affine set of symmetric M with X^T M X = target.
struct GramFamily {
  MonomialBasis basis;
  Polynomial target;
  std::vector<MonomialClass> classes;
  SymMatrix<Rational> particular;        // minimum-Frobenius-norm member
  std::vector<SparseSym> generators;     // X^T G X = 0, linearly independent
  std::vector<Monomial> unrepresentable; // target monomials no basis pair produces

  bool representable() const { return unrepresentable.empty(); }
  std::size_t dim() const { return generators.size(); }

  AffineSymMatrix affine() const { return AffineSymMatrix{particular, generators, {}}; }

  SymMatrix<Rational> member(const std::vector<Rational>& t) const { return affine().at(t); }

  /// Exact orthogonal (Frobenius) projection onto the family.
  SymMatrix<Rational> project(const SymMatrix<Rational>& y) const {
    if (y.n() != basis.size()) throw UsageError("matrix size does not match the basis");
    SymMatrix<Rational> x = y;
    for (const auto& cls : classes) {
      Rational s(0);
      for (const auto& p : cls.pairs) s += MonomialClass::weight(p) * y(p.first, p.second);
      const Rational shift = (cls.coeff - s) / cls.total_weight();
      for (const auto& p : cls.pairs) x(p.first, p.second) += shift;
    }
    return x;
  }

  bool contains(const SymMatrix<Rational>& m) const {
    if (m.n() != basis.size()) return false;
    for (const auto& cls : classes) {
      Rational s(0);
      for (const auto& p : cls.pairs) s += MonomialClass::weight(p) * m(p.first, p.second);
      if (s != cls.coeff) return false;
    }
    return true;
  }
};

/// X^T M X as a polynomial.
inline Polynomial quadratic_form(const MonomialBasis& basis, const SymMatrix<Rational>& m) {
  if (m.n() != basis.size()) throw UsageError("matrix size does not match the basis");
  Polynomial p(basis.vars);
  for (std::size_t i = 0; i < m.n(); ++i)
    for (std::size_t j = i; j < m.n(); ++j) {
      if (m(i, j) == 0) continue;
      p.add_term(basis.monomials[i] * basis.monomials[j], (i == j ? 1 : 2) * m(i, j));
    }
  return p;
}

inline GramFamily build_gram_family(const Polynomial& target, const MonomialBasis& basis) {
  if (!same_table(target.vars(), basis.vars)) throw UsageError("target and basis use different variable tables");
  GramFamily fam{basis, target, {}, SymMatrix<Rational>(basis.size(), Rational(0)), {}, {}};
  std::map<Monomial, std::size_t, GrlexGreater> index;
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = i; j < basis.size(); ++j) {
      const Monomial m = basis.monomials[i] * basis.monomials[j];
      auto [it, inserted] = index.try_emplace(m, fam.classes.size());
      if (inserted) fam.classes.push_back({m, target.coefficient(m), {}});
      fam.classes[it->second].pairs.emplace_back(i, j);
    }
  for (const auto& [m, c] : target.terms())
    if (!index.count(m)) fam.unrepresentable.push_back(m);
  std::sort(fam.classes.begin(), fam.classes.end(),
            [](const auto& a, const auto& b) { return GrlexGreater{}(a.product, b.product); });
  for (const auto& cls : fam.classes) {
    const Rational entry = cls.coeff / cls.total_weight();
    for (const auto& p : cls.pairs) fam.particular(p.first, p.second) = entry;
    const auto& p0 = cls.pairs.front();
    for (std::size_t k = 1; k < cls.pairs.size(); ++k) {
      const auto& pk = cls.pairs[k];
      SparseSym g;
      g.add(pk.first, pk.second, MonomialClass::weight(p0));
      g.add(p0.first, p0.second, -MonomialClass::weight(pk));
      fam.generators.push_back(std::move(g));
    }
  }
  return fam;
}

// ---------------------------------------------------------------------------
// Hand-derived 17x17 matrices over the basis
// X = (z^2, z v1_1, z v2_1, z v1_2, z v2_2, z w1_1, z w2_1, z w1_2, z w2_2,
//      v1_1 w1_1, v1_1 w2_1, v2_1 w1_1, v2_1 w2_1, v1_2 w1_2, v1_2 w2_2, v2_2 w1_2, v2_2 w2_2).

/// Entry positions (1-based) of the 18 free parameters of M(1/2), in order c1..c18.
inline const std::vector<std::pair<int, int>>& half_matrix_param_positions() {
  static const std::vector<std::pair<int, int>> pos{{1, 10}, {1, 11}, {1, 12}, {1, 13}, {1, 14}, {1, 15},
                                                    {1, 16}, {1, 17}, {2, 12}, {2, 13}, {4, 16}, {4, 17},
                                                    {6, 11}, {6, 13}, {8, 15}, {8, 17}, {10, 13}, {14, 17}};
  return pos;
}

inline std::vector<std::string> half_matrix_param_names() {
  std::vector<std::string> names;
  for (const auto& [i, j] : half_matrix_param_positions())
    names.push_back("c_{" + std::to_string(i) + "," + std::to_string(j) + "}");
  return names;
}

namespace detail {

struct AffineBuilder {
  explicit AffineBuilder(std::size_t n, std::size_t params, Rational scale)
      : base(n, Rational(0)), dirs(params), scale(std::move(scale)) {}
  SymMatrix<Rational> base;
  std::vector<SparseSym> dirs;
  Rational scale;

  // Sets 1-based entry (i, j) to scale * (constant + sign * c_param).
  void set(int i, int j, long constant, int param = 0, int sign = 1) {
    base(i - 1, j - 1) = scale * constant;
    if (param) dirs[param - 1].add(i - 1, j - 1, scale * sign);
  }
};

}  // namespace detail

/// M(alpha) as printed for alpha = 1/2 (18 parameters) or 1/3 (none), with the
/// global prefactor 1/2 or 1/3 included.
inline AffineSymMatrix reference_gram_affine(const Rational& alpha) {
  if (alpha == Rational(1, 2)) {
    detail::AffineBuilder b(17, 18, Rational(1, 2));
    // M_A^{1,1} (rows 1..5) and M_A^{2,2} (rows 6..9).
    b.set(1, 1, 4);
    for (int i : {2, 3, 4, 5, 6, 7, 8, 9}) b.set(i, i, 2);
    b.set(2, 4, 2);
    b.set(3, 5, 2);
    b.set(6, 8, 2);
    b.set(7, 9, 2);
    // M_A^{1,2}.
    b.set(2, 6, -2, 1, -1);
    b.set(2, 7, 0, 2, -1);
    b.set(3, 6, 0, 3, -1);
    b.set(3, 7, -2, 4, -1);
    b.set(4, 8, -2, 5, -1);
    b.set(4, 9, 0, 6, -1);
    b.set(5, 8, 0, 7, -1);
    b.set(5, 9, -2, 8, -1);
    // M_C.
    for (int k = 1; k <= 8; ++k) b.set(1, 9 + k, 0, k);
    b.set(2, 12, 0, 9);
    b.set(2, 13, 0, 10);
    b.set(3, 10, 0, 9, -1);
    b.set(3, 11, 0, 10, -1);
    b.set(4, 16, 0, 11);
    b.set(4, 17, 0, 12);
    b.set(5, 14, 0, 11, -1);
    b.set(5, 15, 0, 12, -1);
    b.set(6, 11, 0, 13);
    b.set(6, 13, 0, 14);
    b.set(7, 10, 0, 13, -1);
    b.set(7, 12, 0, 14, -1);
    b.set(8, 15, 0, 15);
    b.set(8, 17, 0, 16);
    b.set(9, 14, 0, 15, -1);
    b.set(9, 16, 0, 16, -1);
    // M_B: two copies of the parametrized 4x4 diagonal block, coupled by M_B^{1,2}.
    for (int off : {9, 13}) {
      const int param = off == 9 ? 17 : 18;
      b.set(off + 1, off + 1, 1);
      b.set(off + 4, off + 4, 1);
      b.set(off + 2, off + 2, 2);
      b.set(off + 3, off + 3, 2);
      b.set(off + 1, off + 4, 0, param);
      b.set(off + 2, off + 3, -1, param, -1);
    }
    b.set(10, 14, 1);
    b.set(10, 17, -1);
    b.set(13, 14, -1);
    b.set(13, 17, 1);
    b.set(11, 15, 2);
    b.set(12, 16, 2);
    return AffineSymMatrix{b.base, b.dirs, half_matrix_param_names()};
  }
  if (alpha == Rational(1, 3)) {
    detail::AffineBuilder b(17, 0, Rational(1, 3));
    b.set(1, 1, 8);
    for (int i = 2; i <= 9; ++i) b.set(i, i, 3);
    b.set(2, 4, 3);
    b.set(3, 5, 3);
    b.set(6, 8, 3);
    b.set(7, 9, 3);
    for (int j : {10, 13, 14, 17}) b.set(1, j, -2);
    // M_B: rows 10..17 follow the pattern (2,0,0,-1,2,0,0,-1), (0,3,0,0,0,3,0,0), ...
    const long mb[8][8] = {{2, 0, 0, -1, 2, 0, 0, -1}, {0, 3, 0, 0, 0, 3, 0, 0}, {0, 0, 3, 0, 0, 0, 3, 0},
                           {-1, 0, 0, 2, -1, 0, 0, 2}, {2, 0, 0, -1, 2, 0, 0, -1}, {0, 3, 0, 0, 0, 3, 0, 0},
                           {0, 0, 3, 0, 0, 0, 3, 0},   {-1, 0, 0, 2, -1, 0, 0, 2}};
    for (int i = 0; i < 8; ++i)
      for (int j = i; j < 8; ++j)
        if (mb[i][j]) b.set(10 + i, 10 + j, mb[i][j]);
    return AffineSymMatrix{b.base, {}, {}};
  }
  throw UsageError("hand-derived matrix exists only for alpha = 1/2 and alpha = 1/3");
}

inline SymMatrix<Rational> reference_gram(const Rational& alpha, const std::vector<Rational>& params = {}) {
  auto a = reference_gram_affine(alpha);
  if (a.num_params() == 0) return a.base;
  if (params.size() != a.num_params())
    throw UsageError("M(1/2) needs " + std::to_string(a.num_params()) + " parameters");
  return a.at(params);
}

// ---------------------------------------------------------------------------
// Forcing free parameters through principal submatrices.

struct ForcingStep {
  PsmIndex psm;
  std::size_t param = 0;  // 0-based parameter id
  Rational value;
  UPoly minor;            // principal minor, as a polynomial in the parameter, that pins the value
  PsmIndex minor_rows;    // rows of that minor, positions inside the PSM
};

enum class ForcingOutcome { Forced, NoForcing, Infeasible, Unresolved };

inline const char* to_string(ForcingOutcome o) {
  switch (o) {
    case ForcingOutcome::Forced: return "forced";
    case ForcingOutcome::NoForcing: return "no forcing";
    case ForcingOutcome::Infeasible: return "infeasible";
    case ForcingOutcome::Unresolved: return "unresolved";
  }
  return "?";
}

struct ForcingAttempt {
  PsmIndex psm;
  ForcingOutcome outcome = ForcingOutcome::NoForcing;
  std::optional<std::size_t> param;
  // Admissible interval of the parameter (numeric view), when one free parameter remains.
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  std::string note;
};

struct ForcingReport {
  std::vector<ForcingStep> steps;
  std::vector<ForcingAttempt> other;  // scheduled PSMs that did not force anything
  std::map<std::size_t, Rational> assignment;
  bool infeasible = false;            // some PSM admits no PSD completion
};

namespace detail {

inline Rational det_exact(const SymMatrix<Rational>& a) {
  // Fraction-free enough for the tiny minors used here: plain Gaussian elimination.
  const std::size_t n = a.n();
  Matrix<Rational> m = a.dense();
  Rational det(1);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && m(p, c) == 0) ++p;
    if (p == n) return 0;
    if (p != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(m(p, k), m(c, k));
      det = -det;
    }
    det *= m(c, c);
    for (std::size_t r = c + 1; r < n; ++r) {
      if (m(r, c) == 0) continue;
      const Rational f = m(r, c) / m(c, c);
      for (std::size_t k = c; k < n; ++k) m(r, k) -= f * m(c, k);
    }
  }
  return det;
}

/// det(A + x B) as a polynomial in x, via exact interpolation at 0..n.
inline UPoly pencil_det(const SymMatrix<Rational>& a, const SymMatrix<Rational>& b) {
  const std::size_t n = a.n();
  std::vector<Rational> xs, ys;
  for (std::size_t k = 0; k <= n; ++k) {
    const Rational x(static_cast<long>(k));
    SymMatrix<Rational> m = a;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) m(i, j) += x * b(i, j);
    xs.push_back(x);
    ys.push_back(det_exact(m));
  }
  // Newton divided differences -> monomial coefficients.
  std::vector<Rational> coef = ys;
  for (std::size_t level = 1; level <= n; ++level)
    for (std::size_t i = n; i >= level; --i) {
      coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - level]);
      if (i == level) break;
    }
  UPoly p{coef[n]};
  for (std::size_t k = n; k-- > 0;) {
    // p = p * (x - xs[k]) + coef[k]
    UPoly q(p.size() + 1);
    for (std::size_t i = 0; i < p.size(); ++i) {
      q[i + 1] += p[i];
      q[i] -= xs[k] * p[i];
    }
    q[0] += coef[k];
    p = std::move(q);
  }
  upoly_trim(p);
  return p;
}

/// Intersects [lo, hi] with {x : p(x) >= 0} for deg p <= 2. Returns false when
/// the constraint is not representable as one interval by this routine.
inline bool restrict_interval(const UPoly& p, double& lo, double& hi, bool& empty,
                              std::optional<Rational>& point) {
  if (p.size() <= 1) {
    if (!p.empty() && p[0] < 0) empty = true;
    return true;
  }
  if (p.size() == 2) {
    const Rational root = -p[0] / p[1];
    if (p[1] > 0)
      lo = std::max(lo, root.get_d());
    else
      hi = std::min(hi, root.get_d());
    return true;
  }
  if (p.size() != 3) return false;
  const Rational& a = p[2];
  const Rational& b = p[1];
  const Rational& c = p[0];
  const Rational disc = b * b - 4 * a * c;
  if (a > 0) {
    // Non-negative outside the roots: a single interval only when disc <= 0.
    return disc <= 0;
  }
  if (disc < 0) {
    empty = true;
    return true;
  }
  if (disc == 0) {
    const Rational v = -b / (2 * a);
    point = v;
    lo = std::max(lo, v.get_d());
    hi = std::min(hi, v.get_d());
    return true;
  }
  const double sq = std::sqrt(disc.get_d());
  const double r1 = (-b.get_d() + sq) / (2 * a.get_d()), r2 = (-b.get_d() - sq) / (2 * a.get_d());
  lo = std::max(lo, std::min(r1, r2));
  hi = std::min(hi, std::max(r1, r2));
  return true;
}

}  // namespace detail

/// Analyzes one PSM of `fam` (current assignment already substituted). When a
/// single free parameter remains, every principal minor of the PSM is an exact
/// polynomial in it and PSD holds exactly where all of them are non-negative.
inline std::pair<ForcingAttempt, std::optional<ForcingStep>> analyze_psm(
    const AffineSymMatrix& fam, const std::map<std::size_t, Rational>& assignment, const PsmIndex& idx) {
  ForcingAttempt att{idx};
  std::vector<std::size_t> free;
  for (std::size_t k = 0; k < fam.num_params(); ++k) {
    if (assignment.count(k)) continue;
    for (const auto& [i, j, v] : fam.dirs[k].entries) {
      const bool in_i = std::find(idx.rows().begin(), idx.rows().end(), i + 1) != idx.rows().end();
      const bool in_j = std::find(idx.rows().begin(), idx.rows().end(), j + 1) != idx.rows().end();
      if (in_i && in_j && v != 0) {
        free.push_back(k);
        break;
      }
    }
  }
  // Base PSM with assigned values substituted and free ones at zero.
  std::vector<Rational> t(fam.num_params(), Rational(0));
  for (const auto& [k, v] : assignment) t[k] = v;
  const SymMatrix<Rational> s0 = psm(fam.at(t), idx);
  if (free.empty()) {
    att.outcome = psd_exact(s0).psd ? ForcingOutcome::NoForcing : ForcingOutcome::Infeasible;
    att.note = "no free parameter in this PSM";
    return {att, std::nullopt};
  }
  if (free.size() > 1) {
    att.outcome = ForcingOutcome::Unresolved;
    att.note = std::to_string(free.size()) + " free parameters";
    return {att, std::nullopt};
  }
  const std::size_t k = free.front();
  att.param = k;
  SymMatrix<Rational> dir(fam.n(), Rational(0));
  for (const auto& [i, j, v] : fam.dirs[k].entries) dir(i, j) += v;
  const SymMatrix<Rational> s1 = psm(dir, idx);
  const std::size_t n = idx.size();
  bool empty = false, representable = true;
  std::optional<Rational> point;
  std::optional<std::pair<UPoly, PsmIndex>> pin;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) rows.push_back(i + 1);
    const PsmIndex sub(rows);
    const UPoly p = detail::pencil_det(psm(s0, sub), psm(s1, sub));
    std::optional<Rational> pt;
    if (!detail::restrict_interval(p, att.lo, att.hi, empty, pt)) representable = false;
    if (pt && !pin) {
      point = pt;
      pin.emplace(p, sub);
    }
  }
  if (empty || att.lo > att.hi) {
    att.outcome = ForcingOutcome::Infeasible;
    att.note = "no value of " + fam.param_name(k) + " makes this PSM PSD";
    return {att, std::nullopt};
  }
  if (!point && att.lo == att.hi) {
    // Two linear constraints meeting in a point: recover it exactly.
    point = best_rational(att.lo, 1000000);
  }
  if (point) {
    std::vector<Rational> tv = t;
    tv[k] = *point;
    const bool ok = psd_exact(psm(fam.at(tv), idx)).psd;
    // Any other value violates PSD; spot-check both sides at two scales.
    bool others_fail = true;
    for (const Rational delta : {Rational(1), make_rational(1, 1000)})
      for (int sign : {-1, 1}) {
        tv[k] = *point + sign * delta;
        others_fail = others_fail && !psd_exact(psm(fam.at(tv), idx)).psd;
      }
    if (ok && others_fail) {
      att.outcome = ForcingOutcome::Forced;
      ForcingStep step{idx, k, *point, pin ? pin->first : UPoly{}, pin ? pin->second : PsmIndex{}};
      return {att, step};
    }
    att.outcome = ok ? ForcingOutcome::NoForcing : ForcingOutcome::Infeasible;
    att.note = "candidate value failed exact verification";
    return {att, std::nullopt};
  }
  att.outcome = ForcingOutcome::NoForcing;
  att.note = representable ? "admissible interval" : "minor of degree > 2; interval not resolved";
  return {att, std::nullopt};
}

/// Runs the schedule to a fixed point: PSMs with several free parameters are
/// deferred until earlier steps pin them down, so any permutation of a
/// schedule yields the same assignment.
inline ForcingReport psm_forcing(const AffineSymMatrix& fam, const std::vector<PsmIndex>& schedule) {
  ForcingReport rep;
  std::vector<PsmIndex> pending = schedule;
  for (bool progress = true; progress && !pending.empty();) {
    progress = false;
    std::vector<PsmIndex> next;
    for (const auto& idx : pending) {
      auto [att, step] = analyze_psm(fam, rep.assignment, idx);
      if (step) {
        rep.assignment[step->param] = step->value;
        rep.steps.push_back(*step);
        progress = true;
      } else if (att.outcome == ForcingOutcome::Unresolved) {
        next.push_back(idx);
      } else {
        if (att.outcome == ForcingOutcome::Infeasible) rep.infeasible = true;
        rep.other.push_back(att);
        progress = true;
      }
    }
    pending = std::move(next);
  }
  for (const auto& idx : pending) rep.other.push_back(analyze_psm(fam, rep.assignment, idx).first);
  return rep;
}

/// The forcing schedule for M(1/2). The ninth row is {2,12,16}: the printed
/// {1,12,16} contains no entry carrying c9.
struct TableRow {
  PsmIndex psm;
  std::size_t param;  // 1-based c index
  Rational value;
};

inline std::vector<TableRow> forcing_table() {
  return {{{2, 6, 8}, 1, -2},    {{2, 7, 9}, 2, 0},     {{3, 6, 8}, 3, 0},    {{3, 7, 9}, 4, -2},
          {{4, 6, 8}, 5, -2},    {{4, 7, 9}, 6, 0},     {{5, 6, 8}, 7, 0},    {{5, 7, 9}, 8, -2},
          {{2, 12, 16}, 9, 0},   {{3, 11, 15}, 10, 0},  {{4, 12, 16}, 11, 0}, {{5, 11, 15}, 12, 0},
          {{6, 11, 15}, 13, 0},  {{7, 12, 16}, 14, 0},  {{8, 11, 15}, 15, 0}, {{9, 12, 16}, 16, 0},
          {{11, 12, 16}, 17, -1}, {{12, 15, 16}, 18, -1}};
}

inline const PsmIndex& printed_c9_psm() {
  static const PsmIndex idx{1, 12, 16};
  return idx;
}

inline std::vector<Rational> table_values() {
  std::vector<Rational> v;
  for (const auto& row : forcing_table()) v.push_back(row.value);
  return v;
}

/// Every PSM of size 2..max_size, lexicographic.
inline std::vector<PsmIndex> all_small_psms(std::size_t n, std::size_t max_size) {
  std::vector<PsmIndex> out;
  std::vector<std::size_t> rows;
  auto rec = [&](auto&& self, std::size_t start) -> void {
    if (rows.size() >= 2) out.emplace_back(rows);
    if (rows.size() == max_size) return;
    for (std::size_t i = start; i <= n; ++i) {
      rows.push_back(i);
      self(self, i + 1);
      rows.pop_back();
    }
  };
  rec(rec, 1);
  return out;
}

/// Forcing over all 2x2 and 3x3 PSMs; a complete assignment whose matrix is not
/// PSD (or an infeasible PSM) proves that no PSD member exists.
struct NonSosProof {
  bool proven = false;
  ForcingReport forcing;
  std::optional<PsdVerdict> forced_verdict;  // when every parameter is pinned
  SymMatrix<Rational> forced_matrix;
};

inline NonSosProof auto_forcing(const AffineSymMatrix& fam, std::size_t max_size = 3) {
  NonSosProof out;
  out.forcing = psm_forcing(fam, all_small_psms(fam.n(), max_size));
  if (out.forcing.assignment.size() == fam.num_params()) {
    std::vector<Rational> t(fam.num_params());
    for (const auto& [k, v] : out.forcing.assignment) t[k] = v;
    out.forced_matrix = fam.at(t);
    out.forced_verdict = psd_exact(out.forced_matrix);
  }
  out.proven = out.forcing.infeasible || (out.forced_verdict && !out.forced_verdict->psd);
  return out;
}

}  // namespace wsos
