#pragma once

// Closed-form SOS identities for the diagonal block M_(1,1) (decomposition
// Lambda = (1 - alpha) I + alpha Z, one SOS form per Z/I placement) and the
// one-copy real identity for Theta = <x1|M11|x1><x2|M22|x2> - <x1|M12|x2>^2.

#include <cmath>
#include <complex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "wsos/eigen_sym.hpp"
#include "wsos/errors.hpp"
#include "wsos/poly.hpp"
#include "wsos/werner.hpp"

namespace wsos {

enum class CoeffMode { Real, Complex };

/// Complex-valued polynomial in real variables.
struct CPoly {
  Polynomial re, im;

  explicit CPoly(const VarTablePtr& t) : re(t), im(t) {}
  CPoly(Polynomial r, Polynomial i) : re(std::move(r)), im(std::move(i)) {}

  CPoly conj() const { return {re, -im}; }
  Polynomial norm2() const { return re * re + im * im; }

  CPoly& operator+=(const CPoly& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  friend CPoly operator*(const CPoly& a, const CPoly& b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
  friend CPoly operator*(const Rational& s, const CPoly& a) { return {s * a.re, s * a.im}; }
};

/// Order-N coefficient tensor with entries indexed 1..d per slot; slot 1 is the
/// most significant digit of the flat index. Variable names: name + digits
/// joined by '.', plus _re/_im in complex mode.
struct CoeffTensor {
  std::string name;
  int d = 2;
  int copies = 1;
  CoeffMode mode = CoeffMode::Real;

  std::size_t size() const { return WernerParams::ipow(d, copies); }

  std::vector<int> digits(std::size_t index) const {
    std::vector<int> out(copies);
    for (int p = copies; p-- > 0;) {
      out[p] = static_cast<int>(index % d);
      index /= d;
    }
    return out;
  }

  std::size_t flat(const std::vector<int>& dig) const {
    std::size_t r = 0;
    for (int x : dig) r = r * d + x;
    return r;
  }

  std::string var(std::size_t index, bool imag = false) const {
    std::string s = name;
    const auto dig = digits(index);
    for (int p = 0; p < copies; ++p) s += (p ? "." : "") + std::to_string(dig[p] + 1);
    if (mode == CoeffMode::Complex) s += imag ? "_im" : "_re";
    return s;
  }

  std::vector<std::string> var_names() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < size(); ++i) {
      out.push_back(var(i));
      if (mode == CoeffMode::Complex) out.push_back(var(i, true));
    }
    return out;
  }

  CPoly entry(const VarTablePtr& t, std::size_t index) const {
    CPoly c(Polynomial::variable(t, var(index)), Polynomial(t));
    if (mode == CoeffMode::Complex) c.im = Polynomial::variable(t, var(index, true));
    return c;
  }
};

/// Z/I placement, one character per copy ('Z' or 'I').
using ZPattern = std::string;

inline void check_pattern(const ZPattern& pat, int copies) {
  if (static_cast<int>(pat.size()) != copies) throw UsageError("pattern length must equal the number of copies");
  for (char c : pat)
    if (c != 'Z' && c != 'I') throw UsageError("pattern characters must be 'Z' or 'I'");
}

/// All 2^N patterns, all-I first, in binary order with 'Z' as 1.
inline std::vector<ZPattern> all_patterns(int copies) {
  std::vector<ZPattern> out;
  for (unsigned mask = 0; mask < (1u << copies); ++mask) {
    ZPattern p(copies, 'I');
    for (int i = 0; i < copies; ++i)
      if (mask & (1u << (copies - 1 - i))) p[i] = 'Z';
    out.push_back(p);
  }
  return out;
}

/// Variables xi (the V-side tensor), eta (the x-side tensor), and alpha.
struct IdentitySetup {
  CoeffTensor xi, eta;
  VarTablePtr vars;

  IdentitySetup(int copies, int d, CoeffMode mode)
      : xi{"xi", d, copies, mode}, eta{"eta", d, copies, mode} {
    if (d < 2 || copies < 1) throw UsageError("need d >= 2 and N >= 1");
    const double dim = std::pow(static_cast<double>(d), 2.0 * copies);
    if (dim > 1e4) throw GuardError("d^(2N) = " + std::to_string(static_cast<long long>(dim)) + " exceeds 10^4");
    auto names = xi.var_names();
    for (auto& n : eta.var_names()) names.push_back(n);
    names.push_back("alpha");
    vars = VarTable::make(std::move(names));
  }

  int copies() const { return xi.copies; }
  int d() const { return xi.d; }
  Polynomial alpha() const { return Polynomial::variable(vars, "alpha"); }
};

namespace detail {

struct OpEntry {
  std::size_t a, b, c, e;
  Rational value;
};

/// Nonzeros of the tensor product of per-copy operators, split coordinates,
/// copy 1 most significant.
inline std::vector<OpEntry> tensor_entries(const std::vector<std::vector<OpEntry>>& per_copy, int d) {
  std::vector<OpEntry> acc{{0, 0, 0, 0, Rational(1)}};
  for (const auto& one : per_copy) {
    std::vector<OpEntry> next;
    for (const auto& x : acc)
      for (const auto& y : one)
        next.push_back({x.a * d + y.a, x.b * d + y.b, x.c * d + y.c, x.e * d + y.e, x.value * y.value});
    acc = std::move(next);
  }
  return acc;
}

/// <ab|I|ce> = d_ac d_be; <ab|Z|ce> = d_ac d_be - d_ab d_ce.
inline std::vector<OpEntry> slot_entries(char kind, int d) {
  std::vector<OpEntry> out;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) out.push_back({std::size_t(a), std::size_t(b), std::size_t(a), std::size_t(b), 1});
  if (kind == 'Z')
    for (int a = 0; a < d; ++a)
      for (int c = 0; c < d; ++c) out.push_back({std::size_t(a), std::size_t(a), std::size_t(c), std::size_t(c), -1});
  return out;
}

/// Components of sum_i coef(i) u_{i1} (x) ... (x) u_{iN}, where u_i is column i of `basis`.
inline std::vector<CPoly> expand_in_basis(const IdentitySetup& s, const CoeffTensor& t,
                                          const Matrix<Rational>& basis) {
  const std::size_t n = t.size();
  std::vector<CPoly> out(n, CPoly(s.vars));
  for (std::size_t i = 0; i < n; ++i) {
    const auto di = t.digits(i);
    const CPoly ci = t.entry(s.vars, i);
    for (std::size_t a = 0; a < n; ++a) {
      const auto da = t.digits(a);
      Rational w(1);
      for (int p = 0; p < t.copies && w != 0; ++p) w *= basis(da[p], di[p]);
      if (w != 0) out[a] += w * ci;
    }
  }
  return out;
}

/// sum over entries of value * conj(Psi(a,b)) * Psi(c,e) with Psi(a,b) = X(a) Y(b).
inline Polynomial sandwich(const std::vector<OpEntry>& entries, const std::vector<CPoly>& x,
                           const std::vector<CPoly>& y, const VarTablePtr& vars) {
  Polynomial out(vars);
  for (const auto& z : entries) {
    const CPoly bra = (x[z.a] * y[z.b]).conj();
    const CPoly ket = x[z.c] * y[z.e];
    // The total is real; the imaginary parts cancel across entries.
    out += z.value * (bra.re * ket.re - bra.im * ket.im);
  }
  return out;
}

inline Matrix<Rational> identity_basis(int d) { return Matrix<Rational>::identity(static_cast<std::size_t>(d)); }

inline void check_orthonormal(const Matrix<Rational>& b, int d) {
  if (b.rows() != static_cast<std::size_t>(d) || b.cols() != static_cast<std::size_t>(d))
    throw UsageError("basis must be d x d");
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Rational s(0);
      for (int k = 0; k < d; ++k) s += b(k, i) * b(k, j);
      if (s != (i == j ? 1 : 0)) throw UsageError("basis columns must be orthonormal");
    }
}

}  // namespace detail

/// <x|V^dagger O V|x> for O = tensor of Z/I per pattern, computed from the
/// operators: V = sum_i xi(i) V_{u_i}, |x> = sum_i eta(i) u_i^*, with the real
/// orthonormal basis u given by the columns of `basis` (identity by default).
inline Polynomial z_term_lhs(const IdentitySetup& s, const ZPattern& pat,
                             const std::optional<Matrix<Rational>>& basis = std::nullopt) {
  check_pattern(pat, s.copies());
  const Matrix<Rational> u = basis ? *basis : detail::identity_basis(s.d());
  detail::check_orthonormal(u, s.d());
  std::vector<std::vector<detail::OpEntry>> per_copy;
  for (char c : pat) per_copy.push_back(detail::slot_entries(c, s.d()));
  const auto entries = detail::tensor_entries(per_copy, s.d());
  // V_u x for x = u'^*: component (a, b) = x_a u_b, so Psi(a,b) = X(a) Y(b).
  const auto x = detail::expand_in_basis(s, s.eta, u);
  const auto y = detail::expand_in_basis(s, s.xi, u);
  return detail::sandwich(entries, x, y, s.vars);
}

/// The SOS form of a Z/I term: slots with Z sum over i<j and antisymmetrize
/// with sgn(P); slots with I sum over all (i, j), xi taking i and eta taking j.
inline Polynomial z_term_sos_rhs(const IdentitySetup& s, const ZPattern& pat) {
  check_pattern(pat, s.copies());
  const int n = s.copies(), d = s.d();
  std::vector<std::pair<int, int>> slot_pairs[8];
  if (n > 8) throw GuardError("too many copies");
  for (int p = 0; p < n; ++p)
    for (int i = 0; i < d; ++i)
      for (int j = (pat[p] == 'Z' ? i + 1 : 0); j < d; ++j) slot_pairs[p].emplace_back(i, j);
  std::vector<int> zslots;
  for (int p = 0; p < n; ++p)
    if (pat[p] == 'Z') zslots.push_back(p);

  Polynomial out(s.vars);
  std::vector<std::size_t> pick(n, 0);
  while (true) {
    CPoly inner(s.vars);
    for (unsigned flips = 0; flips < (1u << zslots.size()); ++flips) {
      std::vector<int> xi_idx(n), eta_idx(n);
      int sign = 1;
      for (int p = 0; p < n; ++p) {
        auto [i, j] = slot_pairs[p][pick[p]];
        xi_idx[p] = i;
        eta_idx[p] = j;
      }
      for (std::size_t q = 0; q < zslots.size(); ++q)
        if (flips & (1u << q)) {
          std::swap(xi_idx[zslots[q]], eta_idx[zslots[q]]);
          sign = -sign;
        }
      inner += Rational(sign) * (s.xi.entry(s.vars, s.xi.flat(xi_idx)) *
                                 s.eta.entry(s.vars, s.eta.flat(eta_idx)).conj());
    }
    out += inner.norm2();
    int p = n - 1;
    while (p >= 0 && ++pick[p] == slot_pairs[p].size()) pick[p--] = 0;
    if (p < 0) break;
  }
  return out;
}

/// <x|V^dagger Lambda(alpha)^{tensor N} V|x> as a polynomial including alpha:
/// the Werner operator evaluated at N+1 rational alphas, interpolated exactly.
inline Polynomial direct_expectation(const IdentitySetup& s,
                                     const std::optional<Matrix<Rational>>& basis = std::nullopt) {
  const Matrix<Rational> u = basis ? *basis : detail::identity_basis(s.d());
  detail::check_orthonormal(u, s.d());
  const auto x = detail::expand_in_basis(s, s.eta, u);
  const auto y = detail::expand_in_basis(s, s.xi, u);
  const int n = s.copies();
  std::vector<Rational> nodes;
  std::vector<Polynomial> values;
  for (int k = 0; k <= n; ++k) {
    const Rational a = make_rational(k, 2 * n);
    const LambdaOp op(WernerParams(s.d(), a, n));
    std::vector<detail::OpEntry> entries;
    // LambdaOp's first copy is its least significant digit; relabel to slot 1 first.
    const CoeffTensor shape{"", s.d(), n, CoeffMode::Real};
    auto flip = [&](std::size_t idx) {
      auto dig = shape.digits(idx);
      std::reverse(dig.begin(), dig.end());
      return shape.flat(dig);
    };
    for (const auto& z : op.nonzeros()) entries.push_back({flip(z.a), flip(z.b), flip(z.c), flip(z.e), z.value});
    nodes.push_back(a);
    values.push_back(detail::sandwich(entries, x, y, s.vars));
  }
  const Polynomial al = s.alpha();
  Polynomial out(s.vars);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    Polynomial lk = Polynomial::constant(s.vars, 1);
    for (std::size_t j = 0; j < nodes.size(); ++j)
      if (j != k) lk = lk * (al - Polynomial::constant(s.vars, nodes[j])) * Rational(1 / (nodes[k] - nodes[j]));
    out += values[k] * lk;
  }
  return out;
}

/// sum over patterns of (1 - alpha)^{#I} alpha^{#Z} times the pattern's SOS form.
inline Polynomial reassembled_expectation(const IdentitySetup& s) {
  const Polynomial al = s.alpha(), one = Polynomial::constant(s.vars, 1);
  Polynomial out(s.vars);
  for (const auto& pat : all_patterns(s.copies())) {
    Polynomial w = one;
    for (char c : pat) w = w * (c == 'Z' ? al : one - al);
    out += w * z_term_sos_rhs(s, pat);
  }
  return out;
}

struct IdentityCheck {
  std::string name;
  std::size_t lhs_terms = 0, rhs_terms = 0, residual_terms = 0;
  bool holds() const { return residual_terms == 0; }
};

inline IdentityCheck compare(std::string name, const Polynomial& lhs, const Polynomial& rhs) {
  return {std::move(name), lhs.num_terms(), rhs.num_terms(), (lhs - rhs).num_terms()};
}

/// Every Z/I term against its SOS form, then the alpha-weighted reassembly
/// against the direct expansion.
inline std::vector<IdentityCheck> verify_m11_identities(int copies, int d, CoeffMode mode,
                                                        const std::optional<Matrix<Rational>>& basis = std::nullopt) {
  const IdentitySetup s(copies, d, mode);
  std::vector<IdentityCheck> out;
  const std::string tag = "N=" + std::to_string(copies) + " d=" + std::to_string(d) +
                          (mode == CoeffMode::Complex ? " complex" : " real");
  for (const auto& pat : all_patterns(copies))
    out.push_back(compare("term " + pat + " " + tag, z_term_lhs(s, pat, basis), z_term_sos_rhs(s, pat)));
  out.push_back(compare("reassembly " + tag, direct_expectation(s, basis), reassembled_expectation(s)));
  return out;
}

struct M11Report {
  int copies = 1, d = 2;
  Rational alpha;
  bool alpha_in_range = true;  // 1/d <= alpha <= 1/2
  std::vector<IdentityCheck> symbolic;
  std::size_t samples = 0;
  double worst_margin = INFINITY;  // smallest lambda_min(M_(1,1)) over samples
  bool all_positive() const { return worst_margin > 0; }
};

/// M_(1,1) = V^dagger Lambda^{tensor N} V for a unit vector v in C^{d^N}.
inline CMatrix m11(const LambdaOp& op, const CVector& v) {
  const std::size_t n = op.local_dim();
  CMatrix m(n, n, 0.0);
  for (const auto& z : op.nonzeros()) m(z.a, z.c) += z.value.get_d() * std::conj(v[z.b]) * v[z.e];
  return m;
}

inline M11Report verify_m11_positive(int copies, int d, const Rational& alpha, std::size_t samples,
                                     std::uint64_t seed = 0, bool symbolic = true,
                                     const std::vector<CVector>& extra_points = {}) {
  M11Report rep{copies, d, alpha};
  rep.alpha_in_range = alpha >= Rational(1, d) && alpha <= Rational(1, 2);
  if (symbolic) rep.symbolic = verify_m11_identities(copies, d, CoeffMode::Complex);
  const LambdaOp op(WernerParams(d, alpha, copies));
  const std::size_t n = op.local_dim();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  auto check = [&](const CVector& v) {
    rep.worst_margin = std::min(rep.worst_margin, eig_hermitian(m11(op, v)).values.front());
    ++rep.samples;
  };
  for (const auto& v : extra_points) {
    if (v.size() != n) throw UsageError("sample vector has the wrong length");
    check(v);
  }
  for (std::size_t k = 0; k < samples; ++k) {
    CVector v(n);
    double nrm = 0;
    for (auto& x : v) {
      x = {nd(rng), nd(rng)};
      nrm += std::norm(x);
    }
    for (auto& x : v) x /= std::sqrt(nrm);
    check(v);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Theta for one copy, real variables; x-vectors are the w-variables.

/// <w1|M11|w1><w2|M22|w2> - <w1|M12|w2>^2 over werner_vars(d, N = 1).
inline Polynomial build_theta(int d, const Rational& alpha = Rational(1, 2)) {
  const WernerParams p(d, alpha);
  const LambdaOp op(p);
  const auto vars = werner_vars(p);
  auto var = [&](char fam, int k, std::size_t i) { return Polynomial::variable(vars, werner_var(fam, i, k, d, 1)); };
  auto form = [&](int k1, int k2) {
    Polynomial q(vars);
    for (const auto& z : op.nonzeros())
      q += z.value * var('w', k1, z.a) * var('v', k1, z.b) * var('w', k2, z.c) * var('v', k2, z.e);
    return q;
  };
  const Polynomial q12 = form(1, 2);
  return form(1, 1) * form(2, 2) - q12 * q12;
}

enum class ThetaMutation { None, DropG5 };

/// The closed-form sum of squares claimed equal to build_theta(d, 1/2).
inline Polynomial theta_sos_rhs(int d, ThetaMutation mutation = ThetaMutation::None) {
  const auto vars = werner_vars(WernerParams(d, Rational(1, 2)));
  std::vector<Polynomial> v1, v2, w1, w2;
  for (int i = 0; i < d; ++i) {
    v1.push_back(Polynomial::variable(vars, werner_var('v', i, 1, d, 1)));
    v2.push_back(Polynomial::variable(vars, werner_var('v', i, 2, d, 1)));
    w1.push_back(Polynomial::variable(vars, werner_var('w', i, 1, d, 1)));
    w2.push_back(Polynomial::variable(vars, werner_var('w', i, 2, d, 1)));
  }
  // [ijkl] = v_i^(1) v_j^(2) w_k^(1) w_l^(2)
  auto br = [&](int i, int j, int k, int l) { return v1[i] * v2[j] * w1[k] * w2[l]; };
  Polynomial first(vars), second(vars);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Polynomial s(vars);
      for (int k = 0; k < d; ++k)
        s += br(i, j, k, k) - br(j, i, k, k) + br(k, k, i, j) - br(k, k, j, i) + br(k, i, j, k) - br(i, k, k, j);
      first += s * s;
    }
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
          const Polynomial g1 = br(i, j, k, l) - br(i, j, l, k) - br(j, i, k, l) + br(j, i, l, k);
          const Polynomial g2 = br(k, l, i, j) - br(k, l, j, i) - br(l, k, i, j) + br(l, k, j, i);
          const Polynomial g3 = br(i, k, j, l) - br(i, k, l, j) - br(k, i, j, l) + br(k, i, l, j);
          const Polynomial g4 = br(j, l, i, k) - br(j, l, k, i) - br(l, j, i, k) + br(l, j, k, i);
          const Polynomial g5 = br(i, l, j, k) - br(i, l, k, j) - br(l, i, j, k) + br(l, i, k, j);
          const Polynomial g6 = br(j, k, i, l) - br(j, k, l, i) - br(k, j, i, l) + br(k, j, l, i);
          const Polynomial s1 = mutation == ThetaMutation::DropG5 ? g1 - g3 : g1 - g3 + g5;
          second += s1 * s1 + (g1 - g4 + g6) * (g1 - g4 + g6) + (g2 - g3 + g6) * (g2 - g3 + g6) +
                    (g2 - g4 + g5) * (g2 - g4 + g5);
        }
  return Rational(1, 2) * first + Rational(1, 48) * second;
}

inline constexpr int kThetaMaxD = 5;

inline IdentityCheck verify_theta_identity(int d, const Rational& alpha = Rational(1, 2),
                                           ThetaMutation mutation = ThetaMutation::None) {
  if (d < 2 || d > kThetaMaxD) throw GuardError("theta identity is checked for 2 <= d <= " + std::to_string(kThetaMaxD));
  return compare("theta d=" + std::to_string(d) + " alpha=" + to_string(alpha), build_theta(d, alpha),
                 theta_sos_rhs(d, mutation));
}

/// Smallest Theta over random real points (Gaussian entries).
inline double theta_min_real(const Polynomial& theta, std::size_t samples, std::uint64_t seed = 0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<double> x(theta.vars()->size());
  double best = INFINITY;
  for (std::size_t k = 0; k < samples; ++k) {
    for (auto& v : x) v = nd(rng);
    best = std::min(best, theta.eval(std::span<const double>(x)));
  }
  return best;
}

/// Smallest Theta over random complex points, from the matrices directly:
/// <x1|M11|x1><x2|M22|x2> - |<x1|M12|x2>|^2 with unit v1, v2, x1, x2.
inline double theta_min_complex(int d, const Rational& alpha, std::size_t samples, std::uint64_t seed = 0) {
  const LambdaOp op(WernerParams(d, alpha));
  const std::size_t n = op.local_dim();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  auto unit = [&] {
    CVector v(n);
    double s = 0;
    for (auto& x : v) {
      x = {nd(rng), nd(rng)};
      s += std::norm(x);
    }
    for (auto& x : v) x /= std::sqrt(s);
    return v;
  };
  auto form = [&](const CMatrix& m, std::size_t r0, std::size_t c0, const CVector& a, const CVector& b) {
    std::complex<double> s = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) s += std::conj(a[i]) * m(r0 + i, c0 + j) * b[j];
    return s;
  };
  double best = INFINITY;
  for (std::size_t k = 0; k < samples; ++k) {
    const CVector v1 = unit(), v2 = unit(), x1 = unit(), x2 = unit();
    const CMatrix m = build_block_m(op, v1, v2);
    const double t = form(m, 0, 0, x1, x1).real() * form(m, n, n, x2, x2).real() - std::norm(form(m, 0, n, x1, x2));
    best = std::min(best, t);
  }
  return best;
}

}  // namespace wsos
