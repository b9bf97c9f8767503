#pragma once

// Partially transposed Werner operator Lambda(alpha) = I - d*alpha*P+, its
// tensor powers, the V-matrices that embed Schmidt-rank-2 vectors, the 2x2
// block matrix M(alpha) and its real expectation polynomial f.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "wsos/eigen_sym.hpp"
#include "wsos/errors.hpp"
#include "wsos/matrix.hpp"
#include "wsos/parallel.hpp"
#include "wsos/poly.hpp"
#include "wsos/rational.hpp"

namespace wsos {

enum class WernerRegion { Ppt, NpptUndistillable, Distillable };

inline const char* to_string(WernerRegion r) {
  switch (r) {
    case WernerRegion::Ppt: return "ppt";
    case WernerRegion::NpptUndistillable: return "nppt-1-copy-undistillable";
    case WernerRegion::Distillable: return "1-copy-distillable";
  }
  return "?";
}

struct WernerParams {
  int d = 3;
  Rational alpha;
  int copies = 1;

  WernerParams() = default;
  WernerParams(int d_, Rational alpha_, int copies_ = 1) : d(d_), alpha(std::move(alpha_)), copies(copies_) {
    validate();
  }

  void validate() const {
    if (d < 2) throw UsageError("local dimension d must be at least 2");
    if (copies < 1) throw UsageError("number of copies N must be positive");
    if (alpha < -1 || alpha > 1) throw UsageError("alpha must lie in [-1, 1]");
  }

  WernerRegion region() const {
    if (alpha <= Rational(1, d)) return WernerRegion::Ppt;
    if (alpha <= Rational(1, 2)) return WernerRegion::NpptUndistillable;
    return WernerRegion::Distillable;
  }

  /// d^N, the dimension of one party's N-copy space.
  std::size_t local_dim() const { return ipow(d, copies); }

  static std::size_t ipow(std::size_t b, int e) {
    std::size_t r = 1;
    for (int i = 0; i < e; ++i) {
      if (r > std::numeric_limits<std::size_t>::max() / b) throw GuardError("dimension overflow");
      r *= b;
    }
    return r;
  }
};

/// Lambda(alpha)^{tensor N} on (C^d (x) C^d)^{tensor N}. Rows and columns are
/// indexed in interleaved order a1 b1 a2 b2 ...; nonzeros are also reported in
/// split coordinates (a-vector index, b-vector index), each in [0, d^N).
class LambdaOp {
 public:
  struct Nonzero {
    std::size_t a, b, c, e;  // <a b| Lambda |c e>
    Rational value;
  };

  static constexpr std::size_t kDenseLimit = 1024;

  explicit LambdaOp(WernerParams p) : p_(std::move(p)) {
    p_.validate();
    local_ = p_.local_dim();
    build_nonzeros();
  }

  const WernerParams& params() const { return p_; }
  std::size_t dim() const { return local_ * local_; }
  std::size_t local_dim() const { return local_; }
  const std::vector<Nonzero>& nonzeros() const { return nz_; }

  /// Interleaved row index of the split pair (a-vector, b-vector).
  std::size_t interleave(std::size_t a, std::size_t b) const {
    const std::size_t d = p_.d;
    std::size_t r = 0, scale = 1;
    for (int i = 0; i < p_.copies; ++i) {
      r += scale * (b % d);
      scale *= d;
      r += scale * (a % d);
      scale *= d;
      a /= d;
      b /= d;
    }
    return r;
  }

  SymMatrix<Rational> dense() const {
    if (dim() > kDenseLimit)
      throw GuardError("dense Lambda of size " + std::to_string(dim()) + " exceeds the limit " +
                       std::to_string(kDenseLimit));
    SymMatrix<Rational> m(dim(), Rational(0));
    for (const auto& z : nz_) {
      const std::size_t r = interleave(z.a, z.b), c = interleave(z.c, z.e);
      if (r <= c) m(r, c) = z.value;
    }
    return m;
  }

 private:
  void build_nonzeros() {
    const int d = p_.d;
    // One copy: <ab|L|ce> = delta_ac delta_be - alpha delta_ab delta_ce.
    std::vector<Nonzero> one;
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        Rational v = 1;
        if (a == b) v -= p_.alpha;
        if (v != 0) one.push_back({std::size_t(a), std::size_t(b), std::size_t(a), std::size_t(b), v});
      }
    for (int a = 0; a < d; ++a)
      for (int c = 0; c < d; ++c)
        if (a != c && p_.alpha != 0)
          one.push_back({std::size_t(a), std::size_t(a), std::size_t(c), std::size_t(c), -p_.alpha});
    nz_ = {{0, 0, 0, 0, Rational(1)}};
    std::size_t scale = 1;
    for (int copy = 0; copy < p_.copies; ++copy) {
      std::vector<Nonzero> next;
      next.reserve(nz_.size() * one.size());
      for (const auto& x : nz_)
        for (const auto& y : one)
          next.push_back({x.a + scale * y.a, x.b + scale * y.b, x.c + scale * y.c, x.e + scale * y.e,
                          x.value * y.value});
      nz_ = std::move(next);
      scale *= d;
    }
  }

  WernerParams p_;
  std::size_t local_ = 0;
  std::vector<Nonzero> nz_;
};

inline LambdaOp build_lambda(const WernerParams& p) { return LambdaOp(p); }

/// V-matrix for coefficient vector v (length d^N): rows interleaved (a, b),
/// columns a, entry v[b] on the diagonal blocks.
template <class T>
Matrix<T> build_v(const LambdaOp& op, const std::vector<T>& v) {
  const std::size_t n = op.local_dim();
  if (v.size() != n) throw UsageError("V-matrix needs a vector of length d^N");
  Matrix<T> m(op.dim(), n, T(0));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) m(op.interleave(a, b), a) = v[b];
  return m;
}

/// Exact block matrix [[V1^T L V1, V1^T L V2], [V2^T L V1, V2^T L V2]] for real
/// rational coefficient vectors (no normalization required).
inline SymMatrix<Rational> block_m_exact(const LambdaOp& op, const std::vector<Rational>& v1,
                                         const std::vector<Rational>& v2) {
  const std::size_t n = op.local_dim();
  if (v1.size() != n || v2.size() != n) throw UsageError("block matrix needs vectors of length d^N");
  const std::vector<Rational>* v[2] = {&v1, &v2};
  Matrix<Rational> m(2 * n, 2 * n, Rational(0));
  for (const auto& z : op.nonzeros())
    for (int k1 = 0; k1 < 2; ++k1)
      for (int k2 = 0; k2 < 2; ++k2) {
        const Rational& x = (*v[k1])[z.b];
        const Rational& y = (*v[k2])[z.e];
        if (x == 0 || y == 0) continue;
        m(k1 * n + z.a, k2 * n + z.c) += z.value * x * y;
      }
  return symmetric_from_upper(m);
}

/// Numeric Hermitian block matrix M(alpha) for unit vectors v1, v2 in C^{d^N}.
inline CMatrix build_block_m(const LambdaOp& op, const CVector& v1, const CVector& v2, double tol = 1e-12) {
  const std::size_t n = op.local_dim();
  for (const CVector* v : {&v1, &v2}) {
    if (v->size() != n) throw UsageError("block matrix needs vectors of length d^N");
    double s = 0;
    for (const auto& x : *v) s += std::norm(x);
    if (std::fabs(std::sqrt(s) - 1.0) > tol) throw UsageError("block matrix vectors must be normalized");
  }
  const CVector* v[2] = {&v1, &v2};
  CMatrix m(2 * n, 2 * n, 0.0);
  for (const auto& z : op.nonzeros()) {
    const double val = z.value.get_d();
    for (int k1 = 0; k1 < 2; ++k1)
      for (int k2 = 0; k2 < 2; ++k2)
        m(k1 * n + z.a, k2 * n + z.c) += val * std::conj((*v[k1])[z.b]) * (*v[k2])[z.e];
  }
  return m;
}

enum class FMode { Real, ZCollapse };

/// Variable name of component `index` (a d^N multi-index) of vector v^(k) or w^(k).
inline std::string werner_var(char family, std::size_t index, int k, int d, int copies) {
  std::string digits;
  for (int i = 0; i < copies; ++i) {
    digits = std::to_string(index % d + 1) + (i ? "." : "") + digits;
    index /= d;
  }
  return std::string(1, family) + digits + "_" + std::to_string(k);
}

/// Real variable table v^(1), v^(2), w^(1), w^(2), components in index order.
inline VarTablePtr werner_vars(const WernerParams& p) {
  const std::size_t n = p.local_dim();
  std::vector<std::string> names;
  for (char fam : {'v', 'w'})
    for (int k = 1; k <= 2; ++k)
      for (std::size_t i = 0; i < n; ++i) names.push_back(werner_var(fam, i, k, p.d, p.copies));
  return VarTable::make(std::move(names));
}

inline VarTablePtr z_collapse_vars() {
  return VarTable::make({"z", "v1_1", "v2_1", "v1_2", "v2_2", "w1_1", "w2_1", "w1_2", "w2_2"});
}

/// f = sum_{k1,k2} <w^(k1)| M_(k1,k2) |w^(k2)> over real variables.
inline Polynomial build_f(const WernerParams& p, FMode mode = FMode::Real) {
  p.validate();
  if (mode == FMode::ZCollapse && (p.d != 3 || p.copies != 1))
    throw UsageError("z-collapse is defined for d=3, N=1 only");
  const LambdaOp op(p);
  const std::size_t n = op.local_dim();
  auto vars = werner_vars(p);
  const std::size_t nv = vars->size();
  auto v_index = [&](int k, std::size_t i) { return (k - 1) * n + i; };
  auto w_index = [&](int k, std::size_t i) { return 2 * n + (k - 1) * n + i; };
  Polynomial f(vars);
  for (const auto& z : op.nonzeros())
    for (int k1 = 1; k1 <= 2; ++k1)
      for (int k2 = 1; k2 <= 2; ++k2) {
        Monomial m(nv);
        m.bump(w_index(k1, z.a));
        m.bump(v_index(k1, z.b));
        m.bump(w_index(k2, z.c));
        m.bump(v_index(k2, z.e));
        f.add_term(m, z.value);
      }
  if (mode == FMode::Real) return f;
  auto zt = z_collapse_vars();
  const Polynomial zv = Polynomial::variable(zt, "z");
  return substitute(f, {{"v3_1", zv}, {"v3_2", zv}, {"w3_1", zv}, {"w3_2", zv}}, zt);
}

struct Rank2Vector {
  double c1 = 1, c2 = 0;
  CVector e1, e2, f1, f2;  // orthonormal pairs in C^{d^N}

  /// Amplitude matrix Psi(a, b) of psi = c1 e1 (x) f1 + c2 e2 (x) f2.
  CMatrix amplitudes() const {
    const std::size_t n = e1.size();
    CMatrix psi(n, n, 0.0);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) psi(a, b) = c1 * e1[a] * f1[b] + c2 * e2[a] * f2[b];
    return psi;
  }
};

/// <psi| Lambda^{tensor N} |psi> for an amplitude matrix Psi(a, b).
inline double expectation(const LambdaOp& op, const CMatrix& psi) {
  std::complex<double> s = 0;
  for (const auto& z : op.nonzeros()) s += z.value.get_d() * std::conj(psi(z.a, z.b)) * psi(z.c, z.e);
  return s.real();
}

struct Rank2Result {
  double min_value = 0;
  Rank2Vector argmin;
  std::size_t best_restart = 0;
  std::vector<double> restart_values;
};

namespace detail {

/// Top-2 eigenpairs (descending) of the Hermitian matrix A A^dagger.
inline std::pair<std::vector<CVector>, std::vector<double>> top2_left(const CMatrix& a) {
  const std::size_t n = a.rows();
  CMatrix g(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < a.cols(); ++k) g(i, j) += a(i, k) * std::conj(a(j, k));
  const auto e = eig_hermitian(g);
  std::vector<CVector> vecs{e.vectors[n - 1], e.vectors[n - 2]};
  std::vector<double> vals{std::max(0.0, e.values[n - 1]), std::max(0.0, e.values[n - 2])};
  return {vecs, vals};
}

inline double rank2_restart(const LambdaOp& op, std::mt19937_64& rng, CMatrix& psi_out, double step_tol,
                            int max_iter) {
  const std::size_t n = op.local_dim();
  std::normal_distribution<double> gauss;
  auto random_frame = [&] {
    std::vector<CVector> f(2, CVector(n));
    for (auto& v : f)
      for (auto& x : v) x = {gauss(rng), gauss(rng)};
    // Gram-Schmidt.
    for (int j = 0; j < 2; ++j) {
      for (int i = 0; i < j; ++i) {
        std::complex<double> dot = 0;
        for (std::size_t k = 0; k < n; ++k) dot += std::conj(f[i][k]) * f[j][k];
        for (std::size_t k = 0; k < n; ++k) f[j][k] -= dot * f[i][k];
      }
      double nrm = 0;
      for (auto& x : f[j]) nrm += std::norm(x);
      nrm = std::sqrt(nrm);
      for (auto& x : f[j]) x /= nrm;
    }
    return f;
  };
  // A frame of two orthonormal vectors spanning the leading part of `cols`.
  auto frame_of = [&](const CMatrix& m) {
    auto [vecs, vals] = top2_left(m);
    if (vals[1] <= 1e-28 * std::max(1.0, vals[0])) {
      // Rank one: any unit vector orthogonal to the first one completes the frame.
      auto extra = random_frame()[0];
      std::complex<double> dot = 0;
      for (std::size_t k = 0; k < n; ++k) dot += std::conj(vecs[0][k]) * extra[k];
      double nrm = 0;
      for (std::size_t k = 0; k < n; ++k) {
        extra[k] -= dot * vecs[0][k];
        nrm += std::norm(extra[k]);
      }
      nrm = std::sqrt(nrm);
      for (auto& x : extra) x /= nrm;
      vecs[1] = extra;
    }
    return vecs;
  };

  std::vector<CVector> f = random_frame();
  double value = std::numeric_limits<double>::infinity();
  CMatrix psi(n, n, 0.0);
  for (int it = 0; it < max_iter; ++it) {
    const double before = value;
    // b-side fixed: psi = sum_j g_j (x) f_j; minimize over g (index a*2 + j).
    CMatrix hb(2 * n, 2 * n, 0.0);
    for (const auto& z : op.nonzeros()) {
      const double val = z.value.get_d();
      for (int j = 0; j < 2; ++j)
        for (int jp = 0; jp < 2; ++jp) hb(z.a * 2 + j, z.c * 2 + jp) += val * std::conj(f[j][z.b]) * f[jp][z.e];
    }
    auto eb = eig_hermitian(hb);
    const CVector& g = eb.vectors.front();
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) psi(a, b) = g[a * 2] * f[0][b] + g[a * 2 + 1] * f[1][b];
    // a-side fixed: psi = sum_i e_i (x) h_i; minimize over h (index i*n + b).
    const std::vector<CVector> e = frame_of(psi);
    CMatrix ha(2 * n, 2 * n, 0.0);
    for (const auto& z : op.nonzeros()) {
      const double val = z.value.get_d();
      for (int i = 0; i < 2; ++i)
        for (int ip = 0; ip < 2; ++ip) ha(i * n + z.b, ip * n + z.e) += val * std::conj(e[i][z.a]) * e[ip][z.c];
    }
    auto ea = eig_hermitian(ha);
    const CVector& h = ea.vectors.front();
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) psi(a, b) = e[0][a] * h[b] + e[1][a] * h[n + b];
    value = ea.values.front();
    f = frame_of(psi.transpose());
    if (before - value < step_tol) break;
  }
  psi_out = psi;
  return value;
}

inline Rank2Vector schmidt_rank2(const CMatrix& psi) {
  const std::size_t n = psi.rows();
  auto [u, s2] = top2_left(psi);
  Rank2Vector r;
  double s[2] = {std::sqrt(s2[0]), std::sqrt(s2[1])};
  std::vector<CVector> f(2, CVector(n, 0.0));
  for (int j = 0; j < 2; ++j) {
    if (s[j] <= 1e-14) {
      // Unused Schmidt slot: pick a unit vector orthogonal to f[0].
      std::size_t k = 0;
      double best = 2;
      for (std::size_t i = 0; i < n; ++i)
        if (std::abs(f[0][i]) < best) best = std::abs(f[0][i]), k = i;
      CVector x(n, 0.0);
      x[k] = 1;
      std::complex<double> dot = 0;
      for (std::size_t i = 0; i < n; ++i) dot += std::conj(f[0][i]) * x[i];
      double nrm = 0;
      for (std::size_t i = 0; i < n; ++i) {
        x[i] -= dot * f[0][i];
        nrm += std::norm(x[i]);
      }
      for (auto& y : x) y /= std::sqrt(nrm);
      f[j] = x;
      s[j] = 0;
      continue;
    }
    for (std::size_t b = 0; b < n; ++b) {
      std::complex<double> acc = 0;
      for (std::size_t a = 0; a < n; ++a) acc += psi(a, b) * std::conj(u[j][a]);
      f[j][b] = acc / s[j];
    }
  }
  const double norm = std::hypot(s[0], s[1]);
  r.c1 = s[0] / norm;
  r.c2 = s[1] / norm;
  r.e1 = u[0];
  r.e2 = u[1];
  r.f1 = f[0];
  r.f2 = f[1];
  return r;
}

}  // namespace detail

/// Minimum of <psi|Lambda^{tensor N}|psi> over unit Schmidt-rank-2 vectors by
/// alternating Hermitian eigen-updates from seeded random restarts.
inline Rank2Result min_rank2(const WernerParams& p, int restarts = 50, std::uint64_t seed = 0,
                             double step_tol = 1e-10, int max_iter = 500) {
  p.validate();
  if (restarts < 1) throw UsageError("restarts must be positive");
  const LambdaOp op(p);
  if (op.dim() > 10000)
    throw GuardError("min_rank2 needs d^(2N) <= 10000 (got " + std::to_string(op.dim()) + ")");
  std::vector<double> values(restarts);
  std::vector<CMatrix> psis(restarts);
  parallel_for(restarts, [&](std::size_t r) {
    std::mt19937_64 rng(seed + r);
    values[r] = detail::rank2_restart(op, rng, psis[r], step_tol, max_iter);
  });
  Rank2Result out;
  out.restart_values = values;
  out.best_restart = 0;
  for (std::size_t r = 1; r < values.size(); ++r)
    if (values[r] < values[out.best_restart]) out.best_restart = r;
  out.argmin = detail::schmidt_rank2(psis[out.best_restart]);
  out.min_value = expectation(op, out.argmin.amplitudes());
  return out;
}

}  // namespace wsos
