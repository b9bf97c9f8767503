#pragma once

// Exact SOS certificates: ascent, rounding, exact repair, exact PSD check.
// Rational zeros of the target force M X(p) = 0 on every PSD Gram matrix;
// that face is imposed exactly before the ascent so that certificates can
// exist for targets with real zeros.

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wsos/ascent.hpp"
#include "wsos/exact_linalg.hpp"
#include "wsos/gram.hpp"
#include "wsos/werner.hpp"

namespace wsos {

enum class SosStatus { Sos, NotSosEvidence, NotSosProof };

inline const char* to_string(SosStatus s) {
  switch (s) {
    case SosStatus::Sos: return "sos";
    case SosStatus::NotSosEvidence: return "not-sos-evidence";
    case SosStatus::NotSosProof: return "not-sos-proof";
  }
  return "?";
}

struct SosCertificate {
  MonomialBasis basis;
  SymMatrix<Rational> gram;
  Polynomial target;
  LdlFactor ldl;

  /// X^T gram X == target and gram PSD, both exact.
  bool verify() const {
    if (quadratic_form(basis, gram) != target) return false;
    return psd_exact(gram).psd;
  }

  /// target = sum_k weights[k] * squares[k]^2.
  std::vector<Polynomial> squares() const {
    std::vector<Polynomial> out;
    for (const auto& col : ldl.columns) {
      Polynomial q(basis.vars);
      for (std::size_t i = 0; i < col.size(); ++i)
        if (col[i] != 0) q.add_term(basis.monomials[i], col[i]);
      out.push_back(std::move(q));
    }
    return out;
  }
  const std::vector<Rational>& weights() const { return ldl.pivots; }

  Rational eval_sum_of_squares(const std::vector<Rational>& x) const {
    const auto xv = basis.evaluate(x);
    Rational s(0);
    for (std::size_t k = 0; k < ldl.columns.size(); ++k) {
      Rational q(0);
      for (std::size_t i = 0; i < xv.size(); ++i)
        if (ldl.columns[k][i] != 0) q += ldl.columns[k][i] * xv[i];
      s += ldl.pivots[k] * q * q;
    }
    return s;
  }
};

/// Certificate from an exact Gram matrix, or nullopt if it is not one.
inline std::optional<SosCertificate> make_certificate(const MonomialBasis& basis, const Polynomial& target,
                                                      const SymMatrix<Rational>& gram) {
  if (gram.n() != basis.size() || quadratic_form(basis, gram) != target) return std::nullopt;
  auto v = psd_exact(gram);
  if (!v.psd) return std::nullopt;
  return SosCertificate{basis, gram, target, std::move(v.ldl)};
}

/// Points of grid^n where target vanishes (n <= max_vars), in lexicographic grid order.
inline std::vector<std::vector<Rational>> find_rational_zeros(const Polynomial& target,
                                                              const std::vector<Rational>& grid = {-1, 0, 1},
                                                              std::size_t max_vars = 10) {
  const std::size_t n = target.vars()->size();
  std::vector<std::vector<Rational>> out;
  if (n > max_vars || grid.empty()) return out;
  std::vector<double> gd;
  for (const auto& g : grid) gd.push_back(g.get_d());
  double scale = 0;
  for (const auto& [m, c] : target.terms()) scale += std::fabs(c.get_d());
  std::vector<std::size_t> idx(n, 0);
  std::vector<double> xd(n);
  std::vector<Rational> xq(n);
  while (true) {
    for (std::size_t i = 0; i < n; ++i) xd[i] = gd[idx[i]];
    if (std::fabs(target.eval(std::span<const double>(xd))) <= 1e-9 * std::max(1.0, scale)) {
      for (std::size_t i = 0; i < n; ++i) xq[i] = grid[idx[i]];
      if (target.eval(xq) == 0) out.push_back(xq);
    }
    std::size_t k = n;
    while (k > 0 && ++idx[k - 1] == grid.size()) idx[--k] = 0;
    if (k == 0) break;
  }
  return out;
}

/// The face of the Gram family cut out by M x = 0 for x in a kernel.
struct FaceReduction {
  std::vector<std::vector<Rational>> kernel;  // independent, in RREF
  std::vector<std::vector<Rational>> complement;  // basis U of the orthogonal complement
  AffineSymMatrix face;     // members of the family that kill the kernel, parametrized by s
  AffineSymMatrix reduced;  // U^T face(s) U: PSD iff face(s) PSD
  bool consistent = true;   // false: no family member kills the kernel, so no PSD member exists
};

namespace detail {

inline SparseSym combine(const std::vector<SparseSym>& gens, const std::vector<Rational>& coef) {
  std::map<std::pair<std::size_t, std::size_t>, Rational> acc;
  for (std::size_t k = 0; k < gens.size(); ++k) {
    if (coef[k] == 0) continue;
    for (const auto& [i, j, v] : gens[k].entries) acc[{i, j}] += coef[k] * v;
  }
  SparseSym out;
  for (const auto& [ij, v] : acc)
    if (v != 0) out.add(ij.first, ij.second, v);
  return out;
}

inline SymMatrix<Rational> congruence(const std::vector<std::vector<Rational>>& u, const SparseSym& d) {
  const std::size_t r = u.size();
  SymMatrix<Rational> out(r, Rational(0));
  for (const auto& [i, j, v] : d.entries)
    for (std::size_t a = 0; a < r; ++a) {
      if (u[a][i] == 0 && u[a][j] == 0) continue;
      for (std::size_t b = a; b < r; ++b) {
        Rational s = u[a][i] * u[b][j];
        if (i != j) s += u[a][j] * u[b][i];
        if (s != 0) out(a, b) += v * s;
      }
    }
  return out;
}

inline SparseSym dense_to_sparse(const SymMatrix<Rational>& m) {
  SparseSym s;
  for (std::size_t i = 0; i < m.n(); ++i)
    for (std::size_t j = i; j < m.n(); ++j)
      if (m(i, j) != 0) s.add(i, j, m(i, j));
  return s;
}

}  // namespace detail

/// Work estimate used to guard facial reduction: params * basis^2.
inline double face_reduction_cost(const GramFamily& fam) {
  const double n = static_cast<double>(fam.basis.size());
  return static_cast<double>(fam.dim()) * n * n;
}

/// Rows spanning the same space as `vecs`, independent (exact RREF).
inline std::vector<std::vector<Rational>> independent_rows(const std::vector<std::vector<Rational>>& vecs,
                                                           std::size_t n) {
  std::vector<std::vector<Rational>> out;
  if (vecs.empty()) return out;
  Matrix<Rational> m(vecs.size(), n, Rational(0));
  for (std::size_t r = 0; r < vecs.size(); ++r)
    for (std::size_t i = 0; i < n; ++i) m(r, i) = vecs[r][i];
  const auto piv = rref(m);
  for (std::size_t r = 0; r < piv.size(); ++r) {
    std::vector<Rational> row(n);
    for (std::size_t i = 0; i < n; ++i) row[i] = m(r, i);
    out.push_back(std::move(row));
  }
  return out;
}

/// X(p) for each zero p.
inline std::vector<std::vector<Rational>> zero_vectors(const MonomialBasis& basis,
                                                       const std::vector<std::vector<Rational>>& zeros) {
  std::vector<std::vector<Rational>> out;
  for (const auto& z : zeros) out.push_back(basis.evaluate(z));
  return independent_rows(out, basis.size());
}

/// Face of the family whose members annihilate every vector in `kernel`.
inline FaceReduction face_reduce(const GramFamily& fam, const std::vector<std::vector<Rational>>& kernel) {
  const std::size_t n = fam.basis.size(), p = fam.dim();
  FaceReduction out;
  out.kernel = independent_rows(kernel, n);
  // (M0 + sum_k t_k G_k) x = 0 for each kernel vector x.
  Matrix<Rational> a(n * out.kernel.size(), p, Rational(0));
  std::vector<Rational> rhs(n * out.kernel.size());
  for (std::size_t q = 0; q < out.kernel.size(); ++q) {
    const auto& x = out.kernel[q];
    for (std::size_t i = 0; i < n; ++i) {
      Rational s(0);
      for (std::size_t j = 0; j < n; ++j)
        if (x[j] != 0) s += fam.particular(i, j) * x[j];
      rhs[q * n + i] = -s;
    }
    for (std::size_t k = 0; k < p; ++k)
      for (const auto& [i, j, v] : fam.generators[k].entries) {
        a(q * n + i, k) += v * x[j];
        if (i != j) a(q * n + j, k) += v * x[i];
      }
  }
  const auto sol = solve_affine(a, rhs);
  if (!sol) {
    out.consistent = false;
    return out;
  }
  out.face.base = fam.particular;
  for (std::size_t k = 0; k < p; ++k) {
    if (sol->particular[k] == 0) continue;
    for (const auto& [i, j, v] : fam.generators[k].entries) out.face.base(i, j) += sol->particular[k] * v;
  }
  for (const auto& nv : sol->nullspace) out.face.dirs.push_back(detail::combine(fam.generators, nv));

  if (out.kernel.empty()) {
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<Rational> e(n);
      e[i] = 1;
      out.complement.push_back(std::move(e));
    }
  } else {
    Matrix<Rational> km(out.kernel.size(), n);
    for (std::size_t q = 0; q < out.kernel.size(); ++q)
      for (std::size_t i = 0; i < n; ++i) km(q, i) = out.kernel[q][i];
    out.complement = nullspace(km);
  }
  out.reduced.base = detail::congruence(out.complement, detail::dense_to_sparse(out.face.base));
  for (const auto& d : out.face.dirs) out.reduced.dirs.push_back(detail::dense_to_sparse(detail::congruence(out.complement, d)));
  return out;
}

struct CertifyOptions {
  long rounding_bound = 1000000;
  double margin = 1e-9;          // required lambda_min of the candidate before rounding
  bool face_reduction = true;
  double face_reduction_limit = 5e6;  // on face_reduction_cost
  int kernel_rounds = 2;         // extra face reductions from the numeric kernel at the optimum
  double kernel_tol = 1e-6;
  long kernel_denominator = 1000;
  bool forcing_proof = true;     // try exact PSM forcing when no certificate is found
  std::size_t forcing_max_basis = 40;
  AscentOptions ascent;
};

struct CertifyResult {
  SosStatus status = SosStatus::NotSosEvidence;
  std::optional<SosCertificate> certificate;
  double best_lambda_min = -INFINITY;  // on the family actually searched (the face, when reduced)
  std::size_t zeros_found = 0;
  std::size_t kernel_dim = 0;          // from rational zeros
  std::size_t refined_kernel_dim = 0;  // after numeric-kernel rounds (0 if none ran)
  bool face_reduced = false;
  std::optional<NonSosProof> forcing;
  std::string note;
};

namespace detail {

/// Rational guess for the span of eigenvectors of m with eigenvalue below tol:
/// the numeric RREF of that span with entries snapped to small denominators.
inline std::vector<std::vector<Rational>> numeric_kernel(const SymMatrix<double>& m, double tol, long max_den) {
  const EigResult e = eig_sym(m, 1e-13);
  const std::size_t n = m.n();
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < n && e.values[k] < tol; ++k) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = e.vectors(i, k);
    rows.push_back(std::move(v));
  }
  std::size_t lead = 0;
  for (std::size_t r = 0; r < rows.size() && lead < n; ++r, ++lead) {
    std::size_t best_row = r;
    for (;; ++lead) {
      if (lead == n) return {};
      best_row = r;
      for (std::size_t q = r; q < rows.size(); ++q)
        if (std::fabs(rows[q][lead]) > std::fabs(rows[best_row][lead])) best_row = q;
      if (std::fabs(rows[best_row][lead]) > 1e-8) break;
    }
    std::swap(rows[r], rows[best_row]);
    const double piv = rows[r][lead];
    for (auto& x : rows[r]) x /= piv;
    for (std::size_t q = 0; q < rows.size(); ++q) {
      if (q == r) continue;
      const double f = rows[q][lead];
      for (std::size_t i = 0; i < n; ++i) rows[q][i] -= f * rows[r][i];
    }
  }
  std::vector<std::vector<Rational>> out;
  for (const auto& row : rows) {
    std::vector<Rational> q(n);
    for (std::size_t i = 0; i < n; ++i)
      if (std::fabs(row[i]) > 1e-9) q[i] = best_rational(row[i], max_den);
    out.push_back(std::move(q));
  }
  return out;
}

}  // namespace detail

/// Ascent, then rounding and exact verification. Kernels derived from rational
/// zeros are exact consequences of PSD, so an inconsistent face is a proof;
/// kernels guessed from the numeric optimum are only used to find certificates.
inline CertifyResult certify(const GramFamily& fam, const CertifyOptions& opt = {}) {
  CertifyResult res;
  if (!fam.representable()) {
    res.note = "target has monomials that no pair of basis monomials produces";
    return res;
  }
  std::vector<std::vector<Rational>> kernel;
  bool reduce = false;
  if (opt.face_reduction) {
    const auto zeros = find_rational_zeros(fam.target);
    res.zeros_found = zeros.size();
    if (!zeros.empty()) {
      if (face_reduction_cost(fam) > opt.face_reduction_limit) {
        res.note = "face reduction skipped: family too large";
      } else {
        kernel = zero_vectors(fam.basis, zeros);
        res.kernel_dim = kernel.size();
        reduce = !kernel.empty();
      }
    }
  }

  const std::string skipped = res.note;
  auto note = [&](const std::string& msg) { res.note = skipped.empty() ? msg : skipped + "; " + msg; };
  for (int round = 0;; ++round) {
    std::optional<FaceReduction> face;
    AffineSymMatrix search = fam.affine();
    if (reduce) {
      face = face_reduce(fam, kernel);
      if (!face->consistent) {
        if (round == 0) {
          res.status = SosStatus::NotSosProof;
          res.note = "no Gram matrix annihilates X(p) at the rational zeros of the target";
          return res;
        }
        note("guessed kernel is inconsistent with the family");
        break;
      }
      search = face->reduced;
      res.face_reduced = true;
      if (round > 0) res.refined_kernel_dim = face->kernel.size();
    }
    const auto asc = maximize_lambda_min(search, opt.ascent);
    if (round == 0 || asc.best_value > res.best_lambda_min) res.best_lambda_min = asc.best_value;
    if (asc.best_value > opt.margin) {
      SymMatrix<Rational> gram;
      if (face) {
        std::vector<Rational> s;
        for (double x : asc.best_t) s.push_back(round_to_denominator(x, opt.rounding_bound));
        gram = face->face.at(s);
      } else {
        const auto md = search.at(asc.best_t);
        SymMatrix<Rational> y(md.n());
        for (std::size_t i = 0; i < md.n(); ++i)
          for (std::size_t j = i; j < md.n(); ++j) y(i, j) = round_to_denominator(md(i, j), opt.rounding_bound);
        gram = fam.project(y);
      }
      if (auto cert = make_certificate(fam.basis, fam.target, gram)) {
        res.status = SosStatus::Sos;
        res.certificate = std::move(cert);
        res.note.clear();
        return res;
      }
      note("rounding to denominators <= " + std::to_string(opt.rounding_bound) + " broke PSD (lambda_min margin " +
           std::to_string(asc.best_value) + ")");
      break;
    }
    note("ascent did not reach a PSD member");
    // Optimum sits on the boundary: guess the rest of its kernel and try again.
    const bool near_zero = asc.best_value > -opt.kernel_tol;
    if (round >= opt.kernel_rounds || !near_zero || face_reduction_cost(fam) > opt.face_reduction_limit) break;
    const auto full = face ? face->face.at(asc.best_t) : search.at(asc.best_t);
    auto guess = detail::numeric_kernel(full, opt.kernel_tol, opt.kernel_denominator);
    guess.insert(guess.end(), kernel.begin(), kernel.end());
    guess = independent_rows(guess, fam.basis.size());
    if (guess.size() <= kernel.size()) break;
    kernel = std::move(guess);
    reduce = true;
  }

  if (opt.forcing_proof && fam.basis.size() <= opt.forcing_max_basis) {
    auto proof = auto_forcing(fam.affine());
    if (proof.proven) {
      res.status = SosStatus::NotSosProof;
      res.note = "principal-submatrix forcing leaves no PSD member";
    }
    res.forcing = std::move(proof);
  }
  return res;
}

/// (sum_i x_i^2)^r over the variables of `vars`.
inline Polynomial sum_of_squares_power(const VarTablePtr& vars, int r) {
  Polynomial s(vars);
  for (std::size_t i = 0; i < vars->size(); ++i) {
    std::vector<Monomial::Exponent> e(vars->size(), 0);
    e[i] = 2;
    s.add_term(Monomial(e), Rational(1));
  }
  return s.pow(static_cast<unsigned>(r));
}

struct ReznickResult {
  int r = 0;
  std::size_t basis_size = 0;
  std::size_t num_params = 0;
  double ascent_lambda_min = -INFINITY;  // plain ascent on the whole family
  CertifyResult certify;
};

inline constexpr std::size_t kReznickBasisLimit = 5000;

inline ReznickResult reznick_trial(const Polynomial& target, int r, const CertifyOptions& opt = {}) {
  if (r < 0) throw UsageError("multiplier exponent must be non-negative");
  const auto deg = is_homogeneous(target);
  if (!deg || *deg % 2 != 0) throw UsageError("Reznick multiplier needs a homogeneous target of even degree");
  const Polynomial g = target * sum_of_squares_power(target.vars(), r);
  const int half = (*deg + 2 * r) / 2;
  // Size of the unreduced candidate set guards the enumeration itself.
  double candidates = 1;
  for (int k = 1; k <= half; ++k)
    candidates = candidates * static_cast<double>(target.vars()->size() + k - 1) / k;
  if (candidates > static_cast<double>(kReznickBasisLimit))
    throw GuardError("basis of " + std::to_string(static_cast<long long>(candidates)) + " monomials exceeds " +
                     std::to_string(kReznickBasisLimit));
  const auto basis = enumerate_basis(target.vars(), half, BasisKind::Reduced, &g);
  const auto fam = build_gram_family(g, basis);
  ReznickResult out;
  out.r = r;
  out.basis_size = basis.size();
  out.num_params = fam.dim();
  out.certify = certify(fam, opt);
  const bool searched_whole = !out.certify.face_reduced && std::isfinite(out.certify.best_lambda_min);
  out.ascent_lambda_min = searched_whole ? out.certify.best_lambda_min
                                         : maximize_lambda_min(fam.affine(), opt.ascent).best_value;
  return out;
}

/// Smallest r in [0, r_max] whose trial yields an exact certificate.
inline std::optional<ReznickResult> smallest_reznick_r(const Polynomial& target, int r_max,
                                                       const CertifyOptions& opt = {},
                                                       std::vector<ReznickResult>* trials = nullptr) {
  for (int r = 0; r <= r_max; ++r) {
    auto t = reznick_trial(target, r, opt);
    if (trials) trials->push_back(t);
    if (t.certify.status == SosStatus::Sos) return t;
  }
  return std::nullopt;
}

struct SweepRow {
  Rational alpha;
  double best_lambda_min = -INFINITY;
  bool has_real_zero = false;  // some X(p) != 0 at a zero p: the maximum is <= 0
  bool certified = false;      // exact PSD member found: with a real zero the maximum is exactly 0
};

/// Best lambda_min of the one-copy Gram family per alpha (z-collapsed form when d = 3).
inline std::vector<SweepRow> alpha_sweep(int d, const std::vector<Rational>& alphas, const AscentOptions& asc = {},
                                         bool certify_points = true) {
  std::vector<SweepRow> rows;
  for (const auto& a : alphas) {
    if (a < Rational(1, d) || a > Rational(1, 2))
      throw UsageError("sweep grid must lie in [1/d, 1/2]; got " + to_string(a));
    const WernerParams params(d, a);
    const Polynomial f = build_f(params, d == 3 ? FMode::ZCollapse : FMode::Real);
    const auto basis = enumerate_basis(f.vars(), 2, BasisKind::Reduced, &f);
    const auto fam = build_gram_family(f, basis);
    SweepRow row{a};
    row.best_lambda_min = maximize_lambda_min(fam.affine(), asc).best_value;
    for (const auto& z : find_rational_zeros(f)) {
      const auto xv = basis.evaluate(z);
      if (std::any_of(xv.begin(), xv.end(), [](const Rational& q) { return q != 0; })) {
        row.has_real_zero = true;
        break;
      }
    }
    if (certify_points) {
      CertifyOptions co;
      co.ascent = asc;
      co.forcing_proof = false;
      row.certified = certify(fam, co).status == SosStatus::Sos;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace wsos
