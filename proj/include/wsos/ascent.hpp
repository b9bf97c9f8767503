#pragma once

// Maximizes t -> lambda_min(base + sum_k t_k D_k) by supergradient ascent with
// Polyak steps toward a moving level (best value + delta).

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "wsos/eigen_sym.hpp"
#include "wsos/gram.hpp"
#include "wsos/parallel.hpp"

namespace wsos {

struct AscentOptions {
  int restarts = 20;
  std::uint64_t seed = 0;
  int max_iter = 2000;
  double init_scale = 1.0;  // std-dev of random starting points (restart 0 starts at t = 0)
  double min_delta = 1e-9;  // stop once the level gap has shrunk below this
  int patience = 20;        // non-improving steps before the gap is halved
};

struct AscentRun {
  double value = -INFINITY;
  std::vector<double> t;
  int iterations = 0;
};

struct AscentResult {
  double best_value = -INFINITY;
  std::vector<double> best_t;
  std::size_t best_restart = 0;
  std::vector<AscentRun> runs;
};

struct LambdaMinEval {
  double value;
  std::vector<double> eigvec;
  Matrix<double> basis;  // all eigenvectors, reused to warm-start the next solve
};

using DoubleDirs = std::vector<std::vector<std::tuple<std::size_t, std::size_t, double>>>;

inline DoubleDirs double_dirs(const AffineSymMatrix& fam) {
  DoubleDirs dirs(fam.num_params());
  for (std::size_t k = 0; k < dirs.size(); ++k)
    for (const auto& [i, j, v] : fam.dirs[k].entries) dirs[k].emplace_back(i, j, v.get_d());
  return dirs;
}

inline LambdaMinEval eval_lambda_min(const SymMatrix<double>& base, const DoubleDirs& dirs,
                                     const std::vector<double>& t, const Matrix<double>* warm = nullptr) {
  SymMatrix<double> m = base;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] == 0) continue;
    for (const auto& [i, j, v] : dirs[k]) m(i, j) += t[k] * v;
  }
  if (m.n() == 0) return {INFINITY, {}, {}};
  EigResult e = warm ? eig_sym_warm(m, *warm, 1e-12) : eig_sym(m, 1e-12);
  std::vector<double> v(m.n());
  for (std::size_t i = 0; i < m.n(); ++i) v[i] = e.vectors(i, 0);
  return {e.values.front(), std::move(v), std::move(e.vectors)};
}

namespace detail {

inline AscentRun ascent_run(const SymMatrix<double>& base, const DoubleDirs& dirs, std::vector<double> t,
                            const AscentOptions& opt) {
  const std::size_t p = dirs.size();
  AscentRun best;
  auto cur = eval_lambda_min(base, dirs, t);
  best.value = cur.value;
  best.t = t;
  if (p == 0) return best;
  double delta = std::max(0.1, 0.1 * std::fabs(cur.value));
  int stall = 0;
  std::vector<double> g(p);
  for (int it = 0; it < opt.max_iter && delta > opt.min_delta; ++it) {
    best.iterations = it + 1;
    double gg = 0;
    for (std::size_t k = 0; k < p; ++k) {
      double s = 0;
      for (const auto& [i, j, v] : dirs[k]) s += (i == j ? 1.0 : 2.0) * v * cur.eigvec[i] * cur.eigvec[j];
      g[k] = s;
      gg += s * s;
    }
    if (gg < 1e-30) break;  // zero supergradient: t is a maximizer
    const double step = (best.value + delta - cur.value) / gg;
    for (std::size_t k = 0; k < p; ++k) t[k] += step * g[k];
    cur = eval_lambda_min(base, dirs, t, &cur.basis);
    if (cur.value > best.value) {
      if (cur.value >= best.value + 0.5 * delta) delta *= 1.5;
      best.value = cur.value;
      best.t = t;
      stall = 0;
    } else if (++stall >= opt.patience) {
      delta *= 0.5;
      stall = 0;
      t = best.t;
      cur = eval_lambda_min(base, dirs, t, &cur.basis);
    }
  }
  return best;
}

}  // namespace detail

/// Restarts run in parallel; the reduction picks the best value, ties going to
/// the lowest restart index, so results depend only on the options.
inline AscentResult maximize_lambda_min(const AffineSymMatrix& fam, const AscentOptions& opt = {}) {
  if (opt.restarts < 1) throw UsageError("need at least one restart");
  const SymMatrix<double> base = to_double(fam.base);
  const DoubleDirs dirs = double_dirs(fam);
  AscentResult res;
  res.runs.resize(static_cast<std::size_t>(opt.restarts));
  parallel_for(res.runs.size(), [&](std::size_t r) {
    std::vector<double> t0(fam.num_params(), 0.0);
    if (r > 0) {
      std::mt19937_64 rng(opt.seed + r);
      std::normal_distribution<double> nd(0.0, opt.init_scale);
      for (auto& x : t0) x = nd(rng);
    }
    res.runs[r] = detail::ascent_run(base, dirs, std::move(t0), opt);
  });
  for (std::size_t r = 0; r < res.runs.size(); ++r)
    if (r == 0 || res.runs[r].value > res.best_value) {
      res.best_value = res.runs[r].value;
      res.best_restart = r;
    }
  res.best_t = res.runs[res.best_restart].t;
  return res;
}

}  // namespace wsos
