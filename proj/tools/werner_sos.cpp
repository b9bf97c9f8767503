#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "wsos/reproduce.hpp"

using namespace wsos;
using io::json;

namespace {

enum Exit { kOk = 0, kReportFailure = 1, kNotSosProof = 2, kNumeric = 3, kUsage = 64 };

struct Output {
  std::string path;
  std::string format = "json";

  void add_to(CLI::App* app) {
    app->add_option("-o,--out", path, "Output file (default: stdout)");
    app->add_option("--format", format, "json or text")->check(CLI::IsMember({"json", "text"}));
  }

  void emit(const json& j, const std::string& text) const {
    const std::string body = format == "json" ? io::dump(j) : text;
    if (path.empty())
      std::cout << body;
    else
      io::write_text_file(path, body);
  }
};

struct TargetSpec {
  std::string file;
  int d = 3;
  int copies = 1;
  std::string alpha = "1/2";
  bool z_collapse = false;

  void add_to(CLI::App* app) {
    app->add_option("--target", file, "Polynomial JSON file (default: the Werner polynomial f)");
    add_werner(app);
  }

  void add_werner(CLI::App* app) {
    app->add_option("--d", d, "Local dimension")->capture_default_str();
    app->add_option("--N", copies, "Number of copies")->capture_default_str();
    app->add_option("--alpha", alpha, "Werner parameter as p/q")->capture_default_str();
    app->add_flag("--z-collapse", z_collapse, "Set the third components to a shared z (d = 3, N = 1)");
  }

  WernerParams params() const { return WernerParams(d, parse_rational(alpha), copies); }

  Polynomial load() const {
    if (!file.empty()) return io::polynomial_from_json(io::read_json_file(file));
    return build_f(params(), z_collapse ? FMode::ZCollapse : FMode::Real);
  }
};

int default_half_degree(const Polynomial& p) { return (p.degree() + 1) / 2; }

json rows_json(const std::vector<ReportItem>& items) {
  json a = json::array();
  for (const auto& it : items) a.push_back({{"name", it.name}, {"status", to_string(it.status)}});
  return a;
}

std::vector<PsmIndex> parse_schedule(const std::string& text) {
  std::vector<PsmIndex> out;
  std::stringstream groups(text);
  std::string group;
  while (std::getline(groups, group, ';')) {
    std::vector<std::size_t> rows;
    std::stringstream items(group);
    std::string tok;
    while (std::getline(items, tok, ',')) {
      try {
        std::size_t used = 0;
        const long v = std::stol(tok, &used);
        if (used != tok.size() || v < 1) throw std::invalid_argument(tok);
        rows.push_back(static_cast<std::size_t>(v));
      } catch (const std::logic_error&) {
        throw UsageError("bad PSM index '" + tok + "' in schedule");
      }
    }
    if (!rows.empty()) out.emplace_back(rows);
  }
  if (out.empty()) throw UsageError("empty PSM schedule");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact and numeric SOS tools for Werner-state distillability polynomials"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  std::function<int()> run;

  // build-poly
  auto* bp = app.add_subcommand("build-poly", "Build the polynomial f for Werner parameters");
  TargetSpec bp_t;
  Output bp_o;
  bp_t.add_werner(bp);
  bp_o.add_to(bp);
  bp->callback([&] {
    run = [&] {
      const auto f = bp_t.load();
      bp_o.emit(io::to_json(f), f.to_string() + "\n# terms: " + std::to_string(f.num_terms()) + "\n");
      return kOk;
    };
  });

  // gram
  auto* gr = app.add_subcommand("gram", "Gram family of a target over a monomial basis");
  TargetSpec gr_t;
  Output gr_o;
  int gr_half = -1;
  bool gr_reduce = false, gr_reference = false;
  gr_t.add_to(gr);
  gr_o.add_to(gr);
  gr->add_option("--half-degree", gr_half, "Basis degree (default: half the target degree)");
  gr->add_flag("--reduce", gr_reduce, "Use the reduced basis (homogeneous targets)");
  gr->add_flag("--reference", gr_reference, "Print the 17x17 reference parametrization M(alpha) instead");
  gr->callback([&] {
    run = [&] {
      if (gr_reference) {
        const auto aff = reference_gram_affine(parse_rational(gr_t.alpha));
        json gens = json::array();
        for (std::size_t k = 0; k < aff.num_params(); ++k) gens.push_back(aff.param_name(k));
        gr_o.emit({{"alpha", gr_t.alpha}, {"base", io::to_json(aff.base)}, {"params", gens}},
                  "M(" + gr_t.alpha + ") with " + std::to_string(aff.num_params()) + " free parameters\n");
        return kOk;
      }
      const auto f = gr_t.load();
      const int half = gr_half >= 0 ? gr_half : default_half_degree(f);
      const auto fam = build_gram_family(
          f, enumerate_basis(f.vars(), half, gr_reduce ? BasisKind::Reduced : BasisKind::Full, &f));
      json gens = json::array(), unrep = json::array();
      for (const auto& g : fam.generators) {
        json e = json::array();
        for (const auto& [i, j, v] : g.entries) e.push_back({std::to_string(i + 1), std::to_string(j + 1), to_string(v)});
        gens.push_back(std::move(e));
      }
      for (const auto& m : fam.unrepresentable) unrep.push_back(m.exponents());
      std::ostringstream text;
      text << "basis size " << fam.basis.size() << ", free parameters " << fam.dim()
           << (fam.representable() ? "" : ", target NOT representable") << "\n";
      gr_o.emit({{"basis", io::to_json(fam.basis)},
                 {"dim", fam.dim()},
                 {"particular", io::to_json(fam.particular)},
                 {"generators", std::move(gens)},
                 {"unrepresentable", std::move(unrep)}},
                text.str());
      return kOk;
    };
  });

  // sos-check
  auto* sc = app.add_subcommand("sos-check", "Search for an exact SOS certificate");
  TargetSpec sc_t;
  Output sc_o;
  int sc_half = -1;
  bool sc_reduce = false, sc_no_face = false;
  CertifyOptions sc_opt;
  sc_opt.ascent.restarts = 20;
  sc_t.add_to(sc);
  sc_o.add_to(sc);
  sc->add_option("--half-degree", sc_half, "Basis degree (default: half the target degree)");
  sc->add_flag("--reduce", sc_reduce, "Use the reduced basis (homogeneous targets)");
  sc->add_option("--restarts", sc_opt.ascent.restarts, "Ascent restarts")->capture_default_str();
  sc->add_option("--seed", sc_opt.ascent.seed, "Random seed")->capture_default_str();
  sc->add_option("--max-iter", sc_opt.ascent.max_iter, "Iterations per restart")->capture_default_str();
  sc->add_option("--rounding-bound", sc_opt.rounding_bound, "Largest denominator when rounding")->capture_default_str();
  sc->add_flag("--no-face-reduction", sc_no_face, "Skip the zero-based face reduction");
  sc->callback([&] {
    run = [&] {
      sc_opt.face_reduction = !sc_no_face;
      const auto f = sc_t.load();
      const int half = sc_half >= 0 ? sc_half : default_half_degree(f);
      const auto fam = build_gram_family(
          f, enumerate_basis(f.vars(), half, sc_reduce ? BasisKind::Reduced : BasisKind::Full, &f));
      const auto res = certify(fam, sc_opt);
      std::ostringstream text;
      text << "status " << to_string(res.status) << "\nbest lambda_min " << res.best_lambda_min << "\n";
      if (!res.note.empty()) text << "note: " << res.note << "\n";
      if (res.certificate) text << "certificate rank " << res.certificate->ldl.rank << "\n";
      sc_o.emit(io::to_json(res), text.str());
      switch (res.status) {
        case SosStatus::Sos: return kOk;
        case SosStatus::NotSosProof: return kNotSosProof;
        case SosStatus::NotSosEvidence: return kReportFailure;
      }
      return kReportFailure;
    };
  });

  // psm-reduce
  auto* pr = app.add_subcommand("psm-reduce", "Pin Gram parameters through principal submatrices");
  std::string pr_alpha = "1/2", pr_schedule, pr_target;
  bool pr_auto = false, pr_reduce = false;
  Output pr_o;
  pr_o.add_to(pr);
  pr->add_option("--alpha", pr_alpha, "Parameter of the reference M(alpha)")->capture_default_str();
  pr->add_option("--target", pr_target, "Use the Gram family of this polynomial instead of M(alpha)");
  pr->add_flag("--reduce", pr_reduce, "Reduced basis for --target");
  pr->add_option("--schedule", pr_schedule, "PSMs as 1-based rows, e.g. \"2,6,8;2,7,9\" (default: 18-step table)");
  pr->add_flag("--auto", pr_auto, "Try every 2x2 and 3x3 PSM");
  pr->callback([&] {
    run = [&] {
      AffineSymMatrix aff;
      if (!pr_target.empty()) {
        const auto f = io::polynomial_from_json(io::read_json_file(pr_target));
        aff = build_gram_family(f, enumerate_basis(f.vars(), default_half_degree(f),
                                                   pr_reduce ? BasisKind::Reduced : BasisKind::Full, &f))
                  .affine();
      } else {
        aff = reference_gram_affine(parse_rational(pr_alpha));
      }
      std::vector<PsmIndex> sched;
      if (pr_auto)
        sched = all_small_psms(aff.n(), 3);
      else if (!pr_schedule.empty())
        sched = parse_schedule(pr_schedule);
      else if (pr_target.empty() && parse_rational(pr_alpha) == Rational(1, 2))
        for (const auto& row : forcing_table()) sched.push_back(row.psm);
      else
        sched = all_small_psms(aff.n(), 3);
      for (const auto& p : sched)
        if (p.rows().back() > aff.n()) throw UsageError("PSM row exceeds the matrix size");
      const auto rep = psm_forcing(aff, sched);
      json j = io::to_json(rep, aff);
      std::string text = io::forcing_table_text(rep, aff);
      bool proven = rep.infeasible;
      if (rep.assignment.size() == aff.num_params()) {
        std::vector<Rational> t(aff.num_params());
        for (const auto& [k, v] : rep.assignment) t[k] = v;
        const auto m = aff.at(t);
        const auto v = psd_exact(m);
        const double lm = lambda_min(to_double(m));
        j["forced_matrix"] = io::to_json(m);
        j["forced_verdict"] = io::to_json(v);
        j["forced_lambda_min"] = lm;
        proven = proven || !v.psd;
        std::ostringstream o;
        o << "forced matrix: " << (v.psd ? "PSD" : "not PSD") << ", lambda_min " << std::setprecision(12) << lm
          << "\n";
        text += o.str();
      }
      j["proves_no_psd_member"] = proven;
      pr_o.emit(j, text);
      return proven ? kNotSosProof : kOk;
    };
  });

  // reznick
  auto* rz = app.add_subcommand("reznick", "Multiply by (sum x_i^2)^r and look for a certificate");
  TargetSpec rz_t;
  Output rz_o;
  int rz_r = -1, rz_rmax = 2;
  CertifyOptions rz_opt;
  rz_opt.ascent.restarts = 4;
  rz_opt.ascent.max_iter = 500;
  rz_t.add_to(rz);
  rz_o.add_to(rz);
  rz->add_option("--r", rz_r, "Single multiplier exponent (default: search 0..r-max)");
  rz->add_option("--r-max", rz_rmax, "Largest exponent in the search")->capture_default_str();
  rz->add_option("--restarts", rz_opt.ascent.restarts, "Ascent restarts")->capture_default_str();
  rz->add_option("--max-iter", rz_opt.ascent.max_iter, "Iterations per restart")->capture_default_str();
  rz->add_option("--seed", rz_opt.ascent.seed, "Random seed")->capture_default_str();
  rz->callback([&] {
    run = [&] {
      const auto f = rz_t.load();
      std::vector<ReznickResult> trials;
      std::optional<ReznickResult> found;
      if (rz_r >= 0) {
        trials.push_back(reznick_trial(f, rz_r, rz_opt));
        if (trials.back().certify.status == SosStatus::Sos) found = trials.back();
      } else {
        found = smallest_reznick_r(f, rz_rmax, rz_opt, &trials);
      }
      json tj = json::array();
      std::ostringstream text;
      for (const auto& t : trials) {
        tj.push_back(io::to_json(t));
        text << "r=" << t.r << " basis " << t.basis_size << " params " << t.num_params << " lambda_min "
             << t.ascent_lambda_min << " " << to_string(t.certify.status) << "\n";
      }
      rz_o.emit({{"trials", tj}, {"smallest_r", found ? json(found->r) : json(nullptr)}}, text.str());
      return found ? kOk : kReportFailure;
    };
  });

  // min-rank2
  auto* mr = app.add_subcommand("min-rank2", "Minimize <psi|Lambda^N|psi> over Schmidt rank 2 vectors");
  TargetSpec mr_t;
  Output mr_o;
  int mr_restarts = 50;
  std::uint64_t mr_seed = 0;
  mr_t.add_werner(mr);
  mr_o.add_to(mr);
  mr->add_option("--restarts", mr_restarts, "Random restarts")->capture_default_str();
  mr->add_option("--seed", mr_seed, "Random seed")->capture_default_str();
  mr->callback([&] {
    run = [&] {
      const auto p = mr_t.params();
      const auto r = min_rank2(p, mr_restarts, mr_seed);
      std::ostringstream text;
      text << std::setprecision(15) << "min " << r.min_value << " (" << to_string(p.region()) << ")\n";
      mr_o.emit(io::to_json(r, p, mr_restarts, mr_seed), text.str());
      return kOk;
    };
  });

  // theta
  auto* th = app.add_subcommand("theta", "Closed-form SOS identities");
  th->require_subcommand(1);
  auto* tv = th->add_subcommand("verify", "Check the Theta identity and the Z/I term identities");
  std::vector<int> tv_d{3};
  int tv_samples = 10000;
  std::uint64_t tv_seed = 0;
  Output tv_o;
  tv_o.add_to(tv);
  tv->add_option("--d", tv_d, "Local dimensions (repeatable)")->capture_default_str();
  tv->add_option("--samples", tv_samples, "Random points for the Theta minimum report")->capture_default_str();
  tv->add_option("--seed", tv_seed, "Random seed")->capture_default_str();
  tv->callback([&] {
    run = [&] {
      json checks = json::array(), sampled = json::array();
      std::ostringstream text;
      bool ok = true;
      auto record = [&](const IdentityCheck& c) {
        ok = ok && c.holds();
        checks.push_back(io::to_json(c));
        text << (c.holds() ? "zero    " : "NONZERO ") << c.name << " (" << c.lhs_terms << " terms)\n";
      };
      for (int d : tv_d) {
        record(verify_theta_identity(d));
        for (int n = 1; n <= 2; ++n)
          if (std::pow(static_cast<double>(d), 2.0 * n) <= 1e4 && (n == 1 || d <= 3))
            for (const auto& c : verify_m11_identities(n, d, CoeffMode::Complex)) record(c);
        const double real_min = theta_min_real(build_theta(d), tv_samples, tv_seed);
        const double cplx_min = theta_min_complex(d, Rational(1, 2), tv_samples, tv_seed);
        sampled.push_back({{"d", d}, {"real_min", real_min}, {"complex_min", cplx_min}, {"samples", tv_samples}});
        text << "d=" << d << " sampled Theta min: real " << real_min << ", complex " << cplx_min << "\n";
      }
      tv_o.emit({{"identities", checks}, {"sampled_minima", sampled}}, text.str());
      return ok ? kOk : kReportFailure;
    };
  });
  auto* tm = th->add_subcommand("m11", "Sample lambda_min of the diagonal block M_(1,1)");
  TargetSpec tm_t;
  std::size_t tm_samples = 100;
  std::uint64_t tm_seed = 0;
  bool tm_symbolic = false;
  Output tm_o;
  tm_t.add_werner(tm);
  tm_o.add_to(tm);
  tm->add_option("--samples", tm_samples, "Random unit coefficient tensors")->capture_default_str();
  tm->add_option("--seed", tm_seed, "Random seed")->capture_default_str();
  tm->add_flag("--symbolic", tm_symbolic, "Also check the term identities exactly");
  tm->callback([&] {
    run = [&] {
      const auto p = tm_t.params();
      const auto r = verify_m11_positive(p.copies, p.d, p.alpha, tm_samples, tm_seed, tm_symbolic);
      if (!r.alpha_in_range) std::cerr << "warning: alpha outside [1/d, 1/2]; positivity is not expected\n";
      bool ok = r.all_positive();
      for (const auto& c : r.symbolic) ok = ok && c.holds();
      std::ostringstream text;
      text << "worst lambda_min " << r.worst_margin << " over " << r.samples << " samples\n";
      tm_o.emit(io::to_json(r), text.str());
      return ok ? kOk : kReportFailure;
    };
  });

  // reproduce-paper
  auto* rp = app.add_subcommand("reproduce-paper", "Run every reproduction item and report pass/fail");
  std::vector<std::string> rp_alpha, rp_skip;
  ReproduceOptions rp_opt;
  Output rp_o;
  rp_o.add_to(rp);
  rp->add_option("--alpha", rp_alpha, "Eigenvalue items to run: 1/2 and/or 1/3 (default both)");
  rp->add_option("--skip", rp_skip, "Item groups to skip (repeatable or comma separated)")->delimiter(',');
  rp->add_option("--seed", rp_opt.seed, "Random seed for all stochastic items")->capture_default_str();
  rp->add_option("--restarts", rp_opt.ascent.restarts, "Ascent restarts")->capture_default_str();
  rp->add_option("--reznick-restarts", rp_opt.reznick_ascent.restarts, "Ascent restarts in the multiplier trial")
      ->capture_default_str();
  rp->add_option("--reznick-iters", rp_opt.reznick_ascent.max_iter, "Iterations per multiplier-trial restart")
      ->capture_default_str();
  rp->callback([&] {
    run = [&] {
      if (!rp_alpha.empty()) {
        rp_opt.eigen_alphas.clear();
        for (const auto& a : rp_alpha) rp_opt.eigen_alphas.push_back(parse_rational(a));
      }
      rp_opt.skip.insert(rp_skip.begin(), rp_skip.end());
      rp_opt.ascent.seed = rp_opt.reznick_ascent.seed = rp_opt.seed;
      const auto out = reproduce(rp_opt);
      std::ostringstream text;
      text << out.report.to_text();
      for (std::size_t g = 0; g < out.seconds.size(); ++g)
        std::cerr << std::left << std::setw(12) << reproduce_groups()[g] << std::fixed << std::setprecision(2)
                  << out.seconds[g] << " s\n";
      rp_o.emit(out.report.to_json(), text.str());
      if (const auto* bad = out.report.first_failure()) {
        std::cerr << "first failing item: " << bad->name << "\n";
        return kReportFailure;
      }
      return kOk;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  try {
    return run();
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const GuardError& e) {
    std::cerr << "size guard: " << e.what() << "\n";
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  }
}
