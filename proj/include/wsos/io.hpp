#pragma once

// JSON formats. Integers and rationals are decimal strings so that values of
// any size survive a round trip; matrix and PSM indices are 1-based.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include <json.hpp>

#include "wsos/certify.hpp"
#include "wsos/theta.hpp"

namespace wsos::io {

using json = nlohmann::ordered_json;

inline json number(double x) {
  if (std::isfinite(x)) return x;
  return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
}

inline json to_json(const Polynomial& p) {
  json terms = json::array();
  for (const auto& [m, c] : p.terms())
    terms.push_back({{"exp", m.exponents()}, {"num", c.get_num().get_str()}, {"den", c.get_den().get_str()}});
  return {{"vars", p.vars()->names()}, {"terms", std::move(terms)}};
}

inline Polynomial polynomial_from_json(const json& j) {
  try {
    auto vars = VarTable::make(j.at("vars").get<std::vector<std::string>>());
    Polynomial p(vars);
    for (const auto& t : j.at("terms")) {
      const auto exps = t.at("exp").get<std::vector<Monomial::Exponent>>();
      if (exps.size() != vars->size()) throw UsageError("term exponent vector has the wrong length");
      const Rational c = parse_rational(t.at("num").get<std::string>() + "/" + t.at("den").get<std::string>());
      p.add_term(Monomial(exps), c);
    }
    return p;
  } catch (const json::exception& e) {
    throw UsageError(std::string("malformed polynomial JSON: ") + e.what());
  }
}

inline json to_json(const SymMatrix<Rational>& m) {
  json entries = json::array();
  for (std::size_t i = 0; i < m.n(); ++i)
    for (std::size_t j = i; j < m.n(); ++j)
      if (m(i, j) != 0) entries.push_back({std::to_string(i + 1), std::to_string(j + 1), to_string(m(i, j))});
  return {{"n", m.n()}, {"entries", std::move(entries)}};
}

inline SymMatrix<Rational> sym_matrix_from_json(const json& j) {
  try {
    const auto n = j.at("n").get<std::size_t>();
    SymMatrix<Rational> m(n);
    for (const auto& e : j.at("entries")) {
      auto index = [](const json& x) {
        return x.is_number_unsigned() ? x.get<std::size_t>() : std::stoul(x.get<std::string>());
      };
      const auto i = index(e.at(0)), k = index(e.at(1));
      if (i < 1 || k < 1 || i > n || k > n) throw UsageError("matrix index out of range");
      m(i - 1, k - 1) = parse_rational(e.at(2).get<std::string>());
    }
    return m;
  } catch (const json::exception& e) {
    throw UsageError(std::string("malformed matrix JSON: ") + e.what());
  } catch (const std::logic_error& e) {
    throw UsageError(std::string("malformed matrix index: ") + e.what());
  }
}

inline json to_json(const MonomialBasis& b) {
  json mons = json::array(), names = json::array();
  for (std::size_t i = 0; i < b.size(); ++i) {
    mons.push_back(b.monomials[i].exponents());
    names.push_back(b.name(i));
  }
  return {{"vars", b.vars->names()},
          {"half_degree", b.half_degree},
          {"kind", b.kind == BasisKind::Full ? "full" : "reduced"},
          {"monomials", std::move(mons)},
          {"names", std::move(names)}};
}

inline json to_json(const LdlFactor& f) {
  json order = json::array(), pivots = json::array();
  for (auto r : f.order) order.push_back(r + 1);
  for (const auto& p : f.pivots) pivots.push_back(to_string(p));
  return {{"rank", f.rank}, {"order", std::move(order)}, {"pivots", std::move(pivots)}};
}

inline json to_json(const PsdVerdict& v) {
  json j = {{"psd", v.psd}, {"ldl", to_json(v.ldl)}};
  if (!v.psd) {
    json w = json::array();
    for (const auto& x : v.witness) w.push_back(to_string(x));
    j["witness"] = std::move(w);
    j["witness_value"] = to_string(v.witness_value);
  }
  return j;
}

inline json to_json(const SosCertificate& c) {
  return {{"target", to_json(c.target)}, {"basis", to_json(c.basis)}, {"gram", to_json(c.gram)},
          {"ldl", to_json(c.ldl)}, {"verified", c.verify()}};
}

inline json rationals(const std::vector<Rational>& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(to_string(x));
  return a;
}

inline json to_json(const PsmIndex& p) { return p.rows(); }

inline json to_json(const ForcingReport& r, const AffineSymMatrix& fam) {
  json steps = json::array(), other = json::array(), assignment = json::object();
  for (const auto& s : r.steps)
    steps.push_back({{"psm", to_json(s.psm)},
                     {"param", fam.param_name(s.param)},
                     {"value", to_string(s.value)},
                     {"minor_rows", to_json(s.minor_rows)},
                     {"minor", rationals(s.minor)}});
  for (const auto& a : r.other) {
    json o = {{"psm", to_json(a.psm)}, {"outcome", to_string(a.outcome)}};
    if (a.param) {
      o["param"] = fam.param_name(*a.param);
      o["interval"] = {number(a.lo), number(a.hi)};
    }
    if (!a.note.empty()) o["note"] = a.note;
    other.push_back(std::move(o));
  }
  for (const auto& [k, v] : r.assignment) assignment[fam.param_name(k)] = to_string(v);
  return {{"steps", std::move(steps)},
          {"not_forcing", std::move(other)},
          {"assignment", std::move(assignment)},
          {"infeasible", r.infeasible}};
}

/// One line per forcing step: PSM rows, parameter, value.
inline std::string forcing_table_text(const ForcingReport& r, const AffineSymMatrix& fam) {
  std::ostringstream out;
  out << std::left << std::setw(16) << "PSM" << std::setw(12) << "param" << "value\n";
  auto rows = [](const PsmIndex& p) {
    std::string s = "{";
    for (std::size_t k = 0; k < p.rows().size(); ++k) s += (k ? "," : "") + std::to_string(p.rows()[k]);
    return s + "}";
  };
  for (const auto& s : r.steps)
    out << std::setw(16) << rows(s.psm) << std::setw(12) << fam.param_name(s.param) << to_string(s.value) << "\n";
  for (const auto& a : r.other)
    out << std::setw(16) << rows(a.psm) << std::setw(12) << (a.param ? fam.param_name(*a.param) : "-")
        << to_string(a.outcome) << "\n";
  if (r.infeasible) out << "infeasible: some PSM has no PSD completion\n";
  return out.str();
}

inline json to_json(const CertifyResult& r) {
  json j = {{"status", to_string(r.status)},
            {"best_lambda_min", number(r.best_lambda_min)},
            {"zeros_found", r.zeros_found},
            {"kernel_dim", r.kernel_dim},
            {"refined_kernel_dim", r.refined_kernel_dim},
            {"face_reduced", r.face_reduced}};
  if (!r.note.empty()) j["note"] = r.note;
  j["certificate"] = r.certificate ? to_json(*r.certificate) : json(nullptr);
  if (r.forcing) j["forcing_proof"] = {{"proven", r.forcing->proven}, {"infeasible", r.forcing->forcing.infeasible}};
  return j;
}

inline json to_json(const ReznickResult& r) {
  return {{"r", r.r},
          {"basis_size", r.basis_size},
          {"num_params", r.num_params},
          {"ascent_lambda_min", number(r.ascent_lambda_min)},
          {"certify", to_json(r.certify)}};
}

inline json to_json(const CVector& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back({x.real(), x.imag()});
  return a;
}

inline json to_json(const Rank2Result& r, const WernerParams& p, int restarts, std::uint64_t seed) {
  return {{"d", p.d},
          {"N", p.copies},
          {"alpha", to_string(p.alpha)},
          {"region", to_string(p.region())},
          {"min", number(r.min_value)},
          {"argmin",
           {{"c1", r.argmin.c1}, {"c2", r.argmin.c2}, {"e1", to_json(r.argmin.e1)}, {"e2", to_json(r.argmin.e2)},
            {"f1", to_json(r.argmin.f1)}, {"f2", to_json(r.argmin.f2)}}},
          {"best_restart", r.best_restart},
          {"restarts", restarts},
          {"seed", seed}};
}

inline json to_json(const IdentityCheck& c) {
  return {{"name", c.name},
          {"lhs_terms", c.lhs_terms},
          {"rhs_terms", c.rhs_terms},
          {"residual_terms", c.residual_terms},
          {"residual_zero", c.holds()}};
}

inline json to_json(const M11Report& r) {
  json sym = json::array();
  for (const auto& c : r.symbolic) sym.push_back(to_json(c));
  json j = {{"N", r.copies},  {"d", r.d},       {"alpha", to_string(r.alpha)}, {"symbolic", std::move(sym)},
            {"samples", r.samples}, {"worst_margin", number(r.worst_margin)}, {"all_positive", r.all_positive()}};
  if (!r.alpha_in_range) j["warning"] = "alpha outside [1/d, 1/2]";
  return j;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("'" + path + "' is not valid JSON: " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << text;
  if (!out) throw UsageError("write to '" + path + "' failed");
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace wsos::io
