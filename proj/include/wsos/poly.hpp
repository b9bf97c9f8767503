#pragma once

// Exact multivariate polynomials over Q with a fixed, ordered variable table.

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "wsos/errors.hpp"
#include "wsos/rational.hpp"

namespace wsos {

class VarTable {
 public:
  explicit VarTable(std::vector<std::string> names) : names_(std::move(names)) {
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (!index_.emplace(names_[i], i).second)
        throw UsageError("duplicate variable name '" + names_[i] + "'");
    }
  }

  static std::shared_ptr<const VarTable> make(std::vector<std::string> names) {
    return std::make_shared<const VarTable>(std::move(names));
  }

  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  const std::vector<std::string>& names() const { return names_; }

  std::optional<std::size_t> find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t index(std::string_view name) const {
    if (auto i = find(name)) return *i;
    throw UsageError("unknown variable '" + std::string(name) + "'");
  }

  friend bool operator==(const VarTable& a, const VarTable& b) { return a.names_ == b.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
};

using VarTablePtr = std::shared_ptr<const VarTable>;

inline bool same_table(const VarTablePtr& a, const VarTablePtr& b) {
  return a == b || (a && b && *a == *b);
}

class Monomial {
 public:
  using Exponent = std::uint16_t;

  Monomial() = default;
  explicit Monomial(std::size_t nvars) : exps_(nvars, 0) {}
  explicit Monomial(std::vector<Exponent> exps) : exps_(std::move(exps)) {
    for (auto e : exps_) degree_ += e;
  }

  static Monomial variable(std::size_t nvars, std::size_t var, Exponent power = 1) {
    Monomial m(nvars);
    m.exps_.at(var) = power;
    m.degree_ = power;
    return m;
  }

  std::size_t size() const { return exps_.size(); }
  Exponent operator[](std::size_t i) const { return exps_[i]; }
  const std::vector<Exponent>& exponents() const { return exps_; }
  int degree() const { return degree_; }

  void bump(std::size_t var, Exponent by = 1) {
    exps_.at(var) = static_cast<Exponent>(exps_[var] + by);
    degree_ += by;
  }

  Monomial operator*(const Monomial& o) const {
    if (o.exps_.size() != exps_.size()) throw UsageError("monomial length mismatch");
    Monomial r(*this);
    for (std::size_t i = 0; i < exps_.size(); ++i)
      r.exps_[i] = static_cast<Exponent>(r.exps_[i] + o.exps_[i]);
    r.degree_ += o.degree_;
    return r;
  }

  friend bool operator==(const Monomial& a, const Monomial& b) { return a.exps_ == b.exps_; }
  friend bool operator<(const Monomial& a, const Monomial& b) { return a.exps_ < b.exps_; }

 private:
  std::vector<Exponent> exps_;
  int degree_ = 0;
};

/// Graded lexicographic order, largest first: higher total degree wins, ties
/// are broken by the larger exponent on the earliest variable.
struct GrlexGreater {
  bool operator()(const Monomial& a, const Monomial& b) const {
    if (a.degree() != b.degree()) return a.degree() > b.degree();
    return b.exponents() < a.exponents();
  }
};

class Polynomial {
 public:
  using TermMap = std::map<Monomial, Rational, GrlexGreater>;

  explicit Polynomial(VarTablePtr vars) : vars_(std::move(vars)) {
    if (!vars_) throw UsageError("polynomial needs a variable table");
  }

  static Polynomial constant(VarTablePtr vars, const Rational& c) {
    Polynomial p(std::move(vars));
    p.add_term(Monomial(p.vars_->size()), c);
    return p;
  }

  static Polynomial variable(VarTablePtr vars, std::size_t index) {
    Polynomial p(std::move(vars));
    p.add_term(Monomial::variable(p.vars_->size(), index), Rational(1));
    return p;
  }

  static Polynomial variable(const VarTablePtr& vars, std::string_view name) {
    return variable(vars, vars->index(name));
  }

  static Polynomial term(VarTablePtr vars, const Monomial& m, const Rational& c) {
    Polynomial p(std::move(vars));
    p.add_term(m, c);
    return p;
  }

  const VarTablePtr& vars() const { return vars_; }
  const TermMap& terms() const { return terms_; }
  std::size_t num_terms() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  /// Total degree; 0 for the zero polynomial.
  int degree() const { return terms_.empty() ? 0 : terms_.begin()->first.degree(); }

  Rational coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  void add_term(const Monomial& m, const Rational& c) {
    if (m.size() != vars_->size()) throw UsageError("monomial does not match the variable table");
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  Polynomial& operator+=(const Polynomial& o) {
    check_table(o);
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }

  Polynomial& operator-=(const Polynomial& o) {
    check_table(o);
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }

  Polynomial& operator*=(const Rational& s) {
    if (s == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
  }

  Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, const Rational& s) { return a *= s; }
  friend Polynomial operator*(const Rational& s, Polynomial a) { return a *= s; }
  friend Polynomial operator-(Polynomial a) { return a *= Rational(-1); }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.check_table(b);
    Polynomial r(a.vars_);
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) r.add_term(ma * mb, ca * cb);
    return r;
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return same_table(a.vars_, b.vars_) && a.terms_ == b.terms_;
  }

  Polynomial pow(unsigned k) const {
    Polynomial r = constant(vars_, Rational(1));
    Polynomial base = *this;
    while (k) {
      if (k & 1u) r *= base;
      k >>= 1u;
      if (k) base = base * base;
    }
    return r;
  }

  Rational eval(std::span<const Rational> point) const {
    if (point.size() != vars_->size()) throw UsageError("evaluation point has wrong length");
    Rational total(0);
    for (const auto& [m, c] : terms_) {
      Rational t = c;
      for (std::size_t i = 0; i < m.size(); ++i)
        for (unsigned e = 0; e < m[i]; ++e) t *= point[i];
      total += t;
    }
    return total;
  }

  double eval(std::span<const double> point) const {
    if (point.size() != vars_->size()) throw UsageError("evaluation point has wrong length");
    double total = 0.0;
    for (const auto& [m, c] : terms_) {
      double t = c.get_d();
      for (std::size_t i = 0; i < m.size(); ++i)
        for (unsigned e = 0; e < m[i]; ++e) t *= point[i];
      total += t;
    }
    return total;
  }

  /// Common total degree of every term; the zero polynomial reports 0.
  std::optional<int> homogeneous_degree() const {
    if (terms_.empty()) return 0;
    const int d = terms_.begin()->first.degree();
    for (const auto& [m, c] : terms_)
      if (m.degree() != d) return std::nullopt;
    return d;
  }

  Polynomial derivative(std::size_t var) const {
    Polynomial r(vars_);
    for (const auto& [m, c] : terms_) {
      if (m[var] == 0) continue;
      auto e = m.exponents();
      const auto k = e[var];
      e[var] = static_cast<Monomial::Exponent>(k - 1);
      r.add_term(Monomial(std::move(e)), c * k);
    }
    return r;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : terms_) {
      Rational mag = abs(c);
      os << (c < 0 ? (first ? "-" : " - ") : (first ? "" : " + "));
      const bool unit = mag == 1 && m.degree() > 0;
      if (!unit) os << mag.get_str();
      bool need_sep = !unit;
      for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i] == 0) continue;
        if (need_sep) os << '*';
        os << vars_->name(i);
        if (m[i] > 1) os << '^' << m[i];
        need_sep = true;
      }
      first = false;
    }
    return os.str();
  }

 private:
  void check_table(const Polynomial& o) const {
    if (!same_table(vars_, o.vars_)) throw UsageError("polynomials live over different variable tables");
  }

  VarTablePtr vars_;
  TermMap terms_;
};

inline std::optional<int> is_homogeneous(const Polynomial& p) { return p.homogeneous_degree(); }

/// Replaces bound variables of p by polynomials over `target`; unbound
/// variables pass through by name and must exist in `target`.
inline Polynomial substitute(const Polynomial& p, const std::map<std::string, Polynomial>& bindings,
                             const VarTablePtr& target) {
  const auto& src = *p.vars();
  for (const auto& [name, poly] : bindings) {
    if (!src.find(name)) throw UsageError("binding for unknown variable '" + name + "'");
    if (!same_table(poly.vars(), target)) throw UsageError("binding for '" + name + "' is not over the target table");
  }
  std::vector<Polynomial> image;
  image.reserve(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    auto it = bindings.find(src.name(i));
    if (it != bindings.end()) {
      image.push_back(it->second);
    } else if (auto j = target->find(src.name(i))) {
      image.push_back(Polynomial::variable(target, *j));
    } else {
      image.push_back(Polynomial(target));  // only an error if the variable is actually used
    }
  }
  std::vector<std::vector<Polynomial>> powers(src.size());
  auto power_of = [&](std::size_t var, unsigned e) -> const Polynomial& {
    auto& cache = powers[var];
    if (cache.empty()) cache.push_back(Polynomial::constant(target, Rational(1)));
    while (cache.size() <= e) cache.push_back(cache.back() * image[var]);
    return cache[e];
  };
  Polynomial out(target);
  for (const auto& [m, c] : p.terms()) {
    Polynomial t = Polynomial::constant(target, c);
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m[i] == 0) continue;
      if (!bindings.count(src.name(i)) && !target->find(src.name(i)))
        throw UsageError("variable '" + src.name(i) + "' is neither bound nor present in the target table");
      t *= power_of(i, m[i]);
    }
    out += t;
  }
  return out;
}

/// All monomials of exactly `degree` over n variables, largest-first in grlex.
inline std::vector<Monomial> monomials_of_degree(std::size_t nvars, int degree) {
  std::vector<Monomial> out;
  std::vector<Monomial::Exponent> e(nvars, 0);
  auto rec = [&](auto&& self, std::size_t var, int left) -> void {
    if (var + 1 == nvars) {
      e[var] = static_cast<Monomial::Exponent>(left);
      out.emplace_back(e);
      return;
    }
    for (int k = left; k >= 0; --k) {
      e[var] = static_cast<Monomial::Exponent>(k);
      self(self, var + 1, left - k);
    }
    e[var] = 0;
  };
  if (nvars == 0) {
    if (degree == 0) out.emplace_back(e);
    return out;
  }
  rec(rec, 0, degree);
  return out;
}

}  // namespace wsos
