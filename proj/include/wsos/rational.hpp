#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdlib>
#include <string>
#include <string_view>

#include "wsos/errors.hpp"

namespace wsos {

using Integer = mpz_class;
using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1) {
  if (den == 0) throw UsageError("rational with zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

namespace detail {
inline bool is_decimal_integer(std::string_view s, bool allow_sign) {
  if (allow_sign && !s.empty() && (s.front() == '-' || s.front() == '+'))
    s.remove_prefix(1);
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}
}  // namespace detail

/// Parses "p", "-p" or "p/q" (decimal, arbitrary size). Floats are rejected.
inline Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  const std::string_view num = text.substr(0, slash);
  const std::string_view den =
      slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
  if (!detail::is_decimal_integer(num, true) || !detail::is_decimal_integer(den, false))
    throw UsageError("invalid rational '" + std::string(text) + "' (expected p or p/q)");
  std::string n(num);
  if (n.front() == '+') n.erase(0, 1);
  Integer numerator(n, 10);
  Integer denominator(std::string(den), 10);
  if (denominator == 0) throw UsageError("invalid rational '" + std::string(text) + "': zero denominator");
  Rational q(numerator, denominator);
  q.canonicalize();
  return q;
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

inline double to_double(const Rational& q) { return q.get_d(); }

/// Nearest k/bound to x, in lowest terms.
inline Rational round_to_denominator(double x, long bound) {
  if (!std::isfinite(x)) throw NumericError("cannot round a non-finite value");
  Rational q(Integer(std::nearbyint(x * static_cast<double>(bound))), Integer(bound));
  q.canonicalize();
  return q;
}

/// Best rational approximation with denominator at most max_den (continued fractions).
inline Rational best_rational(double x, long max_den) {
  if (!std::isfinite(x)) throw NumericError("cannot rationalize a non-finite value");
  const bool neg = x < 0;
  double r = std::fabs(x);
  long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  for (int it = 0; it < 64; ++it) {
    const double a = std::floor(r);
    if (a > 1e15) break;
    const long ai = static_cast<long>(a);
    const long p2 = ai * p1 + p0;
    const long q2 = ai * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    const double frac = r - a;
    if (frac < 1e-12) break;
    r = 1.0 / frac;
  }
  if (q1 == 0) return Rational(0);
  return make_rational(neg ? -p1 : p1, q1);
}

}  // namespace wsos
