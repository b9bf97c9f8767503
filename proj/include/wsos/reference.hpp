#pragma once

#include "wsos/werner.hpp"

namespace wsos {

/// The d = 3, alpha = 1/2 z-collapsed polynomial transcribed term by term
/// (33 terms), used as an independent check on build_f.
inline Polynomial reference_f_half() {
  auto t = z_collapse_vars();
  auto V = [&](const char* n) { return Polynomial::variable(t, n); };
  auto z = V("z"), a = V("v1_1"), b = V("v2_1"), c = V("v1_2"), e = V("v2_2");
  auto p = V("w1_1"), q = V("w2_1"), r = V("w1_2"), s = V("w2_2");
  const Rational h(1, 2), two(2);
  auto z2 = z * z;
  return two * z2 * z2 + z2 * a * a + z2 * b * b + two * z2 * a * c + z2 * c * c + two * z2 * b * e + z2 * e * e -
         two * z2 * a * p + z2 * p * p + h * a * a * p * p + b * b * p * p - two * z2 * b * q - a * b * p * q +
         z2 * q * q + a * a * q * q + h * b * b * q * q - two * z2 * c * r + two * z2 * p * r + a * c * p * r +
         two * b * e * p * r - b * c * q * r + z2 * r * r + h * c * c * r * r + e * e * r * r - two * z2 * e * s -
         a * e * p * s + two * z2 * q * s + two * a * c * q * s + b * e * q * s - c * e * r * s + z2 * s * s +
         c * c * s * s + h * e * e * s * s;
}

/// Expected order of the 17-element reduced basis for reference_f_half().
inline const std::vector<std::string>& reference_reduced_basis() {
  static const std::vector<std::string> names{
      "z^2",       "z*v1_1",    "z*v2_1",    "z*v1_2",    "z*v2_2",    "z*w1_1",
      "z*w2_1",    "z*w1_2",    "z*w2_2",    "v1_1*w1_1", "v1_1*w2_1", "v2_1*w1_1",
      "v2_1*w2_1", "v1_2*w1_2", "v1_2*w2_2", "v2_2*w1_2", "v2_2*w2_2"};
  return names;
}

/// x^2 y^2 (x^2 + y^2 - 3) + 1 over (x, y).
inline Polynomial motzkin() {
  auto t = VarTable::make({"x", "y"});
  auto x = Polynomial::variable(t, "x"), y = Polynomial::variable(t, "y");
  return x * x * y * y * (x * x + y * y - Polynomial::constant(t, 3)) + Polynomial::constant(t, 1);
}

/// x^4 y^2 + x^2 y^4 - 3 x^2 y^2 z^2 + z^6 over (x, y, z).
inline Polynomial homogenized_motzkin() {
  auto t = VarTable::make({"x", "y", "z"});
  auto x = Polynomial::variable(t, "x"), y = Polynomial::variable(t, "y"), z = Polynomial::variable(t, "z");
  return x.pow(4) * y * y + x * x * y.pow(4) - Rational(3) * x * x * y * y * z * z + z.pow(6);
}

}  // namespace wsos
