#include <gtest/gtest.h>

#include <random>

#include "wsos/poly.hpp"
#include "wsos/rational.hpp"

using namespace wsos;

namespace {

VarTablePtr xy() { return VarTable::make({"x", "y"}); }

Polynomial motzkin(const VarTablePtr& t) {
  auto x = Polynomial::variable(t, "x"), y = Polynomial::variable(t, "y");
  auto one = Polynomial::constant(t, 1);
  return x * x * y * y * (x * x + y * y - Rational(3) * one) + one;
}

struct RandomPolys {
  explicit RandomPolys(std::uint64_t seed) : rng(seed) {}
  std::mt19937_64 rng;

  Rational coeff() {
    std::uniform_int_distribution<long> num(-9, 9), den(1, 5);
    return make_rational(num(rng), den(rng));
  }

  Polynomial poly(const VarTablePtr& t, int max_terms = 5, int max_exp = 3) {
    std::uniform_int_distribution<int> nterms(0, max_terms), e(0, max_exp);
    Polynomial p(t);
    for (int k = nterms(rng); k > 0; --k) {
      std::vector<Monomial::Exponent> ex(t->size());
      for (auto& x : ex) x = static_cast<Monomial::Exponent>(e(rng));
      p.add_term(Monomial(ex), coeff());
    }
    return p;
  }

  std::vector<Rational> point(std::size_t n) {
    std::vector<Rational> x(n);
    for (auto& v : x) v = coeff();
    return x;
  }
};

}  // namespace

TEST(Rational, ParsesFractionsAndRejectsFloats) {
  EXPECT_EQ(parse_rational("1/2"), make_rational(1, 2));
  EXPECT_EQ(parse_rational("-6/4"), make_rational(-3, 2));
  EXPECT_EQ(parse_rational("7"), Rational(7));
  EXPECT_EQ(parse_rational("123456789012345678901234567890").get_str(), "123456789012345678901234567890");
  EXPECT_THROW(parse_rational("0.5"), UsageError);
  EXPECT_THROW(parse_rational("1/0"), UsageError);
  EXPECT_THROW(parse_rational("1/-2"), UsageError);
  EXPECT_THROW(parse_rational(""), UsageError);
}

TEST(Rational, Rounding) {
  EXPECT_EQ(round_to_denominator(0.3333333, 1000), make_rational(333, 1000));
  EXPECT_EQ(best_rational(0.3333333333, 100), make_rational(1, 3));
  EXPECT_EQ(best_rational(-2.5, 10), make_rational(-5, 2));
}

TEST(Polynomial, AddExamples) {
  auto t = xy();
  auto x = Polynomial::variable(t, "x");
  auto one = Polynomial::constant(t, 1);
  EXPECT_EQ((x + one) + (-x), one);
  EXPECT_EQ(x + Polynomial(t), x);
  auto x2y = x * x * Polynomial::variable(t, "y");
  auto sum = x2y + x2y;
  EXPECT_EQ(sum.num_terms(), 1u);
  EXPECT_EQ(sum, Rational(2) * x2y);
}

TEST(Polynomial, MulExamples) {
  auto t = xy();
  auto x = Polynomial::variable(t, "x"), y = Polynomial::variable(t, "y");
  EXPECT_EQ((x * y).to_string(), "x*y");
  EXPECT_EQ((x + y).pow(2).to_string(), "x^2 + 2*x*y + y^2");
  auto pm = motzkin(t);
  ASSERT_EQ(pm.num_terms(), 4u);
  EXPECT_EQ(pm.coefficient(Monomial({4, 2})), 1);
  EXPECT_EQ(pm.coefficient(Monomial({2, 4})), 1);
  EXPECT_EQ(pm.coefficient(Monomial({2, 2})), -3);
  EXPECT_EQ(pm.coefficient(Monomial({0, 0})), 1);
  EXPECT_EQ(pm.degree(), 6);
}

TEST(Polynomial, MismatchedTablesAreUsageErrors) {
  auto a = Polynomial::variable(xy(), "x");
  auto b = Polynomial::variable(VarTable::make({"x", "z"}), "x");
  EXPECT_THROW(a + b, UsageError);
  EXPECT_THROW(a * b, UsageError);
  EXPECT_FALSE(a == b);
  // Equal name lists count as the same table.
  EXPECT_EQ(a, Polynomial::variable(xy(), "x"));
}

TEST(Polynomial, EvalExamples) {
  auto t = xy();
  auto pm = motzkin(t);
  std::vector<Rational> p11{1, 1}, p00{0, 0}, p21{2, 1};
  EXPECT_EQ(pm.eval(p11), 0);
  EXPECT_EQ(pm.eval(p00), 1);
  EXPECT_EQ(pm.eval(p21), 9);
  std::vector<Rational> bad{1};
  EXPECT_THROW(pm.eval(bad), UsageError);
}

TEST(Polynomial, Homogeneity) {
  auto t = xy();
  auto x = Polynomial::variable(t, "x");
  EXPECT_FALSE(is_homogeneous(x * x + x).has_value());
  EXPECT_EQ(is_homogeneous(Polynomial(t)), 0);
  EXPECT_EQ(is_homogeneous(x * x * Polynomial::variable(t, "y")), 3);
}

TEST(Polynomial, SubstituteExamples) {
  auto src = VarTable::make({"x"});
  auto dst = VarTable::make({"z"});
  auto x = Polynomial::variable(src, "x");
  auto z = Polynomial::variable(dst, "z");
  EXPECT_EQ(substitute(x * x, {{"x", z}}, dst), z * z);

  auto t = xy();
  auto pm = motzkin(t);
  auto zero = Polynomial(t);
  EXPECT_EQ(substitute(pm, {{"x", zero}}, t), Polynomial::constant(t, 1));

  EXPECT_THROW(substitute(x, {{"q", z}}, dst), UsageError);
  // Unbound variables must exist in the target table.
  EXPECT_THROW(substitute(Polynomial::variable(t, "y"), {{"x", Polynomial(dst)}}, dst), UsageError);
}

TEST(Polynomial, RingAxiomsOnRandomInputs) {
  auto t = VarTable::make({"a", "b", "c"});
  RandomPolys gen(11);
  for (int trial = 0; trial < 120; ++trial) {
    auto p = gen.poly(t), q = gen.poly(t), r = gen.poly(t);
    EXPECT_EQ(p + q, q + p);
    EXPECT_EQ(p * q, q * p);
    EXPECT_EQ((p + q) + r, p + (q + r));
    EXPECT_EQ((p * q) * r, p * (q * r));
    EXPECT_EQ(p * (q + r), p * q + p * r);
    if (!p.is_zero() && !q.is_zero()) EXPECT_EQ((p * q).degree(), p.degree() + q.degree());
  }
}

TEST(Polynomial, EvalIsARingHomomorphism) {
  auto t = VarTable::make({"a", "b", "c"});
  RandomPolys gen(12);
  for (int trial = 0; trial < 100; ++trial) {
    auto p = gen.poly(t), q = gen.poly(t);
    auto x = gen.point(3);
    EXPECT_EQ((p + q).eval(x), p.eval(x) + q.eval(x));
    EXPECT_EQ((p * q).eval(x), p.eval(x) * q.eval(x));
  }
}

TEST(Polynomial, CanonicalFormIsOrderIndependent) {
  auto t = VarTable::make({"a", "b", "c"});
  RandomPolys gen(13);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::pair<Monomial, Rational>> terms;
    auto p = gen.poly(t, 8);
    for (const auto& [m, c] : p.terms()) terms.emplace_back(m, c);
    std::shuffle(terms.begin(), terms.end(), gen.rng);
    Polynomial q(t);
    for (const auto& [m, c] : terms) {
      // Split each coefficient into two pieces to exercise merging.
      q.add_term(m, c / 3);
      q.add_term(m, c - c / 3);
    }
    EXPECT_EQ(p, q);
    EXPECT_EQ(p.to_string(), q.to_string());
  }
}

TEST(Polynomial, SubstituteThenEvalMatchesComposition) {
  auto src = VarTable::make({"a", "b", "c"});
  auto dst = VarTable::make({"s", "t"});
  RandomPolys gen(14);
  for (int trial = 0; trial < 40; ++trial) {
    auto p = gen.poly(src, 4, 2);
    std::map<std::string, Polynomial> bind{
        {"a", gen.poly(dst, 3, 2)}, {"b", gen.poly(dst, 3, 2)}, {"c", gen.poly(dst, 3, 2)}};
    auto composed = substitute(p, bind, dst);
    auto pt = gen.point(2);
    std::vector<Rational> inner{bind.at("a").eval(pt), bind.at("b").eval(pt), bind.at("c").eval(pt)};
    EXPECT_EQ(composed.eval(pt), p.eval(inner));
  }
}

TEST(Polynomial, GrlexOrderOfTerms) {
  auto t = xy();
  auto x = Polynomial::variable(t, "x"), y = Polynomial::variable(t, "y");
  auto p = y + x * y + x * x + Polynomial::constant(t, 1) + y * y;
  EXPECT_EQ(p.to_string(), "x^2 + x*y + y^2 + y + 1");
  auto mons = monomials_of_degree(3, 2);
  ASSERT_EQ(mons.size(), 6u);
  EXPECT_EQ(mons.front(), Monomial({2, 0, 0}));
  EXPECT_EQ(mons.back(), Monomial({0, 0, 2}));
}

TEST(Polynomial, DerivativeAndDoubleEval) {
  auto t = xy();
  auto pm = motzkin(t);
  auto dx = pm.derivative(0);
  std::vector<Rational> p11{1, 1};
  EXPECT_EQ(dx.eval(p11), 0);  // (1,1) is a global minimum
  std::vector<double> pd{2.0, 1.0};
  EXPECT_DOUBLE_EQ(pm.eval(std::span<const double>(pd)), 9.0);
}
