#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "wsos/eigen_sym.hpp"
#include "wsos/gram.hpp"
#include "wsos/werner.hpp"

using namespace wsos;

namespace {

Rational rnd(std::mt19937_64& rng) {
  std::uniform_int_distribution<long> num(-9, 9), den(1, 7);
  return make_rational(num(rng), den(rng));
}

Polynomial f_half() { return build_f(WernerParams(3, make_rational(1, 2)), FMode::ZCollapse); }

const std::vector<std::string> kReducedBasisD3{
    "z^2",       "z*v1_1",    "z*v2_1",    "z*v1_2",    "z*v2_2",    "z*w1_1",
    "z*w2_1",    "z*w1_2",    "z*w2_2",    "v1_1*w1_1", "v1_1*w2_1", "v2_1*w1_1",
    "v2_1*w2_1", "v1_2*w1_2", "v1_2*w2_2", "v2_2*w1_2", "v2_2*w2_2"};

MonomialBasis reduced_basis_d3() {
  auto f = f_half();
  return enumerate_basis(f.vars(), 2, BasisKind::Reduced, &f);
}

std::vector<Rational> random_params(std::mt19937_64& rng, std::size_t n) {
  std::vector<Rational> c(n);
  for (auto& x : c) x = rnd(rng);
  return c;
}

}  // namespace

TEST(Basis, FullAndReducedSizes) {
  auto f = f_half();
  EXPECT_EQ(enumerate_basis(f.vars(), 2, BasisKind::Full).size(), 55u);
  auto red = reduced_basis_d3();
  ASSERT_EQ(red.size(), 17u);
  for (std::size_t i = 0; i < 17; ++i) EXPECT_EQ(red.name(i), kReducedBasisD3[i]);
}

TEST(Basis, SmallCasesAndErrors) {
  auto t = VarTable::make({"x"});
  auto x = Polynomial::variable(t, "x");
  const auto xx = x * x;
  auto b = enumerate_basis(t, 1, BasisKind::Reduced, &xx);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(b.name(0), "x");
  auto full = enumerate_basis(VarTable::make({"x", "y"}), 2, BasisKind::Full);
  ASSERT_EQ(full.size(), 6u);
  EXPECT_EQ(full.name(0), "1");
  EXPECT_EQ(full.name(1), "x");
  EXPECT_EQ(full.name(3), "x^2");
  auto nonhom = x * x + x;
  EXPECT_THROW(enumerate_basis(t, 1, BasisKind::Reduced, &nonhom), UsageError);
  EXPECT_THROW(enumerate_basis(t, 1, BasisKind::Reduced), UsageError);
}

TEST(GramFamily, HandCheckableThreeByThree) {
  auto t = VarTable::make({"x", "y"});
  auto x = Polynomial::variable(t, "x"), y = Polynomial::variable(t, "y");
  auto target = (x * x + y * y).pow(2);
  auto basis = enumerate_basis(t, 2, BasisKind::Reduced, &target);
  ASSERT_EQ(basis.size(), 3u);
  auto fam = build_gram_family(target, basis);
  EXPECT_TRUE(fam.representable());
  ASSERT_EQ(fam.dim(), 1u);  // x^2 y^2 shared by (x^2, y^2) and (xy, xy)
  EXPECT_EQ(fam.particular(0, 0), 1);
  EXPECT_EQ(fam.particular(2, 2), 1);
  EXPECT_EQ(fam.particular(0, 2), make_rational(2, 3));
  EXPECT_EQ(fam.particular(1, 1), make_rational(2, 3));
  EXPECT_EQ(quadratic_form(basis, fam.particular), target);
}

TEST(GramFamily, SoundForRandomParameters) {
  auto f = f_half();
  auto basis = reduced_basis_d3();
  auto fam = build_gram_family(f, basis);
  EXPECT_TRUE(fam.representable());
  EXPECT_EQ(fam.dim(), 18u);
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    auto m = fam.member(random_params(rng, fam.dim()));
    EXPECT_EQ(quadratic_form(basis, m), f);
    EXPECT_TRUE(fam.contains(m));
  }
}

TEST(GramFamily, GeneratorsAreLinearlyIndependent) {
  auto fam = build_gram_family(f_half(), reduced_basis_d3());
  const std::size_t n = fam.basis.size();
  Matrix<Rational> a(n * (n + 1) / 2, fam.dim(), Rational(0));
  for (std::size_t k = 0; k < fam.dim(); ++k)
    for (const auto& [i, j, v] : fam.generators[k].entries) a(i * n - i * (i + 1) / 2 + j, k) += v;
  EXPECT_TRUE(nullspace(a).empty());
}

TEST(GramFamily, ProjectionLandsInFamily) {
  auto f = f_half();
  auto fam = build_gram_family(f, reduced_basis_d3());
  std::mt19937_64 rng(32);
  SymMatrix<Rational> y(17);
  for (std::size_t i = 0; i < 17; ++i)
    for (std::size_t j = i; j < 17; ++j) y(i, j) = rnd(rng);
  auto x = fam.project(y);
  EXPECT_TRUE(fam.contains(x));
  EXPECT_EQ(quadratic_form(fam.basis, x), f);
  EXPECT_EQ(fam.project(x), x);
}

TEST(GramFamily, MotzkinOverFullBasisIsConsistent) {
  auto t = VarTable::make({"x", "y"});
  auto x = Polynomial::variable(t, "x"), y = Polynomial::variable(t, "y");
  auto one = Polynomial::constant(t, 1);
  auto pm = x * x * y * y * (x * x + y * y - Rational(3) * one) + one;
  auto fam = build_gram_family(pm, enumerate_basis(t, 3, BasisKind::Full));
  EXPECT_TRUE(fam.representable());
  EXPECT_EQ(fam.basis.size(), 10u);
  EXPECT_EQ(quadratic_form(fam.basis, fam.particular), pm);
}

TEST(GramFamily, ReportsUnrepresentableMonomials) {
  auto t = VarTable::make({"x", "y"});
  auto x = Polynomial::variable(t, "x"), y = Polynomial::variable(t, "y");
  auto basis = enumerate_basis(t, 1, BasisKind::Full);
  auto fam = build_gram_family(x * x * x * y, basis);
  EXPECT_FALSE(fam.representable());
  EXPECT_EQ(fam.unrepresentable.size(), 1u);
}

TEST(ReferenceGram, MembershipAtRandomParameters) {
  auto basis = reduced_basis_d3();
  auto f = f_half();
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 100; ++trial)
    EXPECT_EQ(quadratic_form(basis, reference_gram(make_rational(1, 2), random_params(rng, 18))), f);
  auto f3 = build_f(WernerParams(3, make_rational(1, 3)), FMode::ZCollapse);
  EXPECT_EQ(quadratic_form(basis, reference_gram(make_rational(1, 3))), f3);
}

TEST(ReferenceGram, EntriesIncludePrefactor) {
  const Rational h(1, 2);
  auto m = reference_gram(h, std::vector<Rational>(18, Rational(0)));
  EXPECT_EQ(m(1, 5), -1);  // (2,6): (-2 - c1) / 2
  EXPECT_EQ(psm(m, PsmIndex{1}), SymMatrix<Rational>(1, Rational(2)));
  auto m3 = reference_gram(make_rational(1, 3));
  const long row[8] = {-2, 0, 0, -2, -2, 0, 0, -2};
  for (int j = 0; j < 8; ++j) EXPECT_EQ(m3(0, 9 + j), make_rational(row[j], 3));
  EXPECT_THROW(reference_gram(make_rational(2, 5)), UsageError);
  EXPECT_THROW(reference_gram(h, {Rational(1)}), UsageError);
}

TEST(ReferenceGram, Psm268MatchesDisplay) {
  auto aff = reference_gram_affine(make_rational(1, 2));
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 10; ++trial) {
    auto c = random_params(rng, 18);
    auto s = psm(aff.at(c), PsmIndex{2, 6, 8});
    // Displayed without the global factor 1/2.
    EXPECT_EQ(2 * s(0, 0), 2);
    EXPECT_EQ(2 * s(0, 1), -2 - c[0]);
    EXPECT_EQ(2 * s(0, 2), 0);
    EXPECT_EQ(2 * s(1, 1), 2);
    EXPECT_EQ(2 * s(1, 2), 2);
    EXPECT_EQ(2 * s(2, 2), 2);
  }
}

TEST(Forcing, ReproducesTableValues) {
  auto aff = reference_gram_affine(make_rational(1, 2));
  std::vector<PsmIndex> schedule;
  for (const auto& row : forcing_table()) schedule.push_back(row.psm);
  auto rep = psm_forcing(aff, schedule);
  ASSERT_EQ(rep.steps.size(), 18u);
  EXPECT_FALSE(rep.infeasible);
  const auto table = forcing_table();
  for (std::size_t k = 0; k < 18; ++k) {
    const auto& step = rep.steps[k];
    EXPECT_EQ(step.psm, table[k].psm);
    EXPECT_EQ(step.param + 1, table[k].param);
    EXPECT_EQ(step.value, table[k].value);
    // The pinning minor is a non-positive multiple of a square vanishing at the value.
    ASSERT_EQ(step.minor.size(), 3u);
    EXPECT_LT(step.minor[2], 0);
    EXPECT_EQ(upoly_eval(step.minor, step.value), 0);
    EXPECT_EQ(step.minor[1] * step.minor[1], 4 * step.minor[0] * step.minor[2]);
  }
}

TEST(Forcing, OrderIndependent) {
  auto aff = reference_gram_affine(make_rational(1, 2));
  std::vector<PsmIndex> schedule;
  for (const auto& row : forcing_table()) schedule.push_back(row.psm);
  std::mt19937_64 rng(35);
  for (int trial = 0; trial < 20; ++trial) {
    std::shuffle(schedule.begin(), schedule.end(), rng);
    auto rep = psm_forcing(aff, schedule);
    ASSERT_EQ(rep.assignment.size(), 18u);
    const auto values = table_values();
    for (std::size_t k = 0; k < 18; ++k) EXPECT_EQ(rep.assignment.at(k), values[k]);
  }
}

TEST(Forcing, PrintedNinthRowDoesNotForceC9) {
  auto aff = reference_gram_affine(make_rational(1, 2));
  std::vector<PsmIndex> schedule;
  for (const auto& row : forcing_table()) schedule.push_back(row.psm == PsmIndex{2, 12, 16} ? printed_c9_psm() : row.psm);
  auto rep = psm_forcing(aff, schedule);
  EXPECT_EQ(rep.assignment.count(8), 0u);
  bool seen = false;
  for (const auto& att : rep.other)
    if (att.psm == printed_c9_psm()) {
      seen = true;
      EXPECT_EQ(att.outcome, ForcingOutcome::NoForcing);
    }
  EXPECT_TRUE(seen);
}

TEST(Forcing, SingleSteps) {
  auto aff = reference_gram_affine(make_rational(1, 2));
  auto [att, step] = analyze_psm(aff, {}, PsmIndex{2, 6, 8});
  ASSERT_TRUE(step);
  EXPECT_EQ(step->param, 0u);
  EXPECT_EQ(step->value, -2);
  auto [att2, step2] = analyze_psm(aff, {}, PsmIndex{11, 12, 16});
  ASSERT_TRUE(step2);
  EXPECT_EQ(step2->param, 16u);
  EXPECT_EQ(step2->value, -1);
  // Constant PSD block: nothing to force.
  auto [att3, step3] = analyze_psm(aff, {}, PsmIndex{1, 2});
  EXPECT_FALSE(step3);
  EXPECT_EQ(att3.outcome, ForcingOutcome::NoForcing);
  // A PSM with a free parameter that stays PSD on an interval reports it.
  auto [att4, step4] = analyze_psm(aff, {}, PsmIndex{10, 13});
  EXPECT_FALSE(step4);
  EXPECT_EQ(att4.outcome, ForcingOutcome::NoForcing);
  EXPECT_NEAR(att4.lo, -1, 1e-12);
  EXPECT_NEAR(att4.hi, 1, 1e-12);
}

TEST(Eigenvalues, ForcedHalfMatrixAndOneThirdMatrix) {
  auto forced = reference_gram(make_rational(1, 2), table_values());
  EXPECT_NEAR(lambda_min(to_double(forced)), 1 - std::sqrt(5.0), 1e-12);
  // det(xI - M) = x^8 (x - 2)^7 (x^2 - 2x - 4).
  auto cp = charpoly(forced);
  UPoly expect{Rational(1)};
  auto times = [&](const UPoly& q) {
    UPoly r(expect.size() + q.size() - 1);
    for (std::size_t i = 0; i < expect.size(); ++i)
      for (std::size_t j = 0; j < q.size(); ++j) r[i + j] += expect[i] * q[j];
    expect = r;
  };
  for (int k = 0; k < 8; ++k) times({Rational(0), Rational(1)});
  for (int k = 0; k < 7; ++k) times({Rational(-2), Rational(1)});
  times({Rational(-4), Rational(-2), Rational(1)});
  EXPECT_EQ(cp, expect);
  auto v = psd_exact(forced);
  ASSERT_FALSE(v.psd);
  EXPECT_LT(quadratic(forced, v.witness), 0);

  auto m3 = reference_gram(make_rational(1, 3));
  EXPECT_NEAR(lambda_min(to_double(m3)), 0.0, 1e-12);
  EXPECT_TRUE(psd_exact(m3).psd);
  EXPECT_EQ(charpoly(m3)[0], 0);  // singular
}

TEST(Forcing, AutomaticProofOnOwnFamily) {
  auto fam = build_gram_family(f_half(), reduced_basis_d3());
  auto proof = auto_forcing(fam.affine());
  EXPECT_TRUE(proof.proven);
  ASSERT_TRUE(proof.forced_verdict);
  EXPECT_FALSE(proof.forced_verdict->psd);
  EXPECT_LT(quadratic(proof.forced_matrix, proof.forced_verdict->witness), 0);
  EXPECT_EQ(quadratic_form(fam.basis, proof.forced_matrix), f_half());
}

TEST(Forcing, AllSmallPsms) {
  auto all = all_small_psms(5, 3);
  EXPECT_EQ(all.size(), 10u + 10u);
  EXPECT_EQ(all.front(), (PsmIndex{1, 2}));
}
