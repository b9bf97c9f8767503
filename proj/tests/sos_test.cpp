#include <gtest/gtest.h>

#include <random>

#include "wsos/certify.hpp"

using namespace wsos;

namespace {

struct TwoVars {
  VarTablePtr t = VarTable::make({"x", "y"});
  Polynomial x = Polynomial::variable(t, "x"), y = Polynomial::variable(t, "y");
  Polynomial one = Polynomial::constant(t, 1);
  Polynomial motzkin() const { return x * x * y * y * (x * x + y * y - Rational(3) * one) + one; }
};

Polynomial homogenized_motzkin() {
  auto t = VarTable::make({"x", "y", "z"});
  auto x = Polynomial::variable(t, "x"), y = Polynomial::variable(t, "y"), z = Polynomial::variable(t, "z");
  return x.pow(4) * y * y + x * x * y.pow(4) - Rational(3) * x * x * y * y * z * z + z.pow(6);
}

GramFamily werner_family(const Rational& alpha) {
  auto f = build_f(WernerParams(3, alpha), FMode::ZCollapse);
  return build_gram_family(f, enumerate_basis(f.vars(), 2, BasisKind::Reduced, &f));
}

AscentOptions quick(int restarts = 6) {
  AscentOptions o;
  o.restarts = restarts;
  o.seed = 7;
  return o;
}

std::vector<Rational> random_point(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<long> num(-20, 20), den(1, 9);
  std::vector<Rational> x(n);
  for (auto& v : x) v = make_rational(num(rng), den(rng));
  return x;
}

void expect_eval_identity(const SosCertificate& cert, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (int k = 0; k < 50; ++k) {
    auto x = random_point(rng, cert.target.vars()->size());
    EXPECT_EQ(cert.target.eval(x), cert.eval_sum_of_squares(x));
  }
}

}  // namespace

TEST(Ascent, KnownSosFamilyReachesPsd) {
  TwoVars v;
  auto target = (v.x * v.x + v.y * v.y).pow(2);
  auto fam = build_gram_family(target, enumerate_basis(v.t, 2, BasisKind::Reduced, &target));
  auto res = maximize_lambda_min(fam.affine(), quick());
  // max over a of min(1 - |a|, 2 - 2a) is 1 at a = 0.
  EXPECT_NEAR(res.best_value, 1.0, 1e-6);
}

TEST(Ascent, ValueIsAttainedAtReturnedPoint) {
  auto fam = werner_family(make_rational(1, 2)).affine();
  auto res = maximize_lambda_min(fam, quick(3));
  EXPECT_NEAR(lambda_min(fam.at(res.best_t)), res.best_value, 1e-10);
  EXPECT_LT(res.best_value, -0.35);
  EXPECT_GT(res.best_value, -0.36);
}

TEST(Ascent, DeterministicUnderSeed) {
  auto fam = werner_family(make_rational(5, 12)).affine();
  auto a = maximize_lambda_min(fam, quick(4));
  auto b = maximize_lambda_min(fam, quick(4));
  EXPECT_EQ(a.best_value, b.best_value);
  EXPECT_EQ(a.best_t, b.best_t);
  EXPECT_EQ(a.best_restart, b.best_restart);
  auto c = maximize_lambda_min(fam, [] {
    auto o = quick(4);
    o.seed = 8;
    return o;
  }());
  EXPECT_NE(a.runs[1].t, c.runs[1].t);
}

TEST(Ascent, MotzkinStaysNegative) {
  TwoVars v;
  auto fam = build_gram_family(v.motzkin(), enumerate_basis(v.t, 3, BasisKind::Full));
  auto res = maximize_lambda_min(fam.affine(), quick());
  EXPECT_LT(res.best_value, 0.0);
  EXPECT_GT(res.best_value, -0.01);
}

TEST(Ascent, ConcavityProbe) {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> nd(0.0, 1.0);
  TwoVars v;
  for (const auto& fam : {werner_family(make_rational(1, 2)).affine(),
                          build_gram_family(v.motzkin(), enumerate_basis(v.t, 3, BasisKind::Full)).affine()}) {
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> t1(fam.num_params()), t2(fam.num_params()), mid(fam.num_params());
      for (std::size_t k = 0; k < t1.size(); ++k) {
        t1[k] = nd(rng);
        t2[k] = nd(rng);
        mid[k] = 0.5 * (t1[k] + t2[k]);
      }
      const double l1 = lambda_min(fam.at(t1)), l2 = lambda_min(fam.at(t2)), lm = lambda_min(fam.at(mid));
      EXPECT_GE(lm, std::min(l1, l2) - 1e-9);
      EXPECT_GE(lm, 0.5 * (l1 + l2) - 1e-9);
    }
  }
}

TEST(Certify, SquareOfSumOfSquares) {
  TwoVars v;
  auto target = (v.x * v.x + v.y * v.y).pow(2);
  auto fam = build_gram_family(target, enumerate_basis(v.t, 2, BasisKind::Reduced, &target));
  CertifyOptions o;
  o.ascent = quick();
  auto res = certify(fam, o);
  ASSERT_EQ(res.status, SosStatus::Sos);
  ASSERT_TRUE(res.certificate);
  EXPECT_TRUE(res.certificate->verify());
  SymMatrix<Rational> expect = SymMatrix<Rational>::identity(3);
  expect(1, 1) = 2;
  EXPECT_EQ(res.certificate->gram, expect);
  expect_eval_identity(*res.certificate, 51);
  Polynomial sum(v.t);
  const auto sq = res.certificate->squares();
  for (std::size_t k = 0; k < sq.size(); ++k) sum += res.certificate->weights()[k] * sq[k] * sq[k];
  EXPECT_EQ(sum, target);
}

TEST(Certify, OneThirdMatrixIsACertificate) {
  auto fam = werner_family(make_rational(1, 3));
  auto cert = make_certificate(fam.basis, fam.target, reference_gram(make_rational(1, 3)));
  ASSERT_TRUE(cert);
  EXPECT_EQ(cert->ldl.rank, 8u);
  expect_eval_identity(*cert, 52);
  CertifyOptions o;
  o.ascent = quick();
  auto res = certify(fam, o);
  ASSERT_EQ(res.status, SosStatus::Sos);
  EXPECT_TRUE(res.certificate->verify());
  expect_eval_identity(*res.certificate, 53);
}

TEST(Certify, HalfIsProvenNotSos) {
  CertifyOptions o;
  o.ascent = quick();
  auto res = certify(werner_family(make_rational(1, 2)), o);
  EXPECT_EQ(res.status, SosStatus::NotSosProof);
  EXPECT_FALSE(res.certificate);
  // Without the zero-based face the forcing argument still proves it.
  o.face_reduction = false;
  auto res2 = certify(werner_family(make_rational(1, 2)), o);
  EXPECT_EQ(res2.status, SosStatus::NotSosProof);
  ASSERT_TRUE(res2.forcing);
  EXPECT_TRUE(res2.forcing->proven);
  EXPECT_LT(res2.best_lambda_min, -0.3);
}

TEST(Certify, MotzkinHasNoCertificate) {
  TwoVars v;
  auto fam = build_gram_family(v.motzkin(), enumerate_basis(v.t, 3, BasisKind::Full));
  CertifyOptions o;
  o.ascent = quick();
  auto res = certify(fam, o);
  EXPECT_NE(res.status, SosStatus::Sos);
  EXPECT_EQ(res.zeros_found, 4u);
}

TEST(Certify, ZerosOfMotzkin) {
  TwoVars v;
  auto z = find_rational_zeros(v.motzkin());
  ASSERT_EQ(z.size(), 4u);
  for (const auto& p : z) {
    EXPECT_EQ(abs(p[0]), 1);
    EXPECT_EQ(abs(p[1]), 1);
  }
  EXPECT_TRUE(find_rational_zeros(v.motzkin(), {Rational(2)}).empty());
}

TEST(Certify, NumericKernelRecoversExactNullspace) {
  auto m = reference_gram(make_rational(1, 3));
  auto guess = detail::numeric_kernel(to_double(m), 1e-6, 1000);
  auto exact = nullspace(m.dense());
  ASSERT_EQ(guess.size(), exact.size());
  EXPECT_EQ(independent_rows(guess, 17), independent_rows(exact, 17));
}

TEST(Certify, FaceReductionKillsKernel) {
  auto fam = werner_family(make_rational(1, 3));
  auto kernel = zero_vectors(fam.basis, find_rational_zeros(fam.target));
  ASSERT_FALSE(kernel.empty());
  auto face = face_reduce(fam, kernel);
  ASSERT_TRUE(face.consistent);
  std::mt19937_64 rng(54);
  for (int trial = 0; trial < 10; ++trial) {
    auto s = random_point(rng, face.face.num_params());
    auto m = face.face.at(s);
    EXPECT_TRUE(fam.contains(m));
    for (const auto& x : kernel)
      for (std::size_t i = 0; i < m.n(); ++i) {
        Rational acc(0);
        for (std::size_t j = 0; j < m.n(); ++j) acc += m(i, j) * x[j];
        EXPECT_EQ(acc, 0);
      }
  }
}

TEST(Reznick, HomogenizedMotzkinSmallestMultiplier) {
  CertifyOptions o;
  o.ascent = quick();
  std::vector<ReznickResult> trials;
  auto found = smallest_reznick_r(homogenized_motzkin(), 3, o, &trials);
  ASSERT_TRUE(found);
  EXPECT_EQ(found->r, 1);
  ASSERT_EQ(trials.size(), 2u);
  EXPECT_EQ(trials[0].certify.status, SosStatus::NotSosProof);
  ASSERT_TRUE(found->certify.certificate);
  EXPECT_TRUE(found->certify.certificate->verify());
  expect_eval_identity(*found->certify.certificate, 55);
  EXPECT_EQ(found->certify.certificate->target,
            homogenized_motzkin() * sum_of_squares_power(homogenized_motzkin().vars(), 1));
}

TEST(Reznick, ZeroMultiplierOnWernerTarget) {
  CertifyOptions o;
  o.ascent = quick(2);
  auto res = reznick_trial(werner_family(make_rational(1, 2)).target, 0, o);
  EXPECT_EQ(res.basis_size, 17u);
  EXPECT_NE(res.certify.status, SosStatus::Sos);
  EXPECT_LT(res.ascent_lambda_min, -0.3);
}

TEST(Reznick, Errors) {
  TwoVars v;
  EXPECT_THROW(reznick_trial(v.motzkin(), 1), UsageError);
  EXPECT_THROW(reznick_trial(homogenized_motzkin(), -1), UsageError);
  EXPECT_THROW(reznick_trial(werner_family(make_rational(1, 2)).target, 6), GuardError);
}

TEST(Sweep, EndpointsAndLinearity) {
  const std::vector<Rational> grid{make_rational(1, 3), make_rational(3, 8), make_rational(5, 12),
                                   make_rational(11, 24), make_rational(1, 2)};
  auto rows = alpha_sweep(3, grid, quick(4));
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_NEAR(rows[0].best_lambda_min, 0.0, 1e-6);
  EXPECT_TRUE(rows[0].has_real_zero);
  EXPECT_TRUE(rows[0].certified);
  for (std::size_t k = 1; k < 5; ++k) {
    EXPECT_LT(rows[k].best_lambda_min, rows[k - 1].best_lambda_min);
    EXPECT_FALSE(rows[k].certified);
  }
  // The maximum is linear in alpha on this interval.
  for (std::size_t k = 1; k + 1 < 5; ++k)
    EXPECT_NEAR(rows[k].best_lambda_min, 0.5 * (rows[k - 1].best_lambda_min + rows[k + 1].best_lambda_min), 2e-3);
  EXPECT_THROW(alpha_sweep(3, {make_rational(1, 4)}), UsageError);
  EXPECT_THROW(alpha_sweep(3, {make_rational(3, 5)}), UsageError);
}
