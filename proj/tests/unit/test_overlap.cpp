#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "superres/error.hpp"
#include "superres/overlap.hpp"

using namespace superres;
using superres::oracle::rel_diff;

namespace {

PsfSpec sampled_gaussian(double sigma) {
  return PsfSpec::sampled(sigma, [sigma](double x) { return static_cast<double>(oracle::gaussian_psi(x, sigma)); });
}

}  // namespace

TEST(Overlap, GaussianFrozenValues) {
  const auto g1 = PsfSpec::gaussian(1.0);
  EXPECT_DOUBLE_EQ(delta(g1, 0.0), 1.0);
  EXPECT_NEAR(delta(g1, 1.0), 0.882497, 1e-6);
  EXPECT_NEAR(delta(PsfSpec::gaussian(2.0), 4.0), 0.606531, 1e-6);
  EXPECT_NEAR(delta_derivative(g1, 0.0, 1), 0.0, 1e-15);
  EXPECT_NEAR(delta_derivative(g1, 0.0, 2), -0.25, 1e-15);
  EXPECT_NEAR(delta_derivative(g1, 0.0, 4), 3.0 / 16.0, 1e-15);
  EXPECT_NEAR(delta_derivative(g1, 0.0, 6), -15.0 / 64.0, 1e-15);
}

TEST(Overlap, GaussianMatchesRealSpaceQuadrature) {
  for (double sigma : {0.5, 1.0, 2.0})
    for (double s : {1e-3, 0.1, 1.0, 3.0, 10.0}) {
      const double q = oracle::real_space_overlap([sigma](long double x) { return oracle::gaussian_psi(x, sigma); },
                                                   s * sigma, 30.0 * sigma);
      EXPECT_LT(rel_diff(delta(PsfSpec::gaussian(sigma), s * sigma), q), 1e-12) << sigma << " " << s;
    }
}

TEST(Overlap, DerivativesMatchFiniteDifferences) {
  const auto g = PsfSpec::gaussian(1.3);
  for (double s : {0.2, 1.0, 2.5})
    for (int order = 1; order <= 6; ++order) {
      auto lower = [&](double x) { return order == 1 ? delta(g, x) : delta_derivative(g, x, order - 1); };
      const double fd = oracle::central_derivative(lower, s, 1e-3);
      EXPECT_NEAR(delta_derivative(g, s, order), fd, 1e-7) << s << " " << order;
    }
}

TEST(Overlap, OneMinusDeltaIsCancellationFree) {
  const auto g = PsfSpec::gaussian(1.0);
  EXPECT_LT(rel_diff(one_minus_delta(g, 1e-6), -std::expm1(-1e-12 / 8.0)), 1e-14);
  EXPECT_LT(rel_diff(one_minus_delta(g, 2.0), 1.0 - std::exp(-0.5)), 1e-14);
}

TEST(Overlap, OrderOutOfRangeThrows) {
  const auto g = PsfSpec::gaussian(1.0);
  EXPECT_THROW(delta_derivative(g, 0.5, 0), ValidationError);
  EXPECT_THROW(delta_derivative(g, 0.5, 7), ValidationError);
  EXPECT_THROW(delta(g, -1.0), ValidationError);
}

TEST(Overlap, NumericPsfMatchesGaussianClosedForm) {
  for (double sigma : {1.0, 0.7}) {
    const auto num = sampled_gaussian(sigma);
    const auto ana = PsfSpec::gaussian(sigma);
    EXPECT_NEAR(delta(num, 0.0), 1.0, 1e-10);
    EXPECT_NEAR(delta_derivative(num, 0.0, 1), 0.0, 1e-12);
    for (double s = 1e-3; s <= 10.0; s *= 1.7) {
      const double x = s * sigma;
      EXPECT_LT(rel_diff(delta(num, x), delta(ana, x)), 1e-9) << s;
      EXPECT_LT(rel_diff(one_minus_delta(num, x), one_minus_delta(ana, x)), 1e-9) << s;
    }
    for (int order = 2; order <= 6; order += 2)
      EXPECT_LT(rel_diff(delta_derivative(num, 0.0, order), delta_derivative(ana, 0.0, order)), 1e-9);
  }
}

TEST(Overlap, NumericPsfRejectsBadSamples) {
  auto wide = [](double x) { return static_cast<double>(oracle::gaussian_psi(x, 1.0)); };
  EXPECT_THROW(PsfSpec::sampled(1.0, [&](double x) { return 1.1 * wide(x); }), QuadratureError);
  Quadrature narrow;
  narrow.halfwidth = 2.0;
  EXPECT_THROW(PsfSpec::sampled(1.0, wide, narrow), QuadratureError);
}

TEST(Overlap, NumericPsfNonGaussianShape) {
  // Hyperbolic secant amplitude, normalized: psi = sqrt(a/2) sech(a x).
  const double a = 1.5;
  const auto num = PsfSpec::sampled(1.0, [a](double x) { return std::sqrt(a / 2.0) / std::cosh(a * x); });
  for (double s : {0.3, 1.0, 2.0}) {
    const double q = oracle::real_space_overlap(
        [a](long double x) { return std::sqrt(a / 2.0L) / std::cosh(a * x); }, s);
    EXPECT_LT(rel_diff(delta(num, s), q), 1e-9) << s;
  }
  const auto oc = calculus_at(num, 0.5, 0.5);
  EXPECT_GE(oc.eps_plus2, 0.0);
  EXPECT_GE(oc.eps_minus2, 0.0);
}

TEST(Overlap, CalculusLargeSeparationDecouples) {
  const auto oc = calculus_at(PsfSpec::gaussian(1.0), 100.0, 0.4);
  EXPECT_NEAR(oc.delta, 0.0, 1e-300);
  EXPECT_NEAR(oc.eps_plus2, 0.25, 1e-12);
  EXPECT_NEAR(oc.eps_minus2, 0.25, 1e-12);
  EXPECT_NEAR(oc.eta_plus, 0.4, 1e-12);
  EXPECT_NEAR(oc.eta_minus, 0.4, 1e-12);
}

TEST(Overlap, CalculusSmallSeparationAntisymmetricCancels) {
  const auto oc = calculus_at(PsfSpec::gaussian(1.0), 0.1, 0.5);
  EXPECT_GE(oc.eps_minus2, 0.0);
  EXPECT_LE(oc.eps_minus2, 1e-5);
}

TEST(Overlap, CalculusDefinitionalIdentities) {
  const auto g = PsfSpec::gaussian(1.0);
  for (double s : {1e-3, 0.1, 2.0, 7.0}) {
    const auto oc = calculus_at(g, s, 0.25);
    EXPECT_TRUE(std::isfinite(oc.b_plus) && std::isfinite(oc.b_minus) && std::isfinite(oc.theta_minus));
    EXPECT_LT(rel_diff(oc.b_plus * oc.b_plus, oc.eps_plus2 / (4.0 * (1.0 + oc.delta))), 1e-14);
    EXPECT_LT(rel_diff(oc.b_minus * oc.b_minus, oc.eps_minus2 / (4.0 * oc.one_minus_delta)), 1e-14);
    EXPECT_LE(oc.b_plus, 0.0);
    EXPECT_LE(oc.b_minus, 0.0);
    EXPECT_NEAR(oc.dk2, 0.25, 1e-15);
    EXPECT_NEAR(std::cos(oc.theta_plus), std::sqrt(oc.eta_plus), 1e-14);
  }
  // Defining combination eps^2 = dk2 -+ beta - gamma^2 / (1 +- delta) away from cancellation.
  const auto oc = calculus_at(g, 2.0, 0.25);
  EXPECT_LT(rel_diff(oc.eps_plus2, oc.dk2 - oc.beta - oc.gamma * oc.gamma / (1.0 + oc.delta)), 1e-13);
  EXPECT_LT(rel_diff(oc.eps_minus2, oc.dk2 + oc.beta - oc.gamma * oc.gamma / (1.0 - oc.delta)), 1e-13);
}

TEST(Overlap, CalculusPreconditions) {
  const auto g = PsfSpec::gaussian(1.0);
  EXPECT_THROW(calculus_at(g, 0.0, 0.25), ValidationError);
  EXPECT_THROW(calculus_at(g, 1.0, 0.6), ValidationError);
  EXPECT_THROW(calculus_at(g, 1.0, 0.0), ValidationError);
}

TEST(Overlap, CalculusIsBitReproducible) {
  const auto g = PsfSpec::gaussian(1.0);
  const auto a = calculus_at(g, 0.37, 0.3);
  const auto b = calculus_at(g, 0.37, 0.3);
  EXPECT_EQ(a.eps_minus2, b.eps_minus2);
  EXPECT_EQ(a.b_plus, b.b_plus);
}

TEST(Overlap, SmallSeparationSlopes) {
  const auto g = PsfSpec::gaussian(1.0);
  const BSlopes sl = b_small_s_expansion(g);
  EXPECT_NEAR(sl.b_plus_slope, -std::numbers::sqrt2 / 16.0, 1e-15);
  // The quoted antisymmetric closed form vanishes for the Gaussian ...
  EXPECT_NEAR(sl.b_minus_slope, 0.0, 1e-15);
  // ... while the series limit does not.
  EXPECT_NEAR(sl.b_minus_limit, -1.0 / std::sqrt(384.0), 1e-12);

  const auto oc = calculus_at(g, 1e-3, 0.5);
  EXPECT_LT(rel_diff(oc.b_plus / 1e-3, sl.b_plus_slope), 1e-2);
  for (double s : {1e-3, 3e-3, 1e-2}) {
    const auto c = calculus_at(g, s, 0.5);
    EXPECT_LT(rel_diff(c.b_minus / s, sl.b_minus_limit), 1e-3) << s;
  }
}
