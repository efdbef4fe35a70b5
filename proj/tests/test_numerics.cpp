#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "purcell/numerics.hpp"

using namespace purcell;
using std::numbers::pi;

namespace {

// Si(x) from its power series; converges fast for x of order one.
double sine_integral_series(double x) {
  double sum = 0.0, term = x;
  for (int n = 0; n < 40; ++n) {
    sum += term / (2 * n + 1);
    term *= -x * x / ((2 * n + 2) * (2 * n + 3));
  }
  return sum;
}

} // namespace

TEST(Adaptive, PolynomialIsExact) {
  const auto r = integrate_adaptive([](double x) { return x * x; }, 0.0, 1.0);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value.real(), 1.0 / 3.0, 1e-14);
  EXPECT_EQ(r.value.imag(), 0.0);
}

TEST(Adaptive, ZeroIntegrand) {
  const auto r = integrate_adaptive([](double) { return 0.0; }, 0.0, 5.0);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.value, cplx(0.0, 0.0));
}

TEST(Adaptive, DampedCosineOverLongInterval) {
  // ∫₀^∞ e^{−x} cos(10x) dx = 1/(1 + 100); the [50, ∞) remainder is below e^{−50}.
  const auto r = integrate_adaptive([](double x) { return std::exp(-x) * std::cos(10.0 * x); }, 0.0, 50.0);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value.real(), 1.0 / 101.0, 1e-10);
}

TEST(Adaptive, ComplexIntegrand) {
  // ∫₀^π e^{ix} dx = 2i
  const auto r = integrate_adaptive([](double x) { return std::exp(cplx(0.0, x)); }, 0.0, pi);
  EXPECT_NEAR(std::abs(r.value - cplx(0.0, 2.0)), 0.0, 1e-13);
}

TEST(Adaptive, ConvergedResultHonoursTolerance) {
  QuadratureSpec spec;
  spec.rel_tol = 1e-10;
  const auto r = integrate_adaptive([](double x) { return std::sqrt(x); }, 0.0, 1.0, spec);
  ASSERT_TRUE(r.converged);
  EXPECT_LE(r.error_estimate, spec.target(std::abs(r.value)));
  EXPECT_NEAR(r.value.real(), 2.0 / 3.0, 1e-9);
}

TEST(Adaptive, BudgetExhaustionReportsNotConverged) {
  QuadratureSpec spec;
  spec.max_subdivisions = 3;
  spec.rel_tol = 1e-14;
  spec.abs_tol = 0.0;
  const auto r = integrate_adaptive([](double x) { return std::sin(200.0 * x * x); }, 0.0, 10.0, spec);
  EXPECT_FALSE(r.converged);
}

TEST(Adaptive, NanIsAHardErrorNamingTheAbscissa) {
  try {
    integrate_adaptive([](double x) { return x > 0.5 ? std::nan("") : 1.0; }, 0.0, 1.0);
    FAIL() << "expected NonFiniteValue";
  } catch (const NonFiniteValue &e) {
    EXPECT_GT(e.abscissa(), 0.5);
    EXPECT_LE(e.abscissa(), 1.0);
  }
}

TEST(Adaptive, RejectsEmptyInterval) {
  EXPECT_THROW(integrate_adaptive([](double) { return 1.0; }, 1.0, 1.0), ContractViolation);
}

TEST(Adaptive, SpecValidation) {
  QuadratureSpec spec;
  spec.rel_tol = 0.0;
  EXPECT_THROW(spec.validate(), ContractViolation);
  spec = {};
  spec.abs_tol = -1.0;
  EXPECT_THROW(spec.validate(), ContractViolation);
  spec = {};
  spec.max_subdivisions = 0;
  EXPECT_THROW(spec.validate(), ContractViolation);
  spec = {};
  spec.oscillation_period_hint = -2.0;
  EXPECT_THROW(spec.validate(), ContractViolation);
}

TEST(AdaptiveProperty, Linearity) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double p = u(rng), q = u(rng), s = u(rng);
    const cplx alpha(u(rng), u(rng)), beta(u(rng), u(rng));
    auto f = [&](double x) { return std::exp(p * x) * std::cos(3.0 * q * x); };
    auto g = [&](double x) { return 1.0 / (1.0 + s * s + x * x); };
    auto h = [&](double x) { return alpha * f(x) + beta * g(x); };
    const QuadratureSpec spec;
    const auto rf = integrate_adaptive(f, -1.0, 2.0, spec);
    const auto rg = integrate_adaptive(g, -1.0, 2.0, spec);
    const auto rh = integrate_adaptive(h, -1.0, 2.0, spec);
    const cplx combined = alpha * rf.value + beta * rg.value;
    const double tol = spec.target(std::abs(rh.value)) +
                       std::abs(alpha) * spec.target(std::abs(rf.value)) +
                       std::abs(beta) * spec.target(std::abs(rg.value));
    EXPECT_LE(std::abs(rh.value - combined), 2.0 * tol) << "trial " << trial;
  }
}

TEST(AdaptiveProperty, IntervalAdditivity) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double w = 1.0 + 9.0 * u(rng), phase = 6.0 * u(rng);
    auto f = [&](double x) { return std::sin(w * x + phase) * std::exp(-0.3 * x) + x; };
    const double a = -u(rng), b = 2.0 * u(rng), c = 2.0 + 3.0 * u(rng);
    const QuadratureSpec spec;
    const auto ab = integrate_adaptive(f, a, b, spec);
    const auto bc = integrate_adaptive(f, b, c, spec);
    const auto ac = integrate_adaptive(f, a, c, spec);
    const double tol = spec.target(std::abs(ab.value)) + spec.target(std::abs(bc.value)) +
                       spec.target(std::abs(ac.value));
    EXPECT_LE(std::abs(ab.value + bc.value - ac.value), 2.0 * tol) << "trial " << trial;
  }
}

TEST(AdaptiveProperty, ErrorEstimateIsAnUpperBound) {
  // Reference: same integral at ten times tighter tolerance, cross-checked
  // against the closed form ∫ e^{px} cos(qx + r) dx.
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int covered = 0;
  const int trials = 400;
  for (int trial = 0; trial < trials; ++trial) {
    const double p = -2.0 + 4.0 * u(rng), q = 30.0 * u(rng), r = 6.0 * u(rng);
    auto f = [&](double x) { return std::exp(p * x) * std::cos(q * x + r); };
    auto antiderivative = [&](double x) {
      return std::exp(p * x) * (p * std::cos(q * x + r) + q * std::sin(q * x + r)) / (p * p + q * q);
    };
    QuadratureSpec coarse;
    coarse.rel_tol = 1e-5;
    coarse.abs_tol = 1e-9;
    QuadratureSpec fine = coarse;
    fine.rel_tol /= 10.0;
    fine.abs_tol /= 10.0;
    const auto approx = integrate_adaptive(f, 0.0, 2.0, coarse);
    const auto reference = integrate_adaptive(f, 0.0, 2.0, fine);
    const double exact = antiderivative(2.0) - antiderivative(0.0);
    ASSERT_NEAR(reference.value.real(), exact, 1e-8);
    if (std::abs(approx.value - reference.value) <= approx.error_estimate)
      ++covered;
  }
  EXPECT_GE(covered, static_cast<int>(0.95 * trials));
}

TEST(PrincipalValue, OddIntegrandVanishes) {
  const auto r = principal_value([](double) { return 1.0; }, 0.0, -1.0, 1.0);
  EXPECT_NEAR(std::abs(r.value), 0.0, 1e-12);
}

TEST(PrincipalValue, RemovableCase) {
  const auto r = principal_value([](double x) { return x; }, 0.0, -1.0, 1.0);
  EXPECT_NEAR(r.value.real(), 2.0, 1e-12);
}

TEST(PrincipalValue, AsymmetricInterval) {
  const auto r = principal_value([](double) { return 1.0; }, 0.5, 0.0, 2.0);
  EXPECT_NEAR(r.value.real(), std::log(3.0), 1e-12);
}

TEST(PrincipalValue, KnownTransform) {
  // P∫_{-1}^{1} e^x/(x) dx = Shi-type value: 2·Shi(1) = 2.1145017...
  // computed independently from the series Σ 2/((2n+1)(2n+1)!).
  double shi2 = 0.0, fact = 1.0;
  for (int n = 0; n < 20; ++n) {
    if (n > 0)
      fact *= (2.0 * n) * (2.0 * n + 1.0);
    shi2 += 2.0 / ((2.0 * n + 1.0) * fact);
  }
  const auto r = principal_value([](double x) { return std::exp(x); }, 0.0, -1.0, 1.0);
  EXPECT_NEAR(r.value.real(), shi2, 1e-11);
}

TEST(PrincipalValue, SymmetricAboutPoleIsZero) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double p = u(rng), half = u(rng), w = u(rng);
    auto f = [&](double x) { return std::cos(w * (x - p)) + (x - p) * (x - p); };
    const QuadratureSpec spec;
    const auto r = principal_value(f, p, p - half, p + half, spec);
    EXPECT_LE(std::abs(r.value), spec.abs_tol) << "trial " << trial;
  }
}

TEST(PrincipalValue, PoleOutsideIntervalIsRejected) {
  EXPECT_THROW(principal_value([](double) { return 1.0; }, 2.0, 0.0, 1.0), ContractViolation);
  EXPECT_THROW(principal_value([](double) { return 1.0; }, 0.0, 0.0, 1.0), ContractViolation);
}

TEST(SemiInfinite, ExponentialDecay) {
  const auto r = integrate_semi_infinite_oscillatory([](double x) { return std::exp(-x); }, 0.0);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value.real(), 1.0, 1e-9);
}

TEST(SemiInfinite, SincTail) {
  QuadratureSpec spec;
  spec.oscillation_period_hint = 2.0 * pi;
  const auto r =
      integrate_semi_infinite_oscillatory([](double x) { return std::sin(x) / x; }, 1.0, spec);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value.real(), pi / 2.0 - sine_integral_series(1.0), 1e-7);
  EXPECT_NEAR(r.value.real(), 0.62471, 1e-5);
}

TEST(SemiInfinite, ZeroIntegrand) {
  const auto r = integrate_semi_infinite_oscillatory([](double) { return 0.0; }, 0.0);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.value, cplx(0.0, 0.0));
}

TEST(SemiInfinite, AlgebraicDecayWithoutHint) {
  // ∫₁^∞ dx/x² = 1
  const auto r = integrate_semi_infinite_oscillatory([](double x) { return 1.0 / (x * x); }, 1.0);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value.real(), 1.0, 1e-7);
}

TEST(SemiInfinite, ComplexOscillatoryTail) {
  // ∫₀^∞ e^{ix} e^{−x/10} dx = 1/(0.1 − i)
  QuadratureSpec spec;
  spec.oscillation_period_hint = 2.0 * pi;
  const auto r = integrate_semi_infinite_oscillatory(
      [](double x) { return std::exp(cplx(-0.1, 1.0) * x); }, 0.0, spec);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(std::abs(r.value - 1.0 / cplx(0.1, -1.0)), 0.0, 1e-7);
}

TEST(SemiInfinite, NoDecayIsReportedNotConverged) {
  const auto r = integrate_semi_infinite_oscillatory([](double) { return 1.0; }, 0.0, {}, 30);
  EXPECT_FALSE(r.converged);
}

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
  for (int n : {8, 16, 32}) {
    const auto &rule = gauss_legendre(n);
    double sum = 0.0, weight_sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      sum += rule.weights[i] * std::pow(rule.nodes[i], 2 * n - 2);
      weight_sum += rule.weights[i];
    }
    EXPECT_NEAR(weight_sum, 2.0, 1e-14);
    EXPECT_NEAR(sum, 2.0 / (2 * n - 1), 1e-13) << "order " << n;
  }
  EXPECT_THROW(gauss_legendre(7), ContractViolation);
}
