#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "spath/crm_prior.hpp"
#include "spath/errors.hpp"
#include "spath/quadrature.hpp"
#include "support.hpp"

using namespace spath;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// kappa_i by direct quadrature of int z^i e^{-g z} rho(dz). Values below
// the double floor contribute < 1e-29 and would overflow the negative
// power, so they are dropped.
double kappa_by_quadrature(int i, double g, const PriorSpec& prior) {
  const double norm = std::tgamma(1.0 - prior.alpha);
  const double exponent = double(i) - prior.alpha - 1.0;
  const double rate = prior.beta_rate + g;
  return quadrature_oracle(
      [&](double z) {
        if (z < 1e-300) return 0.0;
        const double log_value = exponent * std::log(z) - rate * z;
        return log_value < -745.0 ? 0.0 : std::exp(log_value) / norm;
      },
      0.0, kInf, 1e-12);
}

// xi_i(t) by quadrature over the location dimension, integrated piece by
// piece so the quadrature never straddles a kink
double xi_by_quadrature(int i, double t, const PiecewiseLinear& g, const PriorSpec& prior) {
  if (t >= prior.eta_upper) return 0.0;
  auto integrand = [&](double v) {
    return kappa(i, g(v), prior) * prior.eta_mass / prior.eta_upper;
  };
  double total = 0.0;
  double lo = t;
  for (double bp : g.breakpoints()) {
    const double hi = std::min(bp, prior.eta_upper);
    if (hi > lo) {
      total += quadrature_oracle(integrand, lo, hi, 1e-12);
      lo = hi;
    }
  }
  if (prior.eta_upper > lo) total += quadrature_oracle(integrand, lo, prior.eta_upper, 1e-12);
  return total;
}

}  // namespace

TEST_CASE("prior validation") {
  PriorSpec prior;
  prior.validate();
  prior.alpha = 1.0;
  CHECK_THROWS_AS(prior.validate(), std::invalid_argument);
  prior.alpha = 0.0;
  prior.beta_rate = 0.0;
  CHECK_THROWS_AS(prior.validate(), std::invalid_argument);  // stable law needs alpha > 0
  prior.alpha = 0.5;
  prior.validate();
  prior.eta_mass = 0.0;
  CHECK_THROWS_AS(prior.validate(), std::invalid_argument);
}

TEST_CASE("kappa closed forms") {
  SUBCASE("gamma process value") {
    PriorSpec prior;  // alpha 0, rate 1
    CHECK(kappa(2, 3.0, prior) == doctest::Approx(0.0625).epsilon(1e-14));
  }
  SUBCASE("stable law value") {
    PriorSpec prior;
    prior.alpha = 0.5;
    prior.beta_rate = 0.0;
    CHECK(kappa(1, 4.0, prior) == doctest::Approx(0.5).epsilon(1e-14));
  }
  SUBCASE("random case against the quadrature oracle") {
    PriorSpec prior;
    prior.alpha = 0.3;
    prior.beta_rate = 0.7;
    const double expected = kappa_by_quadrature(3, 2.1, prior);
    CHECK(kappa(3, 2.1, prior) == doctest::Approx(expected).epsilon(1e-8));
  }
  SUBCASE("divergence at zero total rate") {
    PriorSpec prior;
    prior.alpha = 0.5;
    prior.beta_rate = 0.0;
    CHECK_THROWS_AS(kappa(1, 0.0, prior), NumericError);
  }
}

TEST_CASE("kappa ratio identity in log space") {
  Rng rng = make_rng(101);
  for (int rep = 0; rep < 500; ++rep) {
    const PriorSpec prior = testing::random_prior(3.0, rng);
    const double g = prior.beta_rate == 0.0 ? 0.5 + 2.0 * uniform01(rng) : 3.0 * uniform01(rng);
    const int i = std::uniform_int_distribution<int>(1, 40)(rng);
    const double lhs = log_kappa(i + 1, g, prior) - log_kappa(i, g, prior);
    const double rhs = std::log(double(i) - prior.alpha) - std::log(prior.beta_rate + g);
    CHECK(std::fabs(lhs - rhs) < 1e-12 * std::max(1.0, std::fabs(rhs)));
  }
}

TEST_CASE("xi integral") {
  SUBCASE("constant integrand closed form") {
    PriorSpec prior;
    prior.eta_upper = 6.0;
    const auto g = PiecewiseLinear::zero();
    for (double t : {0.0, 1.0, 3.5, 5.9}) {
      CHECK(xi_integral(1, t, g, prior) == doctest::Approx((6.0 - t) / 6.0).epsilon(1e-14));
    }
  }
  SUBCASE("empty range") {
    PriorSpec prior;
    prior.eta_upper = 6.0;
    const auto g = PiecewiseLinear::zero();
    for (int i : {1, 2, 5}) {
      CHECK(xi_integral(i, 6.0, g, prior) == 0.0);
      CHECK(xi_integral(i, 7.5, g, prior) == 0.0);
      CHECK(log_xi_integral(i, 6.0, g, prior) == kNegInf);
    }
  }
  SUBCASE("piecewise-linear cases match the quadrature oracle") {
    Rng rng = make_rng(202);
    for (int rep = 0; rep < 60; ++rep) {
      PriorSpec prior = testing::random_prior(3.0, rng, /*allow_stable=*/false);
      const auto g = testing::random_concave_pwl(3.0, rng);
      const int i = std::uniform_int_distribution<int>(1, 6)(rng);
      const double t = 0.9 * prior.eta_upper * uniform01(rng);
      const double expected = xi_by_quadrature(i, t, g, prior);
      CHECK(xi_integral(i, t, g, prior) == doctest::Approx(expected).epsilon(1e-8));
    }
  }
  SUBCASE("additivity over subintervals to 1e-12 relative") {
    Rng rng = make_rng(303);
    for (int rep = 0; rep < 200; ++rep) {
      const PriorSpec prior = testing::random_prior(3.0, rng, /*allow_stable=*/false);
      const auto g = testing::random_concave_pwl(3.0, rng);
      const int i = std::uniform_int_distribution<int>(1, 8)(rng);
      double t1 = prior.eta_upper * uniform01(rng);
      double t2 = prior.eta_upper * uniform01(rng);
      if (t1 > t2) std::swap(t1, t2);
      const double whole = xi_integral(i, t1, g, prior);
      const double right = xi_integral(i, t2, g, prior);
      // middle part by difference of full integrals from distinct anchors
      const double middle_direct = whole - right;
      // recompute the middle by shrinking eta to [0, t2]: same integrand on [t1, t2]
      PriorSpec clipped = prior;
      clipped.eta_upper = t2 == 0.0 ? prior.eta_upper : t2;
      const double middle =
          t2 == 0.0 ? 0.0
                    : xi_integral(i, t1, g, clipped) * (t2 / prior.eta_upper);
      if (whole > 0.0 && t2 > 0.0) {
        CHECK(std::fabs(middle + right - whole) <= 1e-12 * whole);
        CHECK(std::fabs(middle - middle_direct) <=
              1e-10 * std::max(whole, std::fabs(middle)));
      }
    }
  }
}

TEST_CASE("stable law xi handles the origin") {
  PriorSpec prior;
  prior.alpha = 0.5;
  prior.beta_rate = 0.0;
  prior.eta_upper = 2.0;
  // g with positive slope from zero: integrable for i = 1
  PiecewiseLinear g({0.0, 1.0}, {0.0, 2.0}, {2.0});
  const double value = xi_integral(1, 0.0, g, prior);
  const double expected = xi_by_quadrature(1, 0.0, g, prior);
  CHECK(value == doctest::Approx(expected).epsilon(1e-8));
  // i >= 2 diverges at the origin piece
  CHECK_THROWS_AS(xi_integral(2, 0.0, g, prior), NumericError);
  // but is finite away from zero
  CHECK(xi_integral(2, 0.1, g, prior) ==
        doctest::Approx(xi_by_quadrature(2, 0.1, g, prior)).epsilon(1e-8));
}

TEST_CASE("Laplace exponent integral") {
  SUBCASE("zero function") {
    PriorSpec prior;
    CHECK(laplace_exponent_integral(PiecewiseLinear::zero(), prior) == 0.0);
  }
  SUBCASE("constant g closed form") {
    PriorSpec prior;  // alpha = 0, rate = 1, c = 1
    prior.eta_upper = 6.0;
    // g == 3 everywhere: integral of log(4) * (1/6) over [0,6]
    PiecewiseLinear g({0.0, 1.0}, {3.0, 3.0}, {0.0});
    CHECK(laplace_exponent_integral(g, prior) ==
          doctest::Approx(std::log(4.0)).epsilon(1e-10));
  }
  SUBCASE("continuity in alpha at zero") {
    Rng rng = make_rng(404);
    for (int rep = 0; rep < 20; ++rep) {
      PriorSpec prior;
      prior.beta_rate = 0.5 + 2.0 * uniform01(rng);
      prior.eta_upper = 3.0 + 2.0 * uniform01(rng);
      const auto g = testing::random_concave_pwl(3.0, rng);
      PriorSpec nearby = prior;
      nearby.alpha = 1e-8;
      const double at_zero = laplace_exponent_integral(g, prior);
      const double near_zero = laplace_exponent_integral(g, nearby);
      CHECK(std::fabs(at_zero - near_zero) < 1e-6 * std::max(1.0, at_zero));
    }
  }
  SUBCASE("psi values against direct quadrature") {
    Rng rng = make_rng(505);
    for (int rep = 0; rep < 25; ++rep) {
      const PriorSpec prior = testing::random_prior(3.0, rng);
      const double g = 0.5 + 2.5 * uniform01(rng);
      const double norm = std::tgamma(1.0 - prior.alpha);
      const double expected = quadrature_oracle(
          [&](double z) {
            if (z < 1e-300) return 0.0;
            return -std::expm1(-g * z) * std::pow(z, -prior.alpha - 1.0) *
                   std::exp(-prior.beta_rate * z) / norm;
          },
          0.0, kInf, 1e-12);
      CHECK(crm_psi(g, prior) == doctest::Approx(expected).epsilon(1e-8));
    }
  }
  SUBCASE("divergence for the unsupported corner") {
    PriorSpec prior;
    prior.alpha = -0.5;
    prior.beta_rate = 0.0;
    // bypass validate() to probe the guard
    CHECK_THROWS_AS(laplace_exponent_integral(PiecewiseLinear::zero(), prior), NumericError);
  }
}

TEST_CASE("quadrature oracle sanity") {
  CHECK(quadrature_oracle([](double z) { return z * std::exp(-z); }, 0.0, kInf, 1e-10) ==
        doctest::Approx(1.0).epsilon(1e-10));
  CHECK(quadrature_oracle([](double v) { return v * v; }, 0.0, 1.0, 1e-10) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  PriorSpec prior;  // alpha = 0, rate = 1
  // raw moment integral: int z^2 e^{-3z} e^{-z} dz = 2/4^3
  const double raw = quadrature_oracle(
      [](double z) { return z * z * std::exp(-4.0 * z); }, 0.0, kInf, 1e-12);
  CHECK(raw == doctest::Approx(2.0 / 64.0).epsilon(1e-10));
  // the same value is kappa_2 * (2 - alpha)/(rate + g), the ratio identity
  CHECK(raw == doctest::Approx(kappa(2, 3.0, prior) * 2.0 / 4.0).epsilon(1e-10));
  CHECK(kappa_by_quadrature(2, 3.0, prior) == doctest::Approx(0.0625).epsilon(1e-10));
}

TEST_CASE("closed forms vs oracle over randomized parameter sweep") {
  Rng rng = make_rng(606);
  int checked = 0;
  for (int rep = 0; rep < 300; ++rep) {
    const PriorSpec prior = testing::random_prior(3.0, rng, /*allow_stable=*/false);
    const double g = 3.0 * uniform01(rng);
    const int i = std::uniform_int_distribution<int>(1, 10)(rng);
    const double expected = kappa_by_quadrature(i, g, prior);
    if (!std::isfinite(expected) || expected <= 0.0) continue;
    CHECK(kappa(i, g, prior) == doctest::Approx(expected).epsilon(1e-8));
    ++checked;
  }
  CHECK(checked > 250);
}
