#include "retdist/bessel.hpp"

#include <cmath>

#include "doctest.h"
#include "retdist/quadrature.hpp"
#include "retdist/rng.hpp"
#include "retdist/types.hpp"

using namespace retdist;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Closed form for half-integer orders:
// K_{n+1/2}(x) = sqrt(pi/2x) e^-x sum_j (n+j)! / (j! (n-j)! (2x)^j)
long double half_integer_k(int n, long double x) {
  long double sum = 0.0L;
  for (int j = 0; j <= n; ++j) {
    long double term = 1.0L;
    for (int i = n - j + 1; i <= n + j; ++i) term *= i;  // (n+j)!/(n-j)!
    for (int i = 1; i <= j; ++i) term /= i;              // / j!
    sum += term / std::pow(2.0L * x, static_cast<long double>(j));
  }
  return std::sqrt(kPi / (2.0L * x)) * std::exp(-x) * sum;
}

double log_cosh(double y) {
  y = std::abs(y);
  return y + std::log1p(std::exp(-2.0 * y)) - std::log(2.0);
}

// Integral representation K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt,
// evaluated by quadrature; fully independent of the series/CF implementation.
// Scaled by e^x so the integrand stays near unit scale at large x.
double log_bessel_k_by_quadrature(double nu, double x) {
  auto scaled = [nu, x](double t) {
    return std::exp(-x * (std::cosh(t) - 1.0) + log_cosh(nu * t));
  };
  const double value = quad_value_or_throw(
      integrate_half_line(scaled, 0.0, {1e-13, 1e-13, 8000}), "bessel oracle");
  return std::log(value) - x;
}

double bessel_k_by_quadrature(double nu, double x) {
  return std::exp(log_bessel_k_by_quadrature(nu, x));
}

}  // namespace

TEST_CASE("K_{1/2}(1) matches the closed form to 1e-12") {
  const double expected = std::sqrt(kPi / 2.0) * std::exp(-1.0);  // 0.4610685044478944...
  CHECK(bessel_k(0.5, 1.0) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(0.4610685044).epsilon(1e-9));
}

TEST_CASE("half-integer ladder matches the closed form") {
  for (int n : {0, 1, 2, 3, 5, 8}) {
    for (double x : {0.3, 1.0, 2.0, 5.0, 20.0}) {
      const double expected = static_cast<double>(half_integer_k(n, x));
      CHECK(bessel_k(n + 0.5, x) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("K_0(1) against the quadrature oracle") {
  // independent value of int_0^inf exp(-cosh t) dt
  const double oracle = bessel_k_by_quadrature(0.0, 1.0);
  CHECK(oracle == doctest::Approx(0.42102).epsilon(1e-4));  // coarse sanity on the oracle itself
  CHECK(bessel_k(0.0, 1.0) == doctest::Approx(oracle).epsilon(1e-11));
}

TEST_CASE("quadrature oracle across regimes") {
  for (auto [nu, x] : {std::pair{2.3, 0.7}, {0.0, 0.05}, {0.5, 3.0}, {7.8, 12.0},
                       {99.25, 30.0}, {1.0, 250.0}}) {
    const double oracle = log_bessel_k_by_quadrature(nu, x);
    CHECK(log_bessel_k(nu, x) == doctest::Approx(oracle).epsilon(1e-9));
  }
}

TEST_CASE("three-term recurrence holds over random orders and arguments") {
  RngStream rng(1234);
  for (int rep = 0; rep < 400; ++rep) {
    const double nu = rng.uniform(1.0, 100.0);
    const double x = std::exp(rng.uniform(std::log(1e-6), std::log(500.0)));
    const double l_m1 = log_bessel_k(nu - 1.0, x);
    const double l_0 = log_bessel_k(nu, x);
    const double l_p1 = log_bessel_k(nu + 1.0, x);
    // residual relative to K_{nu+1}, the largest of the three terms
    const double r = 1.0 - std::exp(l_m1 - l_p1) - (2.0 * nu / x) * std::exp(l_0 - l_p1);
    CHECK(std::abs(r) < 1e-9);
  }
}

TEST_CASE("agreement with std::cyl_bessel_k in the moderate regime") {
  RngStream rng(99);
  for (int rep = 0; rep < 100; ++rep) {
    const double nu = rng.uniform(0.0, 20.0);
    const double x = rng.uniform(0.1, 30.0);
    const double ref = std::cyl_bessel_k(nu, x);
    CHECK(bessel_k(nu, x) == doctest::Approx(ref).epsilon(1e-8));
  }
}

TEST_CASE("symmetry in the order") {
  CHECK(bessel_k(-2.7, 1.3) == bessel_k(2.7, 1.3));
}

TEST_CASE("monotone growth in the order") {
  for (double x : {0.5, 5.0, 50.0}) {
    double prev = log_bessel_k(0.0, x);
    for (double nu = 0.5; nu <= 30.0; nu += 0.5) {
      const double cur = log_bessel_k(nu, x);
      CHECK(cur > prev);
      prev = cur;
    }
  }
}

TEST_CASE("log variant: large order at tiny argument matches the small-x asymptotic") {
  // K_nu(x) -> (1/2) Gamma(nu) (2/x)^nu as x -> 0; correction O(x^2/nu)
  const double nu = 200.0;
  const double x = 1e-8;
  const double expected = -std::log(2.0) + std::lgamma(nu) + nu * std::log(2.0 / x);
  CHECK(log_bessel_k(nu, x) == doctest::Approx(expected).epsilon(1e-12));
  CHECK_THROWS_AS(bessel_k(nu, x), NumericError);  // far beyond double range
}

TEST_CASE("log variant: finite and accurate at x = 1e5") {
  const double x = 1e5;
  const double log_k0 = log_bessel_k(0.0, x);
  CHECK(std::isfinite(log_k0));
  // large-x asymptotic K_0(x) ~ sqrt(pi/2x) e^-x (1 - 1/8x + 9/128x^2 - ...)
  const double expected =
      0.5 * std::log(kPi / (2.0 * x)) - x + std::log1p(-1.0 / (8.0 * x) + 9.0 / (128.0 * x * x));
  CHECK(log_k0 == doctest::Approx(expected).epsilon(1e-12));

  const double log_k_big_order = log_bessel_k(150.0, x);
  CHECK(std::isfinite(log_k_big_order));
  CHECK(log_k_big_order > log_k0);
}

TEST_CASE("spec accuracy window: orders to 200, arguments 1e-8 to 700") {
  // closed-form half-integer checks at the edges of the window
  CHECK(bessel_k(0.5, 700.0) ==
        doctest::Approx(static_cast<double>(half_integer_k(0, 700.0L))).epsilon(1e-12));
  const double tiny = 1e-8;
  const double k_half_tiny = std::sqrt(kPi / (2.0 * tiny)) * std::exp(-tiny);
  CHECK(bessel_k(0.5, tiny) == doctest::Approx(k_half_tiny).epsilon(1e-12));
  CHECK(log_bessel_k(199.5, 1e-8) ==
        doctest::Approx(-std::log(2.0) + std::lgamma(199.5) + 199.5 * std::log(2.0 / 1e-8))
            .epsilon(1e-12));
}

TEST_CASE("very large orders stay accurate through the ratio recurrence") {
  // K_nu(x) -> (1/2) Gamma(nu) (2/x)^nu for x^2 << nu; exact here to ~1e-10
  const double nu = 5e5;
  const double x = 10.0;
  const double expected = -std::log(2.0) + std::lgamma(nu) + nu * std::log(2.0 / x) +
                          std::log1p(x * x / (4.0 * (nu - 1.0)));
  CHECK(log_bessel_k(nu, x) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(bessel_k(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(bessel_k(1.0, -2.0), std::invalid_argument);
  CHECK_THROWS_AS(log_bessel_k(0.5, std::nan("")), std::invalid_argument);
  CHECK_THROWS_AS(log_bessel_k(3e6, 1.0), NumericError);  // beyond the supported order range
}
