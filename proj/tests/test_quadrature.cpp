#include "retdist/quadrature.hpp"

#include <cmath>

#include "doctest.h"

using namespace retdist;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("gk15 panel integrates low-degree polynomials exactly") {
  auto cubic = [](double x) { return 3.0 * x * x * x - 2.0 * x + 1.0; };
  // antiderivative: 3/4 x^4 - x^2 + x
  const double expected = (0.75 * 16.0 - 4.0 + 2.0) - (0.75 - 1.0 - 1.0);
  CHECK(gk15_value(cubic, -1.0, 2.0) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("adaptive integration on a finite interval") {
  auto f = [](double x) { return std::sin(x); };
  const QuadResult res = integrate(f, 0.0, kPi);
  CHECK(res.converged);
  CHECK(res.value == doctest::Approx(2.0).epsilon(1e-12));

  // a nasty peaked integrand forces subdivision
  auto peak = [](double x) { return 1.0 / (1e-6 + (x - 0.3) * (x - 0.3)); };
  const QuadResult res2 = integrate(peak, 0.0, 1.0, {1e-10, 1e-12, 4000});
  const double expected = (std::atan(0.7 / 1e-3) + std::atan(0.3 / 1e-3)) / 1e-3;
  CHECK(res2.converged);
  CHECK(res2.value == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("half-line integration: Gaussian and gamma tails") {
  auto gauss = [](double x) { return std::exp(-0.5 * x * x); };
  const QuadResult res = integrate_half_line(gauss, 0.0);
  CHECK(res.converged);
  CHECK(res.value == doctest::Approx(std::sqrt(kPi / 2.0)).epsilon(1e-12));

  // integral of z^{3/2} e^{-z} = Gamma(5/2) = 3 sqrt(pi) / 4
  auto gamma_integrand = [](double z) { return std::pow(z, 1.5) * std::exp(-z); };
  const QuadResult res2 = integrate_half_line(gamma_integrand, 0.0);
  CHECK(res2.converged);
  CHECK(res2.value == doctest::Approx(0.75 * std::sqrt(kPi)).epsilon(1e-12));
}

TEST_CASE("real-line integration normalizes a normal density") {
  auto density = [](double x) { return std::exp(-0.5 * (x - 1.3) * (x - 1.3)) / std::sqrt(2.0 * kPi); };
  const QuadResult res = integrate_real_line(density);
  CHECK(res.converged);
  CHECK(res.value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("integrable endpoint singularity converges") {
  auto f = [](double x) { return 1.0 / std::sqrt(x); };
  const QuadResult res = integrate(f, 0.0, 1.0, {1e-10, 1e-10, 4000});
  CHECK(res.value == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("budget exhaustion is reported, not hidden") {
  auto wild = [](double x) { return std::sin(1.0 / (x * x + 1e-14)); };
  const QuadResult res = integrate(wild, 0.0, 1.0, {1e-14, 1e-14, 8});
  CHECK_FALSE(res.converged);
  CHECK_THROWS_AS(quad_value_or_throw(res, "wild"), NumericError);
}
