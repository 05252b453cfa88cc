#pragma once

#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "retdist/types.hpp"

namespace retdist {

struct QuadOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_intervals = 4000;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
  int intervals = 0;
  bool converged = false;
};

namespace quad_detail {

// Gauss-Kronrod 7-15 nodes and weights (positive half, descending).
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  double value;
  double error;
  double resabs;  // panel integral of |f|, for the roundoff floor
  bool operator<(const Panel& other) const { return error < other.error; }
};

// One 15-point Kronrod panel with the QUADPACK error estimate.
template <class F>
Panel gk15(F&& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double fv1[7], fv2[7];

  const double fc = f(center);
  double resg = fc * kWg[3];
  double resk = fc * kWgk[7];
  double resabs = std::abs(resk);
  for (int j = 0; j < 3; ++j) {
    const int jtw = 2 * j + 1;  // Gauss nodes sit at the odd Kronrod indices
    const double absc = half * kXgk[jtw];
    fv1[jtw] = f(center - absc);
    fv2[jtw] = f(center + absc);
    const double fsum = fv1[jtw] + fv2[jtw];
    resg += kWg[j] * fsum;
    resk += kWgk[jtw] * fsum;
    resabs += kWgk[jtw] * (std::abs(fv1[jtw]) + std::abs(fv2[jtw]));
  }
  for (int j = 0; j < 4; ++j) {
    const int jtwm1 = 2 * j;
    const double absc = half * kXgk[jtwm1];
    fv1[jtwm1] = f(center - absc);
    fv2[jtwm1] = f(center + absc);
    const double fsum = fv1[jtwm1] + fv2[jtwm1];
    resk += kWgk[jtwm1] * fsum;
    resabs += kWgk[jtwm1] * (std::abs(fv1[jtwm1]) + std::abs(fv2[jtwm1]));
  }
  const double reskh = resk * 0.5;
  double resasc = kWgk[7] * std::abs(fc - reskh);
  for (int j = 0; j < 7; ++j) {
    resasc += kWgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));
  }

  Panel p;
  p.a = a;
  p.b = b;
  p.value = resk * half;
  resabs *= std::abs(half);
  resasc *= std::abs(half);
  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  const double eps = std::numeric_limits<double>::epsilon();
  const double uflow = std::numeric_limits<double>::min();
  if (resabs > uflow / (50.0 * eps)) {
    err = std::max(err, 50.0 * eps * resabs);
  }
  p.error = err;
  p.resabs = resabs;
  return p;
}

}  // namespace quad_detail

// Value of a single non-adaptive 15-point Kronrod panel over [a, b].
template <class F>
double gk15_value(F&& f, double a, double b) {
  return quad_detail::gk15(f, a, b).value;
}

// Adaptive Gauss-Kronrod integration over a finite interval. Splits the
// worst panel until the summed error estimate meets the tolerance, the
// estimate hits the double-precision floor, or the panel budget runs out.
template <class F>
QuadResult integrate(F&& f, double a, double b, QuadOptions opt = {}) {
  const double eps = std::numeric_limits<double>::epsilon();
  std::priority_queue<quad_detail::Panel> heap;
  heap.push(quad_detail::gk15(f, a, b));
  double total = heap.top().value;
  double total_err = heap.top().error;
  double total_resabs = heap.top().resabs;
  int n = 1;

  QuadResult res;
  while (true) {
    const double goal = std::max(opt.abs_tol, opt.rel_tol * std::abs(total));
    // The 100 eps |f| floor stops subdivision once roundoff dominates.
    if (total_err <= goal || total_err <= 100.0 * eps * total_resabs) {
      res.converged = true;
      break;
    }
    if (n >= opt.max_intervals) break;
    const quad_detail::Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(worst.a < mid && mid < worst.b)) {  // interval no longer splittable
      heap.push(worst);
      res.converged = total_err <= 10.0 * std::max(opt.abs_tol, opt.rel_tol * std::abs(total));
      break;
    }
    const auto left = quad_detail::gk15(f, worst.a, mid);
    const auto right = quad_detail::gk15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    total_resabs += left.resabs + right.resabs - worst.resabs;
    heap.push(left);
    heap.push(right);
    ++n;
  }
  res.value = total;
  res.error = total_err;
  res.intervals = n;
  return res;
}

// Integrate over [a, inf) via x = a + t/(1-t). Non-finite integrand values in
// the far tail (overflowing intermediates) are treated as zero.
template <class F>
QuadResult integrate_half_line(F&& f, double a, QuadOptions opt = {}) {
  auto mapped = [&f, a](double t) {
    const double om = 1.0 - t;
    const double x = a + t / om;
    const double v = f(x) / (om * om);
    return std::isfinite(v) ? v : 0.0;
  };
  return integrate(mapped, 0.0, 1.0, opt);
}

// Integrate over the whole real line, split at `center`.
template <class F>
QuadResult integrate_real_line(F&& f, QuadOptions opt = {}, double center = 0.0) {
  auto reflected = [&f, center](double x) { return f(2.0 * center - x); };
  const QuadResult right = integrate_half_line(f, center, opt);
  const QuadResult left = integrate_half_line(reflected, center, opt);
  QuadResult res;
  res.value = left.value + right.value;
  res.error = left.error + right.error;
  res.intervals = left.intervals + right.intervals;
  res.converged = left.converged && right.converged;
  return res;
}

inline double quad_value_or_throw(const QuadResult& res, const std::string& what) {
  if (!res.converged) {
    throw NumericError(what + ": quadrature did not converge (achieved error " +
                       std::to_string(res.error) + " with " + std::to_string(res.intervals) +
                       " intervals)");
  }
  return res.value;
}

}  // namespace retdist
