#include "retdist/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "retdist/dist.hpp"
#include "retdist/quadrature.hpp"

namespace retdist {

namespace {

void check_config(const FitConfig& config) {
  if (!(config.n_low > 1.0)) {
    throw std::invalid_argument("FitConfig: n_low must exceed 1 (finite density at the origin)");
  }
  if (!(config.n_low < config.n_high)) {
    throw std::invalid_argument("FitConfig: need n_low < n_high");
  }
  if (!(config.weight_c > 0.0)) {
    throw std::invalid_argument("FitConfig: weight_c must be positive");
  }
  if (!(config.tolerance > 0.0)) {
    throw std::invalid_argument("FitConfig: tolerance must be positive");
  }
}

// Sorts in place and rejects empty, non-finite, or constant samples.
void prepare_samples(std::vector<double>& samples) {
  if (samples.empty()) throw std::invalid_argument("fit: no samples");
  for (double v : samples) {
    if (!std::isfinite(v)) throw DataError("fit: non-finite sample value");
  }
  std::sort(samples.begin(), samples.end());
  if (samples.front() == samples.back()) {
    throw DataError("fit: degenerate samples (all values identical)");
  }
}

double ks_distance(const std::vector<double>& model_cdf) {
  const double m = static_cast<double>(model_cdf.size());
  double d = 0.0;
  for (std::size_t i = 0; i < model_cdf.size(); ++i) {
    d = std::max(d, std::abs(model_cdf[i] - static_cast<double>(i + 1) / m));
    d = std::max(d, std::abs(model_cdf[i] - static_cast<double>(i) / m));
  }
  return d;
}

struct BoundedMin {
  double x = 0.0;
  double f = 0.0;
  int iterations = 0;
  bool boundary = false;
};

// Brent over [lo, hi] plus explicit endpoint evaluation, so the returned
// objective is never above the value at either bound. The boundary flag
// marks a bound that wins outright, an optimum within 10 tolerances of one,
// or an objective so flat toward a bound (within 0.1% of its dynamic range)
// that the optimum is statistically indistinguishable from the bound.
BoundedMin minimize_bounded(const std::function<double(double)>& f, double lo, double hi,
                            double tol) {
  const ScalarMinResult inner = minimize_scalar(f, lo, hi, tol);
  BoundedMin out{inner.x, inner.f, inner.iterations + 2, false};
  const double f_lo = f(lo);
  const double f_hi = f(hi);
  if (f_hi <= out.f) {
    out.x = hi;
    out.f = f_hi;
    out.boundary = true;
  }
  if (f_lo <= out.f) {
    out.x = lo;
    out.f = f_lo;
    out.boundary = true;
  }
  const double edge = 10.0 * tol * std::max(1.0, std::abs(out.x));
  if (out.x - lo <= edge || hi - out.x <= edge) out.boundary = true;
  const double spread = std::max(f_lo, f_hi) - out.f;
  if (spread > 0.0) {
    if (f_hi - out.f <= 1e-3 * spread || f_lo - out.f <= 1e-3 * spread) out.boundary = true;
  } else {
    out.boundary = true;  // flat across the whole interval
  }
  return out;
}

}  // namespace

ScalarMinResult minimize_scalar(const std::function<double(double)>& f, double lo, double hi,
                                double tol, int max_iter) {
  if (!(lo < hi)) throw std::invalid_argument("minimize_scalar: need lo < hi");
  constexpr double kGolden = 0.3819660112501051;
  constexpr double kZeps = 1e-11;
  double a = lo;
  double b = hi;
  double x = a + kGolden * (b - a);
  double w = x;
  double v = x;
  double fx = f(x);
  double fw = fx;
  double fv = fx;
  double d = 0.0;
  double e = 0.0;
  int iter = 1;
  for (; iter <= max_iter; ++iter) {
    const double xm = 0.5 * (a + b);
    const double tol1 = tol * std::abs(x) + kZeps;
    const double tol2 = 2.0 * tol1;
    if (std::abs(x - xm) <= tol2 - 0.5 * (b - a)) break;
    bool use_golden = true;
    if (std::abs(e) > tol1) {
      const double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::abs(q);
      const double etemp = e;
      e = d;
      if (std::abs(p) < std::abs(0.5 * q * etemp) && p > q * (a - x) && p < q * (b - x)) {
        d = p / q;
        const double u = x + d;
        if (u - a < tol2 || b - u < tol2) d = (xm >= x) ? tol1 : -tol1;
        use_golden = false;
      }
    }
    if (use_golden) {
      e = (x >= xm) ? a - x : b - x;
      d = kGolden * e;
    }
    const double u = (std::abs(d) >= tol1) ? x + d : x + ((d >= 0.0) ? tol1 : -tol1);
    const double fu = f(u);
    if (fu <= fx) {
      if (u >= x) {
        a = x;
      } else {
        b = x;
      }
      v = w;
      w = x;
      x = u;
      fv = fw;
      fw = fx;
      fx = fu;
    } else {
      if (u < x) {
        a = u;
      } else {
        b = u;
      }
      if (fu <= fw || w == x) {
        v = w;
        fv = fw;
        w = u;
        fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u;
        fv = fu;
      }
    }
  }
  return {x, fx, iter};
}

std::vector<double> rescaled_cdf_at_sorted(const std::vector<double>& pts, double n_param) {
  std::vector<double> out(pts.size());
  if (pts.empty()) return out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!std::isfinite(pts[i])) {
      throw DataError("rescaled_cdf_at_sorted: non-finite point at index " + std::to_string(i));
    }
    if (i > 0 && pts[i] < pts[i - 1]) {
      throw std::invalid_argument("rescaled_cdf_at_sorted: points are not ascending");
    }
  }
  auto pdf = [n_param](double r) {
    if (r == 0.0) r = std::numeric_limits<double>::min();  // keep panels off the exact origin
    return rescaled_pdf(n_param, r);
  };
  // Consecutive sample gaps are tiny, so one Kronrod panel per gap suffices;
  // the rare wide gap (sparse tails, coarse grids) is refined adaptively.
  // Gaps straddling the origin are split there: the density is even with an
  // |r|-power term, so panels must not span the kink.
  constexpr double kPlainGap = 0.02;
  auto gap_integral = [&pdf](double a, double b) {
    if (b <= a) return 0.0;
    return (b - a <= kPlainGap) ? gk15_value(pdf, a, b)
                                : integrate(pdf, a, b, {1e-13, 1e-12, 400}).value;
  };
  double acc = rescaled_cdf(n_param, pts.front());
  out[0] = acc;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double a = pts[i - 1];
    const double b = pts[i];
    if (a < 0.0 && b > 0.0) {
      acc += gap_integral(a, 0.0) + gap_integral(0.0, b);
    } else {
      acc += gap_integral(a, b);
    }
    out[i] = std::min(1.0, std::max(0.0, acc));
  }
  return out;
}

double cvm_statistic(const std::vector<double>& sorted_samples, double n_param, double weight_c) {
  if (sorted_samples.empty()) throw std::invalid_argument("cvm_statistic: no samples");
  if (!(weight_c > 0.0)) throw std::invalid_argument("cvm_statistic: weight_c must be positive");
  const std::vector<double> model = rescaled_cdf_at_sorted(sorted_samples, n_param);
  const double m = static_cast<double>(sorted_samples.size());
  const double inv_two_c2 = 1.0 / (2.0 * weight_c * weight_c);
  double acc = 0.0;
  for (std::size_t i = 0; i < sorted_samples.size(); ++i) {
    const double y = sorted_samples[i];
    const double expo = y * y * inv_two_c2;
    if (expo > 700.0) continue;  // weight underflows to zero
    const double diff = model[i] - (static_cast<double>(i) + 0.5) / m;
    acc += diff * diff * std::exp(-expo);
  }
  return acc;
}

FitResult fit_n_min_dist(std::vector<double> samples, const FitConfig& config) {
  check_config(config);
  prepare_samples(samples);
  auto objective = [&](double n) { return cvm_statistic(samples, n, config.weight_c); };
  const BoundedMin best = minimize_bounded(objective, config.n_low, config.n_high,
                                           config.tolerance);
  FitResult res;
  res.n_hat = best.x;
  res.objective = best.f;
  res.method = FitMethod::kMinDistCvm;
  res.diagnostics.sample_count = samples.size();
  res.diagnostics.iterations = best.iterations;
  res.diagnostics.boundary = best.boundary;
  res.diagnostics.ks_distance = ks_distance(rescaled_cdf_at_sorted(samples, best.x));
  return res;
}

FitResult fit_n_mle(std::vector<double> samples, const FitConfig& config) {
  check_config(config);
  prepare_samples(samples);
  auto objective = [&](double n) {
    double nll = 0.0;
    for (double y : samples) nll -= rescaled_log_pdf(n, y);
    return nll;
  };
  const BoundedMin best = minimize_bounded(objective, config.n_low, config.n_high,
                                           config.tolerance);
  FitResult res;
  res.n_hat = best.x;
  res.objective = best.f;
  res.method = FitMethod::kMle;
  res.diagnostics.sample_count = samples.size();
  res.diagnostics.iterations = best.iterations;
  res.diagnostics.boundary = best.boundary;
  res.diagnostics.ks_distance = ks_distance(rescaled_cdf_at_sorted(samples, best.x));
  return res;
}

NormalFit fit_normal_mle(const std::vector<double>& samples) {
  if (samples.size() < 3) throw std::invalid_argument("fit_normal_mle: need at least 3 samples");
  const double m = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double v : samples) {
    if (!std::isfinite(v)) throw DataError("fit_normal_mle: non-finite sample");
    mean += v;
  }
  mean /= m;
  double var = 0.0;
  for (double v : samples) var += (v - mean) * (v - mean);
  var /= m;  // MLE normalization
  if (!(var > 0.0)) throw DataError("fit_normal_mle: degenerate samples (zero variance)");
  return {mean, std::sqrt(var)};
}

namespace {

double student_t_nll(const std::vector<double>& samples, double nu, double mu, double scale) {
  const double log_norm = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                          0.5 * std::log(nu * 3.14159265358979323846) - std::log(scale);
  double nll = 0.0;
  for (double v : samples) {
    const double z = (v - mu) / scale;
    nll -= log_norm - 0.5 * (nu + 1.0) * std::log1p(z * z / nu);
  }
  return nll;
}

// EM for the location/scale MLE at fixed nu.
void student_t_em(const std::vector<double>& samples, double nu, double* mu, double* s2) {
  const double m = static_cast<double>(samples.size());
  for (int iter = 0; iter < 500; ++iter) {
    double sw = 0.0;
    double swx = 0.0;
    for (double v : samples) {
      const double w = (nu + 1.0) / (nu + (v - *mu) * (v - *mu) / *s2);
      sw += w;
      swx += w * v;
    }
    const double mu_new = swx / sw;
    double s2_new = 0.0;
    for (double v : samples) {
      const double w = (nu + 1.0) / (nu + (v - *mu) * (v - *mu) / *s2);
      s2_new += w * (v - mu_new) * (v - mu_new);
    }
    s2_new /= m;
    const double dmu = std::abs(mu_new - *mu);
    const double ds = std::abs(s2_new - *s2);
    *mu = mu_new;
    *s2 = s2_new;
    if (dmu <= 1e-12 * (1.0 + std::abs(*mu)) && ds <= 1e-12 * *s2) break;
  }
}

}  // namespace

StudentTFit fit_student_t_mle(const std::vector<double>& samples) {
  if (samples.size() < 3) {
    throw std::invalid_argument("fit_student_t_mle: need at least 3 samples");
  }
  const NormalFit start = fit_normal_mle(samples);  // also validates the input

  const double nu_lo = 0.5;
  const double nu_hi = 1000.0;
  auto profile = [&](double log_nu, double* mu_out, double* s2_out) {
    const double nu = std::exp(log_nu);
    double mu = start.mu;
    double s2 = start.sigma * start.sigma;
    student_t_em(samples, nu, &mu, &s2);
    if (mu_out) *mu_out = mu;
    if (s2_out) *s2_out = s2;
    return student_t_nll(samples, nu, mu, std::sqrt(s2));
  };
  auto objective = [&](double log_nu) { return profile(log_nu, nullptr, nullptr); };

  const BoundedMin best =
      minimize_bounded(objective, std::log(nu_lo), std::log(nu_hi), 1e-8);
  StudentTFit fit;
  fit.nu = std::exp(best.x);
  fit.boundary = best.boundary;
  double mu = 0.0;
  double s2 = 0.0;
  profile(best.x, &mu, &s2);
  fit.mu = mu;
  fit.scale = std::sqrt(s2);
  return fit;
}

std::vector<std::pair<double, double>> cvm_grid(const std::vector<double>& sorted_samples,
                                                double weight_c, double n_low, double n_high,
                                                double step) {
  if (!(step > 0.0)) throw std::invalid_argument("cvm_grid: step must be positive");
  std::vector<std::pair<double, double>> out;
  for (double n = n_low; n <= n_high + 0.5 * step; n += step) {
    const double nn = std::min(n, n_high);
    out.emplace_back(nn, cvm_statistic(sorted_samples, nn, weight_c));
  }
  return out;
}

}  // namespace retdist
