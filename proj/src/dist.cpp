#include "retdist/dist.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "retdist/bessel.hpp"
#include "retdist/quadrature.hpp"

namespace retdist {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kLn2 = 0.69314718055994530942;

double chi2_log_pdf(double dof, double z) {
  return (0.5 * dof - 1.0) * std::log(z) - 0.5 * z - 0.5 * dof * kLn2 - std::lgamma(0.5 * dof);
}

// log pdf of the portfolio return at scale alpha; shared by the portfolio
// and rescaled variants.
double portfolio_log_pdf_impl(double alpha, double n, double r) {
  const double ar = std::abs(r);
  if (ar == 0.0) {
    if (n <= 1.0) {
      throw NumericError("portfolio pdf diverges at r = 0 for n_param <= 1 (got n = " +
                         std::to_string(n) + ")");
    }
    // Small-argument limit: sqrt(n/alpha) Gamma((n-1)/2) / (2 sqrt(pi) Gamma(n/2)).
    return 0.5 * std::log(n / alpha) + std::lgamma(0.5 * (n - 1.0)) - kLn2 -
           0.5 * std::log(kPi) - std::lgamma(0.5 * n);
  }
  const double arg = ar * std::sqrt(n / alpha);
  return 0.5 * (1.0 - n) * kLn2 - 0.5 * std::log(kPi) - std::lgamma(0.5 * n) +
         0.25 * (n + 1.0) * std::log(n / alpha) + 0.5 * (n - 1.0) * std::log(ar) +
         log_bessel_k(0.5 * (n - 1.0), arg);
}

void check_alpha_n(double alpha, double n, const char* who) {
  if (!(alpha > 0.0)) {
    throw std::invalid_argument(std::string(who) + ": alpha must be positive");
  }
  if (!(n > 0.0)) {
    throw std::invalid_argument(std::string(who) + ": n_param must be positive");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Multivariate K-Bessel density
// ---------------------------------------------------------------------------

MvKBesselDist::MvKBesselDist(CovarianceModel cov_model, double n_param)
    : cov_(std::move(cov_model)), n_(n_param) {
  if (!(n_ > 0.0)) throw std::invalid_argument("MvKBesselDist: n_param must be positive");
  cov_.validate();
  chol_ = cholesky_lower(cov_.cov);  // requires SPD Sigma
  double acc = 0.0;
  for (int i = 0; i < chol_.rows(); ++i) acc += std::log(chol_(i, i));
  log_det_ = 2.0 * acc;
}

double MvKBesselDist::bilinear_inv(const Vector& x) const {
  if (x.size() != chol_.rows()) {
    throw std::invalid_argument("MvKBesselDist: dimension mismatch");
  }
  // q = x^T Sigma^-1 x = || L^-1 x ||^2
  const Vector y = chol_.triangularView<Eigen::Lower>().solve(x);
  return y.squaredNorm();
}

double MvKBesselDist::log_pdf(const Vector& x) const {
  const double k = static_cast<double>(dim());
  const double q = bilinear_inv(x);
  if (q == 0.0) {
    if (n_ <= k) {
      throw NumericError("multivariate K-Bessel pdf diverges at x = 0 for n_param <= dim");
    }
    return 0.5 * k * std::log(n_ / (4.0 * kPi)) + std::lgamma(0.5 * (n_ - k)) -
           std::lgamma(0.5 * n_) - 0.5 * log_det_;
  }
  const double nq = n_ * q;
  return 0.5 * k * std::log(n_ / (4.0 * kPi)) + 0.5 * (k - n_ + 2.0) * kLn2 -
         std::lgamma(0.5 * n_) + 0.25 * (n_ - k) * std::log(nq) - 0.5 * log_det_ +
         log_bessel_k(0.5 * (k - n_), std::sqrt(nq));
}

double MvKBesselDist::pdf(const Vector& x) const { return std::exp(log_pdf(x)); }

double MvKBesselDist::pdf_integral(const Vector& x) const {
  const double k = static_cast<double>(dim());
  const double q = bilinear_inv(x);
  const double log_pref =
      0.5 * k * std::log(kPi * n_) - k * std::log(2.0 * kPi) - std::lgamma(0.5 * n_) -
      0.5 * log_det_;

  const double pow_z = 0.5 * (n_ - k) - 1.0;  // z exponent of the integrand
  if (q == 0.0) {
    if (n_ <= k) {
      throw NumericError("multivariate K-Bessel pdf diverges at x = 0 for n_param <= dim");
    }
    return std::exp(log_pref + std::lgamma(pow_z + 1.0));
  }

  // Integrand exp(l(z)), l(z) = pow_z log z - z - nq/(4z); shift by the peak
  // value so the quadrature works near unit scale, and split the domain at
  // the peak so it can never hide between panel nodes.
  const double nq4 = 0.25 * n_ * q;
  const double z_peak = 0.5 * (pow_z + std::sqrt(pow_z * pow_z + 4.0 * nq4));
  auto log_integrand = [pow_z, nq4](double z) {
    return pow_z * std::log(z) - z - nq4 / z;
  };
  const double shift = (z_peak > 0.0) ? log_integrand(z_peak) : 0.0;
  auto integrand = [&](double z) {
    if (z <= 0.0) return 0.0;
    return std::exp(log_integrand(z) - shift);
  };
  const QuadOptions opt{1e-13, 1e-12, 8000};
  double value = 0.0;
  if (z_peak > 0.0) {
    const QuadResult left = integrate(integrand, 0.0, z_peak, opt);
    const QuadResult right = integrate_half_line(integrand, z_peak, opt);
    quad_value_or_throw(left, "mvk pdf integral");
    value = left.value + quad_value_or_throw(right, "mvk pdf integral");
  } else {
    value = quad_value_or_throw(integrate_half_line(integrand, 0.0, opt), "mvk pdf integral");
  }
  return std::exp(log_pref + shift + std::log(value));
}

// ---------------------------------------------------------------------------
// Portfolio return density
// ---------------------------------------------------------------------------

PortfolioKBesselDist::PortfolioKBesselDist(double alpha, double n_param)
    : alpha_(alpha), n_(n_param) {
  check_alpha_n(alpha, n_param, "PortfolioKBesselDist");
}

double PortfolioKBesselDist::log_pdf(double r) const {
  return portfolio_log_pdf_impl(alpha_, n_, r);
}

double PortfolioKBesselDist::pdf(double r) const { return std::exp(log_pdf(r)); }

double PortfolioKBesselDist::cdf(double r) const {
  return rescaled_cdf(n_, r / std::sqrt(alpha_));
}

double rescaled_log_pdf(double n_param, double r_hat) {
  check_alpha_n(1.0, n_param, "rescaled_pdf");
  return portfolio_log_pdf_impl(1.0, n_param, r_hat);
}

double rescaled_pdf(double n_param, double r_hat) {
  return std::exp(rescaled_log_pdf(n_param, r_hat));
}

double rescaled_cdf(double n_param, double r_hat) {
  check_alpha_n(1.0, n_param, "rescaled_cdf");
  if (std::isnan(r_hat)) throw std::invalid_argument("rescaled_cdf: NaN argument");
  const double ar = std::abs(r_hat);
  if (ar == 0.0) return 0.5;
  if (std::isinf(ar)) return r_hat > 0.0 ? 1.0 : 0.0;

  // Mixture form: F(r) - 1/2 = (1/2) E_z[ erf(|r| sqrt(n / 2z)) ] with
  // z ~ chi^2_n. Integrating the half-deviation keeps F(-r) = 1 - F(r) and
  // F(0) = 1/2 exact. The domain is split at the chi^2 mode: for large n the
  // weight is a narrow spike that interior panel nodes would miss.
  const double n = n_param;
  auto integrand = [n, ar](double z) {
    if (z <= 0.0) return 0.0;
    const double dens = std::exp(chi2_log_pdf(n, z));
    if (dens == 0.0) return 0.0;
    return dens * 0.5 * std::erf(ar * std::sqrt(0.5 * n / z));
  };
  const QuadOptions opt{5e-14, 1e-13, 8000};
  const double z_mode = std::max(n - 2.0, 0.0);
  double g = 0.0;
  if (z_mode > 0.0) {
    const QuadResult left = integrate(integrand, 0.0, z_mode, opt);
    quad_value_or_throw(left, "rescaled_cdf");
    g = left.value + quad_value_or_throw(integrate_half_line(integrand, z_mode, opt),
                                         "rescaled_cdf");
  } else {
    g = quad_value_or_throw(integrate_half_line(integrand, 0.0, opt), "rescaled_cdf");
  }
  const double f = (r_hat > 0.0) ? 0.5 + g : 0.5 - g;
  return std::min(1.0, std::max(0.0, f));
}

RescaledMoments rescaled_moments(double n_param) {
  check_alpha_n(1.0, n_param, "rescaled_moments");
  // Var = E[z/n] = 1; kurtosis 3 E[(z/n)^2] = 3 (1 + 2/n) gives excess 6/n.
  return {1.0, 6.0 / n_param};
}

// ---------------------------------------------------------------------------
// Baseline distributions
// ---------------------------------------------------------------------------

double normal_pdf(double mu, double sigma, double x) {
  if (!(sigma > 0.0)) throw std::invalid_argument("normal_pdf: sigma must be positive");
  const double z = (x - mu) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * kPi));
}

double normal_cdf(double mu, double sigma, double x) {
  if (!(sigma > 0.0)) throw std::invalid_argument("normal_cdf: sigma must be positive");
  return 0.5 * std::erfc(-(x - mu) / (sigma * std::sqrt(2.0)));
}

double student_t_pdf(double nu, double mu, double scale, double x) {
  if (!(nu > 0.0) || !(scale > 0.0)) {
    throw std::invalid_argument("student_t_pdf: nu and scale must be positive");
  }
  const double z = (x - mu) / scale;
  const double log_norm = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                          0.5 * std::log(nu * kPi) - std::log(scale);
  return std::exp(log_norm - 0.5 * (nu + 1.0) * std::log1p(z * z / nu));
}

double student_t_cdf(double nu, double mu, double scale, double x) {
  if (!(nu > 0.0) || !(scale > 0.0)) {
    throw std::invalid_argument("student_t_cdf: nu and scale must be positive");
  }
  const double z = (x - mu) / scale;
  if (z == 0.0) return 0.5;
  const double p = 0.5 * reg_incomplete_beta(0.5 * nu, 0.5, nu / (nu + z * z));
  return z > 0.0 ? 1.0 - p : p;
}

namespace {

// Continued fraction for the incomplete beta (Lentz's method).
double incbeta_cf(double a, double b, double x) {
  const int max_iter = 400;
  const double eps = std::numeric_limits<double>::epsilon();
  const double fpmin = std::numeric_limits<double>::min() / eps;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < fpmin) d = fpmin;
  d = 1.0 / d;
  double h = d;
  int m = 1;
  for (; m <= max_iter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) <= eps) break;
  }
  if (m > max_iter) throw NumericError("incomplete beta: continued fraction did not converge");
  return h;
}

}  // namespace

double reg_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::invalid_argument("reg_incomplete_beta: a and b must be positive");
  }
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double front = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                                a * std::log(x) + b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * incbeta_cf(a, b, x) / a;
  }
  return 1.0 - front * incbeta_cf(b, a, 1.0 - x) / b;
}

}  // namespace retdist
