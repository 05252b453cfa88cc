#include "retdist/bessel.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "retdist/types.hpp"

// K_nu via the classical two-regime scheme: Temme's series for x <= 2 and
// Steed's continued fraction CF2 for x > 2, both at the reduced order
// mu = nu - round(nu) in [-1/2, 1/2], followed by the (stable) upward
// three-term recurrence carried on the log scale so that large orders never
// overflow. See Temme, J. Comput. Phys. 19 (1975) 324, and Thompson &
// Barnett, Comput. Phys. Commun. 47 (1987) 245.

namespace retdist {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kMaxIter = 20000;

// Taylor coefficients of 1/Gamma(1+z) = sum a_k z^k (A&S 6.1.34, shifted).
constexpr double kInvGamma1p[14] = {
    1.0,
    +0.57721566490153286061,
    -0.65587807152025388108,
    -0.04200263503409523553,
    +0.16653861138229148950,
    -0.04219773455554433675,
    -0.00962197152787697356,
    +0.00721894324666309954,
    -0.00116516759185906511,
    -0.00021524167411495097,
    +0.00012805028238811619,
    -0.00002013485478078824,
    -0.00000125049348214267,
    +0.00000113302723198170,
};

// gam1(mu) = [1/Gamma(1-mu) - 1/Gamma(1+mu)] / (2 mu). The direct difference
// cancels near mu = 0, so use the even Taylor series there.
double temme_gam1(double mu) {
  if (std::abs(mu) < 0.1) {
    const double m2 = mu * mu;
    double acc = kInvGamma1p[13];
    for (int k = 11; k >= 1; k -= 2) acc = kInvGamma1p[k] + m2 * acc;
    return -acc;
  }
  return (1.0 / std::tgamma(1.0 - mu) - 1.0 / std::tgamma(1.0 + mu)) / (2.0 * mu);
}

struct KmuResult {
  double log_kmu;  // log K_mu(x)
  double ratio;    // K_{mu+1}(x) / K_mu(x)
};

// Temme's series, valid for x <= 2 and |mu| <= 1/2.
KmuResult k_temme_series(double mu, double x) {
  const double eps = std::numeric_limits<double>::epsilon();
  const double x2 = 0.5 * x;
  const double pimu = kPi * mu;
  const double fact = (std::abs(pimu) < 1e-15) ? 1.0 : pimu / std::sin(pimu);
  double d = -std::log(x2);
  double e = mu * d;
  const double fact2 = (std::abs(e) < 1e-15) ? 1.0 : std::sinh(e) / e;
  const double gampl = 1.0 / std::tgamma(1.0 + mu);
  const double gammi = 1.0 / std::tgamma(1.0 - mu);
  const double gam1 = temme_gam1(mu);
  const double gam2 = 0.5 * (gammi + gampl);

  double ff = fact * (gam1 * std::cosh(e) + gam2 * fact2 * d);
  double sum = ff;
  e = std::exp(e);
  double p = 0.5 * e / gampl;
  double q = 0.5 / (e * gammi);
  double c = 1.0;
  d = x2 * x2;
  double sum1 = p;
  int i = 1;
  for (; i <= kMaxIter; ++i) {
    ff = (i * ff + p + q) / (i * i - mu * mu);
    c *= d / i;
    p /= (i - mu);
    q /= (i + mu);
    const double del = c * ff;
    sum += del;
    const double del1 = c * (p - i * ff);
    sum1 += del1;
    if (std::abs(del) < std::abs(sum) * eps) break;
  }
  if (i > kMaxIter) throw NumericError("bessel_k: series did not converge");
  const double kmu = sum;
  const double kmu1 = sum1 * (2.0 / x);
  return {std::log(kmu), kmu1 / kmu};
}

// Steed's continued fraction CF2 for x > 2 and |mu| <= 1/2, evaluated in
// scaled form so only the log of e^x K_mu is formed.
KmuResult k_steed_cf2(double mu, double x) {
  const double eps = std::numeric_limits<double>::epsilon();
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  const double a1 = 0.25 - mu * mu;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  int i = 2;
  for (; i <= kMaxIter; ++i) {
    a -= 2 * (i - 1);
    c = -a * c / i;
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) <= eps) break;
  }
  if (i > kMaxIter) throw NumericError("bessel_k: continued fraction did not converge");
  h = a1 * h;
  // e^x K_mu(x) = sqrt(pi / 2x) / s
  const double log_kmu = 0.5 * std::log(kPi / (2.0 * x)) - std::log(s) - x;
  const double ratio = (mu + x + 0.5 - h) / x;
  return {log_kmu, ratio};
}

}  // namespace

double log_bessel_k(double nu, double x) {
  if (std::isnan(nu) || std::isnan(x)) {
    throw std::invalid_argument("bessel_k: NaN argument");
  }
  if (!(x > 0.0)) {
    throw std::invalid_argument("bessel_k: x must be positive, got " + std::to_string(x));
  }
  nu = std::abs(nu);  // K_{-nu} = K_nu
  // The ratio recurrence costs O(nu) and stays stable at large order; the cap
  // only bounds the running time of a single call.
  if (nu > 2.0e6) {
    throw NumericError("bessel_k: order " + std::to_string(nu) +
                       " exceeds the supported range (nu <= 2e6)");
  }

  const int nl = static_cast<int>(nu + 0.5);
  const double mu = nu - nl;  // in [-1/2, 1/2]
  const KmuResult base = (x <= 2.0) ? k_temme_series(mu, x) : k_steed_cf2(mu, x);

  // Upward recurrence K_{m+1} = K_{m-1} + (2m/x) K_m carried on ratios:
  // all terms are positive, so accumulating log ratios cannot overflow.
  double log_k = base.log_kmu;
  double rho = base.ratio;
  for (int j = 1; j <= nl; ++j) {
    log_k += std::log(rho);
    rho = 2.0 * (mu + j) / x + 1.0 / rho;
  }
  return log_k;
}

double bessel_k(double nu, double x) {
  const double lk = log_bessel_k(nu, x);
  if (lk > 709.0) {
    throw NumericError("bessel_k(" + std::to_string(nu) + ", " + std::to_string(x) +
                       ") overflows a double; use log_bessel_k");
  }
  return std::exp(lk);
}

}  // namespace retdist
