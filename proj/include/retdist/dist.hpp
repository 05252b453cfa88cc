#pragma once

#include "retdist/linalg.hpp"

namespace retdist {

// Ensemble-averaged multivariate return density: a K-Bessel elliptical
// distribution around the average covariance Sigma, with the fluctuation
// parameter n controlling how heavy the tails are. Converges to the
// multivariate normal as n grows.
class MvKBesselDist {
 public:
  MvKBesselDist(CovarianceModel cov_model, double n_param);

  double log_pdf(const Vector& x) const;
  double pdf(const Vector& x) const;

  // The same density evaluated through the scale-mixture z-integral by
  // adaptive quadrature; cross-checks the closed Bessel form.
  double pdf_integral(const Vector& x) const;

  const CovarianceModel& cov_model() const { return cov_; }
  double n_param() const { return n_; }
  int dim() const { return cov_.size(); }

 private:
  double bilinear_inv(const Vector& x) const;  // x^T Sigma^-1 x

  CovarianceModel cov_;
  double n_;
  Matrix chol_;     // lower factor of Sigma
  double log_det_;  // log det Sigma
};

// Univariate density of a portfolio return with variance scale
// alpha = u^T Sigma u; symmetric around zero with exponential tails.
class PortfolioKBesselDist {
 public:
  PortfolioKBesselDist(double alpha, double n_param);

  double pdf(double r) const;
  double log_pdf(double r) const;
  double cdf(double r) const;

  double alpha() const { return alpha_; }
  double n_param() const { return n_; }

 private:
  double alpha_;
  double n_;
};

// Density/CDF of the rescaled portfolio return R/sqrt(alpha); n is the only
// parameter. Equal to the portfolio density at alpha = 1.
double rescaled_pdf(double n_param, double r_hat);
double rescaled_log_pdf(double n_param, double r_hat);
double rescaled_cdf(double n_param, double r_hat);

struct RescaledMoments {
  double variance;         // exactly 1
  double excess_kurtosis;  // 6 / n
};
RescaledMoments rescaled_moments(double n_param);

double normal_pdf(double mu, double sigma, double x);
double normal_cdf(double mu, double sigma, double x);
double student_t_pdf(double nu, double mu, double scale, double x);
double student_t_cdf(double nu, double mu, double scale, double x);

// Regularized incomplete beta I_x(a, b); backs the Student-t CDF.
double reg_incomplete_beta(double a, double b, double x);

}  // namespace retdist
