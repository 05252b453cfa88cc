#pragma once

#include "retdist/types.hpp"

namespace retdist {

// Average covariance matrix together with its factorization
// Sigma = diag(sigma) * corr * diag(sigma).
struct CovarianceModel {
  Vector sigma;  // per-asset volatilities, sigma_i = sqrt(cov_ii)
  Matrix corr;   // correlation matrix, unit diagonal
  Matrix cov;    // covariance matrix, symmetric PSD

  int size() const { return static_cast<int>(sigma.size()); }

  // Build from a covariance matrix; volatilities and correlations are derived.
  static CovarianceModel from_cov(const Matrix& cov);
  // Build from volatilities and a correlation matrix; covariance is derived.
  static CovarianceModel from_corr(const Vector& sigma, const Matrix& corr);
  // K x K model with constant off-diagonal correlation rho and volatility vol.
  static CovarianceModel constant_corr(int k, double rho, double vol = 1.0);

  // Throws DataError if the factorization invariants are broken.
  void validate() const;
};

// Population covariance (1/T normalization) of a K x T return matrix.
// Throws ZeroVarianceError naming the first constant series.
CovarianceModel sample_covariance(const Matrix& returns);

// Lower-triangular L with L L^T = m. Inputs with relative asymmetry below
// 1e-12 are symmetrized first; larger asymmetry is an error. A non-positive
// pivot throws NotPositiveDefiniteError carrying the pivot index.
Matrix cholesky_lower(const Matrix& m);

// Solve m x = b for symmetric positive definite m.
Vector solve_spd(const Matrix& m, const Vector& b);

// log det m for symmetric positive definite m, via the Cholesky factor.
double log_det_spd(const Matrix& m);

// u^T m v.
double bilinear(const Vector& u, const Matrix& m, const Vector& v);

}  // namespace retdist
