#pragma once

#include "retdist/linalg.hpp"
#include "retdist/rng.hpp"

namespace retdist {

// Wishart fluctuation ensemble around an average covariance model. n_param
// sets the fluctuation strength: element variances of the random correlation
// matrix scale as 1/n_param, so large n_param freezes the correlations.
struct EnsembleSpec {
  CovarianceModel cov_model;
  double n_param = 0.0;

  void validate() const;
  bool has_integer_n(double tol = 1e-9) const;
  // n_param as a matrix dimension; throws for non-integer n_param.
  int integer_n() const;
};

// K x n factor with independent columns ~ N(0, m / n).
Matrix sample_gaussian_factor(const Matrix& m, int n, RngStream& rng);

// One K x N factor W of the random correlation matrix (integer N only;
// non-integer N is served by sample_mixture_return).
Matrix sample_wishart_factor(const EnsembleSpec& spec, RngStream& rng);

// One draw W W^T of the random correlation matrix: symmetric PSD with rank
// min(K, N).
Matrix sample_correlation_matrix(const EnsembleSpec& spec, RngStream& rng);

// x ~ N(0, cov_s) for a possibly rank-deficient cov_s. Eigenvalues below
// 1e-12 of the largest are treated as exact zeros, so samples stay in the
// column space of cov_s; eigenvalues negative beyond tolerance are an error.
Vector sample_conditional_return(const Matrix& cov_s, RngStream& rng);

// Two-stage draw: a random covariance sigma W W^T sigma, then a normal
// return conditioned on it. Integer N only.
Vector sample_ensemble_return(const EnsembleSpec& spec, RngStream& rng);

// Scale-mixture draw: z ~ chi^2_N, then x ~ N(0, (z/N) Sigma). Valid for any
// real N > 0; distributionally equal to sample_ensemble_return at integer N.
Vector sample_mixture_return(const EnsembleSpec& spec, RngStream& rng);

// var(X_ij) = (c_ij^2 + c_ii c_jj) / N for X = W W^T.
double wishart_element_variance(const EnsembleSpec& spec, int i, int j);

}  // namespace retdist
