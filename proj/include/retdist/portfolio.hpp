#pragma once

#include "retdist/linalg.hpp"
#include "retdist/rng.hpp"

namespace retdist {

// Portfolio weights with their variance scale alpha = u^T Sigma u.
struct PortfolioSpec {
  Vector weights;
  double alpha = 0.0;
};

// Random weights: k iid draws from U(-a, a), recentred by (1 - sum)/k so
// they sum to one exactly while keeping the U(-a, a) spread. The spread (and
// with it the portfolio variance) grows with a; a -> 0 recovers equal
// weights.
Vector uniform_weights(int k, double a, RngStream& rng);

// All weights 1/k.
Vector equal_weights(int k);

// Minimum-variance weights u = Sigma^-1 g / (g^T Sigma^-1 g), g = (1,...,1).
Vector markowitz_weights(const CovarianceModel& cov_model);

// alpha = u^T Sigma u.
double portfolio_alpha(const Vector& weights, const CovarianceModel& cov_model);

// Bundle weights with their alpha; checks the unit-sum normalization.
PortfolioSpec make_portfolio(Vector weights, const CovarianceModel& cov_model);

// R(t) = u^T r(t) for each column of a K x T return matrix.
Vector portfolio_returns(const Matrix& returns, const Vector& weights);

// R / sqrt(alpha), elementwise.
Vector rescale_returns(const Vector& series, double alpha);

}  // namespace retdist
