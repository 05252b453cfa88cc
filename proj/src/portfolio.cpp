#include "retdist/portfolio.hpp"

#include <cmath>
#include <string>

namespace retdist {

Vector uniform_weights(int k, double a, RngStream& rng) {
  if (k < 2) throw std::invalid_argument("uniform_weights: need k >= 2");
  if (!(a > 0.0)) throw std::invalid_argument("uniform_weights: a must be positive");
  Vector w(k);
  for (int i = 0; i < k; ++i) w(i) = rng.uniform(-a, a);
  const double shift = (1.0 - w.sum()) / k;
  w.array() += shift;
  return w;
}

Vector equal_weights(int k) {
  if (k < 1) throw std::invalid_argument("equal_weights: need k >= 1");
  return Vector::Constant(k, 1.0 / k);
}

Vector markowitz_weights(const CovarianceModel& cov_model) {
  const int k = cov_model.size();
  const Vector g = Vector::Ones(k);
  const Vector sig_inv_g = solve_spd(cov_model.cov, g);  // throws for singular Sigma
  const double denom = g.dot(sig_inv_g);
  if (!(denom > 0.0)) {
    throw NumericError("markowitz_weights: g' Sigma^-1 g is not positive");
  }
  return sig_inv_g / denom;
}

double portfolio_alpha(const Vector& weights, const CovarianceModel& cov_model) {
  return bilinear(weights, cov_model.cov, weights);
}

PortfolioSpec make_portfolio(Vector weights, const CovarianceModel& cov_model) {
  if (std::abs(weights.sum() - 1.0) > 1e-12) {
    throw std::invalid_argument("portfolio weights must sum to 1 (got " +
                                std::to_string(weights.sum()) + ")");
  }
  PortfolioSpec spec;
  spec.alpha = portfolio_alpha(weights, cov_model);
  spec.weights = std::move(weights);
  if (!(spec.alpha > 0.0)) {
    throw NumericError("portfolio alpha is not positive");
  }
  return spec;
}

Vector portfolio_returns(const Matrix& returns, const Vector& weights) {
  if (returns.rows() != weights.size()) {
    throw std::invalid_argument("portfolio_returns: dimension mismatch");
  }
  return returns.transpose() * weights;
}

Vector rescale_returns(const Vector& series, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("rescale_returns: alpha must be positive");
  return series / std::sqrt(alpha);
}

}  // namespace retdist
