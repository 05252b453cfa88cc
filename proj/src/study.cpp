#include "retdist/study.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace retdist {

std::string to_string(WeightScheme scheme) {
  switch (scheme) {
    case WeightScheme::kUniform: return "uniform";
    case WeightScheme::kEqual: return "equal";
    case WeightScheme::kMarkowitz: return "markowitz";
  }
  return "unknown";
}

WeightScheme parse_weight_scheme(const std::string& name) {
  if (name == "uniform") return WeightScheme::kUniform;
  if (name == "equal") return WeightScheme::kEqual;
  if (name == "markowitz") return WeightScheme::kMarkowitz;
  throw std::invalid_argument("unknown weight scheme '" + name +
                              "' (expected uniform, equal, or markowitz)");
}

std::vector<int> sample_asset_subset(int k_total, int k, RngStream& rng) {
  if (k < 1 || k > k_total) throw std::invalid_argument("sample_asset_subset: bad subset size");
  std::vector<int> idx(k_total);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < k; ++i) {
    std::swap(idx[i], idx[rng.uniform_int(i, k_total - 1)]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

StudyResult run_portfolio_study(const ReturnMatrix& returns, const StudyConfig& config) {
  const int k_total = static_cast<int>(returns.values.rows());
  const long t = returns.values.cols();
  if (config.portfolios < 1) throw std::invalid_argument("study: need at least one portfolio");
  if (config.k < 2) throw std::invalid_argument("study: portfolio size must be at least 2");
  if (config.k > k_total) {
    throw std::invalid_argument("study: portfolio size " + std::to_string(config.k) +
                                " exceeds the " + std::to_string(k_total) + " available assets");
  }
  if (t < 2) throw std::invalid_argument("study: need at least two return observations");

  StudyResult result;
  result.portfolios.reserve(config.portfolios);
  std::vector<double> pooled;
  pooled.reserve(static_cast<std::size_t>(config.portfolios) * t);

  for (int p = 0; p < config.portfolios; ++p) {
    RngStream rng(config.seed, static_cast<std::uint64_t>(p) + 1);
    const std::vector<int> assets = sample_asset_subset(k_total, config.k, rng);
    Matrix sub(config.k, t);
    for (int i = 0; i < config.k; ++i) sub.row(i) = returns.values.row(assets[i]);

    const CovarianceModel cov = sample_covariance(sub);
    Vector weights;
    switch (config.scheme) {
      case WeightScheme::kUniform: weights = uniform_weights(config.k, config.uniform_a, rng); break;
      case WeightScheme::kEqual: weights = equal_weights(config.k); break;
      case WeightScheme::kMarkowitz: weights = markowitz_weights(cov); break;
    }
    const PortfolioSpec spec = make_portfolio(weights, cov);
    const Vector series = portfolio_returns(sub, spec.weights);
    const Vector rescaled = rescale_returns(series, spec.alpha);
    for (long s = 0; s < rescaled.size(); ++s) pooled.push_back(rescaled(s));

    result.portfolios.push_back({assets, spec.weights, spec.alpha});
    result.alpha_mean += spec.alpha;
  }
  result.alpha_mean /= config.portfolios;

  // Optional deterministic thinning keeps sweep fits affordable.
  if (config.max_fit_samples > 0 && pooled.size() > config.max_fit_samples) {
    std::vector<double> thinned;
    thinned.reserve(config.max_fit_samples);
    for (std::size_t i = 0; i < config.max_fit_samples; ++i) {
      thinned.push_back(pooled[(i * pooled.size()) / config.max_fit_samples]);
    }
    pooled.swap(thinned);
  }
  std::sort(pooled.begin(), pooled.end());
  result.pooled_rescaled = pooled;

  result.min_dist = fit_n_min_dist(pooled, config.fit);
  if (config.run_mle) result.mle = fit_n_mle(pooled, config.fit);
  if (config.run_baselines) {
    result.normal = fit_normal_mle(pooled);
    result.student_t = fit_student_t_mle(pooled);
  }
  return result;
}

}  // namespace retdist
