#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "retdist/fit.hpp"
#include "retdist/io.hpp"
#include "retdist/portfolio.hpp"

namespace retdist {

enum class WeightScheme { kUniform, kEqual, kMarkowitz };

std::string to_string(WeightScheme scheme);
WeightScheme parse_weight_scheme(const std::string& name);

// One portfolio experiment: build random portfolios over the available
// assets, rescale each portfolio return series by its own alpha, pool, and
// fit the fluctuation parameter.
struct StudyConfig {
  int portfolios = 600;
  int k = 20;  // stocks per portfolio
  WeightScheme scheme = WeightScheme::kUniform;
  double uniform_a = 0.5;
  std::uint64_t seed = 1;
  FitConfig fit;
  bool run_mle = true;
  bool run_baselines = true;
  std::size_t max_fit_samples = 0;  // 0 = fit on the full pooled sample
};

struct PortfolioRecord {
  std::vector<int> assets;
  Vector weights;
  double alpha = 0.0;
};

struct StudyResult {
  std::vector<PortfolioRecord> portfolios;
  double alpha_mean = 0.0;
  std::vector<double> pooled_rescaled;  // sorted pooled R-hat used for the fit
  FitResult min_dist;
  FitResult mle;        // valid when run_mle
  NormalFit normal;     // valid when run_baselines
  StudentTFit student_t;
};

StudyResult run_portfolio_study(const ReturnMatrix& returns, const StudyConfig& config);

// k distinct asset indices drawn without replacement, ascending.
std::vector<int> sample_asset_subset(int k_total, int k, RngStream& rng);

}  // namespace retdist
