#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "retdist/types.hpp"

namespace retdist {

enum class FitMethod { kMinDistCvm, kMle };

struct FitConfig {
  double weight_c = 0.07;  // Gaussian weight width of the CvM statistic
  double n_low = 1.05;
  double n_high = 500.0;
  double tolerance = 1e-6;  // optimizer tolerance on n
};

struct FitDiagnostics {
  std::size_t sample_count = 0;
  double ks_distance = 0.0;  // at the optimum
  int iterations = 0;
  bool boundary = false;  // optimum sits on an n bound
};

struct FitResult {
  double n_hat = 0.0;
  double objective = 0.0;  // CvM statistic, or negative log-likelihood for MLE
  FitMethod method = FitMethod::kMinDistCvm;
  FitDiagnostics diagnostics;
};

// Model CDF at every point of an ascending grid: one anchored quadrature at
// the first point, then cumulative panel integrals of the pdf. Pointwise
// equal to rescaled_cdf.
std::vector<double> rescaled_cdf_at_sorted(const std::vector<double>& sorted_points,
                                           double n_param);

// Weighted Cramer-von Mises distance between the rescaled model CDF at
// n_param and the empirical CDF of the sorted samples:
//   sum_i [F_model(y_i) - (i - 1/2)/M]^2 exp(-y_i^2 / (2 c^2)).
double cvm_statistic(const std::vector<double>& sorted_samples, double n_param, double weight_c);

// Minimum-distance estimate of n over [n_low, n_high].
FitResult fit_n_min_dist(std::vector<double> samples, const FitConfig& config = {});

// Maximum-likelihood estimate of n over the same bounds.
FitResult fit_n_mle(std::vector<double> samples, const FitConfig& config = {});

struct NormalFit {
  double mu = 0.0;
  double sigma = 0.0;
};
NormalFit fit_normal_mle(const std::vector<double>& samples);

struct StudentTFit {
  double nu = 0.0;
  double mu = 0.0;
  double scale = 0.0;
  bool boundary = false;  // nu ended on a bound of [0.5, 1000]
};
StudentTFit fit_student_t_mle(const std::vector<double>& samples);

// CvM objective on an n grid; diagnostic for unimodality checks.
std::vector<std::pair<double, double>> cvm_grid(const std::vector<double>& sorted_samples,
                                                double weight_c, double n_low, double n_high,
                                                double step);

// Brent scalar minimization over [lo, hi].
struct ScalarMinResult {
  double x = 0.0;
  double f = 0.0;
  int iterations = 0;
};
ScalarMinResult minimize_scalar(const std::function<double(double)>& f, double lo, double hi,
                                double tol, int max_iter = 200);

}  // namespace retdist
