#include "retdist/ensemble.hpp"

#include <cmath>
#include <string>

namespace retdist {

void EnsembleSpec::validate() const {
  if (!(n_param > 0.0)) {
    throw std::invalid_argument("EnsembleSpec: n_param must be positive");
  }
  cov_model.validate();
}

bool EnsembleSpec::has_integer_n(double tol) const {
  return std::abs(n_param - std::round(n_param)) <= tol && n_param >= 1.0 - tol;
}

int EnsembleSpec::integer_n() const {
  if (!has_integer_n()) {
    throw std::invalid_argument(
        "n_param = " + std::to_string(n_param) +
        " is not an integer; the matrix ensemble needs an integer column count "
        "(use sample_mixture_return for real n_param)");
  }
  return static_cast<int>(std::round(n_param));
}

Matrix sample_gaussian_factor(const Matrix& m, int n, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("sample_gaussian_factor: n must be positive");
  const Matrix l = cholesky_lower(m);
  const int k = static_cast<int>(m.rows());
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  Matrix w(k, n);
  for (int j = 0; j < n; ++j) {
    Vector xi(k);
    for (int i = 0; i < k; ++i) xi(i) = rng.normal();
    w.col(j) = scale * (l * xi);
  }
  return w;
}

Matrix sample_wishart_factor(const EnsembleSpec& spec, RngStream& rng) {
  spec.validate();
  return sample_gaussian_factor(spec.cov_model.corr, spec.integer_n(), rng);
}

Matrix sample_correlation_matrix(const EnsembleSpec& spec, RngStream& rng) {
  const Matrix w = sample_wishart_factor(spec, rng);
  return w * w.transpose();
}

Vector sample_conditional_return(const Matrix& cov_s, RngStream& rng) {
  const int k = static_cast<int>(cov_s.rows());
  if (cov_s.cols() != k) throw std::invalid_argument("sample_conditional_return: not square");

  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (cov_s + cov_s.transpose()));
  if (eig.info() != Eigen::Success) {
    throw NumericError("sample_conditional_return: eigendecomposition failed");
  }
  const Vector& lam = eig.eigenvalues();
  const double lam_max = lam.maxCoeff();
  const double cut = 1e-12 * std::max(lam_max, 0.0);
  const double neg_tol = 1e-10 * std::max(lam_max, 0.0);

  Vector x = Vector::Zero(k);
  for (int i = 0; i < k; ++i) {
    if (lam(i) < -neg_tol) {
      throw NumericError("sample_conditional_return: eigenvalue " + std::to_string(lam(i)) +
                         " is negative beyond tolerance");
    }
    if (lam(i) > cut) {
      x += std::sqrt(lam(i)) * rng.normal() * eig.eigenvectors().col(i);
    }
  }
  return x;
}

Vector sample_ensemble_return(const EnsembleSpec& spec, RngStream& rng) {
  const Matrix ww = sample_correlation_matrix(spec, rng);
  const auto& sigma = spec.cov_model.sigma;
  const Matrix cov_s = sigma.asDiagonal() * ww * sigma.asDiagonal();
  return sample_conditional_return(cov_s, rng);
}

Vector sample_mixture_return(const EnsembleSpec& spec, RngStream& rng) {
  spec.validate();
  const Matrix l = cholesky_lower(spec.cov_model.cov);
  const double z = rng.chi_squared(spec.n_param);
  const double scale = std::sqrt(z / spec.n_param);
  const int k = spec.cov_model.size();
  Vector xi(k);
  for (int i = 0; i < k; ++i) xi(i) = rng.normal();
  return scale * (l * xi);
}

double wishart_element_variance(const EnsembleSpec& spec, int i, int j) {
  spec.validate();
  const int k = spec.cov_model.size();
  if (i < 0 || i >= k || j < 0 || j >= k) {
    throw std::invalid_argument("wishart_element_variance: index out of range");
  }
  const Matrix& c = spec.cov_model.corr;
  return (c(i, j) * c(i, j) + c(i, i) * c(j, j)) / spec.n_param;
}

}  // namespace retdist
