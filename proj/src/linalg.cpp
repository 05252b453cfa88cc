#include "retdist/linalg.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace retdist {

namespace {

// Symmetrize when the asymmetry is floating-point noise, reject otherwise.
Matrix symmetrized(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("matrix is not square: " + std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()));
  }
  const double scale = m.cwiseAbs().maxCoeff();
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(scale, 1e-300)) {
    throw std::invalid_argument("matrix is not symmetric (max asymmetry " + std::to_string(asym) +
                                ")");
  }
  return 0.5 * (m + m.transpose());
}

}  // namespace

CovarianceModel CovarianceModel::from_cov(const Matrix& cov_in) {
  CovarianceModel model;
  model.cov = symmetrized(cov_in);
  const int k = static_cast<int>(model.cov.rows());
  model.sigma.resize(k);
  for (int i = 0; i < k; ++i) {
    const double v = model.cov(i, i);
    if (!(v > 0.0)) {
      throw ZeroVarianceError("covariance has non-positive variance for asset " + std::to_string(i),
                              i);
    }
    model.sigma(i) = std::sqrt(v);
  }
  model.corr.resize(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      model.corr(i, j) = (i == j) ? 1.0 : model.cov(i, j) / (model.sigma(i) * model.sigma(j));
    }
  }
  model.validate();
  return model;
}

CovarianceModel CovarianceModel::from_corr(const Vector& sigma, const Matrix& corr_in) {
  CovarianceModel model;
  model.corr = symmetrized(corr_in);
  model.sigma = sigma;
  const int k = static_cast<int>(sigma.size());
  if (model.corr.rows() != k) {
    throw std::invalid_argument("sigma/corr dimension mismatch");
  }
  for (int i = 0; i < k; ++i) {
    if (!(sigma(i) > 0.0)) {
      throw ZeroVarianceError("non-positive volatility for asset " + std::to_string(i), i);
    }
    model.corr(i, i) = 1.0;
  }
  model.cov = sigma.asDiagonal() * model.corr * sigma.asDiagonal();
  model.cov = 0.5 * (model.cov + model.cov.transpose()).eval();
  model.validate();
  return model;
}

CovarianceModel CovarianceModel::constant_corr(int k, double rho, double vol) {
  if (k < 1) throw std::invalid_argument("constant_corr: k must be positive");
  if (rho < -1.0 / (k - 1.0) && k > 1) {
    throw std::invalid_argument("constant_corr: rho makes the matrix indefinite");
  }
  Matrix corr = Matrix::Constant(k, k, rho);
  corr.diagonal().setOnes();
  return from_corr(Vector::Constant(k, vol), corr);
}

void CovarianceModel::validate() const {
  const int k = size();
  if (corr.rows() != k || corr.cols() != k || cov.rows() != k || cov.cols() != k) {
    throw DataError("covariance model has inconsistent dimensions");
  }
  for (int i = 0; i < k; ++i) {
    if (corr(i, i) != 1.0) {
      throw DataError("correlation diagonal is not exactly 1 at index " + std::to_string(i));
    }
    for (int j = 0; j < k; ++j) {
      if (std::abs(corr(i, j)) > 1.0 + 1e-12) {
        throw DataError("correlation entry out of [-1,1] at (" + std::to_string(i) + "," +
                        std::to_string(j) + ")");
      }
    }
  }
  const Matrix rebuilt = sigma.asDiagonal() * corr * sigma.asDiagonal();
  const double scale = std::max(cov.cwiseAbs().maxCoeff(), 1e-300);
  if ((rebuilt - cov).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw DataError("cov does not equal sigma * corr * sigma");
  }
}

CovarianceModel sample_covariance(const Matrix& returns) {
  const int k = static_cast<int>(returns.rows());
  const long t = returns.cols();
  if (k < 1) throw std::invalid_argument("sample_covariance: need at least one asset");
  if (t < 2) throw std::invalid_argument("sample_covariance: need at least two observations");

  const Vector mean = returns.rowwise().mean();
  const Matrix centered = returns.colwise() - mean;
  Matrix cov = (centered * centered.transpose()) / static_cast<double>(t);
  cov = 0.5 * (cov + cov.transpose()).eval();

  // A constant series leaves the correlation undefined; report which one.
  const double eps = std::numeric_limits<double>::epsilon();
  for (int i = 0; i < k; ++i) {
    const double meansq = returns.row(i).squaredNorm() / static_cast<double>(t);
    if (cov(i, i) <= 100.0 * eps * eps * meansq) {
      throw ZeroVarianceError(
          "asset " + std::to_string(i) + " has zero variance (constant return series)", i);
    }
  }
  return CovarianceModel::from_cov(cov);
}

Matrix cholesky_lower(const Matrix& m_in) {
  const Matrix m = symmetrized(m_in);
  const int n = static_cast<int>(m.rows());
  Matrix l = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double sum = m(i, j);
      for (int p = 0; p < j; ++p) sum -= l(i, p) * l(j, p);
      if (i == j) {
        if (!(sum > 0.0)) {
          throw NotPositiveDefiniteError(
              "matrix is not positive definite (pivot " + std::to_string(i) + " = " +
                  std::to_string(sum) + ")",
              i);
        }
        l(i, i) = std::sqrt(sum);
      } else {
        l(i, j) = sum / l(j, j);
      }
    }
  }
  return l;
}

Vector solve_spd(const Matrix& m, const Vector& b) {
  if (m.rows() != b.size()) {
    throw std::invalid_argument("solve_spd: dimension mismatch");
  }
  const Matrix l = cholesky_lower(m);
  // Forward then backward substitution.
  const int n = static_cast<int>(b.size());
  Vector y(n);
  for (int i = 0; i < n; ++i) {
    double s = b(i);
    for (int j = 0; j < i; ++j) s -= l(i, j) * y(j);
    y(i) = s / l(i, i);
  }
  Vector x(n);
  for (int i = n - 1; i >= 0; --i) {
    double s = y(i);
    for (int j = i + 1; j < n; ++j) s -= l(j, i) * x(j);
    x(i) = s / l(i, i);
  }
  return x;
}

double log_det_spd(const Matrix& m) {
  const Matrix l = cholesky_lower(m);
  double acc = 0.0;
  for (int i = 0; i < l.rows(); ++i) acc += std::log(l(i, i));
  return 2.0 * acc;
}

double bilinear(const Vector& u, const Matrix& m, const Vector& v) {
  if (u.size() != m.rows() || v.size() != m.cols()) {
    throw std::invalid_argument("bilinear: dimension mismatch");
  }
  return u.dot(m * v);
}

}  // namespace retdist
