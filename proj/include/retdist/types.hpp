#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace retdist {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Input or usage problems: bad files, malformed data, invalid parameters.
// The CLI maps these to exit code 2.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failures: factorization breakdown, quadrature non-convergence,
// overflow. The CLI maps these to exit code 1.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Cholesky (or an SPD solve built on it) hit a non-positive pivot. Callers
// that can handle semi-definite matrices catch this and fall back to an
// eigendecomposition.
class NotPositiveDefiniteError : public NumericError {
 public:
  NotPositiveDefiniteError(const std::string& msg, int pivot)
      : NumericError(msg), pivot_(pivot) {}
  int pivot() const { return pivot_; }

 private:
  int pivot_;
};

// A constant return series makes the correlation matrix undefined.
class ZeroVarianceError : public DataError {
 public:
  ZeroVarianceError(const std::string& msg, int asset)
      : DataError(msg), asset_(asset) {}
  int asset() const { return asset_; }

 private:
  int asset_;
};

}  // namespace retdist
