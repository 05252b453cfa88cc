#pragma once

// Test-only oracles. Each one is an independent second route to a quantity
// the library computes, so a test never checks an implementation against
// itself.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "retdist/rng.hpp"
#include "retdist/types.hpp"

namespace retdist::test {

// Streaming covariance via Welford-style co-moment updates; an independent
// second implementation of the population covariance.
class StreamingCovariance {
 public:
  explicit StreamingCovariance(int k) : n_(0), mean_(Vector::Zero(k)), m2_(Matrix::Zero(k, k)) {}

  void add(const Vector& x) {
    ++n_;
    const Vector delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    const Vector delta2 = x - mean_;
    m2_ += delta * delta2.transpose();
  }

  Matrix covariance() const { return m2_ / static_cast<double>(n_); }  // population form

 private:
  long n_;
  Vector mean_;
  Matrix m2_;
};

inline double naive_bilinear(const Vector& u, const Matrix& m, const Vector& v) {
  double acc = 0.0;
  for (long i = 0; i < m.rows(); ++i) {
    for (long j = 0; j < m.cols(); ++j) acc += u(i) * m(i, j) * v(j);
  }
  return acc;
}

inline Matrix random_spd(int k, RngStream& rng, double ridge = 0.5) {
  Matrix a(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) a(i, j) = rng.normal();
  }
  Matrix m = a * a.transpose() / k;
  m.diagonal().array() += ridge;
  return m;
}

// Sup distance between the empirical CDF of sorted samples and a model CDF.
inline double ks_statistic(const std::vector<double>& sorted,
                           const std::function<double(double)>& cdf) {
  const double m = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i + 1) / m));
    d = std::max(d, std::abs(f - static_cast<double>(i) / m));
  }
  return d;
}

// Two-sample KS distance (both inputs sorted).
inline double ks_two_sample(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) {
      ++i;
    } else {
      ++j;
    }
    const double fa = static_cast<double>(i) / a.size();
    const double fb = static_cast<double>(j) / b.size();
    d = std::max(d, std::abs(fa - fb));
  }
  return d;
}

struct SampleMoments {
  double mean = 0.0;
  double variance = 0.0;         // population normalization
  double excess_kurtosis = 0.0;
};

inline SampleMoments sample_moments(const std::vector<double>& xs) {
  SampleMoments mom;
  const double m = static_cast<double>(xs.size());
  for (double x : xs) mom.mean += x;
  mom.mean /= m;
  double m2 = 0.0;
  double m4 = 0.0;
  for (double x : xs) {
    const double d = x - mom.mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m2 /= m;
  m4 /= m;
  mom.variance = m2;
  mom.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  return mom;
}

}  // namespace retdist::test
