#include <Eigen/Eigenvalues>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "retdist/ensemble.hpp"
#include "support/oracles.hpp"

using namespace retdist;

namespace {

EnsembleSpec make_spec(int k, double rho, double n, double vol = 1.0) {
  return {CovarianceModel::constant_corr(k, rho, vol), n};
}

}  // namespace

TEST_CASE("rng streams are reproducible and decorrelated") {
  RngStream a(123, 4);
  RngStream b(123, 4);
  for (int i = 0; i < 200; ++i) {
    CHECK(a.normal() == b.normal());  // bit-identical replay
    CHECK(a.uniform() == b.uniform());
  }
  RngStream c(123, 5);
  bool any_diff = false;
  RngStream a2(123, 4);
  for (int i = 0; i < 20; ++i) any_diff |= (a2.normal() != c.normal());
  CHECK(any_diff);
}

TEST_CASE("gamma draws have the right first two moments") {
  RngStream rng(9);
  const double shape = 1.95;  // chi^2 with dof 3.9
  std::vector<double> zs;
  zs.reserve(50000);
  for (int i = 0; i < 50000; ++i) zs.push_back(rng.gamma(shape, 2.0));
  const auto mom = test::sample_moments(zs);
  CHECK(mom.mean == doctest::Approx(2.0 * shape).epsilon(0.02));
  CHECK(mom.variance == doctest::Approx(4.0 * shape).epsilon(0.05));
}

TEST_CASE("sample_wishart_factor: identity C, N=1 is a single standard normal column") {
  EnsembleSpec spec = make_spec(1, 0.0, 1.0);
  RngStream rng(21);
  std::vector<double> draws;
  for (int i = 0; i < 20000; ++i) {
    const Matrix w = sample_wishart_factor(spec, rng);
    CHECK(w.rows() == 1);
    CHECK(w.cols() == 1);
    draws.push_back(w(0, 0));
  }
  const auto mom = test::sample_moments(draws);
  CHECK(std::abs(mom.mean) < 4.0 / std::sqrt(20000.0));
  CHECK(mom.variance == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("ensemble mean: <W W^T> = C entrywise within 4 SE at 1e5 draws") {
  const int k = 3;
  const int n = 5;
  EnsembleSpec spec = make_spec(k, 0.3, n);
  RngStream rng(2024);
  const int m = 100000;
  Matrix mean = Matrix::Zero(k, k);
  for (int s = 0; s < m; ++s) {
    const Matrix w = sample_wishart_factor(spec, rng);
    mean += w * w.transpose();
  }
  mean /= m;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      const double se = std::sqrt(wishart_element_variance(spec, i, j) / m);
      CHECK(std::abs(mean(i, j) - spec.cov_model.corr(i, j)) < 4.0 * se);
    }
  }
}

TEST_CASE("ensemble element variance matches (c_ij^2 + c_ii c_jj)/N") {
  const int k = 2;
  const int n = 4;
  EnsembleSpec spec = make_spec(k, 0.0, n);
  RngStream rng(31337);
  const int m = 100000;
  std::vector<double> diag;
  std::vector<double> off;
  diag.reserve(m);
  off.reserve(m);
  for (int s = 0; s < m; ++s) {
    const Matrix x = sample_correlation_matrix(spec, rng);
    diag.push_back(x(0, 0));
    off.push_back(x(0, 1));
  }
  // C = I, N = 4: var 2/N = 0.5 on the diagonal, 1/N = 0.25 off it
  CHECK(wishart_element_variance(spec, 0, 0) == doctest::Approx(0.5));
  CHECK(wishart_element_variance(spec, 0, 1) == doctest::Approx(0.25));
  CHECK(test::sample_moments(diag).variance == doctest::Approx(0.5).epsilon(0.04));
  CHECK(test::sample_moments(off).variance == doctest::Approx(0.25).epsilon(0.04));
}

TEST_CASE("wishart_element_variance: worked example and index checks") {
  EnsembleSpec spec = make_spec(2, 0.5, 5.0);
  CHECK(wishart_element_variance(spec, 0, 1) == doctest::Approx(0.25));  // (0.25 + 1)/5
  CHECK_THROWS_AS(wishart_element_variance(spec, 0, 2), std::invalid_argument);
}

TEST_CASE("non-integer n_param is rejected by the matrix samplers") {
  EnsembleSpec spec = make_spec(2, 0.2, 3.9);
  RngStream rng(1);
  CHECK_THROWS_WITH_AS(sample_wishart_factor(spec, rng),
                       doctest::Contains("sample_mixture_return"), std::invalid_argument);
  CHECK_THROWS_AS(sample_ensemble_return(spec, rng), std::invalid_argument);
  CHECK_NOTHROW(sample_mixture_return(spec, rng));
}

TEST_CASE("degenerate regime: N < K gives exactly K - N zero eigenvalues") {
  const int k = 5;
  const int n = 2;
  EnsembleSpec spec = make_spec(k, 0.2, n);
  RngStream rng(555);
  for (int rep = 0; rep < 200; ++rep) {
    const Matrix x = sample_correlation_matrix(spec, rng);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(x);
    const double lam_max = eig.eigenvalues().maxCoeff();
    int zeros = 0;
    for (int i = 0; i < k; ++i) {
      if (eig.eigenvalues()(i) < 1e-10 * lam_max) ++zeros;
    }
    CHECK(zeros == k - n);
  }
}

TEST_CASE("N >= K draws are full rank") {
  EnsembleSpec spec = make_spec(4, 0.3, 6);
  RngStream rng(808);
  for (int rep = 0; rep < 50; ++rep) {
    const Matrix x = sample_correlation_matrix(spec, rng);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(x);
    CHECK(eig.eigenvalues().minCoeff() > 1e-10 * eig.eigenvalues().maxCoeff());
  }
}

TEST_CASE("large N freezes the correlation matrix near C") {
  EnsembleSpec spec = make_spec(3, 0.3, 10000);
  RngStream rng(99);
  const Matrix x = sample_correlation_matrix(spec, rng);
  CHECK((x - spec.cov_model.corr).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("sample_conditional_return: zero covariance gives the zero vector") {
  RngStream rng(3);
  const Vector x = sample_conditional_return(Matrix::Zero(4, 4), rng);
  CHECK(x.norm() == 0.0);
}

TEST_CASE("sample_conditional_return: identity covariance reproduces the identity") {
  RngStream rng(17);
  const int k = 3;
  const int m = 100000;
  test::StreamingCovariance cov(k);
  for (int s = 0; s < m; ++s) cov.add(sample_conditional_return(Matrix::Identity(k, k), rng));
  const Matrix c = cov.covariance();
  // SE of a covariance entry of standard normals is about 1/sqrt(m)
  const double se = 1.0 / std::sqrt(static_cast<double>(m));
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      const double target = (i == j) ? 1.0 : 0.0;
      const double entry_se = (i == j) ? std::sqrt(2.0) * se : se;
      CHECK(std::abs(c(i, j) - target) < 4.0 * entry_se);
    }
  }
}

TEST_CASE("sample_conditional_return: rank-1 covariance keeps samples on the ray") {
  RngStream rng(29);
  Vector v(4);
  v << 0.3, -1.2, 0.7, 2.0;
  const Matrix cov = v * v.transpose();
  const Vector unit = v / v.norm();
  for (int rep = 0; rep < 100; ++rep) {
    const Vector x = sample_conditional_return(cov, rng);
    const Vector residual = x - unit.dot(x) * unit;
    CHECK(residual.norm() < 1e-10 * (1.0 + x.norm()));
  }
}

TEST_CASE("sample_conditional_return: indefinite input is an error") {
  Matrix bad = Matrix::Identity(3, 3);
  bad(2, 2) = -0.5;
  RngStream rng(1);
  CHECK_THROWS_AS(sample_conditional_return(bad, rng), NumericError);
}

TEST_CASE("ensemble returns become Gaussian as N grows") {
  EnsembleSpec spec = make_spec(1, 0.0, 10000);
  RngStream rng(47);
  std::vector<double> xs;
  const int m = 100000;
  xs.reserve(m);
  for (int s = 0; s < m; ++s) xs.push_back(sample_ensemble_return(spec, rng)(0));
  const auto mom = test::sample_moments(xs);
  CHECK(std::abs(mom.excess_kurtosis) < 0.08);  // 6/N = 6e-4 plus MC noise
}

TEST_CASE("ensemble returns: uncorrelated C gives uncorrelated components") {
  EnsembleSpec spec = make_spec(2, 0.0, 4);
  RngStream rng(53);
  const int m = 50000;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (int s = 0; s < m; ++s) {
    const Vector x = sample_ensemble_return(spec, rng);
    sxy += x(0) * x(1);
    sxx += x(0) * x(0);
    syy += x(1) * x(1);
  }
  const double corr = sxy / std::sqrt(sxx * syy);
  // mixture components are uncorrelated but not independent; the shared z
  // inflates the variance of the correlation estimate by E[(z/N)^2] = 1 + 2/N
  const double se = std::sqrt((1.0 + 2.0 / 4.0) / m);
  CHECK(std::abs(corr) < 4.0 * se);
}

TEST_CASE("mixture variance equals Sigma diagonal for real N") {
  EnsembleSpec spec = make_spec(3, 0.4, 3.9, 0.02);
  RngStream rng(61);
  const int m = 100000;
  std::vector<double> first;
  first.reserve(m);
  for (int s = 0; s < m; ++s) first.push_back(sample_mixture_return(spec, rng)(0));
  const auto mom = test::sample_moments(first);
  const double target = spec.cov_model.cov(0, 0);
  // relative SE of the variance is sqrt((kappa - 1)/m) with kappa = 3 (1 + 2/N)
  const double rel_se = std::sqrt((3.0 * (1.0 + 2.0 / 3.9) - 1.0) / m);
  CHECK(std::abs(mom.variance - target) < 4.0 * rel_se * target);
}

TEST_CASE("mixture degenerates to a plain Gaussian as N -> infinity") {
  EnsembleSpec spec = make_spec(1, 0.0, 1e7);
  RngStream rng(71);
  std::vector<double> xs;
  const int m = 100000;
  xs.reserve(m);
  for (int s = 0; s < m; ++s) xs.push_back(sample_mixture_return(spec, rng)(0));
  CHECK(std::abs(test::sample_moments(xs).excess_kurtosis) < 0.08);
}

TEST_CASE("mixture and ensemble paths agree in distribution at integer N") {
  const int k = 3;
  const int n = 4;
  EnsembleSpec spec = make_spec(k, 0.3, n, 0.02);
  RngStream rng_a(83, 1);
  RngStream rng_b(83, 2);
  RngStream rng_u(83, 3);
  Vector u(k);
  for (int i = 0; i < k; ++i) u(i) = rng_u.normal();
  const int m = 40000;
  std::vector<double> a;
  std::vector<double> b;
  a.reserve(m);
  b.reserve(m);
  for (int s = 0; s < m; ++s) {
    a.push_back(u.dot(sample_ensemble_return(spec, rng_a)));
    b.push_back(u.dot(sample_mixture_return(spec, rng_b)));
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double d = test::ks_two_sample(a, b);
  const double crit = 1.628 * std::sqrt(2.0 / m);  // 1% level
  CHECK(d < crit);
}

TEST_CASE("covariance- and correlation-parameterized ensembles agree (x' Sigma^-1 x)") {
  const int k = 3;
  const int n = 5;
  EnsembleSpec spec = make_spec(k, 0.4, n, 0.02);
  const Matrix& sigma_full = spec.cov_model.cov;

  RngStream rng_a(91, 1);
  RngStream rng_b(91, 2);
  const int m = 30000;
  std::vector<double> qa;
  std::vector<double> qb;
  qa.reserve(m);
  qb.reserve(m);
  for (int s = 0; s < m; ++s) {
    // correlation route: sigma W W^T sigma with W ~ N(0, C/N) columns
    const Vector xa = sample_ensemble_return(spec, rng_a);
    qa.push_back(xa.dot(solve_spd(sigma_full, xa)));
    // covariance route: A A^T with A ~ N(0, Sigma/N) columns
    const Matrix a_factor = sample_gaussian_factor(sigma_full, n, rng_b);
    const Vector xb = sample_conditional_return(a_factor * a_factor.transpose(), rng_b);
    qb.push_back(xb.dot(solve_spd(sigma_full, xb)));
  }
  std::sort(qa.begin(), qa.end());
  std::sort(qb.begin(), qb.end());
  CHECK(test::ks_two_sample(qa, qb) < 1.628 * std::sqrt(2.0 / m));
}

TEST_CASE("samplers replay bit-identically for equal streams") {
  EnsembleSpec spec = make_spec(3, 0.3, 4);
  RngStream r1(7, 42);
  RngStream r2(7, 42);
  for (int rep = 0; rep < 10; ++rep) {
    const Vector a = sample_ensemble_return(spec, r1);
    const Vector b = sample_ensemble_return(spec, r2);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  }
}
