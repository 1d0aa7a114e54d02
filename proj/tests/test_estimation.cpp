#include <doctest.h>

#include <cmath>
#include <random>

#include "parsec/estimation.hpp"

using namespace parsec;

namespace {

Matrix random_covariance(int p, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> normal;
  Matrix a(2 * p, p);
  for (int i = 0; i < 2 * p; ++i)
    for (int j = 0; j < p; ++j) a(i, j) = normal(gen);
  return a.transpose() * a / (2.0 * p) + 0.25 * Matrix::Identity(p, p);
}

EdgeStructure random_structure(int p, unsigned seed, double density) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  EdgeStructure e = EdgeStructure::identity(p);
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j)
      if (unif(gen) < density) {
        e.set(i, j, true);
        e.set(j, i, true);
      }
  return e;
}

// Residual of the pseudo-likelihood stationarity conditions at omega: every
// active coordinate must be a fixed point of its own update equation.
double concord_residual(const Matrix& s, const EdgeStructure& e,
                        const Matrix& omega) {
  const int p = static_cast<int>(s.rows());
  double worst = 0.0;
  for (int i = 0; i < p; ++i) {
    if (e.degree(i) == 0) continue;
    for (int j = 0; j < p; ++j) {
      if (j == i || !e.at(i, j) || e.degree(j) == 0) continue;
      double acc = 0.0;
      for (int k = 0; k < p; ++k)
        if (k != j && (k == i || e.at(i, k))) acc += omega(i, k) * s(k, j);
      for (int k = 0; k < p; ++k)
        if (k != i && (k == j || e.at(k, j))) acc += omega(k, j) * s(i, k);
      worst = std::max(worst,
                       std::abs(omega(i, j) + acc / (s(i, i) + s(j, j))));
    }
    double cross = 0.0;
    for (int k = 0; k < p; ++k)
      if (k != i && e.at(i, k)) cross += omega(i, k) * s(i, k);
    const double root =
        (-cross + std::sqrt(cross * cross + 4.0 * s(i, i))) / (2.0 * s(i, i));
    worst = std::max(worst, std::abs(omega(i, i) - root));
  }
  return worst;
}

}  // namespace

TEST_CASE("edge structure bookkeeping") {
  EdgeSet edges{{0, 2, 0.9, 0.01}, {1, 2, -0.5, 0.2}};
  const EdgeStructure e = EdgeStructure::from_edges(4, edges);
  CHECK(e.at(0, 2));
  CHECK(e.at(2, 0));
  CHECK(e.at(1, 2));
  CHECK_FALSE(e.at(0, 1));
  CHECK(e.at(3, 3));
  CHECK(e.degree(2) == 2);
  CHECK(e.degree(3) == 0);
  CHECK_THROWS_AS(EdgeStructure::from_edges(2, EdgeSet{{0, 5, 0.1, 0.1}}),
                  std::invalid_argument);
}

TEST_CASE("pseudo-likelihood estimate satisfies its fixed-point equations") {
  for (unsigned t = 0; t < 20; ++t) {
    const int p = 4 + static_cast<int>(t % 7);
    const Matrix s = random_covariance(p, 900 + t);
    const EdgeStructure e = random_structure(p, 500 + t, 0.4);
    const PrecisionEstimate est = concord_estimate(s, e, 1e-10);
    CHECK(est.converged);
    CHECK(concord_residual(s, e, est.omega_hat) < 1e-6);
    // Inactive entries stay exactly zero.
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j)
        if (i != j && !e.at(i, j)) CHECK(est.omega_hat(i, j) == 0.0);
  }
}

TEST_CASE("isolated features are repadded with the reciprocal variance") {
  const int p = 5;
  const Matrix s = random_covariance(p, 31);
  EdgeStructure e = EdgeStructure::identity(p);
  e.set(0, 1, true);
  e.set(1, 0, true);  // features 2, 3, 4 are isolated
  const PrecisionEstimate est = concord_estimate(s, e, 1e-10);
  for (int i = 2; i < p; ++i) {
    CHECK(est.omega_hat(i, i) == doctest::Approx(1.0 / s(i, i)).epsilon(1e-12));
    for (int j = 0; j < p; ++j)
      if (j != i) CHECK(est.omega_hat(i, j) == 0.0);
  }
}

TEST_CASE("likelihood estimate reproduces s on the diagonal and active set") {
  for (unsigned t = 0; t < 20; ++t) {
    const int p = 4 + static_cast<int>(t % 7);
    const Matrix s = random_covariance(p, 700 + t);
    const EdgeStructure e = random_structure(p, 600 + t, 0.4);
    const PrecisionEstimate est = gaussian_estimate(s, e, 1e-11);
    CHECK(est.converged);
    for (int i = 0; i < p; ++i) {
      CHECK(est.sigma_hat(i, i) == doctest::Approx(s(i, i)).epsilon(1e-8));
      for (int j = 0; j < p; ++j) {
        if (i == j) continue;
        if (e.at(i, j))
          CHECK(std::abs(est.sigma_hat(i, j) - s(i, j)) < 1e-6);
        else
          CHECK(std::abs(est.omega_hat(i, j)) < 1e-6);
      }
    }
    // The two outputs are inverses of each other.
    CHECK((est.sigma_hat * est.omega_hat - Matrix::Identity(p, p))
              .cwiseAbs()
              .maxCoeff() < 1e-6);
  }
}

TEST_CASE("likelihood estimate with the full structure is the inverse of s") {
  const int p = 6;
  const Matrix s = random_covariance(p, 41);
  const PrecisionEstimate est =
      gaussian_estimate(s, EdgeStructure::full(p), 1e-12);
  const Matrix direct = s.llt().solve(Matrix::Identity(p, p));
  CHECK((est.omega_hat - direct).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("identity structure inverts the diagonal only") {
  const int p = 5;
  const Matrix s = random_covariance(p, 51);
  for (const auto& est :
       {concord_estimate(s, EdgeStructure::identity(p)),
        gaussian_estimate(s, EdgeStructure::identity(p))}) {
    for (int i = 0; i < p; ++i) {
      CHECK(est.omega_hat(i, i) == doctest::Approx(1.0 / s(i, i)).epsilon(1e-10));
      for (int j = 0; j < p; ++j)
        if (i != j) CHECK(est.omega_hat(i, j) == 0.0);
    }
  }
}

TEST_CASE("portfolio weights: closed form for diagonal precision") {
  Matrix omega = Matrix::Zero(3, 3);
  omega.diagonal() << 1.0, 0.5, 1.0 / 3.0;  // variances 1, 2, 3
  const Vector w = mvp_weights(omega);
  // w_i proportional to 1/sigma_ii^2: (1, 1/2, 1/3) / (11/6).
  CHECK(w(0) == doctest::Approx(6.0 / 11.0).epsilon(1e-12));
  CHECK(w(1) == doctest::Approx(3.0 / 11.0).epsilon(1e-12));
  CHECK(w(2) == doctest::Approx(2.0 / 11.0).epsilon(1e-12));
  CHECK(w.sum() == 1.0);
}

TEST_CASE("portfolio weights sum to one exactly on random precisions") {
  for (unsigned t = 0; t < 10; ++t) {
    const Matrix s = random_covariance(5 + t % 4, 60 + t);
    const Matrix omega = s.llt().solve(Matrix::Identity(s.rows(), s.rows()));
    CHECK(mvp_weights(omega).sum() == 1.0);
  }
}

TEST_CASE("non-positive normalizer is rejected") {
  Matrix omega = -Matrix::Identity(3, 3);
  CHECK_THROWS_AS(mvp_weights(omega), std::runtime_error);
}
