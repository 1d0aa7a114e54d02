#include <doctest.h>

#include <random>

#include "parsec/uscore.hpp"

using namespace parsec;

namespace {

Matrix gaussian_matrix(int n, int p, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> normal;
  Matrix x(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) x(i, j) = normal(gen);
  return x;
}

// Independent correlation oracle: textbook Pearson formula per pair.
double pearson(const Matrix& x, int a, int b) {
  const int n = static_cast<int>(x.rows());
  double ma = x.col(a).mean(), mb = x.col(b).mean();
  double num = 0.0, da = 0.0, db = 0.0;
  for (int i = 0; i < n; ++i) {
    num += (x(i, a) - ma) * (x(i, b) - mb);
    da += (x(i, a) - ma) * (x(i, a) - ma);
    db += (x(i, b) - mb) * (x(i, b) - mb);
  }
  return num / std::sqrt(da * db);
}

}  // namespace

TEST_CASE("orthonormal basis: columns orthonormal and orthogonal to ones") {
  for (int n : {2, 3, 7, 30}) {
    const Matrix t = helmert_basis(n);
    REQUIRE(t.rows() == n);
    REQUIRE(t.cols() == n - 1);
    CHECK((t.transpose() * t - Matrix::Identity(n - 1, n - 1))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
    CHECK((Eigen::RowVectorXd::Ones(n) * t).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("n = 2 basis is the signed half-difference direction") {
  const Matrix t = helmert_basis(2);
  CHECK(t(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(t(1, 0) == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("standardized columns have unit norm and zero sum") {
  const Matrix x = gaussian_matrix(9, 5, 1);
  const Matrix z = standardize(x);
  for (int j = 0; j < 5; ++j) {
    CHECK(z.col(j).norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(z.col(j).sum()) < 1e-12);
  }
}

TEST_CASE("scores are invariant to per-column affine maps a x + b, a > 0") {
  const Matrix x = gaussian_matrix(8, 4, 2);
  Matrix y = 3.25 * x;
  y.array() += 17.0;
  CHECK((uscores(x) - uscores(y)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("score inner products equal sample correlations") {
  const Matrix x = gaussian_matrix(11, 6, 3);
  const Matrix u = uscores(x);
  REQUIRE(u.rows() == 10);
  for (int j = 0; j < 6; ++j) {
    CHECK(u.col(j).norm() == doctest::Approx(1.0).epsilon(1e-12));
    for (int k = j + 1; k < 6; ++k) {
      const double r = pearson(x, j, k);
      CHECK(u.col(j).dot(u.col(k)) == doctest::Approx(r).epsilon(1e-10));
      // Correlation as spherical distance: r = 1 - |U_j - U_k|^2 / 2.
      const double dist2 = (u.col(j) - u.col(k)).squaredNorm();
      CHECK(1.0 - dist2 / 2.0 == doctest::Approx(r).epsilon(1e-10));
    }
  }
}

TEST_CASE("any orthonormal basis of the centered hyperplane gives the same Gram") {
  const Matrix x = gaussian_matrix(7, 5, 4);
  const Matrix z = standardize(x);
  const int n = 7;

  // Alternative basis: QR of [1 | G] with the leading ones-column dropped.
  std::mt19937 gen(99);
  std::normal_distribution<double> normal;
  Matrix seed(n, n);
  seed.col(0).setOnes();
  for (int i = 0; i < n; ++i)
    for (int j = 1; j < n; ++j) seed(i, j) = normal(gen);
  const Matrix q = Eigen::HouseholderQR<Matrix>(seed).householderQ();
  const Matrix alt = q.rightCols(n - 1);

  const Matrix u1 = compute_uscores(z, helmert_basis(n));
  const Matrix u2 = compute_uscores(z, alt);
  CHECK((u1.transpose() * u1 - u2.transpose() * u2).cwiseAbs().maxCoeff() <
        1e-12);
}

TEST_CASE("constant column is rejected") {
  Matrix x = gaussian_matrix(6, 3, 5);
  x.col(1).setConstant(2.5);
  CHECK_THROWS_AS(standardize(x), std::runtime_error);
}
