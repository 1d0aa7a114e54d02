#include <doctest.h>

#include <atomic>
#include <random>
#include <vector>

#include "parsec/core.hpp"
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

// Independent oracle for one row of H: regress U_j on the leave-one-out
// score matrix through an explicit SVD pseudo-inverse, then rescale each
// regressor column to unit norm in the whitened metric. Shares no code with
// the library implementation.
Vector oracle_row(const Matrix& u, int j) {
  const int p = static_cast<int>(u.cols());
  Matrix uleft(u.rows(), p - 1);
  int c = 0;
  for (int k = 0; k < p; ++k)
    if (k != j) uleft.col(c++) = u.col(k);
  const Matrix gram = uleft * uleft.transpose();
  Eigen::JacobiSVD<Matrix> svd(gram,
                               Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix ginv = svd.matrixV() *
                      svd.singularValues().cwiseInverse().asDiagonal() *
                      svd.matrixU().transpose();
  Vector row = Vector::Zero(p);
  c = 0;
  for (int k = 0; k < p; ++k) {
    if (k == j) {
      row(k) = 1.0;
      continue;
    }
    const Vector scaled = ginv * u.col(k);
    row(k) = scaled.dot(u.col(j)) / scaled.norm();
  }
  return row;
}

}  // namespace

TEST_CASE("direct evaluation matches the pseudo-inverse regression oracle") {
  const Matrix u = uscores(gaussian_matrix(8, 20, 11));
  const Matrix h = parsec_base(u);
  for (int j = 0; j < 20; ++j)
    CHECK((h.row(j).transpose() - oracle_row(u, j)).cwiseAbs().maxCoeff() <
          1e-10);
}

TEST_CASE("rank-one evaluation agrees with the direct one") {
  std::mt19937 gen(5);
  for (int t = 0; t < 10; ++t) {
    const int n = 4 + static_cast<int>(gen() % 10);
    const int p = n + static_cast<int>(gen() % 40);
    const Matrix u = uscores(gaussian_matrix(n, p, 100 + t));
    const Matrix hb = parsec_base(u);
    const Matrix hs = parsec_scalable(u);
    CHECK((hb - hs).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("output is bitwise independent of the thread count") {
  const Matrix u = uscores(gaussian_matrix(12, 80, 21));
  const Matrix h1 = parsec_scalable(u, 1);
  const Matrix h3 = parsec_scalable(u, 3);
  const Matrix h8 = parsec_scalable(u, 8);
  CHECK((h1 - h3).cwiseAbs().maxCoeff() == 0.0);
  CHECK((h1 - h8).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("streamed rows equal the dense result bitwise") {
  const Matrix u = uscores(gaussian_matrix(10, 60, 31));
  const Matrix dense = parsec_scalable(u);
  Matrix streamed = Matrix::Zero(60, 60);
  std::atomic<int> calls{0};
  parsec_scalable_rows(u, 3, [&](int row, const Vector& h_row) {
    streamed.row(row) = h_row.transpose();
    ++calls;
  });
  CHECK(calls.load() == 60);
  CHECK((dense - streamed).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("H is invariant to affine transformations of the raw data") {
  const Matrix x = gaussian_matrix(9, 30, 41);
  Matrix y = 0.5 * x;
  y.array() -= 3.0;
  const Matrix h1 = parsec_scalable(uscores(x));
  const Matrix h2 = parsec_scalable(uscores(y));
  CHECK((h1 - h2).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("direct evaluation refuses p < n") {
  const Matrix u = uscores(gaussian_matrix(10, 6, 51));
  CHECK_THROWS_AS(parsec_base(u), std::invalid_argument);
}

TEST_CASE("singular Gram matrix is reported") {
  // Fewer features than score dimensions: U U' is rank deficient.
  const Matrix u = uscores(gaussian_matrix(10, 4, 61));
  CHECK_THROWS_AS(parsec_scalable(u), std::runtime_error);
  CHECK_THROWS_AS(build_rank_one_workspace(u), std::runtime_error);
}

TEST_CASE("symmetrize modes") {
  Matrix h(3, 3);
  h << 1.0, 0.5, -0.2, 0.3, 1.0, 0.7, 0.1, -0.9, 1.0;

  const Matrix up = symmetrize(h, SymmetrizeMode::UpperTriangle);
  CHECK(up(1, 0) == 0.5);
  CHECK(up(2, 1) == 0.7);

  const Matrix mn = symmetrize(h, SymmetrizeMode::MinAbs);
  CHECK(mn(0, 1) == 0.3);
  CHECK(mn(1, 2) == 0.7);
  CHECK(mn(0, 2) == 0.1);

  const Matrix mx = symmetrize(h, SymmetrizeMode::MaxAbs);
  CHECK(mx(0, 1) == 0.5);
  CHECK(mx(1, 2) == -0.9);
  CHECK(mx(0, 2) == -0.2);

  const Matrix av = symmetrize(h, SymmetrizeMode::Average);
  CHECK(av(0, 1) == doctest::Approx(0.4));
  CHECK(av(1, 2) == doctest::Approx(-0.1));
  for (const Matrix* m : {&up, &mn, &mx, &av})
    CHECK(((*m) - m->transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("parallel_for covers every index exactly once") {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(1000, 7, [&](int begin, int end) {
    for (int i = begin; i < end; ++i) ++hits[i];
  });
  for (const auto& h : hits) CHECK(h.load() == 1);
}
