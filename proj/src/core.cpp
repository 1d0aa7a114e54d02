#include "parsec/core.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace parsec {

void parallel_for(int count, int threads,
                  const std::function<void(int begin, int end)>& fn) {
  if (count <= 0) return;
  if (threads < 1) threads = 1;
  if (threads > count) threads = count;
  if (threads == 1) {
    fn(0, count);
    return;
  }
  // Fixed index chunks so disjoint writes never depend on scheduling.
  std::vector<std::thread> workers;
  workers.reserve(threads);
  const int chunk = (count + threads - 1) / threads;
  std::vector<std::exception_ptr> errors(threads);
  for (int t = 0; t < threads; ++t) {
    const int begin = t * chunk;
    const int end = std::min(count, begin + chunk);
    if (begin >= end) break;
    workers.emplace_back([&, t, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

Matrix parsec_base(const Matrix& u) {
  const int m = static_cast<int>(u.rows());  // n - 1
  const int p = static_cast<int>(u.cols());
  const int n = m + 1;
  if (p < n)
    throw std::invalid_argument("direct evaluation requires p >= n (got p = " +
                                std::to_string(p) + ", n = " +
                                std::to_string(n) + ")");
  Matrix h = Matrix::Zero(p, p);
  Matrix uleft(m, p - 1);
  for (int j = 0; j < p; ++j) {
    // Leave-one-out Gram matrix M = U^{-j} (U^{-j})'.
    int col = 0;
    for (int k = 0; k < p; ++k)
      if (k != j) uleft.col(col++) = u.col(k);
    Matrix gram = uleft * uleft.transpose();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
    const double lo = eig.eigenvalues()(0);
    const double hi = eig.eigenvalues()(m - 1);
    if (!(hi > 0.0) || lo / hi < 1e-12)
      throw std::runtime_error(
          "leave-one-out Gram matrix is numerically singular at feature " +
          std::to_string(j + 1));
    Matrix ginv = eig.eigenvectors() *
                  eig.eigenvalues().cwiseInverse().asDiagonal() *
                  eig.eigenvectors().transpose();
    for (int k = 0; k < p; ++k) {
      if (k == j) continue;
      Vector scaled = ginv * u.col(k);
      h(j, k) = scaled.dot(u.col(j)) / scaled.norm();
    }
    h(j, j) = 1.0;
  }
  return h;
}

RankOneWorkspace build_rank_one_workspace(const Matrix& u) {
  RankOneWorkspace ws;
  Matrix gram = u * u.transpose();
  Eigen::LDLT<Matrix> ldlt(gram);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      ldlt.vectorD().minCoeff() <= gram.rows() * 1e-15 * ldlt.vectorD().maxCoeff())
    throw std::runtime_error("Gram matrix U U' is numerically singular");
  ws.a = ldlt.solve(Matrix::Identity(gram.rows(), gram.rows()));
  ws.f = ws.a * u;
  ws.b = u.transpose() * ws.f;
  return ws;
}

namespace {

// H_{jk} from the shared projections: g = B_{jk} / (1 - B_jj), then scale by
// the norm of the leave-one-out score F_k + g F_j.
inline double rank_one_entry(const Matrix& f, double b_jk, double denom_j,
                             int j, int k) {
  const double g = b_jk / denom_j;
  if (g == 0.0) return 0.0;
  return g / (f.col(k) + g * f.col(j)).norm();
}

inline double checked_denominator(double b_jj, int j) {
  const double denom = 1.0 - b_jj;
  if (denom <= 1e-12)
    throw std::runtime_error(
        "leave-one-out denominator vanished at feature " + std::to_string(j + 1) +
        " (feature lies in the span of the others)");
  return denom;
}

}  // namespace

Matrix parsec_scalable(const Matrix& u, int threads) {
  // Assemble through the row-streaming path so that the dense and the
  // low-memory evaluation are bitwise identical by construction.
  const int p = static_cast<int>(u.cols());
  Matrix h(p, p);
  parsec_scalable_rows(u, threads, [&](int j, const Vector& h_row) {
    h.row(j) = h_row.transpose();
  });
  return h;
}

void parsec_scalable_rows(
    const Matrix& u, int threads,
    const std::function<void(int row, const Vector& h_row)>& sink) {
  const int p = static_cast<int>(u.cols());
  Matrix gram = u * u.transpose();
  Eigen::LDLT<Matrix> ldlt(gram);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      ldlt.vectorD().minCoeff() <= gram.rows() * 1e-15 * ldlt.vectorD().maxCoeff())
    throw std::runtime_error("Gram matrix U U' is numerically singular");
  Matrix f = ldlt.solve(u);  // (n-1) x p; the p x p cross-product is never built
  Vector b_diag(p);
  for (int j = 0; j < p; ++j) b_diag(j) = u.col(j).dot(f.col(j));

  parallel_for(p, threads, [&](int begin, int end) {
    Vector b_row(p), h_row(p);
    for (int j = begin; j < end; ++j) {
      const double denom = checked_denominator(b_diag(j), j);
      b_row.noalias() = f.transpose() * u.col(j);
      for (int k = 0; k < p; ++k) {
        if (k == j) continue;
        h_row(k) = rank_one_entry(f, b_row(k), denom, j, k);
      }
      h_row(j) = 1.0;
      sink(j, h_row);
    }
  });
}

Matrix symmetrize(const Matrix& h, SymmetrizeMode mode) {
  const int p = static_cast<int>(h.rows());
  Matrix out(p, p);
  out.diagonal() = h.diagonal();
  for (int j = 0; j < p; ++j) {
    for (int k = j + 1; k < p; ++k) {
      const double up = h(j, k);
      const double lo = h(k, j);
      double v = 0.0;
      switch (mode) {
        case SymmetrizeMode::UpperTriangle:
          v = up;
          break;
        case SymmetrizeMode::MinAbs:
          v = std::abs(up) <= std::abs(lo) ? up : lo;
          break;
        case SymmetrizeMode::MaxAbs:
          v = std::abs(up) >= std::abs(lo) ? up : lo;
          break;
        case SymmetrizeMode::Average:
          v = 0.5 * (up + lo);
          break;
      }
      out(j, k) = out(k, j) = v;
    }
  }
  return out;
}

}  // namespace parsec
