#include "parsec/estimation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace parsec {

EdgeStructure EdgeStructure::from_edges(int p, const EdgeSet& edges) {
  EdgeStructure e = identity(p);
  for (const auto& edge : edges) {
    if (edge.i < 0 || edge.j < 0 || edge.i >= p || edge.j >= p)
      throw std::invalid_argument("edge index out of range");
    if (edge.i == edge.j) continue;
    e.set(edge.i, edge.j, true);
    e.set(edge.j, edge.i, true);
  }
  return e;
}

EdgeStructure EdgeStructure::full(int p) {
  EdgeStructure e;
  e.p = p;
  e.adjacency.assign(static_cast<size_t>(p) * p, 1);
  return e;
}

EdgeStructure EdgeStructure::identity(int p) {
  EdgeStructure e;
  e.p = p;
  e.adjacency.assign(static_cast<size_t>(p) * p, 0);
  for (int i = 0; i < p; ++i) e.set(i, i, true);
  return e;
}

void EdgeStructure::set(int i, int j, bool v) {
  adjacency[static_cast<size_t>(i) * p + j] = v ? 1 : 0;
}

int EdgeStructure::degree(int i) const {
  int d = 0;
  for (int j = 0; j < p; ++j)
    if (j != i && at(i, j)) ++d;
  return d;
}

namespace {

void check_sample_covariance(const Matrix& s) {
  if (s.rows() != s.cols())
    throw std::invalid_argument("covariance must be square");
  for (Eigen::Index i = 0; i < s.rows(); ++i)
    if (!(s(i, i) > 0.0))
      throw std::invalid_argument("covariance diagonal must be positive (entry " +
                                  std::to_string(i + 1) + ")");
}

}  // namespace

PrecisionEstimate concord_estimate(const Matrix& s, const EdgeStructure& e,
                                   double eps, int max_iter) {
  check_sample_covariance(s);
  const int p = static_cast<int>(s.rows());
  if (e.p != p) throw std::invalid_argument("structure size mismatch");

  // Features with no neighbors decouple; drop them and repad afterwards.
  std::vector<int> active;
  for (int i = 0; i < p; ++i)
    if (e.degree(i) > 0) active.push_back(i);
  const int q = static_cast<int>(active.size());

  PrecisionEstimate result;
  result.omega_hat = Matrix::Zero(p, p);
  for (int i = 0; i < p; ++i) result.omega_hat(i, i) = 1.0 / s(i, i);
  if (q == 0) {
    result.converged = true;
    result.sigma_hat = Matrix::Zero(p, p);
    for (int i = 0; i < p; ++i) result.sigma_hat(i, i) = s(i, i);
    return result;
  }

  Matrix sr(q, q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) sr(i, j) = s(active[i], active[j]);
  std::vector<std::vector<int>> nbrs(q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j)
      if (i != j && e.at(active[i], active[j])) nbrs[i].push_back(j);

  Matrix omega = Matrix::Zero(q, q);
  for (int i = 0; i < q; ++i) omega(i, i) = 1.0 / sr(i, i);

  int iter = 0;
  for (; iter < max_iter; ++iter) {
    double max_delta = 0.0;
    // Off-diagonal coordinates, each symmetric pair updated once.
    for (int i = 0; i < q; ++i) {
      for (int j : nbrs[i]) {
        if (j < i) continue;
        double acc = omega(i, i) * sr(i, j) + omega(j, j) * sr(i, j);
        for (int k : nbrs[i])
          if (k != j) acc += omega(i, k) * sr(k, j);
        for (int k : nbrs[j])
          if (k != i) acc += omega(k, j) * sr(i, k);
        const double next = -acc / (sr(i, i) + sr(j, j));
        max_delta = std::max(max_delta, std::abs(next - omega(i, j)));
        omega(i, j) = omega(j, i) = next;
      }
    }
    // Diagonal coordinates.
    for (int i = 0; i < q; ++i) {
      double cross = 0.0;
      for (int k : nbrs[i]) cross += omega(i, k) * sr(i, k);
      const double next =
          (-cross + std::sqrt(cross * cross + 4.0 * sr(i, i))) /
          (2.0 * sr(i, i));
      max_delta = std::max(max_delta, std::abs(next - omega(i, i)));
      omega(i, i) = next;
    }
    if (max_delta <= eps) {
      result.converged = true;
      ++iter;
      break;
    }
  }
  result.iterations = iter;

  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j)
      result.omega_hat(active[i], active[j]) = omega(i, j);
  result.sigma_hat =
      result.omega_hat.partialPivLu().solve(Matrix::Identity(p, p));
  return result;
}

PrecisionEstimate gaussian_estimate(const Matrix& s, const EdgeStructure& e,
                                    double eps, int max_iter) {
  check_sample_covariance(s);
  const int p = static_cast<int>(s.rows());
  if (e.p != p) throw std::invalid_argument("structure size mismatch");

  Matrix w = s;
  std::vector<std::vector<int>> nbrs(p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      if (i != j && e.at(i, j)) nbrs[i].push_back(j);

  PrecisionEstimate result;
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    double total_delta = 0.0;
    for (int j = 0; j < p; ++j) {
      const auto& a = nbrs[j];
      Vector w12 = Vector::Zero(p);
      if (!a.empty()) {
        const int m = static_cast<int>(a.size());
        Matrix waa(m, m);
        Vector sa(m);
        for (int r = 0; r < m; ++r) {
          sa(r) = s(a[r], j);
          for (int c = 0; c < m; ++c) waa(r, c) = w(a[r], a[c]);
        }
        Vector beta = waa.ldlt().solve(sa);
        // w12 = W_{-j} beta over the active columns.
        for (int i = 0; i < p; ++i) {
          if (i == j) continue;
          double v = 0.0;
          for (int r = 0; r < m; ++r) v += w(i, a[r]) * beta(r);
          w12(i) = v;
        }
      }
      for (int i = 0; i < p; ++i) {
        if (i == j) continue;
        total_delta += std::abs(w(i, j) - w12(i));
        w(i, j) = w(j, i) = w12(i);
      }
    }
    if (total_delta <= eps) {
      result.converged = true;
      ++iter;
      break;
    }
  }
  result.iterations = iter;
  result.sigma_hat = w;

  // Recover the precision matrix from the fitted regressions.
  Matrix omega = Matrix::Zero(p, p);
  for (int j = 0; j < p; ++j) {
    const auto& a = nbrs[j];
    Vector beta = Vector::Zero(p);
    if (!a.empty()) {
      const int m = static_cast<int>(a.size());
      Matrix waa(m, m);
      Vector sa(m);
      for (int r = 0; r < m; ++r) {
        sa(r) = s(a[r], j);
        for (int c = 0; c < m; ++c) waa(r, c) = w(a[r], a[c]);
      }
      Vector b = waa.ldlt().solve(sa);
      for (int r = 0; r < m; ++r) beta(a[r]) = b(r);
    }
    double quad = 0.0;
    for (int i = 0; i < p; ++i) quad += w(i, j) * beta(i);
    const double theta_jj = 1.0 / (s(j, j) - quad);
    omega(j, j) = theta_jj;
    for (int i = 0; i < p; ++i)
      if (i != j && beta(i) != 0.0) omega(i, j) = -beta(i) * theta_jj;
  }
  result.omega_hat = 0.5 * (omega + omega.transpose());
  return result;
}

Vector mvp_weights(const Matrix& sigma_inv) {
  if (sigma_inv.rows() != sigma_inv.cols())
    throw std::invalid_argument("precision matrix must be square");
  Vector ones = Vector::Ones(sigma_inv.rows());
  Vector raw = sigma_inv * ones;
  const double normalizer = raw.sum();
  if (!(normalizer > 0.0))
    throw std::runtime_error(
        "portfolio normalizer 1' Omega 1 is not positive (" +
        std::to_string(normalizer) + ")");
  Vector w = raw / normalizer;
  // Push any remaining round-off into the largest-magnitude weight so the
  // sum is exactly 1.
  Eigen::Index top;
  w.cwiseAbs().maxCoeff(&top);
  w(top) -= w.sum() - 1.0;
  return w;
}

}  // namespace parsec
