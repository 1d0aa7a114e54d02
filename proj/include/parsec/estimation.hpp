#pragma once

#include <vector>

#include "parsec/types.hpp"

namespace parsec {

/// Screened partial-correlation structure: p x p symmetric adjacency with a
/// true diagonal.
struct EdgeStructure {
  int p = 0;
  std::vector<char> adjacency;  // row-major p*p

  static EdgeStructure from_edges(int p, const EdgeSet& edges);
  static EdgeStructure full(int p);
  static EdgeStructure identity(int p);

  bool at(int i, int j) const { return adjacency[static_cast<size_t>(i) * p + j] != 0; }
  void set(int i, int j, bool v);
  int degree(int i) const;  // off-diagonal neighbors
};

struct PrecisionEstimate {
  Matrix omega_hat;
  Matrix sigma_hat;
  bool converged = false;
  int iterations = 0;
};

/// Pseudo-likelihood coordinate descent restricted to the active edges.
/// Isolated features are removed before the sweeps and repadded afterwards
/// with 1/s_ii on the diagonal. At convergence every coordinate update
/// equation is a fixed point within eps.
PrecisionEstimate concord_estimate(const Matrix& s, const EdgeStructure& e,
                                   double eps = 1e-8, int max_iter = 10000);

/// Gaussian-likelihood coordinate descent: per-feature partitioned solve of
/// W11* beta = s12* on active edges. At convergence sigma_hat matches s on
/// the diagonal and all active off-diagonal positions.
PrecisionEstimate gaussian_estimate(const Matrix& s, const EdgeStructure& e,
                                    double eps = 1e-8, int max_iter = 10000);

/// Analytic minimum-variance portfolio weights w = Omega 1 / (1' Omega 1),
/// renormalized so the weights sum to 1 exactly. Throws when the normalizer
/// is not positive.
Vector mvp_weights(const Matrix& sigma_inv);

}  // namespace parsec
