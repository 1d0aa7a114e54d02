#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace parsec {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// A screened discovery: pair (i, j) with i < j (0-based), the estimated
/// statistic and its marginal p-value.
struct Edge {
  int i = 0;
  int j = 0;
  double statistic = 0.0;
  double p_value = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

using EdgeSet = std::vector<Edge>;

/// Sorts edges by ascending p-value, ties broken by (i, j).
void sort_edges(EdgeSet& edges);

}  // namespace parsec
