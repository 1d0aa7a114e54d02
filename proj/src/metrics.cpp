#include "parsec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace parsec {

ConfusionCounts score_edges(const Matrix& estimate,
                            const std::vector<std::pair<int, int>>& truth,
                            double level) {
  const int p = static_cast<int>(estimate.rows());
  std::set<std::pair<int, int>> truth_set(truth.begin(), truth.end());
  ConfusionCounts counts;
  for (int j = 0; j < p; ++j) {
    for (int k = j + 1; k < p; ++k) {
      const bool positive = std::abs(estimate(j, k)) >= level;
      const bool is_edge = truth_set.count({j, k}) > 0;
      if (positive && is_edge)
        ++counts.tp;
      else if (positive)
        ++counts.fp;
      else if (is_edge)
        ++counts.fn;
      else
        ++counts.tn;
    }
  }
  return counts;
}

double auc(const Matrix& estimate,
           const std::vector<std::pair<int, int>>& truth, double fpr_cap) {
  const int p = static_cast<int>(estimate.rows());
  if (!(fpr_cap > 0.0) || fpr_cap > 1.0)
    throw std::invalid_argument("fpr_cap must lie in (0, 1]");
  std::set<std::pair<int, int>> truth_set(truth.begin(), truth.end());

  // (score, is_edge) for every pair, swept from the largest score down.
  std::vector<std::pair<double, bool>> scored;
  scored.reserve(static_cast<size_t>(p) * (p - 1) / 2);
  std::int64_t pos = 0, neg = 0;
  for (int j = 0; j < p; ++j) {
    for (int k = j + 1; k < p; ++k) {
      const bool is_edge = truth_set.count({j, k}) > 0;
      scored.emplace_back(std::abs(estimate(j, k)), is_edge);
      (is_edge ? pos : neg)++;
    }
  }
  if (pos == 0 || neg == 0)
    throw std::invalid_argument("ROC needs at least one edge and one non-edge");

  std::sort(scored.begin(), scored.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  // Trapezoidal area; a block of tied scores is a single ROC segment, which
  // credits ties with half weight.
  const double cap = fpr_cap;
  double area = 0.0;
  double tpr = 0.0, fpr = 0.0;
  size_t i = 0;
  while (i < scored.size()) {
    size_t j = i;
    std::int64_t d_pos = 0, d_neg = 0;
    while (j < scored.size() && scored[j].first == scored[i].first) {
      (scored[j].second ? d_pos : d_neg)++;
      ++j;
    }
    double next_tpr = tpr + static_cast<double>(d_pos) / pos;
    double next_fpr = fpr + static_cast<double>(d_neg) / neg;
    if (next_fpr >= cap) {
      // Interpolate the segment up to the cap, then stop.
      const double frac = (cap - fpr) / (next_fpr - fpr);
      const double tpr_at_cap = tpr + frac * (next_tpr - tpr);
      area += 0.5 * (tpr + tpr_at_cap) * (cap - fpr);
      return area / cap;
    }
    area += 0.5 * (tpr + next_tpr) * (next_fpr - fpr);
    tpr = next_tpr;
    fpr = next_fpr;
    i = j;
  }
  // The sweep ended before the cap (only possible when cap == 1 up to
  // round-off); extend horizontally at tpr = 1.
  area += tpr * (cap - fpr);
  return area / cap;
}

double mcc(const ConfusionCounts& c) {
  const double tp = static_cast<double>(c.tp);
  const double fp = static_cast<double>(c.fp);
  const double tn = static_cast<double>(c.tn);
  const double fn = static_cast<double>(c.fn);
  const double denom =
      std::sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn));
  if (denom == 0.0) return 0.0;
  return (tp * tn - fp * fn) / denom;
}

}  // namespace parsec
