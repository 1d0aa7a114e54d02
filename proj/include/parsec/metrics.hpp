#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "parsec/types.hpp"

namespace parsec {

struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t tn = 0;
  std::int64_t fn = 0;
};

/// Classifies every upper-triangle pair (j, k) as positive iff
/// |estimate_jk| >= level, against the given truth set.
ConfusionCounts score_edges(const Matrix& estimate,
                            const std::vector<std::pair<int, int>>& truth,
                            double level);

/// Area under the ROC traced by sweeping the threshold over all distinct
/// |value|s, trapezoidal, ties credited 0.5. When fpr_cap < 1 the area over
/// FPR in [0, cap] is normalized by the cap. Throws when the truth has no
/// edge or no non-edge.
double auc(const Matrix& estimate,
           const std::vector<std::pair<int, int>>& truth,
           double fpr_cap = 1.0);

/// Matthews correlation coefficient; 0 when any denominator factor is zero.
double mcc(const ConfusionCounts& counts);

}  // namespace parsec
