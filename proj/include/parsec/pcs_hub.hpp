#pragma once

#include "parsec/types.hpp"

namespace parsec {

/// Baseline estimator: the standardized Moore-Penrose partial-correlation
/// matrix P = Y'Y, where the columns of Y are the unit-normalized columns of
/// (U U')^{-1} U. Symmetric with unit diagonal; throws when U U' is singular.
Matrix pcs_hub_matrix(const Matrix& u);

}  // namespace parsec
