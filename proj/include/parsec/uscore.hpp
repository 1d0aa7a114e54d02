#pragma once

#include "parsec/types.hpp"

namespace parsec {

/// Column-standardizes an n x p data matrix: each column is centered and
/// divided by sqrt(S_jj * (n-1)), so every column has unit Euclidean norm and
/// zero sum. Throws on a zero-variance column.
Matrix standardize(const Matrix& x);

/// Deterministic n x (n-1) orthonormal basis of the hyperplane orthogonal to
/// the all-ones vector (Helmert construction). Requires n >= 2.
Matrix helmert_basis(int n);

/// Projects standardized scores onto the sphere S_{n-2}: U = T' * Z, an
/// (n-1) x p matrix of unit-norm columns whose inner products are exactly the
/// sample correlations.
Matrix compute_uscores(const Matrix& z, const Matrix& basis);

/// Convenience: standardize + Helmert projection in one call.
Matrix uscores(const Matrix& x);

}  // namespace parsec
