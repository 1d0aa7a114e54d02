#pragma once

#include <functional>

#include "parsec/types.hpp"

namespace parsec {

enum class SymmetrizeMode { UpperTriangle, MinAbs, MaxAbs, Average };

/// Shared workspace for the rank-one-update evaluation of H.
/// a = (U U')^{-1}, f = a U, b = U' a U; b_jj < 1 is required so the
/// leave-one-out denominators 1 - b_jj stay positive.
struct RankOneWorkspace {
  Matrix a;
  Matrix b;
  Matrix f;
};

RankOneWorkspace build_rank_one_workspace(const Matrix& u);

/// Direct per-row regression evaluation of the scaled partial-correlation
/// matrix H: row j is the inner product of U_j with the column-normalized
/// leave-one-out regression scores. Diagonal is set to 1 by convention.
/// Requires p >= n; throws when a leave-one-out Gram matrix is numerically
/// singular (reciprocal condition number below 1e-12), naming the row.
Matrix parsec_base(const Matrix& u);

/// Rank-one-update evaluation of H; agrees with parsec_base entrywise to
/// ~1e-8 and costs O(n p^2) instead of O(n^3 p). Deterministic and
/// independent of the thread count (rows write disjoint output slices).
Matrix parsec_scalable(const Matrix& u, int threads = 1);

/// Streams rows of H without materializing the p x p matrix (the per-row
/// b slice is rebuilt from f on the fly; memory stays O(n p)). Rows are
/// delivered in parallel but each index exactly once; the callback must be
/// safe for concurrent invocations on distinct rows.
void parsec_scalable_rows(
    const Matrix& u, int threads,
    const std::function<void(int row, const Vector& h_row)>& sink);

/// Combines H_jk and H_kj into a symmetric matrix. `UpperTriangle` (the
/// default elsewhere) copies the upper-triangle value to both positions.
Matrix symmetrize(const Matrix& h, SymmetrizeMode mode);

/// Runs `fn(begin, end)` over [0, count) split across `threads` workers.
/// Chunks are fixed by index, so the result of disjoint writes does not
/// depend on scheduling.
void parallel_for(int count, int threads,
                  const std::function<void(int begin, int end)>& fn);

}  // namespace parsec
