#pragma once

#include <optional>
#include <string>
#include <vector>

#include "parsec/types.hpp"

namespace parsec {

/// Raw n x p observations, rows = samples, columns = features.
struct DataMatrix {
  Matrix values;
  std::vector<std::string> column_names;  // empty when the file had no header

  int n() const { return static_cast<int>(values.rows()); }
  int p() const { return static_cast<int>(values.cols()); }
};

struct LoadResult {
  DataMatrix data;
  int rows_dropped = 0;  // rows removed because of missing/non-numeric cells
};

/// Reads a delimited numeric table. Rows containing any missing or
/// non-numeric cell are dropped (the count is reported in the result).
/// Throws std::runtime_error when the file is unreadable, fewer than 3
/// complete rows remain, or a column has zero sample variance.
LoadResult load_matrix(const std::string& path, char delimiter = ',',
                       bool has_header = true);

/// Writes edges as CSV with header `i,j,statistic,p_value` (1-based indices),
/// sorted by ascending p-value then (i, j). Values are formatted with 17
/// significant digits so a re-read reproduces them exactly.
void write_edges(const EdgeSet& edges, const std::string& path);

EdgeSet read_edges(const std::string& path);

/// Writes a dense matrix as CSV at 17 significant digits.
void write_matrix_csv(const Matrix& m, const std::string& path,
                      const std::vector<std::string>& header = {});

/// Formats a double with 17 significant digits (round-trip exact).
std::string format_double(double v);

}  // namespace parsec
