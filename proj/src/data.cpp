#include "parsec/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace parsec {

namespace {

std::vector<std::string> split(const std::string& line, char delimiter) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, delimiter)) cells.push_back(cell);
  if (!line.empty() && line.back() == delimiter) cells.emplace_back();
  return cells;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_cell(const std::string& raw, double* out) {
  const std::string s = trim(raw);
  if (s.empty()) return false;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return false;
  if (!std::isfinite(v)) return false;
  *out = v;
  return true;
}

}  // namespace

void sort_edges(EdgeSet& edges) {
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    if (a.p_value != b.p_value) return a.p_value < b.p_value;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

LoadResult load_matrix(const std::string& path, char delimiter,
                       bool has_header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);

  LoadResult result;
  std::string line;
  std::vector<std::vector<double>> rows;
  size_t width = 0;
  bool first_line = true;

  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto cells = split(line, delimiter);
    if (first_line) {
      first_line = false;
      width = cells.size();
      if (has_header) {
        for (auto& c : cells) result.data.column_names.push_back(trim(c));
        continue;
      }
    }
    if (cells.size() != width)
      throw std::runtime_error("ragged row in " + path + ": expected " +
                               std::to_string(width) + " cells, got " +
                               std::to_string(cells.size()));
    std::vector<double> row(width);
    bool complete = true;
    for (size_t c = 0; c < width; ++c) {
      if (!parse_cell(cells[c], &row[c])) {
        complete = false;
        break;
      }
    }
    if (complete)
      rows.push_back(std::move(row));
    else
      ++result.rows_dropped;
  }

  if (width == 0) throw std::runtime_error("empty table: " + path);
  if (rows.size() < 3)
    throw std::runtime_error("fewer than 3 complete rows in " + path + " (" +
                             std::to_string(rows.size()) + " usable, " +
                             std::to_string(result.rows_dropped) + " dropped)");

  const int n = static_cast<int>(rows.size());
  const int p = static_cast<int>(width);
  result.data.values.resize(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) result.data.values(i, j) = rows[i][j];

  for (int j = 0; j < p; ++j) {
    const double mean = result.data.values.col(j).mean();
    const double ss = (result.data.values.col(j).array() - mean).square().sum();
    if (ss <= 0.0) {
      std::string name = result.data.column_names.empty()
                             ? ("column " + std::to_string(j + 1))
                             : ("column '" + result.data.column_names[j] + "'");
      throw std::runtime_error("zero sample variance in " + name);
    }
  }
  return result;
}

void write_edges(const EdgeSet& edges, const std::string& path) {
  EdgeSet sorted = edges;
  sort_edges(sorted);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << "i,j,statistic,p_value\n";
  for (const auto& e : sorted) {
    out << (e.i + 1) << ',' << (e.j + 1) << ',' << format_double(e.statistic)
        << ',' << format_double(e.p_value) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

EdgeSet read_edges(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty edge file: " + path);
  EdgeSet edges;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto cells = split(line, ',');
    if (cells.size() != 4)
      throw std::runtime_error("malformed edge row in " + path);
    Edge e;
    e.i = std::stoi(cells[0]) - 1;
    e.j = std::stoi(cells[1]) - 1;
    e.statistic = std::stod(cells[2]);
    e.p_value = std::stod(cells[3]);
    edges.push_back(e);
  }
  return edges;
}

void write_matrix_csv(const Matrix& m, const std::string& path,
                      const std::vector<std::string>& header) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  if (!header.empty()) {
    for (size_t j = 0; j < header.size(); ++j)
      out << (j ? "," : "") << header[j];
    out << '\n';
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      out << (j ? "," : "") << format_double(m(i, j));
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace parsec
