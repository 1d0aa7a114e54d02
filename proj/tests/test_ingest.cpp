#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "parsec/data.hpp"

using namespace parsec;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) {
    path = (std::filesystem::temp_directory_path() / name).string();
  }
  ~TempFile() { std::remove(path.c_str()); }
  void write(const std::string& content) const {
    std::ofstream out(path);
    out << content;
  }
};

}  // namespace

TEST_CASE("csv with header loads with names and values preserved") {
  TempFile f("ingest_basic.csv");
  f.write("a,b,c\n1,2,3\n4,5,6\n7,8,9.5\n-1,0.25,2\n");
  const LoadResult r = load_matrix(f.path);
  CHECK(r.data.n() == 4);
  CHECK(r.data.p() == 3);
  CHECK(r.rows_dropped == 0);
  CHECK(r.data.column_names == std::vector<std::string>{"a", "b", "c"});
  CHECK(r.data.values(0, 0) == 1.0);
  CHECK(r.data.values(2, 2) == 9.5);
  CHECK(r.data.values(3, 1) == 0.25);
}

TEST_CASE("rows with missing or non-numeric cells are dropped and counted") {
  TempFile f("ingest_missing.csv");
  f.write("a,b,c\n1,2,3\n4,,6\n7,8,9\n1,3,2\n5,1,4\n");
  const LoadResult r = load_matrix(f.path);
  CHECK(r.data.n() == 4);
  CHECK(r.rows_dropped == 1);

  TempFile g("ingest_nonnum.csv");
  g.write("a,b\n1,2\nx,3\n4,5\n2,9\n");
  const LoadResult r2 = load_matrix(g.path);
  CHECK(r2.data.n() == 3);
  CHECK(r2.rows_dropped == 1);
}

TEST_CASE("constant column is rejected with its name") {
  TempFile f("ingest_const.csv");
  f.write("a,b\n1,7\n2,7\n3,7\n");
  CHECK_THROWS_WITH_AS(load_matrix(f.path),
                       doctest::Contains("column 'b'"), std::runtime_error);
}

TEST_CASE("too few complete rows is an error") {
  TempFile f("ingest_short.csv");
  f.write("a,b\n1,2\n3,4\n");
  CHECK_THROWS_AS(load_matrix(f.path), std::runtime_error);
}

TEST_CASE("edge round-trip: empty set gives a header-only file") {
  TempFile f("edges_empty.csv");
  write_edges({}, f.path);
  std::ifstream in(f.path);
  std::string line;
  CHECK(std::getline(in, line));
  CHECK(line == "i,j,statistic,p_value");
  CHECK_FALSE(std::getline(in, line));
  CHECK(read_edges(f.path).empty());
}

TEST_CASE("edge round-trip: single edge is exact") {
  TempFile f("edges_one.csv");
  const EdgeSet edges{{0, 1, 0.9, 1e-4}};  // (1,2) in file coordinates
  write_edges(edges, f.path);
  CHECK(read_edges(f.path) == edges);
}

TEST_CASE("edge round-trip: 100 random edges, sorted by p-value") {
  TempFile f("edges_many.csv");
  std::mt19937 gen(42);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  EdgeSet edges;
  for (int t = 0; t < 100; ++t) {
    const int i = static_cast<int>(gen() % 50);
    edges.push_back({i, i + 1 + static_cast<int>(gen() % 20), unif(gen),
                     unif(gen)});
  }
  write_edges(edges, f.path);
  const EdgeSet back = read_edges(f.path);

  EdgeSet expected = edges;  // independent sort oracle
  std::sort(expected.begin(), expected.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.p_value, a.i, a.j) < std::tie(b.p_value, b.i, b.j);
  });
  CHECK(back == expected);
}

TEST_CASE("matrix write then load is the identity on values") {
  TempFile f("matrix_roundtrip.csv");
  Matrix m(4, 3);
  m << 1.0, 2.0, 3.5, -0.125, 1e-17, 2.25, 0.1, 0.2, 0.3, 7.0, 8.0, 9.0;
  write_matrix_csv(m, f.path, {"x", "y", "z"});
  const LoadResult r = load_matrix(f.path);
  CHECK((r.data.values - m).cwiseAbs().maxCoeff() == 0.0);
}
