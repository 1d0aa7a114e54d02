#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "parsec/types.hpp"

namespace parsec {

enum class StructureKind {
  Diagonal,
  ArBlock,
  Block,
  StarConnected,
  StarDisconnected
};

struct StructureSpec {
  StructureKind kind = StructureKind::Diagonal;
  int p = 0;
  int a = 0;          // block size (ar_block / block)
  int d = 1;          // AR order
  double phi1 = 0.0;  // first-lag coefficient
  double rho = 0.0;   // block correlation
  int k_stars = 0;
  int e = 0;          // leaves per star
  double c = 0.0;     // inverse-covariance entry value in star structures
};

struct CovarianceModel {
  Matrix sigma;
  Matrix omega;
  std::vector<std::pair<int, int>> true_edges;  // (j, k) with j < k, 0-based
};

/// Builds the covariance (and its inverse plus the true partial-correlation
/// edge set) for the requested structure. Throws when the assembled matrix is
/// not positive definite, reporting the smallest eigenvalue.
CovarianceModel build_structure(const StructureSpec& spec);

/// n i.i.d. mean-zero Gaussian rows with covariance sigma, generated as
/// Cholesky factor times standard-normal draws. Fully determined by the seed.
Matrix sample_gaussian(const CovarianceModel& model, int n,
                       std::uint64_t seed);

/// Multivariate-t rows: (chol(sigma) z) / sqrt(w / nu), z standard normal,
/// w chi-square(nu).
Matrix sample_mvt(const CovarianceModel& model, double nu, int n,
                  std::uint64_t seed);

/// Seed for replication r, derived so replications can run in parallel with
/// reproducible aggregates.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t replication);

/// Deterministic RNG used throughout simulation (splitmix-seeded xoshiro-like
/// core with hand-rolled normal/gamma transforms, so output is identical
/// across standard library implementations).
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  double uniform();         // (0, 1)
  double normal();          // standard normal, Box-Muller
  double chi_squared(double nu);

 private:
  double gamma(double shape);  // scale 1, Marsaglia-Tsang

  std::uint64_t state_[4];
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace parsec
