#include "parsec/simgen.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace parsec {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;
constexpr double kEdgeTol = 1e-12;

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

std::vector<std::pair<int, int>> edges_from_omega(const Matrix& omega) {
  std::vector<std::pair<int, int>> edges;
  const int p = static_cast<int>(omega.rows());
  for (int j = 0; j < p; ++j)
    for (int k = j + 1; k < p; ++k)
      if (std::abs(omega(j, k)) > kEdgeTol) edges.emplace_back(j, k);
  return edges;
}

void check_positive_definite(const Matrix& m, const char* what) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
    throw std::runtime_error(std::string(what) +
                             " is not positive definite (smallest eigenvalue " +
                             std::to_string(eig.eigenvalues()(0)) + ")");
  }
}

// Stationary autocovariances of an AR(d) process with unit innovation
// variance, from the Yule-Walker equations. Returns false when the linear
// system is unsolvable or yields a non-positive variance (e.g. a unit root).
bool yule_walker(const std::vector<double>& phi, int len,
                 std::vector<double>* r_out) {
  const int d = static_cast<int>(phi.size());
  Matrix sys = Matrix::Zero(d + 1, d + 1);
  Vector rhs = Vector::Zero(d + 1);
  // Row 0: r_0 - sum phi_i r_i = sigma^2 = 1.
  sys(0, 0) = 1.0;
  for (int i = 1; i <= d; ++i) sys(0, i) -= phi[i - 1];
  rhs(0) = 1.0;
  // Row k: r_k - sum phi_i r_{|k-i|} = 0.
  for (int k = 1; k <= d; ++k) {
    sys(k, k) += 1.0;
    for (int i = 1; i <= d; ++i) sys(k, std::abs(k - i)) -= phi[i - 1];
  }
  Eigen::FullPivLU<Matrix> lu(sys);
  if (!lu.isInvertible()) return false;
  Vector r = lu.solve(rhs);
  if (!r.allFinite() || r(0) <= 0.0) return false;
  std::vector<double> acov(len);
  for (int k = 0; k <= d && k < len; ++k) acov[k] = r(k);
  for (int k = d + 1; k < len; ++k) {
    double v = 0.0;
    for (int i = 1; i <= d; ++i) v += phi[i - 1] * acov[k - i];
    acov[k] = v;
  }
  *r_out = std::move(acov);
  return true;
}

// Exact finite-sample covariance of the AR recursion started from its own
// innovations: X_j = sum_i phi_i X_{j-i} + eps_j, X built as L eps. Used when
// the stationary solution does not exist (coefficients on the unit circle).
Matrix ar_propagation_covariance(const std::vector<double>& phi, int a) {
  const int d = static_cast<int>(phi.size());
  Matrix l = Matrix::Zero(a, a);
  for (int j = 0; j < a; ++j) {
    l(j, j) = 1.0;
    for (int i = 1; i <= d && i <= j; ++i) l.row(j) += phi[i - 1] * l.row(j - i);
  }
  Matrix sigma = l * l.transpose();
  Vector scale = sigma.diagonal().cwiseSqrt().cwiseInverse();
  return scale.asDiagonal() * sigma * scale.asDiagonal();
}

Matrix ar_block_covariance(const StructureSpec& spec) {
  const int a = spec.a;
  const int d = spec.d;
  if (a < 1) throw std::invalid_argument("block size a must be positive");
  if (d < 1) throw std::invalid_argument("AR order d must be positive");
  std::vector<double> phi(d, 0.0);
  phi[0] = spec.phi1;
  for (int i = 1; i < d; ++i) phi[i] = (1.0 - spec.phi1) / (d - 1);

  std::vector<double> acov;
  if (yule_walker(phi, a, &acov)) {
    Matrix block(a, a);
    for (int i = 0; i < a; ++i)
      for (int j = 0; j < a; ++j) block(i, j) = acov[std::abs(i - j)] / acov[0];
    Eigen::LLT<Matrix> llt(block);
    if (llt.info() == Eigen::Success) return block;
  }
  return ar_propagation_covariance(phi, a);
}

}  // namespace

CovarianceModel build_structure(const StructureSpec& spec) {
  if (spec.p < 1) throw std::invalid_argument("p must be positive");
  CovarianceModel model;
  const int p = spec.p;

  switch (spec.kind) {
    case StructureKind::Diagonal: {
      model.sigma = Matrix::Identity(p, p);
      model.omega = Matrix::Identity(p, p);
      return model;
    }
    case StructureKind::Block: {
      if (spec.a < 1 || spec.a > p)
        throw std::invalid_argument("block size a must lie in [1, p]");
      model.sigma = Matrix::Identity(p, p);
      for (int i = 0; i < spec.a; ++i)
        for (int j = 0; j < spec.a; ++j)
          if (i != j) model.sigma(i, j) = spec.rho;
      check_positive_definite(model.sigma, "block covariance");
      model.omega = model.sigma.llt().solve(Matrix::Identity(p, p));
      model.true_edges = edges_from_omega(model.omega);
      return model;
    }
    case StructureKind::ArBlock: {
      if (spec.a < 1 || spec.a > p)
        throw std::invalid_argument("block size a must lie in [1, p]");
      model.sigma = Matrix::Identity(p, p);
      model.sigma.topLeftCorner(spec.a, spec.a) = ar_block_covariance(spec);
      check_positive_definite(model.sigma, "autoregressive block covariance");
      model.omega = model.sigma.llt().solve(Matrix::Identity(p, p));
      model.true_edges = edges_from_omega(model.omega);
      return model;
    }
    case StructureKind::StarConnected:
    case StructureKind::StarDisconnected: {
      if (spec.k_stars < 1 || spec.e < 1)
        throw std::invalid_argument("star structure needs k >= 1 and e >= 1");
      if (static_cast<std::int64_t>(spec.k_stars) * (spec.e + 1) > p)
        throw std::invalid_argument("k (e + 1) exceeds p");
      model.omega = Matrix::Identity(p, p);
      for (int s = 0; s < spec.k_stars; ++s) {
        const int hub = s * (spec.e + 1);
        for (int leaf = hub + 1; leaf <= hub + spec.e; ++leaf)
          model.omega(hub, leaf) = model.omega(leaf, hub) = spec.c;
        if (spec.kind == StructureKind::StarConnected && s + 1 < spec.k_stars) {
          const int next_hub = (s + 1) * (spec.e + 1);
          model.omega(hub, next_hub) = model.omega(next_hub, hub) = spec.c;
        }
      }
      check_positive_definite(model.omega, "star inverse covariance");
      model.sigma = model.omega.llt().solve(Matrix::Identity(p, p));
      model.true_edges = edges_from_omega(model.omega);
      return model;
    }
  }
  throw std::invalid_argument("unknown structure kind");
}

Rng::Rng(std::uint64_t seed) {
  std::uint64_t s = seed;
  for (auto& word : state_) word = splitmix64(s);
}

std::uint64_t Rng::next_u64() {
  // xoshiro256++
  const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double Rng::uniform() {
  // 53 high bits -> (0, 1); never returns 0 so log() is safe.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double r = std::sqrt(-2.0 * std::log(uniform()));
  const double theta = kTwoPi * uniform();
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

double Rng::gamma(double shape) {
  if (shape < 1.0) {
    // Boost: gamma(a) = gamma(a + 1) * U^{1/a}.
    const double u = uniform();
    return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  // Marsaglia-Tsang squeeze.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double Rng::chi_squared(double nu) {
  if (!(nu > 0.0)) throw std::invalid_argument("chi-square needs nu > 0");
  return 2.0 * gamma(0.5 * nu);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t replication) {
  std::uint64_t s = seed ^ (0xD1B54A32D192ED03ULL * (replication + 1));
  splitmix64(s);
  return splitmix64(s);
}

Matrix sample_gaussian(const CovarianceModel& model, int n,
                       std::uint64_t seed) {
  const int p = static_cast<int>(model.sigma.rows());
  Eigen::LLT<Matrix> llt(model.sigma);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("covariance is not positive definite");
  Matrix chol = llt.matrixL();
  Rng rng(seed);
  Matrix x(n, p);
  Vector z(p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) z(j) = rng.normal();
    x.row(i) = (chol * z).transpose();
  }
  return x;
}

Matrix sample_mvt(const CovarianceModel& model, double nu, int n,
                  std::uint64_t seed) {
  if (!(nu > 0.0)) throw std::invalid_argument("mvt needs nu > 0");
  const int p = static_cast<int>(model.sigma.rows());
  Eigen::LLT<Matrix> llt(model.sigma);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("covariance is not positive definite");
  Matrix chol = llt.matrixL();
  Rng rng(seed);
  Matrix x(n, p);
  Vector z(p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) z(j) = rng.normal();
    const double w = rng.chi_squared(nu);
    x.row(i) = (chol * z).transpose() / std::sqrt(w / nu);
  }
  return x;
}

}  // namespace parsec
