#include "parsec/pcs_hub.hpp"

#include <stdexcept>

namespace parsec {

Matrix pcs_hub_matrix(const Matrix& u) {
  const int p = static_cast<int>(u.cols());
  Matrix gram = u * u.transpose();
  Eigen::LDLT<Matrix> ldlt(gram);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      ldlt.vectorD().minCoeff() <= gram.rows() * 1e-15 * ldlt.vectorD().maxCoeff())
    throw std::runtime_error("Gram matrix U U' is numerically singular");
  Matrix y = ldlt.solve(u);
  for (int j = 0; j < p; ++j) y.col(j).normalize();
  Matrix out = y.transpose() * y;
  // Exact symmetry and unit diagonal despite floating-point round-off.
  out = 0.5 * (out + out.transpose()).eval();
  out.diagonal().setOnes();
  return out;
}

}  // namespace parsec
