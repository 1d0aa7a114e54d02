#include "parsec/uscore.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace parsec {

Matrix standardize(const Matrix& x) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  if (n < 2) throw std::invalid_argument("standardize needs at least 2 rows");
  Matrix z(n, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double mean = x.col(j).mean();
    Vector centered = x.col(j).array() - mean;
    const double norm = centered.norm();  // sqrt(S_jj (n-1))
    if (norm <= 0.0)
      throw std::runtime_error("zero sample variance in column " +
                               std::to_string(j + 1));
    z.col(j) = centered / norm;
  }
  return z;
}

Matrix helmert_basis(int n) {
  if (n < 2) throw std::invalid_argument("helmert_basis needs n >= 2");
  Matrix t = Matrix::Zero(n, n - 1);
  for (int c = 1; c <= n - 1; ++c) {
    const double s = 1.0 / std::sqrt(static_cast<double>(c) * (c + 1));
    for (int i = 0; i < c; ++i) t(i, c - 1) = s;
    t(c, c - 1) = -c * s;
  }
  return t;
}

Matrix compute_uscores(const Matrix& z, const Matrix& basis) {
  if (basis.rows() != z.rows() || basis.cols() != z.rows() - 1)
    throw std::invalid_argument("basis shape does not match data");
  return basis.transpose() * z;
}

Matrix uscores(const Matrix& x) {
  return compute_uscores(standardize(x), helmert_basis(static_cast<int>(x.rows())));
}

}  // namespace parsec
