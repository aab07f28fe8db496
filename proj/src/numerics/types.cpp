#include "numerics/types.hpp"

#include <algorithm>

namespace adiaband {

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  if (std::min(m.rows(), m.cols()) <= 16) {
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
  }
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double hermiticity_defect(const Matrix& m) {
  const double scale = spectral_norm(m);
  const double diff = spectral_norm(m - m.adjoint());
  return scale > 1.0 ? diff / scale : diff;
}

Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

Matrix polar_unitary(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

Matrix pauli_x() {
  Matrix s(2, 2);
  s << 0.0, 1.0, 1.0, 0.0;
  return s;
}

Matrix pauli_y() {
  Matrix s(2, 2);
  s << 0.0, -kI, kI, 0.0;
  return s;
}

Matrix pauli_z() {
  Matrix s(2, 2);
  s << 1.0, 0.0, 0.0, -1.0;
  return s;
}

}  // namespace adiaband
