#pragma once

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace adiaband {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

// Matrix-valued map of one real parameter (time, or position for BO models).
using MatrixFn = std::function<Matrix(double)>;

// Largest singular value.
double spectral_norm(const Matrix& m);

// ‖m − m†‖ relative to ‖m‖ (absolute when ‖m‖ is tiny).
double hermiticity_defect(const Matrix& m);

Matrix hermitian_part(const Matrix& m);

// Unitary polar factor W of m = W·S (S positive semidefinite), via SVD.
Matrix polar_unitary(const Matrix& m);

Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();

}  // namespace adiaband
