#include "models/models.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace adiaband::models {

ParameterFamily landau_zener(double delta) {
  return ParameterFamily(
      2, [delta](double t) -> Matrix { return 0.5 * (std::tanh(t) * pauli_z() + delta * pauli_x()); },
      [](double t) -> Matrix {
        const double c = 1.0 / std::cosh(t);
        return 0.5 * c * c * pauli_z();
      });
}

ParameterFamily rotating_field(double delta, double theta, double omega) {
  const double st = std::sin(theta), ct = std::cos(theta);
  auto h = [=](double t) -> Matrix {
    return 0.5 * delta *
           (st * std::cos(omega * t) * pauli_x() + st * std::sin(omega * t) * pauli_y() +
            ct * pauli_z());
  };
  auto dh = [=](double t) -> Matrix {
    return 0.5 * delta * omega *
           (-st * std::sin(omega * t) * pauli_x() + st * std::cos(omega * t) * pauli_y());
  };
  return ParameterFamily(2, h, dh, 1.0 / omega);
}

MatrixFn rotating_field_aligned_frame(double theta, double omega) {
  return [=](double t) -> Matrix {
    Matrix v(2, 1);
    v(0, 0) = std::cos(theta / 2);
    v(1, 0) = std::exp(kI * omega * t) * std::sin(theta / 2);
    return v;
  };
}

MatrixFn rotating_field_aligned_frame_derivative(double theta, double omega) {
  return [=](double t) -> Matrix {
    Matrix v = Matrix::Zero(2, 1);
    v(1, 0) = kI * omega * std::exp(kI * omega * t) * std::sin(theta / 2);
    return v;
  };
}

Vector rotating_field_exact(double delta, double theta, double omega, double epsilon,
                            const Vector& psi0, double t) {
  // In the frame co-rotating about z the Hamiltonian is static.
  const Matrix h0 =
      0.5 * delta * (std::sin(theta) * pauli_x() + std::cos(theta) * pauli_z());
  const Matrix generator = h0 - 0.5 * epsilon * omega * pauli_z();
  const Matrix inner = (-kI * t / epsilon * generator).exp();
  const Matrix outer = (-kI * omega * t * 0.5 * pauli_z()).exp();
  return outer * inner * psi0;
}

Matrix spin_three_halves(int axis) {
  Matrix s = Matrix::Zero(4, 4);
  const double m[4] = {1.5, 0.5, -0.5, -1.5};
  for (int k = 0; k < 3; ++k) {
    // ⟨m+1|S₊|m⟩ = sqrt(s(s+1) − m(m+1))
    const double c = std::sqrt(3.75 - m[k + 1] * (m[k + 1] + 1));
    if (axis == 0) {
      s(k, k + 1) += 0.5 * c;
      s(k + 1, k) += 0.5 * c;
    } else if (axis == 1) {
      s(k, k + 1) += -0.5 * kI * c;
      s(k + 1, k) += 0.5 * kI * c;
    }
  }
  if (axis == 2)
    for (int k = 0; k < 4; ++k) s(k, k) = m[k];
  return s;
}

ParameterFamily quadrupole_spin(double theta, double omega) {
  const Matrix sx = spin_three_halves(0), sy = spin_three_halves(1), sz = spin_three_halves(2);
  const double st = std::sin(theta), ct = std::cos(theta);
  auto ns = [=](double t) -> Matrix {
    return st * std::cos(omega * t) * sx + st * std::sin(omega * t) * sy + ct * sz;
  };
  auto h = [=](double t) -> Matrix {
    const Matrix a = ns(t);
    return a * a;
  };
  auto dh = [=](double t) -> Matrix {
    const Matrix a = ns(t);
    const Matrix da = omega * (-st * std::sin(omega * t) * sx + st * std::cos(omega * t) * sy);
    return a * da + da * a;
  };
  return ParameterFamily(4, h, dh, 1.0 / omega);
}

namespace {

Matrix quadrupole_lower_basis(double theta) {
  const Matrix sx = spin_three_halves(0), sz = spin_three_halves(2);
  const Matrix ns = std::sin(theta) * sx + std::cos(theta) * sz;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(ns);
  // n·S eigenvalues −3/2, −1/2, 1/2, 3/2; the ±1/2 pair is the lower band of (n·S)².
  return solver.eigenvectors().middleCols(1, 2);
}

}  // namespace

MatrixFn quadrupole_lower_frame(double theta, double omega) {
  const Matrix psi0 = quadrupole_lower_basis(theta);
  const Matrix shifted = spin_three_halves(2) + 0.5 * Matrix::Identity(4, 4);
  return [=](double t) -> Matrix {
    Matrix phase = Matrix::Zero(4, 4);
    for (int k = 0; k < 4; ++k) phase(k, k) = std::exp(-kI * omega * t * shifted(k, k).real());
    return phase * psi0;
  };
}

Matrix quadrupole_berry_generator(double theta) {
  const Matrix psi0 = quadrupole_lower_basis(theta);
  return psi0.adjoint() * (spin_three_halves(2) + 0.5 * Matrix::Identity(4, 4)) * psi0;
}

ParameterFamily two_channel_bo(double a, double b, double c) {
  return ParameterFamily(
      2,
      [=](double q) -> Matrix {
        return Matrix(a * std::tanh(q) * pauli_z() + b * pauli_x() + c * Matrix::Identity(2, 2));
      },
      [=](double q) -> Matrix {
        const double s = 1.0 / std::cosh(q);
        return Matrix(a * s * s * pauli_z());
      });
}

ParameterFamily winding_bo(double r, double h, double k) {
  return ParameterFamily(
      2,
      [=](double q) -> Matrix {
        return Matrix(r * std::cos(k * q) * pauli_x() + r * std::sin(k * q) * pauli_y() + h * pauli_z());
      },
      [=](double q) -> Matrix {
        return Matrix(r * k * (-std::sin(k * q) * pauli_x() + std::cos(k * q) * pauli_y()));
      });
}

MatrixFn winding_aligned_frame(double r, double h, double k) {
  const double theta = std::atan2(r, h);
  return rotating_field_aligned_frame(theta, k);
}

PhaseSpaceFamily torus_model() {
  const Matrix id = Matrix::Identity(2, 2);
  return PhaseSpaceFamily(
      2,
      [=](double q, double p) -> Matrix {
        return Matrix(std::cos(q) * pauli_z() + std::sin(p) * pauli_x() + 0.5 * pauli_y() +
                      0.3 * std::sin(q + p) * id);
      },
      [=](double q, double p) -> Matrix {
        return Matrix(-std::sin(q) * pauli_z() + 0.3 * std::cos(q + p) * id);
      },
      [=](double q, double p) -> Matrix {
        return Matrix(std::cos(p) * pauli_x() + 0.3 * std::cos(q + p) * id);
      });
}

}  // namespace adiaband::models
