#include <cmath>
#include <numbers>

#include "doctest.h"
#include "harness/fit.hpp"
#include "models/models.hpp"
#include "numerics/errors.hpp"
#include "numerics/ode.hpp"
#include "space_adiabatic/space_adiabatic.hpp"

using namespace adiaband;

namespace {

const std::vector<double> kEpsilons{0.1, 0.05, 0.025, 0.0125};

FrameField twisted(const FrameField& f, double kappa) {
  return f.with_gauge_rotation([kappa](double q) -> Matrix {
    return Matrix::Constant(1, 1, std::exp(kI * kappa * std::sin(q)));
  });
}

BOModel two_channel(double eps, const PositionGrid& grid, double kappa = 0.0) {
  const auto v = models::two_channel_bo(1.0, 0.5);
  auto frames = bo_transport_frames(v, BandSelection::contiguous(0, 1), grid);
  if (kappa != 0.0) frames = twisted(frames, kappa);
  return BOModel{frames, eps, grid};
}

PhaseSpaceFrame torus_frames() {
  const auto fam = models::torus_model();
  Eigen::SelfAdjointEigenSolver<Matrix> sy(pauli_y());
  return PhaseSpaceFrame::reference(fam, BandSelection::contiguous(0, 1), sy.eigenvectors().col(0));
}

}  // namespace

TEST_CASE("generic effective symbol: constant frame has no first-order term") {
  const PhaseSpaceFamily fam(2, [](double q, double p) -> Matrix {
    return Matrix((q * q + p * p) * Matrix::Identity(2, 2) + pauli_z());
  });
  const auto frames =
      PhaseSpaceFrame::reference(fam, BandSelection::contiguous(0, 1), Matrix(Vector::Unit(2, 1)));
  const SpaceAdiabaticProblem prob{frames, 0.1, PositionGrid(8.0, 32)};
  for (double q : {-1.0, 0.5})
    for (double p : {-0.3, 2.0}) {
      const auto pt = frames.at(q, p);
      CHECK(spectral_norm(first_order_coefficient(pt)) <= 1e-9);
      CHECK(std::abs(effective_symbol(prob, 1)(q, p)(0, 0) - (q * q + p * p - 1.0)) <= 1e-9);
    }
}

TEST_CASE("generic effective symbol: Hermitian values and isometric intertwiner on the torus model") {
  const auto frames = torus_frames();
  const SpaceAdiabaticProblem prob{frames, 0.05, PositionGrid(4 * std::numbers::pi, 64)};
  const auto u0 = intertwiner_symbol(prob);
  for (double q : {-2.0, 0.1, 1.3})
    for (double p : {-1.0, 0.4, 2.5}) {
      const auto pt = frames.at(q, p);
      const Matrix c = first_order_coefficient(pt);
      CHECK(std::abs(c(0, 0).imag()) <= 1e-8);
      const Matrix u = u0(q, p);
      CHECK(spectral_norm(u.adjoint() * u - Matrix::Identity(1, 1)) <= 1e-12);
      CHECK(spectral_norm(u * u.adjoint() - pt.projector) <= 1e-9);
    }
}

TEST_CASE("generic effective symbol: quantized intertwiner is isometric to leading order") {
  const auto frames = torus_frames();
  const PositionGrid grid(4 * std::numbers::pi, 256);
  Vector one = Vector::Ones(1);
  std::vector<double> defect;
  for (double eps : kEpsilons) {
    const SpaceAdiabaticProblem prob{frames, eps, grid};
    const Matrix u = weyl_quantize(intertwiner_symbol(prob), grid, eps).matrix;
    const auto chi = gaussian_state(grid, 0.0, 0.5, 1.0, eps, one);
    GridState d = chi;
    d.values = u.adjoint() * (u * chi.values) - chi.values;
    defect.push_back(d.norm());
  }
  INFO(defect[0] << " " << defect[3]);
  CHECK(fit_order(kEpsilons, defect).slope >= 0.8);
}

TEST_CASE("BO consistency: the generic bracket term reduces to −pA") {
  const PositionGrid grid(16.0, 128);
  for (double kappa : {0.0, 0.5}) {
    const auto bo = two_channel(0.05, grid, kappa);
    const auto generic = bo_phase_space_frame(bo);
    double worst = 0;
    for (double q = -6.0; q <= 6.0; q += 0.37)
      for (double p = -2.0; p <= 2.0; p += 0.31) {
        const Matrix g = first_order_coefficient(generic.at(q, p));
        const Matrix b = bo_terms(bo.frames.at(q), p).first;
        worst = std::max(worst, spectral_norm(g - b));
      }
    CHECK(worst <= 1e-8);
  }
}

TEST_CASE("Berry connection: real two-channel gauge and winding holonomy") {
  const PositionGrid grid(16.0, 128);
  for (const auto& a : berry_connection(two_channel(0.1, grid))) CHECK(std::abs(a(0, 0)) <= 1e-12);

  const double r = 1.0, h = 0.6;
  const auto v = models::winding_bo(r, h);
  const PositionGrid loop(2 * std::numbers::pi, 64);
  const BOModel bo{FrameField::model_supplied(v, BandSelection::contiguous(1, 1),
                                              models::winding_aligned_frame(r, h)),
                   0.1, loop};
  double integral = 0;
  for (const auto& a : berry_connection(bo)) {
    CHECK(std::abs(a(0, 0).imag()) <= 1e-9);
    integral += a(0, 0).real() * loop.dx();
  }
  const double solid_angle = 2 * std::numbers::pi * (1 - h / std::hypot(r, h));
  CHECK(std::abs(integral + 0.5 * solid_angle) <= 1e-5);

  const auto pt = FrameField::parallel_transport(v, BandSelection::contiguous(1, 1),
                                                 linspace(0, 2 * std::numbers::pi, 4001));
  const auto* f = pt.transported();
  const Complex overlap = (f->frames.front().adjoint() * f->frames.back())(0, 0);
  CHECK(std::abs(std::arg(overlap) + 0.5 * solid_angle) <= 1e-5);
}

TEST_CASE("BO effective symbol: constant potential and term-by-term assembly") {
  const PositionGrid grid(16.0, 64);
  const ParameterFamily flat(2, [](double) -> Matrix { return Matrix(pauli_z() + 0.25 * Matrix::Identity(2, 2)); });
  const BOModel trivial{bo_transport_frames(flat, BandSelection::contiguous(0, 1), grid), 0.1, grid};
  for (int order = 0; order <= 2; ++order)
    CHECK(std::abs(bo_effective_value(trivial.frames.at(0.3), 1.7, 0.1, order)(0, 0) -
                   (0.5 * 1.7 * 1.7 - 0.75)) <= 1e-12);

  // Hand assembly for a·tanh σ_z + b σ_x, lower band, real gauge.
  const double a = 1.0, b = 0.5, q = 0.4, p = 0.9, eps = 0.05;
  const auto bo = two_channel(eps, grid);
  const double t = std::tanh(q), sech2 = 1.0 / std::pow(std::cosh(q), 2);
  const double rr = std::sqrt(a * a * t * t + b * b);
  const double dtheta = -a * b * sech2 / (rr * rr);
  const double w = 0.25 * dtheta * dtheta;  // ‖∂ψ‖²
  const double expected = 0.5 * p * p - rr + eps * eps * (0.5 * w - p * p * w / (2 * rr));
  CHECK(std::abs(bo_effective_value(bo.frames.at(q), p, eps, 2)(0, 0) - expected) <= 1e-9);
  CHECK(std::abs(bo_effective_value(bo.frames.at(q), p, eps, 1)(0, 0) - (0.5 * p * p - rr)) <= 1e-12);
}

TEST_CASE("BO intertwiner: constant potential, p = 0 slice, isometry defect on a packet") {
  const PositionGrid grid(16.0, 128);
  const ParameterFamily flat(2, [](double) -> Matrix { return pauli_z(); });
  const BOModel trivial{bo_transport_frames(flat, BandSelection::contiguous(0, 1), grid), 0.1, grid};
  const Matrix u = weyl_quantize(bo_intertwiner_symbol(trivial), grid, 0.1).matrix;
  CHECK(spectral_norm(u.adjoint() * u - Matrix::Identity(u.cols(), u.cols())) <= 1e-12);

  const auto bo = two_channel(0.1, grid);
  for (double q : {-1.0, 0.0, 2.0}) {
    const auto pt = bo.frames.at(q);
    CHECK(spectral_norm(bo_intertwiner_value(pt, 0.0, 0.1, 1) - pt.frame) <= 1e-15);
  }

  std::vector<double> defect;
  Vector one = Vector::Ones(1);
  for (double eps : kEpsilons) {
    const auto m = two_channel(eps, PositionGrid(16.0, 256));
    const auto chi = gaussian_state(m.grid, -1.0, 0.5, 1.0, eps, one);
    const Matrix q = weyl_quantize(bo_intertwiner_symbol(m), m.grid, eps).matrix;
    GridState d = chi;
    d.values = q.adjoint() * (q * chi.values) - chi.values;
    defect.push_back(d.norm());
  }
  INFO(defect[0] << " " << defect[3]);
  CHECK(fit_order(kEpsilons, defect).slope >= 1.8);
}

TEST_CASE("BO propagation: scalar channel is reproduced exactly") {
  const PositionGrid grid(16.0, 128);
  const ParameterFamily v(1, [](double q) -> Matrix { return Matrix::Constant(1, 1, 0.3 * std::tanh(q)); });
  const BOModel bo{bo_transport_frames(v, BandSelection::contiguous(0, 1), grid), 0.05, grid};
  Vector one = Vector::Ones(1);
  const auto chi = gaussian_state(grid, -1.0, 0.2, 1.0, 0.05, one);
  SplitStepOptions opt;
  opt.dt = 2.5e-4;
  const auto r = propagate_and_compare(bo, chi, 1.0, {2, 1}, opt);
  CHECK(r.error <= 1e-6);
  CHECK(r.leakage <= 1e-12);
  CHECK(r.norm_drift <= 1e-9);
}

TEST_CASE("BO propagation: second order beats leading order on the two-channel model") {
  const PositionGrid grid(16.0, 256);
  Vector one = Vector::Ones(1);
  const auto bo = two_channel(0.05, grid);
  const auto chi = gaussian_state(grid, -1.0, 0.0, 1.0, 0.05, one);
  const auto second = propagate_and_compare(bo, chi, 1.0, {2, 1});
  const auto leading = propagate_and_compare(bo, chi, 1.0, {1, 0});
  CHECK(second.error < 0.1 * leading.error);
  CHECK(second.norm_drift <= 1e-9);
  CHECK(second.leakage > 0.0);
}
