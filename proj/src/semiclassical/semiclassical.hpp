#pragma once

#include <functional>
#include <span>
#include <vector>

#include "numerics/ode.hpp"

namespace adiaband {

using Vec2 = Eigen::Vector2d;

struct Units {
  double hbar = 1.0;
  double c = 1.0;
  double charge = 1.0;
  double mass = 1.0;
};

// Band energy E₀(p̃) with gradient and Hessian.
struct BandEnergy {
  std::function<double(const Vec2&)> value;
  std::function<Vec2(const Vec2&)> gradient;
  std::function<Eigen::Matrix2d(const Vec2&)> hessian;

  // 1/E₀″(0) along the first axis.
  double effective_mass() const;
};

BandEnergy quadratic_band(double mass);
// √(m²c⁴ + c²p²); with unit constants this is √(1 + p²).
BandEnergy relativistic_band(double mass, double c);

using SpinHamiltonian = std::function<Matrix(const Vec2& q, const Vec2& p)>;

struct FieldModel {
  BandEnergy band;
  double magnetic_field = 0.0;  // uniform, along z, symmetric gauge
  std::function<double(const Vec2&)> scalar_potential;    // φ_ex, optional
  std::function<Vec2(const Vec2&)> potential_gradient;    // ∇φ_ex
  std::function<Vec2(const Vec2&)> extra_vector_potential;  // optional A beyond the uniform field
  std::function<Eigen::Matrix2d(const Vec2&)> extra_vector_jacobian;  // ∂_i A_j
  SpinHamiltonian spin;
  Units units;

  Vec2 vector_potential(const Vec2& q) const;
  Eigen::Matrix2d vector_jacobian(const Vec2& q) const;  // (i, j) = ∂_i A_j
  Vec2 kinetic_momentum(const Vec2& q, const Vec2& p) const;
  double hamiltonian(const Vec2& q, const Vec2& p) const;
  double cyclotron_frequency() const;  // e|B|/(m_eff c)
};

struct ClassicalState {
  double time = 0.0;
  Vec2 q = Vec2::Zero();
  Vec2 p = Vec2::Zero();
};

struct Trajectory {
  std::vector<ClassicalState> states;
  double energy_drift = 0.0;  // max relative deviation from the initial energy
};

Trajectory classical_trajectory(const FieldModel& model, const Vec2& q0, const Vec2& p0, double t_final,
                                double dt, const OdeTolerances& tol = {1e-12, 1e-14, 2000000});

struct SpinSeries {
  std::vector<double> times;
  std::vector<Vector> states;
};

// i ℏ dχ/dt = H₁(q_t, p_t) χ by fourth-order Magnus steps between trajectory
// samples, with H₁ at the Gauss nodes from local cubic interpolation.
SpinSeries spin_precession(const FieldModel& model, const Trajectory& trajectory, const Vector& chi0);

// Frequency of a scalar oscillation from zero crossings of the mean-removed
// signal, located by local cubic interpolation and fitted linearly.
double oscillation_frequency(std::span<const double> times, std::span<const double> signal);

double extract_frequency(const Trajectory& trajectory);  // orbital
double extract_frequency(const SpinSeries& series);      // spin (Bloch vector)

// Gauge-invariant splitting (λ_max − λ_min)/ℏ of a spin Hamiltonian.
double splitting_frequency(const Matrix& spin_hamiltonian, double hbar);

double g_factor(double spin_frequency, double cyclotron_frequency);

// Uniform field B along z with spin coupling μ B σ_z, μ = eℏ/(2 m c).
FieldModel uniform_field_model(BandEnergy band, double magnetic_field, const Units& units = {});

}  // namespace adiaband
