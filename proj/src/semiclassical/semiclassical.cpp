#include "semiclassical/semiclassical.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "numerics/errors.hpp"

namespace adiaband {

namespace {

Matrix unitary_exp(const Matrix& anti_hermitian) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(hermitian_part(kI * anti_hermitian));
  const Vector phases = (-kI * eig.eigenvalues().cast<Complex>()).array().exp().matrix();
  return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
}

// Lagrange weights at t for nodes ts.
std::array<double, 4> lagrange_weights(const std::array<double, 4>& ts, double t) {
  std::array<double, 4> w{};
  for (int i = 0; i < 4; ++i) {
    double v = 1.0;
    for (int j = 0; j < 4; ++j)
      if (j != i) v *= (t - ts[j]) / (ts[i] - ts[j]);
    w[i] = v;
  }
  return w;
}

std::size_t stencil_start(std::size_t k, std::size_t n) {
  if (k == 0) return 0;
  return std::min(k - 1, n - 4);
}

double cubic_root(const std::array<double, 4>& ts, const std::array<double, 4>& ys, double a, double b) {
  auto f = [&](double t) {
    const auto w = lagrange_weights(ts, t);
    return w[0] * ys[0] + w[1] * ys[1] + w[2] * ys[2] + w[3] * ys[3];
  };
  double fa = f(a);
  for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if ((fm < 0) == (fa < 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

double crossing_slope(const std::vector<double>& crossings) {
  const std::size_t n = crossings.size();
  double mi = 0.0, mt = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mi += static_cast<double>(i);
    mt += crossings[i];
  }
  mi /= static_cast<double>(n);
  mt /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double di = static_cast<double>(i) - mi;
    sxy += di * (crossings[i] - mt);
    sxx += di * di;
  }
  return sxy / sxx;
}

}  // namespace

double BandEnergy::effective_mass() const {
  const double curvature = hessian(Vec2::Zero())(0, 0);
  if (!(curvature > 0.0)) throw ValidationError("band energy must have positive curvature at p = 0");
  return 1.0 / curvature;
}

BandEnergy quadratic_band(double mass) {
  if (!(mass > 0.0)) throw ValidationError("mass must be positive");
  BandEnergy band;
  band.value = [mass](const Vec2& p) { return p.squaredNorm() / (2.0 * mass); };
  band.gradient = [mass](const Vec2& p) -> Vec2 { return p / mass; };
  band.hessian = [mass](const Vec2&) -> Eigen::Matrix2d { return Eigen::Matrix2d::Identity() / mass; };
  return band;
}

BandEnergy relativistic_band(double mass, double c) {
  if (!(mass > 0.0) || !(c > 0.0)) throw ValidationError("mass and c must be positive");
  const double rest = mass * c * c;
  BandEnergy band;
  band.value = [rest, c](const Vec2& p) { return std::sqrt(rest * rest + c * c * p.squaredNorm()); };
  band.gradient = [rest, c](const Vec2& p) -> Vec2 {
    return c * c * p / std::sqrt(rest * rest + c * c * p.squaredNorm());
  };
  band.hessian = [rest, c](const Vec2& p) -> Eigen::Matrix2d {
    const double e = std::sqrt(rest * rest + c * c * p.squaredNorm());
    return c * c / e * (Eigen::Matrix2d::Identity() - c * c * p * p.transpose() / (e * e));
  };
  return band;
}

Vec2 FieldModel::vector_potential(const Vec2& q) const {
  Vec2 a(-0.5 * magnetic_field * q.y(), 0.5 * magnetic_field * q.x());
  if (extra_vector_potential) a += extra_vector_potential(q);
  return a;
}

Eigen::Matrix2d FieldModel::vector_jacobian(const Vec2& q) const {
  Eigen::Matrix2d j;
  j << 0.0, 0.5 * magnetic_field, -0.5 * magnetic_field, 0.0;
  if (extra_vector_jacobian) j += extra_vector_jacobian(q);
  return j;
}

Vec2 FieldModel::kinetic_momentum(const Vec2& q, const Vec2& p) const {
  return p - units.charge / units.c * vector_potential(q);
}

double FieldModel::hamiltonian(const Vec2& q, const Vec2& p) const {
  double h = band.value(kinetic_momentum(q, p));
  if (scalar_potential) h += units.charge * scalar_potential(q);
  return h;
}

double FieldModel::cyclotron_frequency() const {
  return std::abs(units.charge * magnetic_field) / (band.effective_mass() * units.c);
}

Trajectory classical_trajectory(const FieldModel& model, const Vec2& q0, const Vec2& p0, double t_final,
                                double dt, const OdeTolerances& tol) {
  if (!(t_final > 0.0) || !(dt > 0.0)) throw ValidationError("trajectory needs positive T and dt");
  if (!q0.allFinite() || !p0.allFinite()) throw ValidationError("initial state must be finite");
  if (!model.band.value || !model.band.gradient) throw ValidationError("band energy is not set");
  const auto steps = static_cast<std::size_t>(std::ceil(t_final / dt - 1e-9));
  const auto times = linspace(0.0, t_final, steps + 1);
  const double e = model.units.charge;
  const double c = model.units.c;
  RealRhs rhs = [&](const RealState& y, RealState& dydt, double) {
    const Vec2 q(y[0], y[1]);
    const Vec2 p(y[2], y[3]);
    const Vec2 v = model.band.gradient(model.kinetic_momentum(q, p));
    Vec2 force = e / c * model.vector_jacobian(q) * v;
    if (model.potential_gradient) force -= e * model.potential_gradient(q);
    dydt[0] = v.x();
    dydt[1] = v.y();
    dydt[2] = force.x();
    dydt[3] = force.y();
  };
  const auto ys = integrate_real(rhs, {q0.x(), q0.y(), p0.x(), p0.y()}, times, tol);
  Trajectory out;
  out.states.reserve(ys.size());
  const double e0 = model.hamiltonian(q0, p0);
  const double scale = std::max(std::abs(e0), 1e-300);
  for (std::size_t k = 0; k < ys.size(); ++k) {
    ClassicalState s{times[k], Vec2(ys[k][0], ys[k][1]), Vec2(ys[k][2], ys[k][3])};
    if (!s.q.allFinite() || !s.p.allFinite()) throw NumericalError("trajectory left the finite range");
    out.energy_drift = std::max(out.energy_drift, std::abs(model.hamiltonian(s.q, s.p) - e0) / scale);
    out.states.push_back(s);
  }
  return out;
}

SpinSeries spin_precession(const FieldModel& model, const Trajectory& trajectory, const Vector& chi0) {
  if (!model.spin) throw ValidationError("spin Hamiltonian is not set");
  const auto& st = trajectory.states;
  if (st.size() < 4) throw ValidationError("spin precession needs at least four trajectory samples");
  if (std::abs(chi0.norm() - 1.0) > 1e-12) throw ValidationError("initial spinor must have unit norm");
  const double hbar = model.units.hbar;
  std::vector<Matrix> gen;
  gen.reserve(st.size());
  for (const auto& s : st) {
    Matrix h = model.spin(s.q, s.p);
    if (h.rows() != chi0.size() || h.cols() != chi0.size()) throw ValidationError("spin Hamiltonian size mismatch");
    gen.push_back(-kI / hbar * h);
  }
  SpinSeries out;
  out.times.reserve(st.size());
  out.states.reserve(st.size());
  out.times.push_back(st[0].time);
  out.states.push_back(chi0);
  const double r = std::sqrt(3.0) / 6.0;
  Vector chi = chi0;
  for (std::size_t k = 0; k + 1 < st.size(); ++k) {
    const std::size_t s0 = stencil_start(k, st.size());
    const std::array<double, 4> ts{st[s0].time, st[s0 + 1].time, st[s0 + 2].time, st[s0 + 3].time};
    const double h = st[k + 1].time - st[k].time;
    auto at = [&](double t) {
      const auto w = lagrange_weights(ts, t);
      Matrix a = w[0] * gen[s0];
      for (int i = 1; i < 4; ++i) a += w[i] * gen[s0 + i];
      return a;
    };
    const Matrix a1 = at(st[k].time + h * (0.5 - r));
    const Matrix a2 = at(st[k].time + h * (0.5 + r));
    const Matrix omega = 0.5 * h * (a1 + a2) + (std::sqrt(3.0) / 12.0) * h * h * (a2 * a1 - a1 * a2);
    chi = unitary_exp(omega) * chi;
    out.times.push_back(st[k + 1].time);
    out.states.push_back(chi);
  }
  return out;
}

double oscillation_frequency(std::span<const double> times, std::span<const double> signal) {
  const std::size_t n = times.size();
  if (n != signal.size()) throw ValidationError("times and signal differ in length");
  if (n < 4) throw ValidationError("signal too short");
  double mean = 0.0;
  for (double v : signal) mean += v;
  mean /= static_cast<double>(n);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = signal[i] - mean;
  double amplitude = 0.0;
  for (double v : y) amplitude = std::max(amplitude, std::abs(v));
  if (!(amplitude > 1e-12)) throw NumericalError("non-oscillatory signal");
  std::vector<double> up, down;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const bool rising = y[i] < 0.0 && y[i + 1] >= 0.0;
    const bool falling = y[i] >= 0.0 && y[i + 1] < 0.0;
    if (!rising && !falling) continue;
    const std::size_t s0 = stencil_start(i, n);
    const std::array<double, 4> ts{times[s0], times[s0 + 1], times[s0 + 2], times[s0 + 3]};
    const std::array<double, 4> ys{y[s0], y[s0 + 1], y[s0 + 2], y[s0 + 3]};
    const double t = cubic_root(ts, ys, times[i], times[i + 1]);
    (rising ? up : down).push_back(t);
  }
  if (up.size() < 2 || down.size() < 2) throw NumericalError("non-oscillatory signal");
  const double period = 0.5 * (crossing_slope(up) + crossing_slope(down));
  const double omega = 2.0 * std::numbers::pi / period;
  const double periods = (times[n - 1] - times[0]) / period;
  if (periods < 3.0 - 1e-9) throw ValidationError("series covers fewer than three periods");
  return omega;
}

double extract_frequency(const Trajectory& trajectory) {
  const auto& st = trajectory.states;
  const std::size_t n = st.size();
  if (n < 4) throw ValidationError("trajectory too short");
  // Algebraic circle fit for the orbit center.
  Eigen::MatrixXd a(n, 3);
  Eigen::VectorXd b(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& q = st[i].q;
    a(i, 0) = 2.0 * q.x();
    a(i, 1) = 2.0 * q.y();
    a(i, 2) = 1.0;
    b(i) = q.squaredNorm();
  }
  const Eigen::Vector3d sol = a.colPivHouseholderQr().solve(b);
  const Vec2 center(sol(0), sol(1));
  std::vector<double> times(n), phase(n);
  double prev = 0.0, offset = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 d = st[i].q - center;
    if (d.norm() < 1e-300) throw NumericalError("non-oscillatory signal");
    const double ang = std::atan2(d.y(), d.x());
    if (i > 0) {
      double jump = ang - prev;
      if (jump > std::numbers::pi) offset -= 2.0 * std::numbers::pi;
      if (jump < -std::numbers::pi) offset += 2.0 * std::numbers::pi;
    }
    prev = ang;
    times[i] = st[i].time;
    phase[i] = ang + offset;
  }
  if (std::abs(phase[n - 1] - phase[0]) < 2.0 * std::numbers::pi * (3.0 - 1e-9))
    throw ValidationError("series covers fewer than three periods");
  double mt = 0.0, mp = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mt += times[i];
    mp += phase[i];
  }
  mt /= static_cast<double>(n);
  mp /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (times[i] - mt) * (phase[i] - mp);
    sxx += (times[i] - mt) * (times[i] - mt);
  }
  return std::abs(sxy / sxx);
}

double extract_frequency(const SpinSeries& series) {
  const std::size_t n = series.states.size();
  if (n < 4) throw ValidationError("spin series too short");
  if (series.states.front().size() != 2) throw ValidationError("spin frequency needs a two-component spinor");
  const std::array<Matrix, 3> paulis{pauli_x(), pauli_y(), pauli_z()};
  std::array<std::vector<double>, 3> comps;
  for (auto& c : comps) c.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    for (int k = 0; k < 3; ++k)
      comps[k][i] = (series.states[i].adjoint() * paulis[k] * series.states[i])(0).real();
  int best = 0;
  double range = -1.0;
  for (int k = 0; k < 3; ++k) {
    const auto [lo, hi] = std::minmax_element(comps[k].begin(), comps[k].end());
    if (*hi - *lo > range) {
      range = *hi - *lo;
      best = k;
    }
  }
  return oscillation_frequency(series.times, comps[best]);
}

double splitting_frequency(const Matrix& spin_hamiltonian, double hbar) {
  if (hermiticity_defect(spin_hamiltonian) > 1e-12) throw NonHermitianError("spin Hamiltonian is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(hermitian_part(spin_hamiltonian), Eigen::EigenvaluesOnly);
  const auto& v = eig.eigenvalues();
  return (v(v.size() - 1) - v(0)) / hbar;
}

double g_factor(double spin_frequency, double cyclotron_frequency) {
  if (!(cyclotron_frequency > 0.0)) throw ValidationError("cyclotron frequency must be positive");
  return 2.0 * spin_frequency / cyclotron_frequency;
}

FieldModel uniform_field_model(BandEnergy band, double magnetic_field, const Units& units) {
  FieldModel model;
  model.band = std::move(band);
  model.magnetic_field = magnetic_field;
  model.units = units;
  const double moment = units.charge * units.hbar / (2.0 * units.mass * units.c);
  const Matrix coupling = moment * magnetic_field * pauli_z();
  model.spin = [coupling](const Vec2&, const Vec2&) { return coupling; };
  return model;
}

}  // namespace adiaband
