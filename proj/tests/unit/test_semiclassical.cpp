#include <cmath>
#include <cstring>
#include <numbers>

#include <boost/numeric/odeint.hpp>

#include "doctest.h"
#include "numerics/errors.hpp"
#include "semiclassical/semiclassical.hpp"

using namespace adiaband;

namespace {

constexpr double kPi = std::numbers::pi;

Vector spinor(Complex a, Complex b) {
  Vector v(2);
  v << a, b;
  return v.normalized();
}

bool bitwise_equal(const Trajectory& a, const Trajectory& b) {
  if (a.states.size() != b.states.size()) return false;
  for (std::size_t i = 0; i < a.states.size(); ++i) {
    const auto& x = a.states[i];
    const auto& y = b.states[i];
    if (std::memcmp(&x.time, &y.time, sizeof(double)) != 0) return false;
    if (std::memcmp(x.q.data(), y.q.data(), 2 * sizeof(double)) != 0) return false;
    if (std::memcmp(x.p.data(), y.p.data(), 2 * sizeof(double)) != 0) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("free particle moves on a straight line") {
  FieldModel model;
  model.band = quadratic_band(2.0);
  const Vec2 q0(0.5, -1.0), p0(1.0, 0.4);
  const auto traj = classical_trajectory(model, q0, p0, 3.0, 0.01);
  const Vec2 v = p0 / 2.0;
  for (const auto& s : traj.states) {
    CHECK((s.q - (q0 + v * s.time)).norm() < 1e-10);
    CHECK((s.p - p0).norm() < 1e-12);
  }
  CHECK(traj.energy_drift <= 1e-8);
}

TEST_CASE("cyclotron orbit in a uniform field") {
  Units units;
  units.charge = 1.5;
  units.c = 2.0;
  FieldModel model;
  model.band = quadratic_band(0.8);
  model.magnetic_field = 3.0;
  model.units = units;
  const double omega = 1.5 * 3.0 / (0.8 * 2.0);
  CHECK(model.cyclotron_frequency() == doctest::Approx(omega).epsilon(1e-14));
  const auto traj = classical_trajectory(model, Vec2(0.3, 0.1), Vec2(0.7, -0.2), 5 * 2 * kPi / omega, 1e-3);
  CHECK(traj.energy_drift <= 1e-8);
  CHECK(std::abs(extract_frequency(traj) / omega - 1.0) <= 1e-6);
}

TEST_CASE("relativistic band: orbital period matches a dense-output crossing oracle") {
  FieldModel model;
  model.band = relativistic_band(1.0, 1.0);
  model.magnetic_field = 2.0;
  const Vec2 q0(0.0, 0.0), p0(1.5, 0.0);
  const double energy = std::sqrt(1.0 + 1.5 * 1.5);
  const double t_final = 4 * 2 * kPi * energy / 2.0;
  const auto traj = classical_trajectory(model, q0, p0, t_final, 1e-3);
  CHECK(traj.energy_drift <= 1e-8);
  const double extracted = extract_frequency(traj);

  using State = std::array<double, 4>;
  auto rhs = [&](const State& y, State& dy, double) {
    const Vec2 q(y[0], y[1]), p(y[2], y[3]);
    const Vec2 v = model.band.gradient(model.kinetic_momentum(q, p));
    const Vec2 f = model.vector_jacobian(q) * v;
    dy = {v.x(), v.y(), f.x(), f.y()};
  };
  namespace ode = boost::numeric::odeint;
  auto stepper = ode::make_dense_output(1e-13, 1e-13, ode::runge_kutta_dopri5<State>());
  stepper.initialize(State{q0.x(), q0.y(), p0.x(), p0.y()}, 0.0, 1e-3);
  auto kinetic_x = [&](const State& y) { return model.kinetic_momentum(Vec2(y[0], y[1]), Vec2(y[2], y[3])).x(); };
  std::vector<double> crossings;
  State prev = stepper.current_state();
  while (stepper.current_time() < t_final) {
    const double t0 = stepper.current_time();
    stepper.do_step(rhs);
    const double t1 = stepper.current_time();
    const State cur = stepper.current_state();
    if (kinetic_x(prev) < 0.0 && kinetic_x(cur) >= 0.0) {
      double a = t0, b = t1;
      State mid;
      for (int it = 0; it < 100; ++it) {
        const double m = 0.5 * (a + b);
        stepper.calc_state(m, mid);
        (kinetic_x(mid) < 0.0 ? a : b) = m;
      }
      crossings.push_back(0.5 * (a + b));
    }
    prev = cur;
  }
  REQUIRE(crossings.size() >= 3);
  const double period = (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1);
  CHECK(std::abs(extracted * period / (2 * kPi) - 1.0) <= 1e-6);
  CHECK(std::abs(extracted * energy / 2.0 - 1.0) <= 1e-6);
}

TEST_CASE("spin precession: zero and constant couplings") {
  FieldModel model;
  model.band = quadratic_band(1.0);
  const auto traj = classical_trajectory(model, Vec2::Zero(), Vec2(1.0, 0.0), 40.0, 1e-2);
  const Vector chi0 = spinor(1.0, Complex(0.3, 0.2));

  model.spin = [](const Vec2&, const Vec2&) -> Matrix { return Matrix::Zero(2, 2); };
  const auto still = spin_precession(model, traj, chi0);
  for (const auto& chi : still.states) CHECK((chi - chi0).norm() == 0.0);

  const double mu = 0.7;
  const Eigen::Vector3d b(0.4, -0.3, 1.2);
  model.spin = [&](const Vec2&, const Vec2&) -> Matrix {
    return 0.5 * mu * (b.x() * pauli_x() + b.y() * pauli_y() + b.z() * pauli_z());
  };
  const auto larmor = spin_precession(model, traj, spinor(1.0, 0.0));
  double drift = 0.0;
  for (const auto& chi : larmor.states) drift = std::max(drift, std::abs(chi.norm() - 1.0));
  CHECK(drift <= 1e-10);
  CHECK(std::abs(extract_frequency(larmor) / (mu * b.norm()) - 1.0) <= 1e-5);
  CHECK(splitting_frequency(model.spin(Vec2::Zero(), Vec2::Zero()), 1.0) ==
        doctest::Approx(mu * b.norm()).epsilon(1e-12));
}

TEST_CASE("spin precession along a circular orbit matches a tight dense integration") {
  FieldModel model;
  model.band = quadratic_band(1.0);
  model.magnetic_field = 1.3;
  auto coupling = [](const Vec2& q, const Vec2& p) -> Matrix {
    return 0.5 * q.x() * pauli_x() + 0.4 * p.y() * pauli_y() + 0.3 * pauli_z();
  };
  model.spin = coupling;
  const Vec2 q0(0.2, 0.0), p0(0.0, 1.0);
  const double t_final = 6.0;
  const auto traj = classical_trajectory(model, q0, p0, t_final, 2e-3);
  const Vector chi0 = spinor(1.0, Complex(0.0, 1.0));
  const auto series = spin_precession(model, traj, chi0);

  RealRhs rhs = [&](const RealState& y, RealState& dy, double) {
    const Vec2 q(y[0], y[1]), p(y[2], y[3]);
    const Vec2 v = model.band.gradient(model.kinetic_momentum(q, p));
    const Vec2 f = model.vector_jacobian(q) * v;
    Vector chi(2);
    chi << Complex(y[4], y[5]), Complex(y[6], y[7]);
    const Vector d = -kI * coupling(q, p) * chi;
    dy = {v.x(), v.y(), f.x(), f.y(), d(0).real(), d(0).imag(), d(1).real(), d(1).imag()};
  };
  const std::vector<double> times{0.0, t_final};
  const auto ys = integrate_real(rhs,
                                 {q0.x(), q0.y(), p0.x(), p0.y(), chi0(0).real(), chi0(0).imag(),
                                  chi0(1).real(), chi0(1).imag()},
                                 times, {1e-13, 1e-14, 2000000});
  Vector oracle(2);
  oracle << Complex(ys[1][4], ys[1][5]), Complex(ys[1][6], ys[1][7]);
  CHECK((series.states.back() - oracle).norm() <= 1e-8);
  CHECK(std::abs(series.states.back().norm() - 1.0) <= 1e-10);
}

TEST_CASE("frequency extraction on synthetic signals") {
  const auto t = linspace(0.0, 12.0, 1201);
  std::vector<double> s(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) s[i] = std::cos(2.0 * t[i]);
  CHECK(std::abs(oscillation_frequency(t, s) - 2.0) <= 1e-6);

  const auto short_t = linspace(0.0, 2.0 * kPi, 401);
  std::vector<double> short_s(short_t.size());
  for (std::size_t i = 0; i < short_t.size(); ++i) short_s[i] = std::sin(2.0 * short_t[i] + 0.3);
  CHECK_THROWS_AS(oscillation_frequency(short_t, short_s), ValidationError);

  std::vector<double> flat(t.size(), 0.25);
  CHECK_THROWS_AS(oscillation_frequency(t, flat), NumericalError);
}

TEST_CASE("g-factor arithmetic") {
  CHECK(g_factor(1.7, 1.7) == 2.0);
  CHECK(g_factor(1.00116, 1.0) == doctest::Approx(2.00232).epsilon(1e-14));
  CHECK_THROWS_AS(g_factor(1.0, 0.0), ValidationError);
  CHECK_THROWS_AS(g_factor(1.0, -2.0), ValidationError);
}

TEST_CASE("end-to-end g = 2 with a passenger spin") {
  Units units;
  units.mass = 1.3;
  units.charge = 0.9;
  const double b = 1.1;
  const auto run = [&](double scale) {
    const FieldModel model = uniform_field_model(quadratic_band(units.mass), scale * b, units);
    const double wc = model.cyclotron_frequency();
    const auto traj = classical_trajectory(model, Vec2(0.1, -0.2), Vec2(0.6, 0.3), 6 * 2 * kPi / wc, 2e-3 / scale);
    CHECK(traj.energy_drift <= 1e-8);
    const auto bare = classical_trajectory(model, Vec2(0.1, -0.2), Vec2(0.6, 0.3), 6 * 2 * kPi / wc, 2e-3 / scale);
    const auto spin = spin_precession(model, traj, spinor(1.0, 1.0));
    CHECK(bitwise_equal(traj, bare));
    const double g = g_factor(extract_frequency(spin), extract_frequency(traj));
    CHECK(std::abs(g - 2.0) <= 1e-5);
    return g;
  };
  const double g1 = run(1.0);
  const double g3 = run(3.0);
  CHECK(std::abs(g1 - g3) <= 1e-6);
}
