#include "numerics/ode.hpp"

#include <string>

#include <boost/numeric/odeint.hpp>

#include "numerics/errors.hpp"

namespace adiaband {

namespace odeint = boost::numeric::odeint;

namespace {

using ComplexState = std::vector<Complex>;

template <class State, class System>
std::vector<State> run_dense(System system, State y, std::span<const double> times,
                             const OdeTolerances& tol) {
  std::vector<State> out;
  out.reserve(times.size());
  if (times.empty()) return out;
  if (times.size() == 1) {
    out.push_back(y);
    return out;
  }
  const double span = times.back() - times.front();
  const double dt0 = span / 1000.0;
  auto stepper = odeint::make_dense_output(tol.absolute, tol.relative,
                                           odeint::runge_kutta_dopri5<State>());
  auto observer = [&out](const State& s, double) { out.push_back(s); };
  try {
    odeint::integrate_times(stepper, system, y, times.begin(), times.end(), dt0, observer,
                            odeint::max_step_checker(tol.max_steps_between_outputs));
  } catch (const odeint::step_adjustment_error& e) {
    throw ToleranceError(std::string("ODE step adjustment failed: ") + e.what());
  } catch (const odeint::no_progress_error& e) {
    throw ToleranceError(std::string("ODE step budget exhausted: ") + e.what());
  }
  if (out.size() != times.size()) throw ToleranceError("ODE integration ended early");
  return out;
}

}  // namespace

std::vector<Vector> integrate_linear(const LinearGenerator& generator, const Vector& y0,
                                     std::span<const double> times, const OdeTolerances& tol) {
  const Eigen::Index n = y0.size();
  auto system = [&generator, n](const ComplexState& y, ComplexState& dydt, double t) {
    const Matrix g = generator(t);
    Eigen::Map<const Vector> yv(y.data(), n);
    Eigen::Map<Vector> dv(dydt.data(), n);
    dv.noalias() = g * yv;
  };
  ComplexState start(y0.data(), y0.data() + n);
  auto raw = run_dense(system, start, times, tol);
  std::vector<Vector> out;
  out.reserve(raw.size());
  for (const auto& s : raw) out.emplace_back(Eigen::Map<const Vector>(s.data(), n));
  return out;
}

std::vector<Vector> integrate_schrodinger(const MatrixFn& hamiltonian, double epsilon,
                                          const Vector& psi0, std::span<const double> times,
                                          const OdeTolerances& tol) {
  const Complex factor = -kI / epsilon;
  return integrate_linear([&](double t) -> Matrix { return factor * hamiltonian(t); }, psi0,
                          times, tol);
}

std::vector<RealState> integrate_real(const RealRhs& rhs, const RealState& y0,
                                      std::span<const double> times, const OdeTolerances& tol) {
  auto system = [&rhs](const RealState& y, RealState& dydt, double t) { rhs(y, dydt, t); };
  return run_dense(system, y0, times, tol);
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = a;
    return out;
  }
  for (std::size_t i = 0; i < n; ++i)
    out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

}  // namespace adiaband
