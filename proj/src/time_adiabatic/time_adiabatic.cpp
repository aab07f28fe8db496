#include "time_adiabatic/time_adiabatic.hpp"

#include <cmath>
#include <functional>
#include <numbers>

#include "numerics/errors.hpp"

namespace adiaband {

namespace {

constexpr double kCorrectionStep = 1e-4;

void require_order(int order, int max) {
  if (order < 0 || order > max) throw ValidationError("unsupported perturbative order");
}

}  // namespace

void TimeAdiabaticProblem::validate() const {
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  if (!(t1 > t0)) throw ValidationError("time interval must be increasing");
  if (chi.size() != frames.band().multiplicity())
    throw ValidationError("reduced state dimension must equal the band multiplicity");
  if (std::abs(chi.norm() - 1.0) > 1e-12) throw ValidationError("reduced state must be normalized");
}

Matrix effective_hamiltonian(const BandPoint& pt, double epsilon, int order) {
  require_order(order, 2);
  const Eigen::Index m = pt.frame.cols();
  Matrix h = pt.energy * Matrix::Identity(m, m);
  if (order >= 1) h += -kI * epsilon * pt.inband_derivative;
  if (order >= 2)
    h += -epsilon * epsilon * pt.frame_derivative.adjoint() * pt.resolvent * pt.frame_derivative;
  return hermitian_part(h);
}

Matrix effective_hamiltonian(const TimeAdiabaticProblem& problem, double t, int order) {
  return effective_hamiltonian(problem.frames.at(t), problem.epsilon, order);
}

Matrix intertwiner(const BandPoint& pt, double epsilon, int order) {
  require_order(order, 1);
  Matrix u = pt.frame;
  if (order >= 1) u += kI * epsilon * pt.resolvent * pt.frame_derivative;
  return u;
}

Matrix intertwiner(const TimeAdiabaticProblem& problem, double t, int order) {
  return intertwiner(problem.frames.at(t), problem.epsilon, order);
}

Matrix superadiabatic_correction1(const BandPoint& pt) {
  const Matrix& p = pt.projector;
  const Matrix& r = pt.resolvent;
  const Matrix pdot = -r * pt.dhamiltonian * p - p * pt.dhamiltonian * r;
  return kI * (r * pdot * p - p * pdot * r);
}

Matrix superadiabatic_projector(const TimeAdiabaticProblem& problem, double t, int order) {
  require_order(order, 2);
  const BandPoint pt = problem.frames.at(t);
  const double eps = problem.epsilon;
  if (order == 0) return pt.projector;
  const Matrix p1 = superadiabatic_correction1(pt);
  if (order == 1) return pt.projector + eps * p1;

  const double h = kCorrectionStep;
  const Matrix dp1 = (superadiabatic_correction1(problem.frames.at(t + h)) -
                      superadiabatic_correction1(problem.frames.at(t - h))) /
                     (2.0 * h);
  const Matrix& p = pt.projector;
  const Matrix& r = pt.resolvent;
  const Matrix q = Matrix::Identity(p.rows(), p.cols()) - p;
  const Matrix sq = p1 * p1;
  const Matrix p2 = -p * sq * p + q * sq * q + kI * (r * dp1 * p - p * dp1 * r);
  return pt.projector + eps * p1 + eps * eps * p2;
}

std::vector<Vector> propagate_exact(const TimeAdiabaticProblem& problem, const Vector& psi0,
                                    std::span<const double> times) {
  if (psi0.size() != problem.frames.family().dimension())
    throw ValidationError("initial state has wrong dimension");
  if (!std::isfinite(psi0.norm()) || psi0.norm() == 0.0)
    throw ValidationError("initial state must be a finite nonzero vector");
  const auto& family = problem.frames.family();
  return integrate_schrodinger([&family](double t) { return family(t); }, problem.epsilon, psi0,
                               times, problem.tolerances);
}

std::vector<Vector> propagate_effective(const TimeAdiabaticProblem& problem, int order,
                                        std::span<const double> times) {
  require_order(order, 2);
  if (problem.chi.size() == 1) {
    // Scalar band: integrate the accumulated phase, so |χ| stays exactly 1.
    const double eps = problem.epsilon;
    auto rhs = [&problem, order, eps](const RealState&, RealState& d, double t) {
      d[0] = effective_hamiltonian(problem, t, order)(0, 0).real() / eps;
    };
    const auto phase = integrate_real(rhs, RealState{0.0}, times, problem.tolerances);
    std::vector<Vector> out;
    out.reserve(phase.size());
    for (const auto& ph : phase) out.emplace_back(std::exp(-kI * ph[0]) * problem.chi);
    return out;
  }
  return integrate_schrodinger(
      [&problem, order](double t) { return effective_hamiltonian(problem, t, order); },
      problem.epsilon, problem.chi, times, problem.tolerances);
}

std::vector<Vector> reconstruct(const TimeAdiabaticProblem& problem,
                                const std::vector<Vector>& chi, std::span<const double> times,
                                int intertwiner_order) {
  if (chi.size() != times.size()) throw ValidationError("trajectory and samples differ in length");
  std::vector<Vector> out;
  out.reserve(chi.size());
  for (std::size_t k = 0; k < chi.size(); ++k)
    out.emplace_back(intertwiner(problem, times[k], intertwiner_order) * chi[k]);
  return out;
}

LeakageResult leakage(const std::vector<Vector>& psi, const std::vector<Matrix>& projectors) {
  if (psi.size() != projectors.size())
    throw ValidationError("state and projector trajectories differ in length");
  LeakageResult out;
  out.series.reserve(psi.size());
  for (std::size_t k = 0; k < psi.size(); ++k) {
    const Vector outside = psi[k] - projectors[k] * psi[k];
    out.series.push_back(outside.norm());
    out.sup = std::max(out.sup, out.series.back());
  }
  return out;
}

LeakageResult superadiabatic_leakage(const TimeAdiabaticProblem& problem, int order,
                                     std::span<const double> times) {
  std::vector<Matrix> projectors;
  projectors.reserve(times.size());
  for (double t : times) projectors.push_back(superadiabatic_projector(problem, t, order));
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(projectors.front()));
  const Vector psi0 = solver.eigenvectors().col(solver.eigenvectors().cols() - 1);
  return leakage(propagate_exact(problem, psi0, times), projectors);
}

double reconstruction_error(const TimeAdiabaticProblem& problem, OrderPair orders) {
  const std::vector<double> times{problem.t0, problem.t1};
  const Vector psi0 = intertwiner(problem, problem.t0, orders.intertwiner) * problem.chi;
  const auto exact = propagate_exact(problem, psi0, times);
  const auto chi = propagate_effective(problem, orders.effective, times);
  const Vector approx = intertwiner(problem, problem.t1, orders.intertwiner) * chi.back();
  return (exact.back() - approx).norm();
}

namespace {

double wrap_phase(double phi) { return std::remainder(phi, 2.0 * std::numbers::pi); }

// Composite Simpson rule on an odd number of equispaced points.
double simpson(const std::function<double(double)>& f, double a, double b, int points) {
  if (points < 3) throw ValidationError("quadrature needs at least three points");
  if (points % 2 == 0) ++points;
  const double h = (b - a) / (points - 1);
  double sum = f(a) + f(b);
  for (int k = 1; k < points - 1; ++k) sum += (k % 2 == 1 ? 4.0 : 2.0) * f(a + k * h);
  return sum * h / 3.0;
}

void require_scalar_band(const TimeAdiabaticProblem& problem) {
  problem.validate();
  if (problem.frames.band().multiplicity() != 1) throw ValidationError("geometric phase needs a band with m = 1");
}

double frame_mismatch(const TimeAdiabaticProblem& problem) {
  const Matrix f0 = problem.frames.frame(problem.t0);
  const Matrix f1 = problem.frames.frame(problem.t1);
  return std::arg((f0.adjoint() * f1)(0, 0));
}

}  // namespace

double geometric_phase(const TimeAdiabaticProblem& problem, int quadrature_points) {
  require_scalar_band(problem);
  const double eps = problem.epsilon;
  const auto first = [&](double t) {
    const auto pt = problem.frames.at(t);
    return (effective_hamiltonian(pt, eps, 1) - effective_hamiltonian(pt, eps, 0))(0, 0).real() / eps;
  };
  return wrap_phase(-simpson(first, problem.t0, problem.t1, quadrature_points) + frame_mismatch(problem));
}

double propagated_geometric_phase(const TimeAdiabaticProblem& problem, int quadrature_points) {
  require_scalar_band(problem);
  const double eps = problem.epsilon;
  const Vector psi0 = intertwiner(problem, problem.t0, 1) * problem.chi;
  const std::vector<double> times{problem.t0, problem.t1};
  const auto psi = propagate_exact(problem, psi0, times);
  const Matrix f0 = problem.frames.frame(problem.t0);
  const double measured = std::arg((f0.adjoint() * psi.back())(0, 0) / problem.chi(0));
  const auto dynamical = [&](double t) {
    const auto pt = problem.frames.at(t);
    const Matrix h0 = effective_hamiltonian(pt, eps, 0);
    const Matrix h1 = effective_hamiltonian(pt, eps, 1);
    const Matrix h2 = effective_hamiltonian(pt, eps, 2);
    return (h0 + h2 - h1)(0, 0).real() / eps;
  };
  return wrap_phase(measured + simpson(dynamical, problem.t0, problem.t1, quadrature_points));
}

}  // namespace adiaband
