#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "numerics/types.hpp"

namespace adiaband {

struct OdeTolerances {
  double relative = 1e-10;
  double absolute = 1e-12;
  // Step budget between two consecutive output times.
  int max_steps_between_outputs = 200000;
};

// dy/dt = generator(t) · y
using LinearGenerator = std::function<Matrix(double)>;

// Adaptive Dormand–Prince integration of a linear complex system, reporting
// the state at each requested (increasing) time. times.front() is the start.
std::vector<Vector> integrate_linear(const LinearGenerator& generator, const Vector& y0,
                                     std::span<const double> times, const OdeTolerances& tol);

// i ε dψ/dt = H(t) ψ on the slow time scale.
std::vector<Vector> integrate_schrodinger(const MatrixFn& hamiltonian, double epsilon,
                                          const Vector& psi0, std::span<const double> times,
                                          const OdeTolerances& tol);

using RealState = std::vector<double>;
using RealRhs = std::function<void(const RealState& y, RealState& dydt, double t)>;

std::vector<RealState> integrate_real(const RealRhs& rhs, const RealState& y0,
                                      std::span<const double> times, const OdeTolerances& tol);

std::vector<double> linspace(double a, double b, std::size_t n);

}  // namespace adiaband
