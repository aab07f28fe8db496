#pragma once

#include <span>
#include <vector>

#include "numerics/ode.hpp"
#include "spectral/frames.hpp"

namespace adiaband {

struct TimeAdiabaticProblem {
  FrameField frames;
  double epsilon = 0.1;
  double t0 = 0.0;
  double t1 = 1.0;
  Vector chi;  // reduced initial state, canonical reference basis
  OdeTolerances tolerances;

  void validate() const;
};

// Orders of the effective Hamiltonian and of the intertwiner used together.
struct OrderPair {
  int effective = 2;
  int intertwiner = 1;
};

inline constexpr OrderPair kLeadingOrder{1, 0};
inline constexpr OrderPair kSecondOrder{2, 1};

Matrix effective_hamiltonian(const BandPoint& pt, double epsilon, int order);
Matrix effective_hamiltonian(const TimeAdiabaticProblem& problem, double t, int order);

// n_f × m; columns are the images of the reference basis vectors.
Matrix intertwiner(const BandPoint& pt, double epsilon, int order);
Matrix intertwiner(const TimeAdiabaticProblem& problem, double t, int order);

// P^ε through the given order (0, 1, 2). Not exactly a projector for order > 0.
Matrix superadiabatic_projector(const TimeAdiabaticProblem& problem, double t, int order);

// First-order correction P₁ alone, expressed through P, R and Ḣ.
Matrix superadiabatic_correction1(const BandPoint& pt);

std::vector<Vector> propagate_exact(const TimeAdiabaticProblem& problem, const Vector& psi0,
                                    std::span<const double> times);

// Starts from problem.chi at times.front().
std::vector<Vector> propagate_effective(const TimeAdiabaticProblem& problem, int order,
                                        std::span<const double> times);

std::vector<Vector> reconstruct(const TimeAdiabaticProblem& problem,
                                const std::vector<Vector>& chi, std::span<const double> times,
                                int intertwiner_order);

struct LeakageResult {
  double sup = 0.0;
  std::vector<double> series;
};

LeakageResult leakage(const std::vector<Vector>& psi, const std::vector<Matrix>& projectors);

// Sup-leakage of the exact solution started in the top eigenvector of the
// Hermitian part of P^ε(t0), measured against P^ε on the given samples.
LeakageResult superadiabatic_leakage(const TimeAdiabaticProblem& problem, int order,
                                     std::span<const double> times);

// ‖ψ_exact(t1) − U^ε(t1)χ^ε(t1)‖ with ψ(t0) = U^ε(t0)χ.
double reconstruction_error(const TimeAdiabaticProblem& problem, OrderPair orders);

// Geometric phase of an m = 1 band over [t0, t1], in (−π, π]: minus the
// integrated first-order term plus the frame mismatch arg⟨Φ(t0)|Φ(t1)⟩.
double geometric_phase(const TimeAdiabaticProblem& problem, int quadrature_points = 2001);

// The same phase read off exact propagation from U^ε(t0)χ: arg⟨Φ(t0)|ψ(t1)⟩
// plus the integrated zeroth- and second-order effective terms over ε.
double propagated_geometric_phase(const TimeAdiabaticProblem& problem, int quadrature_points = 2001);

}  // namespace adiaband
