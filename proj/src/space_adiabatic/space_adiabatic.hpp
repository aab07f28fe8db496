#pragma once

#include <memory>

#include "spectral/frames.hpp"
#include "weyl/weyl.hpp"

namespace adiaband {

// Band data at one phase-space point; derivatives are full (off-band plus in-band).
struct PhasePoint {
  double q = 0.0;
  double p = 0.0;
  Matrix hamiltonian;
  Matrix dq_hamiltonian;
  Matrix dp_hamiltonian;
  double energy = 0.0;
  double dq_energy = 0.0;
  double dp_energy = 0.0;
  double gap = 0.0;
  Matrix frame;
  Matrix projector;
  Matrix resolvent;
  Matrix dq_frame;
  Matrix dp_frame;
};

// Band frame over a phase-space region.
class PhaseSpaceFrame {
 public:
  // Band eigenvectors rotated into polar alignment with a fixed n × m frame.
  static PhaseSpaceFrame reference(PhaseSpaceFamily family, BandSelection band, Matrix reference);
  // Explicit frame map; missing derivatives are differenced.
  static PhaseSpaceFrame model_supplied(PhaseSpaceFamily family, BandSelection band, PhaseFn frame,
                                        PhaseFn dq = {}, PhaseFn dp = {});

  PhasePoint at(double q, double p) const;
  const PhaseSpaceFamily& family() const { return family_; }
  const BandSelection& band() const { return band_; }
  GaugePolicy gauge() const { return gauge_; }

 private:
  PhaseSpaceFrame(PhaseSpaceFamily family, BandSelection band, GaugePolicy gauge)
      : family_(std::move(family)), band_(std::move(band)), gauge_(gauge) {}
  Matrix frame_only(double q, double p) const;

  PhaseSpaceFamily family_;
  BandSelection band_;
  GaugePolicy gauge_;
  Matrix reference_;
  PhaseFn frame_;
  PhaseFn dq_frame_;
  PhaseFn dp_frame_;
};

struct SpaceAdiabaticProblem {
  PhaseSpaceFrame frames;
  double epsilon = 0.1;
  PositionGrid grid{16.0, 256};
};

// E·1 − (iε/2)⟨ψ_α|{H + E, ψ_β}⟩ truncated at the given order (0 or 1).
Matrix effective_symbol_value(const PhasePoint& pt, double epsilon, int order);
// The bracket term ⟨ψ_α|{H + E, ψ_β}⟩ · (−i/2), i.e. the ε¹ coefficient.
Matrix first_order_coefficient(const PhasePoint& pt);
Symbol effective_symbol(const SpaceAdiabaticProblem& problem, int order);

// U₀(q, p) = Σ_α |ψ_α(q, p)⟩⟨χ_α|.
Symbol intertwiner_symbol(const SpaceAdiabaticProblem& problem);

// Position-only family V(q) with a band frame along q. Kinetic energy p²/2.
struct BOModel {
  FrameField frames;
  double epsilon = 0.1;
  PositionGrid grid{16.0, 512};

  int dimension() const { return frames.family().dimension(); }
  int multiplicity() const { return frames.band().multiplicity(); }
};

// Frame along q: parallel transport over the grid (real frames for real V)
// unless a frame map is supplied.
FrameField bo_transport_frames(const ParameterFamily& potential, const BandSelection& band,
                               const PositionGrid& grid);

// A(q) = i⟨ψ_α(q)|∇ψ_β(q)⟩ at each grid point.
std::vector<Matrix> berry_connection(const BOModel& bo);

// Individual pieces of the effective symbol at one point.
struct BOTerms {
  Matrix kinetic;            // p²/2 · 1
  Matrix energy;             // e(q) · 1
  Matrix first;              // −p A, the ε¹ coefficient
  Matrix connection_square;  // A²/2
  Matrix born_huang;         // ½⟨∇ψ_α|(1 − P)∇ψ_β⟩
  Matrix mass_correction;    // −p²⟨∇ψ_α|(V − e)^{-1}(1 − P)∇ψ_β⟩
};

BOTerms bo_terms(const BandPoint& pt, double p);

// Order 0: p²/2 + e. Order 1: Peierls form ½(p − εA)² + e. Order 2: adds the
// geometric and mass-renormalization ε² terms.
Matrix bo_effective_value(const BandPoint& pt, double p, double epsilon, int order);
Symbol bo_effective_symbol(const BOModel& bo, int order);

// |ψ_α⟩ + iε p (V − e)^{-1}(1 − P)|∇ψ_α⟩ (order 1) or |ψ_α⟩ (order 0).
Matrix bo_intertwiner_value(const BandPoint& pt, double p, double epsilon, int order);
Symbol bo_intertwiner_symbol(const BOModel& bo, int order = 1);

// Same BO Hamiltonian p²/2 + V(q) viewed as a generic phase-space symbol,
// with the BO frame reused at every p.
PhaseSpaceFrame bo_phase_space_frame(const BOModel& bo);

struct BOComparison {
  double error = 0.0;         // ‖ψ_t − Û χ_t‖
  double leakage = 0.0;       // ‖(1 − P(x̂)) ψ_t‖
  double initial_norm = 0.0;  // ‖Û χ₀‖
  double norm_drift = 0.0;    // | ‖ψ_t‖ − ‖ψ₀‖ |
  double halving_difference = 0.0;
  double boundary_mass = 0.0;
  GridState exact;
  GridState reconstructed;
};

struct BOOrders {
  int effective = 2;
  int intertwiner = 1;
};

BOComparison propagate_and_compare(const BOModel& bo, const GridState& chi0, double t_final,
                                   BOOrders orders, const SplitStepOptions& options = {});

}  // namespace adiaband
