#include "space_adiabatic/space_adiabatic.hpp"

#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

#include "numerics/errors.hpp"
#include "numerics/ode.hpp"

namespace adiaband {

namespace {

double fd_step() { return std::cbrt(std::numeric_limits<double>::epsilon()); }

Matrix antihermitian_part(const Matrix& m) { return 0.5 * (m - m.adjoint()); }

BandSelection tracked(const BandSelection& band, std::vector<int> indices) {
  BandSelection b = band;
  b.indices = std::move(indices);
  return b;
}

// Memo of the last evaluated band point. Quantization sweeps p at fixed
// midpoint q, so one slot removes almost all repeated decompositions.
class BandPointCache {
 public:
  explicit BandPointCache(FrameField frames) : frames_(std::move(frames)) {}

  BandPoint at(double q) {
    std::lock_guard<std::mutex> lock(mutex_);
    if (!valid_ || q != q_) {
      point_ = frames_.at(q);
      q_ = q;
      valid_ = true;
    }
    return point_;
  }

 private:
  FrameField frames_;
  std::mutex mutex_;
  bool valid_ = false;
  double q_ = 0.0;
  BandPoint point_;
};

}  // namespace

PhaseSpaceFrame PhaseSpaceFrame::reference(PhaseSpaceFamily family, BandSelection band,
                                           Matrix reference) {
  if (reference.rows() != family.dimension() || reference.cols() != band.multiplicity())
    throw ValidationError("reference frame has wrong shape");
  PhaseSpaceFrame f(std::move(family), std::move(band), GaugePolicy::kReference);
  f.reference_ = std::move(reference);
  return f;
}

PhaseSpaceFrame PhaseSpaceFrame::model_supplied(PhaseSpaceFamily family, BandSelection band,
                                                PhaseFn frame, PhaseFn dq, PhaseFn dp) {
  if (!frame) throw ValidationError("model-supplied gauge needs a frame map");
  PhaseSpaceFrame f(std::move(family), std::move(band), GaugePolicy::kModelSupplied);
  f.frame_ = std::move(frame);
  f.dq_frame_ = std::move(dq);
  f.dp_frame_ = std::move(dp);
  return f;
}

Matrix PhaseSpaceFrame::frame_only(double q, double p) const {
  if (gauge_ == GaugePolicy::kModelSupplied) return frame_(q, p);
  const auto dec = decompose(family_(q, p));
  const auto indices = match_band(dec, reference_);
  require_single_cluster(dec, tracked(band_, indices));
  return align_frame(dec.vectors(Eigen::all, indices), reference_, q);
}

PhasePoint PhaseSpaceFrame::at(double q, double p) const {
  PhasePoint pt;
  pt.q = q;
  pt.p = p;
  pt.hamiltonian = family_(q, p);
  pt.dq_hamiltonian = family_.dq(q, p);
  pt.dp_hamiltonian = family_.dp(q, p);
  const auto dec = decompose(pt.hamiltonian);
  pt.frame = frame_only(q, p);
  const auto b = tracked(band_, match_band(dec, pt.frame));
  require_single_cluster(dec, b);
  pt.gap = gap(dec, b);
  if (pt.gap < band_.min_gap) {
    std::ostringstream msg;
    msg << "gap " << pt.gap << " below minimum " << band_.min_gap << " at (" << q << ", " << p << ")";
    throw GapError(msg.str());
  }
  pt.energy = band_energy(dec, b);
  const Matrix v = dec.vectors(Eigen::all, b.indices);
  pt.projector = v * v.adjoint();
  pt.resolvent = reduced_resolvent(dec, b);
  const double m = b.multiplicity();
  pt.dq_energy = (pt.projector * pt.dq_hamiltonian).trace().real() / m;
  pt.dp_energy = (pt.projector * pt.dp_hamiltonian).trace().real() / m;

  const double h = fd_step();
  Matrix dq_frame_full, dp_frame_full;
  if (gauge_ == GaugePolicy::kModelSupplied && dq_frame_) {
    dq_frame_full = dq_frame_(q, p);
  } else {
    dq_frame_full = (frame_only(q + h, p) - frame_only(q - h, p)) / (2.0 * h);
  }
  if (gauge_ == GaugePolicy::kModelSupplied && dp_frame_) {
    dp_frame_full = dp_frame_(q, p);
  } else {
    dp_frame_full = (frame_only(q, p + h) - frame_only(q, p - h)) / (2.0 * h);
  }
  // Off-band parts from the resolvent identity, in-band parts from the gauge.
  const Matrix inband_q = antihermitian_part(pt.frame.adjoint() * dq_frame_full);
  const Matrix inband_p = antihermitian_part(pt.frame.adjoint() * dp_frame_full);
  pt.dq_frame = offband_derivative(pt.resolvent, pt.dq_hamiltonian, pt.frame) + pt.frame * inband_q;
  pt.dp_frame = offband_derivative(pt.resolvent, pt.dp_hamiltonian, pt.frame) + pt.frame * inband_p;
  return pt;
}

Matrix first_order_coefficient(const PhasePoint& pt) {
  const Eigen::Index n = pt.hamiltonian.rows();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix bracket = (pt.dp_hamiltonian + pt.dp_energy * id) * pt.dq_frame -
                         (pt.dq_hamiltonian + pt.dq_energy * id) * pt.dp_frame;
  return -0.5 * kI * (pt.frame.adjoint() * bracket);
}

Matrix effective_symbol_value(const PhasePoint& pt, double epsilon, int order) {
  if (order < 0 || order > 1) throw ValidationError("effective symbol order must be 0 or 1");
  const Eigen::Index m = pt.frame.cols();
  Matrix h = pt.energy * Matrix::Identity(m, m);
  if (order >= 1) h += epsilon * first_order_coefficient(pt);
  return hermitian_part(h);
}

Symbol effective_symbol(const SpaceAdiabaticProblem& problem, int order) {
  const auto frames = problem.frames;
  const double eps = problem.epsilon;
  const int m = frames.band().multiplicity();
  Symbol s(m, m, [frames, eps, order](double q, double p) {
    return effective_symbol_value(frames.at(q, p), eps, order);
  });
  s.declare_hermitian();
  return s;
}

Symbol intertwiner_symbol(const SpaceAdiabaticProblem& problem) {
  const auto frames = problem.frames;
  return Symbol(frames.family().dimension(), frames.band().multiplicity(),
                [frames](double q, double p) { return frames.at(q, p).frame; });
}

FrameField bo_transport_frames(const ParameterFamily& potential, const BandSelection& band,
                               const PositionGrid& grid) {
  const double margin = 4.0 * grid.dx();
  const int count = 4 * grid.points() + 33;
  return FrameField::parallel_transport(
      potential, band,
      linspace(-0.5 * grid.length() - margin, 0.5 * grid.length() + margin,
               static_cast<std::size_t>(count)));
}

std::vector<Matrix> berry_connection(const BOModel& bo) {
  std::vector<Matrix> a;
  a.reserve(bo.grid.points());
  for (int j = 0; j < bo.grid.points(); ++j) {
    const auto pt = bo.frames.at(bo.grid.x(j));
    a.push_back(kI * pt.inband_derivative);
  }
  return a;
}

BOTerms bo_terms(const BandPoint& pt, double p) {
  const Eigen::Index m = pt.frame.cols();
  const Matrix id = Matrix::Identity(m, m);
  const Matrix a = kI * pt.inband_derivative;
  const Matrix& off = pt.offband_derivative;
  BOTerms t;
  t.kinetic = 0.5 * p * p * id;
  t.energy = pt.energy * id;
  t.first = -p * a;
  t.connection_square = 0.5 * a * a;
  t.born_huang = 0.5 * off.adjoint() * off;
  t.mass_correction = -p * p * off.adjoint() * pt.resolvent * off;
  return t;
}

Matrix bo_effective_value(const BandPoint& pt, double p, double epsilon, int order) {
  if (order < 0 || order > 2) throw ValidationError("BO effective order must be 0, 1 or 2");
  const auto t = bo_terms(pt, p);
  Matrix h = t.kinetic + t.energy;
  if (order >= 1) h += epsilon * t.first + epsilon * epsilon * t.connection_square;
  if (order >= 2) h += epsilon * epsilon * (t.born_huang + t.mass_correction);
  return hermitian_part(h);
}

Symbol bo_effective_symbol(const BOModel& bo, int order) {
  auto cache = std::make_shared<BandPointCache>(bo.frames);
  const double eps = bo.epsilon;
  const int m = bo.multiplicity();
  Symbol s(m, m, [cache, eps, order](double q, double p) {
    return bo_effective_value(cache->at(q), p, eps, order);
  });
  s.declare_hermitian();
  return s;
}

Matrix bo_intertwiner_value(const BandPoint& pt, double p, double epsilon, int order) {
  if (order < 0 || order > 1) throw ValidationError("BO intertwiner order must be 0 or 1");
  Matrix u = pt.frame;
  if (order >= 1) u += kI * epsilon * p * pt.resolvent * pt.offband_derivative;
  return u;
}

Symbol bo_intertwiner_symbol(const BOModel& bo, int order) {
  auto cache = std::make_shared<BandPointCache>(bo.frames);
  const double eps = bo.epsilon;
  return Symbol(bo.dimension(), bo.multiplicity(), [cache, eps, order](double q, double p) {
    return bo_intertwiner_value(cache->at(q), p, eps, order);
  });
}

PhaseSpaceFrame bo_phase_space_frame(const BOModel& bo) {
  const auto frames = bo.frames;
  const int n = bo.dimension();
  const Matrix id = Matrix::Identity(n, n);
  PhaseSpaceFamily family(
      n, [frames, id](double q, double p) { return Matrix(0.5 * p * p * id + frames.family()(q)); },
      [frames](double q, double) { return frames.family().derivative(q); },
      [id](double, double p) { return Matrix(p * id); });
  const Matrix zero = Matrix::Zero(n, bo.multiplicity());
  return PhaseSpaceFrame::model_supplied(
      family, frames.band(), [frames](double q, double) { return frames.frame(q); },
      [frames](double q, double) { return frames.at(q).frame_derivative; },
      [zero](double, double) { return zero; });
}

BOComparison propagate_and_compare(const BOModel& bo, const GridState& chi0, double t_final,
                                   BOOrders orders, const SplitStepOptions& options) {
  const int n = bo.dimension(), m = bo.multiplicity();
  if (chi0.components != m) throw ValidationError("reduced state must have band multiplicity components");
  if (chi0.grid.points() != bo.grid.points() || chi0.grid.length() != bo.grid.length())
    throw ValidationError("reduced state lives on a different grid");
  const double eps = bo.epsilon;

  const Matrix u = weyl_quantize(bo_intertwiner_symbol(bo, orders.intertwiner), bo.grid, eps).matrix;
  GridState psi0;
  psi0.grid = bo.grid;
  psi0.components = n;
  psi0.values = u * chi0.values;

  const auto& potential = bo.frames.family();
  const auto full = split_step_propagate([&potential](double x) { return potential(x); }, psi0, eps,
                                         t_final, options);

  const Matrix heff = weyl_quantize(bo_effective_symbol(bo, orders.effective), bo.grid, eps).matrix;
  GridState chi_t = chi0;
  chi_t.values = dense_propagate(heff, chi0.values, eps, t_final);
  if (chi_t.boundary_mass() > options.boundary_tolerance) {
    std::ostringstream msg;
    msg << "boundary contamination in the effective dynamics: outer mass fraction "
        << chi_t.boundary_mass();
    throw BoundaryError(msg.str());
  }

  BOComparison out;
  out.exact = full.state;
  out.reconstructed = psi0;
  out.reconstructed.values = u * chi_t.values;
  GridState diff = out.exact;
  diff.values -= out.reconstructed.values;
  out.error = diff.norm();

  GridState outside = out.exact;
  for (int j = 0; j < bo.grid.points(); ++j) {
    const Matrix p = bo.frames.at(bo.grid.x(j)).projector;
    auto seg = outside.values.segment(static_cast<Eigen::Index>(j) * n, n);
    seg = (seg - p * seg).eval();
  }
  out.leakage = outside.norm();
  out.initial_norm = psi0.norm();
  out.norm_drift = std::abs(out.exact.norm() - psi0.norm());
  out.halving_difference = full.halving_difference;
  out.boundary_mass = out.exact.boundary_mass();
  return out;
}

}  // namespace adiaband
