#include "spectral/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "numerics/errors.hpp"

namespace adiaband {

namespace {

double fd_step(double scale) {
  return std::cbrt(std::numeric_limits<double>::epsilon()) * scale;
}

}  // namespace

const std::vector<int>& SpectralDecomposition::cluster_containing(int index) const {
  for (const auto& c : clusters)
    if (std::find(c.begin(), c.end(), index) != c.end()) return c;
  throw ValidationError("eigenvalue index out of range");
}

BandSelection BandSelection::contiguous(int first, int multiplicity, double min_gap) {
  if (first < 0 || multiplicity < 1) throw ValidationError("invalid band selection");
  if (!(min_gap > 0.0)) throw ValidationError("band min_gap must be positive");
  BandSelection band;
  band.min_gap = min_gap;
  for (int i = 0; i < multiplicity; ++i) band.indices.push_back(first + i);
  return band;
}

void require_hermitian(const Matrix& h, double tol) {
  if (h.rows() != h.cols()) throw NonHermitianError("matrix is not square");
  // Frobenius norms: cheap, and within a factor sqrt(n) of the spectral ones.
  const double scale = h.norm();
  const double defect = (h - h.adjoint()).norm();
  if (defect > tol * std::max(scale, 1.0)) {
    std::ostringstream msg;
    msg << "matrix is not Hermitian (defect " << defect << ", norm " << scale << ")";
    throw NonHermitianError(msg.str());
  }
}

double default_degeneracy_tolerance(const RealVector& values) {
  if (values.size() == 0) return 0.0;
  return 1e-8 * (values(values.size() - 1) - values(0));
}

SpectralDecomposition decompose(const Matrix& h, std::optional<double> degeneracy_tol) {
  require_hermitian(h);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(h));
  if (solver.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");

  SpectralDecomposition dec;
  dec.values = solver.eigenvalues();
  dec.vectors = solver.eigenvectors();
  const double tol = degeneracy_tol.value_or(default_degeneracy_tolerance(dec.values));
  for (int i = 0; i < dec.size(); ++i) {
    if (i == 0 || dec.values(i) - dec.values(i - 1) > tol)
      dec.clusters.emplace_back();
    dec.clusters.back().push_back(i);
  }
  return dec;
}

void require_single_cluster(const SpectralDecomposition& dec, const BandSelection& band) {
  if (band.indices.empty()) throw ValidationError("empty band selection");
  for (std::size_t i = 0; i < band.indices.size(); ++i) {
    const int idx = band.indices[i];
    if (idx < 0 || idx >= dec.size()) throw ValidationError("band index out of range");
    if (i > 0 && idx != band.indices[i - 1] + 1)
      throw ValidationError("band indices must be contiguous");
  }
  const auto& cluster = dec.cluster_containing(band.indices.front());
  if (cluster != band.indices) {
    std::ostringstream msg;
    msg << "band multiplicity change: selected " << band.multiplicity()
        << " indices, degeneracy cluster has " << cluster.size();
    throw BandTrackingError(msg.str());
  }
}

double band_energy(const SpectralDecomposition& dec, const BandSelection& band) {
  double sum = 0.0;
  for (int idx : band.indices) sum += dec.values(idx);
  return sum / band.multiplicity();
}

Matrix band_projector(const SpectralDecomposition& dec, const BandSelection& band) {
  require_single_cluster(dec, band);
  const Matrix v = dec.vectors.middleCols(band.indices.front(), band.multiplicity());
  return v * v.adjoint();
}

double gap(const SpectralDecomposition& dec, const BandSelection& band) {
  const double e = band_energy(dec, band);
  double g = std::numeric_limits<double>::infinity();
  for (int i = 0; i < dec.size(); ++i) {
    if (std::find(band.indices.begin(), band.indices.end(), i) != band.indices.end()) continue;
    g = std::min(g, std::abs(dec.values(i) - e));
  }
  return g;
}

Matrix reduced_resolvent(const Matrix& h, double energy, const Matrix& projector,
                         double min_gap) {
  const Eigen::Index n = h.rows();
  const Matrix q = Matrix::Identity(n, n) - projector;
  const Matrix shifted = h - energy * Matrix::Identity(n, n);
  // On range(P) the compressed operator is the identity, so eigenvectors
  // there are recognisable by their weight in P.
  const Matrix compressed = hermitian_part(q * shifted * q + projector);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(compressed);
  if (solver.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  Matrix r = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Vector v = solver.eigenvectors().col(k);
    const double in_band = (projector * v).squaredNorm();
    if (in_band > 0.5) continue;
    const double mu = solver.eigenvalues()(k);
    if (std::abs(mu) < min_gap) {
      std::ostringstream msg;
      msg << "gap " << std::abs(mu) << " below minimum " << min_gap;
      throw GapError(msg.str());
    }
    r += (v * v.adjoint()) / mu;
  }
  return r;
}

Matrix reduced_resolvent(const SpectralDecomposition& dec, const BandSelection& band) {
  require_single_cluster(dec, band);
  const double e = band_energy(dec, band);
  const Eigen::Index n = dec.vectors.rows();
  Matrix r = Matrix::Zero(n, n);
  for (int i = 0; i < dec.size(); ++i) {
    if (std::find(band.indices.begin(), band.indices.end(), i) != band.indices.end()) continue;
    const double d = dec.values(i) - e;
    if (std::abs(d) < band.min_gap) {
      std::ostringstream msg;
      msg << "gap " << std::abs(d) << " below minimum " << band.min_gap;
      throw GapError(msg.str());
    }
    r += (dec.vectors.col(i) * dec.vectors.col(i).adjoint()) / d;
  }
  return r;
}

ParameterFamily::ParameterFamily(int dimension, MatrixFn hamiltonian, MatrixFn derivative,
                                 double parameter_scale)
    : dimension_(dimension),
      hamiltonian_(std::move(hamiltonian)),
      derivative_(std::move(derivative)),
      scale_(parameter_scale) {
  if (dimension_ < 1) throw ValidationError("family dimension must be positive");
  if (!hamiltonian_) throw ValidationError("family needs an evaluation map");
  if (!(scale_ > 0.0)) throw ValidationError("parameter scale must be positive");
}

Matrix ParameterFamily::operator()(double s) const {
  Matrix h = hamiltonian_(s);
  if (h.rows() != dimension_ || h.cols() != dimension_)
    throw ValidationError("family evaluation has wrong dimension");
  require_hermitian(h);
  return h;
}

double ParameterFamily::finite_difference_step() const { return fd_step(scale_); }

Matrix ParameterFamily::derivative(double s) const {
  if (derivative_) return derivative_(s);
  const double h = finite_difference_step();
  return (hamiltonian_(s + h) - hamiltonian_(s - h)) / (2.0 * h);
}

PhaseSpaceFamily::PhaseSpaceFamily(int dimension, PhaseFn hamiltonian, PhaseFn dq, PhaseFn dp,
                                   double q_scale, double p_scale)
    : dimension_(dimension),
      hamiltonian_(std::move(hamiltonian)),
      dq_(std::move(dq)),
      dp_(std::move(dp)),
      q_scale_(q_scale),
      p_scale_(p_scale) {
  if (dimension_ < 1) throw ValidationError("family dimension must be positive");
  if (!hamiltonian_) throw ValidationError("family needs an evaluation map");
}

Matrix PhaseSpaceFamily::operator()(double q, double p) const {
  Matrix h = hamiltonian_(q, p);
  if (h.rows() != dimension_ || h.cols() != dimension_)
    throw ValidationError("symbol evaluation has wrong dimension");
  require_hermitian(h);
  return h;
}

Matrix PhaseSpaceFamily::dq(double q, double p) const {
  if (dq_) return dq_(q, p);
  const double h = fd_step(q_scale_);
  return (hamiltonian_(q + h, p) - hamiltonian_(q - h, p)) / (2.0 * h);
}

Matrix PhaseSpaceFamily::dp(double q, double p) const {
  if (dp_) return dp_(q, p);
  const double h = fd_step(p_scale_);
  return (hamiltonian_(q, p + h) - hamiltonian_(q, p - h)) / (2.0 * h);
}

ParameterFamily PhaseSpaceFamily::at_momentum(double p) const {
  auto self = *this;
  return ParameterFamily(
      dimension_, [self, p](double q) { return self(q, p); },
      [self, p](double q) { return self.dq(q, p); }, q_scale_);
}

}  // namespace adiaband
