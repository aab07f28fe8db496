#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "numerics/types.hpp"

namespace adiaband {

// Eigenpairs of a Hermitian matrix, eigenvalues ascending, with indices grouped
// into clusters of (numerically) degenerate eigenvalues.
struct SpectralDecomposition {
  RealVector values;
  Matrix vectors;
  std::vector<std::vector<int>> clusters;

  int size() const { return static_cast<int>(values.size()); }
  const std::vector<int>& cluster_containing(int index) const;
};

// A contiguous run of eigenvalue indices forming one isolated band.
struct BandSelection {
  std::vector<int> indices;
  double min_gap = 1e-6;

  int multiplicity() const { return static_cast<int>(indices.size()); }

  static BandSelection contiguous(int first, int multiplicity, double min_gap = 1e-6);
};

inline constexpr double kHermiticityTolerance = 1e-12;

// Throws NonHermitianError when ‖H − H†‖ exceeds tol relative to ‖H‖.
void require_hermitian(const Matrix& h, double tol = kHermiticityTolerance);

// Default clustering tolerance: 1e-8 times the spectral diameter.
double default_degeneracy_tolerance(const RealVector& ascending_values);

SpectralDecomposition decompose(const Matrix& h, std::optional<double> degeneracy_tol = {});

// Rejects selections that are not contiguous or that split a degeneracy cluster.
void require_single_cluster(const SpectralDecomposition& dec, const BandSelection& band);

double band_energy(const SpectralDecomposition& dec, const BandSelection& band);

Matrix band_projector(const SpectralDecomposition& dec, const BandSelection& band);

// Distance from the band energy to the nearest eigenvalue outside the band.
double gap(const SpectralDecomposition& dec, const BandSelection& band);

// (H − E)^{-1}(1 − P). The restriction of H − E to range(1 − P) must stay
// at least min_gap away from zero, otherwise GapError.
Matrix reduced_resolvent(const Matrix& h, double energy, const Matrix& projector,
                         double min_gap = 1e-6);

// Same operator assembled from an existing decomposition.
Matrix reduced_resolvent(const SpectralDecomposition& dec, const BandSelection& band);

// t ↦ H(t), or q ↦ V(q): Hermitian matrices of fixed dimension along one
// real parameter. Missing derivatives fall back to central differences with
// step cbrt(machine epsilon) · parameter_scale.
class ParameterFamily {
 public:
  ParameterFamily() = default;
  ParameterFamily(int dimension, MatrixFn hamiltonian, MatrixFn derivative = {},
                  double parameter_scale = 1.0);

  int dimension() const { return dimension_; }
  Matrix operator()(double s) const;
  Matrix derivative(double s) const;
  bool has_analytic_derivative() const { return static_cast<bool>(derivative_); }
  double finite_difference_step() const;

 private:
  int dimension_ = 0;
  MatrixFn hamiltonian_;
  MatrixFn derivative_;
  double scale_ = 1.0;
};

using PhaseFn = std::function<Matrix(double q, double p)>;

// (q, p) ↦ H(q, p) on a one-dimensional slow phase space.
class PhaseSpaceFamily {
 public:
  PhaseSpaceFamily() = default;
  PhaseSpaceFamily(int dimension, PhaseFn hamiltonian, PhaseFn dq = {}, PhaseFn dp = {},
                   double q_scale = 1.0, double p_scale = 1.0);

  int dimension() const { return dimension_; }
  Matrix operator()(double q, double p) const;
  Matrix dq(double q, double p) const;
  Matrix dp(double q, double p) const;

  // Restriction to a line p = const (as a one-parameter family in q).
  ParameterFamily at_momentum(double p) const;

 private:
  int dimension_ = 0;
  PhaseFn hamiltonian_;
  PhaseFn dq_;
  PhaseFn dp_;
  double q_scale_ = 1.0;
  double p_scale_ = 1.0;
};

}  // namespace adiaband
