#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "numerics/types.hpp"

namespace adiaband {

// Periodic box [−L/2, L/2) with N points; dual momenta (2π/L)·{−N/2, …, N/2−1}
// stored in FFT order.
class PositionGrid {
 public:
  PositionGrid(double length, int points);

  double length() const { return length_; }
  int points() const { return points_; }
  double dx() const { return length_ / points_; }
  double dxi() const;
  double x(int j) const { return -0.5 * length_ + j * dx(); }
  double xi(int n) const;
  double xi_max() const;
  RealVector positions() const;
  RealVector momenta() const;

 private:
  double length_;
  int points_;
};

// Matrix-valued phase-space function (q, p) ↦ rows × cols.
class Symbol {
 public:
  using Eval = std::function<Matrix(double q, double p)>;

  Symbol() = default;
  Symbol(int rows, int cols, Eval value, Eval dq = {}, Eval dp = {});
  static Symbol scalar(std::function<double(double, double)> value,
                       std::function<double(double, double)> dq = {},
                       std::function<double(double, double)> dp = {});
  static Symbol constant(const Matrix& value);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Matrix operator()(double q, double p) const;
  Matrix dq(double q, double p) const;
  Matrix dp(double q, double p) const;

  // Declared properties checked at quantization time.
  Symbol& declare_hermitian(bool on = true);
  Symbol& declare_q_bandwidth(double wavenumber);
  Symbol& declare_p_extent(double extent);
  bool hermitian() const { return hermitian_; }
  double q_bandwidth() const { return q_bandwidth_; }
  double p_extent() const { return p_extent_; }

  friend Symbol operator+(const Symbol& a, const Symbol& b);
  friend Symbol operator-(const Symbol& a, const Symbol& b);
  friend Symbol operator*(Complex c, const Symbol& a);
  // Pointwise matrix product.
  friend Symbol operator*(const Symbol& a, const Symbol& b);
  Symbol adjoint() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  Eval value_;
  Eval dq_;
  Eval dp_;
  bool hermitian_ = false;
  double q_bandwidth_ = 0.0;
  double p_extent_ = std::numeric_limits<double>::infinity();
};

// Operator on spinor-valued grid functions, index j·d + r.
struct GridOperator {
  Matrix matrix;
  int points = 0;
  int rows_per_point = 0;
  int cols_per_point = 0;
};

// Midpoint (Weyl) rule K(x, x′) = (1/N) Σ_ξ e^{iξ(x−x′)} a((x+x′)/2, εξ).
GridOperator weyl_quantize(const Symbol& symbol, const PositionGrid& grid, double epsilon);

// Multiplication by x and the spectral derivative −iε∂ₓ.
Matrix position_operator(const PositionGrid& grid);
Matrix momentum_operator(const PositionGrid& grid, double epsilon);

// {A, B} = ∇ₚA·∇_qB − ∇_qA·∇ₚB, pointwise matrix products. B may be rectangular.
Symbol poisson_bracket(const Symbol& a, const Symbol& b);

enum class DefectNorm { kGrid, kResolved };

// Orthonormal grid columns spanning the first `count` Hermite functions of
// unit width centred at 0.
Matrix hermite_subspace(const PositionGrid& grid, int count);

// ‖[Â, B̂] − iε Op({B, A})‖ for scalar symbols: the bracket argument order makes
// the subtracted term the leading Moyal commutator for the bracket convention
// above. kResolved restricts to the span of the first 24 Hermite functions.
double moyal_defect(const Symbol& a, const Symbol& b, const PositionGrid& grid, double epsilon,
                    DefectNorm norm = DefectNorm::kResolved);

struct GridState {
  PositionGrid grid{1.0, 2};
  int components = 1;
  Vector values;  // index j·components + r

  double norm() const;
  void normalize();
  // Mass fraction within the outer 10% of the box (5% at each end).
  double boundary_mass() const;
};

GridState gaussian_state(const PositionGrid& grid, double center, double momentum, double width,
                         double epsilon, const Vector& spinor);

struct SplitStepOptions {
  double dt = 1e-3;
  bool verify_by_halving = true;
  double halving_tolerance = 1e-6;
  double boundary_tolerance = 1e-8;
};

struct SplitStepReport {
  GridState state;
  double halving_difference = 0.0;
  int steps = 0;
};

// Strang splitting for −(ε²/2)∂ₓ² + V(x) (V matrix-valued, position only).
SplitStepReport split_step_propagate(const MatrixFn& potential, const GridState& initial,
                                     double epsilon, double t_final,
                                     const SplitStepOptions& options = {});

// exp(−iHt/ε)ψ for a Hermitian grid matrix by dense diagonalization.
Vector dense_propagate(const Matrix& hamiltonian, const Vector& psi, double epsilon, double t);

}  // namespace adiaband
