#include "weyl/weyl.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <unsupported/Eigen/FFT>

#include "numerics/errors.hpp"

namespace adiaband {

namespace {

constexpr int kResolvedBasisSize = 24;

double fd_step() { return std::cbrt(std::numeric_limits<double>::epsilon()); }

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

PositionGrid::PositionGrid(double length, int points) : length_(length), points_(points) {
  if (!(length > 0.0)) throw ValidationError("grid length must be positive");
  if (points < 2 || !power_of_two(points))
    throw ValidationError("grid size must be a power of two");
}

double PositionGrid::dxi() const { return 2.0 * std::numbers::pi / length_; }

double PositionGrid::xi(int n) const {
  const int signed_index = n < points_ / 2 ? n : n - points_;
  return signed_index * dxi();
}

double PositionGrid::xi_max() const { return 0.5 * points_ * dxi(); }

RealVector PositionGrid::positions() const {
  RealVector x(points_);
  for (int j = 0; j < points_; ++j) x(j) = this->x(j);
  return x;
}

RealVector PositionGrid::momenta() const {
  RealVector k(points_);
  for (int n = 0; n < points_; ++n) k(n) = xi(n);
  return k;
}

Symbol::Symbol(int rows, int cols, Eval value, Eval dq, Eval dp)
    : rows_(rows), cols_(cols), value_(std::move(value)), dq_(std::move(dq)), dp_(std::move(dp)) {
  if (rows < 1 || cols < 1) throw ValidationError("symbol shape must be positive");
  if (!value_) throw ValidationError("symbol needs an evaluation map");
}

Symbol Symbol::scalar(std::function<double(double, double)> value,
                      std::function<double(double, double)> dq,
                      std::function<double(double, double)> dp) {
  auto wrap = [](std::function<double(double, double)> f) -> Eval {
    if (!f) return {};
    return [f](double q, double p) { return Matrix::Constant(1, 1, f(q, p)); };
  };
  Symbol s(1, 1, wrap(value), wrap(dq), wrap(dp));
  s.hermitian_ = true;
  return s;
}

Symbol Symbol::constant(const Matrix& value) {
  const Matrix zero = Matrix::Zero(value.rows(), value.cols());
  Symbol s(static_cast<int>(value.rows()), static_cast<int>(value.cols()),
           [value](double, double) { return value; }, [zero](double, double) { return zero; },
           [zero](double, double) { return zero; });
  s.hermitian_ = value.rows() == value.cols() && hermiticity_defect(value) <= 1e-12;
  return s;
}

Matrix Symbol::operator()(double q, double p) const { return value_(q, p); }

Matrix Symbol::dq(double q, double p) const {
  if (dq_) return dq_(q, p);
  const double h = fd_step();
  return (value_(q + h, p) - value_(q - h, p)) / (2.0 * h);
}

Matrix Symbol::dp(double q, double p) const {
  if (dp_) return dp_(q, p);
  const double h = fd_step();
  return (value_(q, p + h) - value_(q, p - h)) / (2.0 * h);
}

Symbol& Symbol::declare_hermitian(bool on) {
  if (on && rows_ != cols_) throw ValidationError("only square symbols can be Hermitian");
  hermitian_ = on;
  return *this;
}

Symbol& Symbol::declare_q_bandwidth(double wavenumber) {
  q_bandwidth_ = wavenumber;
  return *this;
}

Symbol& Symbol::declare_p_extent(double extent) {
  p_extent_ = extent;
  return *this;
}

Symbol operator+(const Symbol& a, const Symbol& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw ValidationError("symbol shapes differ");
  Symbol s(a.rows_, a.cols_, [a, b](double q, double p) { return Matrix(a(q, p) + b(q, p)); },
           [a, b](double q, double p) { return Matrix(a.dq(q, p) + b.dq(q, p)); },
           [a, b](double q, double p) { return Matrix(a.dp(q, p) + b.dp(q, p)); });
  s.hermitian_ = a.hermitian_ && b.hermitian_;
  s.q_bandwidth_ = std::max(a.q_bandwidth_, b.q_bandwidth_);
  s.p_extent_ = std::max(a.p_extent_, b.p_extent_);
  return s;
}

Symbol operator*(Complex c, const Symbol& a) {
  Symbol s(a.rows_, a.cols_, [a, c](double q, double p) { return Matrix(c * a(q, p)); },
           [a, c](double q, double p) { return Matrix(c * a.dq(q, p)); },
           [a, c](double q, double p) { return Matrix(c * a.dp(q, p)); });
  s.hermitian_ = a.hermitian_ && c.imag() == 0.0;
  s.q_bandwidth_ = a.q_bandwidth_;
  s.p_extent_ = a.p_extent_;
  return s;
}

Symbol operator-(const Symbol& a, const Symbol& b) { return a + Complex(-1.0) * b; }

Symbol operator*(const Symbol& a, const Symbol& b) {
  if (a.cols_ != b.rows_) throw ValidationError("symbol shapes do not compose");
  Symbol s(
      a.rows_, b.cols_, [a, b](double q, double p) { return Matrix(a(q, p) * b(q, p)); },
      [a, b](double q, double p) { return Matrix(a.dq(q, p) * b(q, p) + a(q, p) * b.dq(q, p)); },
      [a, b](double q, double p) { return Matrix(a.dp(q, p) * b(q, p) + a(q, p) * b.dp(q, p)); });
  s.q_bandwidth_ = a.q_bandwidth_ + b.q_bandwidth_;
  s.p_extent_ = std::max(a.p_extent_, b.p_extent_);
  return s;
}

Symbol Symbol::adjoint() const {
  const Symbol a = *this;
  Symbol s(cols_, rows_, [a](double q, double p) { return Matrix(a(q, p).adjoint()); },
           [a](double q, double p) { return Matrix(a.dq(q, p).adjoint()); },
           [a](double q, double p) { return Matrix(a.dp(q, p).adjoint()); });
  s.hermitian_ = hermitian_;
  s.q_bandwidth_ = q_bandwidth_;
  s.p_extent_ = p_extent_;
  return s;
}

GridOperator weyl_quantize(const Symbol& symbol, const PositionGrid& grid, double epsilon) {
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  const int n = grid.points();
  const double nyquist = std::numbers::pi / grid.dx();
  if (symbol.q_bandwidth() >= nyquist) {
    std::ostringstream msg;
    msg << "aliasing: symbol q-bandwidth " << symbol.q_bandwidth() << " reaches the grid Nyquist "
        << nyquist;
    throw AliasingError(msg.str());
  }
  if (std::isfinite(symbol.p_extent()) && symbol.p_extent() > epsilon * grid.xi_max()) {
    std::ostringstream msg;
    msg << "aliasing: symbol momentum extent " << symbol.p_extent()
        << " exceeds the grid momentum range " << epsilon * grid.xi_max();
    throw AliasingError(msg.str());
  }

  const int rows = symbol.rows(), cols = symbol.cols();
  GridOperator op;
  op.points = n;
  op.rows_per_point = rows;
  op.cols_per_point = cols;
  op.matrix = Matrix::Zero(static_cast<Eigen::Index>(n) * rows, static_cast<Eigen::Index>(n) * cols);

  Eigen::FFT<double> fft;
  std::vector<Matrix> values(n);
  std::vector<std::vector<Complex>> kernels(static_cast<std::size_t>(rows * cols),
                                            std::vector<Complex>(n));
  std::vector<Complex> column(n);
  for (int s = 0; s <= 2 * (n - 1); ++s) {
    const double mid = -0.5 * grid.length() + 0.5 * s * grid.dx();
    for (int k = 0; k < n; ++k) {
      values[k] = symbol(mid, epsilon * grid.xi(k));
      if (values[k].rows() != rows || values[k].cols() != cols)
        throw ValidationError("symbol evaluation has wrong shape");
      if (symbol.hermitian() &&
          (values[k] - values[k].adjoint()).norm() > 1e-12 * std::max(1.0, values[k].norm()))
        throw NonHermitianError("symbol declared Hermitian is not Hermitian at a sample point");
    }
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) {
        for (int k = 0; k < n; ++k) column[k] = values[k](r, c);
        fft.inv(kernels[r * cols + c], column);
      }
    const int j_lo = std::max(0, s - (n - 1));
    const int j_hi = std::min(n - 1, s);
    for (int j = j_lo; j <= j_hi; ++j) {
      const int k = s - j;
      const int d = ((j - k) % n + n) % n;
      for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
          op.matrix(static_cast<Eigen::Index>(j) * rows + r, static_cast<Eigen::Index>(k) * cols + c) =
              kernels[r * cols + c][d];
    }
  }
  return op;
}

Matrix position_operator(const PositionGrid& grid) {
  const RealVector x = grid.positions();
  return x.cast<Complex>().asDiagonal();
}

Matrix momentum_operator(const PositionGrid& grid, double epsilon) {
  const int n = grid.points();
  Eigen::FFT<double> fft;
  Matrix d(n, n);
  std::vector<Complex> unit(n), spectrum(n), back(n);
  for (int k = 0; k < n; ++k) {
    std::fill(unit.begin(), unit.end(), Complex(0.0));
    unit[k] = 1.0;
    fft.fwd(spectrum, unit);
    for (int m = 0; m < n; ++m) spectrum[m] *= epsilon * grid.xi(m);
    fft.inv(back, spectrum);
    for (int j = 0; j < n; ++j) d(j, k) = back[j];
  }
  return d;
}

Symbol poisson_bracket(const Symbol& a, const Symbol& b) {
  if (a.cols() != b.rows()) throw ValidationError("symbol shapes do not compose");
  return Symbol(a.rows(), b.cols(), [a, b](double q, double p) {
    return Matrix(a.dp(q, p) * b.dq(q, p) - a.dq(q, p) * b.dp(q, p));
  });
}

Matrix hermite_subspace(const PositionGrid& grid, int count) {
  const int n = grid.points();
  Matrix basis(n, count);
  for (int j = 0; j < n; ++j) {
    const double x = grid.x(j);
    double prev = 0.0;
    double cur = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
    for (int k = 0; k < count; ++k) {
      basis(j, k) = cur;
      const double next = std::sqrt(2.0 / (k + 1)) * x * cur - std::sqrt(double(k) / (k + 1)) * prev;
      prev = cur;
      cur = next;
    }
  }
  Eigen::HouseholderQR<Matrix> qr(basis);
  return qr.householderQ() * Matrix::Identity(n, count);
}

double moyal_defect(const Symbol& a, const Symbol& b, const PositionGrid& grid, double epsilon,
                    DefectNorm norm) {
  if (a.rows() != 1 || a.cols() != 1 || b.rows() != 1 || b.cols() != 1)
    throw ValidationError("Moyal defect is defined for scalar symbols");
  const Matrix qa = weyl_quantize(a, grid, epsilon).matrix;
  const Matrix qb = weyl_quantize(b, grid, epsilon).matrix;
  const Matrix qc = weyl_quantize(poisson_bracket(b, a), grid, epsilon).matrix;
  const Matrix defect = qa * qb - qb * qa - kI * epsilon * qc;
  if (norm == DefectNorm::kGrid) return spectral_norm(defect);
  return spectral_norm(defect * hermite_subspace(grid, kResolvedBasisSize));
}

double GridState::norm() const { return std::sqrt(grid.dx()) * values.norm(); }

void GridState::normalize() {
  const double n = norm();
  if (!(n > 0.0)) throw NumericalError("cannot normalize a zero state");
  values /= n;
}

double GridState::boundary_mass() const {
  const double edge = 0.45 * grid.length();
  double outer = 0.0, total = 0.0;
  for (int j = 0; j < grid.points(); ++j) {
    const double w = values.segment(static_cast<Eigen::Index>(j) * components, components).squaredNorm();
    total += w;
    if (std::abs(grid.x(j)) >= edge) outer += w;
  }
  return total > 0.0 ? outer / total : 0.0;
}

GridState gaussian_state(const PositionGrid& grid, double center, double momentum, double width,
                         double epsilon, const Vector& spinor) {
  GridState st;
  st.grid = grid;
  st.components = static_cast<int>(spinor.size());
  st.values.resize(static_cast<Eigen::Index>(grid.points()) * st.components);
  for (int j = 0; j < grid.points(); ++j) {
    const double x = grid.x(j);
    const Complex amp = std::exp(-0.5 * std::pow((x - center) / width, 2) + kI * momentum * x / epsilon);
    st.values.segment(static_cast<Eigen::Index>(j) * st.components, st.components) = amp * spinor;
  }
  st.normalize();
  return st;
}

namespace {

GridState strang(const std::vector<Matrix>& half_potential, const std::vector<Complex>& kinetic,
                 const GridState& initial, int steps) {
  const int n = initial.grid.points();
  const int d = initial.components;
  GridState st = initial;
  Eigen::FFT<double> fft;
  std::vector<Complex> buf(n), spectrum(n);
  auto apply_potential = [&](Vector& v) {
    for (int j = 0; j < n; ++j) {
      auto seg = v.segment(static_cast<Eigen::Index>(j) * d, d);
      seg = half_potential[j] * seg;
    }
  };
  for (int step = 0; step < steps; ++step) {
    apply_potential(st.values);
    for (int r = 0; r < d; ++r) {
      for (int j = 0; j < n; ++j) buf[j] = st.values(static_cast<Eigen::Index>(j) * d + r);
      fft.fwd(spectrum, buf);
      for (int m = 0; m < n; ++m) spectrum[m] *= kinetic[m];
      fft.inv(buf, spectrum);
      for (int j = 0; j < n; ++j) st.values(static_cast<Eigen::Index>(j) * d + r) = buf[j];
    }
    apply_potential(st.values);
  }
  return st;
}

GridState strang_run(const MatrixFn& potential, const GridState& initial, double epsilon,
                     double t_final, int steps) {
  const PositionGrid& grid = initial.grid;
  const double dt = t_final / steps;
  std::vector<Matrix> half(grid.points());
  for (int j = 0; j < grid.points(); ++j) {
    const Matrix v = potential(grid.x(j));
    if (v.rows() != initial.components || v.cols() != initial.components)
      throw ValidationError("potential dimension does not match the state");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(v));
    const Vector phases = (-kI * (0.5 * dt / epsilon) * solver.eigenvalues().cast<Complex>()).array().exp();
    half[j] = solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
  }
  std::vector<Complex> kinetic(grid.points());
  for (int m = 0; m < grid.points(); ++m) {
    const double p = epsilon * grid.xi(m);
    kinetic[m] = std::exp(-kI * (0.5 * p * p) * dt / epsilon);
  }
  return strang(half, kinetic, initial, steps);
}

void check_boundary(const GridState& st, double tolerance, const char* when) {
  const double mass = st.boundary_mass();
  if (mass > tolerance) {
    std::ostringstream msg;
    msg << "boundary contamination " << when << ": outer mass fraction " << mass;
    throw BoundaryError(msg.str());
  }
}

}  // namespace

SplitStepReport split_step_propagate(const MatrixFn& potential, const GridState& initial,
                                     double epsilon, double t_final,
                                     const SplitStepOptions& options) {
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  if (!(t_final >= 0.0)) throw ValidationError("final time must be nonnegative");
  if (!(options.dt > 0.0)) throw ValidationError("time step must be positive");
  check_boundary(initial, options.boundary_tolerance, "at start");
  SplitStepReport report;
  const int steps = std::max(1, static_cast<int>(std::ceil(t_final / options.dt - 1e-9)));
  if (t_final == 0.0) {
    report.state = initial;
    return report;
  }
  if (options.verify_by_halving) {
    const GridState coarse = strang_run(potential, initial, epsilon, t_final, steps);
    report.state = strang_run(potential, initial, epsilon, t_final, 2 * steps);
    report.steps = 2 * steps;
    GridState diff = report.state;
    diff.values -= coarse.values;
    report.halving_difference = diff.norm();
    if (report.halving_difference > options.halving_tolerance) {
      std::ostringstream msg;
      msg << "time step too large: step-halving difference " << report.halving_difference
          << " exceeds " << options.halving_tolerance;
      throw ToleranceError(msg.str());
    }
  } else {
    report.state = strang_run(potential, initial, epsilon, t_final, steps);
    report.steps = steps;
  }
  check_boundary(report.state, options.boundary_tolerance, "at final time");
  return report;
}

Vector dense_propagate(const Matrix& hamiltonian, const Vector& psi, double epsilon, double t) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(hamiltonian));
  if (solver.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  const Vector phases =
      (-kI * (t / epsilon) * solver.eigenvalues().cast<Complex>()).array().exp();
  return solver.eigenvectors() * (phases.asDiagonal() * (solver.eigenvectors().adjoint() * psi));
}

}  // namespace adiaband
