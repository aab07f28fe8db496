#include <cmath>
#include <numbers>

#include "doctest.h"
#include "harness/fit.hpp"
#include "numerics/errors.hpp"
#include "weyl/weyl.hpp"

using namespace adiaband;

namespace {

const std::vector<double> kEpsilons{0.1, 0.05, 0.025, 0.0125};

// Direct O(N³) evaluation of the midpoint rule, independent of the FFT path.
Matrix direct_quadrature(const std::function<Complex(double, double)>& a, const PositionGrid& g,
                         double eps) {
  const int n = g.points();
  Matrix k = Matrix::Zero(n, n);
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) {
      Complex sum = 0;
      const double mid = 0.5 * (g.x(j) + g.x(l));
      for (int m = 0; m < n; ++m)
        sum += std::exp(kI * g.xi(m) * (g.x(j) - g.x(l))) * a(mid, eps * g.xi(m));
      k(j, l) = sum / double(n);
    }
  return k;
}

Symbol sigma_symbol(const Matrix& sigma, std::function<double(double, double)> f) {
  return Symbol(2, 2, [=](double q, double p) { return Matrix(f(q, p) * sigma); });
}

}  // namespace

TEST_CASE("grid: dual spacing and validation") {
  const PositionGrid g(40.0, 256);
  CHECK(g.dx() * g.dxi() == doctest::Approx(2 * std::numbers::pi / 256));
  CHECK(g.xi(128) == doctest::Approx(-128 * g.dxi()));
  CHECK(g.xi(127) == doctest::Approx(127 * g.dxi()));
  CHECK_THROWS_AS(PositionGrid(1.0, 100), ValidationError);
}

TEST_CASE("quantize: position, momentum, and symmetric product") {
  const PositionGrid g(40.0, 256);
  const double eps = 0.05;
  const Matrix x = position_operator(g);
  const Matrix d = momentum_operator(g, eps);
  const auto qq = weyl_quantize(Symbol::scalar([](double q, double) { return q; }), g, eps);
  const auto pp = weyl_quantize(Symbol::scalar([](double, double p) { return p; }), g, eps);
  CHECK(spectral_norm(qq.matrix - x) <= 1e-10);
  CHECK(spectral_norm(pp.matrix - d) <= 1e-10);
  const auto qp = weyl_quantize(Symbol::scalar([](double q, double p) { return q * p; }), g, eps);
  CHECK(spectral_norm(qp.matrix - 0.5 * (x * d + d * x)) <= 1e-8);

  const PositionGrid small(10.0, 64);
  const auto qp_small =
      weyl_quantize(Symbol::scalar([](double q, double p) { return q * p; }), small, eps);
  const Matrix oracle = direct_quadrature([](double q, double p) { return Complex(q * p); }, small, eps);
  CHECK(spectral_norm(qp_small.matrix - oracle) <= 1e-8);
}

TEST_CASE("quantize: linearity, identity, Hermiticity of matrix symbols") {
  const PositionGrid g(4 * std::numbers::pi, 64);
  const double eps = 0.1;
  const auto one = weyl_quantize(Symbol::constant(Matrix::Identity(2, 2)), g, eps);
  CHECK(spectral_norm(one.matrix - Matrix::Identity(128, 128)) <= 1e-12);

  auto a = sigma_symbol(pauli_z(), [](double q, double p) { return std::cos(q) * std::sin(p); });
  auto b = sigma_symbol(pauli_x(), [](double q, double p) { return std::sin(q + p); });
  a.declare_hermitian();
  b.declare_hermitian();
  const Matrix qa = weyl_quantize(a, g, eps).matrix;
  const Matrix qb = weyl_quantize(b, g, eps).matrix;
  const Matrix qsum = weyl_quantize(a + Complex(2.0) * b, g, eps).matrix;
  CHECK(spectral_norm(qsum - qa - 2.0 * qb) <= 1e-12);
  CHECK(spectral_norm(qa - qa.adjoint()) <= 1e-10);
  const Matrix qy = weyl_quantize(sigma_symbol(pauli_y(), [](double q, double p) { return q * p; })
                                      .declare_hermitian(),
                                  g, eps)
                        .matrix;
  CHECK(spectral_norm(qy - qy.adjoint()) <= 1e-10);
}

TEST_CASE("quantize: products agree at leading order for noncommuting symbols") {
  const PositionGrid g(40.0, 256);
  const auto a = sigma_symbol(pauli_z(), [](double q, double) { return std::cos(q); });
  const auto b = sigma_symbol(pauli_x(), [](double, double p) { return std::sin(p); });
  // Columns: resolved Hermite functions in both spinor components.
  const Matrix h = hermite_subspace(g, 24);
  Matrix basis = Matrix::Zero(2 * g.points(), 48);
  for (int j = 0; j < g.points(); ++j)
    for (int r = 0; r < 2; ++r) basis.row(2 * j + r).segment(24 * r, 24) = h.row(j);
  std::vector<double> defect;
  for (double eps : kEpsilons) {
    const Matrix lhs = weyl_quantize(a, g, eps).matrix * weyl_quantize(b, g, eps).matrix;
    defect.push_back(spectral_norm((lhs - weyl_quantize(a * b, g, eps).matrix) * basis));
  }
  INFO(defect[0] << " " << defect[1] << " " << defect[2] << " " << defect[3]);
  CHECK(fit_order(kEpsilons, defect).slope >= 0.8);
}

TEST_CASE("quantize: declared bandwidths trigger aliasing errors") {
  const PositionGrid g(10.0, 32);
  auto fast = Symbol::scalar([](double q, double) { return std::cos(20 * q); });
  fast.declare_q_bandwidth(20.0);
  CHECK_THROWS_AS(weyl_quantize(fast, g, 0.1), AliasingError);
  auto wide = Symbol::scalar([](double, double p) { return std::exp(-p * p / 100); });
  wide.declare_p_extent(30.0);
  CHECK_THROWS_AS(weyl_quantize(wide, g, 0.1), AliasingError);
  CHECK_NOTHROW(weyl_quantize(wide, g, 10.0));
}

TEST_CASE("poisson bracket: sign convention and matrix products") {
  const auto q = Symbol::scalar([](double q, double) { return q; });
  const auto p = Symbol::scalar([](double, double p) { return p; });
  CHECK(poisson_bracket(q, p)(0.3, -1.2)(0, 0).real() == doctest::Approx(-1.0));
  CHECK(poisson_bracket(p, q)(0.3, -1.2)(0, 0).real() == doctest::Approx(1.0));
  const auto a = Symbol::scalar([](double q, double p) { return std::sin(q) * p * p; });
  CHECK(std::abs(poisson_bracket(a, a)(0.7, 0.4)(0, 0)) <= 1e-9);

  const Symbol sa(2, 2, [](double q, double) { return Matrix(q * pauli_z()); });
  const Symbol sb(2, 2, [](double, double p) { return Matrix(p * pauli_x()); });
  const Matrix br = poisson_bracket(sa, sb)(0.4, 1.1);
  CHECK(spectral_norm(br + pauli_z() * pauli_x()) <= 1e-9);
}

TEST_CASE("moyal defect: canonical pair") {
  const PositionGrid g(40.0, 256);
  const auto q = Symbol::scalar([](double q, double) { return q; }, [](double, double) { return 1.0; },
                                [](double, double) { return 0.0; });
  const auto p = Symbol::scalar([](double, double p) { return p; }, [](double, double) { return 0.0; },
                                [](double, double) { return 1.0; });
  CHECK(moyal_defect(q, p, g, 0.05) <= 1e-10);
}

TEST_CASE("split step: free Gaussian spreads as predicted") {
  const PositionGrid g(40.0, 256);
  const double eps = 0.1, t = 2.0;
  Vector up(1);
  up << 1.0;
  const auto st = gaussian_state(g, 0.0, 0.0, 1.0, eps, up);
  const auto zero = [](double) -> Matrix { return Matrix::Zero(1, 1); };
  const auto out = split_step_propagate(zero, st, eps, t, {0.05});
  double mean = 0, second = 0;
  for (int j = 0; j < g.points(); ++j) {
    const double w = std::norm(out.state.values(j)) * g.dx();
    mean += w * g.x(j);
    second += w * g.x(j) * g.x(j);
  }
  const double variance = second - mean * mean;
  CHECK(std::abs(variance - (0.5 + 0.5 * eps * eps * t * t)) <= 1e-6);
  CHECK(std::abs(out.state.norm() - 1.0) <= 1e-10);
}

TEST_CASE("split step: constant potential only changes the phase") {
  const PositionGrid g(40.0, 256);
  const double eps = 0.05;
  Vector s(2);
  s << 0.6, 0.8;
  const auto st = gaussian_state(g, 1.0, 0.2, 1.0, eps, s);
  const auto free = split_step_propagate([](double) -> Matrix { return Matrix::Zero(2, 2); }, st,
                                         eps, 1.0, {0.01});
  const auto shifted = split_step_propagate(
      [](double) -> Matrix { return Matrix(0.7 * Matrix::Identity(2, 2)); }, st, eps, 1.0, {0.01});
  const Vector expected = std::exp(-kI * 0.7 / eps) * free.state.values;
  CHECK((shifted.state.values - expected).norm() * std::sqrt(g.dx()) <= 1e-10);
}

TEST_CASE("split step: harmonic coherent state returns after one period") {
  const PositionGrid g(20.0, 256);
  const double eps = 0.1;
  Vector up(1);
  up << 1.0;
  // Coherent state of q²/2 with ħ = ε has width sqrt(ε).
  const auto st = gaussian_state(g, 2.0, 0.0, std::sqrt(eps), eps, up);
  const auto out = split_step_propagate([](double x) -> Matrix { return Matrix::Constant(1, 1, 0.5 * x * x); },
                                        st, eps, 2 * std::numbers::pi, {5e-4, true, 1e-5});
  const double fidelity = std::norm(st.values.dot(out.state.values) * g.dx());
  CHECK(fidelity >= 1 - 1e-6);
}

TEST_CASE("split step: agrees with the dense quantized exponential") {
  const PositionGrid g(16.0, 128);
  const double eps = 0.1, t = 1.0;
  auto v = [](double x) -> Matrix {
    return Matrix(std::tanh(x) * pauli_z() + 0.5 * pauli_x());
  };
  Vector s(2);
  s << 1.0, 0.0;
  const auto st = gaussian_state(g, -1.0, 0.3, 1.0, eps, s);
  const auto out = split_step_propagate(v, st, eps, t, {2e-3});
  const Symbol h(2, 2, [v](double q, double p) {
    return Matrix(0.5 * p * p * Matrix::Identity(2, 2) + v(q));
  });
  const Matrix hq = weyl_quantize(h, g, eps).matrix;
  const Vector dense = dense_propagate(hq, st.values, eps, t);
  const double fidelity = std::norm(dense.dot(out.state.values) * g.dx());
  CHECK(fidelity >= 1 - 1e-6);
}

TEST_CASE("split step: boundary contamination and coarse steps are errors") {
  const PositionGrid g(20.0, 128);
  Vector up(1);
  up << 1.0;
  const auto edge = gaussian_state(g, 8.5, 0.0, 1.0, 0.1, up);
  const auto zero = [](double) -> Matrix { return Matrix::Zero(1, 1); };
  CHECK_THROWS_AS(split_step_propagate(zero, edge, 0.1, 0.1, {0.01}), BoundaryError);
  const auto st = gaussian_state(g, 0.0, 0.0, 0.3, 0.1, up);
  auto steep = [](double x) -> Matrix { return Matrix::Constant(1, 1, 5 * x * x); };
  CHECK_THROWS_AS(split_step_propagate(steep, st, 0.1, 1.0, {0.5}), ToleranceError);
}
