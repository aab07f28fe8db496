#pragma once

#include "spectral/frames.hpp"

namespace adiaband::models {

// (tanh(t)σ_z + δσ_x)/2; the lower band is index 0.
ParameterFamily landau_zener(double delta);

// (δ/2) n(t)·σ with n = (sinθ cos ωt, sinθ sin ωt, cosθ); the field-aligned
// band is index 1.
ParameterFamily rotating_field(double delta, double theta, double omega);
MatrixFn rotating_field_aligned_frame(double theta, double omega);
MatrixFn rotating_field_aligned_frame_derivative(double theta, double omega);

// Exact solution of the rotating-field model, i ε ψ̇ = H ψ from ψ(0) = psi0.
Vector rotating_field_exact(double delta, double theta, double omega, double epsilon,
                            const Vector& psi0, double t);

// Spin-3/2 quadrupole (n(t)·S)² with n as above; two doubly degenerate bands
// at 1/4 (indices 0,1) and 9/4 (indices 2,3).
ParameterFamily quadrupole_spin(double theta, double omega);
Matrix spin_three_halves(int axis);
// Single-valued band frame e^{−iωt(S_z + 1/2)} Ψ₀ of the lower band.
MatrixFn quadrupole_lower_frame(double theta, double omega);
// Ψ₀†(S_z + 1/2)Ψ₀ for the frame above; one loop rotates by exp(2πi·M).
Matrix quadrupole_berry_generator(double theta);

// a·tanh(q)σ_z + b·σ_x + c·1 as a position-only potential; lower band index 0.
ParameterFamily two_channel_bo(double a, double b, double c = 0.0);

// d(q)·σ with d = (r cos(kq), r sin(kq), h): a loop over one period of q winds the
// field once around a cone of polar angle atan2(r, h).
ParameterFamily winding_bo(double r, double h, double k = 1.0);
// Field-aligned spinor of winding_bo (upper band, index 1), single valued in q.
MatrixFn winding_aligned_frame(double r, double h, double k = 1.0);

// cos q σ_z + sin p σ_x + 0.5 σ_y + 0.3 sin(q + p)·1 on the phase-space torus.
PhaseSpaceFamily torus_model();

}  // namespace adiaband::models
