#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "spectral/spectral.hpp"

namespace adiaband {

enum class GaugePolicy { kParallelTransport, kModelSupplied, kReference };

std::string to_string(GaugePolicy gauge);
GaugePolicy parse_gauge(const std::string& name);

struct SmoothFrame {
  std::vector<double> samples;
  std::vector<Matrix> frames;
  GaugePolicy gauge = GaugePolicy::kParallelTransport;
};

// Everything known about the band at one parameter value, with the frame
// expressed in the gauge of the field that produced it.
struct BandPoint {
  double parameter = 0.0;
  Matrix hamiltonian;
  Matrix dhamiltonian;
  double energy = 0.0;
  double gap = 0.0;
  Matrix frame;
  Matrix projector;
  Matrix resolvent;
  Matrix frame_derivative;
  Matrix offband_derivative;
  Matrix inband_derivative;  // Φ†Φ̇, anti-Hermitian
};

SmoothFrame smooth_frame(const ParameterFamily& family, const BandSelection& band,
                         std::span<const double> samples, GaugePolicy gauge,
                         const MatrixFn& model_frame = {});

Matrix frame_derivative(const ParameterFamily& family, const BandSelection& band,
                        const SmoothFrame& frame, std::size_t index);

// Indices of the m eigenvectors carrying the most weight in span(previous).
std::vector<int> match_band(const SpectralDecomposition& dec, const Matrix& previous);

// Columns of v rotated so that previous†·result is Hermitian positive; throws
// BandTrackingError when the overlap has a singular value ≤ 0.5.
Matrix align_frame(const Matrix& v, const Matrix& previous, double parameter);

// Off-band part of the frame derivative, −(H − E)^{-1}(1 − P) Ḣ Φ.
Matrix offband_derivative(const Matrix& resolvent, const Matrix& dh, const Matrix& frame);

// A band frame available at every parameter value.
class FrameField {
 public:
  static FrameField parallel_transport(ParameterFamily family, BandSelection band,
                                       std::vector<double> samples);
  static FrameField model_supplied(ParameterFamily family, BandSelection band, MatrixFn frame,
                                   MatrixFn frame_derivative = {});
  static FrameField reference(ParameterFamily family, BandSelection band, Matrix reference_frame);

  // Φ(s) → Φ(s)·G(s) for an m×m unitary G; the derivative of G is differenced.
  FrameField with_gauge_rotation(MatrixFn rotation) const;

  BandPoint at(double s) const;
  Matrix frame(double s) const;

  const ParameterFamily& family() const { return family_; }
  const BandSelection& band() const { return band_; }
  GaugePolicy gauge() const { return gauge_; }
  const SmoothFrame* transported() const { return transported_.get(); }

 private:
  FrameField(ParameterFamily family, BandSelection band, GaugePolicy gauge)
      : family_(std::move(family)), band_(std::move(band)), gauge_(gauge) {}

  // Band eigenvectors at s rotated to the field's gauge (no rotation applied).
  Matrix base_frame(double s, const SpectralDecomposition& dec) const;
  Matrix base_inband(double s, const Matrix& frame) const;

  ParameterFamily family_;
  BandSelection band_;
  GaugePolicy gauge_;
  std::shared_ptr<const SmoothFrame> transported_;
  // Off-band derivative at each transported sample, used as a first-order predictor.
  std::shared_ptr<const std::vector<Matrix>> slopes_;
  MatrixFn model_frame_;
  MatrixFn model_derivative_;
  Matrix reference_;
  MatrixFn rotation_;
};

}  // namespace adiaband
