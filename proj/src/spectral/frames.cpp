#include "spectral/frames.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "numerics/errors.hpp"

namespace adiaband {

namespace {

constexpr double kMinOverlap = 0.5;

double fd_step() { return std::cbrt(std::numeric_limits<double>::epsilon()); }

}  // namespace

std::vector<int> match_band(const SpectralDecomposition& dec, const Matrix& previous) {
  const Matrix overlaps = previous.adjoint() * dec.vectors;
  std::vector<int> order(dec.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> weight(dec.size());
  for (int i = 0; i < dec.size(); ++i) weight[i] = overlaps.col(i).squaredNorm();
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return weight[a] > weight[b]; });
  std::vector<int> chosen(order.begin(), order.begin() + previous.cols());
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

namespace {

void require_gap(const SpectralDecomposition& dec, const BandSelection& band, double s) {
  const double g = gap(dec, band);
  if (g < band.min_gap) {
    std::ostringstream msg;
    msg << "gap " << g << " below minimum " << band.min_gap << " at parameter " << s;
    throw GapError(msg.str());
  }
}

Matrix align(const Matrix& v, const Matrix& previous, double s) {
  const Matrix overlap = previous.adjoint() * v;
  Eigen::JacobiSVD<Matrix> svd(overlap, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double smallest = svd.singularValues().minCoeff();
  if (smallest <= kMinOverlap) {
    std::ostringstream msg;
    msg << "ambiguous band tracking at parameter " << s << " (overlap singular value "
        << smallest << "); refine the sampling";
    throw BandTrackingError(msg.str());
  }
  return v * (svd.matrixV() * svd.matrixU().adjoint());
}

BandSelection tracked(const BandSelection& band, const std::vector<int>& indices) {
  BandSelection b = band;
  b.indices = indices;
  return b;
}

}  // namespace

Matrix align_frame(const Matrix& v, const Matrix& previous, double parameter) {
  return align(v, previous, parameter);
}

std::string to_string(GaugePolicy gauge) {
  switch (gauge) {
    case GaugePolicy::kParallelTransport: return "parallel-transport";
    case GaugePolicy::kModelSupplied: return "model-supplied";
    case GaugePolicy::kReference: return "reference";
  }
  return "unknown";
}

GaugePolicy parse_gauge(const std::string& name) {
  if (name == "parallel-transport") return GaugePolicy::kParallelTransport;
  if (name == "model-supplied" || name == "model") return GaugePolicy::kModelSupplied;
  if (name == "reference") return GaugePolicy::kReference;
  throw ValidationError("unknown gauge policy '" + name + "'");
}

Matrix offband_derivative(const Matrix& resolvent, const Matrix& dh, const Matrix& frame) {
  return -resolvent * dh * frame;
}

SmoothFrame smooth_frame(const ParameterFamily& family, const BandSelection& band,
                         std::span<const double> samples, GaugePolicy gauge,
                         const MatrixFn& model_frame) {
  if (samples.empty()) throw ValidationError("smooth_frame needs at least one sample");
  for (std::size_t k = 1; k < samples.size(); ++k)
    if (!(samples[k] > samples[k - 1])) throw ValidationError("samples must be increasing");

  SmoothFrame out;
  out.gauge = gauge;
  out.samples.assign(samples.begin(), samples.end());
  out.frames.reserve(samples.size());

  if (gauge == GaugePolicy::kModelSupplied) {
    if (!model_frame) throw ValidationError("model-supplied gauge needs a frame map");
    for (double s : samples) {
      const auto dec = decompose(family(s));
      const Matrix phi = model_frame(s);
      const auto indices = match_band(dec, phi);
      require_single_cluster(dec, tracked(band, indices));
      require_gap(dec, tracked(band, indices), s);
      const Matrix v = dec.vectors(Eigen::all, indices);
      const Matrix p = v * v.adjoint();
      if (spectral_norm(phi * phi.adjoint() - p) > 1e-8)
        throw BandTrackingError("model frame does not span the band");
      out.frames.push_back(phi);
    }
    return out;
  }
  if (gauge != GaugePolicy::kParallelTransport)
    throw ValidationError("smooth_frame supports parallel-transport or model-supplied gauges");

  auto dec = decompose(family(samples[0]));
  require_single_cluster(dec, band);
  require_gap(dec, band, samples[0]);
  Matrix phi = dec.vectors.middleCols(band.indices.front(), band.multiplicity());
  out.frames.push_back(phi);
  for (std::size_t k = 1; k < samples.size(); ++k) {
    dec = decompose(family(samples[k]));
    const auto indices = match_band(dec, phi);
    const auto b = tracked(band, indices);
    require_single_cluster(dec, b);
    require_gap(dec, b, samples[k]);
    phi = align(dec.vectors(Eigen::all, indices), phi, samples[k]);
    out.frames.push_back(phi);
  }
  return out;
}

Matrix frame_derivative(const ParameterFamily& family, const BandSelection& band,
                        const SmoothFrame& frame, std::size_t index) {
  if (index >= frame.samples.size()) throw ValidationError("sample index out of range");
  const double s = frame.samples[index];
  const Matrix& phi = frame.frames[index];
  const auto dec = decompose(family(s));
  const auto b = tracked(band, match_band(dec, phi));
  const Matrix r = reduced_resolvent(dec, b);
  Matrix d = offband_derivative(r, family.derivative(s), phi);
  if (frame.gauge != GaugePolicy::kParallelTransport && frame.samples.size() > 1) {
    const std::size_t lo = index == 0 ? 0 : index - 1;
    const std::size_t hi = std::min(index + 1, frame.samples.size() - 1);
    const Matrix diff = (frame.frames[hi] - frame.frames[lo]) /
                        (frame.samples[hi] - frame.samples[lo]);
    Matrix inband = phi.adjoint() * diff;
    inband = 0.5 * (inband - inband.adjoint());
    d += phi * inband;
  }
  return d;
}

FrameField FrameField::parallel_transport(ParameterFamily family, BandSelection band,
                                          std::vector<double> samples) {
  FrameField f(std::move(family), std::move(band), GaugePolicy::kParallelTransport);
  auto transported = std::make_shared<SmoothFrame>(
      smooth_frame(f.family_, f.band_, samples, GaugePolicy::kParallelTransport));
  auto slopes = std::make_shared<std::vector<Matrix>>();
  slopes->reserve(transported->samples.size());
  for (std::size_t k = 0; k < transported->samples.size(); ++k)
    slopes->push_back(frame_derivative(f.family_, f.band_, *transported, k));
  f.transported_ = std::move(transported);
  f.slopes_ = std::move(slopes);
  return f;
}

FrameField FrameField::model_supplied(ParameterFamily family, BandSelection band, MatrixFn frame,
                                      MatrixFn derivative) {
  if (!frame) throw ValidationError("model-supplied gauge needs a frame map");
  FrameField f(std::move(family), std::move(band), GaugePolicy::kModelSupplied);
  f.model_frame_ = std::move(frame);
  f.model_derivative_ = std::move(derivative);
  return f;
}

FrameField FrameField::reference(ParameterFamily family, BandSelection band,
                                 Matrix reference_frame) {
  if (reference_frame.rows() != family.dimension() ||
      reference_frame.cols() != band.multiplicity())
    throw ValidationError("reference frame has wrong shape");
  FrameField f(std::move(family), std::move(band), GaugePolicy::kReference);
  f.reference_ = std::move(reference_frame);
  return f;
}

FrameField FrameField::with_gauge_rotation(MatrixFn rotation) const {
  FrameField f = *this;
  f.rotation_ = std::move(rotation);
  return f;
}

Matrix FrameField::base_frame(double s, const SpectralDecomposition& dec) const {
  switch (gauge_) {
    case GaugePolicy::kParallelTransport: {
      const auto& samples = transported_->samples;
      auto it = std::lower_bound(samples.begin(), samples.end(), s);
      std::size_t k = static_cast<std::size_t>(it - samples.begin());
      if (k == samples.size()) k = samples.size() - 1;
      if (k > 0 && std::abs(samples[k - 1] - s) < std::abs(samples[k] - s)) --k;
      const Matrix prev = transported_->frames[k] + (s - samples[k]) * (*slopes_)[k];
      const auto indices = match_band(dec, prev);
      require_single_cluster(dec, tracked(band_, indices));
      return align(dec.vectors(Eigen::all, indices), prev, s);
    }
    case GaugePolicy::kModelSupplied: {
      const Matrix phi = model_frame_(s);
      if (phi.rows() != family_.dimension() || phi.cols() != band_.multiplicity())
        throw ValidationError("model frame has wrong shape");
      return phi;
    }
    case GaugePolicy::kReference: {
      const auto indices = match_band(dec, reference_);
      require_single_cluster(dec, tracked(band_, indices));
      return align(dec.vectors(Eigen::all, indices), reference_, s);
    }
  }
  throw ValidationError("unknown gauge policy");
}

Matrix FrameField::base_inband(double s, const Matrix& frame) const {
  const int m = band_.multiplicity();
  switch (gauge_) {
    case GaugePolicy::kParallelTransport: return Matrix::Zero(m, m);
    case GaugePolicy::kModelSupplied: {
      Matrix a;
      if (model_derivative_) {
        a = frame.adjoint() * model_derivative_(s);
      } else {
        const double h = fd_step();
        a = frame.adjoint() * (model_frame_(s + h) - model_frame_(s - h)) / (2.0 * h);
      }
      return 0.5 * (a - a.adjoint());
    }
    case GaugePolicy::kReference: {
      const double h = fd_step();
      const Matrix plus = base_frame(s + h, decompose(family_(s + h)));
      const Matrix minus = base_frame(s - h, decompose(family_(s - h)));
      Matrix a = frame.adjoint() * (plus - minus) / (2.0 * h);
      return 0.5 * (a - a.adjoint());
    }
  }
  throw ValidationError("unknown gauge policy");
}

BandPoint FrameField::at(double s) const {
  BandPoint pt;
  pt.parameter = s;
  pt.hamiltonian = family_(s);
  pt.dhamiltonian = family_.derivative(s);
  const auto dec = decompose(pt.hamiltonian);
  Matrix phi = base_frame(s, dec);
  const auto b = tracked(band_, match_band(dec, phi));
  require_single_cluster(dec, b);
  require_gap(dec, b, s);
  pt.energy = band_energy(dec, b);
  pt.gap = gap(dec, b);
  const Matrix v = dec.vectors(Eigen::all, b.indices);
  pt.projector = v * v.adjoint();
  pt.resolvent = reduced_resolvent(dec, b);

  Matrix inband = base_inband(s, phi);
  if (rotation_) {
    const double h = fd_step();
    const Matrix g = rotation_(s);
    const Matrix dg = (rotation_(s + h) - rotation_(s - h)) / (2.0 * h);
    inband = g.adjoint() * inband * g + g.adjoint() * dg;
    inband = 0.5 * (inband - inband.adjoint());
    phi = phi * g;
  }
  pt.frame = phi;
  pt.inband_derivative = inband;
  pt.offband_derivative = offband_derivative(pt.resolvent, pt.dhamiltonian, phi);
  pt.frame_derivative = phi * inband + pt.offband_derivative;
  return pt;
}

Matrix FrameField::frame(double s) const {
  const auto dec = decompose(family_(s));
  Matrix phi = base_frame(s, dec);
  if (rotation_) phi = phi * rotation_(s);
  return phi;
}

}  // namespace adiaband
