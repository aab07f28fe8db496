#include "harness/experiments.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <thread>

#include "harness/zoo.hpp"
#include "models/models.hpp"
#include "numerics/errors.hpp"
#include "semiclassical/semiclassical.hpp"
#include "space_adiabatic/space_adiabatic.hpp"
#include "time_adiabatic/time_adiabatic.hpp"
#include "weyl/weyl.hpp"

#ifndef ADIABAND_VERSION
#define ADIABAND_VERSION "0.0.0"
#endif

namespace adiaband {

using nlohmann::json;

namespace {

struct Sample {
  std::string name;
  double value;
  bool fit;
};

using PointFn = std::function<std::vector<Sample>(double epsilon)>;

std::string pair_name(const char* prefix, const std::pair<int, int>& orders) {
  return std::string(prefix) + "_h" + std::to_string(orders.first) + "_u" + std::to_string(orders.second);
}

Vector first_unit(int m) { return Vector::Unit(m, 0); }

FrameField apply_twist(FrameField frames, double twist) {
  if (twist == 0.0) return frames;
  const int m = frames.band().multiplicity();
  return frames.with_gauge_rotation([twist, m](double s) -> Matrix {
    return std::exp(kI * twist * std::sin(s)) * Matrix::Identity(m, m);
  });
}

Matrix reference_columns(const ParameterFamily& family, const BandSelection& band, double at) {
  const auto dec = decompose(family(at));
  return dec.vectors.middleCols(band.indices.front(), band.multiplicity());
}

struct TimeModel {
  ParameterFamily family;
  BandSelection band;
};

TimeModel time_model(const ExperimentConfig& c) {
  if (c.model == "landau-zener")
    return {models::landau_zener(c.parameter("delta")), BandSelection::contiguous(0, 1)};
  if (c.model == "rotating-field")
    return {models::rotating_field(c.parameter("delta"), c.parameter("theta"), c.parameter("omega")),
            BandSelection::contiguous(1, 1)};
  if (c.model == "quadrupole-spin")
    return {models::quadrupole_spin(c.parameter("theta"), c.parameter("omega")), BandSelection::contiguous(0, 2)};
  throw ValidationError("model '" + c.model + "' is not a time family");
}

PointFn time_adiabatic_point(const ExperimentConfig& c) {
  const auto model = time_model(c);
  FrameField frames =
      c.gauge.policy == "reference"
          ? FrameField::reference(model.family, model.band,
                                  reference_columns(model.family, model.band, 0.5 * (c.grid.t0 + c.grid.t1)))
          : FrameField::parallel_transport(model.family, model.band,
                                           linspace(c.grid.t0 - 0.5, c.grid.t1 + 0.5, c.grid.samples));
  frames = apply_twist(std::move(frames), c.gauge.twist);
  const auto times = linspace(c.grid.t0, c.grid.t1, c.grid.time_points);
  const OdeTolerances tol{c.tolerances.relative, c.tolerances.absolute, OdeTolerances{}.max_steps_between_outputs};
  return [=](double eps) {
    TimeAdiabaticProblem problem{frames, eps, c.grid.t0, c.grid.t1, first_unit(model.band.multiplicity()), tol};
    problem.validate();
    std::vector<Sample> out;
    for (int k : c.projector_orders)
      out.push_back({"leakage_order" + std::to_string(k), superadiabatic_leakage(problem, k, times).sup, true});
    for (const auto& pr : c.order_pairs)
      out.push_back({pair_name("reconstruction", pr), reconstruction_error(problem, {pr.first, pr.second}), true});
    return out;
  };
}

struct PotentialModel {
  ParameterFamily potential;
  BandSelection band;
};

PotentialModel potential_model(const ExperimentConfig& c) {
  if (c.model == "two-channel-bo")
    return {models::two_channel_bo(c.parameter("a"), c.parameter("b"), c.parameter("c")),
            BandSelection::contiguous(0, 1)};
  if (c.model == "winding-bo")
    return {models::winding_bo(c.parameter("r"), c.parameter("h"), c.parameter("k")),
            BandSelection::contiguous(1, 1)};
  throw ValidationError("model '" + c.model + "' is not a position-only potential");
}

FrameField potential_frames(const ExperimentConfig& c, const PotentialModel& m, const PositionGrid& grid) {
  FrameField frames = c.gauge.policy == "reference"
                          ? FrameField::reference(m.potential, m.band, reference_columns(m.potential, m.band, 0.0))
                          : bo_transport_frames(m.potential, m.band, grid);
  return apply_twist(std::move(frames), c.gauge.twist);
}

SplitStepOptions split_options(const ExperimentConfig& c) {
  SplitStepOptions o;
  o.dt = c.grid.dt;
  o.verify_by_halving = c.grid.verify_by_halving;
  o.halving_tolerance = c.tolerances.halving;
  o.boundary_tolerance = c.tolerances.boundary;
  return o;
}

PointFn bo_point(const ExperimentConfig& c) {
  const auto model = potential_model(c);
  const PositionGrid grid(c.grid.length, c.grid.points);
  const FrameField frames = potential_frames(c, model, grid);
  const auto options = split_options(c);
  return [=](double eps) {
    const BOModel bo{frames, eps, grid};
    const auto chi0 =
        gaussian_state(grid, c.packet.center, c.packet.momentum, c.packet.width, eps, first_unit(bo.multiplicity()));
    std::vector<Sample> out;
    double drift = 0.0, halving = 0.0, boundary = 0.0;
    for (std::size_t i = 0; i < c.order_pairs.size(); ++i) {
      const auto& pr = c.order_pairs[i];
      const auto r = propagate_and_compare(bo, chi0, c.grid.t_final, {pr.first, pr.second}, options);
      out.push_back({pair_name("error", pr), r.error, true});
      if (i == 0) out.push_back({"leakage", r.leakage, true});
      drift = std::max(drift, r.norm_drift);
      halving = std::max(halving, r.halving_difference);
      boundary = std::max(boundary, r.boundary_mass);
    }
    out.push_back({"norm_drift", drift, false});
    out.push_back({"halving_difference", halving, false});
    out.push_back({"boundary_mass", boundary, false});
    return out;
  };
}

double packet_isometry_defect(const Symbol& u, const PositionGrid& grid, const ExperimentConfig& c, double eps) {
  const Matrix q = weyl_quantize(u, grid, eps).matrix;
  const auto chi = gaussian_state(grid, c.packet.center, c.packet.momentum, c.packet.width, eps,
                                  first_unit(u.cols()));
  GridState d = chi;
  d.values = q.adjoint() * (q * chi.values) - chi.values;
  return d.norm();
}

// Packet ±4 widths in q; in p the momentum spread at the largest ε plus the
// kinetic reach of the band-energy variation; both padded by 20%.
struct Region {
  double q_lo, q_hi, p_lo, p_hi;
};

Region dynamics_region(const ExperimentConfig& c, const FrameField& frames) {
  const double qh = 4.0 * c.packet.width;
  double e_min = INFINITY, e_max = -INFINITY;
  for (double q : linspace(c.packet.center - qh, c.packet.center + qh, 41)) {
    const double e = frames.at(q).energy;
    e_min = std::min(e_min, e);
    e_max = std::max(e_max, e);
  }
  const double ph = 4.0 * c.epsilons.front() / c.packet.width + std::sqrt(2.0 * (e_max - e_min));
  return {c.packet.center - 1.2 * qh, c.packet.center + 1.2 * qh, c.packet.momentum - 1.2 * ph,
          c.packet.momentum + 1.2 * ph};
}

PointFn space_adiabatic_point(const ExperimentConfig& c) {
  const PositionGrid grid(c.grid.length, c.grid.points);
  if (c.model == "torus") {
    Eigen::SelfAdjointEigenSolver<Matrix> sy(pauli_y());
    const auto frames =
        PhaseSpaceFrame::reference(models::torus_model(), BandSelection::contiguous(0, 1), sy.eigenvectors().col(0));
    return [=](double eps) {
      const SpaceAdiabaticProblem problem{frames, eps, grid};
      const Matrix h = weyl_quantize(effective_symbol(problem, 1), grid, eps).matrix;
      return std::vector<Sample>{
          {"isometry_defect", packet_isometry_defect(intertwiner_symbol(problem), grid, c, eps), true},
          {"effective_hermiticity", spectral_norm(h - h.adjoint()), false}};
    };
  }
  const auto model = potential_model(c);
  const FrameField frames = potential_frames(c, model, grid);
  return [=](double eps) {
    const BOModel bo{frames, eps, grid};
    const auto generic = bo_phase_space_frame(bo);
    const SpaceAdiabaticProblem problem{generic, eps, grid};
    const Region r = dynamics_region(c, frames);
    double worst = 0.0;
    for (double q : linspace(r.q_lo, r.q_hi, 41))
      for (double p : linspace(r.p_lo, r.p_hi, 21)) {
        const Matrix g = first_order_coefficient(generic.at(q, p));
        const Matrix b = bo_terms(frames.at(q), p).first;
        worst = std::max(worst, spectral_norm(g - b));
      }
    return std::vector<Sample>{
        {"isometry_defect", packet_isometry_defect(intertwiner_symbol(problem), grid, c, eps), false},
        {"bo_isometry_defect", packet_isometry_defect(bo_intertwiner_symbol(bo, 1), grid, c, eps), true},
        {"consistency_deviation", worst, false}};
  };
}

Symbol scalar_symbol(std::function<double(double, double)> f, std::function<double(double, double)> fq,
                     std::function<double(double, double)> fp) {
  return Symbol::scalar(std::move(f), std::move(fq), std::move(fp));
}

PointFn weyl_check_point(const ExperimentConfig& c) {
  const PositionGrid grid(c.grid.length, c.grid.points);
  const auto zero = [](double, double) { return 0.0; };
  const auto q = scalar_symbol([](double q, double) { return q; }, [](double, double) { return 1.0; }, zero);
  const auto p = scalar_symbol([](double, double p) { return p; }, zero, [](double, double) { return 1.0; });
  const auto q2 = scalar_symbol([](double q, double) { return q * q; }, [](double q, double) { return 2 * q; }, zero);
  const auto p2 = scalar_symbol([](double, double p) { return p * p; }, zero, [](double, double p) { return 2 * p; });
  const auto sinq = scalar_symbol([](double q, double) { return std::sin(q); },
                                  [](double q, double) { return std::cos(q); }, zero);
  const auto cosp = scalar_symbol([](double, double p) { return std::cos(p); }, zero,
                                  [](double, double p) { return -std::sin(p); });
  const auto qp = Symbol::scalar([](double q, double p) { return q * p; });
  return [=](double eps) {
    const Matrix x = position_operator(grid);
    const Matrix d = momentum_operator(grid, eps);
    return std::vector<Sample>{
        {"moyal_q2_p2", moyal_defect(q2, p2, grid, eps), true},
        {"moyal_sinq_p", moyal_defect(sinq, p, grid, eps), true},
        {"moyal_sinq_cosp", moyal_defect(sinq, cosp, grid, eps), true},
        {"position_error", spectral_norm(weyl_quantize(q, grid, eps).matrix - x), false},
        {"momentum_error", spectral_norm(weyl_quantize(p, grid, eps).matrix - d), false},
        {"qp_symmetric_error", spectral_norm(weyl_quantize(qp, grid, eps).matrix - 0.5 * (x * d + d * x)), false}};
  };
}

bool bitwise_equal(const Trajectory& a, const Trajectory& b) {
  if (a.states.size() != b.states.size()) return false;
  for (std::size_t i = 0; i < a.states.size(); ++i) {
    const auto& x = a.states[i];
    const auto& y = b.states[i];
    if (std::memcmp(&x.time, &y.time, sizeof(double)) != 0 ||
        std::memcmp(x.q.data(), y.q.data(), 2 * sizeof(double)) != 0 ||
        std::memcmp(x.p.data(), y.p.data(), 2 * sizeof(double)) != 0)
      return false;
  }
  return true;
}

// The swept value scales the field: B = field · ε.
PointFn semiclassical_point(const ExperimentConfig& c) {
  Units units;
  units.mass = c.parameter("mass");
  units.charge = c.parameter("charge");
  units.c = c.parameter("c");
  units.hbar = c.parameter("hbar");
  const bool relativistic = c.model == "relativistic-band";
  const double field = c.parameter("field");
  const OdeTolerances tol{std::min(c.tolerances.relative, 1e-12), std::min(c.tolerances.absolute, 1e-14), 2000000};
  return [=](double eps) {
    const BandEnergy band = relativistic ? relativistic_band(units.mass, units.c) : quadratic_band(units.mass);
    const FieldModel model = uniform_field_model(band, field * eps, units);
    const Vec2 q0(c.packet.center, 0.0), p0(c.packet.momentum, 0.0);
    const Vec2 kinetic = model.kinetic_momentum(q0, p0);
    double omega = model.cyclotron_frequency();
    if (kinetic.norm() > 0.0)
      omega = std::abs(units.charge * model.magnetic_field) * model.band.gradient(kinetic).norm() /
              (units.c * kinetic.norm());
    if (!(omega > 0.0)) throw ValidationError("orbit does not rotate");
    const double t_final = c.grid.periods * 2.0 * std::numbers::pi / omega;
    const double dt = t_final / (c.grid.periods * c.grid.steps_per_period);
    const auto traj = classical_trajectory(model, q0, p0, t_final, dt, tol);
    const auto bare = classical_trajectory(model, q0, p0, t_final, dt, tol);
    const auto spin = spin_precession(model, traj, Vector::Ones(2) / std::sqrt(2.0));
    const double w_c = extract_frequency(traj);
    const double w_s = extract_frequency(spin);
    return std::vector<Sample>{{"omega_cyclotron", w_c, true},
                               {"omega_spin", w_s, true},
                               {"g_factor", g_factor(w_s, w_c), true},
                               {"energy_drift", traj.energy_drift, false},
                               {"trajectory_identity", bitwise_equal(traj, bare) ? 1.0 : 0.0, false}};
  };
}

PointFn make_point(const ExperimentConfig& c) {
  switch (c.kind) {
    case ExperimentKind::kTimeAdiabatic:
      return time_adiabatic_point(c);
    case ExperimentKind::kBO:
      return bo_point(c);
    case ExperimentKind::kSpaceAdiabatic:
      return space_adiabatic_point(c);
    case ExperimentKind::kWeylCheck:
      return weyl_check_point(c);
    case ExperimentKind::kSemiclassical:
      return semiclassical_point(c);
  }
  throw ValidationError("unknown experiment kind");
}

[[noreturn]] void rethrow_with_context(std::exception_ptr error, const std::string& context) {
  try {
    std::rethrow_exception(error);
  } catch (const ValidationError& e) {
    throw ValidationError(context + e.what());
  } catch (const IoError& e) {
    throw IoError(context + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(context + e.what());
  } catch (const std::exception& e) {
    throw NumericalError(context + e.what());
  }
}

}  // namespace

const MetricSeries& SweepResult::metric(const std::string& name) const {
  for (const auto& m : metrics)
    if (m.name == name) return m;
  throw ValidationError("no metric named '" + name + "'");
}

SweepResult run_sweep(const ExperimentConfig& config, int jobs) {
  if (jobs < 1) throw ValidationError("jobs must be at least 1");
  const PointFn point = make_point(config);
  const std::size_t n = config.epsilons.size();
  std::vector<std::vector<Sample>> samples(n);
  std::vector<double> seconds(n, 0.0);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      const auto start = std::chrono::steady_clock::now();
      try {
        samples[i] = point(config.epsilons[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
      seconds[i] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
  };
  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (std::size_t i = 0; i < n; ++i)
    if (errors[i]) {
      char ctx[64];
      std::snprintf(ctx, sizeof ctx, "epsilon %.6g: ", config.epsilons[i]);
      rethrow_with_context(errors[i], ctx);
    }

  SweepResult result;
  result.config = config;
  result.wall_seconds = seconds;
  result.config_hash = config.hash();
  result.version = ADIABAND_VERSION;
  for (std::size_t k = 0; k < samples.front().size(); ++k) {
    MetricSeries m;
    m.name = samples.front()[k].name;
    m.fit_requested = samples.front()[k].fit;
    for (std::size_t i = 0; i < n; ++i) {
      if (samples[i].size() != samples.front().size() || samples[i][k].name != m.name)
        throw NumericalError("metric layout differs between sweep points");
      m.values.push_back(samples[i][k].value);
    }
    if (m.fit_requested) {
      bool positive = true;
      for (double v : m.values) positive = positive && v > 0.0 && std::isfinite(v);
      if (positive) {
        m.fit = fit_order(config.epsilons, m.values);
        m.fitted = true;
      } else {
        m.fit_note = "non-positive or non-finite values";
      }
    } else {
      m.fit_note = "diagnostic";
    }
    result.metrics.push_back(std::move(m));
  }
  return result;
}

SweepResult run_experiment(const ExperimentConfig& config, int jobs) {
  auto result = run_sweep(config, jobs);
  emit_outputs(result, config.output_dir);
  return result;
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string results_csv(const SweepResult& result) {
  std::string out = "epsilon,metric,value\n";
  for (const auto& m : result.metrics)
    for (std::size_t i = 0; i < m.values.size(); ++i)
      out += format_double(result.config.epsilons[i]) + "," + m.name + "," + format_double(m.values[i]) + "\n";
  return out;
}

std::vector<MetricSeries> parse_results_csv(const std::string& text, std::vector<double>& epsilons) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "epsilon,metric,value") throw IoError("results.csv header mismatch");
  std::vector<MetricSeries> metrics;
  std::map<std::string, std::size_t> index;
  epsilons.clear();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto a = line.find(',');
    const auto b = line.find(',', a + 1);
    if (a == std::string::npos || b == std::string::npos) throw IoError("malformed results.csv row: " + line);
    const double eps = std::strtod(line.substr(0, a).c_str(), nullptr);
    const std::string name = line.substr(a + 1, b - a - 1);
    const double value = std::strtod(line.substr(b + 1).c_str(), nullptr);
    auto it = index.find(name);
    if (it == index.end()) {
      it = index.emplace(name, metrics.size()).first;
      MetricSeries m;
      m.name = name;
      metrics.push_back(std::move(m));
    }
    if (it->second == 0) epsilons.push_back(eps);
    metrics[it->second].values.push_back(value);
  }
  return metrics;
}

json summary_json(const SweepResult& result) {
  json metrics = json::array();
  for (const auto& m : result.metrics) {
    json entry{{"name", m.name}, {"values", m.values}};
    if (m.fitted) {
      entry["slope"] = m.fit.slope;
      entry["intercept"] = m.fit.intercept;
      entry["r_squared"] = m.fit.r_squared;
    } else {
      entry["slope"] = nullptr;
      entry["intercept"] = nullptr;
      entry["r_squared"] = nullptr;
      entry["fit_note"] = m.fit_note;
    }
    metrics.push_back(std::move(entry));
  }
  return json{{"experiment", to_string(result.config.kind)},
              {"model", result.config.model},
              {"epsilons", result.config.epsilons},
              {"metrics", metrics},
              {"wall_seconds", result.wall_seconds},
              {"config", result.config.resolved()},
              {"provenance", {{"config_hash", result.config_hash}, {"version", result.version}}}};
}

std::string plot_script(const SweepResult& result) {
  std::string s;
  s += "set terminal pngcairo size 900,600\n";
  s += "set output 'convergence.png'\n";
  s += "set datafile separator ','\n";
  s += "set logscale xy\n";
  s += "set key left top\n";
  s += "set xlabel 'epsilon'\n";
  s += "set ylabel 'value'\n";
  s += "set title '" + std::string(to_string(result.config.kind)) + " / " + result.config.model + "'\n";
  std::vector<const MetricSeries*> shown;
  for (const auto& m : result.metrics)
    if (m.fitted) shown.push_back(&m);
  if (shown.empty()) {
    s += "# no fitted metrics\n";
    return s;
  }
  s += "plot ";
  for (std::size_t i = 0; i < shown.size(); ++i) {
    if (i > 0) s += ", \\\n     ";
    s += "'results.csv' every ::1 using 1:(strcol(2) eq '" + shown[i]->name + "' ? $3 : NaN) with linespoints title '" +
         shown[i]->name + " (slope " + format_double(std::round(shown[i]->fit.slope * 1000.0) / 1000.0) + ")'";
  }
  s += "\n";
  return s;
}

void emit_outputs(const SweepResult& result, const std::string& directory) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw IoError("cannot create output directory '" + directory + "': " + ec.message());
  auto write = [&](const std::string& name, const std::string& text) {
    const fs::path path = fs::path(directory) / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << text;
    out.close();
    if (!out) throw IoError("failed writing '" + path.string() + "'");
  };
  write("results.csv", results_csv(result));
  write("summary.json", summary_json(result).dump(2) + "\n");
  write("plot.gp", plot_script(result));
}

}  // namespace adiaband
