#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace adiaband {

enum class ExperimentKind { kTimeAdiabatic, kSpaceAdiabatic, kBO, kWeylCheck, kSemiclassical };

const char* to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(const std::string& name);

struct GaugeSettings {
  std::string policy = "parallel-transport";  // or "reference"
  double twist = 0.0;                          // extra phase e^{iκ sin s}
};

struct GridSettings {
  double length = 16.0;
  int points = 512;
  double dt = 5e-4;
  double t_final = 1.0;
  double t0 = -6.0;
  double t1 = 6.0;
  int samples = 2601;        // frame samples over [t0 − 0.5, t1 + 0.5]
  int time_points = 1201;    // leakage samples over [t0, t1]
  bool verify_by_halving = true;
  int periods = 6;           // semiclassical orbit length
  int steps_per_period = 2000;
};

struct PacketSettings {
  double center = -1.0;
  double momentum = 0.0;
  double width = 1.0;
};

struct ToleranceSettings {
  double relative = 1e-10;
  double absolute = 1e-12;
  double halving = 1e-6;
  double boundary = 1e-8;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kTimeAdiabatic;
  std::string model;
  nlohmann::json parameters;  // model parameters with defaults filled in
  std::vector<double> epsilons;
  std::vector<int> projector_orders;             // time-adiabatic leakage
  std::vector<std::pair<int, int>> order_pairs;  // (effective, intertwiner)
  GaugeSettings gauge;
  GridSettings grid;
  PacketSettings packet;
  ToleranceSettings tolerances;
  std::string output_dir = "results";
  std::uint64_t seed = 0;

  // Full configuration with every default materialized.
  nlohmann::json resolved() const;
  // FNV-1a hash of the resolved configuration text, as 16 hex digits.
  std::string hash() const;
  double parameter(const std::string& key) const;
};

// Parses and validates; throws ValidationError with the offending key.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

std::uint64_t fnv1a(const std::string& bytes);

}  // namespace adiaband
