#pragma once

#include <string>
#include <vector>

#include "harness/config.hpp"
#include "harness/fit.hpp"

namespace adiaband {

struct MetricSeries {
  std::string name;
  std::vector<double> values;  // one per ε, in config order
  bool fit_requested = true;
  bool fitted = false;
  std::string fit_note;  // why no fit was produced
  OrderFit fit;
};

struct SweepResult {
  ExperimentConfig config;
  std::vector<MetricSeries> metrics;
  std::vector<double> wall_seconds;  // per ε point
  std::string config_hash;
  std::string version;

  const MetricSeries& metric(const std::string& name) const;
};

// Computes every ε point (up to `jobs` concurrently) and fits the series.
SweepResult run_sweep(const ExperimentConfig& config, int jobs = 1);

// run_sweep followed by emit_outputs into config.output_dir.
SweepResult run_experiment(const ExperimentConfig& config, int jobs = 1);

// results.csv, summary.json and plot.gp inside `directory`.
void emit_outputs(const SweepResult& result, const std::string& directory);

std::string format_double(double value);
std::string results_csv(const SweepResult& result);
std::string plot_script(const SweepResult& result);
nlohmann::json summary_json(const SweepResult& result);

// Parses results.csv text back into metric series (names in first-seen order).
std::vector<MetricSeries> parse_results_csv(const std::string& text, std::vector<double>& epsilons);

}  // namespace adiaband
