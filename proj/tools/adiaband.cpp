#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "adiaband/adiaband.h"

namespace {

int exit_code(adb_status status) {
  switch (status) {
    case ADB_OK:
      return 0;
    case ADB_VALIDATION:
    case ADB_INVALID_ARGUMENT:
      return 1;
    case ADB_IO:
      return 3;
    case ADB_NUMERICAL:
    case ADB_INTERNAL:
      return 2;
  }
  return 2;
}

int fail(adb_status status) {
  std::fprintf(stderr, "adiaband: %s\n", adb_last_error());
  return exit_code(status);
}

struct Overrides {
  std::string out;
  std::string seed;
};

adb_status load(const std::string& path, const Overrides& o, adb_config** config) {
  adb_status s = adb_config_from_file(path.c_str(), config);
  if (s != ADB_OK) return s;
  if (!o.out.empty() && (s = adb_config_set_output_dir(*config, o.out.c_str())) != ADB_OK) return s;
  if (!o.seed.empty()) {
    char* end = nullptr;
    const unsigned long long seed = std::strtoull(o.seed.c_str(), &end, 10);
    if (o.seed[0] == '-' || !end || *end != '\0') {
      std::fprintf(stderr, "adiaband: --seed must be a non-negative integer\n");
      return ADB_VALIDATION;
    }
    if ((s = adb_config_set_seed(*config, seed)) != ADB_OK) return s;
  }
  return ADB_OK;
}

int list_models() {
  for (size_t i = 0; i < adb_model_count(); ++i)
    std::printf("%-18s %-13s %s\n", adb_model_name(i), adb_model_kind(i), adb_model_description(i));
  return 0;
}

int validate(const std::string& path, const Overrides& o) {
  adb_config* config = nullptr;
  const adb_status s = load(path, o, &config);
  if (s != ADB_OK) {
    adb_config_destroy(config);
    return *adb_last_error() ? fail(s) : exit_code(s);
  }
  const char* text = nullptr;
  adb_config_resolved_json(config, &text);
  std::printf("%s\n", text);
  adb_config_destroy(config);
  return 0;
}

int run(const std::string& path, const Overrides& o, int jobs) {
  adb_config* config = nullptr;
  adb_status s = load(path, o, &config);
  if (s != ADB_OK) {
    adb_config_destroy(config);
    return *adb_last_error() ? fail(s) : exit_code(s);
  }
  adb_result* result = nullptr;
  s = adb_run(config, jobs, &result);
  adb_config_destroy(config);
  if (s != ADB_OK) return fail(s);
  std::printf("%-26s %10s %8s\n", "metric", "slope", "R^2");
  for (size_t i = 0; i < adb_result_metric_count(result); ++i) {
    adb_fit fit;
    adb_result_metric_fit(result, i, &fit);
    if (fit.fitted)
      std::printf("%-26s %10.4f %8.5f\n", adb_result_metric_name(result, i), fit.slope, fit.r_squared);
    else
      std::printf("%-26s %10s %8s\n", adb_result_metric_name(result, i), "-", "-");
  }
  std::printf("outputs written to %s\n", adb_result_output_dir(result));
  adb_result_destroy(result);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adiabatic perturbation theory experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", adb_version());
  Overrides overrides;
  int jobs = 1;
  std::string path;

  auto* run_cmd = app.add_subcommand("run", "Run an experiment sweep and write its outputs");
  run_cmd->add_option("config", path, "Experiment configuration (JSON)")->required();
  run_cmd->add_option("--out", overrides.out, "Output directory (overrides the config)");
  run_cmd->add_option("--jobs", jobs, "Sweep points run concurrently")->check(CLI::PositiveNumber);
  run_cmd->add_option("--seed", overrides.seed, "Random seed (overrides the config)");

  auto* validate_cmd = app.add_subcommand("validate", "Check a configuration and print it with defaults");
  validate_cmd->add_option("config", path, "Experiment configuration (JSON)")->required();
  validate_cmd->add_option("--out", overrides.out, "Output directory (overrides the config)");
  validate_cmd->add_option("--seed", overrides.seed, "Random seed (overrides the config)");

  auto* list_cmd = app.add_subcommand("list-models", "List the model zoo");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  if (*list_cmd) return list_models();
  if (*validate_cmd) return validate(path, overrides);
  return run(path, overrides, jobs);
}
