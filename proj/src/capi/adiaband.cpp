#include "adiaband/adiaband.h"

#include <exception>
#include <string>

#include "harness/experiments.hpp"
#include "harness/zoo.hpp"
#include "numerics/errors.hpp"
#include "semiclassical/semiclassical.hpp"

struct adb_config {
  adiaband::ExperimentConfig config;
  mutable std::string resolved;
};

struct adb_result {
  adiaband::SweepResult result;
};

namespace {

thread_local std::string last_error;

template <typename F>
adb_status guarded(F&& body) {
  try {
    last_error.clear();
    body();
    return ADB_OK;
  } catch (const adiaband::ValidationError& e) {
    last_error = e.what();
    return ADB_VALIDATION;
  } catch (const adiaband::IoError& e) {
    last_error = e.what();
    return ADB_IO;
  } catch (const adiaband::NumericalError& e) {
    last_error = e.what();
    return ADB_NUMERICAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return ADB_INTERNAL;
  } catch (...) {
    last_error = "unknown failure";
    return ADB_INTERNAL;
  }
}

adb_status invalid(const char* message) {
  last_error = message;
  return ADB_INVALID_ARGUMENT;
}

adb_fit to_fit(const adiaband::MetricSeries& m) {
  adb_fit f{m.fitted ? 1 : 0, 0.0, 0.0, 0.0};
  if (m.fitted) {
    f.slope = m.fit.slope;
    f.intercept = m.fit.intercept;
    f.r_squared = m.fit.r_squared;
  }
  return f;
}

}  // namespace

extern "C" {

const char* adb_version(void) { return ADIABAND_VERSION; }

const char* adb_last_error(void) { return last_error.c_str(); }

adb_status adb_config_from_file(const char* path, adb_config** out) {
  if (!path || !out) return invalid("null argument");
  *out = nullptr;
  return guarded([&] { *out = new adb_config{adiaband::load_config(path), {}}; });
}

adb_status adb_config_from_string(const char* json_text, adb_config** out) {
  if (!json_text || !out) return invalid("null argument");
  *out = nullptr;
  return guarded([&] { *out = new adb_config{adiaband::parse_config_text(json_text), {}}; });
}

void adb_config_destroy(adb_config* config) { delete config; }

adb_status adb_config_set_output_dir(adb_config* config, const char* directory) {
  if (!config || !directory) return invalid("null argument");
  if (directory[0] == '\0') return invalid("empty output directory");
  return guarded([&] { config->config.output_dir = directory; });
}

adb_status adb_config_set_seed(adb_config* config, uint64_t seed) {
  if (!config) return invalid("null argument");
  return guarded([&] { config->config.seed = seed; });
}

adb_status adb_config_resolved_json(const adb_config* config, const char** out) {
  if (!config || !out) return invalid("null argument");
  return guarded([&] {
    config->resolved = config->config.resolved().dump(2);
    *out = config->resolved.c_str();
  });
}

adb_status adb_run(const adb_config* config, int jobs, adb_result** out) {
  if (!config || !out) return invalid("null argument");
  if (jobs < 1) return invalid("jobs must be at least 1");
  *out = nullptr;
  return guarded([&] { *out = new adb_result{adiaband::run_experiment(config->config, jobs)}; });
}

void adb_result_destroy(adb_result* result) { delete result; }

size_t adb_result_epsilon_count(const adb_result* result) {
  return result ? result->result.config.epsilons.size() : 0;
}

adb_status adb_result_epsilons(const adb_result* result, double* out, size_t capacity) {
  if (!result || !out) return invalid("null argument");
  const auto& eps = result->result.config.epsilons;
  if (capacity < eps.size()) return invalid("buffer too small");
  for (size_t i = 0; i < eps.size(); ++i) out[i] = eps[i];
  last_error.clear();
  return ADB_OK;
}

size_t adb_result_metric_count(const adb_result* result) { return result ? result->result.metrics.size() : 0; }

const char* adb_result_metric_name(const adb_result* result, size_t index) {
  if (!result || index >= result->result.metrics.size()) return nullptr;
  return result->result.metrics[index].name.c_str();
}

adb_status adb_result_metric_fit(const adb_result* result, size_t index, adb_fit* out) {
  if (!result || !out) return invalid("null argument");
  if (index >= result->result.metrics.size()) return invalid("metric index out of range");
  *out = to_fit(result->result.metrics[index]);
  last_error.clear();
  return ADB_OK;
}

adb_status adb_result_metric_values(const adb_result* result, size_t index, double* out, size_t capacity) {
  if (!result || !out) return invalid("null argument");
  if (index >= result->result.metrics.size()) return invalid("metric index out of range");
  const auto& v = result->result.metrics[index].values;
  if (capacity < v.size()) return invalid("buffer too small");
  for (size_t i = 0; i < v.size(); ++i) out[i] = v[i];
  last_error.clear();
  return ADB_OK;
}

const char* adb_result_output_dir(const adb_result* result) {
  return result ? result->result.config.output_dir.c_str() : nullptr;
}

size_t adb_model_count(void) { return adiaband::model_zoo().size(); }

const char* adb_model_name(size_t index) {
  const auto& zoo = adiaband::model_zoo();
  return index < zoo.size() ? zoo[index].name.c_str() : nullptr;
}

const char* adb_model_kind(size_t index) {
  const auto& zoo = adiaband::model_zoo();
  return index < zoo.size() ? adiaband::to_string(zoo[index].kind) : nullptr;
}

const char* adb_model_description(size_t index) {
  const auto& zoo = adiaband::model_zoo();
  return index < zoo.size() ? zoo[index].description.c_str() : nullptr;
}

adb_status adb_fit_order(const double* epsilons, const double* errors, size_t count, adb_fit* out) {
  if (!epsilons || !errors || !out) return invalid("null argument");
  return guarded([&] {
    const auto f = adiaband::fit_order({epsilons, count}, {errors, count});
    *out = adb_fit{1, f.slope, f.intercept, f.r_squared};
  });
}

adb_status adb_g_factor(double spin_frequency, double cyclotron_frequency, double* out) {
  if (!out) return invalid("null argument");
  return guarded([&] { *out = adiaband::g_factor(spin_frequency, cyclotron_frequency); });
}

}  // extern "C"
