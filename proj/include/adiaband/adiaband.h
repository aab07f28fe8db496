#ifndef ADIABAND_ADIABAND_H
#define ADIABAND_ADIABAND_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define ADB_API __attribute__((visibility("default")))
#else
#define ADB_API
#endif

typedef enum adb_status {
  ADB_OK = 0,
  ADB_VALIDATION = 1,
  ADB_NUMERICAL = 2,
  ADB_IO = 3,
  ADB_INVALID_ARGUMENT = 4,
  ADB_INTERNAL = 5
} adb_status;

typedef struct adb_config adb_config;
typedef struct adb_result adb_result;

typedef struct adb_fit {
  int fitted; /* 0 when the series was not fitted */
  double slope;
  double intercept;
  double r_squared;
} adb_fit;

ADB_API const char* adb_version(void);
/* Message of the last failure on the calling thread; empty after success. */
ADB_API const char* adb_last_error(void);

ADB_API adb_status adb_config_from_file(const char* path, adb_config** out);
ADB_API adb_status adb_config_from_string(const char* json_text, adb_config** out);
ADB_API void adb_config_destroy(adb_config* config);
ADB_API adb_status adb_config_set_output_dir(adb_config* config, const char* directory);
ADB_API adb_status adb_config_set_seed(adb_config* config, uint64_t seed);
/* Resolved configuration as JSON; the string lives until the next call on this config. */
ADB_API adb_status adb_config_resolved_json(const adb_config* config, const char** out);

/* Runs the sweep and writes results.csv, summary.json and plot.gp. */
ADB_API adb_status adb_run(const adb_config* config, int jobs, adb_result** out);
ADB_API void adb_result_destroy(adb_result* result);
ADB_API size_t adb_result_epsilon_count(const adb_result* result);
ADB_API adb_status adb_result_epsilons(const adb_result* result, double* out, size_t capacity);
ADB_API size_t adb_result_metric_count(const adb_result* result);
ADB_API const char* adb_result_metric_name(const adb_result* result, size_t index);
ADB_API adb_status adb_result_metric_fit(const adb_result* result, size_t index, adb_fit* out);
ADB_API adb_status adb_result_metric_values(const adb_result* result, size_t index, double* out, size_t capacity);
ADB_API const char* adb_result_output_dir(const adb_result* result);

ADB_API size_t adb_model_count(void);
ADB_API const char* adb_model_name(size_t index);
ADB_API const char* adb_model_kind(size_t index);
ADB_API const char* adb_model_description(size_t index);

ADB_API adb_status adb_fit_order(const double* epsilons, const double* errors, size_t count, adb_fit* out);
ADB_API adb_status adb_g_factor(double spin_frequency, double cyclotron_frequency, double* out);

#ifdef __cplusplus
}
#endif

#endif
