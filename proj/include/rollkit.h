#ifndef ROLLKIT_H
#define ROLLKIT_H

/* C interface of the rollkit shared library: scenario runs, suites, plots and
 * a handful of closed-form model-space functions. Handles are opaque; every
 * fallible call returns an rk_status and leaves a message in rk_last_error(). */

#include <stddef.h>

#if defined(_WIN32)
#  if defined(ROLLKIT_BUILDING_LIBRARY)
#    define RK_API __declspec(dllexport)
#  else
#    define RK_API __declspec(dllimport)
#  endif
#else
#  define RK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rk_status {
  RK_OK = 0,
  RK_ERR_PARSE = 1,        /* malformed JSON */
  RK_ERR_VALIDATION = 2,   /* scenario field invalid; message carries the field path */
  RK_ERR_DOMAIN = 3,       /* argument outside the mathematical domain */
  RK_ERR_NUMERIC = 4,      /* iteration failed to converge */
  RK_ERR_IO = 5,
  RK_ERR_CERTIFICATION = 6,
  RK_ERR_ARG = 7,          /* null pointer or bad size */
  RK_ERR_INTERNAL = 8
} rk_status;

typedef struct rk_scenario rk_scenario;
typedef struct rk_run rk_run;
typedef struct rk_suite rk_suite;

typedef struct rk_tolerance {
  const char* key;
  double value;
} rk_tolerance;

/* Message of the last failed call on this thread ("" when none). */
RK_API const char* rk_last_error(void);
RK_API const char* rk_version(void);
RK_API const char* rk_status_name(rk_status status);

/* Scenarios */
RK_API rk_status rk_scenario_load(const char* path, rk_scenario** out);
RK_API rk_status rk_scenario_parse(const char* json, rk_scenario** out);
RK_API rk_status rk_scenario_set_tolerance(rk_scenario* scenario, const char* key, double value);
RK_API const char* rk_scenario_id(const rk_scenario* scenario);
RK_API const char* rk_scenario_module(const rk_scenario* scenario);
/* Normalized scenario document (owned by the handle). */
RK_API const char* rk_scenario_json(const rk_scenario* scenario);
RK_API void rk_scenario_free(rk_scenario* scenario);

/* Runs. A run whose checks fail is still RK_OK; query rk_run_passed. */
RK_API rk_status rk_run_scenario(const rk_scenario* scenario, rk_run** out);
RK_API int rk_run_passed(const rk_run* run);
RK_API double rk_run_worst_margin(const rk_run* run);
RK_API double rk_run_runtime(const rk_run* run);
RK_API size_t rk_run_check_count(const rk_run* run);
/* Name and verdict of check i; returns RK_ERR_ARG when out of range. */
RK_API rk_status rk_run_check(const rk_run* run, size_t i, const char** name, int* passed, double* margin);
/* Deterministic report document (owned by the handle). */
RK_API const char* rk_run_report_json(const rk_run* run);
/* Writes <out_dir>/<id>/{report.json, run.json, *.csv}. */
RK_API rk_status rk_run_write(const rk_run* run, const char* out_dir);
RK_API void rk_run_free(rk_run* run);

/* Suites: every *.json in dir, up to `workers` at a time. */
RK_API rk_status rk_suite_run(const char* dir, const char* out_dir, int workers, const rk_tolerance* overrides,
                              size_t n_overrides, rk_suite** out);
RK_API size_t rk_suite_size(const rk_suite* suite);
RK_API rk_status rk_suite_row(const rk_suite* suite, size_t i, const char** id, const char** verdict,
                              double* worst_margin, double* runtime);
RK_API int rk_suite_passed(const rk_suite* suite);
RK_API const char* rk_suite_table(const rk_suite* suite);
RK_API void rk_suite_free(rk_suite* suite);

/* SVG rendering of a run record (run.json or its directory). */
RK_API rk_status rk_plot(const char* run_record, const char* svg_out);

/* Default output directory: $ROLLKIT_OUT_DIR or ./rollkit-out. */
RK_API const char* rk_default_out_dir(void);

/* Model-space functions. Points use the ambient embedding: m + 1 coordinates
 * for c != 0 (time coordinate first for c < 0), m for c = 0. */
RK_API rk_status rk_sn(double c, double t, double* out);
RK_API rk_status rk_ct(double c, double t, double* out);
RK_API rk_status rk_characteristic_radius(double c, double lambda, double* out);
RK_API rk_status rk_distance(double c, int m, const double* p, const double* q, double* out);
RK_API rk_status rk_model_third_side(double c, double a, double b, double angle, double* out);
/* Busemann function of the ray from `base` with unit tangent `dir`, evaluated at q (c < 0). */
RK_API rk_status rk_busemann(double c, int m, const double* base, const double* dir, const double* q, double* out);

#ifdef __cplusplus
}
#endif

#endif /* ROLLKIT_H */
