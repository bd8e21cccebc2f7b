#ifndef STARRIS_H
#define STARRIS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Method codes accepted by `starris_run_method` and `starris_sweep_run`.
#define STARRIS_METHOD_SAFE_ISAC 0

#define STARRIS_METHOD_RANDOM_PHASE_STAR 1

#define STARRIS_METHOD_REFLECT_ONLY_RIS 2

// Result code of every fallible call.
typedef enum StarrisStatus {
  STARRIS_STATUS_OK = 0,
  // Invalid configuration, geometry or dimensions.
  STARRIS_STATUS_CONFIG = 1,
  // The optimization problem has no feasible point.
  STARRIS_STATUS_INFEASIBLE = 2,
  // File-system, CSV or plot output failure.
  STARRIS_STATUS_IO = 3,
  STARRIS_STATUS_NULL_POINTER = 4,
  // Argument out of range or not valid UTF-8.
  STARRIS_STATUS_INVALID_ARGUMENT = 5,
  // Internal panic caught at the boundary.
  STARRIS_STATUS_PANIC = 6,
} StarrisStatus;

// One channel realization.
typedef struct StarrisChannels StarrisChannels;

// Scenario configuration handle.
typedef struct StarrisConfig StarrisConfig;

// Rows of a finished sweep.
typedef struct StarrisSweep StarrisSweep;

// Linear-scale metrics of one STAR-RIS configuration.
typedef struct StarrisMetrics {
  double sum_rate;
  double gamma_sd;
  double gamma_sr;
  double p_det_malicious;
  double p_det_isac;
  double comm_gain;
  double jam_gain;
} StarrisMetrics;

// One sweep row; same fields as the CSV.
typedef struct StarrisRow {
  // One of the `STARRIS_METHOD_*` codes.
  uint32_t method;
  double sweep_value;
  size_t trial;
  double jam_gain_db;
  double malicious_sinr_db;
  double comm_gain_db;
  double sum_rate;
  double p_det_malicious;
  double p_det_isac;
  bool feasible_flag;
  double wall_time_ms;
} StarrisRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version, a static NUL-terminated string.
const char *starris_version(void);

// Message of the last failed call on this thread, or an empty string. The
// pointer stays valid until the next library call on the same thread.
const char *starris_last_error_message(void);

// Default scenario. Never returns NULL.
struct StarrisConfig *starris_config_new(void);

// Parses `key = value` text on top of the defaults.
//
// # Safety
// `text` must be a NUL-terminated string; `out` must be writable.
enum StarrisStatus starris_config_parse(const char *text, struct StarrisConfig **out);

// Reads a scenario file.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be writable.
enum StarrisStatus starris_config_read(const char *path, struct StarrisConfig **out);

// Sets one key using the file syntax (`"p_j", "30 dBm"`). Not validated
// until `starris_config_validate` or first use.
//
// # Safety
// `cfg` must be a live handle; `key` and `value` NUL-terminated strings.
enum StarrisStatus starris_config_set(struct StarrisConfig *cfg,
                                      const char *key,
                                      const char *value);

// # Safety
// `cfg` must be a live handle.
enum StarrisStatus starris_config_validate(const struct StarrisConfig *cfg);

// Number of STAR-RIS elements `L`.
//
// # Safety
// `cfg` must be a live handle or NULL (returns 0).
size_t starris_config_n_ris(const struct StarrisConfig *cfg);

// # Safety
// `cfg` must be a live handle or NULL.
struct StarrisConfig *starris_config_clone(const struct StarrisConfig *cfg);

// # Safety
// `cfg` must come from this library and not be used afterwards.
void starris_config_free(struct StarrisConfig *cfg);

// Draws one channel realization from the configuration's seed.
//
// # Safety
// `cfg` must be a live handle; `out` must be writable.
enum StarrisStatus starris_channels_generate(const struct StarrisConfig *cfg,
                                             struct StarrisChannels **out);

// # Safety
// `ch` must be a live handle or NULL (returns 0).
size_t starris_channels_n_ris(const struct StarrisChannels *ch);

// # Safety
// `ch` must come from this library and not be used afterwards.
void starris_channels_free(struct StarrisChannels *ch);

// Radar detection probability at SINR `gamma >= 0`.
//
// # Safety
// `out` must be writable.
enum StarrisStatus starris_detection_probability(double gamma, double *out);

// Metrics of given phase vectors (`len` elements each, interleaved) with
// the configuration's energy split.
//
// # Safety
// Handles must be live; `psi_t` and `psi_r` must hold `2 * len` doubles.
enum StarrisStatus starris_evaluate_metrics(const struct StarrisChannels *ch,
                                            const struct StarrisConfig *cfg,
                                            const double *psi_t,
                                            const double *psi_r,
                                            size_t len,
                                            struct StarrisMetrics *out);

// Runs one method on one channel realization. `out_psi_t` and `out_psi_r`
// may be NULL; otherwise they receive `2 * n_ris` doubles.
//
// # Safety
// Handles must be live; non-NULL out-pointers must be writable.
enum StarrisStatus starris_run_method(const struct StarrisChannels *ch,
                                      const struct StarrisConfig *cfg,
                                      uint32_t method,
                                      struct StarrisMetrics *out_metrics,
                                      double *out_psi_t,
                                      double *out_psi_r,
                                      bool *out_feasible);

// Monte-Carlo sweep. `variable` is `"n_jam"`, `"detector_distance"` or
// `"n_ris"`; `values` must be strictly increasing; `methods` lists method
// codes. Trials run in parallel.
//
// # Safety
// `cfg` must be live; `values` and `methods` must hold the given counts.
enum StarrisStatus starris_sweep_run(const struct StarrisConfig *cfg,
                                     const char *variable,
                                     const double *values,
                                     size_t n_values,
                                     size_t n_trials,
                                     const uint32_t *methods,
                                     size_t n_methods,
                                     uint64_t seed,
                                     struct StarrisSweep **out);

// # Safety
// `sweep` must be a live handle or NULL (returns 0).
size_t starris_sweep_len(const struct StarrisSweep *sweep);

// # Safety
// `sweep` must be live; `out` must be writable.
enum StarrisStatus starris_sweep_row(const struct StarrisSweep *sweep,
                                     size_t index,
                                     struct StarrisRow *out);

// Writes the sweep as CSV (same format as the command-line tool).
//
// # Safety
// `sweep` must be live; `path` a NUL-terminated string.
enum StarrisStatus starris_sweep_write_csv(const struct StarrisSweep *sweep, const char *path);

// # Safety
// `sweep` must come from this library and not be used afterwards.
void starris_sweep_free(struct StarrisSweep *sweep);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STARRIS_H */
