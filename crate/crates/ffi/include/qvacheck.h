#ifndef QVACHECK_H
#define QVACHECK_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum QvcStatus {
  QVC_STATUS_OK = 0,
  QVC_STATUS_NULL_POINTER = 1,
  QVC_STATUS_INVALID_UTF8 = 2,
  QVC_STATUS_INVALID_CONFIG = 3,
  QVC_STATUS_INVALID_GCM = 4,
  QVC_STATUS_WINDOW_OVERFLOW = 5,
  QVC_STATUS_COMPUTATION = 6,
  QVC_STATUS_PANIC = 7,
} QvcStatus;

/**
 * Run configuration.
 */
typedef struct QvcConfig QvcConfig;

/**
 * Outcome of a batch run.
 */
typedef struct QvcResult QvcResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread. Valid until the next failing call.
 */
const char *qvc_last_error(void);

/**
 * Library version as a static string.
 */
const char *qvc_version(void);

/**
 * New configuration for a Cartan matrix (preset name or JSON matrix) and a level
 * ("1", "3/2"), with default windows and every suite selected.
 *
 * # Safety
 * `gcm` and `level` must be NUL-terminated strings; `out` must be writable.
 */
enum QvcStatus qvc_config_new(const char *gcm, const char *level, struct QvcConfig **out);

/**
 * Sets the ħ-order and z-order windows.
 *
 * # Safety
 * `cfg` must come from [`qvc_config_new`].
 */
enum QvcStatus qvc_config_set_windows(struct QvcConfig *cfg, uint32_t n_hbar, int64_t m_z);

/**
 * Sets the Fock weight cap; 0 restores the per-suite defaults.
 *
 * # Safety
 * `cfg` must come from [`qvc_config_new`].
 */
enum QvcStatus qvc_config_set_weight_cap(struct QvcConfig *cfg, uint32_t cap);

/**
 * Selects suites from a comma-separated list of names.
 *
 * # Safety
 * `cfg` must come from [`qvc_config_new`]; `suites` must be a NUL-terminated string.
 */
enum QvcStatus qvc_config_set_suites(struct QvcConfig *cfg, const char *suites);

/**
 * Releases a configuration. Null is ignored.
 *
 * # Safety
 * `cfg` must come from [`qvc_config_new`] and not be used afterwards.
 */
void qvc_config_free(struct QvcConfig *cfg);

/**
 * Runs the selected suites. A suite failure is still `Ok`; inspect [`qvc_result_passed`].
 *
 * # Safety
 * `cfg` must come from [`qvc_config_new`]; `out` must be writable.
 */
enum QvcStatus qvc_run(const struct QvcConfig *cfg, struct QvcResult **out);

/**
 * 1 if every suite passed, 0 otherwise or for a null handle.
 *
 * # Safety
 * `res` must come from [`qvc_run`].
 */
int32_t qvc_result_passed(const struct QvcResult *res);

/**
 * Number of suite reports in the result.
 *
 * # Safety
 * `res` must come from [`qvc_run`].
 */
uintptr_t qvc_result_report_count(const struct QvcResult *res);

/**
 * Full JSON report, timings included. Owned by the result.
 *
 * # Safety
 * `res` must come from [`qvc_run`].
 */
const char *qvc_result_json(const struct QvcResult *res);

/**
 * JSON report without timings, identical across runs. Owned by the result.
 *
 * # Safety
 * `res` must come from [`qvc_run`].
 */
const char *qvc_result_canonical_json(const struct QvcResult *res);

/**
 * Releases a result. Null is ignored.
 *
 * # Safety
 * `res` must come from [`qvc_run`] and not be used afterwards.
 */
void qvc_result_free(struct QvcResult *res);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QVACHECK_H */
