#ifndef MMFACT_H
#define MMFACT_H

/* Generated by cbindgen from mmfact-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum {
  MmfOk = 0,
  MmfNullArgument = 1,
  MmfInvalidArgument = 2,
  MmfBufferTooSmall = 3,
  MmfSolveFailed = 4,
  MmfPanic = 5,
} MmfCode;

/**
 * Terminal state of a solve.
 */
typedef enum {
  MmfConverged = 0,
  MmfIterationLimit = 1,
  MmfTimeLimit = 2,
} MmfSolveStatus;

/**
 * Opaque problem-instance handle.
 */
typedef struct MmfInstance MmfInstance;

/**
 * Opaque solve-report handle.
 */
typedef struct MmfReport MmfReport;

/**
 * Solver tolerances and limits; plain data, safe to copy.
 */
typedef struct {
  double epsilon;
  uint64_t max_iterations;
  /**
   * Wall-clock limit in seconds; pass a non-positive value for no limit.
   */
  double max_wall_seconds;
  uint64_t workers;
  double dedup_tau;
  double zero_tau;
  double interior_tau;
  double lp_tol;
  double qp_tol;
} MmfConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Default configuration values.
 */
MmfConfig mmf_config_default(void);

/**
 * Creates an instance from a row-major `m × n` observation matrix.
 *
 * # Safety
 * `y` must point to `m * n` doubles and `out` must be a valid pointer.
 */
MmfCode mmf_instance_new(const double *y,
                         uintptr_t m,
                         uintptr_t n,
                         uintptr_t k,
                         double p,
                         double epsilon,
                         uint64_t seed,
                         MmfInstance **out);

/**
 * Creates a synthetic instance (two subtypes). Optional out buffers receive
 * the ground truth in row-major order: `truth_x` is `m × 2`, `truth_theta`
 * is `2 × n`.
 *
 * # Safety
 * `out` must be valid; the truth buffers, when non-null, must hold at least
 * `truth_x_len` and `truth_theta_len` doubles.
 */
MmfCode mmf_instance_generate(uintptr_t m,
                              uintptr_t n,
                              uint64_t seed,
                              MmfInstance **out,
                              double *truth_x,
                              uintptr_t truth_x_len,
                              double *truth_theta,
                              uintptr_t truth_theta_len);

/**
 * # Safety
 * `instance` must be a pointer returned by this library, freed once.
 */
void mmf_instance_free(MmfInstance *instance);

/**
 * Number of features (rows of y). Zero on a null handle.
 *
 * # Safety
 * `instance` must be valid or null.
 */
uintptr_t mmf_instance_m(const MmfInstance *instance);

/**
 * Number of samples (columns of y). Zero on a null handle.
 *
 * # Safety
 * `instance` must be valid or null.
 */
uintptr_t mmf_instance_n(const MmfInstance *instance);

/**
 * Subtype count K. Zero on a null handle.
 *
 * # Safety
 * `instance` must be valid or null.
 */
uintptr_t mmf_instance_k(const MmfInstance *instance);

/**
 * Runs the solver; on success `out` receives a report handle.
 *
 * # Safety
 * `instance` must be a valid handle; `config` may be null for defaults;
 * `out` must be valid.
 */
MmfCode mmf_solve(const MmfInstance *instance, const MmfConfig *config, MmfReport **out);

/**
 * # Safety
 * `report` must be a pointer returned by this library, freed once.
 */
void mmf_report_free(MmfReport *report);

/**
 * # Safety
 * `report` must be valid or null (null reports as iteration limit).
 */
MmfSolveStatus mmf_report_status(const MmfReport *report);

/**
 * Tightest upper bound; NaN on a null handle.
 *
 * # Safety
 * `report` must be valid or null.
 */
double mmf_report_pubd(const MmfReport *report);

/**
 * Tightest lower bound; NaN on a null handle.
 *
 * # Safety
 * `report` must be valid or null.
 */
double mmf_report_rlbd(const MmfReport *report);

/**
 * Final duality gap; NaN on a null handle.
 *
 * # Safety
 * `report` must be valid or null.
 */
double mmf_report_gap(const MmfReport *report);

/**
 * # Safety
 * `report` must be valid or null.
 */
uint64_t mmf_report_iterations(const MmfReport *report);

/**
 * Copies the best `x` (row-major M×K) into `buf`.
 *
 * # Safety
 * `report` must be valid; `buf` must hold at least `len` doubles.
 */
MmfCode mmf_report_x(const MmfReport *report, double *buf, uintptr_t len);

/**
 * Copies the best `theta` (row-major K×N) into `buf`.
 *
 * # Safety
 * `report` must be valid; `buf` must hold at least `len` doubles.
 */
MmfCode mmf_report_theta(const MmfReport *report, double *buf, uintptr_t len);

/**
 * Full report as a JSON string; free with [`mmf_string_free`]. Null on a
 * null handle.
 *
 * # Safety
 * `report` must be valid or null.
 */
char *mmf_report_json(const MmfReport *report);

/**
 * # Safety
 * `s` must come from [`mmf_report_json`], freed once.
 */
void mmf_string_free(char *s);

/**
 * Message for the most recent failure on this thread; null when none.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *mmf_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MMFACT_H */
