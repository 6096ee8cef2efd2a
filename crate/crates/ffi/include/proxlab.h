#ifndef PROXLAB_H
#define PROXLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible function.
typedef enum PxStatus {
  PX_STATUS_OK = 0,
  PX_STATUS_NULL_POINTER = 1,
  PX_STATUS_INVALID_ARGUMENT = 2,
  PX_STATUS_VERIFICATION_FAILED = 3,
  PX_STATUS_NUMERICAL_FAILURE = 4,
  PX_STATUS_INDEX_OUT_OF_RANGE = 5,
  PX_STATUS_PANIC = 6,
} PxStatus;

// Opaque operator handle.
typedef struct PxOperator PxOperator;

// Opaque iteration-trace handle.
typedef struct PxTrace PxTrace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or NULL. Owned by the library.
const char *px_last_error(void);

// Library version string. Owned by the library.
const char *px_version(void);

// Frees a string returned by this library.
//
// # Safety
// `s` must be NULL or a pointer returned by a `px_*` function documented as
// returning an owned string, not yet freed.
void px_string_free(char *s);

// Builds a zoo operator from its identifier (e.g. `"rotation2"`, `"box:[0,1]x[0,1]"`).
//
// # Safety
// `id` must be a NUL-terminated string; `out` must be a valid pointer.
enum PxStatus px_operator_new(const char *id, struct PxOperator **out);

// # Safety
// `op` must be NULL or a handle from [`px_operator_new`], not yet freed.
void px_operator_free(struct PxOperator *op);

// Dimension of the operator's space; 0 for NULL.
//
// # Safety
// `op` must be NULL or a live handle.
uintptr_t px_operator_dim(const struct PxOperator *op);

// Writes `J_{gamma A} x` into `out` (both of length `n`).
//
// # Safety
// `op` must be a live handle; `x` and `out` must point to `n` doubles.
enum PxStatus px_resolvent(const struct PxOperator *op,
                           double gamma,
                           const double *x,
                           uintptr_t n,
                           double *out);

// Projects `x` onto the zero set: point into `out`, distance into `dist`,
// and whether the projection is exact into `exact` (may be NULL).
//
// # Safety
// `op` must be a live handle; `x` and `out` must point to `n` doubles; `dist` must be valid.
enum PxStatus px_project_zero_set(const struct PxOperator *op,
                                  const double *x,
                                  uintptr_t n,
                                  double *out,
                                  double *dist,
                                  bool *exact);

// Exact proximal point run with constant `lambda` and `c` for `k` steps.
//
// # Safety
// `op` must be a live handle; `x0` must point to `n` doubles; `out` must be valid.
enum PxStatus px_run_gppa(const struct PxOperator *op,
                          double lambda,
                          double c,
                          const double *x0,
                          uintptr_t n,
                          uintptr_t k,
                          struct PxTrace **out);

// Proximal point run with a JSON schedule, e.g.
// `{"lambda": [0.5, 1.5], "c": "harmonic-plus-one", "eta": 1, "error": {"relative": 0.05}, "seed": 7}`.
//
// # Safety
// As [`px_run_gppa`]; `schedule_json` must be a NUL-terminated string.
enum PxStatus px_run_gppa_schedule(const struct PxOperator *op,
                                   const char *schedule_json,
                                   const double *x0,
                                   uintptr_t n,
                                   uintptr_t k,
                                   struct PxTrace **out);

// # Safety
// `t` must be NULL or a handle from a run function, not yet freed.
void px_trace_free(struct PxTrace *t);

// Number of rows (`K + 1`); 0 for NULL.
//
// # Safety
// `t` must be NULL or a live handle.
uintptr_t px_trace_len(const struct PxTrace *t);

// Copies iterate `x_k` into `out` (length `n`).
//
// # Safety
// `t` must be a live handle; `out` must point to `n` doubles.
enum PxStatus px_trace_iterate(const struct PxTrace *t, uintptr_t k, double *out, uintptr_t n);

// Residual `||x_k - J x_k||` and distance `d(x_k, zer A)` (NaN when unavailable) of row `k`.
//
// # Safety
// `t` must be a live handle; `residual` and `dist` must be valid.
enum PxStatus px_trace_row(const struct PxTrace *t, uintptr_t k, double *residual, double *dist);

// Trace as CSV. Free the result with [`px_string_free`]; NULL on failure.
//
// # Safety
// `t` must be NULL or a live handle.
char *px_trace_to_csv(const struct PxTrace *t);

// Evaluates a closed-form rate. `params` is `"key=value,..."`; `name` selects the
// output (`"rho"`, `"effective"`, `"beta"`, `"rho_sq"`), or the first when NULL.
//
// # Safety
// `theorem_id`, `params` must be NUL-terminated; `name` NULL or NUL-terminated; `out` valid.
enum PxStatus px_rate(const char *theorem_id, const char *params, const char *name, double *out);

// Runs an experiment config (JSON text) and stores the report JSON in `report_json`
// (free with [`px_string_free`]). Returns `VerificationFailed` with a report when
// a certificate check fails.
//
// # Safety
// `config_json` must be NUL-terminated; `report_json` must be valid.
enum PxStatus px_run_experiment(const char *config_json, char **report_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PROXLAB_H */
