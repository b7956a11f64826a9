#ifndef GCONV_RISK_H
#define GCONV_RISK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result of every fallible call.
typedef enum GcrStatus {
  GCR_STATUS_OK = 0,
  GCR_STATUS_NULL_POINTER = 1,
  // Bad parameter, malformed JSON or unknown field.
  GCR_STATUS_INVALID_ARGUMENT = 2,
  // Method or model combination not supported.
  GCR_STATUS_UNSUPPORTED = 3,
  // The net-profit condition fails, so ruin is certain.
  GCR_STATUS_CERTAIN_RUIN = 4,
  // A required moment is infinite.
  GCR_STATUS_INFINITE_MOMENT = 5,
  // Numerical failure.
  GCR_STATUS_NUMERIC = 6,
  // Input string is not UTF-8.
  GCR_STATUS_INVALID_UTF8 = 7,
  // A Rust panic was caught at the boundary.
  GCR_STATUS_PANIC = 8,
} GcrStatus;

// Ruin method; `GCR_METHOD_AUTO` picks by algebra and laws.
typedef enum GcrMethod {
  GCR_METHOD_AUTO = 0,
  GCR_METHOD_VOLTERRA = 1,
  GCR_METHOD_ODE = 2,
  GCR_METHOD_CLOSED_FORM = 3,
  GCR_METHOD_MONTE_CARLO = 4,
} GcrMethod;

typedef struct GcrAlgebra GcrAlgebra;

typedef struct GcrDistribution GcrDistribution;

typedef struct GcrModel GcrModel;

// Monte Carlo settings; see [`gcr_mc_options_default`].
typedef struct GcrMcOptions {
  uint64_t paths;
  uint64_t horizon;
  uint64_t seed;
  double confidence;
} GcrMcOptions;

// Survival at one capital level. `ci_low`/`ci_high` are NaN for analytic methods.
typedef struct GcrRuinResult {
  double u;
  double survival;
  double ruin;
  double ci_low;
  double ci_high;
  enum GcrMethod method;
} GcrRuinResult;

// The `closed_form_` fields are NaN where the closed form matches the definition.
typedef struct GcrSafetyReport {
  double t;
  double margin;
  bool condition_holds;
  double premium_side;
  double claim_side;
  double closed_form_premium_side;
  double closed_form_margin;
} GcrSafetyReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *gcr_version(void);

// Copies the calling thread's last error message into `buf` (truncated,
// always NUL-terminated when `len > 0`) and returns the full message
// length in bytes, excluding the terminator.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
size_t gcr_last_error(char *buf, size_t len);

// Parses a law such as `{"family": "pareto2a", "alpha": 1}`.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum GcrStatus gcr_distribution_from_json(const char *json, struct GcrDistribution **out);

// # Safety
// `d` must be null or a handle from [`gcr_distribution_from_json`] not yet freed.
void gcr_distribution_free(struct GcrDistribution *d);

// # Safety
// `d` must be a live handle; `value` must be writable.
enum GcrStatus gcr_distribution_cdf(const struct GcrDistribution *d, double x, double *value);

// Writes `n` seeded draws into `values`.
//
// # Safety
// `d` must be a live handle; `values` must hold `n` doubles.
enum GcrStatus gcr_distribution_sample(const struct GcrDistribution *d,
                                       size_t n,
                                       uint64_t seed,
                                       double *values);

// Parses an algebra such as `{"kind": "kendall", "alpha": 1}`.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum GcrStatus gcr_algebra_from_json(const char *json, struct GcrAlgebra **out);

// # Safety
// `a` must be null or a handle from [`gcr_algebra_from_json`] not yet freed.
void gcr_algebra_free(struct GcrAlgebra *a);

// Kernel `Omega(t)` of the algebra.
//
// # Safety
// `a` must be a live handle; `value` must be writable.
enum GcrStatus gcr_algebra_kernel(const struct GcrAlgebra *a, double t, double *value);

// Terminal states `X_n` of `paths` walks from `start`; path `i` is
// seeded from `(seed, i)`, so output is independent of threading.
//
// # Safety
// Handles must be live; `states` must hold `paths` doubles.
enum GcrStatus gcr_walk_terminal_states(const struct GcrAlgebra *a,
                                        const struct GcrDistribution *step_law,
                                        size_t n,
                                        double start,
                                        size_t paths,
                                        uint64_t seed,
                                        double *states);

// Parses a risk model: `algebra`, `claims`, `premiums`, and optional `u`,
// `lambda`, `beta`.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum GcrStatus gcr_model_from_json(const char *json, struct GcrModel **out);

// # Safety
// `m` must be null or a handle from [`gcr_model_from_json`] not yet freed.
void gcr_model_free(struct GcrModel *m);

// Defaults used by the command line.
struct GcrMcOptions gcr_mc_options_default(void);

// Survival and ruin at capital `u`. `options` may be null for defaults
// and is ignored by analytic methods.
//
// # Safety
// `m` must be a live handle; `options` null or readable; `result` writable.
enum GcrStatus gcr_ruin(const struct GcrModel *m,
                        double u,
                        enum GcrMethod method,
                        const struct GcrMcOptions *options,
                        struct GcrRuinResult *result);

// First safety condition at time `t` (max and Kendall models).
//
// # Safety
// `m` must be a live handle; `report` must be writable.
enum GcrStatus gcr_safety(const struct GcrModel *m, double t, struct GcrSafetyReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GCONV_RISK_H */
