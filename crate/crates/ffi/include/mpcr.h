#ifndef MPCR_H
#define MPCR_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes shared by every entry point.
typedef enum MpcrStatus {
  MPCR_STATUS_OK = 0,
  // A required pointer was null.
  MPCR_STATUS_NULL_POINTER = 1,
  // Parameters or arguments were rejected.
  MPCR_STATUS_INVALID_ARGUMENT = 2,
  // A numerical precondition failed (overflow risk, tolerance, solver).
  MPCR_STATUS_NUMERICAL = 3,
  // An output buffer is shorter than required.
  MPCR_STATUS_BUFFER_TOO_SMALL = 4,
  // An index was out of range.
  MPCR_STATUS_OUT_OF_RANGE = 5,
  // An internal panic was caught at the boundary.
  MPCR_STATUS_INTERNAL = 6,
} MpcrStatus;

// Simulation mode selector for [`mpcr_simulate`].
typedef enum MpcrMode {
  MPCR_MODE_MPCR = 0,
  MPCR_MODE_COUPLED = 1,
  MPCR_MODE_GALTON_WATSON = 2,
} MpcrMode;

// Validated model parameters.
typedef struct MpcrParams MpcrParams;

// Output of a paired experiment.
typedef struct MpcrRecords MpcrRecords;

// One simulated trajectory.
typedef struct MpcrTrajectory MpcrTrajectory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failure on this thread, or null if none. The
// pointer stays valid until the next failing call on the same thread.
const char *mpcr_last_error(void);

// Library version as a static NUL-terminated string.
const char *mpcr_version(void);

// Creates a parameter set from `dim` probabilities and initial counts.
//
// # Safety
// `v` and `z0` must point to `dim` readable elements; `out` must be
// writable.
enum MpcrStatus mpcr_params_new(uint32_t kappa,
                                const double *v,
                                const uint64_t *z0,
                                size_t dim,
                                uint64_t seed,
                                struct MpcrParams **out);

// # Safety
// `params` must come from [`mpcr_params_new`] and not be freed twice.
void mpcr_params_free(struct MpcrParams *params);

// Number of types, or 0 for a null handle.
//
// # Safety
// `params` must be null or a live handle.
size_t mpcr_params_dim(const struct MpcrParams *params);

// Michaelis-Menten constant `K`, or NaN for a null handle.
//
// # Safety
// `params` must be null or a live handle.
double mpcr_params_k(const struct MpcrParams *params);

// Runs one trajectory of `n_steps` steps on random stream `stream_id`.
//
// # Safety
// `params` must be a live handle; `out` must be writable.
enum MpcrStatus mpcr_simulate(const struct MpcrParams *params,
                              uint32_t n_steps,
                              enum MpcrMode mode,
                              uint64_t stream_id,
                              struct MpcrTrajectory **out);

// Number of stored states (`n_steps + 1`), or 0 for a null handle.
//
// # Safety
// `traj` must be null or a live handle.
size_t mpcr_trajectory_len(const struct MpcrTrajectory *traj);

// Copies state `index` into `z` and, for coupled runs, into `y` (which
// may be null otherwise). Both buffers need `dim` elements.
//
// # Safety
// `traj` must be a live handle; `z` and `y` must hold `len` writable
// elements when non-null.
enum MpcrStatus mpcr_trajectory_state(const struct MpcrTrajectory *traj,
                                      size_t index,
                                      uint64_t *z,
                                      uint64_t *y,
                                      size_t len);

// # Safety
// `traj` must come from [`mpcr_simulate`] and not be freed twice.
void mpcr_trajectory_free(struct MpcrTrajectory *traj);

// Paired runs evaluated at the pivot time.
//
// # Safety
// `params` must be a live handle; `out` must be writable.
enum MpcrStatus mpcr_run_theorem1(const struct MpcrParams *params,
                                  uint64_t replicates,
                                  struct MpcrRecords **out);

// Paired runs evaluated at `kappa + n_offset`.
//
// # Safety
// `params` must be a live handle; `out` must be writable.
enum MpcrStatus mpcr_run_theorem2(const struct MpcrParams *params,
                                  int32_t n_offset,
                                  uint64_t replicates,
                                  struct MpcrRecords **out);

// Number of records, or 0 for a null handle.
//
// # Safety
// `records` must be null or a live handle.
size_t mpcr_records_len(const struct MpcrRecords *records);

// Copies record `index`: scaled copy numbers, estimated `W`, the
// pivot-time limit and `H(W_0)`. Any output pointer may be null.
//
// # Safety
// `records` must be a live handle; non-null buffers must hold `len`
// writable elements.
enum MpcrStatus mpcr_records_get(const struct MpcrRecords *records,
                                 size_t index,
                                 double *scaled_z,
                                 double *w_hat,
                                 double *limit,
                                 size_t len,
                                 double *h_w0);

// Copies the off-pivot columns of record `index`: total and per-type
// `Z(kappa + n) / K` with their limits. Fails with `OUT_OF_RANGE` for
// pivot-time records.
//
// # Safety
// `records` must be a live handle; non-null buffers must hold `len`
// writable elements.
enum MpcrStatus mpcr_records_offset(const struct MpcrRecords *records,
                                    size_t index,
                                    double *x,
                                    double *limit,
                                    size_t len,
                                    double *x_total,
                                    double *limit_total);

// # Safety
// `records` must come from a `mpcr_run_*` call and not be freed twice.
void mpcr_records_free(struct MpcrRecords *records);

// `f^(n)(r)`; negative `n` iterates the inverse.
//
// # Safety
// `out` must be writable.
enum MpcrStatus mpcr_f(double r, int32_t n, double v1, double *out);

// `f^-1(y)`.
//
// # Safety
// `out` must be writable.
enum MpcrStatus mpcr_f_inverse(double y, double v1, double *out);

// `H(r)` to absolute accuracy `tol`; `bound` (optional) receives the
// certified error bound.
//
// # Safety
// `value` must be writable; `bound` may be null.
enum MpcrStatus mpcr_h(double r, double v1, double tol, double *value, double *bound);

// `G_i(r)` for all `dim` types; `bounds` may be null.
//
// # Safety
// `v` must hold `dim` readable elements; `values` (and `bounds` when
// non-null) `dim` writable ones.
enum MpcrStatus mpcr_g(double r,
                       const double *v,
                       size_t dim,
                       double tol,
                       double *values,
                       double *bounds);

// `F^(n)(x)` for a `dim`-vector; negative `n` iterates the inverse.
//
// # Safety
// `x`, `v` must hold `dim` readable elements and `out` `dim` writable ones.
enum MpcrStatus mpcr_multi_iterate(const double *x,
                                   int32_t n,
                                   const double *v,
                                   size_t dim,
                                   double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MPCR_H */
