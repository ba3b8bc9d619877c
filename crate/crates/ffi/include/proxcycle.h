#ifndef PROXCYCLE_H
#define PROXCYCLE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum PcOutcomeKind {
  PC_OUTCOME_KIND_FIXED_POINT = 0,
  PC_OUTCOME_KIND_BEST_PROXIMITY_PAIR = 1,
  PC_OUTCOME_KIND_NOT_CONVERGED = 2,
} PcOutcomeKind;

/**
 * Choice of the next iterate within a multivalued image.
 */
typedef enum PcPolicy {
  PC_POLICY_NEAREST = 0,
  PC_POLICY_FIRST_LISTED = 1,
  PC_POLICY_SEEDED_RANDOM = 2,
} PcPolicy;

typedef enum PcRegion {
  PC_REGION_DELTA1 = 0,
  PC_REGION_DELTA2 = 1,
  PC_REGION_DELTA3 = 2,
  PC_REGION_DELTA4 = 3,
  PC_REGION_DELTA_ONLY = 4,
  PC_REGION_OUTSIDE = 5,
} PcRegion;

/**
 * Result code of every fallible call.
 */
typedef enum PcStatus {
  PC_STATUS_OK = 0,
  PC_STATUS_NULL_POINTER = 1,
  PC_STATUS_INSTANCE_FORMAT = 2,
  PC_STATUS_PARAMS_UNSUPPORTED = 3,
  PC_STATUS_DOMAIN = 4,
  PC_STATUS_PARAMETER = 5,
  PC_STATUS_PRECONDITION = 6,
  PC_STATUS_IO = 7,
  PC_STATUS_INVALID_UTF8 = 8,
  PC_STATUS_PANIC = 9,
} PcStatus;

/**
 * Opaque instance handle.
 */
typedef struct PcInstance PcInstance;

/**
 * Opaque iteration trace handle.
 */
typedef struct PcTrace PcTrace;

/**
 * Parses an instance document.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum PcStatus pc_instance_from_json(const char *json, struct PcInstance **out);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
enum PcStatus pc_gallery_midpoint(size_t resolution, struct PcInstance **out);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
enum PcStatus pc_gallery_intersecting(double k, size_t resolution, struct PcInstance **out);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
enum PcStatus pc_gallery_multivalued_ball(double eps,
                                          size_t samples,
                                          size_t resolution,
                                          struct PcInstance **out);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
enum PcStatus pc_gallery_expansive(struct PcInstance **out);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
enum PcStatus pc_gallery_finite_random(uint64_t seed,
                                       size_t size_a,
                                       size_t size_b,
                                       struct PcInstance **out);

/**
 * Releases an instance. Null is ignored.
 *
 * # Safety
 * `inst` must come from this library and not have been freed.
 */
void pc_instance_free(struct PcInstance *inst);

/**
 * # Safety
 * `inst` must be a live handle and `out` a valid pointer.
 */
enum PcStatus pc_instance_dim(const struct PcInstance *inst, size_t *out);

/**
 * `D = dist(A, B)`.
 *
 * # Safety
 * `inst` must be a live handle and `out` a valid pointer.
 */
enum PcStatus pc_instance_set_distance(const struct PcInstance *inst, double *out);

/**
 * Serializes an instance; free the result with `pc_string_free`.
 *
 * # Safety
 * `inst` must be a live handle and `out` a valid pointer.
 */
enum PcStatus pc_instance_to_json(const struct PcInstance *inst, char **out);

/**
 * Checks the contractive condition. Either output pointer may be null.
 *
 * # Safety
 * `inst` must be a live handle; non-null outputs must be valid.
 */
enum PcStatus pc_certify(const struct PcInstance *inst,
                         size_t random_pairs,
                         uint64_t seed,
                         bool *certified,
                         size_t *violations);

/**
 * Full certificate as JSON; free the result with `pc_string_free`.
 *
 * # Safety
 * `inst` must be a live handle and `out` a valid pointer.
 */
enum PcStatus pc_certify_json(const struct PcInstance *inst,
                              size_t random_pairs,
                              uint64_t seed,
                              char **out);

/**
 * Iterates from `x0` (`dim` coordinates) and detects the limit.
 * `seed` is used only by `PC_POLICY_SEEDED_RANDOM`.
 *
 * # Safety
 * `inst` must be a live handle, `x0` must point to `dim` doubles and `out`
 * must be valid.
 */
enum PcStatus pc_iterate(const struct PcInstance *inst,
                         const double *x0,
                         size_t dim,
                         enum PcPolicy policy,
                         uint64_t seed,
                         size_t max_iter,
                         double tol,
                         struct PcTrace **out);

/**
 * Releases a trace. Null is ignored.
 *
 * # Safety
 * `trace` must come from this library and not have been freed.
 */
void pc_trace_free(struct PcTrace *trace);

/**
 * Number of points in the trace (steps + 1); 0 for a null handle.
 *
 * # Safety
 * `trace` must be null or a live handle.
 */
size_t pc_trace_len(const struct PcTrace *trace);

/**
 * Copies point `index` into `buf`, which holds `buf_len` doubles.
 *
 * # Safety
 * `trace` must be a live handle and `buf` must point to `buf_len` doubles.
 */
enum PcStatus pc_trace_point(const struct PcTrace *trace,
                             size_t index,
                             double *buf,
                             size_t buf_len);

/**
 * `d(x_{index+1}, x_{index+2})` in the 1-based numbering of the orbit.
 *
 * # Safety
 * `trace` must be a live handle and `out` a valid pointer.
 */
enum PcStatus pc_trace_step_dist(const struct PcTrace *trace, size_t index, double *out);

/**
 * Kind of the detected limit. For a fixed point the limit is copied into
 * `z_a`; for a best proximity pair into `z_a` and `z_b`. Buffers may be
 * null when the coordinates are not wanted.
 *
 * # Safety
 * `trace` must be a live handle, `kind` a valid pointer, and non-null
 * buffers must hold `buf_len` doubles.
 */
enum PcStatus pc_trace_outcome(const struct PcTrace *trace,
                               enum PcOutcomeKind *kind,
                               double *z_a,
                               double *z_b,
                               size_t buf_len);

/**
 * Hausdorff distance `h` and set distance `d` between two point clouds
 * given as row-major arrays of `n_a` and `n_b` points of dimension `dim`.
 *
 * # Safety
 * `a` and `b` must point to `n_a * dim` and `n_b * dim` doubles; `h` and
 * `d` must be valid.
 */
enum PcStatus pc_hausdorff(const double *a,
                           size_t n_a,
                           const double *b,
                           size_t n_b,
                           size_t dim,
                           double *h,
                           double *d);

/**
 * Precedence label of `(alpha, beta)`.
 */
enum PcRegion pc_classify_region(double alpha, double beta);

/**
 * Rate constants `K1`, `K2` and `omega*` of `(k, alpha, beta)`.
 *
 * # Safety
 * The three outputs must be valid pointers.
 */
enum PcStatus pc_derived_constants(double k,
                                   double alpha,
                                   double beta,
                                   double *k1,
                                   double *k2,
                                   double *omega_star);

/**
 * Message of the last failure on this thread, or null if none. Free the
 * result with `pc_string_free`.
 */
char *pc_last_error_message(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void pc_string_free(char *s);

#endif  /* PROXCYCLE_H */
