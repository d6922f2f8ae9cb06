#ifndef MULMETRIC_H
#define MULMETRIC_H

#include <stdbool.h>
#include <stddef.h>

/**
 * Result code of every call.
 */
typedef enum MmStatus {
  MM_STATUS_OK = 0,
  MM_STATUS_NULL_POINTER = 1,
  MM_STATUS_INVALID_ARGUMENT = 2,
  MM_STATUS_PARSE_ERROR = 3,
  MM_STATUS_DOMAIN_ERROR = 4,
  MM_STATUS_UNKNOWN_ID = 5,
  MM_STATUS_NOT_CONVERGED = 6,
  MM_STATUS_INVARIANT_BREACH = 7,
  MM_STATUS_PRECONDITION_FAILED = 8,
  MM_STATUS_BUFFER_TOO_SMALL = 9,
  MM_STATUS_PANIC = 99,
} MmStatus;

/**
 * Opaque validated problem.
 */
typedef struct MmProblem MmProblem;

/**
 * Opaque solver result.
 */
typedef struct MmReport MmReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null. Valid until
 * the next call into this library on the same thread.
 */
const char *mm_last_error_message(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not have been freed already.
 */
void mm_string_free(char *s);

/**
 * Loads a built-in problem such as `"paper-scalar"`.
 *
 * # Safety
 * `id` must be a NUL-terminated string; `out` must be writable.
 */
enum MmStatus mm_problem_from_registry(const char *id, struct MmProblem **out);

/**
 * Parses a TOML problem definition.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum MmStatus mm_problem_from_toml(const char *text, struct MmProblem **out);

/**
 * Serializes the problem back to TOML.
 *
 * # Safety
 * `problem` must be a live handle; `out` must be writable.
 */
enum MmStatus mm_problem_to_toml(const struct MmProblem *problem, char **out);

/**
 * Replaces the start point. The problem is unchanged on failure.
 *
 * # Safety
 * `problem` must be a live handle; `x0` must point to `len` doubles.
 */
enum MmStatus mm_problem_set_x0(struct MmProblem *problem, const double *x0, size_t len);

/**
 * Replaces the stopping tolerance (log units) and iteration cap.
 *
 * # Safety
 * `problem` must be a live handle.
 */
enum MmStatus mm_problem_set_tolerance(struct MmProblem *problem, double tol_log, size_t max_iter);

/**
 * Coordinates per point of the problem's space.
 *
 * # Safety
 * `problem` must be a live handle or null.
 */
size_t mm_problem_dim(const struct MmProblem *problem);

/**
 * # Safety
 * `problem` must come from this library and not have been freed already.
 */
void mm_problem_free(struct MmProblem *problem);

/**
 * Solves the problem. A report is produced whenever iteration ran to
 * completion; `NotConverged` then signals that the cap was hit first.
 *
 * # Safety
 * `problem` must be a live handle; `out` must be writable.
 */
enum MmStatus mm_solve(const struct MmProblem *problem, struct MmReport **out);

/**
 * Copies the fixed point into `buf`, which must hold `mm_report_dim` doubles.
 *
 * # Safety
 * `report` must be a live handle; `buf` must point to `len` writable doubles.
 */
enum MmStatus mm_report_fixed_point(const struct MmReport *report, double *buf, size_t len);

/**
 * # Safety
 * `report` must be a live handle or null.
 */
size_t mm_report_dim(const struct MmReport *report);

/**
 * Measured `ln d(fz, z)`; NaN for a null handle.
 *
 * # Safety
 * `report` must be a live handle or null.
 */
double mm_report_residual_log(const struct MmReport *report);

/**
 * Certified bound on `ln d(z, z*)`; NaN for a null handle.
 *
 * # Safety
 * `report` must be a live handle or null.
 */
double mm_report_error_bound_log(const struct MmReport *report);

/**
 * # Safety
 * `report` must be a live handle or null.
 */
size_t mm_report_iterations(const struct MmReport *report);

/**
 * # Safety
 * `report` must be a live handle or null.
 */
bool mm_report_converged(const struct MmReport *report);

/**
 * The JSON trace, identical to what the command line writes.
 *
 * # Safety
 * `report` must be a live handle; `out` must be writable.
 */
enum MmStatus mm_report_to_json(const struct MmReport *report, char **out);

/**
 * # Safety
 * `report` must come from this library and not have been freed already.
 */
void mm_report_free(struct MmReport *report);

/**
 * `ln |a|*`.
 *
 * # Safety
 * `out_log` must be writable.
 */
enum MmStatus mm_mabs(double a, double *out_log);

/**
 * `ln d*(x, y)` for two points of `R+^n`.
 *
 * # Safety
 * `x` and `y` must point to `n` doubles; `out_log` must be writable.
 */
enum MmStatus mm_dist_pos_vec(const double *x, const double *y, size_t n, double *out_log);

/**
 * `ln d_a(x, y)` for two points of `R^n`.
 *
 * # Safety
 * `x` and `y` must point to `n` doubles; `out_log` must be writable.
 */
enum MmStatus mm_dist_exp(const double *x, const double *y, size_t n, double base, double *out_log);

/**
 * `rate^n / (1 - rate) · d10_log`.
 *
 * # Safety
 * `out_log` must be writable.
 */
enum MmStatus mm_apriori_bound(double d10_log, double rate, size_t n, double *out_log);

/**
 * Estimates the problem map's contraction constant from `pairs` samples
 * drawn with the problem's seed.
 *
 * # Safety
 * `problem` must be a live handle; `out` must be writable.
 */
enum MmStatus mm_estimate_lambda(const struct MmProblem *problem, size_t pairs, double *out);

/**
 * Checks the problem's contraction hypothesis on `samples` seeded pairs.
 *
 * # Safety
 * `problem` must be a live handle; `holds` must be writable.
 */
enum MmStatus mm_verify_contraction(const struct MmProblem *problem, size_t samples, bool *holds);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MULMETRIC_H */
