#ifndef DPBB_H
#define DPBB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DpbbStatus {
  DPBB_STATUS_OK = 0,
  DPBB_STATUS_IO = 1,
  DPBB_STATUS_PARSE = 2,
  DPBB_STATUS_DIMENSION = 3,
  DPBB_STATUS_RANK_DEFICIENT = 4,
  DPBB_STATUS_INVALID_SPEC = 5,
  DPBB_STATUS_NULL_POINTER = 6,
  DPBB_STATUS_BUFFER_TOO_SMALL = 7,
  DPBB_STATUS_PANIC = 8,
} DpbbStatus;

typedef enum DpbbFamily {
  DPBB_FAMILY_PAPER1 = 1,
  DPBB_FAMILY_PAPER2 = 2,
} DpbbFamily;

/*
 Opaque problem handle.
 */
typedef struct DpbbProblem DpbbProblem;

/*
 Opaque handle to a finished DPBB solve.
 */
typedef struct DpbbSolveResult DpbbSolveResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message describing the last failure on this thread; empty after a
 successful call. Valid until the next `dpbb_*` call on the same thread.
 */
const char *dpbb_last_error(void);

/*
 Builds a problem from a row-major `rows x cols` matrix and a length
 `rows` right-hand side. `rank_threshold == 0` selects the default 1e-10.

 # Safety
 `a` must point to `rows * cols` readable doubles, `b` to `rows`, and
 `out` to writable storage for one handle pointer.
 */
enum DpbbStatus dpbb_problem_new(size_t rows,
                                 size_t cols,
                                 const double *a,
                                 const double *b,
                                 double rank_threshold,
                                 struct DpbbProblem **out);

/*
 Builds a test problem (`family` is a `DpbbFamily` value) with its
 default planted solution. With `noisy` set, the right-hand side carries
 `noise_fraction * U[0,1)` noise drawn from `seed`.

 # Safety
 `out` must point to writable storage for one handle pointer.
 */
enum DpbbStatus dpbb_problem_generate(uint32_t family,
                                      double noise_fraction,
                                      uint64_t seed,
                                      bool noisy,
                                      struct DpbbProblem **out);

/*
 # Safety
 `problem` must be NULL or a handle from this library not yet freed.
 */
void dpbb_problem_free(struct DpbbProblem *problem);

/*
 # Safety
 `problem` must be NULL or a live handle.
 */
size_t dpbb_problem_rows(const struct DpbbProblem *problem);

/*
 # Safety
 `problem` must be NULL or a live handle.
 */
size_t dpbb_problem_cols(const struct DpbbProblem *problem);

/*
 Copies the row-major matrix into `out` (at least rows*cols entries).

 # Safety
 `problem` must be a live handle; `out` must hold `len` writable doubles.
 */
enum DpbbStatus dpbb_problem_copy_matrix(const struct DpbbProblem *problem,
                                         double *out,
                                         size_t len);

/*
 Copies the right-hand side into `out` (at least rows entries).

 # Safety
 `problem` must be a live handle; `out` must hold `len` writable doubles.
 */
enum DpbbStatus dpbb_problem_copy_rhs(const struct DpbbProblem *problem, double *out, size_t len);

/*
 Runs the DPBB sweep.

 # Safety
 `problem` must be a live handle; `out` must point to storage for one pointer.
 */
enum DpbbStatus dpbb_solve_problem(const struct DpbbProblem *problem, struct DpbbSolveResult **out);

/*
 # Safety
 `result` must be NULL or a handle from this library not yet freed.
 */
void dpbb_result_free(struct DpbbSolveResult *result);

/*
 Number of unknowns, 0 for NULL.

 # Safety
 `result` must be NULL or a live handle.
 */
size_t dpbb_result_len(const struct DpbbSolveResult *result);

/*
 `‖A x − b‖²` of the returned solution, NaN for NULL.

 # Safety
 `result` must be NULL or a live handle.
 */
double dpbb_result_final_sse(const struct DpbbSolveResult *result);

/*
 # Safety
 `result` must be a live handle; `out` must hold `len` writable bytes.
 */
enum DpbbStatus dpbb_result_solution(const struct DpbbSolveResult *result,
                                     uint8_t *out,
                                     size_t len);

/*
 Branch errors and decision of 1-based `stage`. Any output pointer may be NULL.

 # Safety
 `result` must be a live handle; non-NULL outputs must be writable.
 */
enum DpbbStatus dpbb_result_stage(const struct DpbbSolveResult *result,
                                  size_t stage,
                                  double *sse0,
                                  double *sse1,
                                  uint8_t *decision);

/*
 Full per-stage trace as a JSON string; release with [`dpbb_string_free`].
 Returns NULL on failure.

 # Safety
 `result` must be NULL or a live handle.
 */
char *dpbb_result_trace_json(const struct DpbbSolveResult *result);

/*
 # Safety
 `s` must be NULL or a string returned by this library, not yet freed.
 */
void dpbb_string_free(char *s);

/*
 Exhaustive minimizer over all `2^n` binary vectors, refusing `n > max_n`.

 # Safety
 `problem` must be a live handle; `x_out` must hold `len` writable bytes;
 `sse_out` must be NULL or writable.
 */
enum DpbbStatus dpbb_oracle_solve(const struct DpbbProblem *problem,
                                  size_t max_n,
                                  uint8_t *x_out,
                                  size_t len,
                                  double *sse_out);

/*
 Unconstrained least-squares solution, rounded at 0.5.

 # Safety
 `problem` must be a live handle; `real_x_out` (doubles) and `x_out`
 (bytes) must each hold `len` writable entries; `sse_out` may be NULL.
 */
enum DpbbStatus dpbb_baseline_solve(const struct DpbbProblem *problem,
                                    double *real_x_out,
                                    uint8_t *x_out,
                                    size_t len,
                                    double *sse_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DPBB_H */
