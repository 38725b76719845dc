#ifndef RECDIFF_H
#define RECDIFF_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RecdiffStatus {
  RECDIFF_STATUS_OK = 0,
  RECDIFF_STATUS_USAGE = 1,
  RECDIFF_STATUS_CUTOFF_UNSAFE = 2,
  RECDIFF_STATUS_PRECISION_EXHAUSTED = 3,
  RECDIFF_STATUS_INVALID_INPUT = 4,
  RECDIFF_STATUS_NULL_POINTER = 5,
  RECDIFF_STATUS_PANIC = 6,
} RecdiffStatus;

/**
 * Opaque sequence handle.
 */
typedef struct RecdiffSequence RecdiffSequence;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a sequence `U_{n+k} = c_1 U_{n+k-1} + ... + c_k U_n`.
 *
 * # Safety
 * `coefficients` and `initial_terms` must point to `order` readable values;
 * `out` must be writable. Free the result with [`recdiff_sequence_free`].
 */
enum RecdiffStatus recdiff_sequence_new(const int64_t *coefficients,
                                        const int64_t *initial_terms,
                                        size_t order,
                                        struct RecdiffSequence **out);

/**
 * Looks up `fib`, `lucas`, `pow2`, `pow3` or `tribonacci`.
 *
 * # Safety
 * `name` must be a nul-terminated string and `out` writable.
 */
enum RecdiffStatus recdiff_sequence_builtin(const char *name, struct RecdiffSequence **out);

/**
 * # Safety
 * `seq` must come from this library and not be used afterwards. Null is ignored.
 */
void recdiff_sequence_free(struct RecdiffSequence *seq);

/**
 * Writes `U_n` as a decimal string. Free it with [`recdiff_string_free`].
 *
 * # Safety
 * `seq` must be a live handle and `out` writable.
 */
enum RecdiffStatus recdiff_sequence_term(const struct RecdiffSequence *seq, uint64_t n, char **out);

/**
 * # Safety
 * `s` must come from this library. Null is ignored.
 */
void recdiff_string_free(char *s);

/**
 * Exact `T(x)` and `S(x)` for a decimal integer `x >= 0`.
 *
 * # Safety
 * `u`, `v` must be live handles, `x` nul-terminated, outputs writable.
 */
enum RecdiffStatus recdiff_count(struct RecdiffSequence *u,
                                 struct RecdiffSequence *v,
                                 const char *x,
                                 uint64_t *out_t,
                                 uint64_t *out_s);

/**
 * Main term `(log x)^2 / (log|α| · log|β|)`.
 *
 * # Safety
 * `u`, `v` must be live handles and `out` writable.
 */
enum RecdiffStatus recdiff_main_term(struct RecdiffSequence *u,
                                     struct RecdiffSequence *v,
                                     double x,
                                     double *out);

/**
 * Matveev lower bound for `log|Λ|` with `t` logarithms.
 *
 * # Safety
 * `a` must point to `t` readable values and `out` be writable.
 */
enum RecdiffStatus recdiff_matveev_lower_bound(size_t t,
                                               uint32_t d,
                                               double b,
                                               const double *a,
                                               double *out);

/**
 * Message of the last failure on this thread, or null. Valid until the
 * next call into this library on the same thread.
 */
const char *recdiff_last_error(void);

/**
 * Library version as a static string.
 */
const char *recdiff_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RECDIFF_H */
