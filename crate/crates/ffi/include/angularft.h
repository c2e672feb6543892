/* C interface to the angularft transform engine. */

#ifndef ANGULARFT_H
#define ANGULARFT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code of every fallible call in this interface.
 */
typedef enum {
  AFT_STATUS_OK = 0,
  /**
   * Input outside an operation's domain of definition.
   */
  AFT_STATUS_DOMAIN_ERROR = 1,
  /**
   * Expression syntax error.
   */
  AFT_STATUS_PARSE_ERROR = 2,
  /**
   * Grammatical expression violating a semantic rule.
   */
  AFT_STATUS_SEMANTIC_ERROR = 3,
  /**
   * Invalid argument value.
   */
  AFT_STATUS_ARGUMENT_ERROR = 4,
  /**
   * Numeric integration did not converge.
   */
  AFT_STATUS_QUADRATURE_ERROR = 5,
  /**
   * Power/rank combination with no finite closed form.
   */
  AFT_STATUS_OUTSIDE_FRAMEWORK = 6,
  /**
   * Point-mass term whose radial power does not pair with its rank.
   */
  AFT_STATUS_UNPAIRED_DELTA = 7,
  /**
   * Exact result not representable in the coefficient ring.
   */
  AFT_STATUS_NOT_REPRESENTABLE = 8,
  /**
   * A required pointer argument was null.
   */
  AFT_STATUS_NULL_POINTER = 9,
  /**
   * A string argument was not valid UTF-8.
   */
  AFT_STATUS_INVALID_UTF8 = 10,
  /**
   * Internal invariant violation.
   */
  AFT_STATUS_INTERNAL_ERROR = 11,
} AftStatus;

/**
 * Opaque handle to a canonical position-space expression.
 */
typedef struct AftPositionExpr AftPositionExpr;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Returns the message describing the most recent failure on the
 * calling thread, or null if no failure has been recorded.
 *
 * # Safety
 *
 * The returned pointer borrows thread-local storage: it stays valid
 * until the next failing call on the same thread and must not be freed.
 */
const char *aft_last_error_message(void);

/**
 * Writes the exact radial transform coefficient for `p^n` at angular
 * momentum `ell`, rendered as a string such as `3/2*pi`, to `*out`.
 *
 * # Safety
 *
 * `out` must be a valid pointer. On success the caller owns the
 * written string and must release it with `aft_string_free`.
 */
AftStatus aft_chi(int64_t n, int64_t ell, char **out);

/**
 * Writes the analytically continued transform coefficient at real
 * (non-integer) arguments to `*out`.
 *
 * # Safety
 *
 * `out` must be a valid pointer.
 */
AftStatus aft_chi_float(double n, double ell, double *out);

/**
 * Writes the spherical Bessel function of the first kind `j_ell(x)`
 * to `*out`.
 *
 * # Safety
 *
 * `out` must be a valid pointer.
 */
AftStatus aft_sph_bessel(int64_t ell, double x, double *out);

/**
 * Evaluates the cutoff-regulated radial transform integral for `p^n`
 * at angular momentum `ell`, radius `r`, and regulator `lambda`, and
 * writes the converged estimate to `*out`.
 *
 * # Safety
 *
 * `out` must be a valid pointer.
 */
AftStatus aft_regulated_radial(int64_t n, int64_t ell, double r, double lambda, double *out);

/**
 * Transforms a momentum-side expression such as
 * `p^-2*phat[i1]*phat[i2]` to position space and writes an owned
 * handle to `*out`.
 *
 * # Safety
 *
 * `expr` must be a NUL-terminated string and `out` a valid pointer.
 * On success the caller owns the handle and must release it with
 * `aft_position_expr_free`.
 */
AftStatus aft_forward(const char *expr, AftPositionExpr **out);

/**
 * Renders a position-space expression to its canonical text form and
 * writes the string to `*out`.
 *
 * # Safety
 *
 * `expr` must be a live handle from `aft_forward` and `out` a valid
 * pointer. On success the caller owns the written string and must
 * release it with `aft_string_free`.
 */
AftStatus aft_position_expr_render(const AftPositionExpr *expr, char **out);

/**
 * Writes the number of canonical terms of a position-space expression
 * to `*out`.
 *
 * # Safety
 *
 * `expr` must be a live handle from `aft_forward` and `out` a valid
 * pointer.
 */
AftStatus aft_position_expr_term_count(const AftPositionExpr *expr, uintptr_t *out);

/**
 * Releases an expression handle; null is ignored.
 *
 * # Safety
 *
 * `expr` must be null or a handle from `aft_forward` that has not been
 * freed before.
 */
void aft_position_expr_free(AftPositionExpr *expr);

/**
 * Releases a string returned through a `char **` output; null is
 * ignored. Must not be called on the pointer returned by
 * `aft_last_error_message`.
 *
 * # Safety
 *
 * `s` must be null or an owned string from this interface that has not
 * been freed before.
 */
void aft_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ANGULARFT_H */
