#ifndef RESGROUPOID_H
#define RESGROUPOID_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum RgStatus {
  RG_STATUS_OK = 0,
  RG_STATUS_NULL_POINTER = 1,
  RG_STATUS_INVALID_ARGUMENT = 2,
  RG_STATUS_NON_FINITE = 3,
  RG_STATUS_NON_CONVERGENCE = 4,
  RG_STATUS_DIMENSION_MISMATCH = 5,
  /**
   * Input is not a projector, partial isometry, unitary or orthonormal frame.
   */
  RG_STATUS_INVALID_OPERATOR = 6,
  RG_STATUS_OUTSIDE_DOMAIN = 7,
  RG_STATUS_NOT_COMPOSABLE = 8,
  RG_STATUS_INTERNAL = 9,
} RgStatus;

/**
 * Which verification suite [`rg_run_suite`] runs.
 */
typedef enum RgSuite {
  RG_SUITE_GROUPOID = 0,
  RG_SUITE_CHARTS = 1,
} RgSuite;

/**
 * Opaque partial isometry.
 */
typedef struct RgArrow RgArrow;

/**
 * Opaque dense complex matrix.
 */
typedef struct RgMatrix RgMatrix;

/**
 * Opaque subspace of `C^n`.
 */
typedef struct RgSubspace RgSubspace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or null after a success.
 * The pointer stays valid until the next call into this library on the same thread.
 */
const char *rg_last_error_message(void);

/**
 * Creates a `rows x cols` matrix from `2 * rows * cols` interleaved doubles.
 *
 * # Safety
 * `data` must point to `2 * rows * cols` readable doubles; `out` must be writable.
 */
enum RgStatus rg_matrix_new(size_t rows, size_t cols, const double *data, struct RgMatrix **out);

/**
 * # Safety
 * `m` must be null or a handle from this library, not yet freed.
 */
void rg_matrix_free(struct RgMatrix *m);

/**
 * # Safety
 * `m` must be a live matrix handle; `rows` and `cols` must be writable.
 */
enum RgStatus rg_matrix_shape(const struct RgMatrix *m, size_t *rows, size_t *cols);

/**
 * Copies the entries as interleaved row-major doubles into `out`, which holds `len` doubles.
 *
 * # Safety
 * `m` must be a live matrix handle; `out` must point to `len` writable doubles.
 */
enum RgStatus rg_matrix_read(const struct RgMatrix *m, double *out, size_t len);

/**
 * Schatten `p`-norm; pass `INFINITY` for the operator norm.
 *
 * # Safety
 * `m` must be a live matrix handle; `out` must be writable.
 */
enum RgStatus rg_schatten_norm(const struct RgMatrix *m, double p, double *out);

/**
 * Subspace spanned by the columns of `m`, which must have full column rank.
 *
 * # Safety
 * `m` must be a live matrix handle; `out` must be writable.
 */
enum RgStatus rg_subspace_from_span(const struct RgMatrix *m, struct RgSubspace **out);

/**
 * `H+` for the polarization `C^{n_plus} + C^{n_minus}`.
 *
 * # Safety
 * `out` must be writable.
 */
enum RgStatus rg_subspace_h_plus(size_t n_plus, size_t n_minus, struct RgSubspace **out);

/**
 * # Safety
 * `s` must be null or a handle from this library, not yet freed.
 */
void rg_subspace_free(struct RgSubspace *s);

/**
 * # Safety
 * `s` must be a live subspace handle; `dim` and `ambient` must be writable.
 */
enum RgStatus rg_subspace_dims(const struct RgSubspace *s, size_t *dim, size_t *ambient);

/**
 * Orthogonal projector onto `s` as a new matrix.
 *
 * # Safety
 * `s` must be a live subspace handle; `out` must be writable.
 */
enum RgStatus rg_subspace_projector(const struct RgSubspace *s, struct RgMatrix **out);

/**
 * Graph coordinate of `v` in the chart at `w`, an `(n - k) x k` matrix.
 *
 * # Safety
 * `w` and `v` must be live subspace handles; `out` must be writable.
 */
enum RgStatus rg_chart_forward(const struct RgSubspace *w,
                               const struct RgSubspace *v,
                               struct RgMatrix **out);

/**
 * Subspace with graph coordinate `coeff` in the chart at `w`.
 *
 * # Safety
 * `w` must be a live subspace handle, `coeff` a live matrix handle; `out` must be writable.
 */
enum RgStatus rg_chart_inverse(const struct RgSubspace *w,
                               const struct RgMatrix *coeff,
                               struct RgSubspace **out);

/**
 * Validates `m` as a partial isometry.
 *
 * # Safety
 * `m` must be a live matrix handle; `out` must be writable.
 */
enum RgStatus rg_arrow_new(const struct RgMatrix *m, struct RgArrow **out);

/**
 * # Safety
 * `a` must be null or a handle from this library, not yet freed.
 */
void rg_arrow_free(struct RgArrow *a);

/**
 * # Safety
 * `a` must be a live arrow handle; `out` must be writable.
 */
enum RgStatus rg_arrow_matrix(const struct RgArrow *a, struct RgMatrix **out);

/**
 * Product `g h`; fails with `NotComposable` unless `s(g) = t(h)`.
 *
 * # Safety
 * `g` and `h` must be live arrow handles; `out` must be writable.
 */
enum RgStatus rg_arrow_compose(const struct RgArrow *g,
                               const struct RgArrow *h,
                               struct RgArrow **out);

/**
 * # Safety
 * `a` must be a live arrow handle; `out` must be writable.
 */
enum RgStatus rg_arrow_invert(const struct RgArrow *a, struct RgArrow **out);

/**
 * Initial subspace `u*u`.
 *
 * # Safety
 * `a` must be a live arrow handle; `out` must be writable.
 */
enum RgStatus rg_arrow_source(const struct RgArrow *a, struct RgSubspace **out);

/**
 * Final subspace `uu*`.
 *
 * # Safety
 * `a` must be a live arrow handle; `out` must be writable.
 */
enum RgStatus rg_arrow_target(const struct RgArrow *a, struct RgSubspace **out);

/**
 * `||[u, P+]||_p` for the polarization with `n_plus` leading coordinates.
 *
 * # Safety
 * `a` must be a live arrow handle; `out` must be writable.
 */
enum RgStatus rg_commutator_defect(const struct RgArrow *a, size_t n_plus, double p, double *out);

/**
 * Runs a verification suite with `k = n_plus` and default tolerances and returns
 * the JSON report as a NUL-terminated string to be released with [`rg_string_free`].
 * `passed` receives 1 when every check passed and 0 otherwise.
 *
 * # Safety
 * `json` and `passed` must be writable.
 */
enum RgStatus rg_run_suite(enum RgSuite suite,
                           size_t n_plus,
                           size_t n_minus,
                           size_t trials,
                           uint64_t seed,
                           char **json,
                           int32_t *passed);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void rg_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RESGROUPOID_H */
