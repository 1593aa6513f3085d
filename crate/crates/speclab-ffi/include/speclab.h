#ifndef SPECLAB_H
#define SPECLAB_H

/* generated from the speclab-ffi crate; regenerate with cargo build, do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * status code returned by every fallible function. anything other than
 * `Ok` leaves a detail message in [`speclab_last_error_message`].
 */
typedef enum SpeclabStatus {
  /**
   * the call succeeded.
   */
  SPECLAB_STATUS_OK = 0,
  /**
   * a required pointer argument was null.
   */
  SPECLAB_STATUS_NULL_ARGUMENT = 1,
  /**
   * an argument was out of range or structurally invalid.
   */
  SPECLAB_STATUS_INVALID_ARGUMENT = 2,
  /**
   * textual input could not be parsed.
   */
  SPECLAB_STATUS_PARSE_ERROR = 3,
  /**
   * the computation itself failed (singularity, contour through the
   * spectrum, rational shape parameter, ...).
   */
  SPECLAB_STATUS_NUMERICAL_ERROR = 4,
  /**
   * an index was outside the matrix dimensions.
   */
  SPECLAB_STATUS_INDEX_OUT_OF_BOUNDS = 5,
  /**
   * an internal invariant broke; the library caught the panic at the
   * boundary instead of unwinding into C.
   */
  SPECLAB_STATUS_INTERNAL_PANIC = 6,
} SpeclabStatus;

/**
 * opaque complex-matrix handle. create with [`speclab_matrix_create`],
 * [`speclab_matrix_from_json`], or [`speclab_bundled_model_matrix`];
 * release with [`speclab_matrix_free`].
 */
typedef struct SpeclabMatrix SpeclabMatrix;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * library version as a static, NUL-terminated string. never null; do not
 * free.
 */
const char *speclab_version(void);

/**
 * detail message of the most recent failure on the calling thread. the
 * pointer stays valid until the next failing call on the same thread; do
 * not free. the message is empty when no failure happened yet.
 */
const char *speclab_last_error_message(void);

/**
 * build a matrix from row-major interleaved data `[re00, im00, re01,
 * im01, ...]` of length `2 * rows * cols`. every entry must be finite.
 */
enum SpeclabStatus speclab_matrix_create(size_t rows,
                                         size_t cols,
                                         const double *interleaved,
                                         struct SpeclabMatrix **out);

/**
 * parse a matrix from the JSON wire format
 * `{"rows": r, "cols": c, "data": [[re, im], ...]}`.
 */
enum SpeclabStatus speclab_matrix_from_json(const char *text, struct SpeclabMatrix **out);

/**
 * serialize a matrix to the JSON wire format. the returned string must be
 * released with [`speclab_string_free`].
 */
enum SpeclabStatus speclab_matrix_to_json(const struct SpeclabMatrix *matrix, char **out);

/**
 * release a string returned by this library. null is ignored.
 */
void speclab_string_free(char *text);

/**
 * release a matrix handle. null is ignored.
 */
void speclab_matrix_free(struct SpeclabMatrix *matrix);

/**
 * number of rows.
 */
enum SpeclabStatus speclab_matrix_rows(const struct SpeclabMatrix *matrix, size_t *out);

/**
 * number of columns.
 */
enum SpeclabStatus speclab_matrix_cols(const struct SpeclabMatrix *matrix, size_t *out);

/**
 * read entry (i, j) into `re`/`im` (either may be null to skip it).
 */
enum SpeclabStatus speclab_matrix_get(const struct SpeclabMatrix *matrix,
                                      size_t i,
                                      size_t j,
                                      double *re,
                                      double *im);

/**
 * matrix of a bundled operator model, looked up by name (for example
 * "diagonal-simple", "jordan-two", "mixed-sign-six").
 */
enum SpeclabStatus speclab_bundled_model_matrix(const char *name, struct SpeclabMatrix **out);

/**
 * spectral operator norm (largest singular value).
 */
enum SpeclabStatus speclab_op_norm(const struct SpeclabMatrix *matrix, double *out);

/**
 * matrix exponential exp(A) of a square matrix.
 */
enum SpeclabStatus speclab_mat_exp(const struct SpeclabMatrix *matrix, struct SpeclabMatrix **out);

/**
 * spectral projector of `a` for the eigenvalues enclosed by the circle
 * around `center_re + center_im·i` with the given radius, integrated on
 * `nodes` trapezoid nodes (0 picks the default, 64). `idempotence_defect`,
 * `trace_re`, and `trace_im` may each be null to skip that diagnostic.
 */
enum SpeclabStatus speclab_riesz_projector(const struct SpeclabMatrix *a,
                                           double center_re,
                                           double center_im,
                                           double radius,
                                           size_t nodes,
                                           struct SpeclabMatrix **projector,
                                           double *idempotence_defect,
                                           double *trace_re,
                                           double *trace_im);

/**
 * the `order`-times integrated group S_order(t) of the square matrix `a`,
 * evaluated through the block-exponential.
 */
enum SpeclabStatus speclab_integrated_group(const struct SpeclabMatrix *a,
                                            size_t order,
                                            double t,
                                            struct SpeclabMatrix **out);

/**
 * half-plane separation composite ℙ·A^(−m−1) over the split contour.
 * nonpositive `cut_radius`/`outer_radius` and zero node counts pick the
 * defaults (1e-7, 1e4, 768, 64). `truncation_estimate` may be null.
 */
enum SpeclabStatus speclab_separation_operator(const struct SpeclabMatrix *a,
                                               size_t m,
                                               double cut_radius,
                                               double outer_radius,
                                               size_t segment_nodes,
                                               size_t arc_nodes,
                                               struct SpeclabMatrix **out,
                                               double *truncation_estimate);

/**
 * best observed constant in |alpha − p/q| ≥ C/q^degree over denominators
 * up to `qmax`. `p` and `q` may be null; they receive the minimizing
 * rational.
 */
enum SpeclabStatus speclab_diophantine_constant(double alpha,
                                                uint32_t degree,
                                                uint64_t qmax,
                                                double *c_est,
                                                int64_t *p,
                                                int64_t *q);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPECLAB_H */
