#ifndef SETQUAD_H
#define SETQUAD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum SqStatus {
  SQ_STATUS_OK = 0,
  SQ_STATUS_NULL_POINTER = 1,
  SQ_STATUS_INVALID_INPUT = 2,
  SQ_STATUS_DIMENSION_MISMATCH = 3,
  SQ_STATUS_COUNT_MISMATCH = 4,
  SQ_STATUS_OUT_OF_DOMAIN = 5,
  SQ_STATUS_NOT_STRICTLY_INCREASING = 6,
  SQ_STATUS_NONCONVERGENCE = 7,
  SQ_STATUS_GRID_MISMATCH = 8,
  SQ_STATUS_BUFFER_TOO_SMALL = 9,
  SQ_STATUS_IO = 10,
  SQ_STATUS_PANIC = 11,
} SqStatus;

// Convex body stored by its support values on a grid.
typedef struct SqBody SqBody;

// Finite point cloud in R^m.
typedef struct SqCloud SqCloud;

// Direction grid of a support-function representation.
typedef struct SqGrid SqGrid;

// Sorted distinct knots in [0, 1].
typedef struct SqKnots SqKnots;

// Modulus of continuity ω.
typedef struct SqModulus SqModulus;

// Weight P on [0, 1].
typedef struct SqWeight SqWeight;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the most recent failed call on this thread ("" if none).
// Valid until the next failing call on the same thread.
const char *sq_last_error_message(void);

// Library version as a static nul-terminated string.
const char *sq_version(void);

// ω(t) = c·t^alpha.
enum SqStatus sq_modulus_power(double c, double alpha, struct SqModulus **out);

// ω(t) = min(slope·t, cap).
enum SqStatus sq_modulus_capped_linear(double slope, double cap, struct SqModulus **out);

// Piecewise-linear ω through (t[i], values[i]).
enum SqStatus sq_modulus_tabulated(const double *t,
                                   const double *values,
                                   size_t len,
                                   struct SqModulus **out);

// ω(t) for t in [0, 1].
enum SqStatus sq_modulus_eval(const struct SqModulus *m, double t, double *out);

void sq_modulus_free(struct SqModulus *m);

// P ≡ 1.
enum SqStatus sq_weight_constant_one(struct SqWeight **out);

// P(x) = Σ coeffs[k]·x^k.
enum SqStatus sq_weight_polynomial(const double *coeffs, size_t len, struct SqWeight **out);

// Piecewise-linear P through (x[i], values[i]).
enum SqStatus sq_weight_tabulated(const double *x,
                                  const double *values,
                                  size_t len,
                                  struct SqWeight **out);

void sq_weight_free(struct SqWeight *w);

enum SqStatus sq_knots_new(const double *x, size_t len, struct SqKnots **out);

// x_i = (2i − 1)/(2n).
enum SqStatus sq_knots_midpoints(size_t n, struct SqKnots **out);

// Locally optimal knots for P and ω; `out_error` may be null.
enum SqStatus sq_knots_optimize(const struct SqWeight *weight,
                                const struct SqModulus *modulus,
                                size_t n,
                                size_t starts,
                                uint64_t seed,
                                struct SqKnots **out,
                                double *out_error);

size_t sq_knots_len(const struct SqKnots *k);

// Copies the knots into `buf`, which must hold `sq_knots_len` values.
enum SqStatus sq_knots_copy(const struct SqKnots *k, double *buf, size_t len);

void sq_knots_free(struct SqKnots *k);

// Default grid for dimension `dim`.
enum SqStatus sq_grid_default(size_t dim, struct SqGrid **out);

// Grid with `size` directions in dimension `dim`.
enum SqStatus sq_grid_with_size(size_t dim, size_t size, struct SqGrid **out);

size_t sq_grid_len(const struct SqGrid *g);

void sq_grid_free(struct SqGrid *g);

// Cloud of `points` points of dimension `dim`, row-major in `coords`.
enum SqStatus sq_cloud_new(size_t dim, const double *coords, size_t points, struct SqCloud **out);

void sq_cloud_free(struct SqCloud *c);

// Hausdorff distance between two clouds.
enum SqStatus sq_cloud_hausdorff(const struct SqCloud *a, const struct SqCloud *b, double *out);

// Support representation of co A.
enum SqStatus sq_body_embed(const struct SqCloud *c, const struct SqGrid *g, struct SqBody **out);

enum SqStatus sq_body_hausdorff(const struct SqBody *a, const struct SqBody *b, double *out);

// Number of support values, equal to the grid size.
size_t sq_body_len(const struct SqBody *b);

// Copies the support values into `buf`, which must hold `sq_body_len` values.
enum SqStatus sq_body_support(const struct SqBody *b, double *buf, size_t len);

void sq_body_free(struct SqBody *b);

// ∫₀¹ P(x) ω(dist(x, knots)) dx.
enum SqStatus sq_worst_case_error(const struct SqModulus *modulus,
                                  const struct SqWeight *weight,
                                  const struct SqKnots *knots,
                                  double *out);

// 2n ∫₀^{1/2n} ω.
enum SqStatus sq_uniform_optimal_error(const struct SqModulus *modulus, size_t n, double *out);

// The optimal method applied to `count` samples, one per knot.
enum SqStatus sq_phi_star(const struct SqCloud *const *samples,
                          size_t count,
                          const struct SqKnots *knots,
                          const struct SqWeight *weight,
                          const struct SqGrid *grid,
                          struct SqBody **out);

// Lower bound of the sharpness certificate minus the closed form, in absolute value.
enum SqStatus sq_sharpness_gap(const struct SqModulus *modulus,
                               const struct SqWeight *weight,
                               const struct SqKnots *knots,
                               const struct SqGrid *grid,
                               const double *direction,
                               size_t dim,
                               double *out);

// Σ_k Ω^{-1}(P((2k − 1)/2n)·Ω(1/n)).
enum SqStatus sq_asymptotic_b(const struct SqWeight *weight,
                              const struct SqModulus *modulus,
                              size_t n,
                              double *out);

// ∫₀¹ P(x)·min_k(eps[k] + ω(|x − x_k|)) dx.
enum SqStatus sq_noisy_error_value(const struct SqModulus *modulus,
                                   const struct SqKnots *knots,
                                   const double *eps,
                                   size_t len,
                                   const struct SqWeight *weight,
                                   double *out);

// Writes the increasing active knot indices into `indices` (room for
// `capacity` entries) and their number into `out_count`.
enum SqStatus sq_noisy_active_indices(const struct SqModulus *modulus,
                                      const struct SqKnots *knots,
                                      const double *eps,
                                      size_t len,
                                      const struct SqWeight *weight,
                                      size_t *indices,
                                      size_t capacity,
                                      size_t *out_count);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SETQUAD_H */
