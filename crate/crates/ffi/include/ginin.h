#ifndef GININ_H
#define GININ_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GininScheme {
  GININ_SCHEME_POINTWISE = 0,
  GININ_SCHEME_EXACT_CHOQUET = 1,
} GininScheme;

typedef enum GininStatus {
  GININ_STATUS_OK = 0,
  GININ_STATUS_NULL_POINTER = 1,
  GININ_STATUS_INVALID_UTF8 = 2,
  GININ_STATUS_DOMAIN = 3,
  GININ_STATUS_CONVERGENCE = 4,
  GININ_STATUS_ASSUMPTION_VIOLATED = 5,
  GININ_STATUS_PARSE = 6,
  GININ_STATUS_PARTITION = 7,
  GININ_STATUS_MONOTONICITY = 8,
  GININ_STATUS_ARITY = 9,
  GININ_STATUS_IO = 10,
  GININ_STATUS_PANIC = 11,
} GininStatus;

typedef enum GininTarget {
  GININ_TARGET_GD = 0,
  GININ_TARGET_GC = 1,
} GininTarget;

/**
 * Opaque parametric distribution.
 */
typedef struct GininDistribution GininDistribution;

/**
 * Opaque step quantile function.
 */
typedef struct GininStepQuantile GininStepQuantile;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *ginin_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ginin_version(void);

/**
 * Parses `family:p1[,p2[,p3]]`, e.g. `pareto:3,2`.
 *
 * # Safety
 * `spec` must be NULL or a NUL-terminated string; `out` must be NULL or
 * writable.
 */
enum GininStatus ginin_distribution_parse(const char *spec, struct GininDistribution **out);

/**
 * # Safety
 * `d` must be NULL or a handle from `ginin_distribution_parse` not yet freed.
 */
void ginin_distribution_free(struct GininDistribution *d);

/**
 * # Safety
 * `d` must be a live handle or NULL; `out` must be writable or NULL.
 */
enum GininStatus ginin_distribution_gd(const struct GininDistribution *d, uint32_t n, double *out);

/**
 * # Safety
 * `d` must be a live handle or NULL; `out` must be writable or NULL.
 */
enum GininStatus ginin_distribution_gc(const struct GininDistribution *d, uint32_t n, double *out);

/**
 * Asymptotic variance σ² of the sample estimator (so that the estimator's
 * variance is about σ²/N).
 *
 * # Safety
 * `d` must be a live handle or NULL; `out` must be writable or NULL.
 */
enum GininStatus ginin_distribution_asymptotic_variance(const struct GininDistribution *d,
                                                        uint32_t n,
                                                        enum GininTarget t,
                                                        double *out);

/**
 * Step quantile with `levels_len` levels on `breakpoints_len = levels_len + 1`
 * breakpoints running from 0 to 1.
 *
 * # Safety
 * The arrays must hold the stated number of doubles; `out` must be writable or NULL.
 */
enum GininStatus ginin_step_quantile_new(const double *breakpoints,
                                         size_t breakpoints_len,
                                         const double *levels,
                                         size_t levels_len,
                                         struct GininStepQuantile **out);

/**
 * Empirical quantile of a sample (any order).
 *
 * # Safety
 * `values` must hold `len` doubles; `out` must be writable or NULL.
 */
enum GininStatus ginin_step_quantile_from_sample(const double *values,
                                                 size_t len,
                                                 struct GininStepQuantile **out);

/**
 * # Safety
 * `q` must be NULL or a live step quantile handle.
 */
void ginin_step_quantile_free(struct GininStepQuantile *q);

/**
 * # Safety
 * `q` must be a live handle or NULL; `out` must be writable or NULL.
 */
enum GininStatus ginin_step_quantile_gd(const struct GininStepQuantile *q, uint32_t n, double *out);

/**
 * # Safety
 * `q` must be a live handle or NULL; `out` must be writable or NULL.
 */
enum GininStatus ginin_step_quantile_gc(const struct GininStepQuantile *q, uint32_t n, double *out);

/**
 * Point estimate of GD_n or GC_n from a sample of `len` values.
 *
 * # Safety
 * `values` must hold `len` doubles; `out` must be writable or NULL.
 */
enum GininStatus ginin_sample_estimate(const double *values,
                                       size_t len,
                                       uint32_t n,
                                       enum GininTarget t,
                                       enum GininScheme scheme,
                                       double *out);

/**
 * Sharp bounds on GD_n / GD_m for 2 <= m <= n.
 *
 * # Safety
 * `lower` and `upper` must be writable or NULL.
 */
enum GininStatus ginin_gd_ratio_bounds(uint32_t m, uint32_t n, double *lower, double *upper);

/**
 * Upper bound on GD_n / SD over all distributions with finite variance.
 *
 * # Safety
 * `out` must be writable or NULL.
 */
enum GininStatus ginin_sd_ratio_upper_bound(uint32_t n, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GININ_H */
