#ifndef SUBSETSPACE_H
#define SUBSETSPACE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

/**
 * Result codes.
 */
typedef enum SsStatus {
  SS_STATUS_OK = 0,
  SS_STATUS_NULL_POINTER = 1,
  SS_STATUS_INVALID_ARGUMENT = 2,
  SS_STATUS_DIMENSION_MISMATCH = 3,
  SS_STATUS_DOMAIN = 4,
  SS_STATUS_CAPACITY = 5,
  SS_STATUS_PRECONDITION = 6,
  SS_STATUS_NON_CONVERGENCE = 7,
  SS_STATUS_PARSE = 8,
  SS_STATUS_PANIC = 9,
} SsStatus;

/**
 * A finite set of points with its ambient cardinality bound and norm.
 */
typedef struct SsFSet SsFSet;

/**
 * A piecewise-linear path of finite sets.
 */
typedef struct SsPath SsPath;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next call into the library on this thread.
 */
const char *ss_last_error_message(void);

/**
 * Builds a set from `count` points stored row-major in `coords`
 * (`count * dim` doubles). `p` may be `INFINITY`. Duplicates are merged.
 *
 * # Safety
 * `coords` must point to `count * dim` readable doubles; `out` must be writable.
 */
enum SsStatus ss_fset_new(const double *coords,
                          size_t count,
                          size_t dim,
                          size_t n,
                          double p,
                          struct SsFSet **out);

/**
 * # Safety
 * `x` must be null or a handle from this library not yet freed.
 */
void ss_fset_free(struct SsFSet *x);

/**
 * Number of distinct points; 0 for a null handle.
 *
 * # Safety
 * `x` must be null or a live handle.
 */
size_t ss_fset_len(const struct SsFSet *x);

/**
 * # Safety
 * `x` must be null or a live handle.
 */
size_t ss_fset_dim(const struct SsFSet *x);

/**
 * The cardinality bound `n` of the space `X(n)` the set lives in.
 *
 * # Safety
 * `x` must be null or a live handle.
 */
size_t ss_fset_ambient_n(const struct SsFSet *x);

/**
 * Copies the points row-major into `buf`, which must hold `len * dim` doubles.
 *
 * # Safety
 * `buf` must point to `buf_len` writable doubles.
 */
enum SsStatus ss_fset_points(const struct SsFSet *x, double *buf, size_t buf_len);

/**
 * Parses `{"n": .., "p": .., "points": [[..], ..]}`.
 *
 * # Safety
 * `json` must be a nul-terminated string; `out` must be writable.
 */
enum SsStatus ss_fset_from_json(const char *json, struct SsFSet **out);

/**
 * # Safety
 * `x` must be a live handle; `out` must be writable. Free the result with `ss_string_free`.
 */
enum SsStatus ss_fset_to_json(const struct SsFSet *x, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library not yet freed.
 */
void ss_string_free(char *s);

/**
 * # Safety
 * `x`, `y` must be live handles; `out` must be writable.
 */
enum SsStatus ss_hausdorff(const struct SsFSet *x, const struct SsFSet *y, double *out);

/**
 * # Safety
 * `x` must be a live handle; `out` must be writable.
 */
enum SsStatus ss_diam(const struct SsFSet *x, double *out);

/**
 * Minimum pairwise distance; 0 when the set has fewer than `n` points.
 *
 * # Safety
 * `x` must be a live handle; `out` must be writable.
 */
enum SsStatus ss_min_sep(const struct SsFSet *x, double *out);

/**
 * Hausdorff distance from the set to the subspace of sets with at most two points.
 *
 * # Safety
 * `x` must be a live handle; `out` must be writable.
 */
enum SsStatus ss_dist_to_x2(const struct SsFSet *x, double *out);

/**
 * Averaging retraction of `X(2)` onto singletons.
 *
 * # Safety
 * `x` must be a live handle; `out` must be writable.
 */
enum SsStatus ss_r2(const struct SsFSet *x, struct SsFSet **out);

/**
 * Lipschitz retraction `X(3) -> X(2)`.
 *
 * # Safety
 * `x` must be a live handle; `out` must be writable.
 */
enum SsStatus ss_r3(const struct SsFSet *x, struct SsFSet **out);

/**
 * Lipschitz retraction `X(n) -> X(2)` with thinness parameter `tau > 6`.
 *
 * # Safety
 * `x` must be a live handle; `out` must be writable.
 */
enum SsStatus ss_rn2(const struct SsFSet *x,
                     double tau,
                     size_t sphere_samples,
                     struct SsFSet **out);

/**
 * Steiner-point selector as a map into singletons.
 *
 * # Safety
 * `x` must be a live handle; `out` must be writable.
 */
enum SsStatus ss_selector(const struct SsFSet *x, size_t sphere_samples, struct SsFSet **out);

/**
 * Collision-flow retraction `X(n) -> X(n-1)`.
 *
 * # Safety
 * `x` must be a live handle; `out` must be writable.
 */
enum SsStatus ss_holder(const struct SsFSet *x, double eps_coll, struct SsFSet **out);

/**
 * Two-leg path through a midpoint set, with modulus `2 d_H(x, y)`.
 *
 * # Safety
 * `x`, `y` must be live handles; `out` must be writable.
 */
enum SsStatus ss_quasigeodesic(const struct SsFSet *x, const struct SsFSet *y, struct SsPath **out);

/**
 * Geodesic in the larger space `X(max(|x|, |y|, |x| + |y| - 2))`.
 *
 * # Safety
 * `x`, `y` must be live handles; `out` must be writable.
 */
enum SsStatus ss_geodesic(const struct SsFSet *x, const struct SsFSet *y, struct SsPath **out);

/**
 * # Safety
 * `p` must be a live path handle; `out` must be writable.
 */
enum SsStatus ss_path_eval(const struct SsPath *p, double t, struct SsFSet **out);

/**
 * Sum of Hausdorff steps over a uniform grid of `intervals` pieces.
 *
 * # Safety
 * `p` must be a live path handle; `out` must be writable.
 */
enum SsStatus ss_path_length(const struct SsPath *p, size_t intervals, double *out);

/**
 * # Safety
 * `p` must be a live path handle; `out` must be writable. Free the result with `ss_string_free`.
 */
enum SsStatus ss_path_to_json(const struct SsPath *p, char **out);

/**
 * # Safety
 * `p` must be null or a path handle not yet freed.
 */
void ss_path_free(struct SsPath *p);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SUBSETSPACE_H */
