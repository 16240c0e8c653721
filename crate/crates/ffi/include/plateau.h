#ifndef PLATEAU_H
#define PLATEAU_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Classification of a flat complex.
 */
typedef enum PlateauFlatTag {
  PLATEAU_FLAT_TAG_PARALLEL_PLANES = 0,
  PLATEAU_FLAT_TAG_NETWORK_TIMES_R = 1,
  PLATEAU_FLAT_TAG_T_CONE = 2,
  PLATEAU_FLAT_TAG_DOUBLE_T = 3,
  PLATEAU_FLAT_TAG_NON_FLAT = 4,
  PLATEAU_FLAT_TAG_INDETERMINATE = 5,
} PlateauFlatTag;

/**
 * Result of every fallible call.
 */
typedef enum PlateauStatus {
  PLATEAU_STATUS_OK = 0,
  PLATEAU_STATUS_NULL_ARGUMENT = 1,
  PLATEAU_STATUS_INVALID_UTF8 = 2,
  PLATEAU_STATUS_PARSE = 3,
  PLATEAU_STATUS_STRUCTURE = 4,
  PLATEAU_STATUS_ORIENTABILITY = 5,
  PLATEAU_STATUS_EMBEDDING = 6,
  PLATEAU_STATUS_DEGENERATE_TRIANGLE = 7,
  PLATEAU_STATUS_IO = 8,
  PLATEAU_STATUS_UNKNOWN_CORPUS = 9,
  PLATEAU_STATUS_INVALID_ARGUMENT = 10,
  /**
   * A numerical stage failed (solver, extent, stationarity, ...).
   */
  PLATEAU_STATUS_NUMERICAL = 11,
  PLATEAU_STATUS_PANIC = 12,
} PlateauStatus;

/**
 * Opaque handle to a validated complex.
 */
typedef struct PlateauComplex PlateauComplex;

typedef struct PlateauCounts {
  size_t vertices;
  size_t triangles;
  size_t patches;
  size_t junction_curves;
  size_t t_points;
  size_t slots;
} PlateauCounts;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Load and validate a mesh file. On success `*out` receives a new handle.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` valid for writing.
 */
enum PlateauStatus plateau_complex_load(const char *path, struct PlateauComplex **out);

/**
 * Parse and validate a mesh document held in memory.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` valid for writing.
 */
enum PlateauStatus plateau_complex_parse(const char *json, struct PlateauComplex **out);

/**
 * Release a handle. Null is ignored.
 *
 * # Safety
 * `c` must be null or a handle from this library that has not been freed.
 */
void plateau_complex_free(struct PlateauComplex *c);

/**
 * # Safety
 * `c` must be a live handle and `out` valid for writing.
 */
enum PlateauStatus plateau_complex_counts(const struct PlateauComplex *c,
                                          struct PlateauCounts *out);

/**
 * Area of the complex inside the ball of radius `r` about `center[0..3]`.
 *
 * # Safety
 * `c` must be a live handle, `center` must point to three doubles and
 * `out` must be valid for writing.
 */
enum PlateauStatus plateau_area_in_ball(const struct PlateauComplex *c,
                                        const double *center,
                                        double r,
                                        double *out);

/**
 * Smallest eigenvalue of the second variation on compatible fields, and
 * whether it clears `-eig_rel` times the spectral norm.
 *
 * # Safety
 * `c` must be a live handle; `lambda` and `stable` must be valid for writing.
 */
enum PlateauStatus plateau_stability_lambda_min(const struct PlateauComplex *c,
                                                double eig_rel,
                                                double *lambda,
                                                bool *stable);

/**
 * Flat classification with the given flatness and angle tolerances.
 *
 * # Safety
 * `c` must be a live handle and `out` valid for writing.
 */
enum PlateauStatus plateau_classify(const struct PlateauComplex *c,
                                    double tol_flat,
                                    double tol_angle,
                                    enum PlateauFlatTag *out);

/**
 * Write a corpus mesh to `path`.
 *
 * # Safety
 * `name` and `path` must be NUL-terminated strings.
 */
enum PlateauStatus plateau_golden_write(const char *name, double resolution, const char *path);

/**
 * Message for the last failed call on this thread ("" after a success).
 * The pointer stays valid until the next call into this library on the
 * same thread.
 */
const char *plateau_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *plateau_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PLATEAU_H */
