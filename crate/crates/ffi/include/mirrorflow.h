#ifndef MIRRORFLOW_H
#define MIRRORFLOW_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MfStatus {
  MF_STATUS_OK = 0,
  MF_STATUS_NULL_POINTER = 1,
  MF_STATUS_INVALID_ARGUMENT = 2,
  MF_STATUS_CONFIG = 3,
  MF_STATUS_NUMERICAL = 4,
  MF_STATUS_IO = 5,
  MF_STATUS_BUFFER_TOO_SMALL = 6,
  MF_STATUS_PANIC = 7,
} MfStatus;

typedef enum MfRegularizer {
  MF_REGULARIZER_EUCLIDEAN = 0,
  MF_REGULARIZER_ENTROPIC = 1,
  MF_REGULARIZER_VON_NEUMANN = 2,
} MfRegularizer;

/**
 * Scalar series logged along a trajectory.
 */
typedef enum MfSeries {
  MF_SERIES_TIME = 0,
  MF_SERIES_VALUE = 1,
  MF_SERIES_VALUE_AVERAGE = 2,
  MF_SERIES_VALUE_BEST = 3,
  MF_SERIES_FENCHEL = 4,
  MF_SERIES_ETA = 5,
} MfSeries;

typedef struct MfExperiment MfExperiment;

typedef struct MfRegion MfRegion;

typedef struct MfTrajectory MfTrajectory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failing call on this thread, or null. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *mf_last_error_message(void);

/**
 * Box `[lower, upper]` in `dim` dimensions.
 *
 * # Safety
 * `lower` and `upper` must point to `dim` doubles; `out` must be writable.
 */
enum MfStatus mf_region_box(const double *lower,
                            const double *upper,
                            size_t dim,
                            struct MfRegion **out);

/**
 * Simplex `{x ≥ 0, Σx = mass}` in `dim` dimensions.
 *
 * # Safety
 * `out` must be writable.
 */
enum MfStatus mf_region_simplex(double mass, size_t dim, struct MfRegion **out);

/**
 * Dimension of the region, 0 for a null handle.
 *
 * # Safety
 * `region` must be null or a live handle.
 */
size_t mf_region_dim(const struct MfRegion *region);

/**
 * Euclidean projection of `y` onto the region.
 *
 * # Safety
 * `y` and `out` must point to `len` doubles, `len` equal to the region dimension.
 */
enum MfStatus mf_region_project(const struct MfRegion *region,
                                const double *y,
                                size_t len,
                                double *out);

/**
 * Mirror map `Q(y)` of the regularizer on the region.
 *
 * # Safety
 * `y` and `out` must point to `len` doubles, `len` equal to the region dimension.
 */
enum MfStatus mf_mirror_map(const struct MfRegion *region,
                            enum MfRegularizer reg,
                            const double *y,
                            size_t len,
                            double *out);

/**
 * Fenchel coupling `F(p, y) = h(p) + h*(y) − ⟨y, p⟩`.
 *
 * # Safety
 * `p` and `y` must point to `len` doubles; `out` must be writable.
 */
enum MfStatus mf_fenchel_coupling(const struct MfRegion *region,
                                  enum MfRegularizer reg,
                                  const double *p,
                                  const double *y,
                                  size_t len,
                                  double *out);

/**
 * Releases a region; null is ignored.
 *
 * # Safety
 * `region` must be null or a handle not yet freed.
 */
void mf_region_free(struct MfRegion *region);

/**
 * Parses experiment config text and builds its components. Relative paths
 * in the text resolve against `base_dir` (null means the working directory).
 *
 * # Safety
 * `text` must be a NUL-terminated string, `base_dir` null or NUL-terminated,
 * `out` writable.
 */
enum MfStatus mf_experiment_from_config(const char *text,
                                        const char *base_dir,
                                        struct MfExperiment **out);

/**
 * State dimension of the experiment.
 *
 * # Safety
 * `exp` must be null or a live handle.
 */
size_t mf_experiment_dim(const struct MfExperiment *exp);

/**
 * Replaces the ensemble seed.
 *
 * # Safety
 * `exp` must be a live handle.
 */
enum MfStatus mf_experiment_set_seed(struct MfExperiment *exp, uint64_t seed);

/**
 * Reference minimizer `x*` (written to `out`, `len` doubles) and value `f*`.
 *
 * # Safety
 * `out` must point to `len` doubles and `f_star` be writable.
 */
enum MfStatus mf_experiment_minimum(const struct MfExperiment *exp,
                                    double *out,
                                    size_t len,
                                    double *f_star);

/**
 * Integrates one sample path (noise stream `path`) of the experiment.
 *
 * # Safety
 * `exp` must be a live handle and `out` writable.
 */
enum MfStatus mf_experiment_run_path(const struct MfExperiment *exp,
                                     uint64_t path,
                                     struct MfTrajectory **out);

/**
 * Runs the whole ensemble and writes the usual files into `out_dir`.
 *
 * # Safety
 * `exp` must be a live handle and `out_dir` NUL-terminated.
 */
enum MfStatus mf_experiment_run_to_dir(const struct MfExperiment *exp, const char *out_dir);

/**
 * Releases an experiment; null is ignored.
 *
 * # Safety
 * `exp` must be null or a handle not yet freed.
 */
void mf_experiment_free(struct MfExperiment *exp);

/**
 * Number of logged samples, 0 for null.
 *
 * # Safety
 * `traj` must be null or a live handle.
 */
size_t mf_trajectory_len(const struct MfTrajectory *traj);

/**
 * Copies one scalar series into `out`, which must hold `mf_trajectory_len` doubles.
 *
 * # Safety
 * `out` must point to `cap` writable doubles.
 */
enum MfStatus mf_trajectory_series(const struct MfTrajectory *traj,
                                   enum MfSeries which,
                                   double *out,
                                   size_t cap);

/**
 * Copies the primal point of logged sample `k` into `out` (`cap` ≥ dimension).
 *
 * # Safety
 * `out` must point to `cap` writable doubles.
 */
enum MfStatus mf_trajectory_primal(const struct MfTrajectory *traj,
                                   size_t k,
                                   double *out,
                                   size_t cap);

/**
 * Releases a trajectory; null is ignored.
 *
 * # Safety
 * `traj` must be null or a handle not yet freed.
 */
void mf_trajectory_free(struct MfTrajectory *traj);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MIRRORFLOW_H */
