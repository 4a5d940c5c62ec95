#ifndef OODSEL_H
#define OODSEL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Divergence used for variation and informativeness.
 */
typedef enum OodselDivergence {
  OODSEL_DIVERGENCE_TOTAL_VARIATION = 0,
  OODSEL_DIVERGENCE_SYMMETRIC_KL = 1,
  OODSEL_DIVERGENCE_L2 = 2,
} OodselDivergence;

/**
 * Result codes.
 */
typedef enum OodselStatus {
  OODSEL_STATUS_OK = 0,
  OODSEL_STATUS_NULL_POINTER = 1,
  OODSEL_STATUS_INVALID_ARGUMENT = 2,
  OODSEL_STATUS_IO = 3,
  OODSEL_STATUS_FORMAT = 4,
  OODSEL_STATUS_EMPTY_CELL = 5,
  OODSEL_STATUS_PANIC = 6,
} OodselStatus;

/**
 * Opaque dataset handle.
 */
typedef struct OodselDataset OodselDataset;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer is
 * valid until the next `oodsel_*` call on the same thread.
 */
const char *oodsel_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *oodsel_version(void);

/**
 * Loads an OODF (or `.csv`) feature file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum OodselStatus oodsel_dataset_load(const char *path, struct OodselDataset **out);

/**
 * Builds a dataset from row-major `n × d` features, 1-based labels and domain ids.
 *
 * # Safety
 * `features` must hold `n·d` floats, `labels` and `domains` `n` values each;
 * `out` must be writable.
 */
enum OodselStatus oodsel_dataset_from_arrays(size_t n,
                                             size_t d,
                                             uint32_t k,
                                             const float *features,
                                             const uint16_t *labels,
                                             const uint16_t *domains,
                                             struct OodselDataset **out);

/**
 * Releases a handle. NULL is ignored.
 *
 * # Safety
 * `ds` must come from this library and not be used afterwards.
 */
void oodsel_dataset_free(struct OodselDataset *ds);

/**
 * Sample count, feature dimension and class count.
 *
 * # Safety
 * `ds` must be a live handle; each output pointer may be NULL to skip it.
 */
enum OodselStatus oodsel_dataset_dims(const struct OodselDataset *ds,
                                      size_t *n,
                                      size_t *d,
                                      uint32_t *k);

/**
 * Number of distinct domain ids; when `ids` is non-NULL, up to `capacity`
 * sorted ids are copied into it.
 *
 * # Safety
 * `ds` must be a live handle; `ids` must hold `capacity` values when non-NULL.
 */
enum OodselStatus oodsel_dataset_domains(const struct OodselDataset *ds,
                                         uint16_t *ids,
                                         size_t capacity,
                                         size_t *count);

/**
 * Variation of coordinate `feature` over the listed domains.
 *
 * # Safety
 * `ds` must be a live handle; `domains` must hold `n_domains` ids; `out` must be writable.
 */
enum OodselStatus oodsel_feature_variation(const struct OodselDataset *ds,
                                           size_t feature,
                                           const uint16_t *domains,
                                           size_t n_domains,
                                           enum OodselDivergence divergence,
                                           double *out);

/**
 * Informativeness of coordinate `feature` over the listed domains.
 *
 * # Safety
 * As for `oodsel_feature_variation`.
 */
enum OodselStatus oodsel_feature_informativeness(const struct OodselDataset *ds,
                                                 size_t feature,
                                                 const uint16_t *domains,
                                                 size_t n_domains,
                                                 enum OodselDivergence divergence,
                                                 double *out);

/**
 * Mean per-coordinate variation over the listed domains.
 *
 * # Safety
 * As for `oodsel_feature_variation`.
 */
enum OodselStatus oodsel_model_variation(const struct OodselDataset *ds,
                                         const uint16_t *domains,
                                         size_t n_domains,
                                         enum OodselDivergence divergence,
                                         double *out);

/**
 * Ranks `n` models by `accuracy − r0·variation`.
 *
 * A negative `r0` selects the automatic estimate over the accuracy window.
 * `order` receives input indices best first; `scores` (optional) receives
 * each model's score at its input index; `r0_used` (optional) the factor applied.
 *
 * # Safety
 * `ids` must hold `n` NUL-terminated strings; `accuracies`, `variations`,
 * `order` and (when non-NULL) `scores` must hold `n` values.
 */
enum OodselStatus oodsel_select(const char *const *ids,
                                const double *accuracies,
                                const double *variations,
                                size_t n,
                                double r0,
                                double acc_window,
                                size_t *order,
                                double *scores,
                                double *r0_used);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OODSEL_H */
