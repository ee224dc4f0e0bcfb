#ifndef HIPROB_H
#define HIPROB_H

/* Generated by cbindgen from hiprob-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible call.
 */
typedef enum HiprobStatus {
  HiprobStatus_Ok = 0,
  /**
   * A required pointer argument was null.
   */
  HiprobStatus_NullArgument = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  HiprobStatus_InvalidUtf8 = 2,
  /**
   * The model text is not a well-formed model file.
   */
  HiprobStatus_ParseError = 3,
  /**
   * The model parsed but violates an invariant.
   */
  HiprobStatus_ValidationError = 4,
  /**
   * The operation's precondition does not hold for this model.
   */
  HiprobStatus_PreconditionError = 5,
  /**
   * An output buffer is smaller than the result.
   */
  HiprobStatus_BufferTooSmall = 6,
  /**
   * An internal invariant failed; report this as a bug.
   */
  HiprobStatus_InternalError = 7,
} HiprobStatus;

/**
 * Which expected-utility route `hiprob_model_decide` evaluates.
 */
typedef enum HiprobDecideMode {
  /**
   * The predictive distribution (first-order route).
   */
  HiprobDecideMode_First = 0,
  /**
   * Candidate-wise evaluation under the second-order weights.
   */
  HiprobDecideMode_Second = 1,
  /**
   * Cell-wise evaluation over the flattened joint.
   */
  HiprobDecideMode_Joint = 2,
} HiprobDecideMode;

/**
 * Opaque handle over a resolved model. Create with
 * [`hiprob_model_parse`], release with [`hiprob_model_free`].
 */
typedef struct HiprobModel HiprobModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *hiprob_version(void);

/**
 * Message for the most recent failure on this thread, or null if the last
 * call succeeded. The pointer stays valid until the next failing call on
 * the same thread.
 */
const char *hiprob_last_error_message(void);

/**
 * Parse model-file text (TOML) into a new model handle.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out_model` must be valid for
 * one pointer write. On success the caller owns the handle and must
 * release it with [`hiprob_model_free`].
 */
enum HiprobStatus hiprob_model_parse(const char *text, struct HiprobModel **out_model);

/**
 * Release a handle returned by [`hiprob_model_parse`]. Null is a no-op.
 *
 * # Safety
 * `model` must be null or an unfreed handle from `hiprob_model_parse`.
 */
void hiprob_model_free(struct HiprobModel *model);

/**
 * Number of worlds in the outcome space.
 *
 * # Safety
 * See [`hiprob_model_parse`] for `model`; `out_count` must be writable.
 */
enum HiprobStatus hiprob_model_world_count(const struct HiprobModel *model, size_t *out_count);

/**
 * Number of candidate distributions.
 *
 * # Safety
 * See [`hiprob_model_world_count`].
 */
enum HiprobStatus hiprob_model_candidate_count(const struct HiprobModel *model, size_t *out_count);

/**
 * Number of acts in the utilities section; 0 when the model has none.
 *
 * # Safety
 * See [`hiprob_model_world_count`].
 */
enum HiprobStatus hiprob_model_act_count(const struct HiprobModel *model, size_t *out_count);

/**
 * Predictive distribution over worlds (`world_count` values).
 *
 * # Safety
 * See [`hiprob_model_world_count`]; `out_weights` must be valid for
 * `capacity` writes.
 */
enum HiprobStatus hiprob_model_predictive(const struct HiprobModel *model,
                                          double *out_weights,
                                          size_t capacity);

/**
 * Flattened joint grid, row-major with one row per candidate
 * (`candidate_count * world_count` values).
 *
 * # Safety
 * See [`hiprob_model_predictive`].
 */
enum HiprobStatus hiprob_model_flatten(const struct HiprobModel *model,
                                       double *out_cells,
                                       size_t capacity);

/**
 * Coherence gap between the model's `claimed` distribution and the
 * predictive, plus the worst world's index. Fails with
 * `PreconditionError` when the model carries no claimed distribution.
 *
 * # Safety
 * See [`hiprob_model_world_count`]; both out-pointers must be writable.
 */
enum HiprobStatus hiprob_model_coherence_gap(const struct HiprobModel *model,
                                             double *out_gap,
                                             size_t *out_worst_world);

/**
 * Jeffrey-update the predictive distribution: shift the named event to
 * `new_probability` and write the updated distribution (`world_count`
 * values).
 *
 * # Safety
 * See [`hiprob_model_predictive`]; `event_name` must be NUL-terminated.
 */
enum HiprobStatus hiprob_model_jeffrey_update(const struct HiprobModel *model,
                                              const char *event_name,
                                              double new_probability,
                                              double *out_weights,
                                              size_t capacity);

/**
 * C3 deviation |Pr(b | a ∧ P(a)=x) − Pr(b | a)| on the flattened joint.
 *
 * # Safety
 * See [`hiprob_model_jeffrey_update`].
 */
enum HiprobStatus hiprob_model_c3_deviation(const struct HiprobModel *model,
                                            const char *event_a,
                                            const char *event_b,
                                            double x,
                                            double *out_deviation);

/**
 * Posterior over the candidates after observing outcome indices
 * (`candidate_count` values). A null `observations` pointer is accepted
 * when `observation_count` is 0.
 *
 * # Safety
 * `observations` must be valid for `observation_count` reads (or null
 * when the count is 0); see [`hiprob_model_predictive`] for the rest.
 */
enum HiprobStatus hiprob_model_posterior(const struct HiprobModel *model,
                                         const size_t *observations,
                                         size_t observation_count,
                                         double *out_weights,
                                         size_t capacity);

/**
 * Predictive distribution for the next trial after the observations
 * (`world_count` values).
 *
 * # Safety
 * See [`hiprob_model_posterior`].
 */
enum HiprobStatus hiprob_model_predictive_next(const struct HiprobModel *model,
                                               const size_t *observations,
                                               size_t observation_count,
                                               double *out_weights,
                                               size_t capacity);

/**
 * Expected utility per act under the chosen route (`act_count` values)
 * plus the chosen act's index (lowest index on ties). Fails with
 * `ValidationError` when the model has no utilities section.
 *
 * # Safety
 * See [`hiprob_model_predictive`]; `out_chosen` must be writable.
 */
enum HiprobStatus hiprob_model_decide(const struct HiprobModel *model,
                                      enum HiprobDecideMode mode,
                                      double *out_values,
                                      size_t capacity,
                                      size_t *out_chosen);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HIPROB_H */
