#ifndef JACOBI_MV_H
#define JACOBI_MV_H

/* Generated by cbindgen from crates/ffi; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. Zero is success.
 */
typedef enum JmvStatus {
  JMV_STATUS_OK = 0,
  JMV_STATUS_NULL_POINTER = 1,
  JMV_STATUS_INVALID_ARGUMENT = 2,
  JMV_STATUS_INVALID_MEASURE = 3,
  JMV_STATUS_INSUFFICIENT_MOMENTS = 4,
  JMV_STATUS_NOT_A_STATE = 5,
  JMV_STATUS_INSUFFICIENT_DEPTH = 6,
  JMV_STATUS_REPRESENTATION = 7,
  JMV_STATUS_INTERNAL = 8,
  JMV_STATUS_PANIC = 9,
} JmvStatus;

/**
 * A normalized moment functional.
 */
typedef struct JmvFunctional JmvFunctional;

/**
 * Jacobi sequences `(Omega_n, alpha_{j|n})` up to some level.
 */
typedef struct JmvSequences JmvSequences;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * owned by the library and valid until the next failing call.
 */
const char *jmv_last_error_message(void);

/**
 * Releases a string returned by the library.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void jmv_string_free(char *s);

/**
 * Normalized Gaussian weight `exp(-|x|^2)` on R^d.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum JmvStatus jmv_functional_gaussian(size_t d, struct JmvFunctional **out);

/**
 * Normalized product Gamma weight; `alpha` is a comma separated list of
 * rationals, one per coordinate.
 *
 * # Safety
 * `alpha` must be a NUL-terminated string and `out` a valid pointer.
 */
enum JmvStatus jmv_functional_gamma(const char *alpha, struct JmvFunctional **out);

/**
 * Normalized product Beta weight `(1-x)^a (1+x)^b` on the cube.
 *
 * # Safety
 * `a` and `b` must be NUL-terminated strings and `out` a valid pointer.
 */
enum JmvStatus jmv_functional_beta(const char *a, const char *b, struct JmvFunctional **out);

/**
 * Atomic-measure JSON (`{"d":..,"atoms":[..]}`) or moment-table JSON
 * (`{"d":..,"max_degree":..,"moments":[..]}`).
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum JmvStatus jmv_functional_from_json(const char *json, struct JmvFunctional **out);

/**
 * # Safety
 * `f` must come from a `jmv_functional_*` constructor and not have been freed.
 */
void jmv_functional_free(struct JmvFunctional *f);

/**
 * Dimension of the functional, or 0 for a null handle.
 *
 * # Safety
 * `f` must be a valid handle or null.
 */
size_t jmv_functional_dimension(const struct JmvFunctional *f);

/**
 * The moment `phi(x^beta)` as a rational string.
 *
 * # Safety
 * `beta` must point to `len` integers; `out` must be a valid pointer.
 */
enum JmvStatus jmv_moment(const struct JmvFunctional *f,
                          const uint32_t *beta,
                          size_t len,
                          char **out);

/**
 * Computes `Omega_n` and `alpha_{j|n}` for `n <= max_level`.
 *
 * # Safety
 * `f` must be a valid handle and `out` a valid pointer.
 */
enum JmvStatus jmv_sequences_compute(const struct JmvFunctional *f,
                                     size_t max_level,
                                     struct JmvSequences **out);

/**
 * # Safety
 * `s` must come from [`jmv_sequences_compute`] and not have been freed.
 */
void jmv_sequences_free(struct JmvSequences *s);

/**
 * Highest level carrying both `Omega` and `alpha`.
 *
 * # Safety
 * `s` must be a valid handle or null (which yields 0).
 */
size_t jmv_sequences_max_level(const struct JmvSequences *s);

/**
 * Exact rank of `Omega_level`.
 *
 * # Safety
 * `s` must be a valid handle and `rank` a valid pointer.
 */
enum JmvStatus jmv_sequences_rank(const struct JmvSequences *s, size_t level, size_t *rank);

/**
 * All levels as JSON: `{"d":..,"levels":[{"n","classes","omega","rank","alpha"}]}`.
 *
 * # Safety
 * `s` must be a valid handle and `out` a valid pointer.
 */
enum JmvStatus jmv_sequences_to_json(const struct JmvSequences *s, char **out);

/**
 * Moment `phi(x^beta)` recovered from the sequences alone.
 *
 * # Safety
 * `beta` must point to `len` integers; `out` must be a valid pointer.
 */
enum JmvStatus jmv_reconstruct_moment(const struct JmvSequences *s,
                                      const uint32_t *beta,
                                      size_t len,
                                      char **out);

/**
 * Searches levels `0..=max_level` for `Omega_n = 0`. On success `found` is
 * set; when true, `n0` and `atom_bound` hold the first vanishing level and
 * the bound on the number of atoms.
 *
 * # Safety
 * `f` must be a valid handle; the out pointers must be valid.
 */
enum JmvStatus jmv_detect_atoms(const struct JmvFunctional *f,
                                size_t max_level,
                                bool *found,
                                size_t *n0,
                                uint64_t *atom_bound);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* JACOBI_MV_H */
