#ifndef POLYENT_H
#define POLYENT_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of a call.
 */
typedef enum PolyentStatus {
  POLYENT_STATUS_OK = 0,
  POLYENT_STATUS_NULL_POINTER = 1,
  POLYENT_STATUS_INVALID_ARGUMENT = 2,
  POLYENT_STATUS_PARSE = 3,
  POLYENT_STATUS_DIMENSION = 4,
  POLYENT_STATUS_INVALID_STATE = 5,
  POLYENT_STATUS_RANK = 6,
  POLYENT_STATUS_RANGE = 7,
  POLYENT_STATUS_STRUCTURE = 8,
  POLYENT_STATUS_DEGENERATE = 9,
  POLYENT_STATUS_IO = 10,
  POLYENT_STATUS_PANIC = 11,
} PolyentStatus;

/**
 * A polynomial entanglement measure.
 */
typedef struct PolyentMeasure PolyentMeasure;

/**
 * A computed convex roof.
 */
typedef struct PolyentRoof PolyentRoof;

/**
 * A pure state or a density matrix.
 */
typedef struct PolyentState PolyentState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failing call on this thread, or an empty string.
 * The pointer stays valid until the next failing call on this thread.
 */
const char *polyent_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *polyent_version(void);

/**
 * Looks up a measure by name: `concurrence`, `tangle` or `sqrt-tangle`.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a valid pointer.
 */
enum PolyentStatus polyent_measure_new(const char *name, struct PolyentMeasure **out_measure);

/**
 * # Safety
 * `measure` must come from [`polyent_measure_new`] or be NULL.
 */
void polyent_measure_free(struct PolyentMeasure *measure);

/**
 * Number of qubits the measure acts on, or 0 for NULL.
 *
 * # Safety
 * `measure` must be valid or NULL.
 */
uint32_t polyent_measure_qubits(const struct PolyentMeasure *measure);

/**
 * Reads a state from its JSON text.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out_state` a valid pointer.
 */
enum PolyentStatus polyent_state_from_json(const char *json, struct PolyentState **out_state);

/**
 * Builds a pure state from `2^n_qubits` amplitudes. `im` may be NULL for
 * real amplitudes. The vector is normalized.
 *
 * # Safety
 * `re` (and `im` unless NULL) must point to `2^n_qubits` doubles.
 */
enum PolyentStatus polyent_state_pure(uint32_t n_qubits,
                                      const double *re,
                                      const double *im,
                                      struct PolyentState **out_state);

/**
 * Builds a density matrix from `4^n_qubits` entries in row-major order.
 * `im` may be NULL for a real matrix.
 *
 * # Safety
 * `re` (and `im` unless NULL) must point to `4^n_qubits` doubles.
 */
enum PolyentStatus polyent_state_density(uint32_t n_qubits,
                                         const double *re,
                                         const double *im,
                                         struct PolyentState **out_state);

/**
 * # Safety
 * `state` must come from a `polyent_state_*` constructor or be NULL.
 */
void polyent_state_free(struct PolyentState *state);

/**
 * Number of qubits, or 0 for NULL.
 *
 * # Safety
 * `state` must be valid or NULL.
 */
uint32_t polyent_state_qubits(const struct PolyentState *state);

/**
 * Measure of a pure state (or rank-1 density matrix).
 *
 * # Safety
 * Pointers must be valid.
 */
enum PolyentStatus polyent_entangle(const struct PolyentMeasure *measure,
                                    const struct PolyentState *state,
                                    double *out_value);

/**
 * Convex roof of a rank-1 or rank-2 state with automatic method choice.
 *
 * # Safety
 * Pointers must be valid.
 */
enum PolyentStatus polyent_roof(const struct PolyentMeasure *measure,
                                const struct PolyentState *state,
                                struct PolyentRoof **out_roof);

/**
 * # Safety
 * `roof` must come from [`polyent_roof`] or be NULL.
 */
void polyent_roof_free(struct PolyentRoof *roof);

/**
 * Roof value, or NaN for NULL.
 *
 * # Safety
 * `roof` must be valid or NULL.
 */
double polyent_roof_value(const struct PolyentRoof *roof);

/**
 * Whether the value is exact rather than an upper bound.
 *
 * # Safety
 * `roof` must be valid or NULL.
 */
bool polyent_roof_is_exact(const struct PolyentRoof *roof);

/**
 * Name of the method used. Owned by `roof`.
 *
 * # Safety
 * `roof` must be valid or NULL.
 */
const char *polyent_roof_method(const struct PolyentRoof *roof);

/**
 * Members in the optimal decomposition (0 when none was produced).
 *
 * # Safety
 * `roof` must be valid or NULL.
 */
size_t polyent_roof_witness_len(const struct PolyentRoof *roof);

/**
 * Copies witness member `index`: its weight and `dim` amplitudes.
 *
 * # Safety
 * `out_re` and `out_im` must each hold `dim` doubles, where `dim` is
 * `2^qubits` of the state.
 */
enum PolyentStatus polyent_roof_witness_member(const struct PolyentRoof *roof,
                                               size_t index,
                                               double *out_weight,
                                               double *out_re,
                                               double *out_im,
                                               size_t dim);

/**
 * Brute-force upper bound on the roof.
 *
 * # Safety
 * Pointers must be valid.
 */
enum PolyentStatus polyent_oracle(const struct PolyentMeasure *measure,
                                  const struct PolyentState *state,
                                  size_t ensemble_size,
                                  size_t restarts,
                                  uint64_t seed,
                                  double *out_value);

/**
 * Two-qubit concurrence from Wootters' formula.
 *
 * # Safety
 * Pointers must be valid.
 */
enum PolyentStatus polyent_wootters(const struct PolyentState *state, double *out_value);

/**
 * Three-tangle of `p|GHZ><GHZ| + (1-p)|W><W|`.
 *
 * # Safety
 * `out_value` must be valid.
 */
enum PolyentStatus polyent_ghzw_tangle(double p, double *out_value);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POLYENT_H */
