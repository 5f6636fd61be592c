#ifndef VINDEF_H
#define VINDEF_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum VindefOutcome {
  VINDEF_OUTCOME_FIXPOINT = 0,
  VINDEF_OUTCOME_CONTRADICTION = 1,
} VindefOutcome;

/**
 * Result code of every fallible call.
 */
typedef enum VindefStatus {
  VINDEF_STATUS_OK = 0,
  VINDEF_STATUS_NULL_POINTER = 1,
  VINDEF_STATUS_INVALID_UTF8 = 2,
  VINDEF_STATUS_PARSE = 3,
  VINDEF_STATUS_UNKNOWN_OBSERVABLE = 4,
  VINDEF_STATUS_PRECONDITION = 5,
  /**
   * The target lies in the star of psi and is value definite.
   */
  VINDEF_STATUS_DEGENERATE_OVERLAP = 6,
  VINDEF_STATUS_CONTRACT_VIOLATED = 7,
  VINDEF_STATUS_INTERNAL = 8,
} VindefStatus;

/**
 * Opaque certificate handle.
 */
typedef struct VindefCertificate VindefCertificate;

/**
 * Opaque diagram handle.
 */
typedef struct VindefDiagram VindefDiagram;

/**
 * One seed value: observable id and 0 or 1.
 */
typedef struct VindefSeed {
  size_t id;
  uint8_t value;
} VindefSeed;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after success.
 * Valid until the next call on the same thread.
 */
const char *vindef_last_error(void);

/**
 * # Safety
 * `s` must come from this library, or be null.
 */
void vindef_string_free(char *s);

/**
 * Parses a diagram in its JSON file format.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum VindefStatus vindef_diagram_from_json(const char *json, struct VindefDiagram **out_diagram);

/**
 * Builds a diagram from a vectors file's JSON text.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum VindefStatus vindef_diagram_build(const char *json, struct VindefDiagram **out_diagram);

/**
 * The bundled 37-vector diagram.
 *
 * # Safety
 * `out` must be writable.
 */
enum VindefStatus vindef_diagram_table1(struct VindefDiagram **out_diagram);

/**
 * The bundled 18-vector diagram in dimension 4.
 *
 * # Safety
 * `out` must be writable.
 */
enum VindefStatus vindef_diagram_cabello18(struct VindefDiagram **out_diagram);

/**
 * # Safety
 * `d` must come from this library, or be null.
 */
void vindef_diagram_free(struct VindefDiagram *d);

/**
 * # Safety
 * `d` must be a live handle or null (which yields 0).
 */
size_t vindef_diagram_observable_count(const struct VindefDiagram *d);

/**
 * # Safety
 * `d` must be a live handle or null (which yields 0).
 */
size_t vindef_diagram_context_count(const struct VindefDiagram *d);

/**
 * Resolves a label (`P_a` or `a`) or decimal id.
 *
 * # Safety
 * `d` live, `label` NUL-terminated, `out_id` writable.
 */
enum VindefStatus vindef_diagram_find_label(const struct VindefDiagram *d,
                                            const char *label,
                                            size_t *out_id);

/**
 * Serializes the diagram; free the string with [`vindef_string_free`].
 *
 * # Safety
 * `d` live, `out_json` writable.
 */
enum VindefStatus vindef_diagram_to_json(const struct VindefDiagram *d, char **out_json);

/**
 * Propagates `seeds`. On contradiction `out_observable` receives the
 * conflicting observable. `out_trace_json` may be null; otherwise it
 * receives the trace as JSON.
 *
 * # Safety
 * `d` live; `seeds` points to `n_seeds` values (may be null when 0);
 * `out_outcome` and `out_observable` writable.
 */
enum VindefStatus vindef_propagate(const struct VindefDiagram *d,
                                   const struct VindefSeed *seeds,
                                   size_t n_seeds,
                                   enum VindefOutcome *out_outcome,
                                   size_t *out_observable,
                                   char **out_trace_json);

/**
 * Counts total admissible assignments up to `cap`.
 *
 * # Safety
 * `d` live; outputs writable.
 */
enum VindefStatus vindef_search(const struct VindefDiagram *d,
                                size_t cap,
                                size_t *out_count,
                                bool *out_capped);

/**
 * Builds the diagram and certificate for real 3-vectors `psi`, `phi`.
 *
 * # Safety
 * `psi`, `phi` point to 3 doubles; outputs writable.
 */
enum VindefStatus vindef_localize(const double *psi,
                                  const double *phi,
                                  struct VindefDiagram **out_diagram,
                                  struct VindefCertificate **out_certificate);

/**
 * # Safety
 * `json` NUL-terminated; `out` writable.
 */
enum VindefStatus vindef_certificate_from_json(const char *json,
                                               struct VindefCertificate **out_certificate);

/**
 * # Safety
 * `c` live; `out_json` writable.
 */
enum VindefStatus vindef_certificate_to_json(const struct VindefCertificate *c, char **out_json);

/**
 * # Safety
 * `c` must come from this library, or be null.
 */
void vindef_certificate_free(struct VindefCertificate *c);

/**
 * Verifies `c` against `d`. `epsilon <= 0` selects the default tolerance.
 * On rejection `out_ok` is false and [`vindef_last_error`] lists the failures.
 *
 * # Safety
 * Handles live; `out_ok` writable.
 */
enum VindefStatus vindef_check(const struct VindefDiagram *d,
                               const struct VindefCertificate *c,
                               double epsilon,
                               bool *out_ok);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VINDEF_H */
