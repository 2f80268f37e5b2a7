#ifndef LOJ_H
#define LOJ_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. The first four match the command line exit codes.
 */
typedef enum LojStatus {
  LOJ_STATUS_OK = 0,
  /**
   * Malformed polynomial, weights or variable list.
   */
  LOJ_STATUS_PARSE = 1,
  /**
   * A budget was hit or the question does not apply to the input.
   */
  LOJ_STATUS_INCONCLUSIVE = 2,
  /**
   * An internal consistency check failed.
   */
  LOJ_STATUS_INVARIANT = 3,
  LOJ_STATUS_NULL_ARGUMENT = 4,
  LOJ_STATUS_INVALID_UTF8 = 5,
  LOJ_STATUS_PANIC = 6,
} LojStatus;

/**
 * Opaque polynomial handle.
 */
typedef struct LojPoly LojPoly;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses `text` over the comma-separated variable names `vars`.
 *
 * # Safety
 * `text` and `vars` must be NUL-terminated strings; `out` must be writable.
 */
enum LojStatus loj_poly_parse(const char *text, const char *vars, struct LojPoly **out);

/**
 * Releases a handle from `loj_poly_parse`. Null is ignored.
 *
 * # Safety
 * `p` must come from `loj_poly_parse` and not have been freed.
 */
void loj_poly_free(struct LojPoly *p);

/**
 * Number of variables of the polynomial, 0 for a null handle.
 *
 * # Safety
 * `p` must be null or a live handle.
 */
size_t loj_poly_nvars(const struct LojPoly *p);

/**
 * Canonical text of the polynomial.
 *
 * # Safety
 * `p` must be a live handle; `out` must be writable.
 */
enum LojStatus loj_poly_to_string(const struct LojPoly *p, char **out);

/**
 * Full analysis report as JSON. `weights` may be null (types are then
 * discovered) or `d;l1,...` / `l1,...`. Timings are omitted so equal inputs
 * give byte-identical reports.
 *
 * # Safety
 * `p` must be a live handle, `weights` null or a NUL-terminated string,
 * `out` writable.
 */
enum LojStatus loj_analyze_json(const struct LojPoly *p,
                                const char *weights,
                                uint64_t seed,
                                char **out);

/**
 * Milnor number at the origin. `*finite` is set to false (and `*mu` to 0)
 * for a non-isolated critical point.
 *
 * # Safety
 * `p` must be a live handle; `mu` and `finite` must be writable.
 */
enum LojStatus loj_milnor(const struct LojPoly *p,
                          uint32_t degree_bound,
                          uint64_t *mu,
                          bool *finite);

/**
 * Exponent of a weakly semiquasihomogeneous type as `p/q` text.
 *
 * # Safety
 * `weights` must be a NUL-terminated string; `out` must be writable.
 */
enum LojStatus loj_exponent_wsqh(const char *weights, char **out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void loj_string_free(char *s);

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next call into the library on the same thread; do not free.
 */
const char *loj_last_error_message(void);

/**
 * Library version, a static string.
 */
const char *loj_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LOJ_H */
