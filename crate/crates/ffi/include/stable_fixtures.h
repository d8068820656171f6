#ifndef STABLE_FIXTURES_H
#define STABLE_FIXTURES_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * ILP objectives.
 */
typedef enum SfxObjective {
  SFX_OBJECTIVE_REDUCED = 0,
  SFX_OBJECTIVE_RANK1 = 1,
  SFX_OBJECTIVE_EGAL = 2,
} SfxObjective;

/**
 * Result codes.
 */
typedef enum SfxStatus {
  SFX_STATUS_OK = 0,
  SFX_STATUS_NULL_POINTER = 1,
  SFX_STATUS_INVALID_UTF8 = 2,
  SFX_STATUS_PARSE = 3,
  SFX_STATUS_INVALID_INSTANCE = 4,
  SFX_STATUS_UNSOLVABLE = 5,
  SFX_STATUS_SEARCH_LIMIT = 6,
  SFX_STATUS_BUFFER_TOO_SMALL = 7,
  SFX_STATUS_INTERNAL = 8,
} SfxStatus;

/**
 * Opaque instance handle.
 */
typedef struct SfxInstance SfxInstance;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Valid until the
 * next failing call on the same thread.
 */
const char *sfx_last_error(void);

/**
 * Parses an instance in the text format.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum SfxStatus sfx_instance_parse(const char *text, struct SfxInstance **out);

/**
 * Random complete instance with uniform capacity `cap`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum SfxStatus sfx_instance_random(size_t n, uint32_t cap, uint64_t seed, struct SfxInstance **out);

/**
 * # Safety
 * `inst` must come from this library or be NULL; it must not be used afterwards.
 */
void sfx_instance_free(struct SfxInstance *inst);

/**
 * Number of agents, or 0 for NULL.
 *
 * # Safety
 * `inst` must be a live handle or NULL.
 */
size_t sfx_instance_agents(const struct SfxInstance *inst);

/**
 * Writes the capacities into `caps[0..len]`.
 *
 * # Safety
 * `inst` must be a live handle and `caps` must hold `len` values.
 */
enum SfxStatus sfx_instance_caps(const struct SfxInstance *inst, uint32_t *caps, size_t len);

/**
 * The instance in the text format.
 *
 * # Safety
 * `inst` must be a live handle and `out` a valid pointer.
 */
enum SfxStatus sfx_instance_to_text(const struct SfxInstance *inst, char **out);

/**
 * A generalised stable partition as cycle text, optionally reduced.
 *
 * # Safety
 * `inst` must be a live handle and `out` a valid pointer.
 */
enum SfxStatus sfx_gsp(const struct SfxInstance *inst, bool reduced, char **out);

/**
 * Decides solvability. On `SFX_STATUS_OK`, `out` holds a stable matching;
 * on `SFX_STATUS_UNSOLVABLE`, it holds the odd cycles.
 *
 * # Safety
 * `inst` must be a live handle and `out` a valid pointer.
 */
enum SfxStatus sfx_solve(const struct SfxInstance *inst, char **out);

/**
 * Repairs capacities so a stable matching exists. Writes the new
 * capacities to `caps[0..len]` and the matching text to `out`.
 *
 * # Safety
 * `inst` must be a live handle, `caps` must hold `len` values, and `out`
 * must be a valid pointer.
 */
enum SfxStatus sfx_near_feasible(const struct SfxInstance *inst,
                                 uint32_t *caps,
                                 size_t len,
                                 char **out);

/**
 * Optimal ILP objective as an exact fraction `num / den`, with a node limit
 * (0 for the default).
 *
 * # Safety
 * `inst` must be a live handle; `num` and `den` must be valid pointers.
 */
enum SfxStatus sfx_ilp_optimum(const struct SfxInstance *inst,
                               enum SfxObjective objective,
                               uint64_t node_limit,
                               int64_t *num,
                               int64_t *den);

/**
 * # Safety
 * `s` must come from this library or be NULL; it must not be used afterwards.
 */
void sfx_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STABLE_FIXTURES_H */
