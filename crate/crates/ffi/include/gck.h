#ifndef GCK_H
#define GCK_H

#pragma once

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GckStatus {
  GCK_STATUS_OK = 0,
  GCK_STATUS_NULL_ARGUMENT = 1,
  GCK_STATUS_INVALID_UTF8 = 2,
  GCK_STATUS_PARSE = 3,
  GCK_STATUS_UNSUPPORTED = 4,
  GCK_STATUS_FAILED = 5,
  GCK_STATUS_PANIC = 6,
} GckStatus;

/**
 * Three-valued outcome of a check.
 */
typedef enum GckVerdict {
  GCK_VERDICT_PASS = 0,
  GCK_VERDICT_FAIL = 1,
  GCK_VERDICT_INCONCLUSIVE = 2,
} GckVerdict;

/**
 * Finite or staged graph.
 */
typedef struct GckGraph GckGraph;

/**
 * Six-term or augmented invariant.
 */
typedef struct GckInvariant GckInvariant;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next call into the library on the same thread.
 */
const char *gck_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void gck_string_free(char *s);

/**
 * Parses a graph in the `v`/`e`/`tail`/`stationary` line format.
 *
 * # Safety
 * `src` must be a nul-terminated string and `out` a valid pointer.
 */
enum GckStatus gck_graph_parse(const char *src, struct GckGraph **out);

/**
 * # Safety
 * `g` must be null or a handle from this library, freed at most once.
 */
void gck_graph_free(struct GckGraph *g);

/**
 * Number of vertices in the finite core.
 *
 * # Safety
 * `g` must be a valid handle and `out` a valid pointer.
 */
enum GckStatus gck_graph_vertex_count(const struct GckGraph *g, size_t *out);

/**
 * Text form of the graph.
 *
 * # Safety
 * `g` must be a valid handle and `out` a valid pointer.
 */
enum GckStatus gck_graph_to_text(const struct GckGraph *g, char **out);

/**
 * K₀ and K₁ as canonical group descriptions such as `Z/2 + Z`. For a
 * staged graph whose connecting maps are not isomorphisms, both strings
 * describe the colimit system.
 *
 * # Safety
 * `g` must be a valid handle; `k0` and `k1` valid pointers.
 */
enum GckStatus gck_graph_k_groups(const struct GckGraph *g, char **k0, char **k1);

/**
 * Augmented invariant of a graph relative to an ideal given as
 * whitespace- or comma-separated vertex names.
 *
 * # Safety
 * `g` must be a valid handle, `ideal` a nul-terminated string and `out` a
 * valid pointer.
 */
enum GckStatus gck_invariant_from_graph(const struct GckGraph *g,
                                        const char *ideal,
                                        struct GckInvariant **out);

/**
 * Parses an invariant in the `kind`/`group`/`map` line format.
 *
 * # Safety
 * `src` must be a nul-terminated string and `out` a valid pointer.
 */
enum GckStatus gck_invariant_parse(const char *src, struct GckInvariant **out);

/**
 * # Safety
 * `inv` must be null or a handle from this library, freed at most once.
 */
void gck_invariant_free(struct GckInvariant *inv);

/**
 * # Safety
 * `inv` must be a valid handle and `out` a valid pointer.
 */
enum GckStatus gck_invariant_to_text(const struct GckInvariant *inv, char **out);

/**
 * Decides the extension conditions for an invariant file (six-term data
 * plus piece types). `report`, if not null, receives one line per
 * condition.
 *
 * # Safety
 * `src` must be a nul-terminated string, `verdict` a valid pointer and
 * `report` null or a valid pointer.
 */
enum GckStatus gck_check_extension(const char *src, enum GckVerdict *verdict, char **report);

/**
 * Checks the synthesis hypotheses on an augmented invariant.
 *
 * # Safety
 * `inv` must be a valid handle, `verdict` a valid pointer and `report`
 * null or a valid pointer.
 */
enum GckStatus gck_invariant_check_hypotheses(const struct GckInvariant *inv,
                                              enum GckVerdict *verdict,
                                              char **report);

/**
 * Builds a graph realizing an augmented invariant. The realization is
 * recomputed and checked against the input before it is returned;
 * `verdict` reports that check.
 *
 * # Safety
 * `inv` must be a valid handle and `out`, `verdict` valid pointers.
 */
enum GckStatus gck_synthesize(const struct GckInvariant *inv,
                              struct GckGraph **out,
                              enum GckVerdict *verdict);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GCK_H */
