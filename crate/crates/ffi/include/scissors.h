#ifndef SCISSORS_H
#define SCISSORS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by fallible functions.
 */
typedef enum ScStatus {
  SC_STATUS_OK = 0,
  SC_STATUS_NULL_POINTER = 1,
  SC_STATUS_INVALID_UTF8 = 2,
  SC_STATUS_INVALID_RING = 3,
  SC_STATUS_INVALID_ARGUMENT = 4,
  SC_STATUS_COMPUTATION_FAILED = 5,
  SC_STATUS_OUT_OF_RANGE = 6,
  SC_STATUS_PANIC = 7,
} ScStatus;

/**
 * Opaque finitely presented abelian group.
 */
typedef struct ScGroup ScGroup;

/**
 * Opaque finite local ring.
 */
typedef struct ScRing ScRing;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy of the last error message on this thread, or NULL. Free with [`sc_string_free`].
 */
char *sc_last_error(void);

/**
 * Frees a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void sc_string_free(char *s);

/**
 * Parses a ring descriptor such as `gf(7)`, `gf(3^2)`, `z/49` or `gf(5)[t]/t^2`.
 *
 * # Safety
 * `desc` must be a nul-terminated string and `out` a valid pointer.
 */
enum ScStatus sc_ring_new(const char *desc, struct ScRing **out);

/**
 * # Safety
 * `r` must come from [`sc_ring_new`] and not have been freed. NULL is ignored.
 */
void sc_ring_free(struct ScRing *r);

/**
 * Number of elements, or 0 for NULL.
 *
 * # Safety
 * `r` must be NULL or a live ring handle.
 */
uint64_t sc_ring_size(const struct ScRing *r);

/**
 * Order of the residue field, or 0 for NULL.
 *
 * # Safety
 * `r` must be NULL or a live ring handle.
 */
uint64_t sc_ring_residue_order(const struct ScRing *r);

/**
 * Computes a named group (`P`, `B`, `RP1`, `RB`, `GW`, `I`, `H3`, `RP~`, ...).
 *
 * # Safety
 * `r` must be a live ring handle, `name` a nul-terminated string, `out` a valid pointer.
 */
enum ScStatus sc_group_compute(const struct ScRing *r, const char *name, struct ScGroup **out);

/**
 * # Safety
 * `g` must come from [`sc_group_compute`] and not have been freed. NULL is ignored.
 */
void sc_group_free(struct ScGroup *g);

/**
 * Number of finite invariant factors.
 *
 * # Safety
 * `g` must be NULL or a live group handle.
 */
size_t sc_group_num_invariants(const struct ScGroup *g);

/**
 * The `i`-th invariant factor `d_1 | d_2 | ...`.
 *
 * # Safety
 * `g` must be a live group handle and `out` a valid pointer.
 */
enum ScStatus sc_group_invariant(const struct ScGroup *g, size_t i, uint64_t *out);

/**
 * Rank of the free part.
 *
 * # Safety
 * `g` must be NULL or a live group handle.
 */
size_t sc_group_free_rank(const struct ScGroup *g);

/**
 * Order of the odd torsion subgroup.
 *
 * # Safety
 * `g` must be a live group handle and `out` a valid pointer.
 */
enum ScStatus sc_group_odd_order(const struct ScGroup *g, uint64_t *out);

/**
 * Human-readable structure such as `Z/2 + Z`. Free with [`sc_string_free`].
 *
 * # Safety
 * `g` must be NULL or a live group handle.
 */
char *sc_group_structure(const struct ScGroup *g);

/**
 * Odd order of `P̄(F_p)` for `F = Q`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum ScStatus sc_pbar_odd_order(uint64_t p, uint64_t *out);

/**
 * `gcd(w2, (q+1)/2)`, or `gcd(w2, q+1)` when `char2` is set.
 */
uint64_t sc_k3_image_order(uint64_t w2, uint64_t q, bool char2);

/**
 * Length of the amalgam word of a matrix `a,b;c,d` in `SL_2(Z[1/p])`.
 *
 * # Safety
 * `matrix` must be a nul-terminated string and `out` a valid pointer.
 */
enum ScStatus sc_amalgam_length(uint64_t p, const char *matrix, size_t *out);

/**
 * Runs a verification suite; `passed` receives whether every check held.
 *
 * # Safety
 * `suite` and `ring` must be nul-terminated strings and `passed` a valid pointer.
 */
enum ScStatus sc_verify(const char *suite, const char *ring, uint64_t seed, bool *passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SCISSORS_H */
