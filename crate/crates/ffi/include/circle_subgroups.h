#ifndef CIRCLE_SUBGROUPS_H
#define CIRCLE_SUBGROUPS_H

/* Generated by cbindgen; regenerate with `cargo build -p circle-subgroups-ffi --features gen-header`. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. Zero is success.
 */
typedef enum {
  CS_STATUS_OK = 0,
  CS_STATUS_NULL_POINTER = 1,
  CS_STATUS_INVALID_UTF8 = 2,
  CS_STATUS_PARSE_RATIONAL = 3,
  CS_STATUS_INVALID_DESCRIPTOR = 4,
  CS_STATUS_NOT_DIVISIBILITY_CHAIN = 5,
  CS_STATUS_CHAIN_EXHAUSTED = 6,
  CS_STATUS_OUT_OF_HORIZON = 7,
  CS_STATUS_INDEX_OVERFLOW = 8,
  CS_STATUS_IMPRECISE_INPUT = 9,
  CS_STATUS_INVALID_EPSILON = 10,
  CS_STATUS_UNBOUNDED_RATIOS = 11,
  CS_STATUS_HORIZON_EXHAUSTED = 12,
  CS_STATUS_DENOMINATOR_TOO_LARGE = 13,
  CS_STATUS_HYPOTHESIS = 14,
  CS_STATUS_PANIC = 15,
} CsStatus;

/**
 * Opaque divisibility chain.
 */
typedef struct CsChain CsChain;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until the
 * next failing call on the same thread; do not free.
 */
const char *cs_last_error(void);

/**
 * Builds a chain from a descriptor such as `factorial`, `geometric:2` or
 * `ratios:2,3:repeat`, materializing `count` terms.
 *
 * # Safety
 * `descriptor` must be a NUL-terminated string; `out` must be writable.
 */
CsStatus cs_chain_new(const char *descriptor, uintptr_t count, CsChain **out);

/**
 * Releases a chain. NULL is ignored.
 *
 * # Safety
 * `chain` must come from [`cs_chain_new`] and not be used afterwards.
 */
void cs_chain_free(CsChain *chain);

/**
 * Number of materialized terms.
 *
 * # Safety
 * `chain` must be a live handle or NULL (which yields 0).
 */
uintptr_t cs_chain_len(const CsChain *chain);

/**
 * Writes `a_n` (1-based) in decimal, extending the chain if needed.
 *
 * # Safety
 * `chain` must be a live handle; `out` must be writable.
 */
CsStatus cs_chain_term(CsChain *chain, uintptr_t n, char **out);

/**
 * `‖x‖` as `"p/q"`.
 *
 * # Safety
 * `x` must be a NUL-terminated string; `out` must be writable.
 */
CsStatus cs_seminorm(const char *x, char **out);

/**
 * Decides membership of `x` for the chain (or its derived sequence when
 * `derived` is nonzero) and writes the verdict JSON.
 *
 * # Safety
 * `chain` must be a live handle; `x` a NUL-terminated string; `out` writable.
 */
CsStatus cs_member(const CsChain *chain, const char *x, int32_t derived, char **out);

/**
 * Statistical membership for the derived sequence; writes the verdict JSON.
 *
 * # Safety
 * `chain` must be a live handle; `x` a NUL-terminated string; `out` writable.
 */
CsStatus cs_smember(const CsChain *chain, const char *x, uintptr_t extra_blocks, char **out);

/**
 * Exact per-block counts of `‖d_n x‖ >= eps` and `!= 0`, as a JSON array.
 *
 * # Safety
 * `chain` must be a live handle; `x`, `eps` NUL-terminated; `out` writable.
 */
CsStatus cs_block_counts(const CsChain *chain,
                         const char *x,
                         const char *eps,
                         uintptr_t blocks,
                         char **out);

/**
 * Largest partial density of an index set (`every:2`, `geometric:3/2`, ...)
 * over `[tail_start, horizon]`, as JSON.
 *
 * # Safety
 * `set` must be NUL-terminated; `out` writable.
 */
CsStatus cs_upper_density(const char *set, uint64_t horizon, uint64_t tail_start, char **out);

/**
 * Horizon of the derived sequence over `blocks` blocks.
 *
 * # Safety
 * `chain` must be a live handle; `out` writable.
 */
CsStatus cs_derived_horizon(const CsChain *chain, uintptr_t blocks, uint64_t *out);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void cs_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CIRCLE_SUBGROUPS_H */
