#ifndef MACPOLAR_H
#define MACPOLAR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MpStatus {
  MP_STATUS_OK = 0,
  MP_STATUS_NULL_POINTER = 1,
  MP_STATUS_INVALID_UTF8 = 2,
  MP_STATUS_PARSE = 3,
  MP_STATUS_INVALID_CHANNEL = 4,
  MP_STATUS_INVALID_ARGUMENT = 5,
  MP_STATUS_IO = 6,
  MP_STATUS_INTERNAL = 7,
} MpStatus;

/**
 * Opaque channel handle.
 */
typedef struct MpMac MpMac;

/**
 * Numerical thresholds; pass `NULL` wherever accepted to use the defaults
 * (1e-9, 1e-7, 1e-6).
 */
typedef struct MpTolerances {
  double zero;
  double ratio;
  double oracle;
} MpTolerances;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or `NULL`. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *mp_last_error(void);

/**
 * Parses a channel from JSON text in the channel-file format.
 *
 * # Safety
 * `json` must be a nul-terminated string and `out` a valid pointer.
 */
enum MpStatus mp_mac_from_json(const char *json, struct MpMac **out);

/**
 * Loads a channel file.
 *
 * # Safety
 * `path` must be a nul-terminated string and `out` a valid pointer.
 */
enum MpStatus mp_mac_load(const char *path, struct MpMac **out);

/**
 * Releases a handle. `NULL` is ignored.
 *
 * # Safety
 * `mac` must come from this library and not be used afterwards.
 */
void mp_mac_free(struct MpMac *mac);

/**
 * # Safety
 * `mac` and `out` must be valid pointers.
 */
enum MpStatus mp_mac_num_users(const struct MpMac *mac, size_t *out);

/**
 * # Safety
 * `mac` and `out` must be valid pointers.
 */
enum MpStatus mp_mac_output_size(const struct MpMac *mac, size_t *out);

/**
 * `I_S(W)` in bits for the user set with bitmask `mask` (bit 0 is user 1).
 *
 * # Safety
 * `mac` and `out` must be valid pointers.
 */
enum MpStatus mp_mac_mutual_info(const struct MpMac *mac, uint32_t mask, double *out);

/**
 * Synthesizes `W^s` for a sign sequence such as `"-+"`, merging
 * equivalent outputs when `merge` is set. Depth is capped at 3.
 *
 * # Safety
 * `mac`, `out` must be valid pointers and `seq` a nul-terminated string.
 */
enum MpStatus mp_mac_synthesize(const struct MpMac *mac,
                                const char *seq,
                                bool merge,
                                struct MpMac **out);

/**
 * Whether polarization preserves `I_S` for one proper user set.
 *
 * # Safety
 * `mac` and `compatible` must be valid pointers; `tol` may be `NULL`.
 */
enum MpStatus mp_check_subset(const struct MpMac *mac,
                              uint32_t mask,
                              const struct MpTolerances *tol,
                              bool *compatible);

/**
 * Whether polarization preserves the whole capacity region.
 *
 * # Safety
 * `mac` and `preserved` must be valid pointers; `tol` may be `NULL`.
 */
enum MpStatus mp_check_region(const struct MpMac *mac,
                              const struct MpTolerances *tol,
                              bool *preserved);

/**
 * Full check report as JSON, for one proper user set or for every proper
 * set when `mask` is 0. Release the result with `mp_string_free`.
 *
 * # Safety
 * `mac` and `out` must be valid pointers; `tol` may be `NULL`.
 */
enum MpStatus mp_check_report_json(const struct MpMac *mac,
                                   uint32_t mask,
                                   const struct MpTolerances *tol,
                                   char **out);

/**
 * Releases a string returned by this library. `NULL` is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void mp_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MACPOLAR_H */
