#ifndef LPCC_H
#define LPCC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LpccStatus {
  LPCC_STATUS_OK = 0,
  LPCC_STATUS_NULL_POINTER = 1,
  LPCC_STATUS_INVALID_UTF8 = 2,
  LPCC_STATUS_INVALID_ARGUMENT = 3,
  LPCC_STATUS_PARSE = 4,
  LPCC_STATUS_COMPUTATION = 5,
  LPCC_STATUS_PANIC = 6,
} LpccStatus;

// Opaque set of labelled states.
typedef struct LpccStateSet LpccStateSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. Owned by the library.
const char *lpcc_last_error(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void lpcc_string_free(char *s);

// Builds a named set. `m` is the family parameter for S1m / S2m; pass 0 otherwise.
//
// # Safety
// `name` must be a valid C string and `out` writable.
enum LpccStatus lpcc_stateset_named(const char *name, size_t m, struct LpccStateSet **out);

// Parses a set from its JSON form.
//
// # Safety
// `json` must be a valid C string and `out` writable.
enum LpccStatus lpcc_stateset_from_json(const char *json, struct LpccStateSet **out);

// # Safety
// `set` must be a live handle and `out` writable.
enum LpccStatus lpcc_stateset_to_json(const struct LpccStateSet *set, char **out);

// # Safety
// `set` must be a live handle and `out` writable.
enum LpccStatus lpcc_stateset_len(const struct LpccStateSet *set, size_t *out);

// Releases a set handle. Null is ignored.
//
// # Safety
// `set` must come from this library and not have been freed.
void lpcc_stateset_free(struct LpccStateSet *set);

// Writes whether the states are mutually orthogonal.
//
// # Safety
// `set` must be a live handle and `out` writable.
enum LpccStatus lpcc_check_orthogonality(const struct LpccStateSet *set, bool *out);

// Rank-1 orthogonality-preserving directions of `group` (e.g. "C"), as JSON.
//
// # Safety
// Pointers must be valid; `out` receives a string to free with [`lpcc_string_free`].
enum LpccStatus lpcc_solve_rank1_json(const struct LpccStateSet *set,
                                      const char *group,
                                      bool exact_only,
                                      char **out);

// Bounded protocol search. `partition` may be null for the finest partition.
//
// # Safety
// Pointers must be valid; `out` receives a string to free with [`lpcc_string_free`].
enum LpccStatus lpcc_protocol_search_json(const struct LpccStateSet *set,
                                          const char *partition,
                                          size_t depth,
                                          char **out);

// Verifies a first-round measurement. `pvm` uses the ket grammar ("0,1;2");
// `partition` may be null for the finest partition.
//
// # Safety
// Pointers must be valid; `out` receives a string to free with [`lpcc_string_free`].
enum LpccStatus lpcc_verify_activation_json(const struct LpccStateSet *set,
                                            const char *group,
                                            const char *pvm,
                                            const char *partition,
                                            char **out);

// Locality classification. `joint` is an optional party pair such as "B,C".
//
// # Safety
// Pointers must be valid; `out` receives a string to free with [`lpcc_string_free`].
enum LpccStatus lpcc_classify_json(const struct LpccStateSet *set, const char *joint, char **out);

// Replays bundled theorem `n` (1-5). `status` receives 0 pass, 1 fail, 2 unknown;
// `report` (nullable) receives the JSON report.
//
// # Safety
// `status` must be writable; `report` null or writable.
enum LpccStatus lpcc_theorem(uint32_t n, int32_t *status, char **report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LPCC_H */
