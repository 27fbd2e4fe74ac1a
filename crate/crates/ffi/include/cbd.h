#ifndef CBD_H
#define CBD_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CbdCyclicVerdict {
  CBD_CYCLIC_VERDICT_NOT_CYCLIC = 0,
  CBD_CYCLIC_VERDICT_CONTEXTUAL = 1,
  CBD_CYCLIC_VERDICT_NONCONTEXTUAL = 2,
  CBD_CYCLIC_VERDICT_NOT_APPLICABLE = 3,
} CbdCyclicVerdict;

typedef enum CbdStatus {
  CBD_STATUS_OK = 0,
  CBD_STATUS_NULL_POINTER = 1,
  CBD_STATUS_INVALID_UTF8 = 2,
  CBD_STATUS_PARSE = 3,
  CBD_STATUS_INVALID = 4,
  CBD_STATUS_SIZE_GUARD = 5,
  CBD_STATUS_INTERNAL = 6,
} CbdStatus;

// The result of deciding contextuality.
typedef struct CbdAnalysis CbdAnalysis;

// A parsed system.
typedef struct CbdSystem CbdSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parses and validates a system document. On success `*out` owns a new system.
//
// # Safety
// `source` must be a NUL-terminated string and `out` a writable pointer.
enum CbdStatus cbd_system_parse(const char *source, struct CbdSystem **out);

// Parses a document without checking system invariants; see
// `cbd_system_violation_count`.
//
// # Safety
// As for `cbd_system_parse`.
enum CbdStatus cbd_system_parse_unchecked(const char *source, struct CbdSystem **out);

// Releases a system. Null is ignored.
//
// # Safety
// `system` must come from a `cbd_system_parse*` call and not be used afterwards.
void cbd_system_free(struct CbdSystem *system);

// Writes the canonical document of `system` to `*out`.
//
// # Safety
// `system` must be a live handle and `out` a writable pointer.
enum CbdStatus cbd_system_serialize(const struct CbdSystem *system, char **out);

// Writes the number of broken invariants to `*count`; zero means valid.
//
// # Safety
// `system` must be a live handle and `count` a writable pointer.
enum CbdStatus cbd_system_violation_count(const struct CbdSystem *system, size_t *count);

// Decides contextuality. On success `*out` owns a new analysis.
//
// # Safety
// `system` must be a live handle and `out` a writable pointer.
enum CbdStatus cbd_analyze(const struct CbdSystem *system, struct CbdAnalysis **out);

// Releases an analysis. Null is ignored.
//
// # Safety
// `analysis` must come from `cbd_analyze` and not be used afterwards.
void cbd_analysis_free(struct CbdAnalysis *analysis);

// # Safety
// `analysis` must be a live handle and `out` a writable pointer.
enum CbdStatus cbd_analysis_contextual(const struct CbdAnalysis *analysis, bool *out);

// Writes `max_total - attained_total` as a `p/q` string.
//
// # Safety
// `analysis` must be a live handle and `out` a writable pointer.
enum CbdStatus cbd_analysis_delta(const struct CbdAnalysis *analysis, char **out);

// # Safety
// `analysis` must be a live handle and `out` a writable pointer.
enum CbdStatus cbd_analysis_max_total(const struct CbdAnalysis *analysis, char **out);

// # Safety
// `analysis` must be a live handle and `out` a writable pointer.
enum CbdStatus cbd_analysis_attained_total(const struct CbdAnalysis *analysis, char **out);

// Closed-form verdict for cyclic systems.
//
// # Safety
// `system` must be a live handle and `out` a writable pointer.
enum CbdStatus cbd_cyclic_verdict(const struct CbdSystem *system, enum CbdCyclicVerdict *out);

// Writes the full JSON report. `full_witness` includes every witness atom.
//
// # Safety
// `system` must be a live handle and `out` a writable pointer.
enum CbdStatus cbd_report_json(const struct CbdSystem *system, bool full_witness, char **out);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not be used afterwards.
void cbd_string_free(char *s);

// Message for the last failed call on this thread, or null. The pointer is
// valid until the next library call on the same thread.
const char *cbd_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CBD_H */
