#ifndef ISOCONJ_H
#define ISOCONJ_H

/* Generated by cbindgen from the isoconj-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status of a successful call.
#define ISOCONJ_STATUS_OK 0

// Status returned when an argument is unusable at the interface level —
// a null pointer or a string that is not valid UTF-8 — as opposed to an
// engine error, which carries the engine's own status.
#define ISOCONJ_STATUS_INVALID_ARGUMENT 100

// An opaque parsed problem document: a field level, a bilinear space, and
// named operators.
typedef struct IsoconjProblem IsoconjProblem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parse a JSON problem document into a new handle.
//
// On success writes the handle to `out` and returns 0; the handle must be
// released with [`isoconj_problem_free`].
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer; the
// handle written to `out` is owned by the caller.
int32_t isoconj_problem_parse(const char *json, struct IsoconjProblem **out);

// Release a handle returned by [`isoconj_problem_parse`].  Null is ignored.
//
// # Safety
// `p` must be a handle from [`isoconj_problem_parse`] that has not already
// been freed, or null.
void isoconj_problem_free(struct IsoconjProblem *p);

// Write the dimension of the problem's bilinear space to `out`.
//
// # Safety
// `p` must be a live handle and `out` a valid pointer.
int32_t isoconj_problem_dimension(const struct IsoconjProblem *p, uint64_t *out);

// Write the field characteristic of the problem's level to `out`.
//
// # Safety
// `p` must be a live handle and `out` a valid pointer.
int32_t isoconj_problem_characteristic(const struct IsoconjProblem *p, uint64_t *out);

// Write the number of named operators in the document to `out`.
//
// # Safety
// `p` must be a live handle and `out` a valid pointer.
int32_t isoconj_problem_operator_count(const struct IsoconjProblem *p, uint64_t *out);

// Decide whether the named operator is an isometry of the problem's form;
// writes `true`/`false` to `out`.
//
// # Safety
// `p` must be a live handle, `name` a NUL-terminated string, and `out` a
// valid pointer.
int32_t isoconj_check(const struct IsoconjProblem *p, const char *name, bool *out);

// Compute the elementary divisors of the named operator.  Writes a JSON
// document `{"divisors": [{"eigenvalue", "size"}, ...], "level": {...}}`
// to `out_json`; eigenvalue encodings are relative to the reported level.
//
// # Safety
// `p` must be a live handle, `name` a NUL-terminated string, and
// `out_json` a valid pointer; the string written to `out_json` must be
// released with [`isoconj_string_free`].
int32_t isoconj_elementary_divisors(const struct IsoconjProblem *p,
                                    const char *name,
                                    char **out_json);

// Decide whether the two named operators are conjugate in the isometry
// group.  Writes a JSON document `{"conjugate", "witness", "divisors_s",
// "divisors_t", "case_trace", "level"}` to `out_json`; all matrix and
// eigenvalue encodings are relative to the reported level.
//
// # Safety
// `p` must be a live handle, `s_name`/`t_name` NUL-terminated strings, and
// `out_json` a valid pointer; the string written to `out_json` must be
// released with [`isoconj_string_free`].
int32_t isoconj_conjugacy(const struct IsoconjProblem *p,
                          const char *s_name,
                          const char *t_name,
                          char **out_json);

// Build the canonical invariant form on the dimension-(m+1) weight model
// over GF(p).  Writes `{"kind", "gram", "level"}` to `out_json`.
//
// # Safety
// `out_json` must be a valid pointer; the string written to it must be
// released with [`isoconj_string_free`].
int32_t isoconj_weight_model_form(uint64_t m, uint64_t p, char **out_json);

// Return a copy of the message for the most recent error on this thread,
// or null if the last call succeeded.  The caller releases the copy with
// [`isoconj_string_free`].
//
// # Safety
// Always safe to call; the returned pointer (when non-null) must be
// released with [`isoconj_string_free`].
char *isoconj_last_error_message(void);

// Release a string returned by this library.  Null is ignored.
//
// # Safety
// `s` must be a string returned by this library that has not already been
// freed, or null.
void isoconj_string_free(char *s);

// The library version as a static NUL-terminated string; never freed.
const char *isoconj_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ISOCONJ_H */
