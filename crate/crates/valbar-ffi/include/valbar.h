#ifndef VALBAR_H
#define VALBAR_H

/* Generated by cbindgen from the valbar-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code returned by every fallible function in this interface.
 */
typedef enum valbar_status {
  /**
   * The call succeeded.
   */
  VALBAR_OK = 0,
  /**
   * A required pointer argument was null.
   */
  VALBAR_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  VALBAR_INVALID_UTF8 = 2,
  /**
   * The input was not syntactically valid JSON for either document form.
   */
  VALBAR_PARSE_ERROR = 3,
  /**
   * The document parsed but failed validation (bad ring, shapes, ids, ...).
   */
  VALBAR_VALIDATION_ERROR = 4,
  /**
   * Analysis of a valid document failed.
   */
  VALBAR_COMPUTE_ERROR = 5,
  /**
   * The library panicked internally; the handle is still safe to free.
   */
  VALBAR_INTERNAL_ERROR = 6,
} valbar_status;

/**
 * Opaque handle to a parsed document.  Create with
 * [`valbar_document_parse`], release with [`valbar_document_free`].
 */
typedef struct valbar_document valbar_document;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses a JSON document into an opaque handle.
 *
 * `text` may describe either a network sheaf (`vertices`/`edges`/
 * `restrictions`, optionally `clock_ratios`) or a bare matrix (`ring` +
 * `matrix`).  On success writes a new handle to `*out` and returns
 * `VALBAR_OK`; the handle must later be released with
 * [`valbar_document_free`].  On failure `*out` is set to null and the
 * reason is available via [`valbar_last_error`].
 *
 * # Safety
 *
 * `text` must be a valid nul-terminated C string and `out` must be a valid
 * pointer to writable memory.
 */
enum valbar_status valbar_document_parse(const char *text, struct valbar_document **out);

/**
 * Releases a handle returned by [`valbar_document_parse`].
 *
 * Passing null is a no-op.
 *
 * # Safety
 *
 * `doc` must be null or a pointer previously returned by
 * [`valbar_document_parse`] that has not already been freed.
 */
void valbar_document_free(struct valbar_document *doc);

/**
 * Runs the full barcode analysis and returns the report as a JSON string.
 *
 * The report carries the barcode, Smith exponents, digit profile, per-route
 * barcodes, and the route-agreement flag — the same structure the
 * command-line tool emits with `--format structured`.  On success writes a
 * heap-allocated nul-terminated string to `*out_json`; release it with
 * [`valbar_string_free`].
 *
 * # Safety
 *
 * `doc` must be a live handle from [`valbar_document_parse`] and `out_json`
 * must be a valid pointer to writable memory.
 */
enum valbar_status valbar_analyze_json(const struct valbar_document *doc, char **out_json);

/**
 * Releases a string returned by this library.
 *
 * Passing null is a no-op.
 *
 * # Safety
 *
 * `s` must be null or a string previously returned by a `valbar_*` function
 * that has not already been freed.
 */
void valbar_string_free(char *s);

/**
 * Computes the Smith normal form exponents of the document's matrix.
 *
 * For a sheaf document the matrix is its coboundary.  Each diagonal entry
 * contributes one value: the exponent itself when it is resolved within the
 * ring's precision, or `-1` when the entry is indistinguishable from zero at
 * working precision (a censored exponent).  On success writes a
 * heap-allocated array to `*out` and its length to `*out_len`; release the
 * array with [`valbar_i64_array_free`].
 *
 * # Safety
 *
 * `doc` must be a live handle from [`valbar_document_parse`]; `out` and
 * `out_len` must be valid pointers to writable memory.
 */
enum valbar_status valbar_snf_exponents(const struct valbar_document *doc,
                                        int64_t **out,
                                        size_t *out_len);

/**
 * Computes the digit profile of the document's matrix.
 *
 * Writes the sequence `d_1, d_2, ...` of connecting-map ranks (one entry per
 * digit position up to the ring's precision) as a heap-allocated array.
 * Release it with [`valbar_i64_array_free`].
 *
 * # Safety
 *
 * `doc` must be a live handle from [`valbar_document_parse`]; `out` and
 * `out_len` must be valid pointers to writable memory.
 */
enum valbar_status valbar_digit_profile(const struct valbar_document *doc,
                                        int64_t **out,
                                        size_t *out_len);

/**
 * Releases an array returned by [`valbar_snf_exponents`] or
 * [`valbar_digit_profile`].
 *
 * Passing a null pointer is a no-op.  `len` must be the length the library
 * reported for this array.
 *
 * # Safety
 *
 * `ptr` must be null or an array previously returned by a `valbar_*`
 * function, paired with its reported length, and not already freed.
 */
void valbar_i64_array_free(int64_t *ptr, size_t len);

/**
 * Returns the error message from the most recent failed call on this
 * thread, or null if the most recent call succeeded.
 *
 * The pointer stays valid until the next `valbar_*` call on the same
 * thread; do not free it.
 */
const char *valbar_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VALBAR_H */
