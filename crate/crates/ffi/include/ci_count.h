#ifndef CI_COUNT_H
#define CI_COUNT_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of a call. `CI_OK` is zero.
 */
typedef enum {
  CI_OK = 0,
  CI_NULL_POINTER = 1,
  CI_INVALID_UTF8 = 2,
  CI_RANGE_ERROR = 3,
  CI_CAPACITY_ERROR = 4,
  CI_SHAPE_ERROR = 5,
  CI_DUPLICATE_ROW = 6,
  CI_BUDGET_EXCEEDED = 7,
  CI_DOMAIN_ERROR = 8,
  CI_STRUCTURE_ERROR = 9,
  CI_PARSE_ERROR = 10,
  CI_IO_ERROR = 11,
  CI_PANIC = 12,
} CiStatus;

/**
 * Closed forms available through [`ci_estimate_log2`].
 */
typedef enum {
  CI_METHOD_MAIN = 0,
  CI_METHOD_RESILIENT = 1,
  CI_METHOD_NK = 2,
  CI_METHOD_DENISOV = 3,
  CI_METHOD_K1_EXACT = 4,
  CI_METHOD_K1_LOG_SPACE = 5,
  CI_METHOD_SMALL_Q = 6,
} CiMethod;

/**
 * Opaque boolean function.
 */
typedef struct CiBoolFn CiBoolFn;

/**
 * Opaque census table.
 */
typedef struct CiCensus CiCensus;

/**
 * Opaque Walsh spectrum.
 */
typedef struct CiSpectrum CiSpectrum;

/**
 * Spectral summary of one function.
 */
typedef struct {
  uint64_t weight;
  uint32_t ci_order;
  uint64_t q_at_order;
  /**
   * `-1` unless the function is balanced.
   */
  int32_t resilient_order;
} CiProfile;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Valid until the
 * next call into the library on the same thread.
 */
const char *ci_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *ci_version(void);

/**
 * Releases a string returned by the library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void ci_string_free(char *s);

/**
 * Parses a truth table given as `2^n` bits (index 0 first) or as hex.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
CiStatus ci_boolfn_parse(uint32_t n, const char *text, CiBoolFn **out);

/**
 * Builds a function from `2^n` bytes, nonzero meaning 1.
 *
 * # Safety
 * `values` must point to `len` readable bytes and `out` be valid.
 */
CiStatus ci_boolfn_from_values(uint32_t n, const uint8_t *values, size_t len, CiBoolFn **out);

/**
 * # Safety
 * `f` must come from this library and not be freed twice.
 */
void ci_boolfn_free(CiBoolFn *f);

/**
 * # Safety
 * `f` and `out` must be valid.
 */
CiStatus ci_boolfn_weight(const CiBoolFn *f, uint64_t *out);

/**
 * # Safety
 * `f` and `out` must be valid.
 */
CiStatus ci_boolfn_classify(const CiBoolFn *f, CiProfile *out);

/**
 * Hex rendering of the truth table; release with [`ci_string_free`].
 *
 * # Safety
 * `f` and `out` must be valid.
 */
CiStatus ci_boolfn_to_hex(const CiBoolFn *f, char **out);

/**
 * # Safety
 * `f` and `out` must be valid.
 */
CiStatus ci_boolfn_walsh(const CiBoolFn *f, CiSpectrum **out);

/**
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void ci_spectrum_free(CiSpectrum *s);

/**
 * Number of coefficients, `2^n`; 0 for NULL.
 *
 * # Safety
 * `s` must be valid or NULL.
 */
size_t ci_spectrum_len(const CiSpectrum *s);

/**
 * Copies up to `cap` coefficients into `buf`; writes the full length to
 * `written`.
 *
 * # Safety
 * `s` and `written` must be valid and `buf` must hold `cap` values.
 */
CiStatus ci_spectrum_copy(const CiSpectrum *s, int64_t *buf, size_t cap, size_t *written);

/**
 * Exact census `q ↦ N(n,k,q)` with `workers` threads.
 *
 * # Safety
 * `out` must be valid.
 */
CiStatus ci_census(uint32_t n, uint32_t k, uint32_t workers, CiCensus **out);

/**
 * # Safety
 * `c` must come from this library and not be freed twice.
 */
void ci_census_free(CiCensus *c);

/**
 * `N(n,k,q)`; 0 for `q` outside the table.
 *
 * # Safety
 * `c` and `out` must be valid.
 */
CiStatus ci_census_count(const CiCensus *c, uint64_t q, uint64_t *out);

/**
 * Sum over all `q`.
 *
 * # Safety
 * `c` and `out` must be valid.
 */
CiStatus ci_census_total(const CiCensus *c, uint64_t *out);

/**
 * CSV with header `n,k,q,weight,count`; release with [`ci_string_free`].
 *
 * # Safety
 * `c` and `out` must be valid.
 */
CiStatus ci_census_to_csv(const CiCensus *c, char **out);

/**
 * `log2` of the estimate selected by `method`, one of the [`CiMethod`]
 * values. `q` is ignored by the methods that do not take it; `valid`
 * (optional) receives the admissibility flag.
 *
 * # Safety
 * `out` must be valid; `valid` may be NULL.
 */
CiStatus ci_estimate_log2(uint32_t method,
                          uint32_t n,
                          uint32_t k,
                          uint64_t q,
                          double *out,
                          bool *valid);

/**
 * Number of Hadamard matrices of the given order; orders above 4 need
 * `allow_large`.
 *
 * # Safety
 * `out` must be valid.
 */
CiStatus ci_hadamard_count(uint32_t order, bool allow_large, uint64_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CI_COUNT_H */
