#ifndef LDGM_H
#define LDGM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result of every fallible call.
 */
typedef enum LdgmStatus {
  LDGM_STATUS_OK = 0,
  LDGM_STATUS_NULL_POINTER = 1,
  LDGM_STATUS_INVALID_ARGUMENT = 2,
  LDGM_STATUS_LENGTH_MISMATCH = 3,
  LDGM_STATUS_IO = 4,
  LDGM_STATUS_PARSE = 5,
  LDGM_STATUS_INFEASIBLE = 6,
  LDGM_STATUS_CONTRADICTION = 7,
  LDGM_STATUS_PANIC = 8,
} LdgmStatus;

/*
 Opaque code handle.
 */
typedef struct LdgmCode LdgmCode;

/*
 Encoder settings. `gamma` set to NaN selects the rate-based default.
 */
typedef struct LdgmEncodeParams {
  double w_sou;
  double w_info;
  double gamma;
  double alpha;
  double tol;
  size_t max_iters;
  double bias_threshold;
  double max_fix_fraction;
  size_t min_fix_count;
  /*
   Nonzero sets leftover free bits to 0 instead of their argmax.
   */
  uint8_t zero_fill;
  /*
   Nonzero reinitializes messages every round.
   */
  uint8_t reinit;
  uint64_t seed;
} LdgmEncodeParams;

typedef struct LdgmEncodeResult {
  double distortion;
  size_t rounds;
  size_t total_iterations;
  size_t residual_free;
} LdgmEncodeResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread; empty after success.
 Valid until the next call on the same thread.
 */
const char *ldgm_last_error_message(void);

/*
 Default encoder settings for a code of the given rate.
 */
struct LdgmEncodeParams ldgm_default_encode_params(double rate);

/*
 Samples a code with `n` source bits at `rate` from the given degree
 classes (`*_degrees[k]` occurs with fraction `*_fractions[k]`).

 # Safety
 Array arguments must point to at least the stated number of elements and
 `out` must be writable.
 */
enum LdgmStatus ldgm_code_generate(size_t n,
                                   double rate,
                                   const size_t *info_degrees,
                                   const double *info_fractions,
                                   size_t info_len,
                                   const size_t *check_degrees,
                                   const double *check_fractions,
                                   size_t check_len,
                                   uint64_t seed,
                                   struct LdgmCode **out);

/*
 Samples a code from the built-in degree distribution for `rate`.

 # Safety
 `out` must be writable.
 */
enum LdgmStatus ldgm_code_generate_default(size_t n,
                                           double rate,
                                           uint64_t seed,
                                           struct LdgmCode **out);

/*
 # Safety
 `path` must be a NUL-terminated string and `out` writable.
 */
enum LdgmStatus ldgm_code_load(const char *path, struct LdgmCode **out);

/*
 # Safety
 `code` must be a live handle and `path` a NUL-terminated string.
 */
enum LdgmStatus ldgm_code_save(const struct LdgmCode *code, const char *path);

/*
 Releases a handle; null is ignored.

 # Safety
 `code` must come from this library and not be used afterwards.
 */
void ldgm_code_free(struct LdgmCode *code);

/*
 Number of source bits, 0 for a null handle.

 # Safety
 `code` must be null or a live handle.
 */
size_t ldgm_code_n(const struct LdgmCode *code);

/*
 Number of information bits, 0 for a null handle.

 # Safety
 `code` must be null or a live handle.
 */
size_t ldgm_code_m(const struct LdgmCode *code);

/*
 Writes the reconstruction `A x` (length n) to `y_out`.

 # Safety
 `x` must hold `x_len` bytes and `y_out` must have room for `y_len`.
 */
enum LdgmStatus ldgm_decode(const struct LdgmCode *code,
                            const uint8_t *x,
                            size_t x_len,
                            uint8_t *y_out,
                            size_t y_len);

/*
 Encodes the source `y` (length n) into `x_out` (length m). `params` may
 be null for the defaults of the code's rate; `result` may be null.

 # Safety
 Buffers must hold the stated lengths; non-null pointers must be valid.
 */
enum LdgmStatus ldgm_encode(const struct LdgmCode *code,
                            const uint8_t *y,
                            size_t y_len,
                            const struct LdgmEncodeParams *params,
                            uint8_t *x_out,
                            size_t x_len,
                            struct LdgmEncodeResult *result);

/*
 Fraction of positions where `a` and `b` differ.

 # Safety
 `a` and `b` must hold `len` bytes; `out` must be writable.
 */
enum LdgmStatus ldgm_distortion(const uint8_t *a, const uint8_t *b, size_t len, double *out);

/*
 Shannon distortion bound at `rate` for a fair binary source.

 # Safety
 `out` must be writable.
 */
enum LdgmStatus ldgm_shannon_distortion(double rate, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LDGM_H */
