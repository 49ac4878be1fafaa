#ifndef DYADLAB_H
#define DYADLAB_H

/* Generated by cbindgen from the dyadlab-ffi crate; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call. Anything other than `Ok` leaves a
 * human-readable explanation in [`dyad_last_error`].
 */
typedef enum DyadStatus {
  DyadStatus_Ok = 0,
  /**
   * A required pointer argument was null.
   */
  DyadStatus_NullPointer = 1,
  /**
   * A token, exponent, or size was rejected.
   */
  DyadStatus_InvalidArgument = 2,
  /**
   * Handle dimensions or buffer lengths do not line up.
   */
  DyadStatus_DimensionMismatch = 3,
  /**
   * A value was NaN or infinite.
   */
  DyadStatus_NonFinite = 4,
  /**
   * JSON input could not be decoded.
   */
  DyadStatus_ParseError = 5,
  /**
   * The input was legal but has no usable content (e.g. a zero symbol).
   */
  DyadStatus_Degenerate = 6,
  /**
   * A bug on the library side; please report it.
   */
  DyadStatus_Internal = 7,
} DyadStatus;

/**
 * A Haar coefficient set (mean part plus cancellative blocks).
 */
typedef struct DyadCoeffs DyadCoeffs;

/**
 * A one- or two-variable signal on a dyadic grid.
 */
typedef struct DyadSignal DyadSignal;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static string; never free it.
 */
const char *dyad_version(void);

/**
 * Message for the most recent failure on this thread, or null if the
 * last call succeeded. The pointer stays valid until the next fallible
 * call on the same thread; do not free it.
 */
const char *dyad_last_error(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must have been returned by a `*_to_json` call and not freed yet;
 * null is accepted and ignored.
 */
void dyad_string_free(char *s);

/**
 * Builds a one-variable signal from `len` cell values on a grid with
 * `2^resolution` cells.
 *
 * # Safety
 * `values` must point to `len` readable doubles; `out` must be a valid
 * write target.
 */
enum DyadStatus dyad_signal_new_1d(uint32_t resolution,
                                   const double *values,
                                   uintptr_t len,
                                   struct DyadSignal **out);

/**
 * Builds a two-variable signal from `len` cell values in x-major order
 * on a `2^res_x` by `2^res_y` grid.
 *
 * # Safety
 * `values` must point to `len` readable doubles; `out` must be a valid
 * write target.
 */
enum DyadStatus dyad_signal_new_2d(uint32_t res_x,
                                   uint32_t res_y,
                                   const double *values,
                                   uintptr_t len,
                                   struct DyadSignal **out);

/**
 * Decodes signal JSON (the same wire format the CLI uses).
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be a valid write
 * target.
 */
enum DyadStatus dyad_signal_parse(const char *json, struct DyadSignal **out);

/**
 * Encodes a signal as JSON; release the string with
 * [`dyad_string_free`].
 *
 * # Safety
 * `sig` must be a live signal handle; `out` must be a valid write
 * target.
 */
enum DyadStatus dyad_signal_to_json(const struct DyadSignal *sig, char **out);

/**
 * Number of grid cells, or 0 for a null handle.
 *
 * # Safety
 * `sig` must be null or a live signal handle.
 */
uintptr_t dyad_signal_len(const struct DyadSignal *sig);

/**
 * 1 or 2, or 0 for a null handle.
 *
 * # Safety
 * `sig` must be null or a live signal handle.
 */
uint8_t dyad_signal_dims(const struct DyadSignal *sig);

/**
 * Copies all cell values into `buf`; `len` must equal
 * [`dyad_signal_len`].
 *
 * # Safety
 * `sig` must be a live signal handle and `buf` must point to `len`
 * writable doubles.
 */
enum DyadStatus dyad_signal_copy_values(const struct DyadSignal *sig, double *buf, uintptr_t len);

/**
 * Releases a signal handle; null is ignored.
 *
 * # Safety
 * `sig` must be null or a live signal handle, and must not be used
 * afterwards.
 */
void dyad_signal_free(struct DyadSignal *sig);

/**
 * Haar analysis: signal to coefficient set.
 *
 * # Safety
 * `sig` must be a live signal handle; `out` must be a valid write
 * target.
 */
enum DyadStatus dyad_forward(const struct DyadSignal *sig, struct DyadCoeffs **out);

/**
 * Haar synthesis: coefficient set back to a signal.
 *
 * # Safety
 * `coeffs` must be a live coefficient handle; `out` must be a valid
 * write target.
 */
enum DyadStatus dyad_inverse(const struct DyadCoeffs *coeffs, struct DyadSignal **out);

/**
 * Decodes coefficient JSON (the same wire format the CLI uses).
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be a valid write
 * target.
 */
enum DyadStatus dyad_coeffs_parse(const char *json, struct DyadCoeffs **out);

/**
 * Encodes a coefficient set as JSON; release the string with
 * [`dyad_string_free`].
 *
 * # Safety
 * `coeffs` must be a live coefficient handle; `out` must be a valid
 * write target.
 */
enum DyadStatus dyad_coeffs_to_json(const struct DyadCoeffs *coeffs, char **out);

/**
 * Releases a coefficient handle; null is ignored.
 *
 * # Safety
 * `coeffs` must be null or a live coefficient handle, and must not be
 * used afterwards.
 */
void dyad_coeffs_free(struct DyadCoeffs *coeffs);

/**
 * Evaluates a norm of a signal. `kind` takes the CLI tokens (`lp`,
 * `hp-square`, `hp-maximal`, `bmo-line`, `product-bmo-exact`,
 * `product-bmo-heuristic`, `slice-bmo-sup`, `slice-hr-lr`), with the
 * exponent either inline (`hp-square:1.5`) or in `exponent`; pass NaN
 * when the kind takes none.
 *
 * # Safety
 * `sig` must be a live signal handle, `kind` a NUL-terminated string,
 * and `out` a valid write target.
 */
enum DyadStatus dyad_norm(const struct DyadSignal *sig,
                          const char *kind,
                          double exponent,
                          double *out);

/**
 * Applies a named operator with symbol `g` to `f`. `op` takes `pi1`,
 * `pi1t`, `pi2`, `pi3`, `pi4` for two-variable handles and `pig`,
 * `pigp`, `pigpp` for one-variable ones.
 *
 * # Safety
 * `op` must be a NUL-terminated string, `g` a live coefficient handle,
 * `f` a live signal handle, and `out` a valid write target.
 */
enum DyadStatus dyad_apply(const char *op,
                           const struct DyadCoeffs *g,
                           const struct DyadSignal *f,
                           struct DyadSignal **out);

/**
 * Spectral norm of a named operator on `L^2`, by power iteration.
 *
 * # Safety
 * `op` must be a NUL-terminated string, `g` a live coefficient handle,
 * and `out` a valid write target.
 */
enum DyadStatus dyad_opnorm_l2(const char *op, const struct DyadCoeffs *g, double *out);

/**
 * Upper bound for the mixed-form operator norm of a two-variable
 * symbol, from the per-cell matrix view.
 *
 * # Safety
 * `g` must be a live two-variable coefficient handle and `out` a valid
 * write target.
 */
enum DyadStatus dyad_matrix_bound(const struct DyadCoeffs *g, double *out);

/**
 * Builds one of the named coefficient families (`hadamard` or
 * `identity`) with `n` level generations on an `n`-level square grid.
 *
 * # Safety
 * `example` must be a NUL-terminated string and `out` a valid write
 * target.
 */
enum DyadStatus dyad_construct(const char *example, uintptr_t n, struct DyadCoeffs **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DYADLAB_H */
