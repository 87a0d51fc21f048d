#ifndef VBPBB_H
#define VBPBB_H

/* Generated from the vbpbb-ffi Rust sources; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of an FFI call.
 */
typedef enum VbpbbStatus {
  /**
   * The call succeeded and all out parameters are filled in.
   */
  VBPBB_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  VBPBB_STATUS_NULL_POINTER = 1,
  /**
   * An argument was outside its valid range (even window, zero period,
   * bad level, equal frequencies, ...).
   */
  VBPBB_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The series is too short for the requested operation.
   */
  VBPBB_STATUS_INSUFFICIENT_DATA = 3,
  /**
   * An unexpected internal failure; the out parameters are untouched.
   */
  VBPBB_STATUS_INTERNAL = 4,
} VbpbbStatus;

/**
 * An opaque periodic-bootstrap confidence band.
 */
typedef struct VbpbbBand VbpbbBand;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Stable, static name of a status code (e.g. `"ok"`, `"null-pointer"`).
 */
const char *vbpbb_status_name(enum VbpbbStatus status);

/**
 * Number of filter coefficients for window `m` and `k` iterations,
 * written to `out_len`.
 *
 * # Safety
 * `out_len` must be a valid pointer.
 */
enum VbpbbStatus vbpbb_coefficients_len(size_t m, size_t k, size_t *out_len);

/**
 * Normalized filter coefficients for window `m` and `k` iterations.
 *
 * # Safety
 * `out` must point to `k*(m-1)+1` writable doubles (see
 * [`vbpbb_coefficients_len`]).
 */
enum VbpbbStatus vbpbb_coefficients(size_t m, size_t k, double *out);

/**
 * Squared filter gain at frequency offset `delta` from the center.
 *
 * Returns NaN for an invalid window (even or zero `m`, zero `k`).
 */
double vbpbb_transfer_gain(size_t m, size_t k, double delta);

/**
 * Smallest odd window separating frequencies `v1` and `v2`, written to
 * `out_m`.
 *
 * # Safety
 * `out_m` must be a valid pointer.
 */
enum VbpbbStatus vbpbb_select_window(double v1, double v2, size_t *out_m);

/**
 * Smallest odd window strictly above one and a half times `m_star`,
 * written to `out_m`.
 *
 * # Safety
 * `out_m` must be a valid pointer.
 */
enum VbpbbStatus vbpbb_widen_window(double m_star, size_t *out_m);

/**
 * Length of the filtered output for an `n`-point input (`n - k*(m-1)`),
 * written to `out_len`.
 *
 * # Safety
 * `out_len` must be a valid pointer.
 */
enum VbpbbStatus vbpbb_filter_output_len(size_t n, size_t m, size_t k, size_t *out_len);

/**
 * Bandpass-filters `values` at frequency `freq` and writes the
 * reconstructed real component.
 *
 * The output covers positions `valid_start .. valid_start + out_len` of
 * the input, where `out_len = n - k*(m-1)` (see
 * [`vbpbb_filter_output_len`]); `out_valid_start` receives the first
 * covered position.
 *
 * # Safety
 * `values` must point to `n` readable doubles; `out` must point to
 * `out_len` writable doubles; `out_valid_start` must be valid.
 */
enum VbpbbStatus vbpbb_filter(const double *values,
                              size_t n,
                              size_t m,
                              size_t k,
                              double freq,
                              double *out,
                              size_t *out_valid_start);

/**
 * Runs the phase-stratified periodic block bootstrap on `values` and
 * builds a pointwise percentile band, returned as an opaque handle in
 * `out_band`.
 *
 * Resampling matches the library's unfiltered bootstrap exactly: the same
 * `seed` produces the same band here and in the command-line `bootstrap`
 * subcommand. Free the handle with [`vbpbb_band_free`].
 *
 * # Safety
 * `values` must point to `n` readable doubles; `out_band` must be valid.
 */
enum VbpbbStatus vbpbb_band_create(const double *values,
                                   size_t n,
                                   size_t period,
                                   size_t replicates,
                                   double level,
                                   uint64_t seed,
                                   struct VbpbbBand **out_band);

/**
 * Number of phases in the band; 0 for a null handle.
 *
 * # Safety
 * `band` must be null or a live handle from [`vbpbb_band_create`].
 */
size_t vbpbb_band_period(const struct VbpbbBand *band);

/**
 * Confidence level of the band; NaN for a null handle.
 *
 * # Safety
 * `band` must be null or a live handle from [`vbpbb_band_create`].
 */
double vbpbb_band_level(const struct VbpbbBand *band);

/**
 * Whether no horizontal line fits inside the band: 1 if significant, 0 if
 * not, -1 for a null handle.
 *
 * # Safety
 * `band` must be null or a live handle from [`vbpbb_band_create`].
 */
int32_t vbpbb_band_significant(const struct VbpbbBand *band);

/**
 * Copies the band curves into caller buffers.
 *
 * Each of `lower`, `point`, and `upper` may be null to skip that curve;
 * non-null buffers receive [`vbpbb_band_period`] doubles.
 *
 * # Safety
 * Non-null buffers must hold at least `vbpbb_band_period(band)` doubles.
 */
enum VbpbbStatus vbpbb_band_curves(const struct VbpbbBand *band,
                                   double *lower,
                                   double *point,
                                   double *upper);

/**
 * Releases a band handle. A null handle is ignored.
 *
 * # Safety
 * `band` must have come from [`vbpbb_band_create`] and must not be used
 * afterwards.
 */
void vbpbb_band_free(struct VbpbbBand *band);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* VBPBB_H */
