//! C ABI over the core filtering and bootstrap routines.
//!
//! Conventions, shared by every function here:
//!
//! - Fallible functions return [`VbpbbStatus`] and write results through out
//!   pointers, which are only touched on [`VbpbbStatus::Ok`].
//! - Buffers are caller-allocated; query functions report the required
//!   lengths. Pointers must be valid for the stated lengths and must not
//!   alias the input.
//! - Bands are opaque heap handles created by [`vbpbb_band_create`] and
//!   released by [`vbpbb_band_free`]. A handle is never invalidated by
//!   reads and is safe to share across threads for reading.
//! - Panics cannot cross the boundary; any unexpected panic is reported as
//!   [`VbpbbStatus::Internal`].

use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use vbpbb::bootstrap::CiBand;
use vbpbb::kz::{self, KzftConfig};
use vbpbb::pipeline::{self, RunParams};
use vbpbb::Error;

/// Result of an FFI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VbpbbStatus {
    /// The call succeeded and all out parameters are filled in.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// An argument was outside its valid range (even window, zero period,
    /// bad level, equal frequencies, ...).
    InvalidArgument = 2,
    /// The series is too short for the requested operation.
    InsufficientData = 3,
    /// An unexpected internal failure; the out parameters are untouched.
    Internal = 4,
}

/// Stable, static name of a status code (e.g. `"ok"`, `"null-pointer"`).
#[no_mangle]
pub extern "C" fn vbpbb_status_name(status: VbpbbStatus) -> *const c_char {
    let name: &'static [u8] = match status {
        VbpbbStatus::Ok => b"ok\0",
        VbpbbStatus::NullPointer => b"null-pointer\0",
        VbpbbStatus::InvalidArgument => b"invalid-argument\0",
        VbpbbStatus::InsufficientData => b"insufficient-data\0",
        VbpbbStatus::Internal => b"internal\0",
    };
    name.as_ptr().cast()
}

fn status_of(error: &Error) -> VbpbbStatus {
    match error {
        Error::EmptySeries | Error::InsufficientData { .. } => VbpbbStatus::InsufficientData,
        _ => VbpbbStatus::InvalidArgument,
    }
}

/// Runs a fallible body, translating panics into [`VbpbbStatus::Internal`].
fn guarded(body: impl FnOnce() -> VbpbbStatus) -> VbpbbStatus {
    catch_unwind(AssertUnwindSafe(body)).unwrap_or(VbpbbStatus::Internal)
}

/// Number of filter coefficients for window `m` and `k` iterations,
/// written to `out_len`.
///
/// # Safety
/// `out_len` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vbpbb_coefficients_len(
    m: usize,
    k: usize,
    out_len: *mut usize,
) -> VbpbbStatus {
    if out_len.is_null() {
        return VbpbbStatus::NullPointer;
    }
    guarded(|| match kz::KzCoefficients::new(m, k) {
        Ok(c) => {
            unsafe { *out_len = c.weights().len() };
            VbpbbStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Normalized filter coefficients for window `m` and `k` iterations.
///
/// # Safety
/// `out` must point to `k*(m-1)+1` writable doubles (see
/// [`vbpbb_coefficients_len`]).
#[no_mangle]
pub unsafe extern "C" fn vbpbb_coefficients(
    m: usize,
    k: usize,
    out: *mut f64,
) -> VbpbbStatus {
    if out.is_null() {
        return VbpbbStatus::NullPointer;
    }
    guarded(|| match kz::KzCoefficients::new(m, k) {
        Ok(c) => {
            let weights = c.weights();
            let target = unsafe { std::slice::from_raw_parts_mut(out, weights.len()) };
            target.copy_from_slice(weights);
            VbpbbStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Squared filter gain at frequency offset `delta` from the center.
///
/// Returns NaN for an invalid window (even or zero `m`, zero `k`).
#[no_mangle]
pub extern "C" fn vbpbb_transfer_gain(m: usize, k: usize, delta: f64) -> f64 {
    if m == 0 || m.is_multiple_of(2) || k == 0 {
        return f64::NAN;
    }
    kz::transfer_gain(m, k, delta)
}

/// Smallest odd window separating frequencies `v1` and `v2`, written to
/// `out_m`.
///
/// # Safety
/// `out_m` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vbpbb_select_window(
    v1: f64,
    v2: f64,
    out_m: *mut usize,
) -> VbpbbStatus {
    if out_m.is_null() {
        return VbpbbStatus::NullPointer;
    }
    guarded(|| match kz::select_window(v1, v2) {
        Ok((m, _)) => {
            unsafe { *out_m = m };
            VbpbbStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Smallest odd window strictly above one and a half times `m_star`,
/// written to `out_m`.
///
/// # Safety
/// `out_m` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vbpbb_widen_window(m_star: f64, out_m: *mut usize) -> VbpbbStatus {
    if out_m.is_null() {
        return VbpbbStatus::NullPointer;
    }
    guarded(|| match kz::widen_window(m_star) {
        Ok(m) => {
            unsafe { *out_m = m };
            VbpbbStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Length of the filtered output for an `n`-point input (`n - k*(m-1)`),
/// written to `out_len`.
///
/// # Safety
/// `out_len` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vbpbb_filter_output_len(
    n: usize,
    m: usize,
    k: usize,
    out_len: *mut usize,
) -> VbpbbStatus {
    if out_len.is_null() {
        return VbpbbStatus::NullPointer;
    }
    guarded(|| match KzftConfig::new(m, k, 0.25) {
        Ok(config) => {
            if n < config.min_input_len() {
                return VbpbbStatus::InsufficientData;
            }
            unsafe { *out_len = n - 2 * config.margin() };
            VbpbbStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Bandpass-filters `values` at frequency `freq` and writes the
/// reconstructed real component.
///
/// The output covers positions `valid_start .. valid_start + out_len` of
/// the input, where `out_len = n - k*(m-1)` (see
/// [`vbpbb_filter_output_len`]); `out_valid_start` receives the first
/// covered position.
///
/// # Safety
/// `values` must point to `n` readable doubles; `out` must point to
/// `out_len` writable doubles; `out_valid_start` must be valid.
#[no_mangle]
pub unsafe extern "C" fn vbpbb_filter(
    values: *const f64,
    n: usize,
    m: usize,
    k: usize,
    freq: f64,
    out: *mut f64,
    out_valid_start: *mut usize,
) -> VbpbbStatus {
    if values.is_null() || out.is_null() || out_valid_start.is_null() {
        return VbpbbStatus::NullPointer;
    }
    if n == 0 {
        return VbpbbStatus::InsufficientData;
    }
    let input = unsafe { std::slice::from_raw_parts(values, n) };
    guarded(|| {
        let config = match KzftConfig::new(m, k, freq) {
            Ok(c) => c,
            Err(e) => return status_of(&e),
        };
        match kz::kzft_apply(input, config) {
            Ok(filtered) => {
                let real = kz::reconstruct_real(&filtered);
                let target = unsafe { std::slice::from_raw_parts_mut(out, real.len()) };
                target.copy_from_slice(&real);
                unsafe { *out_valid_start = filtered.valid_start() };
                VbpbbStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// An opaque periodic-bootstrap confidence band.
pub struct VbpbbBand {
    band: CiBand,
    significant: bool,
}

/// Runs the phase-stratified periodic block bootstrap on `values` and
/// builds a pointwise percentile band, returned as an opaque handle in
/// `out_band`.
///
/// Resampling matches the library's unfiltered bootstrap exactly: the same
/// `seed` produces the same band here and in the command-line `bootstrap`
/// subcommand. Free the handle with [`vbpbb_band_free`].
///
/// # Safety
/// `values` must point to `n` readable doubles; `out_band` must be valid.
#[no_mangle]
pub unsafe extern "C" fn vbpbb_band_create(
    values: *const f64,
    n: usize,
    period: usize,
    replicates: usize,
    level: f64,
    seed: u64,
    out_band: *mut *mut VbpbbBand,
) -> VbpbbStatus {
    if values.is_null() || out_band.is_null() {
        return VbpbbStatus::NullPointer;
    }
    if n == 0 {
        return VbpbbStatus::InsufficientData;
    }
    let input = unsafe { std::slice::from_raw_parts(values, n) };
    guarded(|| {
        let params = RunParams {
            replicates,
            level,
            seed,
            ..RunParams::default()
        };
        match pipeline::gsbb_band(input, period, "bootstrap", &params) {
            Ok(result) => {
                let handle = Box::new(VbpbbBand {
                    band: result.band,
                    significant: result.significant,
                });
                unsafe { *out_band = Box::into_raw(handle) };
                VbpbbStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Number of phases in the band; 0 for a null handle.
///
/// # Safety
/// `band` must be null or a live handle from [`vbpbb_band_create`].
#[no_mangle]
pub unsafe extern "C" fn vbpbb_band_period(band: *const VbpbbBand) -> usize {
    if band.is_null() {
        return 0;
    }
    unsafe { (*band).band.len() }
}

/// Confidence level of the band; NaN for a null handle.
///
/// # Safety
/// `band` must be null or a live handle from [`vbpbb_band_create`].
#[no_mangle]
pub unsafe extern "C" fn vbpbb_band_level(band: *const VbpbbBand) -> f64 {
    if band.is_null() {
        return f64::NAN;
    }
    unsafe { (*band).band.level() }
}

/// Whether no horizontal line fits inside the band: 1 if significant, 0 if
/// not, -1 for a null handle.
///
/// # Safety
/// `band` must be null or a live handle from [`vbpbb_band_create`].
#[no_mangle]
pub unsafe extern "C" fn vbpbb_band_significant(band: *const VbpbbBand) -> i32 {
    if band.is_null() {
        return -1;
    }
    if unsafe { (*band).significant } {
        1
    } else {
        0
    }
}

/// Copies the band curves into caller buffers.
///
/// Each of `lower`, `point`, and `upper` may be null to skip that curve;
/// non-null buffers receive [`vbpbb_band_period`] doubles.
///
/// # Safety
/// Non-null buffers must hold at least `vbpbb_band_period(band)` doubles.
#[no_mangle]
pub unsafe extern "C" fn vbpbb_band_curves(
    band: *const VbpbbBand,
    lower: *mut f64,
    point: *mut f64,
    upper: *mut f64,
) -> VbpbbStatus {
    if band.is_null() {
        return VbpbbStatus::NullPointer;
    }
    let b = unsafe { &(*band).band };
    let copy = |src: &[f64], dst: *mut f64| {
        if !dst.is_null() {
            let target = unsafe { std::slice::from_raw_parts_mut(dst, src.len()) };
            target.copy_from_slice(src);
        }
    };
    copy(b.lower(), lower);
    copy(b.point(), point);
    copy(b.upper(), upper);
    VbpbbStatus::Ok
}

/// Releases a band handle. A null handle is ignored.
///
/// # Safety
/// `band` must have come from [`vbpbb_band_create`] and must not be used
/// afterwards.
#[no_mangle]
pub unsafe extern "C" fn vbpbb_band_free(band: *mut VbpbbBand) {
    if !band.is_null() {
        drop(unsafe { Box::from_raw(band) });
    }
}
