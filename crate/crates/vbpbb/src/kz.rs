//! Kolmogorov–Zurbenko Fourier transform (KZFT) band-pass filtering.
//!
//! The KZFT filter is a k-fold moving average of length `m` demodulated at a
//! center frequency `v` (cycles per observation). Its weights are the
//! coefficients of the polynomial `(1 + z + ... + z^(m-1))^k` normalized by
//! `m^k`, so the filter forms, for each admissible day `t`,
//!
//! ```text
//! c(t) = sum_u  a(u) / m^k * exp(-i 2 pi v u) * x(t + u)
//! ```
//!
//! with `u` running over the centered window `[-k(m-1)/2, k(m-1)/2]`. The
//! complex output carries the narrow band around `v`; doubling its real part
//! reconstructs the periodic component as a real series.

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::spectral;

/// Fraction of target-bin power that off-target periodogram bins may reach
/// before a reconstructed component is considered contaminated.
pub const DEFAULT_LEAKAGE_THRESHOLD: f64 = 0.05;

/// Exact integer coefficients of `(1 + z + ... + z^(m-1))^k`.
///
/// The result has length `k(m-1) + 1`, is symmetric, and sums to `m^k`.
/// Window lengths must be odd so that the filter window can be centered.
pub fn kz_integer_coefficients(m: usize, k: usize) -> Result<Vec<BigUint>> {
    validate_window(m, k)?;
    let ones = vec![BigUint::from(1u32); m];
    let mut coeffs = ones.clone();
    for _ in 1..k {
        coeffs = convolve(&coeffs, &ones);
    }
    Ok(coeffs)
}

fn convolve(a: &[BigUint], b: &[BigUint]) -> Vec<BigUint> {
    let mut out = vec![BigUint::from(0u32); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

fn validate_window(m: usize, k: usize) -> Result<()> {
    if m == 0 || k == 0 {
        return Err(Error::InvalidArgument(
            "window length m and iteration count k must be at least 1".into(),
        ));
    }
    if m.is_multiple_of(2) {
        return Err(Error::EvenWindow { m });
    }
    Ok(())
}

/// Normalized KZ filter weights `a(u) / m^k` on the centered window.
#[derive(Debug, Clone, PartialEq)]
pub struct KzCoefficients {
    m: usize,
    k: usize,
    weights: Vec<f64>,
}

impl KzCoefficients {
    /// Computes the weights for window length `m` (odd) and `k` iterations.
    pub fn new(m: usize, k: usize) -> Result<Self> {
        let integers = kz_integer_coefficients(m, k)?;
        let norm = (m as f64).powi(k as i32);
        let weights = integers
            .iter()
            .map(|c| c.to_f64().expect("coefficient magnitude fits in f64") / norm)
            .collect();
        Ok(KzCoefficients { m, k, weights })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Window half-width `k(m-1)/2`; the window spans `[-h, h]`.
    pub fn half_width(&self) -> usize {
        self.k * (self.m - 1) / 2
    }

    /// Weight at signed offset `u`, with `|u| <= half_width()`.
    pub fn weight(&self, u: isize) -> f64 {
        let h = self.half_width() as isize;
        self.weights[usize::try_from(u + h).expect("offset within window")]
    }

    /// Weights indexed from `u = -half_width()` upward.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Parameters of one KZFT pass: window length, iterations, center frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KzftConfig {
    m: usize,
    k: usize,
    freq: f64,
}

impl KzftConfig {
    /// Validates `m` odd, `k >= 1`, and `0 < freq <= 1/2`.
    pub fn new(m: usize, k: usize, freq: f64) -> Result<Self> {
        validate_window(m, k)?;
        if !(freq > 0.0 && freq <= 0.5) {
            return Err(Error::InvalidArgument(format!(
                "center frequency {freq} must lie in (0, 0.5]"
            )));
        }
        Ok(KzftConfig { m, k, freq })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn freq(&self) -> f64 {
        self.freq
    }

    /// Observations lost on each side of the series.
    pub fn margin(&self) -> usize {
        self.k * (self.m - 1) / 2
    }

    /// Smallest series length the filter can be applied to.
    pub fn min_input_len(&self) -> usize {
        self.k * (self.m - 1) + 1
    }
}

/// The complex band-pass output of one KZFT pass.
///
/// `complex[i]` corresponds to absolute day `valid_start + i` of the input
/// series; the window margins at both ends are dropped rather than padded.
#[derive(Debug, Clone)]
pub struct FilteredComponent {
    config: KzftConfig,
    valid_start: usize,
    complex: Vec<Complex64>,
}

impl FilteredComponent {
    pub fn config(&self) -> &KzftConfig {
        &self.config
    }

    /// Absolute index of the first filtered day in the input series.
    pub fn valid_start(&self) -> usize {
        self.valid_start
    }

    /// One past the absolute index of the last filtered day.
    pub fn valid_end(&self) -> usize {
        self.valid_start + self.complex.len()
    }

    /// Number of filtered days.
    pub fn len(&self) -> usize {
        self.complex.len()
    }

    pub fn is_empty(&self) -> bool {
        self.complex.is_empty()
    }

    pub fn complex_values(&self) -> &[Complex64] {
        &self.complex
    }
}

/// Applies the KZFT filter, returning the complex component on the valid range.
///
/// Fails with [`Error::InsufficientData`] when the series cannot cover even a
/// single centered window.
pub fn kzft_apply(values: &[f64], config: KzftConfig) -> Result<FilteredComponent> {
    let n = values.len();
    if n < config.min_input_len() {
        return Err(Error::insufficient(
            format!("kzft m={} k={}", config.m(), config.k()),
            config.min_input_len(),
            n,
        ));
    }
    let coeffs = KzCoefficients::new(config.m(), config.k())?;
    let half = coeffs.half_width() as isize;
    // Kernel entry j corresponds to offset u = j - half.
    let kernel: Vec<Complex64> = coeffs
        .weights()
        .iter()
        .enumerate()
        .map(|(j, &w)| {
            let u = j as isize - half;
            w * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * config.freq() * u as f64)
        })
        .collect();
    let n_valid = n - 2 * half as usize;
    let complex: Vec<Complex64> = (0..n_valid)
        .into_par_iter()
        .map(|i| {
            kernel
                .iter()
                .zip(&values[i..i + kernel.len()])
                .map(|(kj, &x)| kj * x)
                .sum()
        })
        .collect();
    Ok(FilteredComponent {
        config,
        valid_start: half as usize,
        complex,
    })
}

/// Reconstructs the real periodic component: twice the real part of the
/// complex band-pass output, day by day.
pub fn reconstruct_real(component: &FilteredComponent) -> Vec<f64> {
    component.complex.iter().map(|c| 2.0 * c.re).collect()
}

/// Squared-magnitude transfer function of the k-iterated length-m filter at
/// frequency offset `delta` from the center.
///
/// Equals `(sin(pi m delta) / (m sin(pi delta)))^(2k)`, extended by its limit
/// value 1 at integer `delta` where the ratio is 0/0.
pub fn transfer_gain(m: usize, k: usize, delta: f64) -> f64 {
    let denom = (std::f64::consts::PI * delta).sin();
    if denom.abs() < 1e-12 {
        return 1.0;
    }
    let ratio = (std::f64::consts::PI * m as f64 * delta).sin() / (m as f64 * denom);
    ratio.powi(2 * k as i32)
}

/// Window selection for separating two frequencies.
///
/// Returns `(m, m_star)` where `m_star = 4 / |v1 - v2|` and `m` is the
/// smallest odd integer strictly greater than `m_star`.
pub fn select_window(v1: f64, v2: f64) -> Result<(usize, f64)> {
    if !v1.is_finite() || !v2.is_finite() {
        return Err(Error::InvalidArgument(
            "window selection frequencies must be finite".into(),
        ));
    }
    window_from_gap((v1 - v2).abs())
}

/// Window selection from a frequency gap: `m_star = 4 / gap`, rounded up to
/// the next odd integer. The gap is the distance to the nearest frequency
/// the filter must separate from.
pub fn window_from_gap(gap: f64) -> Result<(usize, f64)> {
    if !gap.is_finite() || gap <= 0.0 {
        return Err(Error::InvalidArgument(
            "window selection requires a positive frequency gap".into(),
        ));
    }
    let m_star = 4.0 / gap;
    Ok((next_odd_above(m_star)?, m_star))
}

/// One leakage-driven widening step: the smallest odd integer strictly
/// greater than `1.5 * m_star`.
pub fn widen_window(m_star: f64) -> Result<usize> {
    next_odd_above(1.5 * m_star)
}

fn next_odd_above(x: f64) -> Result<usize> {
    if !x.is_finite() || !(0.0..=1e9).contains(&x) {
        return Err(Error::InvalidArgument(format!(
            "window size {x} out of range"
        )));
    }
    let mut candidate = x.floor() as usize + 1;
    if candidate.is_multiple_of(2) {
        candidate += 1;
    }
    Ok(candidate)
}

/// Outcome of checking a reconstructed component for spectral leakage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeakageReport {
    /// True when the component is spectrally clean (or carries no energy).
    pub pass: bool,
    /// True when the component has essentially no energy at all.
    pub zero_energy: bool,
    /// Fourier-grid frequency nearest the target.
    pub target_freq: f64,
    /// Periodogram power at the target bin.
    pub target_power: f64,
    /// Largest power among bins further than the exclusion radius from the
    /// target.
    pub max_off_target_power: f64,
}

impl LeakageReport {
    /// Off-target to target power ratio; infinite if the target bin is empty
    /// while off-target bins are not.
    pub fn ratio(&self) -> f64 {
        if self.max_off_target_power == 0.0 {
            0.0
        } else {
            self.max_off_target_power / self.target_power
        }
    }
}

/// Checks how much periodogram power a reconstructed component carries away
/// from its target frequency `v`.
///
/// Bins within `2/n` of `v` count as on-target (the main lobe of a clean
/// component); the check passes when every other bin stays below `threshold`
/// times the power of the bin nearest `v`. A component with (numerically)
/// zero total energy passes with `zero_energy` set.
pub fn leakage_check(real_values: &[f64], v: f64, threshold: f64) -> Result<LeakageReport> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "leakage threshold {threshold} must lie strictly between 0 and 1"
        )));
    }
    if real_values.len() < 4 {
        return Err(Error::insufficient("leakage check", 4, real_values.len()));
    }
    let n = real_values.len() as f64;
    let total_energy: f64 = real_values.iter().map(|x| x * x).sum();
    let pgram = spectral::periodogram(real_values)?;
    let freqs = pgram.frequencies();
    let powers = pgram.powers();
    let target_idx = freqs
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| {
            let da = (*a - v).abs();
            let db = (*b - v).abs();
            da.partial_cmp(&db).expect("finite frequencies")
        })
        .map(|(i, _)| i)
        .expect("periodogram has at least one bin");
    let radius = 2.0 / n;
    let max_off_target_power = freqs
        .iter()
        .zip(powers)
        .filter(|(f, _)| (**f - v).abs() > radius)
        .map(|(_, p)| *p)
        .fold(0.0_f64, f64::max);
    let target_power = powers[target_idx];
    // A component whose values are all ~0 has nothing to leak; treat the
    // floating-point dust as clean rather than dividing by it.
    let zero_energy = total_energy <= 1e-12 * n;
    let pass = zero_energy || max_off_target_power <= threshold * target_power;
    Ok(LeakageReport {
        pass,
        zero_energy,
        target_freq: freqs[target_idx],
        target_power,
        max_off_target_power,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn single_pass_coefficients_are_uniform() {
        let c = kz_integer_coefficients(5, 1).unwrap();
        assert_eq!(c, vec![big(1); 5]);
    }

    #[test]
    fn two_pass_coefficients_form_a_triangle() {
        let c = kz_integer_coefficients(3, 2).unwrap();
        assert_eq!(c, [1, 2, 3, 2, 1].map(big).to_vec());
        let c = kz_integer_coefficients(5, 2).unwrap();
        assert_eq!(c, [1, 2, 3, 4, 5, 4, 3, 2, 1].map(big).to_vec());
    }

    #[test]
    fn rejects_even_window_and_zero_args() {
        assert!(matches!(
            kz_integer_coefficients(4, 2),
            Err(Error::EvenWindow { m: 4 })
        ));
        assert!(kz_integer_coefficients(0, 1).is_err());
        assert!(kz_integer_coefficients(3, 0).is_err());
        assert!(KzftConfig::new(3, 1, 0.0).is_err());
        assert!(KzftConfig::new(3, 1, 0.6).is_err());
    }

    #[test]
    fn normalized_weights_sum_to_one() {
        let c = KzCoefficients::new(7, 3).unwrap();
        let sum: f64 = c.weights().iter().sum();
        assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-12);
        assert_eq!(c.weights().len(), 3 * 6 + 1);
        assert_eq!(c.half_width(), 9);
        assert_abs_diff_eq!(c.weight(-9), c.weight(9), epsilon = 0.0);
    }

    #[test]
    fn coefficients_symmetric_and_sum_to_m_pow_k_up_to_101() {
        for m in (1..=101usize).step_by(2) {
            for k in 1..=4usize {
                let c = kz_integer_coefficients(m, k).unwrap();
                assert_eq!(c.len(), k * (m - 1) + 1);
                for i in 0..c.len() {
                    assert_eq!(c[i], c[c.len() - 1 - i], "m={m} k={k} index {i}");
                }
                let sum: BigUint = c.iter().sum();
                assert_eq!(sum, BigUint::from(m).pow(k as u32), "m={m} k={k}");
                assert!(c.iter().all(|x| *x > BigUint::from(0u32)));
            }
        }
    }

    proptest! {

        #[test]
        fn filter_is_linear(seed in 0u64..1000) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = 64;
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let combo: Vec<f64> = x.iter().zip(&y).map(|(a, b)| 2.0 * a - 0.5 * b).collect();
            let cfg = KzftConfig::new(7, 2, 0.2).unwrap();
            let fx = kzft_apply(&x, cfg).unwrap();
            let fy = kzft_apply(&y, cfg).unwrap();
            let fc = kzft_apply(&combo, cfg).unwrap();
            for i in 0..fc.len() {
                let expected = 2.0 * fx.complex_values()[i] - 0.5 * fy.complex_values()[i];
                prop_assert!((fc.complex_values()[i] - expected).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn matches_direct_convolution_sum() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let n = 40;
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let (m, k, v) = (5, 2, 0.21);
        let f = kzft_apply(&x, KzftConfig::new(m, k, v).unwrap()).unwrap();
        // Independent oracle: the filter definition written out as an
        // explicit double sum over signed offsets.
        let coeffs = KzCoefficients::new(m, k).unwrap();
        let h = coeffs.half_width() as isize;
        for (i, c) in f.complex_values().iter().enumerate() {
            let t = (i + f.valid_start()) as isize;
            let mut expected = num_complex::Complex64::new(0.0, 0.0);
            for u in -h..=h {
                let w = coeffs.weight(u);
                let phase = Complex64::from_polar(1.0, -2.0 * PI * v * u as f64);
                expected += w * phase * x[(t + u) as usize];
            }
            assert!((c - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn identity_when_m_and_k_are_one() {
        let x = [1.0, -2.0, 3.5, 0.25];
        let f = kzft_apply(&x, KzftConfig::new(1, 1, 0.25).unwrap()).unwrap();
        assert_eq!(f.valid_start(), 0);
        for (c, &v) in f.complex_values().iter().zip(&x) {
            assert_abs_diff_eq!(c.re, v, epsilon = 0.0);
            assert_abs_diff_eq!(c.im, 0.0, epsilon = 0.0);
        }
    }

    #[test]
    fn on_center_cosine_has_half_modulus() {
        let v = 0.125;
        let n = 400;
        let x: Vec<f64> = (0..n).map(|t| (2.0 * PI * v * t as f64).cos()).collect();
        let f = kzft_apply(&x, KzftConfig::new(33, 2, v).unwrap()).unwrap();
        // The negative-frequency image passes with amplitude B(2v)/2, which
        // bounds how far the modulus can sit from 1/2.
        let image = 0.5 * transfer_gain(33, 2, 2.0 * v).sqrt();
        for c in f.complex_values() {
            assert!((c.norm() - 0.5).abs() <= image + 1e-9);
        }
    }

    #[test]
    fn constant_series_is_rejected() {
        let x = vec![3.0; 300];
        let cfg = KzftConfig::new(61, 2, 0.1).unwrap();
        let f = kzft_apply(&x, cfg).unwrap();
        let bound = 3.0 * transfer_gain(61, 2, 0.1).sqrt();
        for c in f.complex_values() {
            assert!(c.norm() <= bound + 1e-12);
        }
    }

    #[test]
    fn too_short_series_errors() {
        let cfg = KzftConfig::new(7, 2, 0.1).unwrap();
        assert_eq!(cfg.min_input_len(), 13);
        let err = kzft_apply(&[0.0; 12], cfg).unwrap_err();
        assert!(matches!(
            err,
            Error::InsufficientData {
                required: 13,
                actual: 12,
                ..
            }
        ));
        assert!(kzft_apply(&[0.0; 13], cfg).is_ok());
    }

    #[test]
    fn reconstruction_recovers_on_center_cosine() {
        let v = 1.0 / 7.0;
        let n = 700;
        let x: Vec<f64> = (0..n).map(|t| (2.0 * PI * v * t as f64).cos()).collect();
        let f = kzft_apply(&x, KzftConfig::new(29, 2, v).unwrap()).unwrap();
        let real = reconstruct_real(&f);
        let start = f.valid_start();
        let worst = real
            .iter()
            .enumerate()
            .map(|(i, &y)| (y - x[start + i]).abs())
            .fold(0.0_f64, f64::max);
        // Image leakage bounds the reconstruction error for a clean cosine.
        let image = transfer_gain(29, 2, 2.0 * v).sqrt();
        assert!(worst <= image + 1e-9, "worst error {worst}, bound {image}");
        let rmse = (real
            .iter()
            .enumerate()
            .map(|(i, &y)| (y - x[start + i]).powi(2))
            .sum::<f64>()
            / real.len() as f64)
            .sqrt();
        assert!(rmse <= 0.02, "rmse {rmse}");
    }

    #[test]
    fn reconstruction_preserves_phase() {
        let v = 0.11;
        let phase_in = 0.8;
        let n = 900;
        let x: Vec<f64> = (0..n)
            .map(|t| (2.0 * PI * v * t as f64 + phase_in).cos())
            .collect();
        let f = kzft_apply(&x, KzftConfig::new(41, 2, v).unwrap()).unwrap();
        let real = reconstruct_real(&f);
        // Least squares sinusoid fit on the output to extract its phase.
        let (mut xc, mut xs) = (0.0, 0.0);
        for (i, &y) in real.iter().enumerate() {
            let t = (i + f.valid_start()) as f64;
            xc += y * (2.0 * PI * v * t).cos();
            xs += y * (2.0 * PI * v * t).sin();
        }
        let phase_out = (-xs).atan2(xc);
        let mut diff = phase_out - phase_in;
        while diff > PI {
            diff -= 2.0 * PI;
        }
        while diff < -PI {
            diff += 2.0 * PI;
        }
        assert!(diff.abs() < 0.01, "phase error {diff}");
    }

    #[test]
    fn zero_series_reconstructs_to_zero() {
        let f = kzft_apply(&[0.0; 50], KzftConfig::new(7, 2, 0.2).unwrap()).unwrap();
        assert!(reconstruct_real(&f).iter().all(|&y| y == 0.0));
    }

    #[test]
    fn transfer_gain_matches_direct_evaluation() {
        assert_abs_diff_eq!(transfer_gain(11, 2, 0.0), 1.0, epsilon = 0.0);
        assert_abs_diff_eq!(transfer_gain(11, 2, 1.0), 1.0, epsilon = 0.0);
        assert_abs_diff_eq!(transfer_gain(11, 2, 1.0 / 11.0), 0.0, epsilon = 1e-25);
        let delta = 0.5 / 11.0;
        let expected = ((PI * 11.0 * delta).sin() / (11.0 * (PI * delta).sin())).powi(4);
        assert_abs_diff_eq!(transfer_gain(11, 2, delta), expected, epsilon = 1e-15);
        // Direct evaluation of the closed form at m=5, k=2, delta=0.05:
        // (sin(0.25 pi) / (5 sin(0.05 pi)))^4.
        assert_abs_diff_eq!(transfer_gain(5, 2, 0.05), 0.6679288860676675, epsilon = 1e-12);
    }

    #[test]
    fn empirical_gain_follows_transfer_law() {
        let (m, k, v) = (11, 2, 0.2);
        let n = 600;
        for &delta in &[0.0, 0.3 / 11.0, 1.0 / 11.0, 2.5 / 11.0] {
            let lam = v + delta;
            let x: Vec<f64> = (0..n).map(|t| (2.0 * PI * lam * t as f64).cos()).collect();
            let f = kzft_apply(&x, KzftConfig::new(m, k, v).unwrap()).unwrap();
            let real = reconstruct_real(&f);
            let amp = fitted_amplitude(&real, lam, f.valid_start());
            let gain = transfer_gain(m, k, delta);
            assert!(
                (amp * amp - gain).abs() < 0.02,
                "delta {delta}: amp^2 {} vs gain {gain}",
                amp * amp
            );
        }
    }

    /// Least squares amplitude of a sinusoid at frequency `lam` fitted to
    /// `values`, whose first entry sits at absolute day `start`.
    fn fitted_amplitude(values: &[f64], lam: f64, start: usize) -> f64 {
        let (mut cc, mut cs, mut ss, mut xc, mut xs) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (i, &y) in values.iter().enumerate() {
            let t = (start + i) as f64;
            let c = (2.0 * PI * lam * t).cos();
            let s = (2.0 * PI * lam * t).sin();
            cc += c * c;
            cs += c * s;
            ss += s * s;
            xc += y * c;
            xs += y * s;
        }
        let det = cc * ss - cs * cs;
        if det.abs() < 1e-9 {
            // Degenerate design (lam at 0 or 1/2); fall back to cosine-only.
            return xc / cc;
        }
        let a = (xc * ss - xs * cs) / det;
        let b = (xs * cc - xc * cs) / det;
        (a * a + b * b).sqrt()
    }

    #[test]
    fn window_selection_examples() {
        let (m, m_star) = select_window(1.0 / 7.0, 1.0 / 30.0).unwrap();
        assert_eq!(m, 37);
        assert_abs_diff_eq!(m_star, 840.0 / 23.0, epsilon = 1e-9);
        let (m, _) = select_window(0.5, 0.25).unwrap();
        assert_eq!(m, 17);
        let (m, _) = select_window(1.0 / 365.0, 2.0 / 365.0).unwrap();
        assert_eq!(m, 1461);
    }

    #[test]
    fn window_selection_rejects_equal_frequencies() {
        assert!(select_window(0.1, 0.1).is_err());
        assert!(select_window(f64::NAN, 0.1).is_err());
    }

    #[test]
    fn widening_examples() {
        assert_eq!(widen_window(1460.0).unwrap(), 2191);
        assert_eq!(widen_window(4.0).unwrap(), 7);
        assert_eq!(widen_window(840.0 / 23.0).unwrap(), 55);
    }

    #[test]
    fn selected_window_is_always_odd_and_above_m_star() {
        for &(v1, v2) in &[
            (1.0 / 7.0, 2.0 / 7.0),
            (1.0 / 365.0, 1.0 / 366.0),
            (0.1234, 0.1),
            (0.5, 0.499),
        ] {
            let (m, m_star) = select_window(v1, v2).unwrap();
            assert_eq!(m % 2, 1);
            assert!(m as f64 > m_star);
            assert!((m as f64) - m_star <= 2.0);
        }
    }

    #[test]
    fn leakage_clean_cosine_passes() {
        let v = 1.0 / 7.0;
        let n = 700;
        let x: Vec<f64> = (0..n).map(|t| (2.0 * PI * v * t as f64).cos()).collect();
        let report = leakage_check(&x, v, DEFAULT_LEAKAGE_THRESHOLD).unwrap();
        assert!(report.pass);
        assert!(!report.zero_energy);
        assert_abs_diff_eq!(report.target_freq, 100.0 / 700.0, epsilon = 1e-12);
    }

    #[test]
    fn leakage_contaminated_series_fails() {
        let v = 1.0 / 7.0;
        let n = 700;
        let x: Vec<f64> = (0..n)
            .map(|t| {
                let t = t as f64;
                (2.0 * PI * v * t).cos() + 0.9 * (2.0 * PI * t / 30.0).cos()
            })
            .collect();
        let report = leakage_check(&x, v, DEFAULT_LEAKAGE_THRESHOLD).unwrap();
        assert!(!report.pass);
        assert!(report.ratio() > DEFAULT_LEAKAGE_THRESHOLD);
    }

    #[test]
    fn undersized_window_leaks_second_tone() {
        let v = 1.0 / 7.0;
        let two_tones = |n: usize| -> Vec<f64> {
            (0..n)
                .map(|t| {
                    let t = t as f64;
                    (2.0 * PI * v * t).cos() + (4.0 * PI * v * t).cos()
                })
                .collect()
        };
        // An m=3 window is far too short to separate tones at 1/7 and 2/7,
        // so the filtered output fails the leakage check. The input length
        // makes the valid length 700, putting both tones on the grid.
        let f = kzft_apply(&two_tones(704), KzftConfig::new(3, 2, v).unwrap()).unwrap();
        let report = leakage_check(&reconstruct_real(&f), v, DEFAULT_LEAKAGE_THRESHOLD).unwrap();
        assert!(!report.pass, "ratio {}", report.ratio());

        // A properly sized window separates the tones cleanly (valid length
        // again 700 after the larger margins).
        let (m, _) = select_window(v, 2.0 * v).unwrap();
        let f = kzft_apply(&two_tones(756), KzftConfig::new(m, 2, v).unwrap()).unwrap();
        let report = leakage_check(&reconstruct_real(&f), v, DEFAULT_LEAKAGE_THRESHOLD).unwrap();
        assert!(report.pass, "ratio {}", report.ratio());
    }

    #[test]
    fn leakage_zero_series_passes_with_flag() {
        let report = leakage_check(&[0.0; 100], 0.1, DEFAULT_LEAKAGE_THRESHOLD).unwrap();
        assert!(report.pass);
        assert!(report.zero_energy);
    }
}
