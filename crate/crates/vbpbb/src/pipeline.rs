//! End-to-end drivers: single-component runs, the unfiltered comparator,
//! aggregation into combined bands, and the full `analyze` pipeline.
//!
//! A *component* is one periodic constituent of the series, named by a target
//! frequency `j/P`. The series is bandpass-filtered around that frequency,
//! the reconstructed component is resampled with the phase-stratified
//! periodic block bootstrap, and the per-phase percentile band decides
//! whether the component rises above noise (no horizontal line fits inside
//! the band). Replicates of several significant components can then be
//! summed, replicate by replicate, into a combined band for the joint
//! periodic structure.

use rayon::prelude::*;

use crate::bootstrap::{self, BootstrapEnsemble, CiBand, CrestTrough};
use crate::error::{Error, Result};
use crate::freq::Frequency;
use crate::kz::{self, KzftConfig, LeakageReport};
use crate::rng;
use crate::series::{self, LinearTrend, TimeSeries};
use crate::spectral::{self, PeakList, Periodogram};

/// Default number of bootstrap replicates.
pub const DEFAULT_REPLICATES: usize = 1000;
/// Default confidence level for percentile bands.
pub const DEFAULT_LEVEL: f64 = 0.95;
/// Default number of filter iterations.
pub const DEFAULT_SMOOTHNESS: usize = 2;
/// Default number of periodogram peaks reported by [`analyze`].
pub const DEFAULT_TOP_PEAKS: usize = 10;

/// One periodic component to isolate and bootstrap.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentSpec {
    /// Name used in file names, report rows, and error messages.
    pub label: String,
    /// Target frequency in cycles per observation.
    pub freq: Frequency,
    /// Explicit filter window length; `None` selects one automatically.
    pub m: Option<usize>,
    /// Number of filter iterations.
    pub k: usize,
}

impl ComponentSpec {
    /// A component with automatic window selection and the default number of
    /// filter iterations.
    pub fn new(label: impl Into<String>, freq: Frequency) -> Self {
        Self {
            label: label.into(),
            freq,
            m: None,
            k: DEFAULT_SMOOTHNESS,
        }
    }

    /// Pins the filter window length instead of selecting one automatically.
    pub fn with_window(mut self, m: usize) -> Self {
        self.m = Some(m);
        self
    }

    /// Overrides the number of filter iterations.
    pub fn with_iterations(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    /// Stratification period: the fundamental period of the target
    /// frequency. A harmonic `j/P` is periodic at `P`, so every harmonic of
    /// the same fundamental shares one stratification.
    pub fn period(&self) -> usize {
        self.freq.period() as usize
    }
}

/// Bootstrap and banding parameters shared by every component in a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunParams {
    /// Number of bootstrap replicates per component.
    pub replicates: usize,
    /// Confidence level of the percentile bands, strictly between 0 and 1.
    pub level: f64,
    /// Master seed; every random stream in the run derives from it.
    pub seed: u64,
    /// Maximum tolerated off-target periodogram power, as a fraction of the
    /// power at the target frequency.
    pub leakage_threshold: f64,
    /// Series position that should carry phase 0, for all periods. `None`
    /// anchors phase 0 at the first position of each (possibly trimmed)
    /// series, which is the natural choice when phases need no calendar
    /// meaning.
    pub anchor: Option<i64>,
}

impl Default for RunParams {
    fn default() -> Self {
        Self {
            replicates: DEFAULT_REPLICATES,
            level: DEFAULT_LEVEL,
            seed: 0,
            leakage_threshold: kz::DEFAULT_LEAKAGE_THRESHOLD,
            anchor: None,
        }
    }
}

impl RunParams {
    /// Phase-partition offset for a trimmed series whose first element sits
    /// at `start` in the original indexing.
    fn offset_for(&self, start: usize, period: usize) -> usize {
        match self.anchor {
            None => 0,
            Some(a) => (start as i64 - a).rem_euclid(period as i64) as usize,
        }
    }
}

/// Picks a filter window for `freq` given the other frequencies analyzed in
/// the same run.
///
/// The window must be long enough to resolve the target from its nearest
/// spectral neighbor. Candidate neighbors are the target's own harmonic
/// ladder, spaced `1/P` apart, and any other component frequency in the run;
/// the smallest of those distances sets the required resolution. Returns the
/// chosen odd window length together with the unrounded minimum it was
/// derived from.
pub fn auto_window(freq: Frequency, neighbors: &[f64]) -> Result<(usize, f64)> {
    let v = freq.value();
    let mut gap = 1.0 / freq.period() as f64;
    for &f in neighbors {
        let d = (f - v).abs();
        if d > 0.0 && d < gap {
            gap = d;
        }
    }
    kz::window_from_gap(gap)
}

/// Everything produced for one component: the reconstructed series, its
/// bootstrap ensemble and band, and the significance verdict.
#[derive(Debug, Clone)]
pub struct ComponentResult {
    pub spec: ComponentSpec,
    /// Window length actually used, after any widening.
    pub m: usize,
    /// Unrounded minimum window the selection started from.
    pub m_star: f64,
    /// Whether the window was widened after a failed leakage check.
    pub widened: bool,
    /// Leakage diagnostics for the final window. A report that still fails
    /// after widening marks the component as spectrally contaminated; the
    /// result is returned anyway so callers can decide what to do with it.
    pub leakage: LeakageReport,
    /// First position of the input covered by the filtered output.
    pub valid_start: usize,
    /// One past the last covered position.
    pub valid_end: usize,
    /// Reconstructed real-valued component over the valid range.
    pub values: Vec<f64>,
    pub ensemble: BootstrapEnsemble,
    pub band: CiBand,
    pub crest_trough: CrestTrough,
    /// Whether no horizontal line fits inside the band.
    pub significant: bool,
    /// Mean comparator band width divided by this band's mean width, filled
    /// in when a comparator run accompanies the component.
    pub width_ratio_vs_comparator: Option<f64>,
}

impl ComponentResult {
    /// Length of the valid (filtered) range.
    pub fn valid_len(&self) -> usize {
        self.valid_end - self.valid_start
    }
}

/// Isolates one periodic component of `values` and bootstraps it.
///
/// The input is filtered at the component's target frequency, with the
/// window either given explicitly or selected from the run's frequency
/// layout (`neighbors` lists every component frequency in the run; the
/// target itself is ignored). If the reconstructed component fails the
/// leakage check, the window is widened once and the filter re-applied; a
/// check that still fails is recorded in the result rather than raised,
/// since a noisy series with no structure at the target frequency is a
/// legitimate input. The filtered range is then partitioned by the
/// fundamental period and resampled `params.replicates` times.
///
/// Random draws come from streams derived from `params.seed` and the
/// component label, so results do not depend on thread count and two
/// components with different labels resample independently.
pub fn vbpbb_component(
    values: &[f64],
    spec: &ComponentSpec,
    neighbors: &[f64],
    params: &RunParams,
) -> Result<ComponentResult> {
    let v = spec.freq.value();
    let (m0, m_star) = match spec.m {
        Some(m) => (m, m as f64),
        None => auto_window(spec.freq, neighbors)?,
    };

    let filtered = kz::kzft_apply(values, KzftConfig::new(m0, spec.k, v)?)?;
    let mut m = m0;
    let mut widened = false;
    let mut real = kz::reconstruct_real(&filtered);
    let mut valid_start = filtered.valid_start();
    let mut leakage = kz::leakage_check(&real, v, params.leakage_threshold)?;
    if !leakage.pass {
        let wider = kz::widen_window(m_star)?;
        let refiltered = kz::kzft_apply(values, KzftConfig::new(wider, spec.k, v)?)?;
        real = kz::reconstruct_real(&refiltered);
        valid_start = refiltered.valid_start();
        leakage = kz::leakage_check(&real, v, params.leakage_threshold)?;
        m = wider;
        widened = true;
    }

    let p = spec.period();
    let partition = bootstrap::partition_phases(real.len(), p, params.offset_for(valid_start, p))?;
    let seed = rng::derive_seed(params.seed, "component", &spec.label);
    let ensemble = bootstrap::bootstrap_ensemble(&real, &partition, params.replicates, seed)?;
    let curves = bootstrap::ensemble_curves(&ensemble, &partition)?;
    let point = bootstrap::periodic_mean(&real, &partition)?;
    let band = bootstrap::ci_band(&curves, &point, params.level)?;
    let significant = bootstrap::is_significant(&band);
    let crest_trough = bootstrap::crest_trough(&band);
    let valid_end = valid_start + real.len();

    Ok(ComponentResult {
        spec: spec.clone(),
        m,
        m_star,
        widened,
        leakage,
        valid_start,
        valid_end,
        values: real,
        ensemble,
        band,
        crest_trough,
        significant,
        width_ratio_vs_comparator: None,
    })
}

/// Band for the raw, unfiltered series under the same periodic bootstrap.
///
/// This is the comparator against which the filtered band's width is judged:
/// it stratifies the full series by `period` and resamples it without any
/// frequency isolation, so every other component and all noise stay in the
/// resampled values.
#[derive(Debug, Clone)]
pub struct GsbbResult {
    pub band: CiBand,
    pub crest_trough: CrestTrough,
    pub significant: bool,
}

/// Runs the periodic block bootstrap on the unfiltered series.
///
/// Draws come from streams derived from the seed and the label under a
/// domain separate from the filtered runs, so a comparator never shares
/// draws with the component it is compared against.
pub fn gsbb_band(
    values: &[f64],
    period: usize,
    label: &str,
    params: &RunParams,
) -> Result<GsbbResult> {
    let partition = bootstrap::partition_phases(values.len(), period, params.offset_for(0, period))?;
    let seed = rng::derive_seed(params.seed, "comparator", label);
    let ensemble = bootstrap::bootstrap_ensemble(values, &partition, params.replicates, seed)?;
    let curves = bootstrap::ensemble_curves(&ensemble, &partition)?;
    let point = bootstrap::periodic_mean(values, &partition)?;
    let band = bootstrap::ci_band(&curves, &point, params.level)?;
    let significant = bootstrap::is_significant(&band);
    let crest_trough = bootstrap::crest_trough(&band);
    Ok(GsbbResult {
        band,
        crest_trough,
        significant,
    })
}

/// Several components combined into one band by summing their replicates.
#[derive(Debug, Clone)]
pub struct CombinedResult {
    /// Labels of the components that went into the combination.
    pub labels: Vec<String>,
    /// Start of the common valid range (intersection of member ranges).
    pub valid_start: usize,
    /// One past the end of the common valid range.
    pub valid_end: usize,
    /// Stratification period of the combined band.
    pub period: usize,
    /// True when the least common multiple of the member periods exceeded
    /// the common valid length and the largest member period was used
    /// instead.
    pub period_capped: bool,
    /// Pointwise sum of the members' reconstructed components.
    pub values: Vec<f64>,
    /// Replicate `b` is the pointwise sum of the members' replicate `b`.
    pub ensemble: BootstrapEnsemble,
    pub band: CiBand,
    pub crest_trough: CrestTrough,
    pub significant: bool,
}

/// Combines component results into one band for their sum.
///
/// Replicates are aligned on the intersection of the members' valid ranges
/// and summed pointwise — replicate `b` of the combination is exactly the
/// sum of every member's replicate `b`, never a fresh resampling. The
/// combined curve is stratified at the least common multiple of the member
/// periods so that every member is periodic within one combined cycle; when
/// that multiple exceeds the common range, the largest member period is used
/// instead and the result says so.
///
/// With `only_significant` set, members whose bands admit a horizontal line
/// are left out first.
pub fn vmbpbb_aggregate(
    results: &[&ComponentResult],
    only_significant: bool,
    params: &RunParams,
) -> Result<CombinedResult> {
    let members: Vec<&ComponentResult> = results
        .iter()
        .copied()
        .filter(|r| !only_significant || r.significant)
        .collect();
    if members.is_empty() {
        return Err(Error::EmptyCombination);
    }
    let b = members[0].ensemble.len();
    for r in &members {
        if r.ensemble.len() != b {
            return Err(Error::InvalidArgument(format!(
                "replicate counts differ across components: {} vs {}",
                b,
                r.ensemble.len()
            )));
        }
    }
    let start = members.iter().map(|r| r.valid_start).max().expect("nonempty");
    let end = members.iter().map(|r| r.valid_end).min().expect("nonempty");
    if end <= start {
        return Err(Error::DisjointRanges);
    }
    let n = end - start;

    let fundamentals: Vec<usize> = members.iter().map(|r| r.spec.period()).collect();
    let mut lcm: u128 = 1;
    let mut capped = false;
    for &p in &fundamentals {
        let p = p as u128;
        lcm = lcm / num_integer::gcd(lcm, p) * p;
        if lcm > n as u128 {
            capped = true;
            break;
        }
    }
    let period = if capped {
        *fundamentals.iter().max().expect("nonempty")
    } else {
        lcm as usize
    };

    let sum_slices = |b_idx: Option<usize>| -> Vec<f64> {
        let mut out = vec![0.0; n];
        for r in &members {
            let local = start - r.valid_start;
            let source = match b_idx {
                Some(i) => &r.ensemble.replicate(i)[local..local + n],
                None => &r.values[local..local + n],
            };
            for (o, s) in out.iter_mut().zip(source) {
                *o += *s;
            }
        }
        out
    };
    let values = sum_slices(None);
    let replicates: Vec<Vec<f64>> = (0..b).into_par_iter().map(|i| sum_slices(Some(i))).collect();
    let ensemble = BootstrapEnsemble::from_replicates(replicates)?;

    let partition = bootstrap::partition_phases(n, period, params.offset_for(start, period))?;
    let curves = bootstrap::ensemble_curves(&ensemble, &partition)?;
    let point = bootstrap::periodic_mean(&values, &partition)?;
    let band = bootstrap::ci_band(&curves, &point, params.level)?;
    let significant = bootstrap::is_significant(&band);
    let crest_trough = bootstrap::crest_trough(&band);

    Ok(CombinedResult {
        labels: members.iter().map(|r| r.spec.label.clone()).collect(),
        valid_start: start,
        valid_end: end,
        period,
        period_capped: capped,
        values,
        ensemble,
        band,
        crest_trough,
        significant,
    })
}

/// Options for the full [`analyze`] pipeline.
#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    /// Components to isolate and test, possibly empty.
    pub components: Vec<ComponentSpec>,
    pub params: RunParams,
    /// Remove a least-squares linear trend before any analysis.
    pub detrend: bool,
    /// Run the unfiltered comparator bootstrap for each component and
    /// report band-width ratios.
    pub comparator: bool,
    /// Number of periodogram peaks to report.
    pub top_peaks: usize,
    /// Exclusion radius around each component frequency when listing peaks;
    /// defaults to two Fourier-grid steps.
    pub exclusion_radius: Option<f64>,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self {
            components: Vec::new(),
            params: RunParams::default(),
            detrend: true,
            comparator: true,
            top_peaks: DEFAULT_TOP_PEAKS,
            exclusion_radius: None,
        }
    }
}

/// One component's outputs within an [`AnalysisReport`].
#[derive(Debug, Clone)]
pub struct ComponentAnalysis {
    /// The filtered-and-bootstrapped component, with
    /// `width_ratio_vs_comparator` filled in when the comparator ran.
    pub result: ComponentResult,
    /// The unfiltered comparator band at the component's period, if enabled.
    pub comparator: Option<GsbbResult>,
}

/// Everything the full pipeline produces for one input series.
#[derive(Debug, Clone)]
pub struct AnalysisReport {
    /// The least-squares trend removed from the input, when detrending ran.
    pub trend: Option<LinearTrend>,
    /// Periodogram of the (detrended) series.
    pub periodogram: Periodogram,
    /// Highest off-component periodogram peaks.
    pub peaks: PeakList,
    pub components: Vec<ComponentAnalysis>,
    /// Combined band over the significant components; absent when none are
    /// significant or no components were requested.
    pub combined: Option<CombinedResult>,
}

/// Runs the whole pipeline on one series.
///
/// The series is detrended (unless disabled), its periodogram and leading
/// off-component peaks are computed, each requested component is isolated
/// and bootstrapped, each gets an unfiltered comparator band when enabled,
/// and the significant components are combined into a joint band. An empty
/// component list yields a spectral report alone.
pub fn analyze(series: &TimeSeries, options: &AnalyzeOptions) -> Result<AnalysisReport> {
    let (trend, working) = if options.detrend {
        let trend = series::fit_linear_trend(series)?;
        (Some(trend), series::detrend(series, &trend))
    } else {
        (None, series.clone())
    };
    let values = working.values();

    let periodogram = spectral::periodogram(values)?;
    let component_freqs: Vec<f64> = options.components.iter().map(|c| c.freq.value()).collect();
    let radius = options
        .exclusion_radius
        .unwrap_or(2.0 / values.len() as f64);
    let peaks = spectral::top_peaks(&periodogram, options.top_peaks, &component_freqs, radius)?;

    let mut components = Vec::with_capacity(options.components.len());
    for spec in &options.components {
        let wrap = |e: Error| Error::for_component(&spec.label, e);
        let mut result =
            vbpbb_component(values, spec, &component_freqs, &options.params).map_err(wrap)?;
        let comparator = if options.comparator {
            let gsbb = gsbb_band(values, spec.period(), &spec.label, &options.params).map_err(wrap)?;
            if result.band.mean_width() > 0.0 {
                result.width_ratio_vs_comparator =
                    Some(bootstrap::band_width_ratio(&gsbb.band, &result.band).map_err(wrap)?);
            }
            Some(gsbb)
        } else {
            None
        };
        components.push(ComponentAnalysis { result, comparator });
    }

    let significant: Vec<&ComponentResult> = components
        .iter()
        .map(|c| &c.result)
        .filter(|r| r.significant)
        .collect();
    let combined = if significant.is_empty() {
        None
    } else {
        Some(vmbpbb_aggregate(&significant, true, &options.params)?)
    };

    Ok(AnalysisReport {
        trend,
        periodogram,
        peaks,
        components,
        combined,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use std::f64::consts::PI;

    fn freq(j: u32, p: u32) -> Frequency {
        Frequency::new(j, p).unwrap()
    }

    /// Deterministic cosine-plus-noise fixture.
    fn cosine_noise(n: usize, period: f64, amp: f64, sd: f64, seed: u64) -> Vec<f64> {
        let mut rng = rng::stream_rng(rng::derive_seed(seed, "test", "fixture"), 0);
        (0..n)
            .map(|t| {
                let x = amp * (2.0 * PI * t as f64 / period).cos();
                let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
                let u2: f64 = rng.gen_range(0.0..1.0);
                x + sd * (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
            })
            .collect()
    }

    #[test]
    fn auto_window_uses_own_harmonic_spacing_when_alone() {
        let (m, m_star) = auto_window(freq(1, 7), &[]).unwrap();
        assert_eq!(m, 29);
        assert_abs_diff_eq!(m_star, 28.0, epsilon = 1e-12);
        let (m, _) = auto_window(freq(1, 365), &[]).unwrap();
        assert_eq!(m, 1461);
    }

    #[test]
    fn auto_window_tightens_for_a_close_neighbor() {
        // Annual fundamental analyzed alongside its second harmonic: the
        // neighbor distance equals the harmonic spacing, so the window is
        // unchanged...
        let (m, _) = auto_window(freq(1, 365), &[1.0 / 365.0, 2.0 / 365.0]).unwrap();
        assert_eq!(m, 1461);
        // ...but a closer off-ladder frequency forces a longer window.
        let v = 1.0 / 365.0 + 1.0 / 1000.0;
        let (m_close, _) = auto_window(freq(1, 365), &[v]).unwrap();
        assert!(m_close > 1461);
    }

    #[test]
    fn auto_window_ignores_the_target_itself() {
        let (m, _) = auto_window(freq(1, 7), &[1.0 / 7.0]).unwrap();
        assert_eq!(m, 29);
    }

    #[test]
    fn strong_weekly_component_is_significant() {
        let values = cosine_noise(1400, 7.0, 1.0, 0.5, 11);
        let spec = ComponentSpec::new("weekly", freq(1, 7));
        let params = RunParams {
            replicates: 200,
            ..RunParams::default()
        };
        let result = vbpbb_component(&values, &spec, &[], &params).unwrap();
        assert!(result.significant);
        assert!(!result.widened, "strong target power should pass leakage");
        assert!(result.leakage.pass);
        assert_eq!(result.band.len(), 7);
        assert_eq!(result.m, 29);
        assert_eq!(result.valid_start, 28);
        assert_eq!(result.valid_end, 1400 - 28);
        // The per-phase point estimates should trace the cosine's crest and
        // trough near their true values.
        let ct = result.crest_trough;
        assert!(ct.crest.0 > 0.5 && ct.crest.1 < 1.5);
        assert!(ct.trough.0 > -1.5 && ct.trough.1 < -0.5);
    }

    #[test]
    fn zero_series_yields_zero_width_band_not_significant() {
        let values = vec![0.0; 400];
        let spec = ComponentSpec::new("weekly", freq(1, 7));
        let params = RunParams {
            replicates: 50,
            ..RunParams::default()
        };
        let result = vbpbb_component(&values, &spec, &[], &params).unwrap();
        assert!(!result.significant);
        assert!(result.leakage.pass);
        assert!(result.leakage.zero_energy);
        for j in 0..result.band.len() {
            assert_eq!(result.band.lower()[j], 0.0);
            assert_eq!(result.band.upper()[j], 0.0);
            assert_eq!(result.band.point()[j], 0.0);
        }
    }

    #[test]
    fn pure_noise_widens_once_and_keeps_the_failure_flag() {
        let values = cosine_noise(3000, 50.0, 0.0, 1.0, 7);
        let spec = ComponentSpec::new("fifty", freq(1, 50));
        let params = RunParams {
            replicates: 50,
            ..RunParams::default()
        };
        let result = vbpbb_component(&values, &spec, &[], &params).unwrap();
        // A flat spectrum leaves plenty of power next to the passband, so
        // the first check fails, the window is widened exactly once, and the
        // still-failing check is recorded rather than raised.
        assert!(result.widened);
        assert!(!result.leakage.pass);
        assert_eq!(result.m, 301);
        assert_eq!(result.valid_start, 300);
    }

    #[test]
    fn explicit_window_is_honored() {
        let values = cosine_noise(900, 7.0, 1.0, 0.2, 3);
        let spec = ComponentSpec::new("weekly", freq(1, 7)).with_window(51);
        let params = RunParams {
            replicates: 50,
            ..RunParams::default()
        };
        let result = vbpbb_component(&values, &spec, &[], &params).unwrap();
        assert_eq!(result.m, 51);
        assert_eq!(result.valid_start, 50);
    }

    #[test]
    fn even_explicit_window_is_rejected() {
        let values = vec![1.0; 100];
        let spec = ComponentSpec::new("weekly", freq(1, 7)).with_window(10);
        let err = vbpbb_component(&values, &spec, &[], &RunParams::default()).unwrap_err();
        assert!(matches!(err, Error::EvenWindow { m: 10 }));
    }

    #[test]
    fn too_short_series_names_the_required_length() {
        let values = vec![1.0; 40];
        let spec = ComponentSpec::new("weekly", freq(1, 7));
        let err = vbpbb_component(&values, &spec, &[], &RunParams::default()).unwrap_err();
        match err {
            Error::InsufficientData { required, actual, .. } => {
                assert_eq!(required, 57); // k(m-1)+1 at m=29, k=2
                assert_eq!(actual, 40);
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn identical_seeds_and_labels_reproduce_results_exactly() {
        let values = cosine_noise(800, 7.0, 1.0, 0.5, 19);
        let spec = ComponentSpec::new("weekly", freq(1, 7));
        let params = RunParams {
            replicates: 40,
            ..RunParams::default()
        };
        let a = vbpbb_component(&values, &spec, &[], &params).unwrap();
        let b = vbpbb_component(&values, &spec, &[], &params).unwrap();
        assert_eq!(a.ensemble.replicates(), b.ensemble.replicates());
        assert_eq!(a.band.lower(), b.band.lower());
        assert_eq!(a.band.upper(), b.band.upper());
    }

    #[test]
    fn different_labels_draw_independent_streams() {
        let values = cosine_noise(800, 7.0, 1.0, 0.5, 19);
        let params = RunParams {
            replicates: 40,
            ..RunParams::default()
        };
        let a = vbpbb_component(&values, &ComponentSpec::new("one", freq(1, 7)), &[], &params)
            .unwrap();
        let b = vbpbb_component(&values, &ComponentSpec::new("two", freq(1, 7)), &[], &params)
            .unwrap();
        assert_ne!(a.ensemble.replicates(), b.ensemble.replicates());
    }

    #[test]
    fn anchor_rotates_the_band_phases() {
        let values = cosine_noise(900, 7.0, 1.0, 0.3, 5);
        let spec = ComponentSpec::new("weekly", freq(1, 7));
        let base = RunParams {
            replicates: 60,
            ..RunParams::default()
        };
        let a = vbpbb_component(&values, &spec, &[], &base).unwrap();
        // valid_start is 28 here, a multiple of 7, so anchoring phase 0 at
        // absolute position 0 coincides with the default anchoring.
        let b = vbpbb_component(
            &values,
            &spec,
            &[],
            &RunParams {
                anchor: Some(0),
                ..base
            },
        )
        .unwrap();
        assert_eq!(a.band.point(), b.band.point());
        assert_eq!(a.band.lower(), b.band.lower());
        // Anchoring at absolute position 3 relabels phases: the stratum that
        // was phase j + 3 becomes phase j.
        let c = vbpbb_component(
            &values,
            &spec,
            &[],
            &RunParams {
                anchor: Some(3),
                ..base
            },
        )
        .unwrap();
        for j in 0..7 {
            assert_abs_diff_eq!(
                c.band.point()[j],
                a.band.point()[(j + 3) % 7],
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn gsbb_band_is_wider_than_vbpbb_on_noisy_data() {
        let values = cosine_noise(2100, 7.0, 1.0, 1.0, 23);
        let spec = ComponentSpec::new("weekly", freq(1, 7));
        let params = RunParams {
            replicates: 100,
            ..RunParams::default()
        };
        let vb = vbpbb_component(&values, &spec, &[], &params).unwrap();
        let gs = gsbb_band(&values, 7, "weekly", &params).unwrap();
        let ratio = bootstrap::band_width_ratio(&gs.band, &vb.band).unwrap();
        assert!(ratio > 1.0, "comparator band should be wider, ratio {ratio}");
    }

    #[test]
    fn single_component_aggregation_is_the_identity() {
        let values = cosine_noise(900, 7.0, 1.0, 0.4, 31);
        let spec = ComponentSpec::new("weekly", freq(1, 7));
        let params = RunParams {
            replicates: 60,
            ..RunParams::default()
        };
        let comp = vbpbb_component(&values, &spec, &[], &params).unwrap();
        let combined = vmbpbb_aggregate(&[&comp], false, &params).unwrap();
        assert_eq!(combined.labels, vec!["weekly".to_string()]);
        assert_eq!(combined.valid_start, comp.valid_start);
        assert_eq!(combined.valid_end, comp.valid_end);
        assert_eq!(combined.period, 7);
        assert!(!combined.period_capped);
        assert_eq!(combined.values, comp.values);
        assert_eq!(combined.ensemble.replicates(), comp.ensemble.replicates());
        assert_eq!(combined.band.lower(), comp.band.lower());
        assert_eq!(combined.band.upper(), comp.band.upper());
    }

    #[test]
    fn negated_component_cancels_exactly() {
        let values = cosine_noise(900, 7.0, 1.0, 0.4, 37);
        let negated: Vec<f64> = values.iter().map(|x| -x).collect();
        let spec = ComponentSpec::new("weekly", freq(1, 7));
        let params = RunParams {
            replicates: 60,
            ..RunParams::default()
        };
        // Same label and seed: both runs draw identical resampling indices,
        // so the replicates are exact negatives of each other.
        let plus = vbpbb_component(&values, &spec, &[], &params).unwrap();
        let minus = vbpbb_component(&negated, &spec, &[], &params).unwrap();
        let combined = vmbpbb_aggregate(&[&plus, &minus], false, &params).unwrap();
        for r in combined.ensemble.replicates() {
            assert!(r.iter().all(|&x| x == 0.0));
        }
        assert!(combined.band.lower().iter().all(|&x| x == 0.0));
        assert!(combined.band.upper().iter().all(|&x| x == 0.0));
        assert!(!combined.significant);
    }

    #[test]
    fn aggregation_rejects_empty_and_mismatched_inputs() {
        let values = cosine_noise(900, 7.0, 1.0, 0.4, 41);
        let spec = ComponentSpec::new("weekly", freq(1, 7));
        let params_a = RunParams {
            replicates: 30,
            ..RunParams::default()
        };
        let params_b = RunParams {
            replicates: 31,
            ..RunParams::default()
        };
        let a = vbpbb_component(&values, &spec, &[], &params_a).unwrap();
        let b = vbpbb_component(&values, &spec, &[], &params_b).unwrap();
        assert!(matches!(
            vmbpbb_aggregate(&[], false, &params_a).unwrap_err(),
            Error::EmptyCombination
        ));
        assert!(matches!(
            vmbpbb_aggregate(&[&a, &b], false, &params_a).unwrap_err(),
            Error::InvalidArgument(_)
        ));
        // Only non-significant members plus the significant-only flag also
        // leaves the combination empty.
        let zero = vec![0.0; 900];
        let flat = vbpbb_component(&zero, &spec, &[], &params_a).unwrap();
        assert!(matches!(
            vmbpbb_aggregate(&[&flat], true, &params_a).unwrap_err(),
            Error::EmptyCombination
        ));
    }

    #[test]
    fn aggregation_rejects_disjoint_ranges() {
        let values = cosine_noise(900, 7.0, 1.0, 0.4, 43);
        let spec = ComponentSpec::new("weekly", freq(1, 7));
        let params = RunParams {
            replicates: 30,
            ..RunParams::default()
        };
        let a = vbpbb_component(&values, &spec, &[], &params).unwrap();
        let mut b = a.clone();
        b.valid_start += 900;
        b.valid_end += 900;
        assert!(matches!(
            vmbpbb_aggregate(&[&a, &b], false, &params).unwrap_err(),
            Error::DisjointRanges
        ));
    }

    #[test]
    fn combined_period_is_the_lcm_until_it_exceeds_the_range() {
        let mut values = cosine_noise(2000, 7.0, 1.0, 0.3, 47);
        for (t, v) in values.iter_mut().enumerate() {
            *v += 0.8 * (2.0 * PI * t as f64 / 30.0).cos();
        }
        let params = RunParams {
            replicates: 40,
            ..RunParams::default()
        };
        let weekly = vbpbb_component(
            &values,
            &ComponentSpec::new("weekly", freq(1, 7)),
            &[1.0 / 7.0, 1.0 / 30.0],
            &params,
        )
        .unwrap();
        let monthly = vbpbb_component(
            &values,
            &ComponentSpec::new("monthly", freq(1, 30)),
            &[1.0 / 7.0, 1.0 / 30.0],
            &params,
        )
        .unwrap();
        let combined = vmbpbb_aggregate(&[&weekly, &monthly], false, &params).unwrap();
        assert_eq!(combined.period, 210);
        assert!(!combined.period_capped);

        // Shrink the common range below the least common multiple: the
        // period falls back to the largest member fundamental.
        let mut narrow = weekly.clone();
        narrow.valid_start = monthly.valid_start;
        narrow.valid_end = monthly.valid_start + 150;
        narrow.values = weekly.values[..150].to_vec();
        let short = vmbpbb_aggregate(&[&narrow, &monthly], false, &params).unwrap();
        assert_eq!(short.period, 30);
        assert!(short.period_capped);
    }

    #[test]
    fn analyze_with_no_components_reports_spectra_only() {
        let series = TimeSeries::new(cosine_noise(600, 7.0, 1.0, 0.5, 53)).unwrap();
        let report = analyze(&series, &AnalyzeOptions::default()).unwrap();
        assert!(report.components.is_empty());
        assert!(report.combined.is_none());
        assert!(report.trend.is_some());
        assert!(!report.peaks.peaks().is_empty());
    }

    #[test]
    fn analyze_attaches_component_labels_to_errors() {
        let series = TimeSeries::new(cosine_noise(100, 7.0, 1.0, 0.5, 59)).unwrap();
        let options = AnalyzeOptions {
            components: vec![ComponentSpec::new("annual", freq(1, 365))],
            ..AnalyzeOptions::default()
        };
        let err = analyze(&series, &options).unwrap_err();
        match err {
            Error::Component { label, source } => {
                assert_eq!(label, "annual");
                assert!(matches!(*source, Error::InsufficientData { .. }));
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn analyze_runs_components_comparators_and_combination() {
        let series = TimeSeries::new(cosine_noise(1400, 7.0, 1.0, 0.5, 61)).unwrap();
        let options = AnalyzeOptions {
            components: vec![ComponentSpec::new("weekly", freq(1, 7))],
            params: RunParams {
                replicates: 100,
                ..RunParams::default()
            },
            ..AnalyzeOptions::default()
        };
        let report = analyze(&series, &options).unwrap();
        assert_eq!(report.components.len(), 1);
        let comp = &report.components[0];
        assert!(comp.result.significant);
        assert!(comp.comparator.is_some());
        assert!(comp.result.width_ratio_vs_comparator.unwrap() > 1.0);
        let combined = report.combined.as_ref().unwrap();
        assert_eq!(combined.labels, vec!["weekly".to_string()]);
        assert_eq!(combined.ensemble.replicates(), comp.result.ensemble.replicates());
    }

    #[test]
    fn analyze_without_comparator_leaves_ratios_empty() {
        let series = TimeSeries::new(cosine_noise(900, 7.0, 1.0, 0.5, 67)).unwrap();
        let options = AnalyzeOptions {
            components: vec![ComponentSpec::new("weekly", freq(1, 7))],
            comparator: false,
            params: RunParams {
                replicates: 50,
                ..RunParams::default()
            },
            ..AnalyzeOptions::default()
        };
        let report = analyze(&series, &options).unwrap();
        let comp = &report.components[0];
        assert!(comp.comparator.is_none());
        assert!(comp.result.width_ratio_vs_comparator.is_none());
    }

    #[test]
    fn analyze_excludes_component_frequencies_from_peaks() {
        // A strong weekly tone is the only structure; with the weekly
        // frequency excluded, the reported peaks must all lie elsewhere.
        let series = TimeSeries::new(cosine_noise(1400, 7.0, 1.0, 0.2, 71)).unwrap();
        let options = AnalyzeOptions {
            components: vec![ComponentSpec::new("weekly", freq(1, 7))],
            params: RunParams {
                replicates: 20,
                ..RunParams::default()
            },
            ..AnalyzeOptions::default()
        };
        let report = analyze(&series, &options).unwrap();
        let radius = 2.0 / 1400.0;
        for peak in report.peaks.peaks() {
            assert!((peak.frequency - 1.0 / 7.0).abs() > radius);
        }
    }
}
