//! Synthetic signal generation and Monte Carlo coverage evaluation.
//!
//! The generator builds series of the form
//! `intercept + slope·t + Σ_c amplitude_c·cos(2π v_c t + φ_c) + noise`,
//! keeping the noiseless parts around as ground truth. The coverage
//! evaluator repeats a full band construction over many independently seeded
//! trials and reports how often the bands contain the truth and how wide
//! they are — the check that stands in for real data whose generating
//! process is unknown.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::bootstrap;
use crate::error::{Error, Result};
use crate::freq::Frequency;
use crate::kz::{self, KzftConfig};
use crate::pipeline::{self, ComponentSpec, RunParams};
use crate::rng;
use crate::series::TimeSeries;

/// One cosine term of a synthetic signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthComponent {
    pub freq: Frequency,
    pub amplitude: f64,
    /// Phase offset in radians.
    pub phase: f64,
}

impl SynthComponent {
    pub fn new(freq: Frequency, amplitude: f64, phase: f64) -> Self {
        Self {
            freq,
            amplitude,
            phase,
        }
    }

    /// Value of this term at time `t`.
    pub fn value(&self, t: f64) -> f64 {
        self.amplitude * (2.0 * std::f64::consts::PI * self.freq.value() * t + self.phase).cos()
    }
}

/// Recipe for a synthetic series.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    /// Number of observations.
    pub n: usize,
    /// Linear trend intercept.
    pub intercept: f64,
    /// Linear trend slope per observation.
    pub slope: f64,
    /// Cosine components summed into the signal.
    pub components: Vec<SynthComponent>,
    /// Standard deviation of the additive Gaussian noise; zero for a
    /// noiseless series.
    pub noise_sd: f64,
    /// Seed for the noise stream.
    pub seed: u64,
}

impl SynthSpec {
    /// A component-free, noise-free, flat spec to build on.
    pub fn flat(n: usize) -> Self {
        Self {
            n,
            intercept: 0.0,
            slope: 0.0,
            components: Vec::new(),
            noise_sd: 0.0,
            seed: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::EmptySeries);
        }
        if !(self.noise_sd >= 0.0 && self.noise_sd.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "noise sd {} must be finite and non-negative",
                self.noise_sd
            )));
        }
        for x in [self.intercept, self.slope] {
            if !x.is_finite() {
                return Err(Error::InvalidArgument(
                    "trend parameters must be finite".into(),
                ));
            }
        }
        for c in &self.components {
            if !(c.amplitude.is_finite() && c.phase.is_finite()) {
                return Err(Error::InvalidArgument(
                    "component amplitude and phase must be finite".into(),
                ));
            }
        }
        Ok(())
    }
}

/// The noiseless parts of a generated series, kept for verification.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    intercept: f64,
    slope: f64,
    components: Vec<SynthComponent>,
}

impl GroundTruth {
    pub fn components(&self) -> &[SynthComponent] {
        &self.components
    }

    /// The clean signal value at `t`: trend plus every cosine term.
    pub fn clean_value(&self, t: f64) -> f64 {
        self.intercept
            + self.slope * t
            + self
                .components
                .iter()
                .map(|c| c.value(t))
                .sum::<f64>()
    }

    /// The clean signal over `0..n`.
    pub fn clean_signal(&self, n: usize) -> Vec<f64> {
        (0..n).map(|t| self.clean_value(t as f64)).collect()
    }

    /// One component's analytic curve over `0..n`.
    pub fn component_signal(&self, idx: usize, n: usize) -> Vec<f64> {
        (0..n).map(|t| self.components[idx].value(t as f64)).collect()
    }
}

/// Generates a synthetic series together with its ground truth.
///
/// The noise stream is derived from the spec's seed alone, so the same spec
/// always yields the same series.
pub fn generate(spec: &SynthSpec) -> Result<(TimeSeries, GroundTruth)> {
    spec.validate()?;
    let truth = GroundTruth {
        intercept: spec.intercept,
        slope: spec.slope,
        components: spec.components.clone(),
    };
    let mut noise = rng::stream_rng(rng::derive_seed(spec.seed, "synth", "noise"), 0);
    let values: Vec<f64> = (0..spec.n)
        .map(|t| {
            let z: f64 = noise.sample(StandardNormal);
            truth.clean_value(t as f64) + spec.noise_sd * z
        })
        .collect();
    Ok((TimeSeries::new(values)?, truth))
}

/// Band-construction method evaluated by [`coverage_eval`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Bandpass-filter each component, then periodic block bootstrap.
    Vbpbb,
    /// Periodic block bootstrap of the unfiltered series.
    Gsbb,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Vbpbb => write!(f, "vbpbb"),
            Method::Gsbb => write!(f, "gsbb"),
        }
    }
}

/// Monte Carlo summary for one component under one method.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentCoverage {
    pub method: Method,
    /// Component identifier (its frequency).
    pub component: String,
    /// Mean over trials of the fraction of phases whose band contains the
    /// truth.
    pub mean_coverage: f64,
    /// Mean over trials of the mean band width.
    pub mean_width: f64,
    pub trials: usize,
    /// Fraction of trials in which the band was flagged significant.
    pub significant_rate: f64,
}

/// Coverage results for every component of a synthetic spec.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageReport {
    pub rows: Vec<ComponentCoverage>,
}

/// Per-trial measurements for one component, before averaging.
struct TrialOutcome {
    coverage: f64,
    width: f64,
    significant: bool,
}

/// Runs `trials` independent generate-and-band rounds and summarizes how
/// the bands behave against the ground truth.
///
/// Each trial reseeds both the noise and the bootstrap from a seed derived
/// from the spec seed and the trial index, so trials are independent yet the
/// whole evaluation is reproducible. Coverage is judged pointwise per phase
/// against each method's own estimand: the filtered method is compared with
/// the stratum means of the filtered clean signal, the unfiltered method
/// with the stratum means of the clean signal itself. Judging the filtered
/// band against the raw cosine instead would charge the band for the
/// filter's deterministic gain, which no amount of resampling can see — a
/// noiseless run would then show zero-width bands missing a truth they are
/// a fraction of a percent away from.
pub fn coverage_eval(
    spec: &SynthSpec,
    method: Method,
    trials: usize,
    replicates: usize,
    level: f64,
) -> Result<CoverageReport> {
    spec.validate()?;
    if trials == 0 {
        return Err(Error::InvalidArgument(
            "coverage evaluation needs at least one trial".into(),
        ));
    }
    if spec.components.is_empty() {
        return Err(Error::InvalidArgument(
            "coverage evaluation needs at least one component".into(),
        ));
    }
    let labels: Vec<String> = spec
        .components
        .iter()
        .map(|c| c.freq.to_string())
        .collect();
    let freqs: Vec<f64> = spec.components.iter().map(|c| c.freq.value()).collect();

    let per_trial: Vec<Vec<TrialOutcome>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let trial_seed = trial_seed(spec.seed, trial);
            let trial_spec = SynthSpec {
                seed: trial_seed,
                ..spec.clone()
            };
            let (series, truth) = generate(&trial_spec)?;
            let params = RunParams {
                replicates,
                level,
                seed: trial_seed,
                ..RunParams::default()
            };
            spec.components
                .iter()
                .enumerate()
                .map(|(i, c)| trial_component(&series, &truth, c, &labels[i], &freqs, method, &params))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let rows = labels
        .iter()
        .enumerate()
        .map(|(i, label)| {
            let outcomes: Vec<&TrialOutcome> = per_trial.iter().map(|t| &t[i]).collect();
            let t = outcomes.len() as f64;
            ComponentCoverage {
                method,
                component: label.clone(),
                mean_coverage: outcomes.iter().map(|o| o.coverage).sum::<f64>() / t,
                mean_width: outcomes.iter().map(|o| o.width).sum::<f64>() / t,
                trials,
                significant_rate: outcomes.iter().filter(|o| o.significant).count() as f64 / t,
            }
        })
        .collect();
    Ok(CoverageReport { rows })
}

/// Derives a per-trial master seed from the spec seed and trial index.
fn trial_seed(seed: u64, trial: usize) -> u64 {
    let bytes = rng::derive_seed(seed, "trial", &trial.to_string());
    u64::from_le_bytes(bytes[..8].try_into().expect("eight bytes"))
}

/// One component of one trial: band, truth curve, coverage verdicts.
fn trial_component(
    series: &TimeSeries,
    truth: &GroundTruth,
    component: &SynthComponent,
    label: &str,
    freqs: &[f64],
    method: Method,
    params: &RunParams,
) -> Result<TrialOutcome> {
    let p = component.freq.period() as usize;
    let clean = truth.clean_signal(series.len());
    let (band, significant, truth_curve) = match method {
        Method::Vbpbb => {
            let spec = ComponentSpec::new(label, component.freq);
            let result = pipeline::vbpbb_component(series.values(), &spec, freqs, params)?;
            // The estimand of the filtered band: the same filter applied to
            // the noiseless signal, averaged over the same strata.
            let config = KzftConfig::new(result.m, result.spec.k, component.freq.value())?;
            let filtered_clean = kz::reconstruct_real(&kz::kzft_apply(&clean, config)?);
            let partition = bootstrap::partition_phases(filtered_clean.len(), p, 0)?;
            let curve = bootstrap::periodic_mean(&filtered_clean, &partition)?;
            (
                result.band,
                result.significant,
                curve.values().to_vec(),
            )
        }
        Method::Gsbb => {
            let result = pipeline::gsbb_band(series.values(), p, label, params)?;
            let partition = bootstrap::partition_phases(clean.len(), p, 0)?;
            let curve = bootstrap::periodic_mean(&clean, &partition)?;
            (
                result.band,
                result.significant,
                curve.values().to_vec(),
            )
        }
    };
    let covered = truth_curve
        .iter()
        .enumerate()
        .filter(|(j, truth_j)| band.lower()[*j] <= **truth_j && **truth_j <= band.upper()[*j])
        .count();
    Ok(TrialOutcome {
        coverage: covered as f64 / truth_curve.len() as f64,
        width: band.mean_width(),
        significant,
    })
}
