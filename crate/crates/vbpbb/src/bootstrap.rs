//! Phase-stratified periodic block bootstrap and confidence bands.
//!
//! For a series with cycle length `p`, the day at position `i` belongs to
//! phase `(i + offset) mod p`. Resampling replaces each observation with a
//! uniform draw (with replacement) from its own phase stratum, so every
//! replicate preserves the periodic structure while shuffling what happened
//! on particular days. Summarizing each replicate by its per-phase means and
//! taking percentile envelopes across replicates yields a confidence band
//! for the mean periodic pattern.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng;

/// Source of bounded random indices for resampling.
///
/// Production draws come from a seeded generator via the blanket [`Rng`]
/// implementation; tests can substitute [`CountingSource`] to enumerate the
/// whole replicate space instead.
pub trait IndexSource {
    /// A value in `0..bound`.
    fn next_index(&mut self, bound: usize) -> usize;
}

impl<R: Rng> IndexSource for R {
    fn next_index(&mut self, bound: usize) -> usize {
        self.gen_range(0..bound)
    }
}

/// Deterministic index source that treats its counter as mixed-radix digits.
///
/// Feeding counters `0..total` (the product of all draw bounds) through one
/// resampling pass each enumerates every possible replicate exactly once.
#[derive(Debug, Clone)]
pub struct CountingSource {
    counter: u64,
}

impl CountingSource {
    pub fn new(counter: u64) -> Self {
        CountingSource { counter }
    }
}

impl IndexSource for CountingSource {
    fn next_index(&mut self, bound: usize) -> usize {
        let b = bound as u64;
        let digit = self.counter % b;
        self.counter /= b;
        digit as usize
    }
}

/// Assignment of series positions to the `p` phases of a cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhasePartition {
    n: usize,
    period: usize,
    offset: usize,
    strata: Vec<Vec<usize>>,
}

impl PhasePartition {
    pub fn series_len(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    /// Positions belonging to phase `j`.
    pub fn stratum(&self, j: usize) -> &[usize] {
        &self.strata[j]
    }

    /// Phase of series position `i`.
    pub fn phase_of(&self, i: usize) -> usize {
        (i + self.offset) % self.period
    }
}

/// Partitions positions `0..n` into `period` phase strata.
///
/// `offset` names the phase of position 0, letting a trimmed series stay
/// phase-aligned with the calendar of the untrimmed one. Every stratum must
/// receive at least one position, so `n >= period` is required.
pub fn partition_phases(n: usize, period: usize, offset: usize) -> Result<PhasePartition> {
    if period == 0 {
        return Err(Error::InvalidArgument("period must be at least 1".into()));
    }
    if n < period {
        return Err(Error::insufficient(
            format!("phase partition with period {period}"),
            period,
            n,
        ));
    }
    let offset = offset % period;
    let mut strata = vec![Vec::with_capacity(n / period + 1); period];
    for i in 0..n {
        strata[(i + offset) % period].push(i);
    }
    Ok(PhasePartition {
        n,
        period,
        offset,
        strata,
    })
}

/// Draws one bootstrap replicate: position `i` takes the value of a uniformly
/// chosen position from its own phase stratum.
///
/// Positions are filled in ascending order, one draw each, which pins the
/// mapping between a replicate and the digit sequence of a [`CountingSource`].
pub fn pbb_resample<S: IndexSource>(
    values: &[f64],
    partition: &PhasePartition,
    source: &mut S,
) -> Result<Vec<f64>> {
    if values.len() != partition.n {
        return Err(Error::InvalidArgument(format!(
            "series length {} does not match partition length {}",
            values.len(),
            partition.n
        )));
    }
    let replicate = (0..values.len())
        .map(|i| {
            let stratum = partition.stratum(partition.phase_of(i));
            values[stratum[source.next_index(stratum.len())]]
        })
        .collect();
    Ok(replicate)
}

/// A collection of bootstrap replicates of one series.
#[derive(Debug, Clone)]
pub struct BootstrapEnsemble {
    replicates: Vec<Vec<f64>>,
}

impl BootstrapEnsemble {
    pub fn from_replicates(replicates: Vec<Vec<f64>>) -> Result<Self> {
        if replicates.is_empty() {
            return Err(Error::InvalidArgument(
                "ensemble needs at least one replicate".into(),
            ));
        }
        let n = replicates[0].len();
        if replicates.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument(
                "replicates have unequal lengths".into(),
            ));
        }
        Ok(BootstrapEnsemble { replicates })
    }

    pub fn len(&self) -> usize {
        self.replicates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.replicates.is_empty()
    }

    pub fn replicates(&self) -> &[Vec<f64>] {
        &self.replicates
    }

    pub fn replicate(&self, b: usize) -> &[f64] {
        &self.replicates[b]
    }
}

/// Generates `b` seeded replicates in parallel.
///
/// Replicate `i` draws from stream `i` of `seed`, so the result is identical
/// whatever the thread count or scheduling order.
pub fn bootstrap_ensemble(
    values: &[f64],
    partition: &PhasePartition,
    b: usize,
    seed: [u8; 32],
) -> Result<BootstrapEnsemble> {
    if b == 0 {
        return Err(Error::InvalidArgument(
            "replicate count must be at least 1".into(),
        ));
    }
    let replicates = (0..b)
        .into_par_iter()
        .map(|i| {
            let mut stream = rng::stream_rng(seed, i as u64);
            pbb_resample(values, partition, &mut stream)
        })
        .collect::<Result<Vec<_>>>()?;
    BootstrapEnsemble::from_replicates(replicates)
}

/// Per-phase means of one series under a phase partition.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicMeanCurve {
    values: Vec<f64>,
}

impl PeriodicMeanCurve {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, phase: usize) -> f64 {
        self.values[phase]
    }
}

/// Averages the series within each phase stratum.
pub fn periodic_mean(values: &[f64], partition: &PhasePartition) -> Result<PeriodicMeanCurve> {
    if values.len() != partition.n {
        return Err(Error::InvalidArgument(format!(
            "series length {} does not match partition length {}",
            values.len(),
            partition.n
        )));
    }
    let curve = (0..partition.period())
        .map(|j| {
            let stratum = partition.stratum(j);
            stratum.iter().map(|&i| values[i]).sum::<f64>() / stratum.len() as f64
        })
        .collect();
    Ok(PeriodicMeanCurve { values: curve })
}

/// Periodic mean curve of every replicate in an ensemble.
pub fn ensemble_curves(
    ensemble: &BootstrapEnsemble,
    partition: &PhasePartition,
) -> Result<Vec<PeriodicMeanCurve>> {
    ensemble
        .replicates()
        .par_iter()
        .map(|r| periodic_mean(r, partition))
        .collect()
}

/// A pointwise percentile confidence band around a periodic mean curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CiBand {
    level: f64,
    point: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl CiBand {
    /// Assembles a band from explicit per-phase limits.
    ///
    /// Useful for reconstructing a band from published interval values. All
    /// three vectors must have equal nonzero length and satisfy
    /// `lower <= upper` phase by phase.
    pub fn from_limits(
        level: f64,
        point: Vec<f64>,
        lower: Vec<f64>,
        upper: Vec<f64>,
    ) -> Result<Self> {
        if !(level > 0.0 && level < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "confidence level {level} must lie strictly between 0 and 1"
            )));
        }
        if point.is_empty() || point.len() != lower.len() || point.len() != upper.len() {
            return Err(Error::InvalidArgument(
                "band limit vectors must share one nonzero length".into(),
            ));
        }
        if lower.iter().zip(&upper).any(|(lo, up)| lo > up) {
            return Err(Error::InvalidArgument(
                "band has lower limit above upper limit".into(),
            ));
        }
        Ok(CiBand {
            level,
            point,
            lower,
            upper,
        })
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    /// Number of phases.
    pub fn len(&self) -> usize {
        self.point.len()
    }

    pub fn is_empty(&self) -> bool {
        self.point.is_empty()
    }

    /// The observed periodic mean curve the band surrounds.
    pub fn point(&self) -> &[f64] {
        &self.point
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Average of `upper - lower` across phases.
    pub fn mean_width(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, up)| up - lo)
            .sum::<f64>()
            / self.len() as f64
    }
}

/// Linear-interpolation sample quantile (type 7) of pre-sorted data.
fn quantile_type7(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    let h = (n - 1) as f64 * q;
    let lo = h.floor() as usize;
    if lo + 1 >= n {
        return sorted[n - 1];
    }
    sorted[lo] + (h - lo as f64) * (sorted[lo + 1] - sorted[lo])
}

/// Builds the percentile band: per phase, the `(1±level)/2` type-7 quantiles
/// of the replicate curves around the observed `point` curve.
///
/// Requires at least two replicate curves, all with the same phase count as
/// `point`, and a confidence level strictly between 0 and 1.
pub fn ci_band(curves: &[PeriodicMeanCurve], point: &PeriodicMeanCurve, level: f64) -> Result<CiBand> {
    if curves.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "confidence band needs at least 2 replicate curves, got {}",
            curves.len()
        )));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "confidence level {level} must lie strictly between 0 and 1"
        )));
    }
    let p = point.len();
    if curves.iter().any(|c| c.len() != p) {
        return Err(Error::InvalidArgument(
            "replicate curves and point curve have unequal phase counts".into(),
        ));
    }
    let q_lo = (1.0 - level) / 2.0;
    let q_hi = 1.0 - q_lo;
    let mut lower = Vec::with_capacity(p);
    let mut upper = Vec::with_capacity(p);
    let mut column = vec![0.0; curves.len()];
    for j in 0..p {
        for (b, curve) in curves.iter().enumerate() {
            column[b] = curve.value(j);
        }
        column.sort_by(|a, b| a.partial_cmp(b).expect("finite curve values"));
        lower.push(quantile_type7(&column, q_lo));
        upper.push(quantile_type7(&column, q_hi));
    }
    Ok(CiBand {
        level,
        point: point.values().to_vec(),
        lower,
        upper,
    })
}

/// Horizontal-line significance test.
///
/// The periodic pattern is declared real when no constant level fits inside
/// the band at every phase, i.e. when the smallest upper limit falls below
/// the largest lower limit.
pub fn is_significant(band: &CiBand) -> bool {
    let min_upper = band
        .upper
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let max_lower = band
        .lower
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    min_upper < max_lower
}

/// Ratio of mean band widths, `numerator / denominator`.
///
/// Both bands must cover the same number of phases. A zero-width denominator
/// leaves the ratio undefined and is reported as an error rather than an
/// infinity so callers cannot silently propagate it into summaries.
pub fn band_width_ratio(numerator: &CiBand, denominator: &CiBand) -> Result<f64> {
    if numerator.point.len() != denominator.point.len() {
        return Err(Error::InvalidArgument(format!(
            "band width ratio requires matching periods, got {} and {}",
            numerator.point.len(),
            denominator.point.len()
        )));
    }
    let d = denominator.mean_width();
    if d == 0.0 {
        return Err(Error::InvalidArgument(
            "band width ratio undefined: denominator band has zero mean width".into(),
        ));
    }
    Ok(numerator.mean_width() / d)
}

/// Crest and trough of a banded periodic pattern.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrestTrough {
    pub crest_phase: usize,
    /// Confidence interval at the crest phase.
    pub crest: (f64, f64),
    pub trough_phase: usize,
    /// Confidence interval at the trough phase.
    pub trough: (f64, f64),
}

/// Locates the highest and lowest phases of the observed curve and reports
/// the band limits there. Ties resolve to the earliest phase.
pub fn crest_trough(band: &CiBand) -> CrestTrough {
    let mut crest_phase = 0;
    let mut trough_phase = 0;
    for (j, &v) in band.point.iter().enumerate() {
        if v > band.point[crest_phase] {
            crest_phase = j;
        }
        if v < band.point[trough_phase] {
            trough_phase = j;
        }
    }
    CrestTrough {
        crest_phase,
        crest: (band.lower[crest_phase], band.upper[crest_phase]),
        trough_phase,
        trough: (band.lower[trough_phase], band.upper[trough_phase]),
    }
}
