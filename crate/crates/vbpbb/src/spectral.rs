//! Periodogram estimation and dominant-peak extraction.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Raw periodogram of a real series on the positive Fourier grid.
///
/// Bin `j` (1-based, up to `floor(n/2)`) sits at frequency `j/n` cycles per
/// observation and carries power `|X_j|^2 / n`, where `X` is the unnormalized
/// discrete Fourier transform. No tapering or smoothing is applied.
#[derive(Debug, Clone, PartialEq)]
pub struct Periodogram {
    n: usize,
    frequencies: Vec<f64>,
    powers: Vec<f64>,
}

impl Periodogram {
    /// Length of the analyzed series.
    pub fn series_len(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.powers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.powers.is_empty()
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn powers(&self) -> &[f64] {
        &self.powers
    }

    /// Index of the grid frequency nearest `v`.
    pub fn nearest_bin(&self, v: f64) -> usize {
        self.frequencies
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                let da = (*a - v).abs();
                let db = (*b - v).abs();
                da.partial_cmp(&db).expect("finite frequencies")
            })
            .map(|(i, _)| i)
            .expect("periodogram has at least one bin")
    }
}

/// Computes the periodogram of `values` at frequencies `j/n`, `j = 1..n/2`.
///
/// The DC bin is omitted: bins at `j >= 1` are unaffected by the series mean,
/// and the trend carries no phase information relevant here.
pub fn periodogram(values: &[f64]) -> Result<Periodogram> {
    let n = values.len();
    if n < 4 {
        return Err(Error::insufficient("periodogram", 4, n));
    }
    let mut buffer: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buffer);
    let bins = n / 2;
    let n_f = n as f64;
    let frequencies = (1..=bins).map(|j| j as f64 / n_f).collect();
    let powers = (1..=bins).map(|j| buffer[j].norm_sqr() / n_f).collect();
    Ok(Periodogram {
        n,
        frequencies,
        powers,
    })
}

/// A dominant periodogram peak.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub frequency: f64,
    pub power: f64,
}

/// Dominant peaks in descending power order.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakList {
    peaks: Vec<Peak>,
    truncated: bool,
}

impl PeakList {
    pub fn peaks(&self) -> &[Peak] {
        &self.peaks
    }

    /// True when fewer eligible peaks existed than were requested.
    pub fn truncated(&self) -> bool {
        self.truncated
    }
}

/// Extracts up to `count` local periodogram maxima by descending power.
///
/// A bin qualifies as a peak when its power is at least that of both grid
/// neighbors (one neighbor at the grid edges). Bins within `radius` of any
/// excluded frequency are skipped — used to hunt for unexplained cycles after
/// known components are accounted for.
pub fn top_peaks(
    pgram: &Periodogram,
    count: usize,
    excluded: &[f64],
    radius: f64,
) -> Result<PeakList> {
    if radius < 0.0 || !radius.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "exclusion radius {radius} must be finite and non-negative"
        )));
    }
    let powers = pgram.powers();
    let freqs = pgram.frequencies();
    let last = powers.len() - 1;
    let mut candidates: Vec<Peak> = (0..powers.len())
        .filter(|&i| {
            let left_ok = i == 0 || powers[i] >= powers[i - 1];
            let right_ok = i == last || powers[i] >= powers[i + 1];
            left_ok && right_ok
        })
        .filter(|&i| excluded.iter().all(|&ex| (freqs[i] - ex).abs() > radius))
        .map(|i| Peak {
            frequency: freqs[i],
            power: powers[i],
        })
        .collect();
    candidates.sort_by(|a, b| {
        b.power
            .partial_cmp(&a.power)
            .expect("finite powers")
            .then(a.frequency.partial_cmp(&b.frequency).expect("finite"))
    });
    let truncated = candidates.len() < count;
    candidates.truncate(count);
    Ok(PeakList {
        peaks: candidates,
        truncated,
    })
}
