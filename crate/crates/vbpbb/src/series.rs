//! Daily time series, rate computation, and linear detrending.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A uniformly sampled series indexed by day `t = 0, 1, ..., n-1`.
///
/// `start_index` records where day 0 of this series sits on some external
/// day axis (e.g. a filtered series that lost its leading margin), without
/// affecting any computation indexed relative to the series itself.
/// Construction guarantees the series is non-empty and every value finite.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    start_index: i64,
    values: Vec<f64>,
}

impl TimeSeries {
    /// Wraps raw values starting at day offset 0.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::with_start(0, values)
    }

    /// Wraps raw values whose first entry sits at external day `start_index`.
    pub fn with_start(start_index: i64, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(TimeSeries {
            start_index,
            values,
        })
    }

    pub fn start_index(&self) -> i64 {
        self.start_index
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Arithmetic mean of the series.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Population standard deviation of the series.
    pub fn sd(&self) -> f64 {
        let mean = self.mean();
        (self
            .values
            .iter()
            .map(|v| (v - mean) * (v - mean))
            .sum::<f64>()
            / self.values.len() as f64)
            .sqrt()
    }
}

/// An ordinary least squares line `value ≈ intercept + slope * t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearTrend {
    pub intercept: f64,
    pub slope: f64,
}

impl LinearTrend {
    /// Trend value at day `t` (relative to the start of the fitted series).
    pub fn predict(&self, t: f64) -> f64 {
        self.intercept + self.slope * t
    }
}

/// Converts one day's count into a rate per 100 000 population.
pub fn rate_per_100k(count: f64, population: f64) -> Result<f64> {
    if !population.is_finite() || population <= 0.0 {
        return Err(Error::InvalidPopulation { value: population });
    }
    if !count.is_finite() || count < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "count {count} must be finite and non-negative"
        )));
    }
    Ok(100_000.0 * count / population)
}

/// Converts a count series into rates per 100 000 for a fixed population.
pub fn compute_rate(counts: &[f64], population: f64) -> Result<TimeSeries> {
    let rates = counts
        .iter()
        .map(|&c| rate_per_100k(c, population))
        .collect::<Result<Vec<f64>>>()?;
    TimeSeries::new(rates)
}

/// Fits a least squares line over `t = 0..n-1` in closed form.
pub fn fit_linear_trend(series: &TimeSeries) -> Result<LinearTrend> {
    let n = series.len();
    if n < 2 {
        return Err(Error::insufficient("linear trend fit", 2, n));
    }
    let values = series.values();
    let n_f = n as f64;
    let t_mean = (n_f - 1.0) / 2.0;
    let x_mean = series.mean();
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (t, &x) in values.iter().enumerate() {
        let dt = t as f64 - t_mean;
        sxy += dt * (x - x_mean);
        sxx += dt * dt;
    }
    let slope = sxy / sxx;
    Ok(LinearTrend {
        intercept: x_mean - slope * t_mean,
        slope,
    })
}

/// Subtracts a fitted line from the series, returning the residuals.
pub fn detrend(series: &TimeSeries, trend: &LinearTrend) -> TimeSeries {
    let values = series
        .values()
        .iter()
        .enumerate()
        .map(|(t, &x)| x - trend.predict(t as f64))
        .collect();
    // Residuals of finite inputs under a finite line stay finite.
    TimeSeries::with_start(series.start_index(), values)
        .expect("residuals of a valid series are valid")
}
