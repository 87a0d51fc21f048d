//! CSV ingestion and report writers.
//!
//! Input series arrive as daily CSV files with a `date,value` or
//! `date,count,population` header; dates must advance exactly one day per
//! row, since every downstream stage assumes uniform sampling. All outputs
//! are plain CSV with fixed headers. Numbers are written with Rust's default
//! float formatting (shortest exact round-trip), which keeps repeated runs
//! byte-identical.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use chrono::NaiveDate;

use crate::bootstrap::{BootstrapEnsemble, CiBand};
use crate::error::{Error, Result};
use crate::pipeline::{AnalysisReport, ComponentAnalysis};
use crate::series::{self, TimeSeries};
use crate::spectral::{PeakList, Periodogram};
use crate::synth::CoverageReport;

/// A parsed input file: the series plus the calendar date of its first row.
#[derive(Debug, Clone, PartialEq)]
pub struct IngestedSeries {
    pub series: TimeSeries,
    pub start_date: NaiveDate,
}

/// Which input layout a file uses, decided by its header row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum InputLayout {
    /// `date,value`: values used as-is.
    Value,
    /// `date,count,population`: converted to rates per 100,000.
    CountPopulation,
}

/// Reads a daily series from a CSV file.
///
/// See [`read_series`] for the accepted layouts.
pub fn read_series_path(path: impl AsRef<Path>) -> Result<IngestedSeries> {
    read_series(File::open(path)?)
}

/// Reads a daily series from any reader.
///
/// The header must be `date,value` or `date,count,population`. Dates are
/// ISO-8601 (`2006-07-28`) and must be strictly consecutive days; a count
/// row is converted to a rate per 100,000 of its population. Errors carry
/// 1-based line numbers, counting the header as line 1.
pub fn read_series(input: impl Read) -> Result<IngestedSeries> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(input);

    let mut records = reader.records();
    let header = match records.next() {
        Some(h) => h?,
        None => return Err(Error::EmptySeries),
    };
    let names: Vec<String> = header.iter().map(|f| f.trim().to_lowercase()).collect();
    let layout = match names
        .iter()
        .map(String::as_str)
        .collect::<Vec<_>>()
        .as_slice()
    {
        ["date", "value"] => InputLayout::Value,
        ["date", "count", "population"] => InputLayout::CountPopulation,
        _ => {
            return Err(Error::MalformedRow {
                line: 1,
                reason: format!(
                    "unrecognized header {:?}; expected \"date,value\" or \"date,count,population\"",
                    names.join(",")
                ),
            })
        }
    };
    let expected_fields = match layout {
        InputLayout::Value => 2,
        InputLayout::CountPopulation => 3,
    };

    let mut start_date = None;
    let mut prev_date: Option<NaiveDate> = None;
    let mut values = Vec::new();
    for (i, record) in records.enumerate() {
        let line = i + 2;
        let record = record?;
        if record.len() != expected_fields {
            return Err(Error::MalformedRow {
                line,
                reason: format!(
                    "expected {expected_fields} fields, found {} (column {})",
                    record.len(),
                    record.len() + 1
                ),
            });
        }
        let date = parse_date(record[0].trim(), line)?;
        if let Some(prev) = prev_date {
            let expected = prev + chrono::Days::new(1);
            if date != expected {
                return Err(Error::DateGap {
                    line,
                    expected: expected.to_string(),
                    found: date.to_string(),
                });
            }
        } else {
            start_date = Some(date);
        }
        prev_date = Some(date);

        let value = match layout {
            InputLayout::Value => parse_field(record[1].trim(), line, 2, "value")?,
            InputLayout::CountPopulation => {
                let count = parse_field(record[1].trim(), line, 2, "count")?;
                let population = parse_field(record[2].trim(), line, 3, "population")?;
                series::rate_per_100k(count, population).map_err(|e| Error::MalformedRow {
                    line,
                    reason: format!("column 2-3: {e}"),
                })?
            }
        };
        values.push(value);
    }

    let start_date = start_date.ok_or(Error::EmptySeries)?;
    Ok(IngestedSeries {
        series: TimeSeries::new(values)?,
        start_date,
    })
}

fn parse_date(text: &str, line: usize) -> Result<NaiveDate> {
    text.parse().map_err(|_| Error::MalformedRow {
        line,
        reason: format!("column 1: {text:?} is not an ISO-8601 date"),
    })
}

fn parse_field(text: &str, line: usize, column: usize, name: &str) -> Result<f64> {
    let value: f64 = text.parse().map_err(|_| Error::MalformedRow {
        line,
        reason: format!("column {column}: {name} {text:?} is not a number"),
    })?;
    if !value.is_finite() {
        return Err(Error::MalformedRow {
            line,
            reason: format!("column {column}: {name} {text:?} is not finite"),
        });
    }
    Ok(value)
}

/// Writes a series in the `date,value` input layout, so generated data can
/// be fed straight back into analysis.
pub fn write_series(out: impl Write, series: &TimeSeries, start_date: NaiveDate) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["date", "value"])?;
    for (i, v) in series.values().iter().enumerate() {
        let date = start_date + chrono::Days::new(i as u64);
        w.write_record([date.to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes a series as `t,value` rows, `t` being the absolute day index.
pub fn write_detrended(out: impl Write, series: &TimeSeries) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "value"])?;
    for (i, v) in series.values().iter().enumerate() {
        let t = series.start_index() + i as i64;
        w.write_record([t.to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes a reconstructed component as `t,real_component` rows; `t` starts
/// at the first valid (untrimmed) position.
pub fn write_filtered(out: impl Write, valid_start: usize, values: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "real_component"])?;
    for (i, v) in values.iter().enumerate() {
        w.write_record([(valid_start + i).to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the full Fourier grid as `frequency,power` rows.
pub fn write_periodogram(out: impl Write, pgram: &Periodogram) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["frequency", "power"])?;
    for (f, p) in pgram.frequencies().iter().zip(pgram.powers()) {
        w.write_record([f.to_string(), p.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes ranked peaks as `rank,frequency,period_days,power` rows.
pub fn write_peaks(out: impl Write, peaks: &PeakList) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["rank", "frequency", "period_days", "power"])?;
    for (i, peak) in peaks.peaks().iter().enumerate() {
        w.write_record([
            (i + 1).to_string(),
            peak.frequency.to_string(),
            (1.0 / peak.frequency).to_string(),
            peak.power.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes a confidence band as `phase,lower,point,upper` rows.
pub fn write_band(out: impl Write, band: &CiBand) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["phase", "lower", "point", "upper"])?;
    for j in 0..band.len() {
        w.write_record([
            j.to_string(),
            band.lower()[j].to_string(),
            band.point()[j].to_string(),
            band.upper()[j].to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes a bootstrap ensemble as one matrix: a `t` column followed by one
/// column per replicate.
pub fn write_ensemble_matrix(
    out: impl Write,
    valid_start: usize,
    ensemble: &BootstrapEnsemble,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string()];
    header.extend((0..ensemble.len()).map(|b| format!("r{b}")));
    w.write_record(&header)?;
    let n = ensemble.replicate(0).len();
    for i in 0..n {
        let mut row = Vec::with_capacity(ensemble.len() + 1);
        row.push((valid_start + i).to_string());
        for b in 0..ensemble.len() {
            row.push(ensemble.replicate(b)[i].to_string());
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes per-component coverage rows as
/// `method,component,mean_coverage,mean_width,trials`.
pub fn write_coverage(out: impl Write, report: &CoverageReport) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["method", "component", "mean_coverage", "mean_width", "trials"])?;
    for row in &report.rows {
        w.write_record([
            row.method.to_string(),
            row.component.clone(),
            row.mean_coverage.to_string(),
            row.mean_width.to_string(),
            row.trials.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Formats a crest or trough interval for the summary table: fixed three
/// decimals, with a trailing `*` when the band is significant.
fn summary_interval(interval: (f64, f64), significant: bool) -> String {
    let star = if significant { "*" } else { "" };
    format!("({:.3}, {:.3}){star}", interval.0, interval.1)
}

/// Writes the per-component summary table.
///
/// Columns: component label, target frequency, window, iterations, crest
/// and trough intervals for the filtered band and for the unfiltered
/// comparator (starred when significant), and the comparator-to-filtered
/// band width ratio. Comparator cells stay empty when the comparator did
/// not run; the ratio also stays empty when the filtered band has zero
/// width.
pub fn write_summary(out: impl Write, components: &[ComponentAnalysis]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "component",
        "v",
        "m",
        "k",
        "vbpbb_crest",
        "vbpbb_trough",
        "gsbb_crest",
        "gsbb_trough",
        "ratio_gsbb_vbpbb",
    ])?;
    for c in components {
        let r = &c.result;
        let (gsbb_crest, gsbb_trough) = match &c.comparator {
            Some(g) => (
                summary_interval(g.crest_trough.crest, g.significant),
                summary_interval(g.crest_trough.trough, g.significant),
            ),
            None => (String::new(), String::new()),
        };
        let ratio = r
            .width_ratio_vs_comparator
            .map(|x| format!("{x:.1}"))
            .unwrap_or_default();
        w.write_record([
            r.spec.label.clone(),
            r.spec.freq.to_string(),
            r.m.to_string(),
            r.spec.k.to_string(),
            summary_interval(r.crest_trough.crest, r.significant),
            summary_interval(r.crest_trough.trough, r.significant),
            gsbb_crest,
            gsbb_trough,
            ratio,
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// How (and whether) to persist bootstrap ensembles next to the bands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnsembleOutput {
    /// Do not write replicate values.
    #[default]
    None,
    /// One matrix file per component: `ensemble_<label>.csv`.
    Matrix,
    /// One file per replicate: `ensemble_<label>/replicate_<b>.csv`.
    PerReplicate,
}

/// Replaces every non-alphanumeric character with `_` so a label can sit
/// inside a file name.
pub fn sanitize_label(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect()
}

/// Writes every file of an analysis run into `dir`.
///
/// Produces `summary.csv`, `periodogram.csv`, `peaks.csv`, one
/// `band_<label>.csv` per component, `combined_band.csv` when a combined
/// band exists, and replicate values per [`EnsembleOutput`]. Returns the
/// list of file names written, in writing order.
pub fn write_analysis_outputs(
    dir: impl AsRef<Path>,
    report: &AnalysisReport,
    ensembles: EnsembleOutput,
) -> Result<Vec<String>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut create = |name: &str| -> Result<BufWriter<File>> {
        written.push(name.to_string());
        Ok(BufWriter::new(File::create(dir.join(name))?))
    };

    write_summary(create("summary.csv")?, &report.components)?;
    write_periodogram(create("periodogram.csv")?, &report.periodogram)?;
    write_peaks(create("peaks.csv")?, &report.peaks)?;
    for c in &report.components {
        let label = sanitize_label(&c.result.spec.label);
        write_band(create(&format!("band_{label}.csv"))?, &c.result.band)?;
    }
    if let Some(combined) = &report.combined {
        write_band(create("combined_band.csv")?, &combined.band)?;
    }

    match ensembles {
        EnsembleOutput::None => {}
        EnsembleOutput::Matrix => {
            for c in &report.components {
                let label = sanitize_label(&c.result.spec.label);
                write_ensemble_matrix(
                    create(&format!("ensemble_{label}.csv"))?,
                    c.result.valid_start,
                    &c.result.ensemble,
                )?;
            }
        }
        EnsembleOutput::PerReplicate => {
            for c in &report.components {
                let label = sanitize_label(&c.result.spec.label);
                let subdir = dir.join(format!("ensemble_{label}"));
                std::fs::create_dir_all(&subdir)?;
                for b in 0..c.result.ensemble.len() {
                    let name = format!("ensemble_{label}/replicate_{b}.csv");
                    written.push(name.clone());
                    let file = BufWriter::new(File::create(dir.join(&name))?);
                    write_filtered(file, c.result.valid_start, c.result.ensemble.replicate(b))?;
                }
            }
        }
    }
    Ok(written)
}
