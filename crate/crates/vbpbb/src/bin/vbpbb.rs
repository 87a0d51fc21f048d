//! Command-line frontend for the bandpass periodic block bootstrap.
//!
//! Exit codes: 0 on success, 1 for usage errors (bad flags or arguments),
//! 2 for data errors (unreadable input, malformed CSV, gapped dates,
//! series too short, invalid configuration files).

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use vbpbb::freq::Frequency;
use vbpbb::io::{self, EnsembleOutput, IngestedSeries};
use vbpbb::kz::{self, KzftConfig};
use vbpbb::pipeline::{
    self, AnalyzeOptions, ComponentSpec, RunParams, DEFAULT_LEVEL, DEFAULT_REPLICATES,
    DEFAULT_SMOOTHNESS, DEFAULT_TOP_PEAKS,
};
use vbpbb::series::{self, TimeSeries};
use vbpbb::synth::{self, Method, SynthComponent, SynthSpec};
use vbpbb::{Error, Result};

#[derive(Parser)]
#[command(
    name = "vbpbb",
    version,
    about = "Isolate periodic components of a daily series and bootstrap confidence bands for them"
)]
struct Cli {
    /// Worker threads for parallel sections; 0 picks one per core. Changes
    /// speed only, never results.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline: detrend, spectra, per-component bands,
    /// comparator, and combined band.
    Analyze(AnalyzeArgs),
    /// Compute the periodogram and its leading peaks.
    Periodogram(PeriodogramArgs),
    /// Bandpass-filter the series at one frequency and write the
    /// reconstructed component.
    Filter(FilterArgs),
    /// Periodic block bootstrap of the (unfiltered) series at a given
    /// period.
    Bootstrap(BootstrapArgs),
    /// Generate a synthetic series with known components.
    Synth(SynthArgs),
    /// Monte Carlo coverage evaluation of band construction on synthetic
    /// data.
    Coverage(CoverageArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Input CSV (`date,value` or `date,count,population`).
    #[arg(long)]
    input: Option<PathBuf>,

    /// TOML run configuration; command-line flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Component to analyze, as `label=j/P`, with optional window and
    /// iteration overrides: `label=j/P:m=487:k=2`. Repeatable; appended
    /// after components from the configuration file.
    #[arg(long = "component", value_name = "SPEC")]
    components: Vec<String>,

    /// Master seed for every random stream in the run.
    #[arg(long)]
    seed: Option<u64>,

    /// Bootstrap replicates per component.
    #[arg(long)]
    replicates: Option<usize>,

    /// Confidence level of the bands.
    #[arg(long)]
    level: Option<f64>,

    /// Maximum off-target periodogram power as a fraction of target power.
    #[arg(long)]
    leakage_threshold: Option<f64>,

    /// Skip linear detrending.
    #[arg(long)]
    skip_detrend: bool,

    /// Skip the unfiltered comparator bootstrap.
    #[arg(long)]
    no_comparator: bool,

    /// Number of periodogram peaks to report.
    #[arg(long)]
    top_peaks: Option<usize>,

    /// Exclusion radius around component frequencies when ranking peaks.
    #[arg(long)]
    exclusion_radius: Option<f64>,

    /// Calendar date that carries phase 0 (e.g. a Monday to phase-align
    /// weekly curves). Defaults to each band's first covered day.
    #[arg(long)]
    anchor_date: Option<NaiveDate>,

    /// Whether and how to write bootstrap replicate values.
    #[arg(long, value_enum, default_value_t = EnsembleArg::None)]
    ensembles: EnsembleArg,

    /// Output directory; defaults to the configuration file's
    /// `output_dir`, then to the current directory.
    #[arg(long, env = "VBPBB_OUT_DIR")]
    out_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EnsembleArg {
    None,
    Matrix,
    PerReplicate,
}

impl From<EnsembleArg> for EnsembleOutput {
    fn from(value: EnsembleArg) -> Self {
        match value {
            EnsembleArg::None => EnsembleOutput::None,
            EnsembleArg::Matrix => EnsembleOutput::Matrix,
            EnsembleArg::PerReplicate => EnsembleOutput::PerReplicate,
        }
    }
}

#[derive(Args)]
struct PeriodogramArgs {
    /// Input CSV (`date,value` or `date,count,population`).
    #[arg(long)]
    input: PathBuf,

    /// Skip linear detrending.
    #[arg(long)]
    skip_detrend: bool,

    /// Number of peaks to report.
    #[arg(long, default_value_t = DEFAULT_TOP_PEAKS)]
    top_peaks: usize,

    /// Frequency (as `j/P`) to exclude from peak ranking. Repeatable.
    #[arg(long = "exclude", value_name = "FREQ")]
    excluded: Vec<Frequency>,

    /// Exclusion radius around excluded frequencies; defaults to two
    /// Fourier-grid steps.
    #[arg(long)]
    exclusion_radius: Option<f64>,

    /// Where to write the detrended series (`t,value`), if anywhere.
    #[arg(long)]
    detrended_output: Option<PathBuf>,

    /// Output directory for `periodogram.csv` and `peaks.csv`.
    #[arg(long, env = "VBPBB_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct FilterArgs {
    /// Input CSV (`date,value` or `date,count,population`).
    #[arg(long)]
    input: PathBuf,

    /// Center frequency as a rational, e.g. `1/365`.
    #[arg(long)]
    freq: Frequency,

    /// Filter window length (odd). Selected automatically when omitted.
    #[arg(long, value_name = "M")]
    window: Option<usize>,

    /// Filter iterations.
    #[arg(long, value_name = "K", default_value_t = DEFAULT_SMOOTHNESS)]
    iterations: usize,

    /// Skip linear detrending.
    #[arg(long)]
    skip_detrend: bool,

    /// Output CSV path (`t,real_component`).
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct BootstrapArgs {
    /// Input CSV (`date,value` or `date,count,population`).
    #[arg(long)]
    input: PathBuf,

    /// Stratification period in days.
    #[arg(long)]
    period: usize,

    /// Bootstrap replicates.
    #[arg(long, default_value_t = DEFAULT_REPLICATES)]
    replicates: usize,

    /// Confidence level of the band.
    #[arg(long, default_value_t = DEFAULT_LEVEL)]
    level: f64,

    /// Master seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Skip linear detrending.
    #[arg(long)]
    skip_detrend: bool,

    /// Output CSV path for the band (`phase,lower,point,upper`).
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    /// Number of daily observations.
    #[arg(long)]
    n: usize,

    /// Linear trend intercept.
    #[arg(long, default_value_t = 0.0)]
    intercept: f64,

    /// Linear trend slope per day.
    #[arg(long, default_value_t = 0.0)]
    slope: f64,

    /// Cosine component as `j/P[:amplitude[:phase]]`; amplitude defaults
    /// to 1, phase (radians) to 0. Repeatable.
    #[arg(long = "component", value_name = "SPEC")]
    components: Vec<String>,

    /// Standard deviation of additive Gaussian noise.
    #[arg(long, default_value_t = 0.0)]
    noise_sd: f64,

    /// Seed for the noise stream.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Calendar date of the first observation.
    #[arg(long, default_value = "2000-01-01")]
    start_date: NaiveDate,

    /// Output CSV path (`date,value`).
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct CoverageArgs {
    /// Band construction method to evaluate.
    #[arg(long, value_enum)]
    method: MethodArg,

    /// Number of independent trials.
    #[arg(long)]
    trials: usize,

    /// Bootstrap replicates per trial.
    #[arg(long, default_value_t = DEFAULT_REPLICATES)]
    replicates: usize,

    /// Confidence level of the bands.
    #[arg(long, default_value_t = DEFAULT_LEVEL)]
    level: f64,

    /// Number of daily observations per trial.
    #[arg(long)]
    n: usize,

    /// Cosine component as `j/P[:amplitude[:phase]]`. Repeatable.
    #[arg(long = "component", value_name = "SPEC", required = true)]
    components: Vec<String>,

    /// Standard deviation of additive Gaussian noise.
    #[arg(long, default_value_t = 0.0)]
    noise_sd: f64,

    /// Master seed; trials derive their own seeds from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Output CSV path (`method,component,mean_coverage,mean_width,trials`).
    #[arg(long)]
    output: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Vbpbb,
    Gsbb,
}

impl From<MethodArg> for Method {
    fn from(value: MethodArg) -> Self {
        match value {
            MethodArg::Vbpbb => Method::Vbpbb,
            MethodArg::Gsbb => Method::Gsbb,
        }
    }
}

/// TOML run configuration for `analyze`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    input: Option<PathBuf>,
    output_dir: Option<PathBuf>,
    replicates: Option<usize>,
    seed: Option<u64>,
    level: Option<f64>,
    leakage_threshold: Option<f64>,
    comparator: Option<bool>,
    detrend: Option<bool>,
    top_peaks: Option<usize>,
    exclusion_radius: Option<f64>,
    anchor_date: Option<NaiveDate>,
    #[serde(default, rename = "component")]
    components: Vec<FileComponent>,
}

/// One `[[component]]` table of the configuration file.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileComponent {
    label: String,
    frequency: Frequency,
    m: Option<usize>,
    k: Option<usize>,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };

    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
    {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: cannot build thread pool: {e}");
            std::process::exit(1);
        }
    };

    if let Err(e) = pool.install(|| run(cli.command)) {
        eprintln!("error: {e}");
        std::process::exit(2);
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Analyze(args) => run_analyze(args),
        Command::Periodogram(args) => run_periodogram(args),
        Command::Filter(args) => run_filter(args),
        Command::Bootstrap(args) => run_bootstrap(args),
        Command::Synth(args) => run_synth(args),
        Command::Coverage(args) => run_coverage(args),
    }
}

/// Reads and parses the TOML configuration file, if one was given.
fn load_config(path: Option<&Path>) -> Result<FileConfig> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path)?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// Parses `label=j/P[:m=..][:k=..]` from a `--component` flag.
fn parse_component_flag(text: &str) -> Result<ComponentSpec> {
    let bad = |reason: &str| {
        Error::InvalidArgument(format!(
            "component {text:?}: {reason}; expected label=j/P[:m=M][:k=K]"
        ))
    };
    let (label, rest) = text.split_once('=').ok_or_else(|| bad("missing '='"))?;
    if label.trim().is_empty() {
        return Err(bad("empty label"));
    }
    let mut parts = rest.split(':');
    let freq: Frequency = parts.next().ok_or_else(|| bad("missing frequency"))?.parse()?;
    let mut spec = ComponentSpec::new(label.trim(), freq);
    for part in parts {
        let (key, value) = part.split_once('=').ok_or_else(|| bad("option without '='"))?;
        match key.trim() {
            "m" => {
                spec.m = Some(value.trim().parse().map_err(|_| bad("m is not an integer"))?)
            }
            "k" => spec.k = value.trim().parse().map_err(|_| bad("k is not an integer"))?,
            other => return Err(bad(&format!("unknown option {other:?}"))),
        }
    }
    Ok(spec)
}

/// Parses `j/P[:amplitude[:phase]]` from a synth `--component` flag.
fn parse_synth_component(text: &str) -> Result<SynthComponent> {
    let bad = |reason: &str| {
        Error::InvalidArgument(format!(
            "component {text:?}: {reason}; expected j/P[:amplitude[:phase]]"
        ))
    };
    let mut parts = text.split(':');
    let freq: Frequency = parts.next().ok_or_else(|| bad("missing frequency"))?.parse()?;
    let amplitude = match parts.next() {
        Some(a) => a.trim().parse().map_err(|_| bad("amplitude is not a number"))?,
        None => 1.0,
    };
    let phase = match parts.next() {
        Some(p) => p.trim().parse().map_err(|_| bad("phase is not a number"))?,
        None => 0.0,
    };
    if parts.next().is_some() {
        return Err(bad("too many fields"));
    }
    Ok(SynthComponent::new(freq, amplitude, phase))
}

/// Maps an anchor date to an absolute day index of the ingested series.
fn anchor_index(anchor: Option<NaiveDate>, start_date: NaiveDate) -> Option<i64> {
    anchor.map(|date| (date - start_date).num_days())
}

/// Loads a series and removes its least-squares line unless told not to.
fn load_input(path: &Path, skip_detrend: bool) -> Result<(IngestedSeries, TimeSeries)> {
    let ingested = io::read_series_path(path)?;
    let working = if skip_detrend {
        ingested.series.clone()
    } else {
        let trend = series::fit_linear_trend(&ingested.series)?;
        series::detrend(&ingested.series, &trend)
    };
    Ok((ingested, working))
}

fn create_output(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn run_analyze(args: AnalyzeArgs) -> Result<()> {
    let config = load_config(args.config.as_deref())?;

    let input = args
        .input
        .or(config.input)
        .ok_or_else(|| Error::Config("no input file: pass --input or set `input`".into()))?;
    let out_dir = args
        .out_dir
        .or(config.output_dir)
        .unwrap_or_else(|| PathBuf::from("."));

    let mut components: Vec<ComponentSpec> = config
        .components
        .into_iter()
        .map(|c| ComponentSpec {
            label: c.label,
            freq: c.frequency,
            m: c.m,
            k: c.k.unwrap_or(DEFAULT_SMOOTHNESS),
        })
        .collect();
    for flag in &args.components {
        components.push(parse_component_flag(flag)?);
    }
    let mut seen = std::collections::HashSet::new();
    for c in &components {
        if !seen.insert(c.label.clone()) {
            return Err(Error::Config(format!(
                "duplicate component label {:?}; labels must be unique",
                c.label
            )));
        }
    }

    let ingested = io::read_series_path(&input)?;
    let anchor_date = args.anchor_date.or(config.anchor_date);
    let options = AnalyzeOptions {
        components,
        params: RunParams {
            replicates: args.replicates.or(config.replicates).unwrap_or(DEFAULT_REPLICATES),
            level: args.level.or(config.level).unwrap_or(DEFAULT_LEVEL),
            seed: args.seed.or(config.seed).unwrap_or(0),
            leakage_threshold: args
                .leakage_threshold
                .or(config.leakage_threshold)
                .unwrap_or(kz::DEFAULT_LEAKAGE_THRESHOLD),
            anchor: anchor_index(anchor_date, ingested.start_date),
        },
        detrend: if args.skip_detrend {
            false
        } else {
            config.detrend.unwrap_or(true)
        },
        comparator: if args.no_comparator {
            false
        } else {
            config.comparator.unwrap_or(true)
        },
        top_peaks: args.top_peaks.or(config.top_peaks).unwrap_or(DEFAULT_TOP_PEAKS),
        exclusion_radius: args.exclusion_radius.or(config.exclusion_radius),
    };

    let report = pipeline::analyze(&ingested.series, &options)?;
    for c in &report.components {
        if !c.result.leakage.pass {
            eprintln!(
                "warning: component {:?} still leaks after widening to m={} \
                 (off-target/target power {:.3}); treat its band with caution",
                c.result.spec.label,
                c.result.m,
                c.result.leakage.ratio()
            );
        }
    }
    if let Some(combined) = &report.combined {
        if combined.period_capped {
            eprintln!(
                "note: combined period capped at {} (least common multiple of member \
                 periods exceeds the {}-day common range)",
                combined.period,
                combined.valid_end - combined.valid_start
            );
        }
    }

    let written = io::write_analysis_outputs(&out_dir, &report, args.ensembles.into())?;
    for name in written {
        println!("{}", out_dir.join(name).display());
    }
    Ok(())
}

fn run_periodogram(args: PeriodogramArgs) -> Result<()> {
    let (_, working) = load_input(&args.input, args.skip_detrend)?;
    if let Some(path) = &args.detrended_output {
        io::write_detrended(create_output(path)?, &working)?;
    }
    let pgram = vbpbb::spectral::periodogram(working.values())?;
    let excluded: Vec<f64> = args.excluded.iter().map(Frequency::value).collect();
    let radius = args
        .exclusion_radius
        .unwrap_or(2.0 / working.len() as f64);
    let peaks = vbpbb::spectral::top_peaks(&pgram, args.top_peaks, &excluded, radius)?;

    std::fs::create_dir_all(&args.out_dir)?;
    let pgram_path = args.out_dir.join("periodogram.csv");
    let peaks_path = args.out_dir.join("peaks.csv");
    io::write_periodogram(create_output(&pgram_path)?, &pgram)?;
    io::write_peaks(create_output(&peaks_path)?, &peaks)?;
    println!("{}", pgram_path.display());
    println!("{}", peaks_path.display());
    Ok(())
}

fn run_filter(args: FilterArgs) -> Result<()> {
    let (_, working) = load_input(&args.input, args.skip_detrend)?;
    let m = match args.window {
        Some(m) => m,
        None => pipeline::auto_window(args.freq, &[])?.0,
    };
    let config = KzftConfig::new(m, args.iterations, args.freq.value())?;
    let filtered = kz::kzft_apply(working.values(), config)?;
    let real = kz::reconstruct_real(&filtered);
    io::write_filtered(create_output(&args.output)?, filtered.valid_start(), &real)?;
    println!("{}", args.output.display());
    Ok(())
}

fn run_bootstrap(args: BootstrapArgs) -> Result<()> {
    let (_, working) = load_input(&args.input, args.skip_detrend)?;
    let params = RunParams {
        replicates: args.replicates,
        level: args.level,
        seed: args.seed,
        ..RunParams::default()
    };
    let result = pipeline::gsbb_band(working.values(), args.period, "bootstrap", &params)?;
    io::write_band(create_output(&args.output)?, &result.band)?;
    println!("{}", args.output.display());
    Ok(())
}

fn run_synth(args: SynthArgs) -> Result<()> {
    let components = args
        .components
        .iter()
        .map(|c| parse_synth_component(c))
        .collect::<Result<Vec<_>>>()?;
    let spec = SynthSpec {
        n: args.n,
        intercept: args.intercept,
        slope: args.slope,
        components,
        noise_sd: args.noise_sd,
        seed: args.seed,
    };
    let (series, _) = synth::generate(&spec)?;
    io::write_series(create_output(&args.output)?, &series, args.start_date)?;
    println!("{}", args.output.display());
    Ok(())
}

fn run_coverage(args: CoverageArgs) -> Result<()> {
    let components = args
        .components
        .iter()
        .map(|c| parse_synth_component(c))
        .collect::<Result<Vec<_>>>()?;
    let spec = SynthSpec {
        n: args.n,
        intercept: 0.0,
        slope: 0.0,
        components,
        noise_sd: args.noise_sd,
        seed: args.seed,
    };
    let report = synth::coverage_eval(
        &spec,
        args.method.into(),
        args.trials,
        args.replicates,
        args.level,
    )?;
    io::write_coverage(create_output(&args.output)?, &report)?;
    println!("{}", args.output.display());
    Ok(())
}
