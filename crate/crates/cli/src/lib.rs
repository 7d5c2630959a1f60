//! Command layer of the `tseason` binary.
//!
//! Exit codes: 0 on success, 1 on a data or computation error, 2 on a usage
//! error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use tseason::io::{
    read_csv, write_series_csv, Column, CsvSpec, DecimalSeparator, MissingPolicy, ReportFormat,
};
use tseason::{
    decompose, run, AnalysisConfig, ClassifyParams, EdgePolicy, MeanConfig, MeanKind, Polarity,
    SamplingPeriod, Series, ThresholdSpec,
};

pub mod svg;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DATA: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "tseason",
    version,
    about = "Seasonalities and cycles from threshold crossings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Split a series into mean and fluctuation.
    Decompose(DecomposeArgs),
    /// Aggregate non-overlapping blocks onto a coarser time scale.
    Rescale(RescaleArgs),
    /// Detect crossings and classify the seasonality.
    Analyze(AnalyzeArgs),
    /// Draw an SVG chart.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Input CSV file.
    #[arg(long)]
    input: PathBuf,
    /// Sampling period of the input, e.g. "5 minute" or "1 month".
    #[arg(long, default_value = "1 month", value_parser = parse_period)]
    period: SamplingPeriod,
    /// Value column: 0-based position or header name.
    #[arg(long, default_value = "0")]
    value_column: String,
    /// Optional index/timestamp column, checked for uniform spacing.
    #[arg(long)]
    index_column: Option<String>,
    #[arg(long, default_value_t = ',')]
    delimiter: char,
    /// The file has no header row.
    #[arg(long)]
    no_header: bool,
    /// Values use a decimal comma.
    #[arg(long)]
    decimal_comma: bool,
    #[arg(long, value_enum, default_value_t = Missing::Error)]
    missing: Missing,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Missing {
    Error,
    Interpolate,
    Drop,
}

#[derive(Debug, Args)]
struct MeanArgs {
    #[arg(long, value_enum, default_value_t = Kind::Centered)]
    ma_kind: Kind,
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    ma_length: u64,
    #[arg(long, value_enum, default_value_t = Edge::Undefined)]
    edge: Edge,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    Centered,
    Trailing,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Edge {
    Undefined,
    Shrink,
}

#[derive(Debug, Args)]
struct DecomposeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    mean: MeanArgs,
    #[arg(long)]
    out_mean: PathBuf,
    #[arg(long)]
    out_fluct: PathBuf,
}

#[derive(Debug, Args)]
struct RescaleArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    window: u64,
    #[arg(long, value_enum, default_value_t = Agg::Sum)]
    agg: Agg,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Agg {
    Sum,
    Mean,
}

#[derive(Debug, Args)]
struct DetectArgs {
    #[arg(long, value_enum, default_value_t = ThresholdMode::Sigma)]
    threshold_mode: ThresholdMode,
    /// Absolute threshold, or multiple of the standard deviation.
    #[arg(long, default_value_t = 1.0)]
    threshold_value: f64,
    #[arg(long, value_enum, default_value_t = Pol::Pos)]
    polarity: Pol,
    /// Scan fluctuation / mean instead of the fluctuation.
    #[arg(long)]
    normalize: bool,
    /// Zero guard for --normalize; defaults to 1e-9 * max|x|.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, default_value_t = 0.25)]
    rho: f64,
    #[arg(long, default_value_t = 0.8)]
    q: f64,
    #[arg(long, default_value_t = 3)]
    min_crossings: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ThresholdMode {
    Abs,
    Sigma,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Pol {
    Pos,
    Neg,
    Both,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    mean: MeanArgs,
    #[command(flatten)]
    detect: DetectArgs,
    /// Where to write the report.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Debug, Args)]
struct PlotArgs {
    /// A series CSV, or for interval_stem also a JSON report.
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum)]
    kind: PlotKind,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1200, value_parser = clap::value_parser!(u32).range(1..))]
    width: u32,
    #[arg(long, default_value_t = 500, value_parser = clap::value_parser!(u32).range(1..))]
    height: u32,
    #[command(flatten)]
    mean: MeanArgs,
    #[command(flatten)]
    detect: DetectArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
enum PlotKind {
    SeriesWithMean,
    FluctuationWithThreshold,
    IntervalStem,
}

fn parse_period(s: &str) -> Result<SamplingPeriod, String> {
    s.parse().map_err(|e: tseason::Error| e.to_string())
}

/// A failure that maps onto an exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(String),
}

impl From<tseason::Error> for Failure {
    fn from(e: tseason::Error) -> Self {
        match e {
            tseason::Error::InvalidParameter { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Data(e.to_string()),
        }
    }
}

impl From<tseason::AnalysisError> for Failure {
    fn from(e: tseason::AnalysisError) -> Self {
        match e.source {
            tseason::Error::InvalidParameter { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Data(e.to_string()),
        }
    }
}

type CmdResult = Result<(), Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match cli.command {
        Command::Decompose(a) => cmd_decompose(&a, stderr),
        Command::Rescale(a) => cmd_rescale(&a, stderr),
        Command::Analyze(a) => cmd_analyze(&a, stdout, stderr),
        Command::Plot(a) => cmd_plot(&a, stderr),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Data(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_DATA
        }
    }
}

impl InputArgs {
    fn csv_spec(&self) -> Result<CsvSpec, Failure> {
        if !self.delimiter.is_ascii() {
            return Err(Failure::Usage(
                "delimiter must be an ASCII character".into(),
            ));
        }
        let delimiter = self.delimiter as u8;
        let spec = CsvSpec {
            delimiter,
            has_header: !self.no_header,
            value_column: Column::from(self.value_column.as_str()),
            index_column: self.index_column.as_deref().map(Column::from),
            decimal_separator: if self.decimal_comma {
                DecimalSeparator::Comma
            } else {
                DecimalSeparator::Point
            },
            missing_policy: match self.missing {
                Missing::Error => MissingPolicy::Error,
                Missing::Interpolate => MissingPolicy::InterpolateLinear,
                Missing::Drop => MissingPolicy::DropLeadingTrailing,
            },
        };
        spec.validate()?;
        Ok(spec)
    }

    fn load(&self) -> Result<(Series, Vec<String>), Failure> {
        let ing = read_csv(&self.input, &self.csv_spec()?, self.period)?;
        Ok((
            ing.series,
            ing.warnings.iter().map(ToString::to_string).collect(),
        ))
    }
}

impl MeanArgs {
    fn config(&self) -> Result<MeanConfig, Failure> {
        Ok(MeanConfig {
            kind: match self.ma_kind {
                Kind::Centered => MeanKind::Centered,
                Kind::Trailing => MeanKind::Trailing,
            },
            length: usize::try_from(self.ma_length)
                .map_err(|_| Failure::Usage("--ma-length too large".into()))?,
            edge_policy: match self.edge {
                Edge::Undefined => EdgePolicy::Undefined,
                Edge::Shrink => EdgePolicy::Shrink,
            },
        })
    }
}

impl DetectArgs {
    fn config(&self, mean: MeanConfig) -> AnalysisConfig {
        AnalysisConfig {
            mean,
            threshold: match self.threshold_mode {
                ThresholdMode::Abs => ThresholdSpec::Absolute(self.threshold_value),
                ThresholdMode::Sigma => ThresholdSpec::SigmaMultiple(self.threshold_value),
            },
            polarity: match self.polarity {
                Pol::Pos => Polarity::Positive,
                Pol::Neg => Polarity::Negative,
                Pol::Both => Polarity::Both,
            },
            classify: ClassifyParams {
                rho: self.rho,
                q: self.q,
                min_crossings: self.min_crossings,
            },
            normalize: self.normalize,
            epsilon: self.epsilon,
        }
    }

    fn validate(&self) -> CmdResult {
        let value = self.threshold_value;
        if !(value > 0.0 && value.is_finite()) {
            return Err(Failure::Usage("--threshold-value must be > 0".into()));
        }
        ClassifyParams {
            rho: self.rho,
            q: self.q,
            min_crossings: self.min_crossings,
        }
        .validate()?;
        Ok(())
    }
}

fn warn(stderr: &mut dyn Write, warnings: &[String]) {
    for w in warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
}

fn cmd_decompose(a: &DecomposeArgs, stderr: &mut dyn Write) -> CmdResult {
    let cfg = a.mean.config()?;
    let (x, warnings) = a.input.load()?;
    warn(stderr, &warnings);
    let d = decompose(&x, &cfg)?;
    write_series_csv(d.mean(), &a.out_mean)?;
    write_series_csv(d.fluctuation(), &a.out_fluct)?;
    Ok(())
}

/// Sidecar file recording the period of a rescaled series.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

fn cmd_rescale(a: &RescaleArgs, stderr: &mut dyn Write) -> CmdResult {
    let (x, warnings) = a.input.load()?;
    warn(stderr, &warnings);
    let w = usize::try_from(a.window).map_err(|_| Failure::Usage("--window too large".into()))?;
    let y = match a.agg {
        Agg::Sum => x.rescale_sum(w)?,
        Agg::Mean => x.rescale_mean(w)?,
    };
    write_series_csv(&(&y).into(), &a.out)?;
    let meta = sidecar_path(&a.out);
    fs::write(&meta, format!("period: {}\n", y.period()))
        .map_err(|e| Failure::Data(format!("{}: {e}", meta.display())))?;
    Ok(())
}

/// One-line verdict as printed by `analyze`.
pub fn verdict_line(r: &tseason::AnalysisReport) -> String {
    match r.estimated_period_samples {
        Some(p) if p.fract() == 0.0 => format!("{} (period ≈ {p} samples)", r.verdict),
        Some(p) => format!("{} (period ≈ {p:.1} samples)", r.verdict),
        None => r.verdict.to_string(),
    }
}

fn cmd_analyze(a: &AnalyzeArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CmdResult {
    a.detect.validate()?;
    let cfg = a.detect.config(a.mean.config()?);
    let (x, warnings) = a.input.load()?;
    warn(stderr, &warnings);
    let mut report = run(&x, &cfg)?.report;
    report.warnings = warnings;
    if let Some(path) = &a.report {
        let format = match a.format {
            Format::Json => ReportFormat::Json,
            Format::Text => ReportFormat::Text,
        };
        tseason::io::write_report(&report, path, format)?;
    }
    writeln!(stdout, "{}", verdict_line(&report)).map_err(|e| Failure::Data(e.to_string()))?;
    Ok(())
}

fn cmd_plot(a: &PlotArgs, stderr: &mut dyn Write) -> CmdResult {
    let canvas = svg::Canvas {
        width: a.width,
        height: a.height,
    };
    let text = fs::read_to_string(&a.input.input)
        .map_err(|e| Failure::Data(format!("{}: {e}", a.input.input.display())))?;
    let title = a
        .input
        .input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();

    // A JSON report carries intervals but no series.
    if text.trim_start().starts_with('{') {
        if a.kind != PlotKind::IntervalStem {
            return Err(Failure::Data(
                "a report can only be drawn as interval_stem".into(),
            ));
        }
        let v: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| Failure::Data(format!("bad report: {e}")))?;
        let intervals: Vec<u64> = v
            .get("intervals")
            .and_then(|i| serde_json::from_value(i.clone()).ok())
            .ok_or_else(|| Failure::Data("report has no `intervals` array".into()))?;
        return write_svg(&a.out, &svg::interval_stem(&intervals, canvas, &title));
    }

    a.detect.validate()?;
    let cfg = a.detect.config(a.mean.config()?);
    let (x, warnings) = a.input.load()?;
    warn(stderr, &warnings);
    let body = match a.kind {
        PlotKind::SeriesWithMean => {
            let d = decompose(&x, &cfg.mean)?;
            svg::series_with_mean(x.values(), d.mean(), canvas, &title)
        }
        PlotKind::FluctuationWithThreshold => {
            let an = run(&x, &cfg)?;
            svg::fluctuation_with_threshold(&an.scanned, an.report.threshold, canvas, &title)
        }
        PlotKind::IntervalStem => {
            let an = run(&x, &cfg)?;
            svg::interval_stem(&an.report.intervals, canvas, &title)
        }
    };
    write_svg(&a.out, &body)
}

fn write_svg(path: &Path, body: &str) -> CmdResult {
    fs::write(path, body).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}
