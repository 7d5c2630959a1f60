//! CSV ingestion, series CSV output and report serialization.

use std::fmt::Write as _;
use std::fs;
use std::io::Read;
use std::path::Path;

use chrono::{Datelike, NaiveDate, NaiveDateTime};

use crate::analysis::AnalysisReport;
use crate::error::{Error, Result};
use crate::series::{MaskedSeries, SamplingPeriod, Series};

/// Header of files written by [`write_series_csv`].
pub const SERIES_HEADER: &str = "index,value,defined";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Column {
    Name(String),
    Index(usize),
}

impl From<usize> for Column {
    fn from(i: usize) -> Self {
        Column::Index(i)
    }
}

impl From<&str> for Column {
    /// A string of digits selects by position, anything else by header name.
    fn from(s: &str) -> Self {
        match s.parse::<usize>() {
            Ok(i) => Column::Index(i),
            Err(_) => Column::Name(s.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DecimalSeparator {
    #[default]
    Point,
    Comma,
}

impl DecimalSeparator {
    fn as_char(self) -> char {
        match self {
            DecimalSeparator::Point => '.',
            DecimalSeparator::Comma => ',',
        }
    }
}

/// Handling of empty (or `NA`/`NaN`) value cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MissingPolicy {
    #[default]
    Error,
    /// Fill interior gaps linearly between the nearest present neighbours;
    /// gaps touching either end are an error.
    InterpolateLinear,
    /// Drop missing cells at the start and end; interior gaps are an error.
    DropLeadingTrailing,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvSpec {
    pub delimiter: u8,
    pub has_header: bool,
    pub value_column: Column,
    pub index_column: Option<Column>,
    pub decimal_separator: DecimalSeparator,
    pub missing_policy: MissingPolicy,
}

impl Default for CsvSpec {
    fn default() -> Self {
        CsvSpec {
            delimiter: b',',
            has_header: true,
            value_column: Column::Index(0),
            index_column: None,
            decimal_separator: DecimalSeparator::Point,
            missing_policy: MissingPolicy::Error,
        }
    }
}

impl CsvSpec {
    pub fn validate(&self) -> Result<()> {
        if char::from(self.delimiter) == self.decimal_separator.as_char() {
            return Err(Error::invalid(
                "delimiter",
                "delimiter and decimal separator must differ",
            ));
        }
        if !self.has_header {
            for c in std::iter::once(&self.value_column).chain(&self.index_column) {
                if let Column::Name(n) = c {
                    return Err(Error::invalid(
                        "column",
                        format!("column `{n}` selected by name but the file has no header"),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Non-fatal observations made while reading a file.
#[derive(Debug, Clone, PartialEq)]
pub enum IngestWarning {
    /// The index column is not uniformly spaced; first offending data row.
    NonUniformIndex { row: usize },
    /// The index column could not be interpreted as numbers or dates.
    UnparsedIndex { row: usize, cell: String },
}

impl std::fmt::Display for IngestWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            IngestWarning::NonUniformIndex { row } => {
                write!(f, "index column is not uniformly spaced (row {row})")
            }
            IngestWarning::UnparsedIndex { row, cell } => {
                write!(
                    f,
                    "index cell `{cell}` at row {row} is neither a number nor a date"
                )
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ingested {
    pub series: Series,
    pub warnings: Vec<IngestWarning>,
}

pub fn read_csv(
    path: impl AsRef<Path>,
    spec: &CsvSpec,
    period: SamplingPeriod,
) -> Result<Ingested> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv_from(file, spec, period).map(|mut ing| {
        ing.series = ing.series.with_label(label_of(path));
        ing
    })
}

fn label_of(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Reads a series from any reader. Row numbers in errors count data rows
/// from 1, excluding the header.
pub fn read_csv_from(
    reader: impl Read,
    spec: &CsvSpec,
    period: SamplingPeriod,
) -> Result<Ingested> {
    spec.validate()?;
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(spec.delimiter)
        .has_headers(spec.has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let headers = if spec.has_header {
        Some(rdr.headers().map_err(|e| csv_error(0, e))?.clone())
    } else {
        None
    };
    let resolve = |c: &Column| -> Result<usize> {
        match (c, &headers) {
            (Column::Index(i), _) => Ok(*i),
            (Column::Name(n), Some(h)) => h.iter().position(|x| x == n).ok_or_else(|| {
                Error::invalid("column", format!("no column named `{n}` in header"))
            }),
            (Column::Name(n), None) => Err(Error::invalid(
                "column",
                format!("column `{n}` selected by name but the file has no header"),
            )),
        }
    };
    let value_col = resolve(&spec.value_column)?;
    let index_col = spec.index_column.as_ref().map(resolve).transpose()?;

    let mut cells: Vec<Option<f64>> = Vec::new();
    let mut index_cells: Vec<String> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| csv_error(row, e))?;
        let cell = rec.get(value_col).ok_or_else(|| Error::Parse {
            row,
            column: value_col,
            reason: "row has too few fields".into(),
        })?;
        cells.push(
            parse_value(cell, spec.decimal_separator).map_err(|reason| Error::Parse {
                row,
                column: value_col,
                reason,
            })?,
        );
        if let Some(ic) = index_col {
            index_cells.push(rec.get(ic).unwrap_or("").to_string());
        }
    }
    if cells.is_empty() {
        return Err(Error::EmptyFile);
    }

    let (first, values) = fill_missing(&cells, spec.missing_policy)?;
    let warnings = match index_col {
        Some(_) => check_index(&index_cells[first..first + values.len()], first),
        None => Vec::new(),
    };
    Ok(Ingested {
        series: Series::from_vec(values, period, 0)?,
        warnings,
    })
}

fn csv_error(row: usize, e: csv::Error) -> Error {
    Error::Parse {
        row,
        column: 0,
        reason: e.to_string(),
    }
}

fn parse_value(cell: &str, sep: DecimalSeparator) -> std::result::Result<Option<f64>, String> {
    if cell.is_empty()
        || cell.eq_ignore_ascii_case("na")
        || cell.eq_ignore_ascii_case("nan")
        || cell.eq_ignore_ascii_case("null")
    {
        return Ok(None);
    }
    let text = match sep {
        DecimalSeparator::Point => std::borrow::Cow::Borrowed(cell),
        DecimalSeparator::Comma => {
            if cell.contains('.') {
                return Err(format!("`{cell}` contains '.' under decimal comma"));
            }
            std::borrow::Cow::Owned(cell.replace(',', "."))
        }
    };
    let v: f64 = text
        .parse()
        .map_err(|_| format!("`{cell}` is not a number"))?;
    if !v.is_finite() {
        return Err(format!("`{cell}` is not finite"));
    }
    Ok(Some(v))
}

/// Applies the missing-value policy; returns the position of the first kept
/// row and the values.
fn fill_missing(cells: &[Option<f64>], policy: MissingPolicy) -> Result<(usize, Vec<f64>)> {
    let first_missing = |range: std::ops::Range<usize>| {
        range
            .into_iter()
            .find(|&i| cells[i].is_none())
            .map(|i| i + 1)
    };
    match policy {
        MissingPolicy::Error => match first_missing(0..cells.len()) {
            Some(row) => Err(Error::MissingValue(row)),
            None => Ok((0, cells.iter().map(|c| c.unwrap()).collect())),
        },
        MissingPolicy::DropLeadingTrailing => {
            let first = cells
                .iter()
                .position(Option::is_some)
                .ok_or(Error::MissingValue(1))?;
            let last = cells.iter().rposition(Option::is_some).unwrap();
            if let Some(row) = first_missing(first..last + 1) {
                return Err(Error::MissingValue(row));
            }
            Ok((
                first,
                cells[first..=last].iter().map(|c| c.unwrap()).collect(),
            ))
        }
        MissingPolicy::InterpolateLinear => {
            if cells[0].is_none() {
                return Err(Error::MissingValue(1));
            }
            if cells[cells.len() - 1].is_none() {
                return Err(Error::MissingValue(cells.len()));
            }
            let mut out = Vec::with_capacity(cells.len());
            let mut prev = 0;
            for (i, c) in cells.iter().enumerate() {
                match c {
                    Some(v) => {
                        out.push(*v);
                        prev = i;
                    }
                    None => {
                        let next = (i + 1..cells.len()).find(|&j| cells[j].is_some()).unwrap();
                        let (a, b) = (cells[prev].unwrap(), cells[next].unwrap());
                        let w = (i - prev) as f64 / (next - prev) as f64;
                        out.push(a + (b - a) * w);
                    }
                }
            }
            Ok((0, out))
        }
    }
}

// Numbers must be equally spaced; dates must step by a constant number of
// days, or by a constant number of months on the same day of month.
fn check_index(cells: &[String], offset: usize) -> Vec<IngestWarning> {
    if cells.len() < 2 {
        return Vec::new();
    }
    let row = |i: usize| offset + i + 1;
    if let Ok(nums) = cells
        .iter()
        .map(|c| c.parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
    {
        let step = nums[1] - nums[0];
        let tol = 1e-9 * step.abs().max(1.0);
        return nums
            .windows(2)
            .position(|w| ((w[1] - w[0]) - step).abs() > tol || step == 0.0)
            .map(|i| vec![IngestWarning::NonUniformIndex { row: row(i + 1) }])
            .unwrap_or_default();
    }
    let mut stamps = Vec::with_capacity(cells.len());
    for (i, c) in cells.iter().enumerate() {
        match parse_stamp(c) {
            Some(t) => stamps.push(t),
            None => {
                return vec![IngestWarning::UnparsedIndex {
                    row: row(i),
                    cell: c.clone(),
                }]
            }
        }
    }
    let secs: Vec<i64> = stamps.iter().map(|t| t.and_utc().timestamp()).collect();
    let step = secs[1] - secs[0];
    if step > 0 && secs.windows(2).all(|w| w[1] - w[0] == step) {
        return Vec::new();
    }
    let month_no = |t: &NaiveDateTime| i64::from(t.year()) * 12 + i64::from(t.month0());
    let mstep = month_no(&stamps[1]) - month_no(&stamps[0]);
    let monthly = stamps.windows(2).position(|w| {
        month_no(&w[1]) - month_no(&w[0]) != mstep
            || w[1].day() != w[0].day()
            || w[1].time() != w[0].time()
    });
    match (mstep > 0, monthly) {
        (true, None) => Vec::new(),
        (_, Some(i)) => vec![IngestWarning::NonUniformIndex { row: row(i + 1) }],
        (false, None) => vec![IngestWarning::NonUniformIndex { row: row(1) }],
    }
}

fn parse_stamp(s: &str) -> Option<NaiveDateTime> {
    const FORMATS: [&str; 3] = ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S", "%Y-%m-%d %H:%M"];
    FORMATS
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(s, f).ok())
        .or_else(|| {
            chrono::DateTime::parse_from_rfc3339(s)
                .ok()
                .map(|d| d.naive_utc())
        })
        .or_else(|| {
            ["%Y-%m-%d", "%Y-%m", "%Y/%m/%d"]
                .iter()
                .find_map(|f| NaiveDate::parse_from_str(s, f).ok())
                .map(|d| d.and_hms_opt(0, 0, 0).unwrap())
        })
        .or_else(|| {
            // Year-month without a day, e.g. 1998-01.
            let d = NaiveDate::parse_from_str(&format!("{s}-01"), "%Y-%m-%d").ok()?;
            d.and_hms_opt(0, 0, 0)
        })
}

/// Shortest decimal string that parses back to the same `f64`; never more
/// than 17 significant digits.
pub fn format_value(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e16 || v.abs() < 1e-5) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

/// Renders a masked series as `index,value,defined` CSV.
pub fn series_csv_string(x: &MaskedSeries) -> String {
    let mut out = String::with_capacity(16 * (x.len() + 1));
    out.push_str(SERIES_HEADER);
    out.push('\n');
    for (i, v) in x.values().iter().enumerate() {
        let idx = x.start_index() + i as i64;
        match v {
            Some(v) => writeln!(out, "{idx},{},true", format_value(*v)),
            None => writeln!(out, "{idx},,false"),
        }
        .unwrap();
    }
    out
}

pub fn write_series_csv(x: &MaskedSeries, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, series_csv_string(x)).map_err(|e| Error::io(path, e))
}

/// Reads back a file written by [`write_series_csv`], masks included.
pub fn read_series_csv(path: impl AsRef<Path>, period: SamplingPeriod) -> Result<MaskedSeries> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_series_csv(&text, period)
}

pub fn parse_series_csv(text: &str, period: SamplingPeriod) -> Result<MaskedSeries> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == SERIES_HEADER => {}
        _ => {
            return Err(Error::Parse {
                row: 0,
                column: 0,
                reason: format!("expected header `{SERIES_HEADER}`"),
            })
        }
    }
    let mut start = None;
    let mut values = Vec::new();
    for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let row = i + 1;
        let bad = |column: usize, reason: String| Error::Parse {
            row,
            column,
            reason,
        };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(bad(0, format!("expected 3 fields, found {}", fields.len())));
        }
        let idx: i64 = fields[0]
            .parse()
            .map_err(|_| bad(0, format!("bad index `{}`", fields[0])))?;
        let expected = start.map(|s: i64| s + values.len() as i64).unwrap_or(idx);
        if idx != expected {
            return Err(bad(
                0,
                format!("index {idx} out of sequence, expected {expected}"),
            ));
        }
        start.get_or_insert(idx);
        let value = match fields[2] {
            "true" => Some(
                parse_value(fields[1], DecimalSeparator::Point)
                    .map_err(|r| bad(1, r))?
                    .ok_or_else(|| bad(1, "defined sample without a value".into()))?,
            ),
            "false" if fields[1].is_empty() => None,
            "false" => return Err(bad(1, "undefined sample carries a value".into())),
            other => return Err(bad(2, format!("bad flag `{other}`"))),
        };
        values.push(value);
    }
    let start = start.ok_or(Error::EmptyFile)?;
    Ok(MaskedSeries::new(values, period, start))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Text,
}

pub fn report_json(r: &AnalysisReport) -> String {
    let mut s = serde_json::to_string_pretty(r).expect("report serializes");
    s.push('\n');
    s
}

fn opt(v: Option<f64>) -> String {
    v.map(format_value).unwrap_or_else(|| "-".into())
}

pub fn report_text(r: &AnalysisReport) -> String {
    let c = &r.config.analysis;
    let (mode, value) = match c.threshold {
        crate::detect::ThresholdSpec::Absolute(v) => ("absolute", v),
        crate::detect::ThresholdSpec::SigmaMultiple(k) => ("sigma_multiple", k),
    };
    let list = |v: &[String]| v.join(" ");
    let mut out = String::new();
    let mut line = |k: &str, v: String| writeln!(out, "{k}: {v}").unwrap();
    line("schema_version", r.schema_version.to_string());
    line("label", r.label.clone());
    line("period", r.config.period.clone());
    line("ma_kind", format!("{:?}", c.mean.kind).to_lowercase());
    line("ma_length", c.mean.length.to_string());
    line(
        "edge_policy",
        format!("{:?}", c.mean.edge_policy).to_lowercase(),
    );
    line("threshold_mode", mode.into());
    line("threshold_value", format_value(value));
    line("polarity", format!("{:?}", c.polarity).to_lowercase());
    line("normalize", c.normalize.to_string());
    line("epsilon", opt(c.epsilon));
    line("rho", format_value(c.classify.rho));
    line("q", format_value(c.classify.q));
    line("min_crossings", c.classify.min_crossings.to_string());
    line("periodicity_rule", r.periodicity_rule.clone());
    line(
        "defined_samples",
        format!(
            "{}/{}",
            r.decomposition.defined_samples, r.decomposition.samples
        ),
    );
    line("threshold", format_value(r.threshold));
    line(
        "crossings",
        list(
            &r.crossings
                .iter()
                .map(|t| t.to_string())
                .collect::<Vec<_>>(),
        ),
    );
    line(
        "intervals",
        list(
            &r.intervals
                .iter()
                .map(|t| t.to_string())
                .collect::<Vec<_>>(),
        ),
    );
    line("verdict", r.verdict.to_string());
    line("estimated_period_samples", opt(r.estimated_period_samples));
    line("relative_dispersion", opt(r.relative_dispersion));
    line("conforming_fraction", opt(r.conforming_fraction));
    for w in &r.warnings {
        line("warning", w.clone());
    }
    out
}

pub fn write_report(
    r: &AnalysisReport,
    path: impl AsRef<Path>,
    format: ReportFormat,
) -> Result<()> {
    let path = path.as_ref();
    let body = match format {
        ReportFormat::Json => report_json(r),
        ReportFormat::Text => report_text(r),
    };
    fs::write(path, body).map_err(|e| Error::io(path, e))
}
