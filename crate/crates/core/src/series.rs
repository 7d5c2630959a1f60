//! Uniformly sampled series and time-scale change.
//!
//! A [`Series`] is a list of finite reals laid out on a uniform grid: sample
//! `i` sits at time offset `(start_index + i) * period`. Changing the time
//! scale groups consecutive, non-overlapping blocks of `W` samples into one
//! sample of a grid whose step is `W` times coarser.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SECONDS_PER_DAY: u64 = 86_400;
/// 365.25 days.
const SECONDS_PER_YEAR: u64 = 31_557_600;

/// Calendar-free time unit of a sampling grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeUnit {
    Second,
    Minute,
    Hour,
    Day,
    Week,
    /// One twelfth of a year.
    Month,
    /// 365.25 days.
    Year,
}

impl TimeUnit {
    pub const ALL: [TimeUnit; 7] = [
        TimeUnit::Second,
        TimeUnit::Minute,
        TimeUnit::Hour,
        TimeUnit::Day,
        TimeUnit::Week,
        TimeUnit::Month,
        TimeUnit::Year,
    ];

    /// Length of one unit in whole seconds. Every unit, including month and
    /// year, is an exact integer number of seconds.
    pub fn seconds(self) -> u64 {
        match self {
            TimeUnit::Second => 1,
            TimeUnit::Minute => 60,
            TimeUnit::Hour => 3_600,
            TimeUnit::Day => SECONDS_PER_DAY,
            TimeUnit::Week => 7 * SECONDS_PER_DAY,
            TimeUnit::Month => SECONDS_PER_YEAR / 12,
            TimeUnit::Year => SECONDS_PER_YEAR,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TimeUnit::Second => "second",
            TimeUnit::Minute => "minute",
            TimeUnit::Hour => "hour",
            TimeUnit::Day => "day",
            TimeUnit::Week => "week",
            TimeUnit::Month => "month",
            TimeUnit::Year => "year",
        }
    }
}

impl FromStr for TimeUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let singular = lower.strip_suffix('s').unwrap_or(&lower);
        TimeUnit::ALL
            .into_iter()
            .find(|u| u.name() == singular)
            .ok_or_else(|| Error::invalid("unit", format!("unknown time unit `{s}`")))
    }
}

/// Step between two consecutive samples, e.g. `5 minute` or `1 month`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SamplingPeriod {
    count: u64,
    unit: TimeUnit,
}

impl SamplingPeriod {
    pub fn new(count: u64, unit: TimeUnit) -> Result<Self> {
        if count == 0 {
            return Err(Error::invalid(
                "count",
                "sampling period count must be >= 1",
            ));
        }
        Ok(SamplingPeriod { count, unit })
    }

    pub fn months(count: u64) -> Result<Self> {
        Self::new(count, TimeUnit::Month)
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn unit(&self) -> TimeUnit {
        self.unit
    }

    /// Duration of one step in seconds.
    pub fn seconds(&self) -> u128 {
        u128::from(self.count) * u128::from(self.unit.seconds())
    }

    /// Duration of one step in years.
    pub fn years(&self) -> f64 {
        self.seconds() as f64 / SECONDS_PER_YEAR as f64
    }

    /// The period of a grid `factor` times coarser.
    pub fn scaled(&self, factor: u64) -> Result<Self> {
        let count = self
            .count
            .checked_mul(factor)
            .ok_or_else(|| Error::invalid("window", "sampling period overflows"))?;
        Self::new(count, self.unit)
    }
}

impl fmt::Display for SamplingPeriod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.count, self.unit.name())
    }
}

impl FromStr for SamplingPeriod {
    type Err = Error;

    /// Parses `"<count> <unit>"`, e.g. `"5 minute"`; plural units are accepted.
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split_whitespace();
        let (Some(count), Some(unit), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::invalid(
                "period",
                format!("expected \"<count> <unit>\", got `{s}`"),
            ));
        };
        let count = count
            .parse::<u64>()
            .map_err(|e| Error::invalid("period", format!("bad count `{count}`: {e}")))?;
        SamplingPeriod::new(count, unit.parse()?)
    }
}

/// Duration of `n_samples` steps of `period`, in years of 365.25 days.
pub fn duration_in_years(n_samples: u64, period: SamplingPeriod) -> f64 {
    (u128::from(n_samples) * period.seconds()) as f64 / SECONDS_PER_YEAR as f64
}

/// A non-empty, finite-valued, uniformly sampled series.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    start_index: i64,
    values: Vec<f64>,
    period: SamplingPeriod,
    label: String,
}

impl Series {
    /// Copies `values` into a new series whose first sample has index
    /// `start_index`.
    pub fn new(values: &[f64], period: SamplingPeriod, start_index: i64) -> Result<Self> {
        Self::from_vec(values.to_vec(), period, start_index)
    }

    pub fn from_vec(values: Vec<f64>, period: SamplingPeriod, start_index: i64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue(i));
        }
        Ok(Series {
            start_index,
            values,
            period,
            label: String::new(),
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; kept for API symmetry with collections.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn period(&self) -> SamplingPeriod {
        self.period
    }

    pub fn start_index(&self) -> i64 {
        self.start_index
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Sample index of position `i`.
    pub fn index_of(&self, i: usize) -> i64 {
        self.start_index + i as i64
    }

    /// Non-overlapping block sums on a grid `window` times coarser.
    ///
    /// Output sample `k` is the sum of input samples `[kW, (k+1)W)`; a
    /// trailing incomplete block is dropped. The output start index is the
    /// input start index divided (floor) by `window`.
    pub fn rescale_sum(&self, window: usize) -> Result<Series> {
        let sums = self.block_sums(window)?;
        self.coarse(sums, window)
    }

    /// Non-overlapping block means: [`Series::rescale_sum`] divided by `window`.
    pub fn rescale_mean(&self, window: usize) -> Result<Series> {
        let w = window as f64;
        let means = self
            .block_sums(window)?
            .into_iter()
            .map(|s| s / w)
            .collect();
        self.coarse(means, window)
    }

    fn block_sums(&self, window: usize) -> Result<Vec<f64>> {
        if window == 0 {
            return Err(Error::invalid("window", "must be >= 1"));
        }
        if self.len() < window {
            return Err(Error::WindowTooLarge {
                window,
                len: self.len(),
            });
        }
        Ok(self
            .values
            .chunks_exact(window)
            .map(|block| block.iter().sum())
            .collect())
    }

    fn coarse(&self, values: Vec<f64>, window: usize) -> Result<Series> {
        let period = self.period.scaled(window as u64)?;
        let start = self.start_index.div_euclid(window as i64);
        Ok(Series::from_vec(values, period, start)?.with_label(self.label.clone()))
    }
}

/// A series in which some samples may be undefined, e.g. the edges of a
/// moving average.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskedSeries {
    start_index: i64,
    values: Vec<Option<f64>>,
    period: SamplingPeriod,
    label: String,
}

impl MaskedSeries {
    pub fn new(values: Vec<Option<f64>>, period: SamplingPeriod, start_index: i64) -> Self {
        MaskedSeries {
            start_index,
            values,
            period,
            label: String::new(),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }

    pub fn get(&self, i: usize) -> Option<f64> {
        self.values.get(i).copied().flatten()
    }

    pub fn is_defined(&self, i: usize) -> bool {
        self.get(i).is_some()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn period(&self) -> SamplingPeriod {
        self.period
    }

    pub fn start_index(&self) -> i64 {
        self.start_index
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn defined_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    /// Defined values in order.
    pub fn defined_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().filter_map(|v| *v)
    }

    /// Positions of the first and last defined samples.
    pub fn defined_span(&self) -> Option<(usize, usize)> {
        let first = self.values.iter().position(Option::is_some)?;
        let last = self.values.iter().rposition(Option::is_some)?;
        Some((first, last))
    }
}

impl From<&Series> for MaskedSeries {
    fn from(s: &Series) -> Self {
        MaskedSeries {
            start_index: s.start_index,
            values: s.values.iter().copied().map(Some).collect(),
            period: s.period,
            label: s.label.clone(),
        }
    }
}
