//! Threshold crossings of a fluctuation and the strong/weak verdict.
//!
//! A crossing time `T` is a sample where the fluctuation leaves the band
//! `[-threshold, threshold]`: `|f(T)| > threshold` while
//! `|f(T - 1)| <= threshold`. The gaps between successive crossings of one
//! polarity are then tested for approximate periodicity.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{MaskedSeries, SamplingPeriod};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "value", rename_all = "snake_case")]
pub enum ThresholdSpec {
    /// Use the value as the threshold.
    Absolute(f64),
    /// `k` times the sample standard deviation of the defined fluctuation.
    SigmaMultiple(f64),
}

impl Default for ThresholdSpec {
    fn default() -> Self {
        ThresholdSpec::SigmaMultiple(1.0)
    }
}

/// Resolves `spec` into a concrete threshold for `fluct`.
pub fn estimate_threshold(fluct: &MaskedSeries, spec: ThresholdSpec) -> Result<f64> {
    match spec {
        ThresholdSpec::Absolute(v) => {
            check_positive("threshold", v)?;
            Ok(v)
        }
        ThresholdSpec::SigmaMultiple(k) => {
            check_positive("k", k)?;
            let values: Vec<f64> = fluct.defined_values().collect();
            let sd = sample_std(&values)?;
            if sd == 0.0 {
                return Err(Error::ZeroDispersion);
            }
            Ok(k * sd)
        }
    }
}

// Two-pass, n - 1 denominator.
fn sample_std(values: &[f64]) -> Result<f64> {
    let n = values.len();
    if n < 2 {
        return Err(Error::InsufficientData(n));
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    Ok((ss / (n - 1) as f64).sqrt())
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(
            name,
            format!("must be finite and > 0, got {v}"),
        ))
    }
}

/// Which side of the band a crossing must exit through.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    /// `f(T) > threshold`.
    #[default]
    Positive,
    /// `f(T) < -threshold`.
    Negative,
    Both,
}

impl Polarity {
    fn admits(self, f: f64, threshold: f64) -> bool {
        match self {
            Polarity::Positive => f > threshold,
            Polarity::Negative => f < -threshold,
            Polarity::Both => f.abs() > threshold,
        }
    }
}

/// Crossing times of one polarity, as sample indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingSet {
    pub polarity: Polarity,
    pub threshold: f64,
    pub times: Vec<i64>,
}

impl CrossingSet {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Scans `fluct` for crossings of `threshold`.
///
/// Both `T` and `T - 1` must be defined, so the first defined sample of a
/// region is never reported.
pub fn detect_crossings(
    fluct: &MaskedSeries,
    threshold: f64,
    polarity: Polarity,
) -> Result<CrossingSet> {
    check_positive("threshold", threshold)?;
    if fluct.defined_count() == 0 {
        return Err(Error::NoDefinedRegion);
    }
    let times = fluct
        .values()
        .windows(2)
        .enumerate()
        .filter_map(|(i, w)| match (w[0], w[1]) {
            (Some(prev), Some(cur))
                if prev.abs() <= threshold
                    && cur.abs() > threshold
                    && polarity.admits(cur, threshold) =>
            {
                Some(fluct.start_index() + i as i64 + 1)
            }
            _ => None,
        })
        .collect();
    Ok(CrossingSet {
        polarity,
        threshold,
        times,
    })
}

/// Differences between consecutive crossing times.
pub fn inter_crossing_intervals(c: &CrossingSet) -> Vec<u64> {
    c.times.windows(2).map(|w| (w[1] - w[0]) as u64).collect()
}

/// Parameters of the approximate-periodicity rule.
///
/// An interval `d` conforms when `|d - m| / m <= rho`, `m` being the median
/// interval. The crossings are strongly periodic when at least a fraction
/// `q` of intervals conform. Fewer than `min_crossings` crossings give no
/// verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifyParams {
    pub rho: f64,
    pub q: f64,
    pub min_crossings: usize,
}

impl Default for ClassifyParams {
    fn default() -> Self {
        ClassifyParams {
            rho: 0.25,
            q: 0.8,
            min_crossings: 3,
        }
    }
}

impl ClassifyParams {
    pub fn validate(&self) -> Result<()> {
        // rho = 0 is allowed: only exactly equal intervals conform.
        if !(self.rho >= 0.0 && self.rho.is_finite()) {
            return Err(Error::invalid("rho", "must be finite and >= 0"));
        }
        if !(self.q > 0.0 && self.q <= 1.0) {
            return Err(Error::invalid("q", "must lie in (0, 1]"));
        }
        if self.min_crossings < 2 {
            return Err(Error::invalid("min_crossings", "must be >= 2"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    StrongSeasonality,
    WeakSeasonality,
    StrongCycle,
    WeakCycle,
    None,
}

impl Verdict {
    pub fn is_strong(self) -> bool {
        matches!(self, Verdict::StrongSeasonality | Verdict::StrongCycle)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::StrongSeasonality => "strong_seasonality",
            Verdict::WeakSeasonality => "weak_seasonality",
            Verdict::StrongCycle => "strong_cycle",
            Verdict::WeakCycle => "weak_cycle",
            Verdict::None => "none",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub verdict: Verdict,
    /// Median interval, in samples.
    pub estimated_period_samples: Option<f64>,
    pub intervals: Vec<u64>,
    /// Largest `|d - m| / m` over the intervals.
    pub relative_dispersion: Option<f64>,
    /// Fraction of intervals within `rho` of the median.
    pub conforming_fraction: Option<f64>,
}

/// Strong/weak × seasonality/cycle verdict for a list of intervals.
///
/// A period shorter than one year is a seasonality; one year or longer is a
/// cycle.
pub fn classify(
    intervals: &[u64],
    period: SamplingPeriod,
    params: &ClassifyParams,
) -> Result<Classification> {
    params.validate()?;
    let none = || Classification {
        verdict: Verdict::None,
        estimated_period_samples: None,
        intervals: intervals.to_vec(),
        relative_dispersion: None,
        conforming_fraction: None,
    };
    if intervals.is_empty() || intervals.len() < params.min_crossings - 1 {
        return Ok(none());
    }
    let m = median(intervals);
    if m <= 0.0 {
        return Ok(none());
    }
    let deviations: Vec<f64> = intervals
        .iter()
        .map(|&d| (d as f64 - m).abs() / m)
        .collect();
    let conforming = deviations.iter().filter(|&&r| r <= params.rho).count();
    let fraction = conforming as f64 / intervals.len() as f64;
    let dispersion = deviations.iter().copied().fold(0.0, f64::max);
    let strong = fraction >= params.q;
    let seasonal = m * period.years() < 1.0;
    let verdict = match (strong, seasonal) {
        (true, true) => Verdict::StrongSeasonality,
        (true, false) => Verdict::StrongCycle,
        (false, true) => Verdict::WeakSeasonality,
        (false, false) => Verdict::WeakCycle,
    };
    Ok(Classification {
        verdict,
        estimated_period_samples: Some(m),
        intervals: intervals.to_vec(),
        relative_dispersion: Some(dispersion),
        conforming_fraction: Some(fraction),
    })
}

fn median(v: &[u64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_unstable();
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2] as f64
    } else {
        (s[n / 2 - 1] as f64 + s[n / 2] as f64) / 2.0
    }
}
