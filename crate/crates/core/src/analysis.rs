//! The end-to-end pipeline: decompose, pick the signal to scan, resolve the
//! threshold, detect crossings and classify their intervals.

use std::fmt;

use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::decompose::{decompose, default_epsilon, normalized_fluctuation, MeanConfig};
use crate::detect::{
    classify, detect_crossings, estimate_threshold, inter_crossing_intervals, ClassifyParams,
    CrossingSet, Polarity, ThresholdSpec, Verdict,
};
use crate::error::Error;
use crate::series::{MaskedSeries, Series};

pub const SCHEMA_VERSION: u32 = 1;

/// Name of the approximate-periodicity rule recorded in reports.
pub const PERIODICITY_RULE: &str = "median_conformity";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub mean: MeanConfig,
    pub threshold: ThresholdSpec,
    pub polarity: Polarity,
    #[serde(flatten)]
    pub classify: ClassifyParams,
    /// Scan `fluctuation / mean` instead of the raw fluctuation.
    pub normalize: bool,
    /// Zero guard for normalization; `None` means `1e-9 * max|x|`.
    pub epsilon: Option<f64>,
}

impl AnalysisConfig {
    pub fn new(mean: MeanConfig) -> Self {
        AnalysisConfig {
            mean,
            threshold: ThresholdSpec::default(),
            polarity: Polarity::default(),
            classify: ClassifyParams::default(),
            normalize: false,
            epsilon: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Decompose,
    Normalize,
    Threshold,
    Detect,
    Classify,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Decompose => "decompose",
            Stage::Normalize => "normalize",
            Stage::Threshold => "threshold",
            Stage::Detect => "detect",
            Stage::Classify => "classify",
        })
    }
}

#[derive(Debug, Error)]
#[error("{stage} stage: {source}")]
pub struct AnalysisError {
    pub stage: Stage,
    #[source]
    pub source: Error,
}

trait AtStage<T> {
    fn at(self, stage: Stage) -> Result<T, AnalysisError>;
}

impl<T> AtStage<T> for Result<T, Error> {
    fn at(self, stage: Stage) -> Result<T, AnalysisError> {
        self.map_err(|source| AnalysisError { stage, source })
    }
}

/// Configuration echo as stored in a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub period: String,
    #[serde(flatten)]
    pub analysis: AnalysisConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionSummary {
    pub samples: usize,
    pub defined_samples: usize,
    pub first_defined: Option<i64>,
    pub last_defined: Option<i64>,
    pub mean_min: Option<f64>,
    pub mean_max: Option<f64>,
    /// Sample standard deviation of the scanned signal.
    pub scanned_std: Option<f64>,
}

/// Everything `analyze` produced, laid out as the version 1 report schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub label: String,
    pub config: ReportConfig,
    pub decomposition: DecompositionSummary,
    pub threshold: f64,
    pub crossings: Vec<i64>,
    pub intervals: Vec<u64>,
    pub verdict: Verdict,
    #[serde(serialize_with = "whole_as_integer")]
    pub estimated_period_samples: Option<f64>,
    pub relative_dispersion: Option<f64>,
    pub conforming_fraction: Option<f64>,
    pub periodicity_rule: String,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl AnalysisReport {
    pub fn crossing_set(&self) -> CrossingSet {
        CrossingSet {
            polarity: self.config.analysis.polarity,
            threshold: self.threshold,
            times: self.crossings.clone(),
        }
    }
}

// 12.0 is written as 12, 12.5 stays 12.5.
fn whole_as_integer<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) if x.fract() == 0.0 && x.abs() < 9.0e15 => s.serialize_some(&(*x as i64)),
        Some(x) => s.serialize_some(x),
        None => s.serialize_none(),
    }
}

/// Intermediate products of a pipeline run, for callers that want to plot
/// or inspect them.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub mean: MaskedSeries,
    pub fluctuation: MaskedSeries,
    /// The signal the crossings were detected on: the fluctuation, or the
    /// normalized fluctuation.
    pub scanned: MaskedSeries,
    pub report: AnalysisReport,
}

pub fn analyze(x: &Series, cfg: &AnalysisConfig) -> Result<AnalysisReport, AnalysisError> {
    run(x, cfg).map(|a| a.report)
}

/// Like [`analyze`], keeping the intermediate series.
pub fn run(x: &Series, cfg: &AnalysisConfig) -> Result<Analysis, AnalysisError> {
    let d = decompose(x, &cfg.mean).at(Stage::Decompose)?;
    let scanned = if cfg.normalize {
        let eps = cfg.epsilon.unwrap_or_else(|| default_epsilon(x));
        normalized_fluctuation(&d, eps).at(Stage::Normalize)?
    } else {
        d.fluctuation().clone()
    };
    let threshold = estimate_threshold(&scanned, cfg.threshold).at(Stage::Threshold)?;
    let crossings = detect_crossings(&scanned, threshold, cfg.polarity).at(Stage::Detect)?;
    let intervals = inter_crossing_intervals(&crossings);
    let class = classify(&intervals, x.period(), &cfg.classify).at(Stage::Classify)?;

    let decomposition = summarize(d.mean(), &scanned);
    let (_, mean, fluctuation) = d.into_parts();
    let report = AnalysisReport {
        schema_version: SCHEMA_VERSION,
        label: x.label().to_string(),
        config: ReportConfig {
            period: x.period().to_string(),
            analysis: *cfg,
        },
        decomposition,
        threshold,
        crossings: crossings.times,
        intervals: class.intervals,
        verdict: class.verdict,
        estimated_period_samples: class.estimated_period_samples,
        relative_dispersion: class.relative_dispersion,
        conforming_fraction: class.conforming_fraction,
        periodicity_rule: PERIODICITY_RULE.to_string(),
        warnings: Vec::new(),
    };
    Ok(Analysis {
        mean,
        fluctuation,
        scanned,
        report,
    })
}

fn summarize(mean: &MaskedSeries, scanned: &MaskedSeries) -> DecompositionSummary {
    let span = mean.defined_span();
    let mut defined = mean.defined_values();
    let (mean_min, mean_max) = match defined.next() {
        Some(first) => {
            let (lo, hi) = defined.fold((first, first), |(lo, hi), v| (lo.min(v), hi.max(v)));
            (Some(lo), Some(hi))
        }
        None => (None, None),
    };
    let values: Vec<f64> = scanned.defined_values().collect();
    let scanned_std = (values.len() >= 2).then(|| {
        let n = values.len() as f64;
        let mu = values.iter().sum::<f64>() / n;
        (values.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / (n - 1.0)).sqrt()
    });
    DecompositionSummary {
        samples: mean.len(),
        defined_samples: mean.defined_count(),
        first_defined: span.map(|(a, _)| mean.start_index() + a as i64),
        last_defined: span.map(|(_, b)| mean.start_index() + b as i64),
        mean_min,
        mean_max,
        scanned_std,
    }
}
