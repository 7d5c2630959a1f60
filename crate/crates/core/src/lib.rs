//! Seasonalities and cycles from threshold crossings.
//!
//! A uniformly sampled series is split into a smooth mean, estimated with a
//! moving average, and a quickly fluctuating residual. Excursions of the
//! residual beyond a threshold mark crossing times; when the gaps between
//! crossings are roughly constant the series has a *strong* seasonality (gap
//! shorter than a year) or a *strong* cycle (a year or more), otherwise a
//! *weak* one. Deseasonalizing a series means keeping only its mean.
//!
//! Seasonalities depend on the time scale. [`Series::rescale_sum`] and
//! [`Series::rescale_mean`] move a series to a coarser grid, where patterns
//! buried in fine-grained noise can become visible.
//!
//! ```
//! use tseason::{analyze, AnalysisConfig, MeanConfig, SamplingPeriod, Series, Verdict};
//!
//! let values: Vec<f64> = (0..120)
//!     .map(|t| 100.0 + 10.0 * (2.0 * std::f64::consts::PI * t as f64 / 6.0).sin())
//!     .collect();
//! let x = Series::new(&values, SamplingPeriod::months(1)?, 0)?;
//! let report = analyze(&x, &AnalysisConfig::new(MeanConfig::centered(20)))?;
//! assert_eq!(report.verdict, Verdict::StrongSeasonality);
//! assert_eq!(report.estimated_period_samples, Some(6.0));
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod analysis;
pub mod decompose;
pub mod detect;
mod error;
pub mod io;
pub mod series;

pub use analysis::{analyze, run, Analysis, AnalysisConfig, AnalysisError, AnalysisReport, Stage};
pub use decompose::{
    decompose, deseasonalize, moving_average, normalized_fluctuation, Decomposition, EdgePolicy,
    MeanConfig, MeanKind,
};
pub use detect::{
    classify, detect_crossings, estimate_threshold, inter_crossing_intervals, Classification,
    ClassifyParams, CrossingSet, Polarity, ThresholdSpec, Verdict,
};
pub use error::{Error, Result};
pub use series::{duration_in_years, MaskedSeries, SamplingPeriod, Series, TimeUnit};

// Compiles and runs the guide's code listings as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/series.md")]
    struct TimeScales;
    #[doc = include_str!("../../../book/src/decomposition.md")]
    struct Decomposition;
    #[doc = include_str!("../../../book/src/crossings.md")]
    struct Crossings;
    #[doc = include_str!("../../../book/src/classification.md")]
    struct Classification;
    #[doc = include_str!("../../../book/src/io.md")]
    struct FileFormats;
    #[doc = include_str!("../../../book/src/cli.md")]
    struct CommandLine;
}
