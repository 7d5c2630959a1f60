//! Mean estimation and the mean + fluctuation split.
//!
//! The mean of a series is estimated with a moving average; the fluctuation
//! is whatever the mean leaves behind, `x(t) - mean(t)`.
//!
//! Since the fluctuation is obtained by subtraction, `mean(t) + fluctuation(t)`
//! gives back `x(t)` bit for bit whenever `x(t)` and `mean(t)` lie within a
//! factor of two of each other (the subtraction is then exact). That covers
//! positive-level data such as prices, counts and traffic volumes. When a
//! sample is tiny compared to its mean, no `f64` mean can satisfy the
//! identity exactly and the sum is off by at most one rounding.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{MaskedSeries, Series};

/// Placement of the moving-average window relative to the output sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeanKind {
    /// `[t - ceil((L-1)/2), t + floor((L-1)/2)]`. Even lengths take the
    /// extra sample from the past.
    Centered,
    /// `[t - L + 1, t]`.
    Trailing,
}

/// What to do where the full window does not fit inside the series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgePolicy {
    /// Mark those samples undefined.
    #[default]
    Undefined,
    /// Clip the window to the series and average what is available.
    Shrink,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeanConfig {
    pub kind: MeanKind,
    pub length: usize,
    pub edge_policy: EdgePolicy,
}

impl MeanConfig {
    pub fn centered(length: usize) -> Self {
        MeanConfig {
            kind: MeanKind::Centered,
            length,
            edge_policy: EdgePolicy::Undefined,
        }
    }

    pub fn trailing(length: usize) -> Self {
        MeanConfig {
            kind: MeanKind::Trailing,
            length,
            edge_policy: EdgePolicy::Undefined,
        }
    }

    pub fn with_edge_policy(mut self, edge_policy: EdgePolicy) -> Self {
        self.edge_policy = edge_policy;
        self
    }

    /// Samples taken before and after `t`.
    pub fn reach(&self) -> (usize, usize) {
        let span = self.length.saturating_sub(1);
        match self.kind {
            MeanKind::Centered => (span.div_ceil(2), span / 2),
            MeanKind::Trailing => (span, 0),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.length == 0 {
            return Err(Error::invalid(
                "length",
                "moving-average length must be >= 1",
            ));
        }
        Ok(())
    }
}

/// Moving average of `x` under `cfg`.
///
/// Each window mean is computed relative to the window's first value, so a
/// constant window yields that constant exactly.
pub fn moving_average(x: &Series, cfg: &MeanConfig) -> Result<MaskedSeries> {
    cfg.validate()?;
    let v = x.values();
    let n = v.len();
    if n == 0 {
        return Err(Error::EmptySeries);
    }
    let (back, fwd) = cfg.reach();
    let out = (0..n)
        .map(|t| {
            let lo = t.checked_sub(back);
            let hi = t.checked_add(fwd).filter(|&h| h < n);
            let (lo, hi) = match (lo, hi, cfg.edge_policy) {
                (Some(lo), Some(hi), _) => (lo, hi),
                (_, _, EdgePolicy::Undefined) => return None,
                (lo, hi, EdgePolicy::Shrink) => (lo.unwrap_or(0), hi.unwrap_or(n - 1)),
            };
            Some(window_mean(&v[lo..=hi]))
        })
        .collect();
    Ok(MaskedSeries::new(out, x.period(), x.start_index()).with_label(x.label()))
}

fn window_mean(w: &[f64]) -> f64 {
    let pivot = w[0];
    let offset: f64 = w.iter().map(|v| v - pivot).sum();
    pivot + offset / w.len() as f64
}

/// A series split into its mean and its fluctuation around that mean.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    source: Series,
    mean: MaskedSeries,
    fluctuation: MaskedSeries,
    config: MeanConfig,
}

impl Decomposition {
    /// Pairs `source` with a mean estimated elsewhere. The fluctuation is
    /// `source - mean` wherever the mean is defined.
    pub fn with_mean(source: Series, mean: MaskedSeries, config: MeanConfig) -> Result<Self> {
        if mean.len() != source.len() {
            return Err(Error::invalid(
                "mean",
                format!(
                    "length {} differs from series length {}",
                    mean.len(),
                    source.len()
                ),
            ));
        }
        if let Some(i) = mean
            .values()
            .iter()
            .position(|m| m.is_some_and(|m| !m.is_finite()))
        {
            return Err(Error::NonFiniteValue(i));
        }
        let fluct = source
            .values()
            .iter()
            .zip(mean.values())
            .map(|(v, m)| m.map(|m| v - m))
            .collect();
        let fluctuation = MaskedSeries::new(fluct, source.period(), source.start_index())
            .with_label(source.label());
        Ok(Decomposition {
            source,
            mean,
            fluctuation,
            config,
        })
    }

    pub fn source(&self) -> &Series {
        &self.source
    }

    pub fn mean(&self) -> &MaskedSeries {
        &self.mean
    }

    pub fn fluctuation(&self) -> &MaskedSeries {
        &self.fluctuation
    }

    pub fn config(&self) -> &MeanConfig {
        &self.config
    }

    pub fn into_parts(self) -> (Series, MaskedSeries, MaskedSeries) {
        (self.source, self.mean, self.fluctuation)
    }
}

pub fn decompose(x: &Series, cfg: &MeanConfig) -> Result<Decomposition> {
    let mean = moving_average(x, cfg)?;
    Decomposition::with_mean(x.clone(), mean, *cfg)
}

/// `fluctuation / mean`, undefined wherever `|mean| <= epsilon`.
pub fn normalized_fluctuation(d: &Decomposition, epsilon: f64) -> Result<MaskedSeries> {
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::invalid("epsilon", "must be finite and non-negative"));
    }
    let out: Vec<Option<f64>> = d
        .mean
        .values()
        .iter()
        .zip(d.fluctuation.values())
        .map(|(m, f)| match (m, f) {
            (Some(m), Some(f)) if m.abs() > epsilon => Some(f / m),
            _ => None,
        })
        .collect();
    if out.iter().all(Option::is_none) {
        return Err(Error::AllUndefined);
    }
    Ok(
        MaskedSeries::new(out, d.source.period(), d.source.start_index())
            .with_label(d.source.label()),
    )
}

/// Zero guard used when none is given: `1e-9 * max|x|`.
pub fn default_epsilon(x: &Series) -> f64 {
    1e-9 * x.values().iter().fold(0.0_f64, |a, v| a.max(v.abs()))
}

/// Replaces `x` by its mean, removing the fluctuation.
pub fn deseasonalize(x: &Series, cfg: &MeanConfig) -> Result<MaskedSeries> {
    Ok(decompose(x, cfg)?.mean)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::SamplingPeriod;

    fn series(v: &[f64]) -> Series {
        Series::new(v, SamplingPeriod::months(1).unwrap(), 0).unwrap()
    }

    // Direct window-average oracle: plain left-to-right sum over the window.
    fn oracle(v: &[f64], back: usize, fwd: usize, shrink: bool) -> Vec<Option<f64>> {
        let n = v.len() as i64;
        (0..n)
            .map(|t| {
                let (lo, hi) = (t - back as i64, t + fwd as i64);
                if (lo < 0 || hi >= n) && !shrink {
                    return None;
                }
                let (lo, hi) = (lo.max(0) as usize, hi.min(n - 1) as usize);
                let mut s = 0.0;
                for x in &v[lo..=hi] {
                    s += x;
                }
                Some(s / (hi - lo + 1) as f64)
            })
            .collect()
    }

    #[test]
    fn centered_small_examples() {
        let x = series(&[1.0, 2.0, 3.0]);
        let undef = moving_average(&x, &MeanConfig::centered(3)).unwrap();
        assert_eq!(undef.values(), &[None, Some(2.0), None]);
        assert_eq!(undef.values(), oracle(x.values(), 1, 1, false).as_slice());

        let cfg = MeanConfig::centered(3).with_edge_policy(EdgePolicy::Shrink);
        let shrink = moving_average(&x, &cfg).unwrap();
        assert_eq!(shrink.values(), &[Some(1.5), Some(2.0), Some(2.5)]);

        let d = decompose(&x, &cfg).unwrap();
        assert_eq!(
            d.fluctuation().values(),
            &[Some(-0.5), Some(0.0), Some(0.5)]
        );
    }

    #[test]
    fn reach_for_even_and_odd_lengths() {
        assert_eq!(MeanConfig::centered(20).reach(), (10, 9));
        assert_eq!(MeanConfig::centered(10).reach(), (5, 4));
        assert_eq!(MeanConfig::centered(3).reach(), (1, 1));
        assert_eq!(MeanConfig::centered(1).reach(), (0, 0));
        assert_eq!(MeanConfig::trailing(4).reach(), (3, 0));
    }

    #[test]
    fn matches_oracle_on_irregular_data() {
        let v: Vec<f64> = (0..37)
            .map(|i| ((i * 7919) % 101) as f64 / 3.0 - 10.0)
            .collect();
        let x = series(&v);
        for len in [1, 2, 5, 10, 20, 36, 37, 50] {
            for (kind, shrink) in [
                (MeanKind::Centered, false),
                (MeanKind::Centered, true),
                (MeanKind::Trailing, false),
                (MeanKind::Trailing, true),
            ] {
                let cfg = MeanConfig {
                    kind,
                    length: len,
                    edge_policy: if shrink {
                        EdgePolicy::Shrink
                    } else {
                        EdgePolicy::Undefined
                    },
                };
                let (back, fwd) = cfg.reach();
                let got = moving_average(&x, &cfg).unwrap();
                let want = oracle(&v, back, fwd, shrink);
                for (g, w) in got.values().iter().zip(&want) {
                    match (g, w) {
                        (Some(g), Some(w)) => assert!((g - w).abs() <= 1e-12 * w.abs().max(1.0)),
                        (None, None) => {}
                        _ => panic!("mask mismatch for {cfg:?}"),
                    }
                }
            }
        }
    }

    #[test]
    fn constant_series_is_fixed_point() {
        let x = series(&[0.1; 25]);
        for cfg in [
            MeanConfig::centered(20),
            MeanConfig::trailing(7).with_edge_policy(EdgePolicy::Shrink),
        ] {
            let d = decompose(&x, &cfg).unwrap();
            assert!(d.mean().defined_values().all(|m| m == 0.1));
            assert!(d.fluctuation().defined_values().all(|f| f == 0.0));
            assert_eq!(deseasonalize(&x, &cfg).unwrap(), *d.mean());
        }
    }

    #[test]
    fn unit_window_is_identity() {
        let x = series(&[3.0, -1.0, 4.0, 1.5]);
        let d = decompose(&x, &MeanConfig::centered(1)).unwrap();
        assert_eq!(d.mean(), &MaskedSeries::from(&x));
        assert!(d.fluctuation().values().iter().all(|f| *f == Some(0.0)));
        let m = deseasonalize(&x, &MeanConfig::trailing(1)).unwrap();
        assert_eq!(m, MaskedSeries::from(&x));
    }

    #[test]
    fn window_longer_than_series() {
        let x = series(&[1.0, 2.0, 3.0]);
        let m = moving_average(&x, &MeanConfig::centered(5)).unwrap();
        assert_eq!(m.defined_count(), 0);
        let cfg = MeanConfig::centered(5).with_edge_policy(EdgePolicy::Shrink);
        let m = moving_average(&x, &cfg).unwrap();
        assert_eq!(m.values(), &[Some(2.0), Some(2.0), Some(2.0)]);
    }

    #[test]
    fn zero_length_rejected() {
        let x = series(&[1.0]);
        assert!(moving_average(&x, &MeanConfig::centered(0)).is_err());
    }

    #[test]
    fn deseasonalize_flattens_sinusoid() {
        // Window of 24 covers exactly two periods of a 12-sample sinusoid,
        // so the direct window average is zero up to rounding.
        let v: Vec<f64> = (0..120)
            .map(|t| (2.0 * std::f64::consts::PI * t as f64 / 12.0).sin())
            .collect();
        let x = series(&v);
        let m = deseasonalize(&x, &MeanConfig::centered(24)).unwrap();
        let want = oracle(&v, 12, 11, false);
        for (g, w) in m.values().iter().zip(&want) {
            assert_eq!(g.is_some(), w.is_some());
            if let (Some(g), Some(w)) = (g, w) {
                assert!(g.abs() < 1e-12 && w.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn normalized_examples() {
        let x = series(&[3.0, 5.0]);
        let d = decompose(&x, &MeanConfig::centered(1)).unwrap();
        // Fluctuation is zero here; build a case with mean [2,4], fluct [1,1].
        assert!(normalized_fluctuation(&d, 1e-9)
            .unwrap()
            .defined_values()
            .all(|v| v == 0.0));

        let d = Decomposition {
            source: x.clone(),
            mean: MaskedSeries::new(vec![Some(2.0), Some(4.0)], x.period(), 0),
            fluctuation: MaskedSeries::new(vec![Some(1.0), Some(1.0)], x.period(), 0),
            config: MeanConfig::centered(1),
        };
        let n = normalized_fluctuation(&d, 1e-9).unwrap();
        assert_eq!(n.values(), &[Some(0.5), Some(0.25)]);
    }

    #[test]
    fn normalized_guard() {
        let x = series(&[-1.0, 1.0, -1.0, 1.0, 5.0, 7.0]);
        let cfg = MeanConfig::trailing(2);
        let d = decompose(&x, &cfg).unwrap();
        let n = normalized_fluctuation(&d, 1e-9).unwrap();
        // mean at 1..=3 is exactly zero.
        assert_eq!(&n.values()[..4], &[None, None, None, None]);
        assert_eq!(n.get(4), Some((5.0 - 3.0) / 3.0));

        let z = series(&[0.0; 5]);
        let d = decompose(&z, &MeanConfig::centered(3)).unwrap();
        assert!(matches!(
            normalized_fluctuation(&d, 0.0),
            Err(Error::AllUndefined)
        ));
        assert!(normalized_fluctuation(&d, -1.0).is_err());
    }

    #[test]
    fn unit_mean_normalization_equals_fluctuation() {
        let x = series(&[1.2, 0.7, 1.1]);
        let d = Decomposition {
            source: x.clone(),
            mean: MaskedSeries::new(vec![Some(1.0); 3], x.period(), 0),
            fluctuation: MaskedSeries::new(vec![Some(0.2), Some(-0.3), Some(0.1)], x.period(), 0),
            config: MeanConfig::centered(1),
        };
        assert_eq!(normalized_fluctuation(&d, 1e-9).unwrap(), *d.fluctuation());
    }

    #[test]
    fn default_epsilon_scales_with_data() {
        assert_eq!(default_epsilon(&series(&[-4.0, 2.0])), 4e-9);
    }
}
