//! Seeded synthetic fixtures shared by the integration and acceptance tests.
//!
//! Every generator is a pure function of its seed, so the files written from
//! them are identical on every run.

#![allow(dead_code)]

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `100 + 0.05 t + 10 sin(2πt/12) + U[-1, 1]`.
pub fn trend_sinusoid(seed: u64, n: usize) -> Vec<f64> {
    let mut r = rng(seed);
    (0..n)
        .map(|t| {
            let t = t as f64;
            100.0 + 0.05 * t + 10.0 * (2.0 * PI * t / 12.0).sin() + r.gen_range(-1.0..=1.0)
        })
        .collect()
}

/// Zero-mean white noise, uniform on `[-1, 1]`.
pub fn white_noise(seed: u64, n: usize) -> Vec<f64> {
    let mut r = rng(seed);
    (0..n).map(|_| r.gen_range(-1.0..=1.0)).collect()
}

/// Five-minute samples over eight weeks: a daily sinusoid of amplitude 1 on a
/// level of 100, plus uniform noise of three times the amplitude.
pub fn daily_traffic(seed: u64) -> Vec<f64> {
    let per_day = 288;
    let n = 8 * 7 * per_day;
    let mut r = rng(seed);
    (0..n)
        .map(|t| {
            let phase = 2.0 * PI * t as f64 / per_day as f64;
            100.0 + phase.sin() + r.gen_range(-3.0..=3.0)
        })
        .collect()
}

/// A one-column CSV with a `value` header and round-trip formatting.
pub fn csv_text(values: &[f64]) -> String {
    let mut s = String::from("value\n");
    for v in values {
        writeln!(s, "{v:?}").unwrap();
    }
    s
}

pub fn write_csv(dir: &Path, name: &str, values: &[f64]) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, csv_text(values)).unwrap();
    path
}
