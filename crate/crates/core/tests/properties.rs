use proptest::prelude::*;
use tseason::io::{parse_series_csv, read_csv_from, series_csv_string, CsvSpec, MissingPolicy};
use tseason::{
    classify, decompose, deseasonalize, detect_crossings, moving_average, ClassifyParams,
    EdgePolicy, MaskedSeries, MeanConfig, MeanKind, Polarity, SamplingPeriod, Series, TimeUnit,
};

fn monthly() -> SamplingPeriod {
    SamplingPeriod::months(1).unwrap()
}

fn series(v: Vec<f64>) -> Series {
    Series::from_vec(v, monthly(), 0).unwrap()
}

fn rel_close(a: f64, b: f64, scale: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * scale.max(f64::MIN_POSITIVE)
}

fn values(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e3..1e3f64, len)
}

/// Positive-level data: every sample within a factor of two of any window
/// mean.
fn positive_level(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    (1.0..1e6f64, prop::collection::vec(-0.3..0.3f64, len))
        .prop_map(|(level, r)| r.into_iter().map(|e| level * (1.0 + e)).collect())
}

fn mean_config() -> impl Strategy<Value = MeanConfig> {
    (
        prop_oneof![Just(MeanKind::Centered), Just(MeanKind::Trailing)],
        1usize..40,
        prop_oneof![Just(EdgePolicy::Undefined), Just(EdgePolicy::Shrink)],
    )
        .prop_map(|(kind, length, edge_policy)| MeanConfig {
            kind,
            length,
            edge_policy,
        })
}

fn brute(f: &[Option<f64>], thr: f64, pol: Polarity) -> Vec<i64> {
    let mut out = Vec::new();
    for t in 1..f.len() {
        if let (Some(cur), Some(prev)) = (f[t], f[t - 1]) {
            let side = match pol {
                Polarity::Positive => cur > thr,
                Polarity::Negative => cur < -thr,
                Polarity::Both => true,
            };
            if cur.abs() > thr && prev.abs() <= thr && side {
                out.push(t as i64);
            }
        }
    }
    out
}

proptest! {
    #[test]
    fn rescale_conserves_sum(v in values(1..300), w in 1usize..20) {
        prop_assume!(v.len() >= w);
        let x = series(v.clone());
        let y = x.rescale_sum(w).unwrap();
        let kept = v.len() / w * w;
        let want: f64 = v[..kept].iter().sum();
        let got: f64 = y.values().iter().sum();
        let scale: f64 = v[..kept].iter().map(|a| a.abs()).sum();
        prop_assert!(rel_close(got, want, scale, 1e-9));
        prop_assert_eq!(y.len(), v.len() / w);
    }

    #[test]
    fn rescale_composes(v in values(1..400), a in 1usize..8, b in 1usize..8) {
        prop_assume!(v.len() >= a * b);
        let x = series(v);
        let twice = x.rescale_sum(a).unwrap().rescale_sum(b).unwrap();
        let once = x.rescale_sum(a * b).unwrap();
        prop_assert_eq!(twice.len(), once.len());
        prop_assert_eq!(twice.period(), once.period());
        for (p, q) in twice.values().iter().zip(once.values()) {
            let scale = x.values().iter().map(|v| v.abs()).sum::<f64>();
            prop_assert!(rel_close(*p, *q, scale, 1e-9));
        }
    }

    #[test]
    fn rescale_mean_is_sum_over_window(v in values(1..200), w in 1usize..12) {
        prop_assume!(v.len() >= w);
        let x = series(v);
        let s = x.rescale_sum(w).unwrap();
        let m = x.rescale_mean(w).unwrap();
        for (s, m) in s.values().iter().zip(m.values()) {
            prop_assert_eq!(s / w as f64, *m);
        }
    }

    #[test]
    fn additivity_is_exact_on_positive_level(v in positive_level(1..200), cfg in mean_config()) {
        let x = series(v);
        let d = decompose(&x, &cfg).unwrap();
        for (i, src) in x.values().iter().enumerate() {
            prop_assert_eq!(d.mean().is_defined(i), d.fluctuation().is_defined(i));
            if let (Some(m), Some(f)) = (d.mean().get(i), d.fluctuation().get(i)) {
                prop_assert_eq!((m + f).to_bits(), src.to_bits());
            }
        }
    }

    #[test]
    fn additivity_within_rounding_in_general(v in values(1..200), cfg in mean_config()) {
        let x = series(v);
        let d = decompose(&x, &cfg).unwrap();
        for (i, src) in x.values().iter().enumerate() {
            if let (Some(m), Some(f)) = (d.mean().get(i), d.fluctuation().get(i)) {
                let scale = src.abs().max(m.abs());
                prop_assert!((m + f - src).abs() <= 2.0 * f64::EPSILON * scale);
            }
        }
    }

    #[test]
    fn moving_average_is_linear(
        xs in values(1..120),
        ys in values(1..120),
        a in -5.0..5.0f64,
        b in -5.0..5.0f64,
        cfg in mean_config(),
    ) {
        let n = xs.len().min(ys.len());
        let (xs, ys) = (&xs[..n], &ys[..n]);
        let combo: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| a * x + b * y).collect();
        let mx = moving_average(&series(xs.to_vec()), &cfg).unwrap();
        let my = moving_average(&series(ys.to_vec()), &cfg).unwrap();
        let mc = moving_average(&series(combo), &cfg).unwrap();
        let scale = a.abs() * xs.iter().fold(0.0f64, |m, v| m.max(v.abs()))
            + b.abs() * ys.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..n {
            match (mc.get(i), mx.get(i), my.get(i)) {
                (Some(c), Some(p), Some(q)) => prop_assert!(rel_close(c, a * p + b * q, scale, 1e-9)),
                (None, None, None) => {}
                other => prop_assert!(false, "mask mismatch {:?}", other),
            }
        }
    }

    #[test]
    fn shift_equivariance(v in values(2..150), k in 1usize..20, len in 1usize..15) {
        prop_assume!(k < v.len());
        let cfg = MeanConfig::centered(len);
        let full = moving_average(&series(v.clone()), &cfg).unwrap();
        let cut = moving_average(&series(v[k..].to_vec()), &cfg).unwrap();
        for i in 0..cut.len() {
            if let Some(c) = cut.get(i) {
                prop_assert_eq!(Some(c), full.get(i + k));
            }
        }
        // Relabelling the first index shifts every index and keeps values.
        let moved = Series::from_vec(v.clone(), monthly(), 7).unwrap();
        let m = moving_average(&moved, &cfg).unwrap();
        prop_assert_eq!(m.start_index(), 7);
        prop_assert_eq!(m.values(), full.values());
    }

    #[test]
    fn mask_law(v in values(1..150), len in 1usize..40) {
        prop_assume!(v.len() >= len);
        let x = series(v);
        let m = moving_average(&x, &MeanConfig::centered(len)).unwrap();
        prop_assert_eq!(m.len() - m.defined_count(), len - 1);
        let m = moving_average(&x, &MeanConfig::trailing(len)).unwrap();
        prop_assert_eq!(m.len() - m.defined_count(), len - 1);
        let shrink = MeanConfig::centered(len).with_edge_policy(EdgePolicy::Shrink);
        prop_assert_eq!(moving_average(&x, &shrink).unwrap().defined_count(), x.len());
    }

    #[test]
    fn deseasonalize_is_decomposition_mean(v in values(1..100), cfg in mean_config()) {
        let x = series(v);
        let d = decompose(&x, &cfg).unwrap();
        prop_assert_eq!(&deseasonalize(&x, &cfg).unwrap(), d.mean());
    }

    #[test]
    fn crossings_match_definition(
        v in prop::collection::vec(prop::option::weighted(0.9, -3.0..3.0f64), 1..300),
        thr in 0.01..2.5f64,
    ) {
        prop_assume!(v.iter().any(Option::is_some));
        let f = MaskedSeries::new(v.clone(), monthly(), 0);
        for pol in [Polarity::Positive, Polarity::Negative, Polarity::Both] {
            let c = detect_crossings(&f, thr, pol).unwrap();
            prop_assert_eq!(&c.times, &brute(&v, thr, pol));
            prop_assert!(c.times.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn polarity_partition(v in prop::collection::vec(-3.0..3.0f64, 2..300), thr in 0.01..2.5f64) {
        let f = MaskedSeries::from(&series(v));
        let p = detect_crossings(&f, thr, Polarity::Positive).unwrap().times;
        let n = detect_crossings(&f, thr, Polarity::Negative).unwrap().times;
        let b = detect_crossings(&f, thr, Polarity::Both).unwrap().times;
        prop_assert!(p.iter().all(|t| !n.contains(t)));
        let mut union: Vec<i64> = p.into_iter().chain(n).collect();
        union.sort_unstable();
        prop_assert_eq!(union, b);
    }

    #[test]
    fn crossing_scale_invariance(
        v in prop::collection::vec(-3.0..3.0f64, 2..200),
        thr in 0.01..2.5f64,
        e in -4i32..5,
    ) {
        // Powers of two scale exactly, so the comparison is not blurred by
        // rounding.
        let c = 2f64.powi(e);
        let f = MaskedSeries::from(&series(v.clone()));
        let g = MaskedSeries::from(&series(v.iter().map(|x| x * c).collect()));
        for pol in [Polarity::Positive, Polarity::Negative, Polarity::Both] {
            prop_assert_eq!(
                detect_crossings(&f, thr, pol).unwrap().times,
                detect_crossings(&g, thr * c, pol).unwrap().times
            );
        }
    }

    #[test]
    fn higher_threshold_crossings_nest(
        v in prop::collection::vec(-3.0..3.0f64, 2..200),
        lo in 0.01..1.5f64,
        extra in 0.0..1.5f64,
    ) {
        let hi = lo + extra;
        let f = MaskedSeries::from(&series(v.clone()));
        for t in detect_crossings(&f, hi, Polarity::Both).unwrap().times {
            prop_assert!(v[t as usize].abs() > lo);
        }
    }

    #[test]
    fn classify_permutation_invariant(
        mut iv in prop::collection::vec(1u64..60, 0..20),
        rho in 0.0..0.6f64,
        q in 0.05..1.0f64,
        seed in any::<u64>(),
    ) {
        let p = ClassifyParams { rho, q, min_crossings: 3 };
        let a = classify(&iv, monthly(), &p).unwrap();
        // Deterministic shuffle.
        let mut s = seed;
        for i in (1..iv.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            iv.swap(i, (s >> 33) as usize % (i + 1));
        }
        let b = classify(&iv, monthly(), &p).unwrap();
        prop_assert_eq!(a.verdict, b.verdict);
        prop_assert_eq!(a.estimated_period_samples, b.estimated_period_samples);
        prop_assert_eq!(a.relative_dispersion, b.relative_dispersion);
    }

    #[test]
    fn classify_unit_relabelling(iv in prop::collection::vec(1u64..400, 2..12)) {
        // Days and the equivalent number of hours describe the same duration.
        let p = ClassifyParams::default();
        let days = SamplingPeriod::new(1, TimeUnit::Day).unwrap();
        let hours = SamplingPeriod::new(24, TimeUnit::Hour).unwrap();
        prop_assert_eq!(
            classify(&iv, days, &p).unwrap().verdict,
            classify(&iv, hours, &p).unwrap().verdict
        );
    }

    #[test]
    fn series_csv_round_trip(
        v in prop::collection::vec(prop::option::weighted(0.8, any::<f64>().prop_filter("finite", |x| x.is_finite())), 1..100),
        start in -50i64..50,
    ) {
        let m = MaskedSeries::new(v, monthly(), start);
        let text = series_csv_string(&m);
        let back = parse_series_csv(&text, monthly()).unwrap();
        prop_assert_eq!(back.start_index(), m.start_index());
        for (a, b) in back.values().iter().zip(m.values()) {
            prop_assert_eq!(a.map(f64::to_bits), b.map(f64::to_bits));
        }
        // Same bytes, same series.
        prop_assert_eq!(parse_series_csv(&text, monthly()).unwrap(), back);
    }

    #[test]
    fn defined_values_survive_generic_reader(v in prop::collection::vec(prop::option::weighted(0.8, -1e9..1e9f64), 1..60)) {
        prop_assume!(v.iter().any(Option::is_some));
        let m = MaskedSeries::new(v.clone(), monthly(), 0);
        let text = series_csv_string(&m);
        let spec = CsvSpec {
            value_column: "value".into(),
            missing_policy: MissingPolicy::InterpolateLinear,
            ..Default::default()
        };
        let first = v.iter().position(Option::is_some).unwrap();
        let last = v.iter().rposition(Option::is_some).unwrap();
        // Trim the masked edges so interpolation only fills interior gaps.
        let inner = MaskedSeries::new(v[first..=last].to_vec(), monthly(), 0);
        let read = read_csv_from(series_csv_string(&inner).as_bytes(), &spec, monthly()).unwrap();
        for (got, orig) in read.series.values().iter().zip(inner.values()) {
            if let Some(o) = orig {
                prop_assert_eq!(got.to_bits(), o.to_bits());
            }
        }
        prop_assert!(text.starts_with("index,value,defined\n"));
    }
}
