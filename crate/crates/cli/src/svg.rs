//! Minimal SVG 1.1 line and stem charts.
//!
//! Output depends only on the input numbers, so identical input gives
//! byte-identical files.

use std::fmt::Write as _;

use tseason::MaskedSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Canvas {
    pub width: u32,
    pub height: u32,
}

impl Default for Canvas {
    fn default() -> Self {
        Canvas {
            width: 1200,
            height: 500,
        }
    }
}

const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 40.0;

struct Frame {
    canvas: Canvas,
    x_max: f64,
    y_min: f64,
    y_max: f64,
    body: String,
}

impl Frame {
    fn new(canvas: Canvas, n: usize, lo: f64, hi: f64, title: &str) -> Frame {
        let (y_min, y_max) = if hi > lo {
            let pad = 0.05 * (hi - lo);
            (lo - pad, hi + pad)
        } else {
            (lo - 1.0, hi + 1.0)
        };
        let mut f = Frame {
            canvas,
            x_max: (n.max(2) - 1) as f64,
            y_min,
            y_max,
            body: String::new(),
        };
        let (x0, y0, x1, y1) = (LEFT, TOP, f.right(), f.bottom());
        writeln!(
            f.body,
            r#"<path class="axes" d="M{x0:.2},{y0:.2} L{x0:.2},{y1:.2} L{x1:.2},{y1:.2}" fill="none" stroke="black"/>"#
        )
        .unwrap();
        writeln!(
            f.body,
            r#"<text x="{:.2}" y="24" font-size="16" text-anchor="middle">{}</text>"#,
            canvas.width as f64 / 2.0,
            escape(title)
        )
        .unwrap();
        for (v, y) in [(y_max, y0), (y_min, y1)] {
            writeln!(
                f.body,
                r#"<text x="{:.2}" y="{y:.2}" font-size="12" text-anchor="end">{}</text>"#,
                LEFT - 6.0,
                tick(v)
            )
            .unwrap();
        }
        writeln!(
            f.body,
            r#"<text x="{x1:.2}" y="{:.2}" font-size="12" text-anchor="end">{}</text>"#,
            y1 + 16.0,
            n.saturating_sub(1)
        )
        .unwrap();
        f
    }

    fn right(&self) -> f64 {
        self.canvas.width as f64 - RIGHT
    }

    fn bottom(&self) -> f64 {
        self.canvas.height as f64 - BOTTOM
    }

    fn px(&self, i: f64) -> f64 {
        LEFT + (self.right() - LEFT) * i / self.x_max
    }

    fn py(&self, v: f64) -> f64 {
        self.bottom() - (self.bottom() - TOP) * (v - self.y_min) / (self.y_max - self.y_min)
    }

    /// One polyline per run of defined samples.
    fn polylines(&mut self, values: &[Option<f64>], class: &str, color: &str) {
        let mut run: Vec<(usize, f64)> = Vec::new();
        for (i, v) in values
            .iter()
            .enumerate()
            .chain(std::iter::once((values.len(), &None)))
        {
            match v {
                Some(v) => run.push((i, *v)),
                None if !run.is_empty() => {
                    let pts: Vec<String> = run
                        .iter()
                        .map(|&(i, v)| format!("{:.2},{:.2}", self.px(i as f64), self.py(v)))
                        .collect();
                    writeln!(
                        self.body,
                        r#"<polyline class="{class}" points="{}" fill="none" stroke="{color}" stroke-width="1"/>"#,
                        pts.join(" ")
                    )
                    .unwrap();
                    run.clear();
                }
                None => {}
            }
        }
    }

    fn rule(&mut self, v: f64, class: &str) {
        let y = self.py(v);
        writeln!(
            self.body,
            r#"<line class="{class}" x1="{LEFT:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="red" stroke-width="1"/>"#,
            self.right()
        )
        .unwrap();
    }

    fn finish(self) -> String {
        let Canvas { width, height } = self.canvas;
        format!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
             <svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n\
             <rect width=\"{width}\" height=\"{height}\" fill=\"white\"/>\n{}</svg>\n",
            self.body
        )
    }
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e6 || v.abs() < 1e-3) {
        format!("{v:.3e}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn bounds<'a>(values: impl Iterator<Item = &'a Option<f64>>) -> Option<(f64, f64)> {
    values.flatten().fold(None, |acc, &v| match acc {
        None => Some((v, v)),
        Some((lo, hi)) => Some((f64::min(lo, v), f64::max(hi, v))),
    })
}

/// The series in blue with its mean in red.
pub fn series_with_mean(
    source: &[f64],
    mean: &MaskedSeries,
    canvas: Canvas,
    title: &str,
) -> String {
    let src: Vec<Option<f64>> = source.iter().copied().map(Some).collect();
    let (lo, hi) = bounds(src.iter().chain(mean.values())).unwrap_or((0.0, 0.0));
    let mut f = Frame::new(canvas, src.len(), lo, hi, title);
    f.polylines(&src, "series", "blue");
    f.polylines(mean.values(), "mean", "red");
    f.finish()
}

/// The fluctuation with horizontal rules at `+threshold` and `-threshold`.
pub fn fluctuation_with_threshold(
    fluct: &MaskedSeries,
    threshold: f64,
    canvas: Canvas,
    title: &str,
) -> String {
    let (lo, hi) = bounds(fluct.values().iter()).unwrap_or((0.0, 0.0));
    let mut f = Frame::new(
        canvas,
        fluct.len(),
        lo.min(-threshold),
        hi.max(threshold),
        title,
    );
    f.polylines(fluct.values(), "fluctuation", "blue");
    f.rule(threshold, "threshold");
    f.rule(-threshold, "threshold");
    f.finish()
}

/// One vertical stem per inter-crossing interval.
pub fn interval_stem(intervals: &[u64], canvas: Canvas, title: &str) -> String {
    let hi = intervals.iter().copied().max().unwrap_or(0) as f64;
    let mut f = Frame::new(canvas, intervals.len() + 2, 0.0, hi, title);
    let base = f.py(0.0);
    for (i, &d) in intervals.iter().enumerate() {
        let x = f.px((i + 1) as f64);
        let y = f.py(d as f64);
        writeln!(
            f.body,
            r#"<line class="stem" x1="{x:.2}" y1="{base:.2}" x2="{x:.2}" y2="{y:.2}" stroke="blue" stroke-width="2"/>"#
        )
        .unwrap();
        writeln!(
            f.body,
            r#"<circle class="stem-head" cx="{x:.2}" cy="{y:.2}" r="3" fill="blue"/>"#
        )
        .unwrap();
    }
    f.finish()
}
