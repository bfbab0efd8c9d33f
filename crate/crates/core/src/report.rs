//! CSV tables and SVG line charts.
//!
//! Number formatting is fixed so that outputs are byte-identical across runs
//! and platforms: series estimates carry 6 significant digits, ratios and
//! percentage errors 5 decimals.

use std::fmt::Write as _;
use std::path::Path;

use crate::analysis::{CountSeries, SeriesPoint};
use crate::error::{LabError, Result};

pub const SERIES_HEADER: &str = "x,actual,estimate,ratio,abs_pct_err";
pub const TABLE1_HEADER: &str = "d,largest_element,actual_count,estimate,R_d,abs_R_minus_1,mape_pct";
pub const TABLE2_HEADER: &str = "norm_bound,mape_pct";

/// Formats `v` with exactly `digits` significant digits in plain decimal
/// notation (no exponent). Trailing zeros are kept.
pub fn format_sig(v: f64, digits: usize) -> String {
    assert!(digits >= 1);
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0".to_string() } else { v.to_string() };
    }
    let sci = format!("{:.*e}", digits - 1, v.abs());
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let mantissa: String = mantissa.chars().filter(|c| *c != '.').collect();
    let sign = if v < 0.0 { "-" } else { "" };
    let n = mantissa.len() as i32;
    let body = if exp >= n - 1 {
        format!("{mantissa}{}", "0".repeat((exp - (n - 1)) as usize))
    } else if exp >= 0 {
        let (int, frac) = mantissa.split_at(exp as usize + 1);
        format!("{int}.{frac}")
    } else {
        format!("0.{}{mantissa}", "0".repeat((-exp - 1) as usize))
    };
    format!("{sign}{body}")
}

pub fn series_csv(series: &CountSeries) -> String {
    let mut out = String::with_capacity(32 * (series.len() + 1));
    out.push_str(SERIES_HEADER);
    out.push('\n');
    for p in series.points() {
        let _ = write!(out, "{},{},{},{:.5},", p.x, p.actual, format_sig(p.estimate, 6), p.ratio);
        if let Some(e) = p.pct_err {
            let _ = write!(out, "{e:.5}");
        }
        out.push('\n');
    }
    out
}

/// Parses a series CSV back into points (to the printed precision).
pub fn parse_series_csv(text: &str) -> Result<Vec<SeriesPoint>> {
    let mut lines = text.lines();
    if lines.next() != Some(SERIES_HEADER) {
        return Err(LabError::invalid("missing series CSV header"));
    }
    let bad = |line: &str| LabError::invalid(format!("malformed series CSV row: {line:?}"));
    lines
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 5 {
                return Err(bad(line));
            }
            let pct_err = match f[4] {
                "" => None,
                s => Some(s.parse().map_err(|_| bad(line))?),
            };
            Ok(SeriesPoint {
                x: f[0].parse().map_err(|_| bad(line))?,
                actual: f[1].parse().map_err(|_| bad(line))?,
                estimate: f[2].parse().map_err(|_| bad(line))?,
                ratio: f[3].parse().map_err(|_| bad(line))?,
                pct_err,
            })
        })
        .collect()
}

/// One row of the monoid summary table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Table1Row {
    pub d: u64,
    pub largest_element: u64,
    pub actual_count: u64,
    pub estimate: f64,
    pub r_d: f64,
    pub mape_pct: f64,
}

impl Table1Row {
    pub fn abs_r_minus_1(&self) -> f64 {
        (self.r_d - 1.0).abs()
    }

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{:.2},{:.5},{:.5},{:.2}",
            self.d,
            self.largest_element,
            self.actual_count,
            self.estimate,
            self.r_d,
            self.abs_r_minus_1(),
            self.mape_pct
        )
    }
}

pub fn table1_csv(rows: &[Table1Row]) -> String {
    let mut out = format!("{TABLE1_HEADER}\n");
    for r in rows {
        out.push_str(&r.csv_line());
        out.push('\n');
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Table2Row {
    pub norm_bound: u64,
    pub mape_pct: f64,
}

impl Table2Row {
    pub fn csv_line(&self) -> String {
        format!("{},{:.3}", self.norm_bound, self.mape_pct)
    }
}

pub fn table2_csv(rows: &[Table2Row]) -> String {
    let mut out = format!("{TABLE2_HEADER}\n");
    for r in rows {
        out.push_str(&r.csv_line());
        out.push('\n');
    }
    out
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents)
        .map_err(|source| LabError::Io { path: path.display().to_string(), source })
}

pub fn write_csv(series: &CountSeries, path: &Path) -> Result<()> {
    write_file(path, &series_csv(series))
}

pub fn render_svg(series: &CountSeries, path: &Path) -> Result<()> {
    write_file(path, &svg_string(series)?)
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 60.0;
const BOTTOM: f64 = 70.0;
/// Longer series are thinned to this many evenly spaced points.
pub const MAX_PLOT_POINTS: usize = 2_000;
const ACTUAL_COLOR: &str = "#1f77b4";
const ESTIMATE_COLOR: &str = "#ff7f0e";

/// Renders actual and estimate as two polylines on linear axes.
pub fn svg_string(series: &CountSeries) -> Result<String> {
    let pts = series.points();
    if pts.is_empty() {
        return Err(LabError::invalid("cannot plot an empty series"));
    }
    let shown: Vec<&SeriesPoint> = if pts.len() > MAX_PLOT_POINTS {
        (0..MAX_PLOT_POINTS)
            .map(|i| &pts[i * (pts.len() - 1) / (MAX_PLOT_POINTS - 1)])
            .collect()
    } else {
        pts.iter().collect()
    };

    let (mut x_lo, mut x_hi) = (pts[0].x as f64, pts[pts.len() - 1].x as f64);
    if x_hi <= x_lo {
        x_lo -= 1.0;
        x_hi += 1.0;
    }
    let y_max = pts.iter().map(|p| (p.actual as f64).max(p.estimate)).fold(0.0, f64::max);
    let y_ticks = nice_ticks(0.0, if y_max > 0.0 { y_max } else { 1.0 });
    let y_hi = *y_ticks.last().expect("at least one tick");
    let x_ticks = nice_ticks(x_lo, x_hi);

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = |y: f64| TOP + plot_h - y / y_hi * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="30" font-size="16" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        xml_escape(&series.title())
    );

    // axes, grid and ticks
    let (x0, x1, y0, y1) = (LEFT, LEFT + plot_w, TOP + plot_h, TOP);
    for &t in &y_ticks {
        let y = sy(t);
        let _ = writeln!(
            s,
            r##"<line x1="{x0:.2}" y1="{y:.2}" x2="{x1:.2}" y2="{y:.2}" stroke="#e0e0e0"/>"##
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="end">{}</text>"#,
            x0 - 8.0,
            y + 4.0,
            tick_label(t, tick_step(&y_ticks))
        );
    }
    for &t in x_ticks.iter().filter(|&&t| t >= x_lo && t <= x_hi) {
        let x = sx(t);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{y0:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#,
            y0 + 6.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" font-size="12" text-anchor="middle">{}</text>"#,
            y0 + 22.0,
            tick_label(t, tick_step(&x_ticks))
        );
    }
    let _ = writeln!(
        s,
        r#"<polyline points="{x0:.2},{y1:.2} {x0:.2},{y0:.2} {x1:.2},{y0:.2}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-size="14" text-anchor="middle">x</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 20.0
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.2}" font-size="14" text-anchor="middle" transform="rotate(-90 20 {:.2})">count</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    let actual: Vec<(f64, f64)> = shown.iter().map(|p| (sx(p.x as f64), sy(p.actual as f64))).collect();
    let estimate: Vec<(f64, f64)> = shown.iter().map(|p| (sx(p.x as f64), sy(p.estimate))).collect();
    for (name, line, color) in [("actual", &actual, ACTUAL_COLOR), ("estimate", &estimate, ESTIMATE_COLOR)] {
        let mut coords: Vec<String> = line.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        if coords.len() == 1 {
            coords.push(coords[0].clone());
        }
        let _ = writeln!(
            s,
            r#"<polyline class="{name}" points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            coords.join(" ")
        );
        if line.len() == 1 {
            let (x, y) = line[0];
            let _ = writeln!(s, r#"<circle class="{name}" cx="{x:.2}" cy="{y:.2}" r="4" fill="{color}"/>"#);
        }
    }

    // legend
    let (lx, ly) = (LEFT + 16.0, TOP + 12.0);
    let _ = writeln!(
        s,
        r#"<rect x="{lx:.2}" y="{ly:.2}" width="120" height="52" fill="white" stroke="gray"/>"#
    );
    for (i, (name, color)) in [("actual", ACTUAL_COLOR), ("estimate", ESTIMATE_COLOR)].iter().enumerate() {
        let y = ly + 18.0 + 20.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{color}" stroke-width="2"/>"#,
            lx + 10.0,
            lx + 40.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="13">{name}</text>"#,
            lx + 48.0,
            y + 4.0
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn tick_step(ticks: &[f64]) -> f64 {
    if ticks.len() >= 2 { ticks[1] - ticks[0] } else { 1.0 }
}

/// Ticks at multiples of a 1/2/5·10^k step covering `[lo, hi]`.
fn nice_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|&s| s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).floor() as i64;
    let last = (hi / step).ceil() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn tick_label(v: f64, step: f64) -> String {
    if step >= 1.0 {
        format!("{:.0}", v)
    } else {
        let decimals = (-step.log10()).ceil() as usize;
        format!("{v:.decimals$}")
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::Domain;

    fn series(points: &[(u64, u64, f64)]) -> CountSeries {
        let pts = points.iter().map(|&(x, a, e)| SeriesPoint::new(x, a, e).unwrap()).collect();
        CountSeries::new(Domain::Monoid { d: 3 }, "x/(3·(ln x)^(1/3))", pts).unwrap()
    }

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(1590.2096, 6), "1590.21");
        assert_eq!(format_sig(0.90609, 6), "0.906090");
        assert_eq!(format_sig(0.000123456789, 6), "0.000123457");
        assert_eq!(format_sig(664811.7, 6), "664812");
        assert_eq!(format_sig(12345678.0, 6), "12345700");
        assert_eq!(format_sig(9.9999996, 6), "10.0000");
        assert_eq!(format_sig(-2.5, 6), "-2.50000");
        assert_eq!(format_sig(0.0, 6), "0");
    }

    #[test]
    fn empty_series_is_header_only() {
        let s = CountSeries::new(Domain::Classical, "x/ln x", vec![]).unwrap();
        assert_eq!(series_csv(&s), format!("{SERIES_HEADER}\n"));
        assert!(svg_string(&s).is_err());
    }

    #[test]
    fn series_rows() {
        let s = series(&[(4, 0, 1.5), (10_000, 1380, 1590.2096)]);
        let csv = series_csv(&s);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[1], "4,0,1.50000,0.00000,");
        assert_eq!(lines[2], "10000,1380,1590.21,0.86781,15.23258");
    }

    #[test]
    fn csv_round_trip() {
        let s = series(&[(4, 0, 1.5), (7, 1, 2.25), (10, 2, 3.125), (10_000, 1380, 1590.2096)]);
        let back = parse_series_csv(&series_csv(&s)).unwrap();
        assert_eq!(back.len(), s.len());
        for (a, b) in s.points().iter().zip(&back) {
            assert_eq!(a.x, b.x);
            assert_eq!(a.actual, b.actual);
            assert!((a.estimate - b.estimate).abs() <= 5e-6 * a.estimate);
            assert!((a.ratio - b.ratio).abs() <= 5e-6);
            match (a.pct_err, b.pct_err) {
                (Some(x), Some(y)) => assert!((x - y).abs() <= 5e-6),
                (None, None) => {}
                other => panic!("pct_err mismatch {other:?}"),
            }
        }
    }

    #[test]
    fn table_rows() {
        let row = Table1Row {
            d: 13,
            largest_element: 9998,
            actual_count: 653,
            estimate: 648.3299,
            r_d: 653.0 / 648.3299,
            mape_pct: 2.9612,
        };
        assert_eq!(row.csv_line(), "13,9998,653,648.33,1.00720,0.00720,2.96");
        let t2 = Table2Row { norm_bound: 1_000_000, mape_pct: 8.69512 };
        assert_eq!(t2.csv_line(), "1000000,8.695");
        assert!(table2_csv(&[t2]).starts_with("norm_bound,mape_pct\n"));
    }

    #[test]
    fn svg_has_two_polylines_and_legend() {
        let s = series(&[(4, 1, 1.5), (7, 2, 2.25), (10, 2, 3.125)]);
        let svg = svg_string(&s).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains(r#"width="800" height="600""#));
        assert_eq!(svg.matches(r#"<polyline class="#).count(), 2);
        assert!(svg.contains(">actual</text>"));
        assert!(svg.contains(">estimate</text>"));
        assert!(svg.contains("monoid primes of A_3"));
        assert_eq!(svg, svg_string(&s).unwrap());
    }

    #[test]
    fn single_point_svg_uses_markers() {
        let s = series(&[(10_000, 1380, 1590.2)]);
        let svg = svg_string(&s).unwrap();
        assert_eq!(svg.matches("<circle").count(), 2);
        assert_eq!(svg.matches(r#"<polyline class="#).count(), 2);
    }

    #[test]
    fn long_series_are_thinned() {
        let pts: Vec<(u64, u64, f64)> = (2..10_000).map(|x| (x, x / 2, x as f64 / 2.0)).collect();
        let svg = svg_string(&series(&pts)).unwrap();
        let line = svg.lines().find(|l| l.contains(r#"class="actual""#)).unwrap();
        assert_eq!(line.matches(',').count(), MAX_PLOT_POINTS);
    }

    #[test]
    fn ticks_are_nice() {
        assert_eq!(nice_ticks(0.0, 1590.0), vec![0.0, 500.0, 1000.0, 1500.0, 2000.0]);
        assert_eq!(tick_label(0.5, 0.1), "0.5");
        assert_eq!(tick_label(2000.0, 500.0), "2000");
    }
}
