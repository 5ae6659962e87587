//! Static SVG line plots.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// A named curve made of disconnected polyline segments.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub segments: Vec<Vec<(f64, f64)>>,
    pub dashed: bool,
}

impl Series {
    pub fn line(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Series { label: label.into(), segments: vec![points], dashed: false }
    }

    fn points(&self) -> impl Iterator<Item = &(f64, f64)> {
        self.segments.iter().flatten()
    }
}

/// Jump discontinuity at `x`: the value `from` is attained (closed
/// marker), `to` is the one-sided limit after the jump (open marker).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpMarker {
    pub x: f64,
    pub from: f64,
    pub to: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotStyle {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub jumps: Vec<JumpMarker>,
    pub width: f64,
    pub height: f64,
    /// Same scale on both axes.
    pub equal_aspect: bool,
}

impl PlotStyle {
    pub fn new(title: impl Into<String>, x_label: impl Into<String>, y_label: impl Into<String>) -> Self {
        PlotStyle {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            jumps: vec![],
            width: 640.0,
            height: 420.0,
            equal_aspect: false,
        }
    }
}

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"];
const MARGIN: (f64, f64, f64, f64) = (70.0, 20.0, 40.0, 55.0); // left, right, top, bottom

fn nice_step(range: f64) -> f64 {
    let raw = range / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let f = raw / mag;
    let m = if f < 1.5 {
        1.0
    } else if f < 3.5 {
        2.0
    } else if f < 7.5 {
        5.0
    } else {
        10.0
    };
    m * mag
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi - lo > 1e-12 * (1.0 + lo.abs().max(hi.abs())) {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        let pad = 0.5 * lo.abs().max(1.0);
        (lo - pad, hi + pad)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn fmt_tick(v: f64, step: f64) -> String {
    if v.abs() < 1e-12 * step {
        return "0".into();
    }
    if step >= 1e-3 && v.abs() < 1e5 {
        let digits = (-step.log10().floor()).max(0.0) as usize;
        format!("{v:.digits$}")
    } else {
        format!("{v:.1e}")
    }
}

/// Renders the plot as an SVG document.
pub fn render_svg(series: &[Series], style: &PlotStyle) -> Result<String> {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|s| s.points().copied())
        .chain(style.jumps.iter().flat_map(|j| [(j.x, j.from), (j.x, j.to)]))
        .filter(|p| p.0.is_finite() && p.1.is_finite())
        .collect();
    if series.iter().all(|s| s.points().next().is_none()) || pts.is_empty() {
        return Err(Error::NoData);
    }
    let fold = |f: fn(&(f64, f64)) -> f64| pts.iter().map(f).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let (mut x0, mut x1) = padded(fold(|p| p.0).0, fold(|p| p.0).1);
    let (mut y0, mut y1) = padded(fold(|p| p.1).0, fold(|p| p.1).1);
    let (l, r, t, b) = MARGIN;
    let (pw, ph) = (style.width - l - r, style.height - t - b);
    if style.equal_aspect {
        let (sx, sy) = ((x1 - x0) / pw, (y1 - y0) / ph);
        if sx > sy {
            let c = 0.5 * (y0 + y1);
            (y0, y1) = (c - 0.5 * sx * ph, c + 0.5 * sx * ph);
        } else {
            let c = 0.5 * (x0 + x1);
            (x0, x1) = (c - 0.5 * sy * pw, c + 0.5 * sy * pw);
        }
    }
    let px = |x: f64| l + (x - x0) / (x1 - x0) * pw;
    let py = |y: f64| t + (y1 - y) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#,
        w = style.width,
        h = style.height
    );
    let _ = writeln!(s, "<!-- generator: softplast {} -->", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="14">{}</text>"#, style.width / 2.0, escape(&style.title));

    // Axes and ticks.
    let _ = writeln!(s, r#"<rect x="{l:.1}" y="{t:.1}" width="{pw:.1}" height="{ph:.1}" fill="none" stroke="black"/>"#);
    for (lo, hi, horizontal) in [(x0, x1, true), (y0, y1, false)] {
        let step = nice_step(hi - lo);
        let mut v = (lo / step).ceil() * step;
        while v <= hi + 1e-9 * step {
            let label = fmt_tick(v, step);
            if horizontal {
                let x = px(v);
                let _ = writeln!(s, r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#, t + ph, t + ph + 5.0);
                let _ = writeln!(s, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{label}</text>"#, t + ph + 18.0);
            } else {
                let y = py(v);
                let _ = writeln!(s, r#"<line x1="{:.2}" y1="{y:.2}" x2="{l:.2}" y2="{y:.2}" stroke="black"/>"#, l - 5.0);
                let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"#, l - 8.0, y + 4.0);
            }
            v += step;
        }
    }
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, l + pw / 2.0, style.height - 12.0, escape(&style.x_label));
    let _ = writeln!(
        s,
        r#"<text transform="translate(16 {:.1}) rotate(-90)" text-anchor="middle">{}</text>"#,
        t + ph / 2.0,
        escape(&style.y_label)
    );

    for (k, se) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let dash = if se.dashed { r#" stroke-dasharray="6 4""# } else { "" };
        for seg in &se.segments {
            let path: Vec<String> = seg
                .iter()
                .filter(|p| p.0.is_finite() && p.1.is_finite())
                .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
                .collect();
            match path.len() {
                0 => {}
                1 => {
                    let (x, y) = seg[0];
                    let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2" fill="{color}"/>"#, px(x), py(y));
                }
                _ => {
                    let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{}"/>"#, path.join(" "));
                }
            }
        }
        let ly = t + 14.0 + 16.0 * k as f64;
        let lx = l + pw - 150.0;
        let _ = writeln!(s, r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"{dash}/>"#, lx + 20.0);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}">{}</text>"#, lx + 26.0, ly + 4.0, escape(&se.label));
    }

    for j in &style.jumps {
        let (x, ya, yb) = (px(j.x), py(j.from), py(j.to));
        let _ = writeln!(s, r#"<line x1="{x:.2}" y1="{ya:.2}" x2="{x:.2}" y2="{yb:.2}" stroke="black" stroke-dasharray="3 3"/>"#);
        let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{ya:.2}" r="4" fill="black"/>"#);
        let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{yb:.2}" r="4" fill="white" stroke="black"/>"#);
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// Writes the plot to `path`.
pub fn emit_plot(path: &Path, series: &[Series], style: &PlotStyle) -> Result<()> {
    let svg = render_svg(series, style)?;
    super::write_atomic(path, svg.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_series_is_rejected() {
        let st = PlotStyle::new("t", "x", "y");
        assert_eq!(render_svg(&[], &st), Err(Error::NoData));
        assert_eq!(render_svg(&[Series::line("a", vec![])], &st), Err(Error::NoData));
    }

    #[test]
    fn constant_series_is_horizontal() {
        let st = PlotStyle::new("t", "x", "y");
        let svg = render_svg(&[Series::line("c", vec![(0.0, 2.0), (1.0, 2.0), (2.0, 2.0)])], &st).unwrap();
        let line = svg.lines().find(|l| l.starts_with("<polyline")).unwrap();
        let pts = line.split("points=\"").nth(1).unwrap().trim_end_matches("\"/>");
        let ys: Vec<&str> = pts.split(' ').map(|p| p.split(',').nth(1).unwrap()).collect();
        assert!(ys.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn jump_markers_are_drawn() {
        let mut st = PlotStyle::new("t", "x", "y");
        st.jumps.push(JumpMarker { x: 1.0, from: 2.0, to: 0.5 });
        let se = Series { label: "s".into(), segments: vec![vec![(0.0, 0.0), (1.0, 2.0)], vec![(1.0, 0.5), (2.0, 0.4)]], dashed: false };
        let svg = render_svg(&[se], &st).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains(r#"fill="white" stroke="black""#));
        assert!(svg.contains(r#"r="4" fill="black""#));
    }

    #[test]
    fn ticks() {
        assert_eq!(nice_step(10.0), 2.0);
        assert_eq!(nice_step(1.0), 0.2);
        assert_eq!(fmt_tick(0.4, 0.2), "0.4");
        assert_eq!(fmt_tick(3.0, 1.0), "3");
    }
}
