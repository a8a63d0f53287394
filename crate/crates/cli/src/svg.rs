//! Standalone SVG figures: polygons and level sets in the plane, and line
//! charts for traces. Output depends only on the input numbers.

use std::fmt::Write as _;

use blaschke::convex2d::{Polygon, Vec2};
use blaschke::logconcave::LogConcave;

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Levels of the contour plots, as fractions of the maximum.
pub const LEVELS: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

pub struct Shape {
    pub points: Vec<Vec2>,
    pub closed: bool,
    pub color: &'static str,
    pub width: f64,
    pub label: Option<String>,
}

/// Shapes drawn with a shared, aspect-preserving world-to-page map.
#[derive(Default)]
pub struct PlaneFigure {
    pub shapes: Vec<Shape>,
}

impl PlaneFigure {
    pub fn polygon(&mut self, p: &Polygon, color: &'static str, width: f64, label: Option<String>) {
        self.shapes.push(Shape { points: p.vertices().to_vec(), closed: true, color, width, label });
    }

    /// A closed outline through `points`, convex or not.
    pub fn outline(&mut self, points: Vec<Vec2>, color: &'static str, width: f64, label: Option<String>) {
        self.shapes.push(Shape { points, closed: true, color, width, label });
    }

    /// Superlevel sets at [`LEVELS`] of the maximum, darker towards the top.
    /// Levels that do not form a planar polygon are skipped.
    pub fn contours(&mut self, f: &LogConcave, color: &'static str) {
        let top = f.max_value();
        for (k, t) in LEVELS.iter().enumerate() {
            if let Ok(p) = f.superlevel(t * top) {
                let width = 0.6 + 0.15 * k as f64;
                let label = (k == 0).then(|| format!("levels {:.1}..{:.1} of max", LEVELS[0], LEVELS[8]));
                self.polygon(&p, color, width, label);
            }
        }
    }

    pub fn render(&self, title: &str) -> String {
        let (w, h, pad) = (480.0, 480.0, 24.0);
        let mut out = header(w, h);
        let pts: Vec<&Vec2> = self.shapes.iter().flat_map(|s| &s.points).collect();
        if pts.is_empty() {
            out.push_str("</svg>\n");
            return out;
        }
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for p in &pts {
            x0 = x0.min(p.x);
            x1 = x1.max(p.x);
            y0 = y0.min(p.y);
            y1 = y1.max(p.y);
        }
        let span = (x1 - x0).max(y1 - y0).max(1e-12);
        let s = (w - 2.0 * pad) / span;
        let (cx, cy) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
        let map = |p: &Vec2| (0.5 * w + s * (p.x - cx), 0.5 * h - s * (p.y - cy));
        title_text(&mut out, title);
        let mut legend = 0;
        for shape in &self.shapes {
            let coords: Vec<String> = shape.points.iter().map(|p| {
                let (x, y) = map(p);
                format!("{x:.3},{y:.3}")
            }).collect();
            let tag = if shape.closed { "polygon" } else { "polyline" };
            let _ = writeln!(
                out,
                r#"<{tag} points="{}" fill="none" stroke="{}" stroke-width="{:.2}"/>"#,
                coords.join(" "),
                shape.color,
                shape.width
            );
            if let Some(label) = &shape.label {
                legend_entry(&mut out, legend, shape.color, label);
                legend += 1;
            }
        }
        out.push_str("</svg>\n");
        out
    }
}

pub struct Series {
    pub name: String,
    pub values: Vec<f64>,
}

/// One panel per series sharing the x axis, each with its own y range, so
/// a constant column shows as a flat line.
pub fn line_chart(title: &str, x: &[f64], x_label: &str, series: &[Series]) -> String {
    let (w, panel, pad, left) = (640.0, 140.0, 28.0, 90.0);
    let h = pad + series.len() as f64 * (panel + pad);
    let mut out = header(w, h.max(2.0 * pad));
    if series.is_empty() || x.is_empty() {
        out.push_str("</svg>\n");
        return out;
    }
    title_text(&mut out, title);
    let (xa, xb) = (x[0], x[x.len() - 1]);
    let xs = if xb > xa { (w - left - pad) / (xb - xa) } else { 0.0 };
    for (k, s) in series.iter().enumerate() {
        let top = pad + k as f64 * (panel + pad);
        let finite: Vec<f64> = s.values.iter().copied().filter(|v| v.is_finite()).collect();
        let lo = finite.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (lo, hi) = if !(hi - lo > 1e-12 * hi.abs().max(1.0)) { (lo - 0.5, hi + 0.5) } else { (lo, hi) };
        let ys = panel / (hi - lo);
        let _ = writeln!(
            out,
            r##"<rect x="{left:.1}" y="{top:.1}" width="{:.1}" height="{panel:.1}" fill="none" stroke="#bbbbbb"/>"##,
            w - left - pad
        );
        let _ = writeln!(out, r#"<text x="4" y="{:.1}" font-size="11">{}</text>"#, top + 12.0, escape(&s.name));
        let _ = writeln!(out, r#"<text x="4" y="{:.1}" font-size="9">{}</text>"#, top + 26.0, fmt_tick(hi));
        let _ = writeln!(out, r#"<text x="4" y="{:.1}" font-size="9">{}</text>"#, top + panel, fmt_tick(lo));
        let coords: Vec<String> = x
            .iter()
            .zip(&s.values)
            .filter(|(_, v)| v.is_finite())
            .map(|(a, v)| format!("{:.3},{:.3}", left + xs * (a - xa), top + panel - ys * (v - lo)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
            coords.join(" "),
            PALETTE[k % PALETTE.len()]
        );
    }
    let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" font-size="11">{}</text>"#, 0.5 * w, h - 6.0, escape(x_label));
    out.push_str("</svg>\n");
    out
}

fn header(w: f64, h: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n<!-- blaschke-lab {} -->\n",
        env!("CARGO_PKG_VERSION")
    )
}

fn title_text(out: &mut String, title: &str) {
    let _ = writeln!(out, r#"<text x="8" y="16" font-size="13">{}</text>"#, escape(title));
}

fn legend_entry(out: &mut String, k: usize, color: &str, label: &str) {
    let y = 34.0 + 14.0 * k as f64;
    let _ = writeln!(out, r#"<line x1="8" y1="{:.1}" x2="24" y2="{:.1}" stroke="{color}" stroke-width="2"/>"#, y - 4.0, y - 4.0);
    let _ = writeln!(out, r#"<text x="28" y="{y:.1}" font-size="10">{}</text>"#, escape(label));
}

fn fmt_tick(v: f64) -> String {
    if v.abs() >= 1e4 || (v != 0.0 && v.abs() < 1e-3) {
        format!("{v:.3e}")
    } else {
        format!("{v:.4}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn color(k: usize) -> &'static str {
    PALETTE[k % PALETTE.len()]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_figures_are_valid_documents() {
        let svg = PlaneFigure::default().render("nothing");
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        let chart = line_chart("nothing", &[], "step", &[]);
        assert!(chart.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn square_contours_and_overlay() {
        let f = LogConcave::indicator(Polygon::square(1.0));
        let mut fig = PlaneFigure::default();
        fig.contours(&f, color(0));
        fig.polygon(&Polygon::square(2.0), color(1), 1.5, Some("projection body".into()));
        let svg = fig.render("square");
        assert_eq!(svg.matches("<polygon").count(), 10);
        assert!(svg.contains("projection body"));
    }

    #[test]
    fn flat_series_stays_inside_its_panel() {
        let svg = line_chart("flat", &[0.0, 1.0, 2.0], "step", &[Series { name: "W1".into(), values: vec![8.0; 3] }]);
        assert!(svg.contains("<polyline"));
        assert!(!svg.contains("NaN"));
    }
}
