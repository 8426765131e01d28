//! Minimal self-contained SVG 1.1 writers.

use std::fmt::Write as _;

use crate::format::{coord, sig9};

const PALETTE: [&str; 6] = ["#1f4fbf", "#2a9d3a", "#d1342f", "#7b3fa0", "#d98200", "#333333"];

pub fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn open(out: &mut String, width: f64, height: f64, view: (f64, f64, f64, f64)) {
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"{} {} {} {}\">",
        coord(width),
        coord(height),
        coord(view.0),
        coord(view.1),
        coord(view.2),
        coord(view.3)
    );
}

fn polyline(out: &mut String, points: impl Iterator<Item = (f64, f64)>, stroke: &str, width: f64, dash: Option<&str>) {
    let pts: Vec<String> = points.map(|(x, y)| format!("{},{}", coord(x), coord(y))).collect();
    let dash = dash.map(|d| format!(" stroke-dasharray=\"{d}\"")).unwrap_or_default();
    let _ = writeln!(
        out,
        "  <polyline fill=\"none\" stroke=\"{stroke}\" stroke-width=\"{}\"{dash} points=\"{}\"/>",
        coord(width),
        pts.join(" ")
    );
}

/// Axis-aligned box with a margin of `fraction` of the larger side on every edge.
fn padded_square(points: &[(f64, f64)], fraction: f64) -> (f64, f64, f64) {
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for &(x, y) in points {
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    if points.is_empty() {
        (x0, y0, x1, y1) = (-1.0, -1.0, 1.0, 1.0);
    }
    let side = (x1 - x0).max(y1 - y0).max(f64::MIN_POSITIVE);
    let full = side * (1.0 + 2.0 * fraction);
    let (cx, cy) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
    (cx - 0.5 * full, cy - 0.5 * full, full)
}

/// The curve as one polyline in a square viewport with a 5% margin.
/// The y axis points up.
pub fn curve(points: &[(f64, f64)], title: &str) -> String {
    let (x0, y0, side) = padded_square(points, 0.05);
    let mut out = String::new();
    // flip y by negating coordinates; the viewBox covers the negated range
    open(&mut out, 800.0, 800.0, (x0, -(y0 + side), side, side));
    let _ = writeln!(out, "  <title>{}</title>", escape(title));
    polyline(&mut out, points.iter().map(|&(x, y)| (x, -y)), PALETTE[0], side / 800.0, None);
    out.push_str("</svg>\n");
    out
}

/// Field square, the mapped curve, and a range disc around each placed node.
pub fn placement(side: f64, range: f64, curve: &[(f64, f64)], nodes: &[(f64, f64)], title: &str) -> String {
    let pad = 0.05 * side;
    let mut out = String::new();
    open(&mut out, 800.0, 800.0, (-pad, -side - pad, side + 2.0 * pad, side + 2.0 * pad));
    let _ = writeln!(out, "  <title>{}</title>", escape(title));
    let stroke = side / 800.0;
    let _ = writeln!(
        out,
        "  <rect x=\"0.000\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#000000\" stroke-width=\"{}\"/>",
        coord(-side),
        coord(side),
        coord(side),
        coord(2.0 * stroke)
    );
    polyline(&mut out, curve.iter().map(|&(x, y)| (x, -y)), "#9a9a9a", stroke, None);
    out.push_str("  <g fill=\"#d1342f\" fill-opacity=\"0.15\" stroke=\"#d1342f\" stroke-width=\"");
    out.push_str(&coord(stroke));
    out.push_str("\">\n");
    for &(x, y) in nodes {
        let _ = writeln!(out, "    <circle cx=\"{}\" cy=\"{}\" r=\"{}\"/>", coord(x), coord(-y), coord(range));
    }
    out.push_str("  </g>\n</svg>\n");
    out
}

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub markers: bool,
}

pub struct Plot<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub series: Vec<Series>,
}

fn nice_ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let span = (hi - lo).max(f64::MIN_POSITIVE);
    let raw = span / target as f64;
    let magnitude = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * magnitude)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * magnitude);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

/// Line plot with axes, ticks and a legend, sized 900 x 600.
pub fn line_plot(plot: &Plot<'_>) -> String {
    let (w, h) = (900.0, 600.0);
    let (left, right, top, bottom) = (110.0, 40.0, 60.0, 80.0);
    let all = plot.series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, 0.0f64, f64::MIN);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x0 > x1 {
        (x0, x1, y1) = (0.0, 1.0, 1.0);
    }
    if x1 == x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    y1 += 0.05 * (y1 - y0);
    let sx = |x: f64| left + (x - x0) / (x1 - x0) * (w - left - right);
    let sy = |y: f64| h - bottom - (y - y0) / (y1 - y0) * (h - top - bottom);

    let mut out = String::new();
    open(&mut out, w, h, (0.0, 0.0, w, h));
    let _ = writeln!(out, "  <rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" fill=\"#ffffff\"/>");
    let _ = writeln!(
        out,
        "  <text x=\"{}\" y=\"32\" font-family=\"sans-serif\" font-size=\"20\" font-style=\"italic\" text-anchor=\"middle\">{}</text>",
        coord(w / 2.0),
        escape(plot.title)
    );
    let _ = writeln!(
        out,
        "  <path d=\"M{} {} L{} {} L{} {}\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1.5\"/>",
        coord(left),
        coord(top),
        coord(left),
        coord(h - bottom),
        coord(w - right),
        coord(h - bottom)
    );
    for t in nice_ticks(x0, x1, 8) {
        let x = sx(t);
        let _ = writeln!(
            out,
            "  <line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#000000\"/>\n  <text x=\"{0}\" y=\"{3}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">{4}</text>",
            coord(x),
            coord(h - bottom),
            coord(h - bottom + 6.0),
            coord(h - bottom + 22.0),
            escape(&sig9(t))
        );
    }
    for t in nice_ticks(y0, y1, 6) {
        let y = sy(t);
        let _ = writeln!(
            out,
            "  <line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"#000000\"/>\n  <text x=\"{3}\" y=\"{4}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"end\">{5}</text>",
            coord(left - 6.0),
            coord(y),
            coord(left),
            coord(left - 10.0),
            coord(y + 4.0),
            escape(&sig9(t))
        );
    }
    let _ = writeln!(
        out,
        "  <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">{}</text>",
        coord(left + (w - left - right) / 2.0),
        coord(h - 24.0),
        escape(plot.x_label)
    );
    let _ = writeln!(
        out,
        "  <text x=\"24\" y=\"{0}\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\" transform=\"rotate(-90 24 {0})\">{1}</text>",
        coord(top + (h - top - bottom) / 2.0),
        escape(plot.y_label)
    );

    for (i, s) in plot.series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let dash = (i % 2 == 1).then_some("8 4");
        polyline(&mut out, s.points.iter().map(|&(x, y)| (sx(x), sy(y))), color, 2.0, dash);
        if s.markers {
            for &(x, y) in &s.points {
                let _ = writeln!(
                    out,
                    "  <circle cx=\"{}\" cy=\"{}\" r=\"3.5\" fill=\"none\" stroke=\"{color}\"/>",
                    coord(sx(x)),
                    coord(sy(y))
                );
            }
        }
        let ly = top + 12.0 + 22.0 * i as f64;
        let lx = w - right - 190.0;
        let _ = writeln!(
            out,
            "  <line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{color}\" stroke-width=\"2\"/>\n  <text x=\"{3}\" y=\"{4}\" font-family=\"sans-serif\" font-size=\"14\">{5}</text>",
            coord(lx),
            coord(ly),
            coord(lx + 30.0),
            coord(lx + 38.0),
            coord(ly + 5.0),
            escape(&s.label)
        );
    }
    out.push_str("</svg>\n");
    out
}
