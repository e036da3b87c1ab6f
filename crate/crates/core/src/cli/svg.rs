//! Minimal static line charts for sweep results.

use std::fmt::Write;

pub struct Series {
    pub name: String,
    pub color: &'static str,
    /// `(x, y, error bar half-width)`; non-finite points are skipped.
    pub points: Vec<(f64, f64, Option<f64>)>,
    /// Markers with error bars when false, a polyline when true.
    pub line: bool,
}

pub struct Panel {
    pub y_label: String,
    pub series: Vec<Series>,
}

const WIDTH: f64 = 720.0;
const PANEL_HEIGHT: f64 = 280.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 180.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

fn ticks(lo: f64, hi: f64, log: bool) -> Vec<f64> {
    if log {
        let (a, b) = (lo.log10().floor() as i32, hi.log10().ceil() as i32);
        (a..=b).map(|e| 10f64.powi(e)).filter(|t| *t >= lo * 0.999 && *t <= hi * 1.001).collect()
    } else {
        (0..=4).map(|k| lo + (hi - lo) * k as f64 / 4.0).collect()
    }
}

fn fmt_tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e4) {
        format!("{v:.0e}")
    } else {
        format!("{:.3}", v).trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 * hi.abs().max(1.0) {
        (lo - 0.5 * lo.abs().max(1e-3), hi + 0.5 * hi.abs().max(1e-3))
    } else {
        (lo, hi)
    }
}

/// A self-contained SVG document with one panel per entry, sharing the x axis.
pub fn render(title: &str, x_label: &str, panels: &[Panel]) -> String {
    let xs: Vec<f64> = panels
        .iter()
        .flat_map(|p| p.series.iter().flat_map(|s| s.points.iter().map(|pt| pt.0)))
        .filter(|x| x.is_finite())
        .collect();
    let (x_lo, x_hi) = range(xs.iter().copied());
    let log_x = x_lo > 0.0 && x_hi / x_lo >= 20.0;
    let plot_w = WIDTH - LEFT - RIGHT;
    let height = TOP + panels.len() as f64 * (PANEL_HEIGHT + BOTTOM);
    let sx = |x: f64| {
        let t = if log_x { (x.log10() - x_lo.log10()) / (x_hi.log10() - x_lo.log10()) } else { (x - x_lo) / (x_hi - x_lo) };
        LEFT + t * plot_w
    };

    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#, WIDTH / 2.0, escape(title));

    for (k, panel) in panels.iter().enumerate() {
        let top = TOP + k as f64 * (PANEL_HEIGHT + BOTTOM);
        let bottom = top + PANEL_HEIGHT - 20.0;
        let (y_lo, y_hi) = range(panel.series.iter().flat_map(|s| {
            s.points.iter().flat_map(|&(_, y, e)| {
                let e = e.filter(|e| e.is_finite()).unwrap_or(0.0);
                [y - e, y + e]
            })
        }));
        let pad = 0.05 * (y_hi - y_lo);
        let (y_lo, y_hi) = (y_lo - pad, y_hi + pad);
        let sy = |y: f64| bottom - (y - y_lo) / (y_hi - y_lo) * (bottom - top);

        let _ = writeln!(out, r#"<rect x="{LEFT}" y="{top}" width="{plot_w}" height="{}" fill="none" stroke="black"/>"#, bottom - top);
        for t in ticks(x_lo, x_hi, log_x) {
            let x = sx(t);
            let _ = writeln!(out, r#"<line x1="{x:.1}" y1="{bottom}" x2="{x:.1}" y2="{}" stroke="black"/><text x="{x:.1}" y="{}" text-anchor="middle">{}</text>"#, bottom + 5.0, bottom + 18.0, fmt_tick(t));
        }
        for t in ticks(y_lo, y_hi, false) {
            let y = sy(t);
            let _ = writeln!(out, r#"<line x1="{}" y1="{y:.1}" x2="{LEFT}" y2="{y:.1}" stroke="black"/><text x="{}" y="{:.1}" text-anchor="end">{}</text>"#, LEFT - 5.0, LEFT - 8.0, y + 4.0, fmt_tick(t));
        }
        let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, LEFT + plot_w / 2.0, bottom + 36.0, escape(x_label));
        let _ = writeln!(out, r#"<text transform="translate(18,{:.1}) rotate(-90)" text-anchor="middle">{}</text>"#, (top + bottom) / 2.0, escape(&panel.y_label));

        for (j, s) in panel.series.iter().enumerate() {
            let pts: Vec<&(f64, f64, Option<f64>)> = s.points.iter().filter(|p| p.0.is_finite() && p.1.is_finite()).collect();
            if s.line {
                let path: Vec<String> = pts.iter().map(|p| format!("{:.1},{:.1}", sx(p.0), sy(p.1))).collect();
                let _ = writeln!(out, r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"/>"#, path.join(" "), s.color);
            } else {
                for p in pts {
                    let (x, y) = (sx(p.0), sy(p.1));
                    if let Some(e) = p.2.filter(|e| e.is_finite() && *e > 0.0) {
                        let _ = writeln!(out, r#"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="{}"/>"#, sy(p.1 - e), sy(p.1 + e), s.color);
                    }
                    let _ = writeln!(out, r#"<circle cx="{x:.1}" cy="{y:.1}" r="3" fill="{}"/>"#, s.color);
                }
            }
            let ly = top + 16.0 + 18.0 * j as f64;
            let lx = LEFT + plot_w + 12.0;
            let _ = writeln!(out, r#"<rect x="{lx}" y="{}" width="12" height="4" fill="{}"/><text x="{}" y="{}">{}</text>"#, ly - 4.0, s.color, lx + 18.0, ly + 1.0, escape(&s.name));
        }
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
