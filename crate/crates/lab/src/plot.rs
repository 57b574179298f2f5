//! Log-log SVG plots of report series.

use std::fmt::Write;

use crate::report::{fit_abscissa, Criterion, ScalingReport};

const WIDTH: f64 = 640.0;
const PANEL: f64 = 360.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    top: f64,
}

impl Frame {
    fn px(&self, lx: f64) -> f64 {
        MARGIN + (lx - self.x0) / (self.x1 - self.x0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, ly: f64) -> f64 {
        self.top + PANEL - MARGIN - (ly - self.y0) / (self.y1 - self.y0) * (PANEL - 2.0 * MARGIN)
    }
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    let pad = ((hi - lo) * 0.08).max(0.05);
    (lo - pad, hi + pad)
}

/// One panel per fitted series: measured points, the fitted line, and the
/// predicted slope drawn through the data centroid.
pub fn render_svg(report: &ScalingReport) -> String {
    let panels: Vec<_> = report.series.iter().filter(|s| s.criterion != Criterion::Identity).collect();
    let height = PANEL * panels.len().max(1) as f64;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if panels.is_empty() {
        let _ = writeln!(out, r#"<text x="{MARGIN}" y="{MARGIN}">{}: no fitted series</text>"#, report.id);
    }
    for (i, s) in panels.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<(f64, f64)> = report
            .records
            .iter()
            .filter(|r| r.error.is_none())
            .filter_map(|r| r.norms.get(&s.norm).map(|v| (fit_abscissa(report.scale_variable, r.scale).ln(), v.ln())))
            .collect();
        let top = PANEL * i as f64;
        if pts.is_empty() {
            continue;
        }
        let (x0, x1) = padded(
            pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min),
            pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max),
        );
        let cx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
        let cy = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
        let pred = |x: f64| cy + s.predicted * (x - cx);
        let fit = |x: f64| s.intercept.unwrap_or(cy) + s.slope.unwrap_or(0.0) * x;
        let mut ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
        ys.extend([pred(x0), pred(x1), fit(x0), fit(x1)]);
        let (y0, y1) = padded(
            ys.iter().copied().fold(f64::INFINITY, f64::min),
            ys.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        );
        let f = Frame { x0, x1, y0, y1, top };
        let (l, r, b, t) = (MARGIN, WIDTH - MARGIN, top + PANEL - MARGIN, top + MARGIN);
        let _ = writeln!(out, r##"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="#444"/>"##, r - l, b - t);
        let verdict = if s.pass { "pass" } else { "fail" };
        let slope = s.slope.map(|v| format!("{v:.3}")).unwrap_or_else(|| "n/a".into());
        let _ = writeln!(
            out,
            r#"<text x="{l}" y="{}">{} / {}: slope {slope}, predicted {} ({verdict})</text>"#,
            t - 10.0,
            report.id,
            s.name,
            s.predicted_exact
        );
        let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">log {}</text>"#, 0.5 * (l + r), b + 30.0, s.fit_variable);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" transform="rotate(-90 {} {})" text-anchor="middle">log {}</text>"#,
            l - 35.0,
            0.5 * (t + b),
            l - 35.0,
            0.5 * (t + b),
            s.norm
        );
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="1.5"/>"#,
            f.px(x0),
            f.py(fit(x0)),
            f.px(x1),
            f.py(fit(x1))
        );
        let _ = writeln!(
            out,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#888" stroke-dasharray="6 4"/>"##,
            f.px(x0),
            f.py(pred(x0)),
            f.px(x1),
            f.py(pred(x1))
        );
        for (x, y) in &pts {
            let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="{color}"/>"#, f.px(*x), f.py(*y));
        }
    }
    out.push_str("</svg>\n");
    out
}
