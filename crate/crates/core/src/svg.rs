//! Static SVG scatter grid for utility/fairness trade-off plots.

use std::fmt::Write;

use crate::metrics::{FairnessMetric, MetricReport, UtilityMetric};

const PANEL_W: f64 = 240.0;
const PANEL_H: f64 = 200.0;
const MARGIN: f64 = 36.0;

pub(crate) struct Point {
    pub label: String,
    pub report: MetricReport,
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let pad = ((hi - lo) * 0.08).max(1e-3);
    (lo - pad, hi + pad)
}

/// One panel per (fairness, utility) pair: rows are the four fairness gaps
/// (plotted as absolute values), columns the three utility scores. The
/// reference report is drawn as dashed crosshair lines.
pub(crate) fn tradeoff_grid(points: &[Point], reference: &MetricReport) -> String {
    let cols = UtilityMetric::ALL.len();
    let rows = FairnessMetric::ALL.len();
    let width = cols as f64 * (PANEL_W + MARGIN) + MARGIN;
    let height = rows as f64 * (PANEL_H + MARGIN) + MARGIN;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="10">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (r, &fm) in FairnessMetric::ALL.iter().enumerate() {
        for (c, &um) in UtilityMetric::ALL.iter().enumerate() {
            let x0 = MARGIN + c as f64 * (PANEL_W + MARGIN);
            let y0 = MARGIN + r as f64 * (PANEL_H + MARGIN);
            let all = points
                .iter()
                .map(|p| &p.report)
                .chain(std::iter::once(reference));
            let (ux0, ux1) = range(all.clone().map(|m| um.of(m)));
            let (fy0, fy1) = range(all.map(|m| fm.of(m).abs()));
            let sx = |v: f64| x0 + (v - ux0) / (ux1 - ux0) * PANEL_W;
            let sy = |v: f64| y0 + PANEL_H - (v - fy0) / (fy1 - fy0) * PANEL_H;

            let _ = writeln!(
                out,
                r##"<rect x="{x0}" y="{y0}" width="{PANEL_W}" height="{PANEL_H}" fill="none" stroke="#444"/>"##
            );
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}" text-anchor="middle">{} vs |{}|</text>"#,
                x0 + PANEL_W / 2.0,
                y0 - 6.0,
                um.column(),
                fm.column()
            );
            let _ = writeln!(
                out,
                r#"<text x="{x0}" y="{}">{ux0:.3}</text><text x="{}" y="{}" text-anchor="end">{ux1:.3}</text>"#,
                y0 + PANEL_H + 12.0,
                x0 + PANEL_W,
                y0 + PANEL_H + 12.0
            );
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}" text-anchor="end">{fy0:.3}</text><text x="{}" y="{}" text-anchor="end">{fy1:.3}</text>"#,
                x0 - 3.0,
                y0 + PANEL_H,
                x0 - 3.0,
                y0 + 8.0
            );

            let (vx, vy) = (sx(um.of(reference)), sy(fm.of(reference).abs()));
            let _ = writeln!(
                out,
                r##"<line x1="{vx:.2}" y1="{y0}" x2="{vx:.2}" y2="{}" stroke="#888" stroke-dasharray="4 3"/>"##,
                y0 + PANEL_H
            );
            let _ = writeln!(
                out,
                r##"<line x1="{x0}" y1="{vy:.2}" x2="{}" y2="{vy:.2}" stroke="#888" stroke-dasharray="4 3"/>"##,
                x0 + PANEL_W
            );
            for p in points {
                let (u, f) = (um.of(&p.report), fm.of(&p.report).abs());
                if !(u.is_finite() && f.is_finite()) {
                    continue;
                }
                let _ = writeln!(
                    out,
                    r##"<circle cx="{:.2}" cy="{:.2}" r="3" fill="#c0392b"><title>{}</title></circle>"##,
                    sx(u),
                    sy(f),
                    p.label
                );
            }
        }
    }
    out.push_str("</svg>\n");
    out
}
