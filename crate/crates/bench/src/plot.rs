use std::fmt::Write;

use crate::error::{BenchError, Result};
use crate::summary::SummaryRow;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

const WIDTH: f64 = 960.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 160.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;

/// Renders summary rows as an SVG chart: one group per relation count, one
/// min-max bar per algorithm with a dot at the mean, on a log axis from 1 to
/// `cap`. N/A counts are printed under each bar.
pub fn plot_svg(rows: &[SummaryRow], cap: f64) -> Result<String> {
    if cap.is_nan() || cap <= 1.0 {
        return Err(BenchError::InvalidArgument(format!(
            "cap must exceed 1, got {cap}"
        )));
    }
    if rows.is_empty() {
        return Err(BenchError::Report("nothing to plot".into()));
    }
    let mut algorithms: Vec<&str> = Vec::new();
    let mut sizes: Vec<usize> = Vec::new();
    for r in rows {
        if !algorithms.contains(&r.algorithm.as_str()) {
            algorithms.push(&r.algorithm);
        }
        if !sizes.contains(&r.n_relations) {
            sizes.push(r.n_relations);
        }
    }
    sizes.sort_unstable();

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let y = |v: f64| TOP + plot_h * (1.0 - v.clamp(1.0, cap).ln() / cap.ln());
    let group_w = plot_w / sizes.len() as f64;
    let bar_w = (group_w * 0.8 / algorithms.len() as f64).min(24.0);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let mut tick = 1.0;
    while tick <= cap * (1.0 + 1e-9) {
        let ty = y(tick);
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{ty:.1}" x2="{:.1}" y2="{ty:.1}" stroke="#ddd"/><text x="{:.1}" y="{:.1}" text-anchor="end">{tick}</text>"##,
            LEFT + plot_w,
            LEFT - 6.0,
            ty + 4.0
        );
        tick *= if tick < cap && tick * 2.0 > cap {
            cap / tick
        } else {
            2.0
        };
    }
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.1}" transform="rotate(-90 16 {:.1})" text-anchor="middle">normalized cost</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );
    for (g, n) in sizes.iter().enumerate() {
        let gx = LEFT + group_w * g as f64;
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{n}</text>"#,
            gx + group_w / 2.0,
            HEIGHT - BOTTOM + 34.0
        );
        let start = gx + (group_w - bar_w * algorithms.len() as f64) / 2.0;
        for (a, name) in algorithms.iter().enumerate() {
            let Some(r) = rows
                .iter()
                .find(|r| r.n_relations == *n && r.algorithm == *name)
            else {
                continue;
            };
            let color = PALETTE[a % PALETTE.len()];
            let cx = start + bar_w * (a as f64 + 0.5);
            if let (Some(lo), Some(mean), Some(hi)) = (r.min, r.mean, r.max) {
                let _ = writeln!(
                    svg,
                    r#"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="{color}" fill-opacity="0.35" stroke="{color}"/>"#,
                    cx - bar_w * 0.4,
                    y(hi),
                    bar_w * 0.8,
                    (y(lo) - y(hi)).max(1.0)
                );
                let _ = writeln!(
                    svg,
                    r#"<circle cx="{cx:.1}" cy="{:.1}" r="3" fill="{color}"/>"#,
                    y(mean)
                );
            }
            if r.not_available > 0 {
                let _ = writeln!(
                    svg,
                    r#"<text x="{cx:.1}" y="{:.1}" text-anchor="middle" fill="{color}">{}</text>"#,
                    HEIGHT - BOTTOM + 14.0,
                    r.not_available
                );
            }
        }
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">relations (N/A counts under bars)</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 8.0
    );
    for (a, name) in algorithms.iter().enumerate() {
        let ly = TOP + 16.0 * a as f64;
        let lx = WIDTH - RIGHT + 16.0;
        let _ = writeln!(
            svg,
            r#"<rect x="{lx:.1}" y="{:.1}" width="10" height="10" fill="{}"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            ly,
            PALETTE[a % PALETTE.len()],
            lx + 14.0,
            ly + 9.0,
            escape(name)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
