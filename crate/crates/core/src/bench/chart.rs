use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

use super::run::{summarize, ResultRow, Summary};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 150.0;
const MARGIN_T: f64 = 20.0;
const MARGIN_B: f64 = 50.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

/// Decade range `(lo, hi)` of the IO axis, so the axis spans
/// `10^lo ..= 10^hi`. The axis starts at 10^0 (a single IO) and tops out one
/// decade above the decade holding the largest mean, which leaves headroom.
pub fn chart_axis(summaries: &[Summary]) -> (i32, i32) {
    let max = summaries.iter().map(|s| s.total_ios).fold(1.0f64, f64::max);
    let min = summaries.iter().map(|s| s.total_ios.max(1.0)).fold(f64::INFINITY, f64::min);
    let lo = if min.is_finite() { min.log10().floor().min(0.0) as i32 } else { 0 };
    (lo, max.log10().floor() as i32 + 2)
}

/// Renders mean total IOs per sweep point, one polyline per algorithm.
pub fn render_chart(rows: &[ResultRow], x_label: &str) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::EmptyResults);
    }
    let sums = summarize(rows);
    let (lo, hi) = chart_axis(&sums);

    // x positions: one slot per distinct sweep point, in row order
    let mut points: Vec<(String, usize, usize, usize)> = Vec::new();
    let mut algs: Vec<String> = Vec::new();
    for s in &sums {
        let key = (s.dataset.clone(), s.n, s.d, s.k_or_theta);
        if !points.contains(&key) {
            points.push(key);
        }
        if !algs.contains(&s.algorithm) {
            algs.push(s.algorithm.clone());
        }
    }
    let varying = |f: fn(&(String, usize, usize, usize)) -> String| {
        points.iter().map(f).collect::<std::collections::BTreeSet<_>>().len() > 1
    };
    let label = |p: &(String, usize, usize, usize)| -> String {
        let mut parts = Vec::new();
        if varying(|p| p.0.clone()) {
            parts.push(p.0.clone());
        }
        if varying(|p| p.1.to_string()) {
            parts.push(p.1.to_string());
        }
        if varying(|p| p.2.to_string()) {
            parts.push(p.2.to_string());
        }
        if varying(|p| p.3.to_string()) || parts.is_empty() {
            parts.push(p.3.to_string());
        }
        parts.join("/")
    };

    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let x_of = |slot: usize| {
        if points.len() == 1 {
            MARGIN_L + plot_w / 2.0
        } else {
            MARGIN_L + plot_w * slot as f64 / (points.len() - 1) as f64
        }
    };
    let y_of = |v: f64| {
        let t = (v.max(1.0).log10() - lo as f64) / (hi - lo) as f64;
        MARGIN_T + plot_h * (1.0 - t)
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (x0, x1, y0, y1) = (MARGIN_L, MARGIN_L + plot_w, MARGIN_T, MARGIN_T + plot_h);
    let _ = writeln!(svg, r#"<path d="M{x0} {y0} V{y1} H{x1}" fill="none" stroke="black"/>"#);
    for e in lo..=hi {
        let y = y_of(10f64.powi(e));
        let _ = writeln!(svg, r##"<line x1="{x0}" y1="{y:.1}" x2="{x1}" y2="{y:.1}" stroke="#ddd"/>"##);
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">1e{e}</text>"#,
            x0 - 6.0,
            y + 4.0
        );
    }
    for (slot, p) in points.iter().enumerate() {
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            x_of(slot),
            y1 + 16.0,
            label(p)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{x_label}</text>"#,
        MARGIN_L + plot_w / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="14" y="{:.1}" text-anchor="middle" transform="rotate(-90 14 {:.1})">mean total IOs</text>"#,
        MARGIN_T + plot_h / 2.0,
        MARGIN_T + plot_h / 2.0
    );

    for (a, alg) in algs.iter().enumerate() {
        let color = COLORS[a % COLORS.len()];
        let coords: Vec<String> = sums
            .iter()
            .filter(|s| &s.algorithm == alg)
            .map(|s| {
                let key = (s.dataset.clone(), s.n, s.d, s.k_or_theta);
                let slot = points.iter().position(|p| *p == key).expect("collected above");
                format!("{:.1},{:.1}", x_of(slot), y_of(s.total_ios))
            })
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            coords.join(" ")
        );
        for c in &coords {
            let (cx, cy) = c.split_once(',').expect("formatted above");
            let _ = writeln!(svg, r#"<circle cx="{cx}" cy="{cy}" r="3" fill="{color}"/>"#);
        }
        let ly = MARGIN_T + 10.0 + 18.0 * a as f64;
        let lx = x1 + 16.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{ly}" x2="{:.1}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            lx + 20.0
        );
        let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}">{alg}</text>"#, lx + 26.0, ly + 4.0);
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn emit_chart(rows: &[ResultRow], x_label: &str, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let svg = render_chart(rows, x_label)?;
    std::fs::write(path, svg).map_err(|e| Error::io(path, e))
}
