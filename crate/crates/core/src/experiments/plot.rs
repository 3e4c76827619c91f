use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;

use super::rows::{ExperimentRow, RowStatus};
use crate::error::Result;

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 190.0;
const MARGIN_Y: f64 = 40.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];

struct Series<'a> {
    name: &'a str,
    points: Vec<&'a ExperimentRow>,
}

/// Line chart of every metric against dimension on a log y axis, with min/max
/// bars over repetitions and the theoretical values dashed.
pub fn render_svg(rows: &[ExperimentRow], title: &str) -> String {
    let mut by_metric: BTreeMap<&str, Vec<&ExperimentRow>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.status == RowStatus::Ok) {
        by_metric.entry(r.metric_name.as_str()).or_default().push(r);
    }
    let series: Vec<Series<'_>> = by_metric.into_iter().map(|(name, points)| Series { name, points }).collect();

    let positive = |v: f64| v.is_finite() && v > 0.0;
    let mut ys: Vec<f64> = Vec::new();
    let mut xs: Vec<f64> = Vec::new();
    for s in &series {
        for r in &s.points {
            xs.push(r.dimension as f64);
            ys.extend([r.min, r.max, r.mean].into_iter().chain(r.theory_value).filter(|&v| positive(v)));
        }
    }
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    if ys.is_empty() {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle">no positive values to plot</text>"#,
            WIDTH / 2.0,
            HEIGHT / 2.0
        );
        svg.push_str("</svg>\n");
        return svg;
    }

    let (x_lo, x_hi) = bounds(&xs);
    let (x_lo, x_hi) = if x_hi > x_lo { (x_lo, x_hi) } else { (x_lo - 1.0, x_hi + 1.0) };
    let (y_lo, y_hi) = bounds(&ys);
    let dec_lo = y_lo.log10().floor();
    let dec_hi = y_hi.log10().ceil().max(dec_lo + 1.0);
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - 2.0 * MARGIN_Y;
    let px = |x: f64| MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let py = |y: f64| MARGIN_Y + (dec_hi - y.log10()) / (dec_hi - dec_lo) * plot_h;

    let _ = writeln!(
        svg,
        r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_Y}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    let mut dec = dec_lo;
    while dec <= dec_hi {
        let y = py(10f64.powf(dec));
        let _ = writeln!(
            svg,
            r##"<line x1="{MARGIN_LEFT}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd"/><text x="{:.1}" y="{:.1}" text-anchor="end">1e{}</text>"##,
            MARGIN_LEFT + plot_w,
            MARGIN_LEFT - 6.0,
            y + 4.0,
            dec as i32
        );
        dec += 1.0;
    }
    let mut dims: Vec<u32> = xs.iter().map(|&x| x as u32).collect();
    dims.sort_unstable();
    dims.dedup();
    let step = dims.len().div_ceil(12).max(1);
    for d in dims.iter().step_by(step) {
        let x = px(*d as f64);
        let _ =
            writeln!(svg, r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{d}</text>"#, MARGIN_Y + plot_h + 16.0);
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">dimension</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 6.0
    );

    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let line: Vec<String> = s
            .points
            .iter()
            .filter(|r| positive(r.mean))
            .map(|r| format!("{:.1},{:.1}", px(r.dimension as f64), py(r.mean)))
            .collect();
        if line.len() > 1 {
            let _ = writeln!(
                svg,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
                line.join(" ")
            );
        }
        for r in &s.points {
            let x = px(r.dimension as f64);
            if positive(r.min) && positive(r.max) {
                let _ = writeln!(
                    svg,
                    r#"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="{color}"/>"#,
                    py(r.min),
                    py(r.max)
                );
            }
            if positive(r.mean) {
                let _ = writeln!(svg, r#"<circle cx="{x:.1}" cy="{:.1}" r="3" fill="{color}"/>"#, py(r.mean));
            }
        }
        let theory: Vec<String> = s
            .points
            .iter()
            .filter_map(|r| {
                r.theory_value.filter(|&v| positive(v)).map(|v| format!("{:.1},{:.1}", px(r.dimension as f64), py(v)))
            })
            .collect();
        if theory.len() > 1 {
            let _ = writeln!(
                svg,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-dasharray="5,4"/>"#,
                theory.join(" ")
            );
        }
        let ly = MARGIN_Y + 14.0 + 18.0 * i as f64;
        let lx = MARGIN_LEFT + plot_w + 12.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(s.name)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn write_svg<W: Write>(rows: &[ExperimentRow], title: &str, mut out: W) -> Result<()> {
    out.write_all(render_svg(rows, title).as_bytes())?;
    out.flush()?;
    Ok(())
}

fn bounds(v: &[f64]) -> (f64, f64) {
    v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
