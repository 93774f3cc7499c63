//! Static SVG rendering of a trace: the interaction region, both paths and
//! tick labels. Output depends only on the input, so re-rendering an
//! identical trace gives identical bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use graceful_core::game::{Rect, Vec2};
use graceful_core::simulation::TickRecord;

use crate::error::{Error, Result};

const SIZE: f64 = 480.0;
const PAD: f64 = 30.0;
const COLORS: [&str; 2] = ["#1f77b4", "#d62728"];
const NAMES: [&str; 2] = ["M", "H"];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlotOptions {
    /// Label every n-th tick; the first and last ticks are always labelled.
    pub label_every: usize,
}

impl Default for PlotOptions {
    fn default() -> Self {
        Self { label_every: 10 }
    }
}

/// Panics on an empty record list.
pub fn render_svg(records: &[TickRecord], region: &Rect, opts: PlotOptions) -> String {
    assert!(!records.is_empty(), "nothing to plot");
    let mut lo = region.min;
    let mut hi = region.max;
    for r in records {
        for s in &r.states {
            lo = Vec2::new(lo.x.min(s.position.x), lo.y.min(s.position.y));
            hi = Vec2::new(hi.x.max(s.position.x), hi.y.max(s.position.y));
        }
    }
    let span = (hi.x - lo.x).max(hi.y - lo.y).max(1e-9);
    let scale = (SIZE - 2.0 * PAD) / span;
    let px = |p: Vec2| (PAD + (p.x - lo.x) * scale, SIZE - PAD - (p.y - lo.y) * scale);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}" font-family="sans-serif" font-size="10">"#
    );
    let _ = writeln!(svg, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    let (x0, y0) = px(Vec2::new(region.min.x, region.max.y));
    let _ = writeln!(
        svg,
        r##"<rect x="{x0:.3}" y="{y0:.3}" width="{:.3}" height="{:.3}" fill="#f2f2f2" stroke="#7f7f7f" stroke-dasharray="4 3"/>"##,
        (region.max.x - region.min.x) * scale,
        (region.max.y - region.min.y) * scale,
    );
    for (id, color) in COLORS.iter().enumerate() {
        let points: Vec<String> = records
            .iter()
            .map(|r| {
                let (x, y) = px(r.states[id].position);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            points.join(" ")
        );
        let last = records.len() - 1;
        for (k, r) in records.iter().enumerate() {
            let (x, y) = px(r.states[id].position);
            let labelled = k == 0 || k == last || (opts.label_every > 0 && r.tick % opts.label_every == 0);
            let radius = if labelled { 3.0 } else { 1.5 };
            let _ = writeln!(svg, r#"<circle cx="{x:.3}" cy="{y:.3}" r="{radius}" fill="{color}"/>"#);
            if labelled {
                let _ = writeln!(
                    svg,
                    r#"<text x="{:.3}" y="{:.3}" fill="{color}">{}{}</text>"#,
                    x + 4.0,
                    y - 4.0,
                    NAMES[id],
                    r.tick
                );
            }
        }
    }
    for (id, color) in COLORS.iter().enumerate() {
        let _ = writeln!(
            svg,
            r#"<text x="{PAD}" y="{:.3}" fill="{color}">{} path</text>"#,
            PAD / 2.0 + 12.0 * id as f64,
            NAMES[id]
        );
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn plot_trace(records: &[TickRecord], region: &Rect, path: &Path) -> Result<()> {
    fs::write(path, render_svg(records, region, PlotOptions::default())).map_err(Error::io(path))
}
