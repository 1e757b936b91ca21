//! SVG rendering of instances, solutions, and recursion traces.

use std::collections::BTreeSet;
use std::fmt::Write;

use crate::geom::Point;
use crate::instance::Instance;
use crate::recsep::TraceEntry;

const SCALE: f64 = 48.0;
const MARGIN: f64 = 1.5;
const LEVEL_COLORS: [&str; 6] = ["#d62728", "#9467bd", "#2ca02c", "#ff7f0e", "#17becf", "#8c564b"];

/// Renders the instance with the chosen disks emphasized. Each trace entry
/// contributes one cutting-path polyline.
pub fn render_svg(
    instance: &Instance,
    chosen: &BTreeSet<usize>,
    trace: Option<&[TraceEntry]>,
) -> String {
    let mut min_x = f64::INFINITY;
    let mut min_y = f64::INFINITY;
    let mut max_x = f64::NEG_INFINITY;
    let mut max_y = f64::NEG_INFINITY;
    for d in &instance.disks {
        min_x = min_x.min(d.center.x - d.radius);
        max_x = max_x.max(d.center.x + d.radius);
        min_y = min_y.min(d.center.y - d.radius);
        max_y = max_y.max(d.center.y + d.radius);
    }
    for p in &instance.points {
        min_x = min_x.min(p.x);
        max_x = max_x.max(p.x);
        min_y = min_y.min(p.y);
        max_y = max_y.max(p.y);
    }
    if !min_x.is_finite() {
        min_x = 0.0;
        min_y = 0.0;
        max_x = 1.0;
        max_y = 1.0;
    }
    min_x -= MARGIN;
    min_y -= MARGIN;
    max_x += MARGIN;
    max_y += MARGIN;
    let width = (max_x - min_x) * SCALE;
    let height = (max_y - min_y) * SCALE;
    let tx = |p: Point| ((p.x - min_x) * SCALE, (max_y - p.y) * SCALE);

    let mut out = String::new();
    writeln!(
        out,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.1} {height:.1}">"#
    )
    .unwrap();
    writeln!(out, r#"  <rect width="100%" height="100%" fill="white"/>"#).unwrap();

    for d in &instance.disks {
        let (cx, cy) = tx(d.center);
        let r = d.radius * SCALE;
        if chosen.contains(&d.id) {
            writeln!(
                out,
                r##"  <circle cx="{cx:.2}" cy="{cy:.2}" r="{r:.2}" fill="#1f77b4" fill-opacity="0.35" stroke="#d62728" stroke-width="2.5"/>"##
            )
            .unwrap();
        } else {
            writeln!(
                out,
                r##"  <circle cx="{cx:.2}" cy="{cy:.2}" r="{r:.2}" fill="#1f77b4" fill-opacity="0.15" stroke="#7f7f7f" stroke-width="1"/>"##
            )
            .unwrap();
        }
    }

    if let Some(entries) = trace {
        for (level, entry) in entries.iter().enumerate() {
            if entry.waypoints.is_empty() {
                continue;
            }
            let pts: Vec<String> = entry
                .waypoints
                .iter()
                .map(|&w| {
                    let (x, y) = tx(w);
                    format!("{x:.2},{y:.2}")
                })
                .collect();
            let color = LEVEL_COLORS[level % LEVEL_COLORS.len()];
            writeln!(
                out,
                r#"  <polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5" stroke-dasharray="6 3"/>"#,
                pts.join(" ")
            )
            .unwrap();
            if entry.piece_path.len() >= 2 {
                let pts: Vec<String> = entry
                    .piece_path
                    .iter()
                    .map(|&w| {
                        let (x, y) = tx(w);
                        format!("{x:.2},{y:.2}")
                    })
                    .collect();
                writeln!(
                    out,
                    r#"  <polyline points="{}" fill="none" stroke="{color}" stroke-width="1" stroke-dasharray="1 3"/>"#,
                    pts.join(" ")
                )
                .unwrap();
            }
        }
    }

    for (i, &p) in instance.points.iter().enumerate() {
        let (x, y) = tx(p);
        writeln!(out, r#"  <circle cx="{x:.2}" cy="{y:.2}" r="3.5" fill="black"/>"#).unwrap();
        writeln!(
            out,
            r#"  <text x="{:.2}" y="{:.2}" font-size="12" font-family="sans-serif">p{i}</text>"#,
            x + 5.0,
            y - 5.0
        )
        .unwrap();
    }
    writeln!(out, "</svg>").unwrap();
    out
}
