//! Deterministic SVG output for a built chart.
//!
//! Geometry is laid out in drawing-scale coordinates (`x = g(ttf)`,
//! `y = g(T_C)`) and only then mapped to pixels, so the ray from the origin
//! to every point keeps its angle before the pixel aspect is applied.

use std::fmt::Write;

use crate::chart::{Chart, Design, Status};
use crate::error::{AccError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct StatusColors {
    pub in_control: String,
    pub improvement: String,
    pub degradation: String,
}

impl StatusColors {
    pub fn for_status(&self, status: Status) -> &str {
        match status {
            Status::InControl => &self.in_control,
            Status::Improvement => &self.improvement,
            Status::Degradation => &self.degradation,
        }
    }
}

impl Default for StatusColors {
    fn default() -> Self {
        Self {
            in_control: "#1f77b4".into(),
            improvement: "#2ca02c".into(),
            degradation: "#d62728".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderOptions {
    pub width: f64,
    pub height: f64,
    pub margin: f64,
    pub marker_radius: f64,
    pub colors: StatusColors,
    /// Vertical pixel step between stacked coincident points.
    pub coincidence_offset: f64,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            width: 800.0,
            height: 600.0,
            margin: 70.0,
            marker_radius: 4.0,
            colors: StatusColors::default(),
            coincidence_offset: 7.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateLine {
    pub label: String,
    pub t_center: f64,
    /// `g(T_C)`.
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlacedPoint {
    pub seq: u64,
    pub state: usize,
    pub ttf: f64,
    pub theta_deg: f64,
    pub status: Status,
    /// Chart coordinates.
    pub x: f64,
    pub y: f64,
    /// Pixel coordinates, including any coincidence offset.
    pub px: f64,
    pub py: f64,
    /// Size of the coincidence group this point belongs to.
    pub multiplicity: usize,
    /// Position within that group, 0 at the state line.
    pub stack_rank: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub x_max: f64,
    pub y_max: f64,
    pub state_lines: Vec<StateLine>,
    pub center: Vec<(f64, f64)>,
    pub lower: Vec<(f64, f64)>,
    pub upper: Vec<(f64, f64)>,
    pub points: Vec<PlacedPoint>,
    plot_w: f64,
    plot_h: f64,
    margin: f64,
    height: f64,
}

impl Layout {
    pub fn to_pixels(&self, x: f64, y: f64) -> (f64, f64) {
        (
            self.margin + x / self.x_max * self.plot_w,
            self.height - self.margin - y / self.y_max * self.plot_h,
        )
    }
}

/// End point of the ray from the origin with slope `slope`, clipped to the box.
fn clip_ray(slope: f64, x_max: f64, y_max: f64) -> (f64, f64) {
    if slope * x_max <= y_max {
        (x_max, slope * x_max)
    } else {
        (y_max / slope, y_max)
    }
}

/// Limit polyline: straight ray for the standard design; for the
/// generalized one, the origin, each state's crossing point in ascending
/// `T_C` order, then the top state's ray extended to the box edge.
fn limit_polyline(crossings: &[(f64, f64)], design: Design, x_max: f64, y_max: f64) -> Vec<(f64, f64)> {
    let mut line = vec![(0.0, 0.0)];
    let Some(&(top_x, top_y)) = crossings.last() else {
        return line;
    };
    let slope = top_y / top_x;
    if design == Design::Generalized {
        line.extend_from_slice(crossings);
    }
    let end = clip_ray(slope, x_max, y_max);
    if line.last() != Some(&end) {
        line.push(end);
    }
    line
}

pub fn layout(chart: &Chart, options: &RenderOptions) -> Result<Layout> {
    let plot_w = options.width - 2.0 * options.margin;
    let plot_h = options.height - 2.0 * options.margin;
    if !(plot_w > 0.0 && plot_h > 0.0) {
        return Err(AccError::DegenerateCanvas { width: plot_w, height: plot_h });
    }
    let scale = chart.system().scale();
    let g = |t: f64| scale.apply(t);

    let order = chart.states_by_center();
    let limits = chart.limits();
    let mut state_lines = Vec::with_capacity(order.len());
    let (mut lower_pts, mut center_pts, mut upper_pts) = (Vec::new(), Vec::new(), Vec::new());
    let mut x_extent = 0.0_f64;
    let mut y_extent = 0.0_f64;
    for &i in &order {
        let l = &limits[i];
        let y = g(l.t_center)?;
        state_lines.push(StateLine { label: l.label.clone(), t_center: l.t_center, y });
        lower_pts.push((g(l.t_lower)?, y));
        center_pts.push((y, y));
        let upper_x = g(l.t_upper)?;
        upper_pts.push((upper_x, y));
        x_extent = x_extent.max(upper_x);
        y_extent = y_extent.max(y);
    }
    let mut placed = Vec::with_capacity(chart.points().len());
    for p in chart.points() {
        let x = g(p.observation.ttf)?;
        let y = g(p.t_c)?;
        x_extent = x_extent.max(x);
        placed.push(PlacedPoint {
            seq: p.observation.seq,
            state: p.observation.state,
            ttf: p.observation.ttf,
            theta_deg: p.theta.degrees(),
            status: p.status,
            x,
            y,
            px: 0.0,
            py: 0.0,
            multiplicity: 1,
            stack_rank: 0,
        });
    }
    let x_max = x_extent * 1.05;
    let y_max = y_extent * 1.1;

    let mut layout = Layout {
        x_max,
        y_max,
        state_lines,
        center: limit_polyline(&center_pts, chart.design(), x_max, y_max),
        lower: limit_polyline(&lower_pts, chart.design(), x_max, y_max),
        upper: limit_polyline(&upper_pts, chart.design(), x_max, y_max),
        points: Vec::new(),
        plot_w,
        plot_h,
        margin: options.margin,
        height: options.height,
    };
    for p in &mut placed {
        (p.px, p.py) = layout.to_pixels(p.x, p.y);
    }
    stack_coincident(&mut placed, options);
    layout.points = placed;
    Ok(layout)
}

/// Points of one state closer than a marker radius horizontally are
/// stacked upward in sequence order.
fn stack_coincident(points: &mut [PlacedPoint], options: &RenderOptions) {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        (points[a].state, points[a].px, points[a].seq)
            .partial_cmp(&(points[b].state, points[b].px, points[b].seq))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len()
            && points[order[end]].state == points[order[start]].state
            && points[order[end]].px - points[order[end - 1]].px < options.marker_radius
        {
            end += 1;
        }
        let mut group: Vec<usize> = order[start..end].to_vec();
        group.sort_by_key(|&i| points[i].seq);
        let size = group.len();
        for (rank, &i) in group.iter().enumerate() {
            points[i].py -= rank as f64 * options.coincidence_offset;
            points[i].multiplicity = size;
            points[i].stack_rank = rank;
        }
        start = end;
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn fmt_time(t: f64) -> String {
    if t >= 100.0 {
        format!("{t:.0}")
    } else if t >= 1.0 {
        format!("{t:.1}")
    } else {
        format!("{t:.3}")
    }
}

fn polyline(out: &mut String, layout: &Layout, pts: &[(f64, f64)], attrs: &str) {
    let coords: Vec<String> = pts
        .iter()
        .map(|&(x, y)| {
            let (px, py) = layout.to_pixels(x, y);
            format!("{px:.2},{py:.2}")
        })
        .collect();
    let _ = writeln!(out, r#"  <polyline points="{}" fill="none" {attrs}/>"#, coords.join(" "));
}

/// Render `chart` as an SVG 1.1 document. Identical inputs give identical bytes.
pub fn render_svg(chart: &Chart, options: &RenderOptions) -> Result<String> {
    let layout = layout(chart, options)?;
    let (w, h, m) = (options.width, options.height, options.margin);
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}" font-family="sans-serif" font-size="11">"#
    );
    let design = match chart.design() {
        Design::Standard => "standard",
        Design::Generalized => "generalized",
    };
    let system = chart.system();
    let _ = writeln!(
        out,
        "  <title>Angular control chart ({design} design, {} scale, c = {})</title>",
        system.scale(),
        system.false_alarm().value()
    );
    let _ = writeln!(out, r#"  <rect x="0" y="0" width="{w:.0}" height="{h:.0}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"  <defs><clipPath id="plot"><rect x="{m:.2}" y="{m:.2}" width="{:.2}" height="{:.2}"/></clipPath></defs>"#,
        layout.plot_w, layout.plot_h
    );

    // Axes and ticks.
    let (ox, oy) = layout.to_pixels(0.0, 0.0);
    let _ = writeln!(out, r#"  <g id="axes" stroke="black" stroke-width="1">"#);
    let _ = writeln!(out, r#"    <line x1="{ox:.2}" y1="{oy:.2}" x2="{:.2}" y2="{oy:.2}"/>"#, w - m);
    let _ = writeln!(out, r#"    <line x1="{ox:.2}" y1="{oy:.2}" x2="{ox:.2}" y2="{m:.2}"/>"#);
    let scale = system.scale();
    for i in 1..=5 {
        let x = layout.x_max * f64::from(i) / 5.0;
        let (px, _) = layout.to_pixels(x, 0.0);
        let _ = writeln!(out, r#"    <line x1="{px:.2}" y1="{oy:.2}" x2="{px:.2}" y2="{:.2}"/>"#, oy + 5.0);
        let _ = writeln!(
            out,
            r#"    <text x="{px:.2}" y="{:.2}" text-anchor="middle" stroke="none">{}</text>"#,
            oy + 18.0,
            fmt_time(scale.invert(x))
        );
    }
    let _ = writeln!(out, "  </g>");
    let _ = writeln!(
        out,
        r#"  <text x="{:.2}" y="{:.2}" text-anchor="middle">Time to failure ({} scale)</text>"#,
        m + layout.plot_w / 2.0,
        h - m / 2.0 + 12.0,
        scale
    );

    // State lines.
    let _ = writeln!(out, r##"  <g id="state-lines" stroke="#888888" stroke-width="1">"##);
    for line in &layout.state_lines {
        let (x1, y) = layout.to_pixels(0.0, line.y);
        let (x2, _) = layout.to_pixels(layout.x_max, line.y);
        let _ = writeln!(out, r#"    <line x1="{x1:.2}" y1="{y:.2}" x2="{x2:.2}" y2="{y:.2}"/>"#);
        let _ = writeln!(
            out,
            r#"    <text x="{:.2}" y="{:.2}" text-anchor="end" stroke="none" fill="black">{}</text>"#,
            x1 - 6.0,
            y + 4.0,
            escape(&line.label)
        );
        let _ = writeln!(
            out,
            r##"    <text x="{:.2}" y="{:.2}" text-anchor="end" stroke="none" fill="#555555" font-size="9">{}</text>"##,
            x1 - 6.0,
            y + 15.0,
            fmt_time(line.t_center)
        );
    }
    let _ = writeln!(out, "  </g>");

    // Limits.
    let _ = writeln!(out, r#"  <g id="limits" clip-path="url(#plot)" stroke-width="1.5">"#);
    polyline(&mut out, &layout, &layout.center, r##"id="center-line" stroke="#444444" stroke-dasharray="6,4""##);
    polyline(&mut out, &layout, &layout.lower, r##"id="lower-limit" stroke="#d62728""##);
    polyline(&mut out, &layout, &layout.upper, r##"id="upper-limit" stroke="#2ca02c""##);
    let _ = writeln!(out, "  </g>");

    // Points, in input order.
    let _ = writeln!(out, r#"  <g id="points">"#);
    for p in &layout.points {
        let label = escape(&chart.limits()[p.state - 1].label);
        let _ = writeln!(
            out,
            r#"    <circle cx="{:.2}" cy="{:.2}" r="{:.2}" fill="{}" class="{}"><title>#{} {} ttf={} θ={:.2}° {}</title></circle>"#,
            p.px,
            p.py,
            options.marker_radius,
            escape(options.colors.for_status(p.status)),
            p.status.name(),
            p.seq,
            label,
            p.ttf,
            p.theta_deg,
            p.status
        );
    }
    // Multiplicity annotation on the top member of each stacked group.
    for p in layout.points.iter().filter(|p| p.multiplicity > 1 && p.stack_rank + 1 == p.multiplicity) {
        let _ = writeln!(
            out,
            r#"    <text x="{:.2}" y="{:.2}" font-size="9">×{}</text>"#,
            p.px + options.marker_radius + 2.0,
            p.py - options.marker_radius,
            p.multiplicity
        );
    }
    let _ = writeln!(out, "  </g>");

    // Legend.
    let _ = writeln!(out, r#"  <g id="legend" font-size="10">"#);
    let entries = [Status::InControl, Status::Improvement, Status::Degradation];
    for (i, status) in entries.iter().enumerate() {
        let y = m / 2.0 - 10.0 + 12.0 * i as f64;
        let x = w - m - 120.0;
        let _ = writeln!(
            out,
            r#"    <circle cx="{x:.2}" cy="{y:.2}" r="4" fill="{}"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            escape(options.colors.for_status(*status)),
            x + 8.0,
            y + 4.0,
            status
        );
    }
    if chart.design() == Design::Standard {
        if let Some(first) = chart.limits().first() {
            let _ = writeln!(out, r#"    <text x="{:.2}" y="{:.2}">{}</text>"#, m, m / 2.0, escape(&first.angles.to_string()));
        }
    }
    let _ = writeln!(out, "  </g>");
    let _ = writeln!(out, "</svg>");
    Ok(out)
}
