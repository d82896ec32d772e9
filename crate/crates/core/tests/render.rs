mod common;

use acc::chart::{build_chart, Design, Observation};
use acc::render::{layout, render_svg, RenderOptions};
use acc::{AccError, DrawingScale, Status};

#[test]
fn example_one_standard_svg() {
    let obs = common::load_observations("example1.csv");
    let chart = build_chart(&common::example1_system(DrawingScale::CBRT), Design::Standard, &obs).unwrap();
    let svg = render_svg(&chart, &RenderOptions::default()).unwrap();
    assert!(svg.starts_with("<?xml"));
    assert!(svg.contains(r#"version="1.1""#));
    assert_eq!(svg.matches("<circle").count(), 50 + 3, "50 points plus legend");
    assert_eq!(svg.matches(r#"class="improvement""#).count(), 2);
    assert_eq!(svg.matches(r#"class="degradation""#).count(), 1);
    let layout = layout(&chart, &RenderOptions::default()).unwrap();
    assert_eq!(layout.state_lines.len(), 3);
    // Straight limits: origin and one end point each.
    assert_eq!(layout.lower.len(), 2);
    assert_eq!(layout.upper.len(), 2);
    assert_eq!(layout.center.len(), 2);
}

#[test]
fn example_three_generalized_svg() {
    let obs = common::load_observations("example3_simulated.csv");
    let chart = build_chart(&common::example3_system(DrawingScale::CBRT), Design::Generalized, &obs).unwrap();
    let layout = layout(&chart, &RenderOptions::default()).unwrap();
    assert_eq!(layout.state_lines.len(), 4);
    // Origin, four crossings, extension.
    assert_eq!(layout.lower.len(), 6);
    assert_eq!(layout.upper.len(), 6);
    let ys: Vec<f64> = layout.state_lines.iter().map(|l| l.y).collect();
    assert!(ys.windows(2).all(|w| w[0] < w[1]), "state lines ascend by median");
    // Zigzag: the slopes of the lower polyline's crossing points differ.
    let slopes: Vec<f64> = layout.lower[1..5].iter().map(|&(x, y)| y / x).collect();
    assert!(slopes.windows(2).any(|w| (w[0] - w[1]).abs() > 1e-6));
    for &(x, y) in &layout.center[1..] {
        assert!((x - y).abs() <= 1e-12 * y, "center line leaves 45°");
    }
    let svg = render_svg(&chart, &RenderOptions::default()).unwrap();
    assert!(svg.contains(r#"id="lower-limit""#) && svg.contains(r#"id="upper-limit""#));
}

#[test]
fn points_keep_their_angle_in_chart_coordinates() {
    for (system, file, design) in [
        (common::example1_system(DrawingScale::CBRT), "example1.csv", Design::Standard),
        (common::example3_system(DrawingScale::CBRT), "example3_simulated.csv", Design::Generalized),
    ] {
        let obs = common::load_observations(file);
        let chart = build_chart(&system, design, &obs).unwrap();
        let layout = layout(&chart, &RenderOptions::default()).unwrap();
        for (placed, point) in layout.points.iter().zip(chart.points()) {
            let ratio = placed.y / placed.x;
            let tan = point.theta.tan();
            assert!(((ratio - tan) / tan).abs() < 1e-9, "seq {}", placed.seq);
        }
    }
}

#[test]
fn empty_chart_renders_axes_and_limits() {
    let chart = build_chart(&common::example1_system(DrawingScale::CBRT), Design::Standard, &[]).unwrap();
    let svg = render_svg(&chart, &RenderOptions::default()).unwrap();
    assert!(svg.contains(r#"id="axes""#));
    assert!(svg.contains(r#"id="center-line""#));
    assert!(!svg.contains("class=\"in-control\""));
}

#[test]
fn degenerate_canvas_is_rejected() {
    let chart = build_chart(&common::example1_system(DrawingScale::CBRT), Design::Standard, &[]).unwrap();
    let options = RenderOptions { width: 100.0, margin: 50.0, ..RenderOptions::default() };
    assert!(matches!(render_svg(&chart, &options), Err(AccError::DegenerateCanvas { .. })));
}

#[test]
fn coincident_points_are_stacked_and_annotated() {
    let obs = [
        Observation::new(1, 1, 50.0),
        Observation::new(2, 1, 50.001),
        Observation::new(3, 1, 50.002),
        Observation::new(4, 2, 50.0),
    ];
    let chart = build_chart(&common::example1_system(DrawingScale::CBRT), Design::Standard, &obs).unwrap();
    let options = RenderOptions::default();
    let layout = layout(&chart, &options).unwrap();
    let group: Vec<_> = layout.points.iter().filter(|p| p.state == 1).collect();
    assert!(group.iter().all(|p| p.multiplicity == 3));
    assert!((group[0].py - group[1].py - options.coincidence_offset).abs() < 1e-9);
    assert_eq!(layout.points[3].multiplicity, 1);
    let svg = render_svg(&chart, &options).unwrap();
    assert_eq!(svg.matches("×3").count(), 1);
    assert!(chart.points().iter().all(|p| p.status == Status::InControl));
}

#[test]
fn output_is_byte_stable() {
    let obs = common::load_observations("example1.csv");
    let chart = build_chart(&common::example1_system(DrawingScale::SQRT), Design::Standard, &obs).unwrap();
    let a = render_svg(&chart, &RenderOptions::default()).unwrap();
    let b = render_svg(&chart.clone(), &RenderOptions::default()).unwrap();
    assert_eq!(a, b);
}
