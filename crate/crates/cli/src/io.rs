//! Observation files and the classification report.

use std::fs;
use std::io::Write;
use std::path::Path;

use acc::chart::{median_split, CenterSide, MedianSplit};
use acc::{Chart, Observation, Status, SystemModel};
use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use crate::config::{resolve_state, StateRef};

/// One CSV row as written, state kept verbatim.
#[derive(Debug, Clone, PartialEq)]
pub struct RawRow {
    pub line: u64,
    pub seq: u64,
    pub state: String,
    pub ttf: f64,
    /// Digits after the decimal point in the source text.
    pub decimals: usize,
}

pub fn read_rows(path: &Path) -> Result<Vec<RawRow>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let name = path.display().to_string();
    let headers = reader.headers().with_context(|| format!("{name}: reading header"))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["seq", "state", "ttf"] {
        bail!("{name} line 1: expected header `seq,state,ttf`, found `{}`", headers.iter().collect::<Vec<_>>().join(","));
    }
    let mut rows = Vec::new();
    let mut last_seq: Option<u64> = None;
    for record in reader.records() {
        let record = record.with_context(|| format!("{name}: malformed CSV"))?;
        let line = record.position().map_or(0, |p| p.line());
        let here = || format!("{name} line {line}");
        let seq: u64 = record[0].parse().map_err(|_| anyhow!("{}: invalid seq `{}`", here(), &record[0]))?;
        if last_seq.is_some_and(|prev| seq <= prev) {
            bail!("{}: seq {seq} is not strictly increasing", here());
        }
        last_seq = Some(seq);
        let text = &record[2];
        let ttf: f64 = text.parse().map_err(|_| anyhow!("{}: invalid ttf `{text}`", here()))?;
        if !(ttf.is_finite() && ttf >= 0.0) {
            bail!("{}: ttf must be finite and non-negative, got {text}", here());
        }
        let decimals = text.split_once('.').map_or(0, |(_, frac)| frac.len());
        rows.push(RawRow { line, seq, state: record[1].to_string(), ttf, decimals });
    }
    Ok(rows)
}

pub fn resolve_rows(system: &SystemModel, rows: &[RawRow], name: &str) -> Result<Vec<Observation>> {
    rows.iter()
        .map(|r| {
            let state = resolve_state(system, &StateRef::Label(r.state.clone()))
                .with_context(|| format!("{name} line {}", r.line))?;
            Ok(Observation::new(r.seq, state, r.ttf))
        })
        .collect()
}

/// Read observations from CSV, or from the `points` of a classification
/// report when the path ends in `.json`.
pub fn load_observations(system: &SystemModel, path: &Path) -> Result<Vec<Observation>> {
    let name = path.display().to_string();
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        let text = fs::read_to_string(path).with_context(|| format!("reading {name}"))?;
        let report: ReportInput = serde_json::from_str(&text).with_context(|| format!("parsing {name}"))?;
        return report
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let state = resolve_state(system, &StateRef::Label(p.state.clone()))
                    .with_context(|| format!("{name} point {}", i + 1))?;
                Ok(Observation::new(p.seq, state, p.ttf))
            })
            .collect();
    }
    resolve_rows(system, &read_rows(path)?, &name)
}

pub fn write_rows<W: Write>(out: W, rows: &[(u64, String, String)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["seq", "state", "ttf"])?;
    for (seq, state, ttf) in rows {
        w.write_record([seq.to_string().as_str(), state, ttf])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Deserialize)]
struct ReportInput {
    points: Vec<PointInput>,
}

#[derive(Debug, Deserialize)]
struct PointInput {
    seq: u64,
    state: String,
    ttf: f64,
}

#[derive(Debug, Serialize)]
pub struct LimitRow {
    pub state: String,
    pub distribution: String,
    pub t_lower: f64,
    pub t_center: f64,
    pub t_upper: f64,
    pub theta_upper: f64,
    pub theta_center: f64,
    pub theta_lower: f64,
}

#[derive(Debug, Serialize)]
pub struct LimitsReport {
    pub design: String,
    pub drawing_scale: String,
    pub false_alarm: f64,
    pub states: Vec<LimitRow>,
}

impl LimitsReport {
    pub fn new(chart: &Chart) -> Self {
        let system = chart.system();
        let states = chart
            .limits()
            .iter()
            .zip(system.states())
            .map(|(l, s)| LimitRow {
                state: l.label.clone(),
                distribution: s.spec.to_string(),
                t_lower: l.t_lower,
                t_center: l.t_center,
                t_upper: l.t_upper,
                theta_upper: l.angles.upper.degrees(),
                theta_center: l.angles.center.degrees(),
                theta_lower: l.angles.lower.degrees(),
            })
            .collect();
        Self {
            design: design_name(chart),
            drawing_scale: system.scale().to_string(),
            false_alarm: system.false_alarm().value(),
            states,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct PointRow {
    pub seq: u64,
    pub state: String,
    pub ttf: f64,
    pub theta: f64,
    pub status: &'static str,
    pub side: &'static str,
}

#[derive(Debug, Serialize)]
pub struct ClassificationReport {
    #[serde(flatten)]
    pub limits: LimitsReport,
    pub points: Vec<PointRow>,
    pub out_of_control: Vec<u64>,
    pub median_split: MedianSplit,
}

impl ClassificationReport {
    pub fn new(chart: &Chart) -> Self {
        let points = chart
            .points()
            .iter()
            .map(|p| PointRow {
                seq: p.observation.seq,
                state: chart.label_of(p).to_string(),
                ttf: p.observation.ttf,
                theta: p.theta.degrees(),
                status: p.status.name(),
                side: side_name(p.side),
            })
            .collect();
        Self {
            limits: LimitsReport::new(chart),
            points,
            out_of_control: chart.out_of_control().map(|p| p.observation.seq).collect(),
            median_split: median_split(chart),
        }
    }

    pub fn any_out_of_control(&self) -> bool {
        !self.out_of_control.is_empty()
    }
}

fn design_name(chart: &Chart) -> String {
    match chart.design() {
        acc::Design::Standard => "standard".into(),
        acc::Design::Generalized => "generalized".into(),
    }
}

fn side_name(side: CenterSide) -> &'static str {
    match side {
        CenterSide::Above => "above",
        CenterSide::Below => "below",
        CenterSide::On => "on",
    }
}

pub fn print_limits<W: Write>(mut out: W, report: &LimitsReport) -> Result<()> {
    writeln!(
        out,
        "design: {}  drawing scale: {}  false alarm: {}",
        report.design, report.drawing_scale, report.false_alarm
    )?;
    writeln!(
        out,
        "{:<10} {:>12} {:>12} {:>12} {:>8} {:>8} {:>8}",
        "state", "T_L", "T_C", "T_U", "θ_U", "θ_C", "θ_L"
    )?;
    for s in &report.states {
        writeln!(
            out,
            "{:<10} {:>12.2} {:>12.2} {:>12.2} {:>7.2}° {:>7.2}° {:>7.2}°",
            s.state, s.t_lower, s.t_center, s.t_upper, s.theta_upper, s.theta_center, s.theta_lower
        )?;
    }
    Ok(())
}

pub fn print_classification<W: Write>(mut out: W, report: &ClassificationReport) -> Result<()> {
    print_limits(&mut out, &report.limits)?;
    writeln!(out)?;
    writeln!(out, "{:>6} {:<10} {:>12} {:>8}  status", "seq", "state", "ttf", "θ")?;
    for p in &report.points {
        let flag = if p.status == Status::InControl.name() { "" } else { "  *" };
        writeln!(out, "{:>6} {:<10} {:>12.2} {:>7.2}°  {}{flag}", p.seq, p.state, p.ttf, p.theta, p.status)?;
    }
    writeln!(out)?;
    writeln!(out, "out of control: {} of {}", report.out_of_control.len(), report.points.len())?;
    let m = &report.median_split;
    writeln!(out, "center line: {} above, {} below, {} on", m.overall.above, m.overall.below, m.overall.on)?;
    for s in &m.per_state {
        writeln!(
            out,
            "  {:<8} {} of {} above",
            s.label,
            s.counts.above,
            s.counts.total()
        )?;
    }
    Ok(())
}

/// Most digits after the decimal point among `rows`, for faithful output.
pub fn max_decimals(rows: &[RawRow]) -> usize {
    rows.iter().map(|r| r.decimals).max().unwrap_or(0)
}

pub fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(())
}
