//! Standard and generalized angular control charts: limits per state,
//! point angles, classification and the median-split diagnostic.

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use crate::acl::{self, Angle, AngularLimits, FalseAlarmProb};
use crate::distributions::DistributionSpec;
use crate::error::{AccError, Result};
use crate::scales::DrawingScale;

/// Points within this many degrees of 45 count as lying on the center line.
pub const ON_CENTER_TOL_DEG: f64 = 1e-12;

/// One state transition S_n with its time-to-failure distribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateTransition {
    pub label: String,
    pub spec: DistributionSpec,
}

impl StateTransition {
    pub fn new(label: impl Into<String>, spec: DistributionSpec) -> Self {
        Self { label: label.into(), spec }
    }
}

/// Ordered state transitions S1..Sn plus chart-wide settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemModel {
    states: Vec<StateTransition>,
    false_alarm: FalseAlarmProb,
    scale: DrawingScale,
}

impl SystemModel {
    pub fn new(states: Vec<StateTransition>, false_alarm: FalseAlarmProb, scale: DrawingScale) -> Result<Self> {
        if states.is_empty() {
            return Err(AccError::EmptySystem);
        }
        let mut seen = HashSet::new();
        for state in &states {
            if !seen.insert(state.label.as_str()) {
                return Err(AccError::DuplicateLabel(state.label.clone()));
            }
        }
        Ok(Self { states, false_alarm, scale })
    }

    pub fn states(&self) -> &[StateTransition] {
        &self.states
    }

    pub fn false_alarm(&self) -> FalseAlarmProb {
        self.false_alarm
    }

    pub fn scale(&self) -> DrawingScale {
        self.scale
    }

    pub fn with_scale(&self, scale: DrawingScale) -> Self {
        Self { scale, ..self.clone() }
    }

    /// 1-based index of the state carrying `label`.
    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.states.iter().position(|s| s.label == label).map(|i| i + 1)
    }

    /// State by 1-based index.
    pub fn state(&self, index: usize) -> Option<&StateTransition> {
        index.checked_sub(1).and_then(|i| self.states.get(i))
    }
}

/// One observed time to failure. `state` is 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Observation {
    pub seq: u64,
    pub state: usize,
    pub ttf: f64,
}

impl Observation {
    pub fn new(seq: u64, state: usize, ttf: f64) -> Self {
        Self { seq, state, ttf }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Status {
    /// Angle above the lower control limit: a short time to failure.
    Degradation,
    InControl,
    /// Angle below the upper control limit: a long time to failure.
    Improvement,
}

impl Status {
    pub fn is_out_of_control(self) -> bool {
        self != Status::InControl
    }

    pub fn name(self) -> &'static str {
        match self {
            Status::Degradation => "degradation",
            Status::InControl => "in-control",
            Status::Improvement => "improvement",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Position of a point relative to the 45° center line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CenterSide {
    Above,
    Below,
    On,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassifiedPoint {
    pub observation: Observation,
    /// Median time to failure of the observation's state.
    pub t_c: f64,
    pub theta: Angle,
    pub status: Status,
    pub side: CenterSide,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Design {
    /// One set of limit angles shared by every state.
    Standard,
    /// Limit angles per state; limits zigzag across state lines.
    Generalized,
}

impl Design {
    /// Standard when the system admits it, generalized otherwise.
    pub fn auto_for(system: &SystemModel) -> Design {
        if validate_standard(system).is_ok() {
            Design::Standard
        } else {
            Design::Generalized
        }
    }
}

/// Time limits and limit angles of one state line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateLimits {
    pub label: String,
    pub t_lower: f64,
    pub t_center: f64,
    pub t_upper: f64,
    pub angles: AngularLimits,
}

impl StateLimits {
    pub fn compute(state: &StateTransition, c: FalseAlarmProb, angles: AngularLimits) -> Result<Self> {
        Ok(Self {
            label: state.label.clone(),
            t_lower: state.spec.quantile(c.lower_tail())?,
            t_center: state.spec.median(),
            t_upper: state.spec.quantile(c.upper_tail())?,
            angles,
        })
    }
}

/// An immutable, fully classified chart.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Chart {
    system: SystemModel,
    design: Design,
    limits: Vec<StateLimits>,
    points: Vec<ClassifiedPoint>,
}

impl Chart {
    pub fn system(&self) -> &SystemModel {
        &self.system
    }

    pub fn design(&self) -> Design {
        self.design
    }

    /// Per-state limits, in system order.
    pub fn limits(&self) -> &[StateLimits] {
        &self.limits
    }

    /// Classified points, in input order.
    pub fn points(&self) -> &[ClassifiedPoint] {
        &self.points
    }

    /// 0-based state positions sorted by ascending median time to failure.
    pub fn states_by_center(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.limits.len()).collect();
        order.sort_by(|&a, &b| self.limits[a].t_center.total_cmp(&self.limits[b].t_center).then(a.cmp(&b)));
        order
    }

    pub fn out_of_control(&self) -> impl Iterator<Item = &ClassifiedPoint> {
        self.points.iter().filter(|p| p.status.is_out_of_control())
    }

    pub fn label_of(&self, point: &ClassifiedPoint) -> &str {
        &self.limits[point.observation.state - 1].label
    }
}

/// A standard chart needs every state to share family and shape.
pub fn validate_standard(system: &SystemModel) -> Result<()> {
    let mut states = system.states().iter();
    let first = states.next().ok_or(AccError::EmptySystem)?;
    for other in states {
        if first.spec.kernel() == other.spec.kernel() {
            continue;
        }
        let same_family =
            std::mem::discriminant(&first.spec.kernel()) == std::mem::discriminant(&other.spec.kernel());
        let (first, other) = (first.label.clone(), other.label.clone());
        return Err(if same_family {
            AccError::MixedShape { first, other }
        } else {
            AccError::MixedFamily { first, other }
        });
    }
    Ok(())
}

/// Angle of the ray from the origin to the point `(g(t), g(t_c))`.
/// A zero time to failure gives 90°.
pub fn point_angle(t_c: f64, t: f64, scale: DrawingScale) -> Result<Angle> {
    if t.is_nan() || t < 0.0 {
        return Err(AccError::NegativeInput(t));
    }
    if !(t_c > 0.0) {
        return Err(AccError::InvalidParameter(format!("median time must be positive, got {t_c}")));
    }
    Ok(Angle::from_radians(scale.apply(t_c)?.atan2(scale.apply(t)?)))
}

/// Single-point rule with inclusive limits.
pub fn classify(theta: Angle, limits: &AngularLimits) -> Status {
    if theta < limits.upper {
        Status::Improvement
    } else if theta > limits.lower {
        Status::Degradation
    } else {
        Status::InControl
    }
}

fn center_side(theta: Angle) -> CenterSide {
    let diff = theta.degrees() - 45.0;
    if diff.abs() <= ON_CENTER_TOL_DEG {
        CenterSide::On
    } else if diff > 0.0 {
        CenterSide::Above
    } else {
        CenterSide::Below
    }
}

pub fn build_chart(system: &SystemModel, design: Design, observations: &[Observation]) -> Result<Chart> {
    let c = system.false_alarm();
    let scale = system.scale();
    let limits = match design {
        Design::Standard => {
            validate_standard(system)?;
            let shared = acl::limit_angles(&system.states()[0].spec, c, scale)?;
            system
                .states()
                .iter()
                .map(|s| StateLimits::compute(s, c, shared))
                .collect::<Result<Vec<_>>>()?
        }
        Design::Generalized => system
            .states()
            .iter()
            .map(|s| StateLimits::compute(s, c, acl::limit_angles(&s.spec, c, scale)?))
            .collect::<Result<Vec<_>>>()?,
    };

    let mut last_seq = None;
    let mut points = Vec::with_capacity(observations.len());
    for obs in observations {
        if last_seq.is_some_and(|prev| obs.seq <= prev) {
            return Err(AccError::SequenceOrder { seq: obs.seq });
        }
        last_seq = Some(obs.seq);
        if !(obs.ttf.is_finite() && obs.ttf >= 0.0) {
            return Err(AccError::InvalidTtf { seq: obs.seq, ttf: obs.ttf });
        }
        let state = obs
            .state
            .checked_sub(1)
            .and_then(|i| limits.get(i))
            .ok_or(AccError::UnknownState { seq: obs.seq, state: obs.state })?;
        let theta = point_angle(state.t_center, obs.ttf, scale)?;
        points.push(ClassifiedPoint {
            observation: *obs,
            t_c: state.t_center,
            theta,
            status: classify(theta, &state.angles),
            side: center_side(theta),
        });
    }

    Ok(Chart { system: system.clone(), design, limits, points })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SideCounts {
    pub above: usize,
    pub below: usize,
    pub on: usize,
}

impl SideCounts {
    pub fn total(&self) -> usize {
        self.above + self.below + self.on
    }

    fn add(&mut self, side: CenterSide) {
        match side {
            CenterSide::Above => self.above += 1,
            CenterSide::Below => self.below += 1,
            CenterSide::On => self.on += 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateSplit {
    pub label: String,
    #[serde(flatten)]
    pub counts: SideCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MedianSplit {
    pub overall: SideCounts,
    pub per_state: Vec<StateSplit>,
}

impl MedianSplit {
    pub fn state(&self, label: &str) -> Option<&SideCounts> {
        self.per_state.iter().find(|s| s.label == label).map(|s| &s.counts)
    }
}

/// Counts of points above, below and on the center line.
pub fn median_split(chart: &Chart) -> MedianSplit {
    let mut overall = SideCounts::default();
    let mut per_state: Vec<StateSplit> = chart
        .limits
        .iter()
        .map(|l| StateSplit { label: l.label.clone(), counts: SideCounts::default() })
        .collect();
    for point in &chart.points {
        overall.add(point.side);
        per_state[point.observation.state - 1].counts.add(point.side);
    }
    MedianSplit { overall, per_state }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp_system(scales: &[f64]) -> SystemModel {
        let states = scales
            .iter()
            .enumerate()
            .map(|(i, &a)| StateTransition::new(format!("S{}", i + 1), DistributionSpec::exponential(a).unwrap()))
            .collect();
        SystemModel::new(states, FalseAlarmProb::DEFAULT, DrawingScale::CBRT).unwrap()
    }

    fn limits_deg(u: f64, l: f64) -> AngularLimits {
        AngularLimits {
            upper: Angle::from_degrees(u),
            center: Angle::from_degrees(45.0),
            lower: Angle::from_degrees(l),
        }
    }

    #[test]
    fn standard_validation() {
        assert!(validate_standard(&exp_system(&[100.0, 400.0, 800.0])).is_ok());
        assert!(validate_standard(&exp_system(&[100.0])).is_ok());
        let mixed_shape = SystemModel::new(
            vec![
                StateTransition::new("A", DistributionSpec::weibull(1.0, 1.5).unwrap()),
                StateTransition::new("B", DistributionSpec::weibull(1.0, 2.0).unwrap()),
            ],
            FalseAlarmProb::DEFAULT,
            DrawingScale::CBRT,
        )
        .unwrap();
        assert_eq!(
            validate_standard(&mixed_shape),
            Err(AccError::MixedShape { first: "A".into(), other: "B".into() })
        );
        let mixed_family = SystemModel::new(
            vec![
                StateTransition::new("A", DistributionSpec::gamma(1.0, 2.0).unwrap()),
                StateTransition::new("B", DistributionSpec::weibull(1.0, 2.0).unwrap()),
            ],
            FalseAlarmProb::DEFAULT,
            DrawingScale::CBRT,
        )
        .unwrap();
        assert!(matches!(validate_standard(&mixed_family), Err(AccError::MixedFamily { .. })));
        assert_eq!(Design::auto_for(&mixed_family), Design::Generalized);
        assert!(build_chart(&mixed_family, Design::Standard, &[]).is_err());
    }

    #[test]
    fn system_invariants() {
        assert_eq!(
            SystemModel::new(vec![], FalseAlarmProb::DEFAULT, DrawingScale::CBRT),
            Err(AccError::EmptySystem)
        );
        let spec = DistributionSpec::exponential(1.0).unwrap();
        let dup = vec![StateTransition::new("S1", spec), StateTransition::new("S1", spec)];
        assert!(matches!(
            SystemModel::new(dup, FalseAlarmProb::DEFAULT, DrawingScale::CBRT),
            Err(AccError::DuplicateLabel(_))
        ));
    }

    #[test]
    fn point_angle_examples() {
        let cbrt = DrawingScale::CBRT;
        assert_eq!(point_angle(5.0, 5.0, cbrt).unwrap().degrees(), 45.0);
        assert_eq!(point_angle(5.0, 0.0, cbrt).unwrap().degrees(), 90.0);
        let a = point_angle(69.31471805599453, 1296.80, cbrt).unwrap();
        assert!((a.degrees() - 20.64).abs() < 0.005);
        let b = point_angle(554.5177444479562, 0.94, cbrt).unwrap();
        assert!((b.degrees() - 83.20).abs() < 0.005);
        assert!(point_angle(5.0, -1.0, cbrt).is_err());
    }

    #[test]
    fn classify_examples() {
        let exp = acl::limit_angles(
            &DistributionSpec::exponential(1.0).unwrap(),
            FalseAlarmProb::DEFAULT,
            DrawingScale::CBRT,
        )
        .unwrap();
        assert_eq!(classify(Angle::from_degrees(45.0), &exp), Status::InControl);
        let rounded = limits_deg(25.25, 82.88);
        assert_eq!(classify(Angle::from_degrees(20.64), &rounded), Status::Improvement);
        assert_eq!(classify(Angle::from_degrees(82.88), &rounded), Status::InControl);
        assert_eq!(classify(Angle::from_degrees(25.25), &rounded), Status::InControl);
        assert_eq!(classify(Angle::from_degrees(82.89), &rounded), Status::Degradation);
    }

    #[test]
    fn zero_ttf_is_degradation() {
        let chart = build_chart(&exp_system(&[100.0]), Design::Standard, &[Observation::new(1, 1, 0.0)]).unwrap();
        assert_eq!(chart.points()[0].status, Status::Degradation);
    }

    #[test]
    fn empty_observations() {
        let chart = build_chart(&exp_system(&[100.0, 400.0]), Design::Standard, &[]).unwrap();
        assert!(chart.points().is_empty());
        assert_eq!(chart.limits().len(), 2);
        assert_eq!(median_split(&chart).overall.total(), 0);
    }

    #[test]
    fn observation_errors() {
        let system = exp_system(&[100.0, 400.0]);
        let err = build_chart(&system, Design::Standard, &[Observation::new(7, 3, 1.0)]).unwrap_err();
        assert_eq!(err, AccError::UnknownState { seq: 7, state: 3 });
        let err = build_chart(&system, Design::Standard, &[Observation::new(7, 0, 1.0)]).unwrap_err();
        assert_eq!(err, AccError::UnknownState { seq: 7, state: 0 });
        let order = [Observation::new(2, 1, 1.0), Observation::new(2, 1, 1.0)];
        assert_eq!(
            build_chart(&system, Design::Standard, &order).unwrap_err(),
            AccError::SequenceOrder { seq: 2 }
        );
        let neg = [Observation::new(1, 1, -1.0)];
        assert!(matches!(
            build_chart(&system, Design::Standard, &neg),
            Err(AccError::InvalidTtf { .. })
        ));
    }

    #[test]
    fn standard_limits_identical_and_ordered() {
        let chart = build_chart(&exp_system(&[800.0, 100.0, 400.0]), Design::Standard, &[]).unwrap();
        let first = chart.limits()[0].angles;
        assert!(chart.limits().iter().all(|l| l.angles == first));
        assert_eq!(chart.states_by_center(), vec![1, 2, 0]);
    }

    #[test]
    fn center_split_counts_on_line() {
        let system = exp_system(&[100.0]);
        let median = system.states()[0].spec.median();
        let obs = [
            Observation::new(1, 1, median),
            Observation::new(2, 1, median / 2.0),
            Observation::new(3, 1, median * 2.0),
        ];
        let chart = build_chart(&system, Design::Generalized, &obs).unwrap();
        let split = median_split(&chart);
        assert_eq!(split.overall, SideCounts { above: 1, below: 1, on: 1 });
        assert_eq!(split.state("S1").unwrap().total(), 3);
    }
}
