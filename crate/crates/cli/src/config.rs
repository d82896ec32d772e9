//! TOML system and scenario configuration.
//!
//! One file format serves every subcommand: the chart-level keys, a
//! `[[states]]` array, and an optional `[[phases]]` array read only by
//! `simulate`.

use std::fs;
use std::path::Path;

use acc::chart::Design;
use acc::simulate::{Phase, Scenario};
use acc::{DistributionFamily, DistributionSpec, DrawingScale, FalseAlarmProb, StateTransition, SystemModel};
use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;
use toml::Spanned;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    false_alarm: Option<Spanned<f64>>,
    drawing_scale: Option<Spanned<String>>,
    design: Option<Spanned<String>>,
    states: Vec<Spanned<RawLaw>>,
    #[serde(default)]
    phases: Vec<Spanned<RawPhase>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLaw {
    #[serde(default)]
    label: Option<String>,
    #[serde(default)]
    state: Option<StateRef>,
    family: String,
    scale: f64,
    shape: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPhase {
    events: usize,
    weights: Option<Vec<f64>>,
    #[serde(default)]
    overrides: Vec<Spanned<RawLaw>>,
}

/// A state given by label or 1-based index.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum StateRef {
    Index(u64),
    Label(String),
}

/// Requested design; `Auto` resolves against the system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DesignChoice {
    Auto,
    Fixed(Design),
}

#[derive(Debug, Clone)]
pub struct SystemConfig {
    pub system: SystemModel,
    pub design: DesignChoice,
    phases: Vec<Phase>,
}

impl SystemConfig {
    pub fn resolved_design(&self) -> Design {
        match self.design {
            DesignChoice::Auto => Design::auto_for(&self.system),
            DesignChoice::Fixed(d) => d,
        }
    }

    pub fn with_scale(mut self, scale: Option<DrawingScale>) -> Self {
        if let Some(s) = scale {
            self.system = self.system.with_scale(s);
        }
        self
    }

    pub fn scenario(&self, seed: u64) -> Result<Scenario> {
        if self.phases.is_empty() {
            bail!("configuration declares no [[phases]] to simulate");
        }
        Ok(Scenario::new(self.system.clone(), self.phases.clone(), seed)?)
    }
}

pub fn load(path: &Path) -> Result<SystemConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse(&text).with_context(|| format!("in {}", path.display()))
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn at<T>(text: &str, spanned: &Spanned<T>) -> String {
    format!("line {}", line_of(text, spanned.span().start))
}

pub fn parse(text: &str) -> Result<SystemConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| anyhow!("{e}"))?;

    let false_alarm = match &raw.false_alarm {
        None => FalseAlarmProb::DEFAULT,
        Some(c) => {
            let value = *c.get_ref();
            // Quantiles at c/2 and 1 - c/2 cross the median at c = 1; below
            // 0.5 keeps both tails inside the outer quartiles.
            if value >= 0.5 {
                bail!("{}: degenerate limits: false_alarm must be below 0.5, got {value}", at(text, c));
            }
            FalseAlarmProb::new(value).with_context(|| at(text, c))?
        }
    };
    let scale = match &raw.drawing_scale {
        None => DrawingScale::default(),
        Some(s) => s.get_ref().parse().with_context(|| at(text, s))?,
    };
    let design = match &raw.design {
        None => DesignChoice::Auto,
        Some(d) => parse_design(d.get_ref()).with_context(|| at(text, d))?,
    };

    if raw.states.is_empty() {
        bail!("at least one [[states]] entry is required");
    }
    let mut states = Vec::with_capacity(raw.states.len());
    for (i, entry) in raw.states.iter().enumerate() {
        let law = entry.get_ref();
        if law.state.is_some() {
            bail!("{}: `state` is only valid in phase overrides", at(text, entry));
        }
        let label = law.label.clone().unwrap_or_else(|| format!("S{}", i + 1));
        let spec = law_spec(law).with_context(|| format!("{} (state {label})", at(text, entry)))?;
        states.push(StateTransition::new(label, spec));
    }
    let system = SystemModel::new(states, false_alarm, scale)?;
    if design == DesignChoice::Fixed(Design::Standard) {
        acc::chart::validate_standard(&system)
            .with_context(|| format!("{}: standard design requested", at(text, raw.design.as_ref().unwrap())))?;
    }

    let mut phases = Vec::with_capacity(raw.phases.len());
    for entry in &raw.phases {
        let p = entry.get_ref();
        let mut phase = Phase::new(p.events);
        if let Some(w) = &p.weights {
            phase = phase.with_weights(w.clone());
        }
        for o in &p.overrides {
            let law = o.get_ref();
            let target = law
                .state
                .as_ref()
                .ok_or_else(|| anyhow!("{}: override needs a `state`", at(text, o)))?;
            let index = resolve_state(&system, target).with_context(|| at(text, o))?;
            let spec = law_spec(law).with_context(|| at(text, o))?;
            phase = phase.with_override(index, spec);
        }
        phases.push(phase);
    }
    // Surface weight and override problems at load time.
    Scenario::new(system.clone(), phases.clone(), 0)?;

    Ok(SystemConfig { system, design, phases })
}

fn parse_design(s: &str) -> Result<DesignChoice> {
    match s.trim().to_ascii_lowercase().as_str() {
        "auto" => Ok(DesignChoice::Auto),
        "standard" => Ok(DesignChoice::Fixed(Design::Standard)),
        "generalized" => Ok(DesignChoice::Fixed(Design::Generalized)),
        other => bail!("unknown design `{other}` (expected auto, standard or generalized)"),
    }
}

fn law_spec(law: &RawLaw) -> Result<DistributionSpec> {
    let family: DistributionFamily = law.family.parse()?;
    Ok(DistributionSpec::new(family, law.scale, law.shape)?)
}

/// Labels win over indices when a label happens to look like a number.
pub fn resolve_state(system: &SystemModel, r: &StateRef) -> Result<usize> {
    let n = system.states().len();
    match r {
        StateRef::Label(label) => {
            if let Some(i) = system.index_of(label) {
                return Ok(i);
            }
            match label.trim().parse::<usize>() {
                Ok(i) if (1..=n).contains(&i) => Ok(i),
                _ => bail!("unknown state `{label}`"),
            }
        }
        StateRef::Index(i) => {
            if let Some(found) = system.index_of(&i.to_string()) {
                return Ok(found);
            }
            match usize::try_from(*i) {
                Ok(i) if (1..=n).contains(&i) => Ok(i),
                _ => bail!("state index {i} out of range 1..={n}"),
            }
        }
    }
}
