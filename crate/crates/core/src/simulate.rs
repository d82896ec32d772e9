//! Seeded generation of time-to-failure datasets, r-failure aggregation and
//! Monte Carlo false-alarm estimation.
//!
//! Randomness comes from ChaCha8 (`rand_chacha` 0.9). Scenario event `i` of
//! phase `j` reads stream `j` starting at word `4 i`; Monte Carlo shard `s`
//! reads stream `s`. Results therefore never depend on thread count.

use std::collections::HashMap;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;

use crate::acl::{self, FalseAlarmProb};
use crate::chart::{classify, point_angle, Observation, StateTransition, SystemModel};
use crate::distributions::{DistributionFamily, DistributionSpec};
use crate::error::{AccError, Result};
use crate::scales::DrawingScale;

/// Identifies the generator and substream layout; bump when either changes.
pub const RNG_NAME: &str = "chacha8-v1";

/// Minimum sample count accepted by [`estimate_false_alarm_rate`].
pub const MIN_MONTE_CARLO_SAMPLES: usize = 10_000;

const MONTE_CARLO_SHARDS: u64 = 64;
const WORDS_PER_EVENT: u128 = 4;

/// Uniform variates on the open interval (0, 1).
pub struct UniformStream {
    rng: ChaCha8Rng,
}

impl UniformStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng }
    }

    fn at_word(seed: u64, stream: u64, word: u128) -> Self {
        let mut s = Self::new(seed, stream);
        s.rng.set_word_pos(word);
        s
    }

    pub fn next_open01(&mut self) -> f64 {
        // 53 random bits centred in their cell: never 0, never 1.
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }
}

/// Replacement distribution for one state during a phase.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecOverride {
    /// 1-based state index.
    pub state: usize,
    pub spec: DistributionSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Phase {
    pub events: usize,
    pub overrides: Vec<SpecOverride>,
    /// Relative state-selection weights; equal when `None`.
    pub weights: Option<Vec<f64>>,
}

impl Phase {
    pub fn new(events: usize) -> Self {
        Self { events, overrides: Vec::new(), weights: None }
    }

    pub fn with_override(mut self, state: usize, spec: DistributionSpec) -> Self {
        self.overrides.push(SpecOverride { state, spec });
        self
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Self {
        self.weights = Some(weights);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    system: SystemModel,
    phases: Vec<Phase>,
    seed: u64,
}

impl Scenario {
    pub fn new(system: SystemModel, phases: Vec<Phase>, seed: u64) -> Result<Self> {
        let n = system.states().len();
        for (j, phase) in phases.iter().enumerate() {
            for o in &phase.overrides {
                if o.state == 0 || o.state > n {
                    return Err(AccError::InvalidScenario(format!(
                        "phase {}: override references state {} of {n}",
                        j + 1,
                        o.state
                    )));
                }
            }
            if let Some(w) = &phase.weights {
                let valid = w.len() == n && w.iter().all(|x| x.is_finite() && *x >= 0.0) && w.iter().sum::<f64>() > 0.0;
                if !valid {
                    return Err(AccError::InvalidScenario(format!(
                        "phase {}: need {n} non-negative weights with a positive sum",
                        j + 1
                    )));
                }
            }
        }
        Ok(Self { system, phases, seed })
    }

    pub fn system(&self) -> &SystemModel {
        &self.system
    }

    pub fn phases(&self) -> &[Phase] {
        &self.phases
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }
}

fn pick_state(weights: &[f64], u: f64) -> usize {
    let total: f64 = weights.iter().sum();
    let target = u * total;
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if target < acc {
            return i;
        }
    }
    // Rounding left `target` at the total: last state with positive weight.
    weights.iter().rposition(|w| *w > 0.0).unwrap_or(0)
}

/// Generate the scenario's observations, numbered from 1.
pub fn run_scenario(scenario: &Scenario) -> Result<Vec<Observation>> {
    let n_states = scenario.system.states().len();
    let mut out = Vec::with_capacity(scenario.phases.iter().map(|p| p.events).sum());
    let mut seq = 0u64;
    for (j, phase) in scenario.phases.iter().enumerate() {
        let mut specs: Vec<DistributionSpec> = scenario.system.states().iter().map(|s| s.spec).collect();
        for o in &phase.overrides {
            specs[o.state - 1] = o.spec;
        }
        let weights = phase.weights.clone().unwrap_or_else(|| vec![1.0; n_states]);
        for i in 0..phase.events {
            let mut stream = UniformStream::at_word(scenario.seed, j as u64, i as u128 * WORDS_PER_EVENT);
            let state = pick_state(&weights, stream.next_open01());
            let ttf = specs[state].sample(stream.next_open01())?;
            seq += 1;
            out.push(Observation::new(seq, state + 1, ttf));
        }
    }
    Ok(out)
}

/// Sum every `r` consecutive times to failure of each state.
///
/// Each aggregate keeps the sequence number of the event completing it and
/// aggregates are emitted in that order; an incomplete trailing group is
/// dropped.
pub fn aggregate_r(observations: &[Observation], r: usize) -> Result<Vec<Observation>> {
    if r == 0 {
        return Err(AccError::InvalidParameter("aggregation size r must be at least 1".into()));
    }
    let mut pending: HashMap<usize, (usize, f64)> = HashMap::new();
    let mut out = Vec::with_capacity(observations.len() / r);
    for obs in observations {
        let entry = pending.entry(obs.state).or_insert((0, 0.0));
        entry.0 += 1;
        entry.1 += obs.ttf;
        if entry.0 == r {
            out.push(Observation::new(obs.seq, obs.state, entry.1));
            *entry = (0, 0.0);
        }
    }
    Ok(out)
}

/// Replace every exponential state by the Erlang law of a sum of `r` draws.
pub fn erlang_lift(system: &SystemModel, r: u32) -> Result<SystemModel> {
    if r == 0 {
        return Err(AccError::InvalidParameter("aggregation size r must be at least 1".into()));
    }
    let states = system
        .states()
        .iter()
        .map(|s| match s.spec.family() {
            DistributionFamily::Exponential => {
                Ok(StateTransition::new(s.label.clone(), DistributionSpec::erlang(s.spec.scale(), r)?))
            }
            _ => Err(AccError::NonExponential(s.label.clone())),
        })
        .collect::<Result<Vec<_>>>()?;
    SystemModel::new(states, system.false_alarm(), system.scale())
}

/// Fraction of `n` in-control draws from `spec` that land outside the limits.
pub fn estimate_false_alarm_rate(
    spec: &DistributionSpec,
    c: FalseAlarmProb,
    scale: DrawingScale,
    n: usize,
    seed: u64,
) -> Result<f64> {
    if n < MIN_MONTE_CARLO_SAMPLES {
        return Err(AccError::InvalidParameter(format!(
            "Monte Carlo needs at least {MIN_MONTE_CARLO_SAMPLES} samples, got {n}"
        )));
    }
    let limits = acl::limit_angles(spec, c, scale)?;
    let t_c = spec.median();
    let per_shard = n as u64 / MONTE_CARLO_SHARDS;
    let extra = n as u64 % MONTE_CARLO_SHARDS;
    let alarms = (0..MONTE_CARLO_SHARDS)
        .into_par_iter()
        .map(|shard| -> Result<u64> {
            let count = per_shard + u64::from(shard < extra);
            let mut stream = UniformStream::new(seed, shard);
            let mut alarms = 0;
            for _ in 0..count {
                let t = spec.sample(stream.next_open01())?;
                if classify(point_angle(t_c, t, scale)?, &limits).is_out_of_control() {
                    alarms += 1;
                }
            }
            Ok(alarms)
        })
        .collect::<Result<Vec<u64>>>()?
        .into_iter()
        .sum::<u64>();
    Ok(alarms as f64 / n as f64)
}
