#![allow(dead_code)]

use std::path::PathBuf;

use acc::simulate::{Phase, Scenario};
use acc::{DistributionSpec, DrawingScale, FalseAlarmProb, Observation, StateTransition, SystemModel};

/// Seed of the simulated Example III stand-in dataset.
pub const EXAMPLE3_SEED: u64 = 20_230_517;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures").join(name)
}

/// Set `ACC_BLESS=1` to rewrite golden files instead of comparing.
pub fn blessing() -> bool {
    std::env::var_os("ACC_BLESS").is_some()
}

pub fn load_observations(name: &str) -> Vec<Observation> {
    let mut reader = csv::Reader::from_path(fixture(name)).expect("fixture exists");
    reader
        .records()
        .map(|rec| {
            let rec = rec.expect("valid csv row");
            Observation::new(
                rec[0].parse().expect("seq"),
                rec[1].parse().expect("state"),
                rec[2].parse().expect("ttf"),
            )
        })
        .collect()
}

pub fn write_observations(name: &str, obs: &[Observation]) {
    let mut writer = csv::Writer::from_path(fixture(name)).expect("writable fixture");
    writer.write_record(["seq", "state", "ttf"]).unwrap();
    for o in obs {
        writer
            .write_record([o.seq.to_string(), o.state.to_string(), format!("{:.2}", o.ttf)])
            .unwrap();
    }
    writer.flush().unwrap();
}

fn system(states: Vec<(&str, DistributionSpec)>, scale: DrawingScale) -> SystemModel {
    let states = states.into_iter().map(|(l, s)| StateTransition::new(l, s)).collect();
    SystemModel::new(states, FalseAlarmProb::DEFAULT, scale).unwrap()
}

pub fn example1_system(scale: DrawingScale) -> SystemModel {
    system(
        vec![
            ("S1", DistributionSpec::exponential(100.0).unwrap()),
            ("S2", DistributionSpec::exponential(400.0).unwrap()),
            ("S3", DistributionSpec::exponential(800.0).unwrap()),
        ],
        scale,
    )
}

pub fn example3_system(scale: DrawingScale) -> SystemModel {
    system(
        vec![
            ("S1", DistributionSpec::gamma(100.0, 1.0).unwrap()),
            ("S2", DistributionSpec::rayleigh(200.0).unwrap()),
            ("S3", DistributionSpec::weibull(600.0, 1.5).unwrap()),
            ("S4", DistributionSpec::weibull(1000.0, 2.0).unwrap()),
        ],
        scale,
    )
}

/// 25 in-control events, then 25 with scales 300, 300, 200, 200.
pub fn example3_scenario() -> Scenario {
    let shifted = Phase::new(25)
        .with_override(1, DistributionSpec::gamma(300.0, 1.0).unwrap())
        .with_override(2, DistributionSpec::rayleigh(300.0).unwrap())
        .with_override(3, DistributionSpec::weibull(200.0, 1.5).unwrap())
        .with_override(4, DistributionSpec::weibull(200.0, 2.0).unwrap());
    Scenario::new(example3_system(DrawingScale::CBRT), vec![Phase::new(25), shifted], EXAMPLE3_SEED).unwrap()
}
