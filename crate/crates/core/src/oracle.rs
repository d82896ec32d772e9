//! Independent check of the quantile and limit-angle formulas.
//!
//! The oracle inverts the CDF by plain bisection on a geometrically grown
//! bracket. It shares only `DistributionSpec::cdf` with the main path.

use rayon::prelude::*;
use serde::Serialize;

use crate::acl::{self, FalseAlarmProb};
use crate::distributions::{DistributionFamily, DistributionSpec};
use crate::error::{AccError, Result};
use crate::scales::DrawingScale;

/// Bracket doublings allowed before giving up.
pub const MAX_DOUBLINGS: u32 = 1000;
const MAX_BISECTIONS: u32 = 5000;

/// Relative tolerance of oracle quantiles used by the sweep.
pub const SWEEP_QUANTILE_TOL: f64 = 1e-13;
/// Allowed relative oracle/closed-form quantile deviation.
pub const QUANTILE_AGREEMENT: f64 = 1e-8;
/// Allowed oracle/closed-form angle deviation, degrees.
pub const ANGLE_AGREEMENT_DEG: f64 = 1e-8;

/// Quantile by CDF bisection; the bracket starts at `[0, scale]` and doubles
/// until it straddles `p`.
pub fn quantile_bisect(spec: &DistributionSpec, p: f64, tol: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(AccError::ProbabilityDomain(p));
    }
    if !(tol >= 1e-13) {
        return Err(AccError::InvalidParameter(format!("oracle tolerance {tol} is below 1e-13")));
    }
    let unit = match spec.family() {
        DistributionFamily::Lognormal => spec.scale().exp(),
        _ => spec.scale(),
    };
    let mut lo = 0.0;
    let mut hi = unit;
    let mut doublings = 0;
    while spec.cdf(hi)? < p {
        if doublings == MAX_DOUBLINGS || !hi.is_finite() {
            return Err(AccError::Convergence(format!("no bracket for p={p} within 2^{MAX_DOUBLINGS} x scale")));
        }
        lo = hi;
        hi *= 2.0;
        doublings += 1;
    }
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol * hi || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if spec.cdf(mid)? < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(AccError::Convergence(format!("bisection for p={p} did not reach tolerance {tol}")))
}

#[derive(Debug, Clone, Serialize)]
pub struct AngleCheck {
    pub formula_deg: f64,
    pub oracle_deg: f64,
    pub deviation_deg: f64,
}

impl AngleCheck {
    fn new(formula_deg: f64, oracle_deg: f64) -> Self {
        Self { formula_deg, oracle_deg, deviation_deg: (formula_deg - oracle_deg).abs() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct QuantileCheck {
    pub p: f64,
    pub formula: f64,
    pub oracle: f64,
    pub rel_deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AngleReport {
    pub spec: DistributionSpec,
    pub scale: String,
    pub lower: AngleCheck,
    pub center: AngleCheck,
    pub upper: AngleCheck,
    pub quantiles: Vec<QuantileCheck>,
    pub pass: bool,
}

impl AngleReport {
    pub fn max_angle_deviation(&self) -> f64 {
        self.lower.deviation_deg.max(self.center.deviation_deg).max(self.upper.deviation_deg)
    }

    pub fn max_quantile_deviation(&self) -> f64 {
        self.quantiles.iter().map(|q| q.rel_deviation).fold(0.0, f64::max)
    }
}

/// Recompute the limit angles from bisected quantiles and compare them with
/// [`acl::limit_angles`].
pub fn verify_angles(spec: &DistributionSpec, c: FalseAlarmProb, scale: DrawingScale, tol_deg: f64) -> Result<AngleReport> {
    let formula = acl::limit_angles(spec, c, scale)?;
    let probs = [c.lower_tail(), 0.5, c.upper_tail()];
    let mut oracle_t = [0.0; 3];
    let mut quantiles = Vec::with_capacity(3);
    for (slot, p) in oracle_t.iter_mut().zip(probs) {
        let oracle = quantile_bisect(spec, p, SWEEP_QUANTILE_TOL)?;
        let closed = spec.quantile(p)?;
        *slot = oracle;
        quantiles.push(QuantileCheck { p, formula: closed, oracle, rel_deviation: ((closed - oracle) / oracle).abs() });
    }
    let [t_l, t_c, t_u] = oracle_t;
    let g = |t: f64| scale.apply(t);
    let angle = |num: f64, den: f64| -> Result<f64> { Ok(g(num)?.atan2(g(den)?).to_degrees()) };
    let lower = AngleCheck::new(formula.lower.degrees(), angle(t_c, t_l)?);
    let center = AngleCheck::new(formula.center.degrees(), angle(t_c, t_c)?);
    let upper = AngleCheck::new(formula.upper.degrees(), angle(t_c, t_u)?);
    let mut report = AngleReport {
        spec: *spec,
        scale: scale.name(),
        lower,
        center,
        upper,
        quantiles,
        pass: false,
    };
    report.pass = report.max_angle_deviation() <= tol_deg && report.max_quantile_deviation() <= QUANTILE_AGREEMENT;
    Ok(report)
}

pub const SWEEP_SHAPES: [f64; 6] = [0.5, 1.0, 1.5, 2.0, 3.0, 5.0];

/// Every supported family and shape in [`SWEEP_SHAPES`] (integers only for
/// Erlang), paired with each named drawing scale.
pub fn default_grid() -> Vec<(DistributionSpec, DrawingScale)> {
    let mut specs = Vec::new();
    for family in DistributionFamily::ALL {
        let scale_param = if family == DistributionFamily::Lognormal { 1.5 } else { 250.0 };
        if !family.takes_shape() {
            specs.push(DistributionSpec::new(family, scale_param, None).expect("valid grid spec"));
            continue;
        }
        for shape in SWEEP_SHAPES {
            if family == DistributionFamily::Erlang && shape.fract() != 0.0 {
                continue;
            }
            specs.push(DistributionSpec::new(family, scale_param, Some(shape)).expect("valid grid spec"));
        }
    }
    specs
        .into_iter()
        .flat_map(|spec| DrawingScale::NAMED.into_iter().map(move |scale| (spec, scale)))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub false_alarm: f64,
    pub tol_deg: f64,
    pub reports: Vec<AngleReport>,
}

impl SweepReport {
    pub fn pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &AngleReport> {
        self.reports.iter().filter(|r| !r.pass)
    }
}

/// Run [`verify_angles`] over `grid`. Report order follows the grid.
pub fn sweep(grid: &[(DistributionSpec, DrawingScale)], c: FalseAlarmProb, tol_deg: f64) -> Result<SweepReport> {
    let reports = grid
        .par_iter()
        .map(|(spec, scale)| verify_angles(spec, c, *scale, tol_deg))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepReport { false_alarm: c.value(), tol_deg, reports })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_exponential_median() {
        let spec = DistributionSpec::exponential(100.0).unwrap();
        let t = quantile_bisect(&spec, 0.5, 1e-12).unwrap();
        assert!((t - 69.31471805599453).abs() < 1e-6);
    }

    #[test]
    fn bisect_weibull_tail_matches_formula() {
        let spec = DistributionSpec::weibull(600.0, 1.5).unwrap();
        let t = quantile_bisect(&spec, 0.99865, 1e-12).unwrap();
        let closed = spec.quantile(0.99865).unwrap();
        assert!(((t - closed) / closed).abs() < 1e-8);
    }

    #[test]
    fn bisect_lognormal_median_is_one() {
        let spec = DistributionSpec::lognormal(0.0, 1.0).unwrap();
        assert!((quantile_bisect(&spec, 0.5, 1e-12).unwrap() - 1.0).abs() < 1e-11);
    }

    #[test]
    fn bisect_errors() {
        let spec = DistributionSpec::exponential(1.0).unwrap();
        assert!(quantile_bisect(&spec, 0.0, 1e-12).is_err());
        assert!(quantile_bisect(&spec, 0.5, 1e-20).is_err());
    }

    #[test]
    fn exponential_linear_report() {
        let spec = DistributionSpec::exponential(100.0).unwrap();
        let report = verify_angles(&spec, FalseAlarmProb::DEFAULT, DrawingScale::LINEAR, 1e-8).unwrap();
        assert!(report.pass, "{report:?}");
        assert!((report.lower.formula_deg - 89.89).abs() < 0.01);
        assert!((report.upper.formula_deg - 5.99).abs() < 0.01);
    }

    #[test]
    fn gamma_and_erlang_agree() {
        let g = DistributionSpec::gamma(10.0, 2.0).unwrap();
        let e = DistributionSpec::erlang(10.0, 2).unwrap();
        for scale in DrawingScale::NAMED {
            let a = acl::limit_angles(&g, FalseAlarmProb::DEFAULT, scale).unwrap();
            let b = acl::limit_angles(&e, FalseAlarmProb::DEFAULT, scale).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn grid_covers_families_and_scales() {
        let grid = default_grid();
        // exp 1 + weibull 6 + rayleigh 1 + lognormal 6 + frechet 6 + gamma 6 + erlang 4
        assert_eq!(grid.len(), 30 * 4);
    }
}
