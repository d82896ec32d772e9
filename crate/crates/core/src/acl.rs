//! Angular center line and angular control limits.
//!
//! With `T_C`, `T_L`, `T_U` the quantiles at 1/2, c/2 and 1 - c/2, the
//! lower control limit sits at `atan(g(T_C / T_L))`, the upper one at
//! `atan(g(T_C / T_U))` and the center line at 45 degrees.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::distributions::DistributionSpec;
use crate::error::{AccError, Result};
use crate::scales::DrawingScale;

/// Acceptable probability of a false alarm, strictly inside (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct FalseAlarmProb(f64);

impl FalseAlarmProb {
    pub const DEFAULT: FalseAlarmProb = FalseAlarmProb(0.0027);

    pub fn new(c: f64) -> Result<Self> {
        if c > 0.0 && c < 1.0 {
            Ok(Self(c))
        } else {
            Err(AccError::InvalidParameter(format!(
                "false-alarm probability must lie in (0, 1), got {c}"
            )))
        }
    }

    pub fn value(&self) -> f64 {
        self.0
    }

    /// Cumulative probability of the lower time limit, `c / 2`.
    pub fn lower_tail(&self) -> f64 {
        self.0 / 2.0
    }

    /// Cumulative probability of the upper time limit, `1 - c / 2`.
    pub fn upper_tail(&self) -> f64 {
        1.0 - self.0 / 2.0
    }
}

impl Default for FalseAlarmProb {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// An angle of inclination, stored in radians.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Angle(f64);

impl Angle {
    pub const RIGHT: Angle = Angle(std::f64::consts::FRAC_PI_2);
    pub const HALF_RIGHT: Angle = Angle(std::f64::consts::FRAC_PI_4);

    pub fn from_radians(rad: f64) -> Self {
        Self(rad)
    }

    pub fn from_degrees(deg: f64) -> Self {
        Self(deg.to_radians())
    }

    pub fn radians(&self) -> f64 {
        self.0
    }

    pub fn degrees(&self) -> f64 {
        self.0.to_degrees()
    }

    /// Degrees rounded to two decimals, as reported in tables.
    pub fn rounded_degrees(&self) -> f64 {
        (self.degrees() * 100.0).round() / 100.0
    }

    pub fn tan(&self) -> f64 {
        self.0.tan()
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.2}°", self.degrees())
    }
}

// Serialized as full-precision degrees.
impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.degrees())
    }
}

/// Angles of the upper control limit, center line and lower control limit.
///
/// `0 < upper < center < lower < 90°`. A small angle means a long time to
/// failure, so the upper time limit maps to the smallest angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngularLimits {
    pub upper: Angle,
    pub center: Angle,
    pub lower: Angle,
}

impl fmt::Display for AngularLimits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "θU={} θC={} θL={}", self.upper, self.center, self.lower)
    }
}

/// The center line angle: `atan(rho(1/2, 1/2)) = atan(1)`, under any scale.
pub fn center_angle() -> Angle {
    Angle::HALF_RIGHT
}

/// Angle of the ray through a ratio of quantiles after mapping by `scale`.
fn ratio_angle(ratio: f64, scale: DrawingScale) -> Result<Angle> {
    Ok(Angle::from_radians(scale.apply(ratio)?.atan()))
}

/// Angular control limits for one state-transition distribution.
pub fn limit_angles(spec: &DistributionSpec, c: FalseAlarmProb, scale: DrawingScale) -> Result<AngularLimits> {
    let lower = ratio_angle(spec.ratio_of_quantiles(0.5, c.lower_tail())?, scale)?;
    let upper = ratio_angle(spec.ratio_of_quantiles(0.5, c.upper_tail())?, scale)?;
    let center = ratio_angle(spec.ratio_of_quantiles(0.5, 0.5)?, scale)?;
    debug_assert_eq!(center, center_angle());
    Ok(AngularLimits { upper, center, lower })
}

/// Weibull ratio constants `(ln(1/2)/ln(1-c/2), ln(1/2)/ln(c/2))`; the
/// Weibull limits are `atan` of their `beta`-th roots.
pub fn weibull_constants(c: FalseAlarmProb) -> (f64, f64) {
    let ln_half = 0.5_f64.ln();
    (ln_half / (-c.lower_tail()).ln_1p(), ln_half / c.lower_tail().ln())
}

/// Frechet ratio constants, the reciprocals of the Weibull ones in swapped
/// order: `(ln(c/2)/ln(1/2), ln(1-c/2)/ln(1/2))`.
pub fn frechet_constants(c: FalseAlarmProb) -> (f64, f64) {
    let ln_half = 0.5_f64.ln();
    (c.lower_tail().ln() / ln_half, (-c.lower_tail()).ln_1p() / ln_half)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn deg(spec: &DistributionSpec, scale: DrawingScale) -> (f64, f64) {
        let l = limit_angles(spec, FalseAlarmProb::DEFAULT, scale).unwrap();
        (l.lower.degrees(), l.upper.degrees())
    }

    #[test]
    fn center_is_45_for_every_family() {
        assert_eq!(center_angle().degrees(), 45.0);
        let gamma = DistributionSpec::gamma(1.0, 7.3).unwrap();
        for scale in DrawingScale::NAMED {
            let l = limit_angles(&gamma, FalseAlarmProb::DEFAULT, scale).unwrap();
            assert_eq!(l.center.degrees(), 45.0);
        }
    }

    #[test]
    fn exponential_linear_and_cbrt() {
        let spec = DistributionSpec::exponential(100.0).unwrap();
        let (l, u) = deg(&spec, DrawingScale::LINEAR);
        assert!((l - 89.89).abs() < 0.01 && (u - 5.99).abs() < 0.01);
        let (l, u) = deg(&spec, DrawingScale::CBRT);
        assert!((l - 82.88).abs() < 0.01 && (u - 25.25).abs() < 0.01);
    }

    #[test]
    fn rayleigh_row() {
        let (l, u) = deg(&DistributionSpec::rayleigh(200.0).unwrap(), DrawingScale::LINEAR);
        assert!((l - 87.47).abs() < 0.01 && (u - 17.95).abs() < 0.01);
    }

    #[test]
    fn lognormal_sigma_one() {
        let (l, u) = deg(&DistributionSpec::lognormal(0.0, 1.0).unwrap(), DrawingScale::LINEAR);
        // Phi^-1(0.00135) = -2.99997699...
        let z = 2.9999769927033935_f64;
        assert!((l - z.exp().atan().to_degrees()).abs() < 1e-9);
        assert!((u - (-z).exp().atan().to_degrees()).abs() < 1e-9);
        assert!((l - 87.15).abs() < 0.005 && (u - 2.85).abs() < 0.005);
    }

    #[test]
    fn frechet_shape_one() {
        let (l, u) = deg(&DistributionSpec::frechet(3.0, 1.0).unwrap(), DrawingScale::LINEAR);
        assert!((l - 9.533_f64.atan().to_degrees()).abs() < 1e-3);
        assert!((u - (1.0 / 513.096_f64).atan().to_degrees()).abs() < 1e-6);
        assert!((l - 84.01).abs() < 0.005 && (u - 0.112).abs() < 0.001);
    }

    #[test]
    fn constants() {
        let (rl, ru) = weibull_constants(FalseAlarmProb::DEFAULT);
        assert!((rl - 513.096).abs() < 5e-4);
        assert!((ru - 0.10490069972566331).abs() < 1e-12);
        assert!((ru - 0.105).abs() < 5e-4);
        let (fl, fu) = frechet_constants(FalseAlarmProb::DEFAULT);
        assert!((fl - 9.533).abs() < 5e-4);
        assert!((fl * ru - 1.0).abs() < 1e-14);
        assert!((fu * rl - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ordering_invariant() {
        let specs = [
            DistributionSpec::exponential(1.0).unwrap(),
            DistributionSpec::weibull(1.0, 0.5).unwrap(),
            DistributionSpec::lognormal(0.0, 2.0).unwrap(),
            DistributionSpec::frechet(1.0, 4.0).unwrap(),
            DistributionSpec::gamma(1.0, 0.5).unwrap(),
        ];
        for spec in specs {
            for scale in DrawingScale::NAMED {
                let l = limit_angles(&spec, FalseAlarmProb::DEFAULT, scale).unwrap();
                assert!(0.0 < l.upper.degrees());
                assert!(l.upper < l.center && l.center < l.lower);
                assert!(l.lower.degrees() < 90.0);
            }
        }
    }

    #[test]
    fn false_alarm_bounds() {
        assert!(FalseAlarmProb::new(0.0).is_err());
        assert!(FalseAlarmProb::new(1.0).is_err());
        assert!(FalseAlarmProb::new(f64::NAN).is_err());
        assert_eq!(FalseAlarmProb::default().value(), 0.0027);
    }
}
