//! Lifetime distributions used to model state-transition times to failure.
//!
//! Every family is parameterised by a scale `alpha` and (except the
//! exponential) a shape `beta`. Quantiles are always computed on the unit
//! scale first and then multiplied by the scale, so ratios of quantiles are
//! free of the scale parameter to the last bit.

mod special;

use std::fmt;

use serde::Serialize;

use crate::error::{AccError, Result};

pub(crate) use special::gamma_p;

/// Relative width at which the gamma quantile bisection stops.
pub const GAMMA_QUANTILE_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DistributionFamily {
    Exponential,
    Weibull,
    /// Weibull with shape fixed to 2.
    Rayleigh,
    /// `alpha` and `beta` are the mean and standard deviation of the log.
    Lognormal,
    /// Inverse Weibull.
    Frechet,
    Gamma,
    /// Gamma with a positive integer shape.
    Erlang,
}

impl DistributionFamily {
    pub const ALL: [DistributionFamily; 7] = [
        DistributionFamily::Exponential,
        DistributionFamily::Weibull,
        DistributionFamily::Rayleigh,
        DistributionFamily::Lognormal,
        DistributionFamily::Frechet,
        DistributionFamily::Gamma,
        DistributionFamily::Erlang,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DistributionFamily::Exponential => "exponential",
            DistributionFamily::Weibull => "weibull",
            DistributionFamily::Rayleigh => "rayleigh",
            DistributionFamily::Lognormal => "lognormal",
            DistributionFamily::Frechet => "frechet",
            DistributionFamily::Gamma => "gamma",
            DistributionFamily::Erlang => "erlang",
        }
    }

    /// Whether a shape parameter is supplied by the user.
    pub fn takes_shape(self) -> bool {
        !matches!(
            self,
            DistributionFamily::Exponential | DistributionFamily::Rayleigh
        )
    }

    /// True when the quantile function has no closed form.
    pub fn is_numeric(self) -> bool {
        matches!(self, DistributionFamily::Gamma | DistributionFamily::Erlang)
    }
}

impl fmt::Display for DistributionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for DistributionFamily {
    type Err = AccError;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        DistributionFamily::ALL
            .into_iter()
            .find(|f| f.name() == lower || (lower == "fréchet" && *f == DistributionFamily::Frechet))
            .ok_or_else(|| AccError::InvalidParameter(format!("unknown distribution family '{s}'")))
    }
}

/// The unit-scale shape of a distribution. Two specs with equal kernels
/// differ at most by scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    Weibull { shape: f64 },
    Lognormal { sigma: f64 },
    Frechet { shape: f64 },
    Gamma { shape: f64 },
}

/// Family plus scale/shape parameters of one state transition's TTF law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistributionSpec {
    family: DistributionFamily,
    scale: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    shape: Option<f64>,
}

impl DistributionSpec {
    /// Validating constructor. `shape` must be present exactly when the
    /// family takes one; Rayleigh also accepts an explicit shape of 2.
    pub fn new(family: DistributionFamily, scale: f64, shape: Option<f64>) -> Result<Self> {
        use DistributionFamily::*;
        let bad = |msg: String| Err(AccError::InvalidParameter(msg));
        if !scale.is_finite() {
            return bad(format!("{family} scale must be finite, got {scale}"));
        }
        if family != Lognormal && scale <= 0.0 {
            return bad(format!("{family} scale must be positive, got {scale}"));
        }
        let shape = match (family, shape) {
            (Exponential, None) => None,
            (Exponential, Some(s)) if s == 1.0 => None,
            (Exponential, Some(s)) => return bad(format!("exponential takes no shape, got {s}")),
            (Rayleigh, None) => Some(2.0),
            (Rayleigh, Some(s)) if s == 2.0 => Some(2.0),
            (Rayleigh, Some(s)) => return bad(format!("rayleigh shape is fixed to 2, got {s}")),
            (_, None) => return bad(format!("{family} requires a shape parameter")),
            (_, Some(s)) if !(s.is_finite() && s > 0.0) => {
                return bad(format!("{family} shape must be positive, got {s}"))
            }
            (Erlang, Some(s)) if s.fract() != 0.0 => {
                return bad(format!("erlang shape must be a positive integer, got {s}"))
            }
            (_, Some(s)) => Some(s),
        };
        Ok(Self { family, scale, shape })
    }

    pub fn exponential(scale: f64) -> Result<Self> {
        Self::new(DistributionFamily::Exponential, scale, None)
    }

    pub fn weibull(scale: f64, shape: f64) -> Result<Self> {
        Self::new(DistributionFamily::Weibull, scale, Some(shape))
    }

    pub fn rayleigh(scale: f64) -> Result<Self> {
        Self::new(DistributionFamily::Rayleigh, scale, None)
    }

    /// `mu` and `sigma` of the underlying normal distribution.
    pub fn lognormal(mu: f64, sigma: f64) -> Result<Self> {
        Self::new(DistributionFamily::Lognormal, mu, Some(sigma))
    }

    pub fn frechet(scale: f64, shape: f64) -> Result<Self> {
        Self::new(DistributionFamily::Frechet, scale, Some(shape))
    }

    pub fn gamma(scale: f64, shape: f64) -> Result<Self> {
        Self::new(DistributionFamily::Gamma, scale, Some(shape))
    }

    pub fn erlang(scale: f64, shape: u32) -> Result<Self> {
        Self::new(DistributionFamily::Erlang, scale, Some(f64::from(shape)))
    }

    pub fn family(&self) -> DistributionFamily {
        self.family
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Shape parameter; `None` for the exponential.
    pub fn shape(&self) -> Option<f64> {
        self.shape
    }

    /// Same family and shape with a different scale.
    pub fn with_scale(&self, scale: f64) -> Result<Self> {
        Self::new(self.family, scale, self.shape)
    }

    pub fn kernel(&self) -> Kernel {
        let shape = self.shape.unwrap_or(1.0);
        match self.family {
            DistributionFamily::Exponential
            | DistributionFamily::Weibull
            | DistributionFamily::Rayleigh => Kernel::Weibull { shape },
            DistributionFamily::Lognormal => Kernel::Lognormal { sigma: shape },
            DistributionFamily::Frechet => Kernel::Frechet { shape },
            DistributionFamily::Gamma | DistributionFamily::Erlang => Kernel::Gamma { shape },
        }
    }

    /// Multiplier taking unit-scale quantiles to time units.
    pub(crate) fn time_unit(&self) -> f64 {
        match self.family {
            DistributionFamily::Lognormal => self.scale.exp(),
            _ => self.scale,
        }
    }

    /// Quantile of the unit-scale member of this family.
    pub(crate) fn unit_quantile(&self, p: f64) -> f64 {
        match self.kernel() {
            Kernel::Weibull { shape } => (-(-p).ln_1p()).powf(1.0 / shape),
            Kernel::Lognormal { sigma } => (sigma * special::normal_quantile_unchecked(p)).exp(),
            Kernel::Frechet { shape } => (-p.ln()).powf(-1.0 / shape),
            Kernel::Gamma { shape } => gamma_unit_quantile(shape, p),
        }
    }

    /// CDF of the unit-scale member of this family.
    pub(crate) fn unit_cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match self.kernel() {
            Kernel::Weibull { shape } => -(-x.powf(shape)).exp_m1(),
            Kernel::Lognormal { sigma } => special::normal_cdf(x.ln() / sigma),
            Kernel::Frechet { shape } => (-x.powf(-shape)).exp(),
            Kernel::Gamma { shape } => gamma_p(shape, x),
        }
    }

    /// Inverse CDF at `p`, which must lie strictly inside (0, 1).
    pub fn quantile(&self, p: f64) -> Result<f64> {
        check_open_probability(p)?;
        Ok(self.time_unit() * self.unit_quantile(p))
    }

    /// Cumulative probability at time `t`; zero for `t <= 0`.
    pub fn cdf(&self, t: f64) -> Result<f64> {
        if t.is_nan() {
            return Err(AccError::InvalidParameter("cdf evaluated at NaN".into()));
        }
        Ok(self.unit_cdf(t / self.time_unit()))
    }

    /// `quantile(a) / quantile(b)`, evaluated without the scale parameter.
    pub fn ratio_of_quantiles(&self, a: f64, b: f64) -> Result<f64> {
        check_open_probability(a)?;
        check_open_probability(b)?;
        Ok(match self.kernel() {
            Kernel::Weibull { shape } => ((-a).ln_1p() / (-b).ln_1p()).powf(1.0 / shape),
            Kernel::Lognormal { sigma } => (sigma
                * (special::normal_quantile_unchecked(a) - special::normal_quantile_unchecked(b)))
            .exp(),
            Kernel::Frechet { shape } => (b.ln() / a.ln()).powf(1.0 / shape),
            Kernel::Gamma { shape } => gamma_unit_quantile(shape, a) / gamma_unit_quantile(shape, b),
        })
    }

    /// Inverse-transform sample for a uniform variate `u` in (0, 1).
    pub fn sample(&self, u: f64) -> Result<f64> {
        self.quantile(u)
    }

    /// Median time to failure, `T_C`.
    pub fn median(&self) -> f64 {
        self.time_unit() * self.unit_quantile(0.5)
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.shape {
            Some(shape) if self.family.takes_shape() => {
                write!(f, "{}(scale={}, shape={})", self.family, self.scale, shape)
            }
            _ => write!(f, "{}(scale={})", self.family, self.scale),
        }
    }
}

fn check_open_probability(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(AccError::ProbabilityDomain(p))
    }
}

/// Standard normal quantile, accurate to 1e-10 absolute.
pub fn inverse_standard_normal(p: f64) -> Result<f64> {
    check_open_probability(p)?;
    Ok(special::normal_quantile_unchecked(p))
}

/// Standard normal CDF.
pub fn standard_normal_cdf(z: f64) -> f64 {
    special::normal_cdf(z)
}

/// Unit-scale gamma quantile by bisection of P(shape, x) on
/// `[0, shape + 40 sqrt(shape) + 40]`.
fn gamma_unit_quantile(shape: f64, p: f64) -> f64 {
    let mut lo = 0.0_f64;
    let mut hi = shape + 40.0 * shape.sqrt() + 40.0;
    while gamma_p(shape, hi) < p {
        lo = hi;
        hi *= 2.0;
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= GAMMA_QUANTILE_REL_TOL * hi || mid <= lo || mid >= hi {
            return mid;
        }
        if gamma_p(shape, mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}
