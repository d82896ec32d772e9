//! Drawing scales for both chart axes.
//!
//! Only power-root mappings `g(x) = x^(1/k)` can be built. They satisfy
//! `g(x / y) = g(x) / g(y)`, which keeps limit angles free of the
//! distributions' scale parameters.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::distributions::DistributionSpec;
use crate::error::{AccError, Result};

/// Relative tolerance used by [`check_distributive`].
pub const DISTRIBUTIVE_REL_TOL: f64 = 1e-12;

/// Monotone map applied to chart axes.
pub trait AxisMap {
    fn map(&self, x: f64) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct DrawingScale {
    root: u32,
}

impl DrawingScale {
    pub const LINEAR: DrawingScale = DrawingScale { root: 1 };
    pub const SQRT: DrawingScale = DrawingScale { root: 2 };
    pub const CBRT: DrawingScale = DrawingScale { root: 3 };
    pub const QUARTIC: DrawingScale = DrawingScale { root: 4 };

    /// The four named scales, linear first.
    pub const NAMED: [DrawingScale; 4] = [Self::LINEAR, Self::SQRT, Self::CBRT, Self::QUARTIC];

    pub fn power_root(root: u32) -> Result<Self> {
        if root == 0 {
            return Err(AccError::InvalidParameter("power-root degree must be at least 1".into()));
        }
        Ok(Self { root })
    }

    pub fn root(&self) -> u32 {
        self.root
    }

    /// `x^(1/k)`. Zero maps to zero; negative inputs are rejected.
    pub fn apply(&self, x: f64) -> Result<f64> {
        if x < 0.0 || x.is_nan() {
            return Err(AccError::NegativeInput(x));
        }
        Ok(self.map_unchecked(x))
    }

    /// Inverse mapping, `y^k`.
    pub fn invert(&self, y: f64) -> f64 {
        y.powi(self.root as i32)
    }

    pub(crate) fn map_unchecked(&self, x: f64) -> f64 {
        match self.root {
            1 => x,
            2 => x.sqrt(),
            3 => x.cbrt(),
            4 => x.sqrt().sqrt(),
            k => x.powf(1.0 / f64::from(k)),
        }
    }

    pub fn name(&self) -> String {
        match self.root {
            1 => "linear".into(),
            2 => "sqrt".into(),
            3 => "cbrt".into(),
            4 => "qrt".into(),
            k => format!("root{k}"),
        }
    }
}

impl Default for DrawingScale {
    fn default() -> Self {
        Self::CBRT
    }
}

impl AxisMap for DrawingScale {
    fn map(&self, x: f64) -> f64 {
        self.map_unchecked(x)
    }
}

impl fmt::Display for DrawingScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for DrawingScale {
    type Err = AccError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "linear" => Ok(Self::LINEAR),
            "sqrt" => Ok(Self::SQRT),
            "cbrt" => Ok(Self::CBRT),
            "qrt" => Ok(Self::QUARTIC),
            other => Err(AccError::InvalidParameter(format!(
                "unknown drawing scale '{other}' (expected linear, sqrt, cbrt or qrt)"
            ))),
        }
    }
}

/// True iff `g(q(a)) / g(q(b)) == g(rho(a, b))` within [`DISTRIBUTIVE_REL_TOL`]
/// for every probability pair.
pub fn check_distributive<M: AxisMap>(map: &M, spec: &DistributionSpec, pairs: &[(f64, f64)]) -> bool {
    pairs.iter().all(|&(a, b)| {
        let (Ok(qa), Ok(qb), Ok(rho)) = (spec.quantile(a), spec.quantile(b), spec.ratio_of_quantiles(a, b))
        else {
            return false;
        };
        let lhs = map.map(qa) / map.map(qb);
        let rhs = map.map(rho);
        lhs.is_finite() && (lhs - rhs).abs() <= DISTRIBUTIVE_REL_TOL * rhs.abs()
    })
}
