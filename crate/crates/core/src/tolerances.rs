//! Named residual tolerances. Each is stated at 128 nodes per direction and
//! scales as `(128/n)^2`, the order of the boundary stencils. A profile
//! multiplies the whole table.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TolProfile {
    Strict,
    #[default]
    Default,
    Coarse,
}

impl TolProfile {
    pub fn factor(self) -> f64 {
        match self {
            TolProfile::Strict => 0.1,
            TolProfile::Default => 1.0,
            TolProfile::Coarse => 10.0,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(Self::Strict),
            "default" => Ok(Self::Default),
            "coarse" => Ok(Self::Coarse),
            other => Err(Error::Parse(format!(
                "unknown tolerance profile '{other}' (strict, default, coarse)"
            ))),
        }
    }
}

/// Reference resolution of the table.
pub const REFERENCE_NODES: usize = 128;

pub const GAUSS: f64 = 1e-2;
pub const CODAZZI: f64 = 1e-2;
pub const CONFORMAL_GAUSS: f64 = 1e-2;
pub const CONFORMAL_CODAZZI: f64 = 1e-2;
pub const ISOTHERMIC: f64 = 1e-2;
pub const WILLMORE: f64 = 1e-2;
pub const CONSTRAINED_WILLMORE: f64 = 1e-2;
pub const HIMC: f64 = 1e-2;
pub const SPECIAL_ISOTHERMIC: f64 = 1e-2;
/// Allowed `max |Im kappa|` for a chart to count as isothermic.
pub const REAL_KAPPA: f64 = 1e-6;
/// Allowed `max |q_zbar|` for `q` to count as holomorphic.
pub const HOLOMORPHY: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Tolerances {
    pub profile: TolProfile,
}

impl Tolerances {
    pub fn new(profile: TolProfile) -> Self {
        Self { profile }
    }

    /// `base (128/n)^2` times the profile factor.
    pub fn at(&self, base: f64, n: usize) -> f64 {
        let r = REFERENCE_NODES as f64 / n.max(1) as f64;
        base * r * r * self.profile.factor()
    }
}
