use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::convex2d::{unit, Vec2};
use crate::error::{Error, Result};

/// Sequence of symmetrization directions `u_k = (cos θ_k, sin θ_k)`,
/// `k = 1, 2, ...`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymmetrizationSchedule {
    /// `θ_k = k π (√5 - 1)/2 mod π`.
    Golden,
    /// Angles in radians, repeated cyclically.
    List(Vec<f64>),
}

impl SymmetrizationSchedule {
    pub fn list(angles: Vec<f64>) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::validation("schedule", "angle list is empty"));
        }
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(Error::validation("schedule", "angles must be finite"));
        }
        Ok(SymmetrizationSchedule::List(angles))
    }

    /// Angle of step `k >= 1`.
    pub fn angle(&self, k: usize) -> f64 {
        match self {
            SymmetrizationSchedule::Golden => {
                let ratio = 0.5 * (5f64.sqrt() - 1.0);
                // Reduce k·ratio mod 1 before scaling so large k keep precision.
                (k as f64 * ratio).fract() * PI
            }
            SymmetrizationSchedule::List(a) => a[(k - 1) % a.len()],
        }
    }

    pub fn direction(&self, k: usize) -> Vec2 {
        unit(self.angle(k))
    }
}

impl Default for SymmetrizationSchedule {
    fn default() -> Self {
        SymmetrizationSchedule::Golden
    }
}

/// `golden` or `list:a,b,c` with angles in radians.
impl FromStr for SymmetrizationSchedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "golden" {
            return Ok(SymmetrizationSchedule::Golden);
        }
        let Some(rest) = s.strip_prefix("list:") else {
            return Err(Error::validation("schedule", format!("expected golden or list:..., got {s:?}")));
        };
        let angles = rest
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|e| Error::validation("schedule", format!("{t:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::list(angles)
    }
}

impl fmt::Display for SymmetrizationSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymmetrizationSchedule::Golden => write!(f, "golden"),
            SymmetrizationSchedule::List(a) => {
                let parts: Vec<String> = a.iter().map(|x| x.to_string()).collect();
                write!(f, "list:{}", parts.join(","))
            }
        }
    }
}
