//! Coercive log-concave functions in two exactly integrable classes.

pub mod integrate;
mod polyhedral;
mod radial;
mod supconv;

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

pub use integrate::{integrate_exp_affine, triangle_integrals};
pub use polyhedral::{AffinePiece, Cell, CellComplex, Domain, PolyhedralLogConcave};
pub use radial::{RadialLogConcave, Segment, DISK_EDGES};
pub use supconv::{sup_convolution_mass, sup_convolution_slope};

use crate::convex2d::{Polygon, Vec2};
use crate::error::{Error, Result};

/// Either representation, for code that does not care which.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FunctionSpec", into = "FunctionSpec")]
pub enum LogConcave {
    Polyhedral(PolyhedralLogConcave),
    Radial(RadialLogConcave),
}

impl From<PolyhedralLogConcave> for LogConcave {
    fn from(f: PolyhedralLogConcave) -> Self {
        LogConcave::Polyhedral(f)
    }
}

impl From<RadialLogConcave> for LogConcave {
    fn from(f: RadialLogConcave) -> Self {
        LogConcave::Radial(f)
    }
}

impl LogConcave {
    pub fn indicator(k: Polygon) -> Self {
        PolyhedralLogConcave::indicator(k).into()
    }

    pub fn dim(&self) -> usize {
        match self {
            LogConcave::Polyhedral(_) => 2,
            LogConcave::Radial(r) => r.dim(),
        }
    }

    pub fn as_polyhedral(&self) -> Option<&PolyhedralLogConcave> {
        match self {
            LogConcave::Polyhedral(p) => Some(p),
            LogConcave::Radial(_) => None,
        }
    }

    pub fn as_radial(&self) -> Option<&RadialLogConcave> {
        match self {
            LogConcave::Radial(r) => Some(r),
            LogConcave::Polyhedral(_) => None,
        }
    }

    /// Planar evaluation. Radial functions are read as functions of `|x|`.
    pub fn eval(&self, x: &Vec2) -> f64 {
        match self {
            LogConcave::Polyhedral(p) => p.eval(x),
            LogConcave::Radial(r) => r.eval(x),
        }
    }

    pub fn mass(&self) -> f64 {
        match self {
            LogConcave::Polyhedral(p) => p.mass(),
            LogConcave::Radial(r) => r.mass(),
        }
    }

    pub fn entropy(&self) -> f64 {
        match self {
            LogConcave::Polyhedral(p) => p.entropy(),
            LogConcave::Radial(r) => r.entropy(),
        }
    }

    pub fn max_value(&self) -> f64 {
        match self {
            LogConcave::Polyhedral(p) => p.max_value(),
            LogConcave::Radial(r) => r.max_value(),
        }
    }

    /// A point where the maximum is attained.
    pub fn argmax(&self) -> Vec2 {
        match self {
            LogConcave::Polyhedral(p) => p.min_phi().1,
            LogConcave::Radial(_) => Vec2::zeros(),
        }
    }

    /// `h_f(y)`, possibly `+∞`.
    pub fn support_function(&self, y: &Vec2) -> f64 {
        match self {
            LogConcave::Polyhedral(p) => p.support_function(y),
            LogConcave::Radial(r) => r.support_function(y),
        }
    }

    /// `h_{supp f}(θ)`; `None` when the support is unbounded.
    pub fn domain_support(&self, theta: &Vec2) -> Option<f64> {
        match self {
            LogConcave::Polyhedral(p) => p.domain_support(theta),
            LogConcave::Radial(r) => r.support_radius().map(|rad| rad * theta.norm()),
        }
    }

    pub fn superlevel(&self, t: f64) -> Result<Polygon> {
        match self {
            LogConcave::Polyhedral(p) => p.superlevel(t),
            LogConcave::Radial(r) => r.superlevel(t),
        }
    }

    /// `W_1` through the perimeters of superlevel sets.
    pub fn layer_cake_w1(&self) -> f64 {
        match self {
            LogConcave::Polyhedral(p) => p.layer_cake_w1(),
            LogConcave::Radial(r) => r.layer_cake_w1(),
        }
    }

    pub fn scale_values(&self, lambda: f64) -> Self {
        match self {
            LogConcave::Polyhedral(p) => p.scale_values(lambda).into(),
            LogConcave::Radial(r) => r.scale_values(lambda).into(),
        }
    }

    pub fn reflect(&self, u: &Vec2) -> Self {
        match self {
            LogConcave::Polyhedral(p) => p.reflect(u).into(),
            LogConcave::Radial(r) => r.clone().into(),
        }
    }

    /// `f(· - v)`; radial functions leave their class unless `v = 0`.
    pub fn translate(&self, v: &Vec2) -> Result<Self> {
        match self {
            LogConcave::Polyhedral(p) => Ok(p.translate(v).into()),
            LogConcave::Radial(r) if v.norm() == 0.0 => Ok(r.clone().into()),
            LogConcave::Radial(_) => Err(Error::Unsupported("translating a radial function".into())),
        }
    }

    /// `f ∘ T`.
    pub fn compose_linear(&self, t: &Matrix2<f64>) -> Result<Self> {
        match self {
            LogConcave::Polyhedral(p) => Ok(p.compose_linear(t)?.into()),
            LogConcave::Radial(_) => Err(Error::Unsupported("linear images of radial functions".into())),
        }
    }

    /// Half-width of a centered square holding all but a negligible part of
    /// the mass.
    pub fn bounding_half_width(&self) -> f64 {
        match self {
            LogConcave::Polyhedral(p) => p.bounding_half_width(),
            LogConcave::Radial(r) => r.level_radius(r.max_value() * 1e-13).unwrap_or(0.0),
        }
    }

    /// Is `f` a positive multiple of an indicator?
    pub fn is_flat(&self) -> bool {
        match self {
            LogConcave::Polyhedral(p) => p.is_indicator(),
            LogConcave::Radial(r) => r.knots().iter().all(|(_, w)| *w == r.knots()[0].1) && r.tail_slope().is_none(),
        }
    }
}

/// JSON document for a function.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FunctionSpec {
    Indicator {
        polygon: Polygon,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        height: Option<f64>,
    },
    Polyhedral {
        pieces: Vec<[f64; 3]>,
        domain: DomainSpec,
    },
    Radial {
        dim: usize,
        knots: Vec<(f64, f64)>,
        tail_slope: Option<f64>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DomainSpec {
    Unbounded(UnboundedTag),
    Polygon(Polygon),
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnboundedTag {
    Unbounded,
}

impl TryFrom<FunctionSpec> for LogConcave {
    type Error = Error;

    fn try_from(spec: FunctionSpec) -> Result<Self> {
        match spec {
            FunctionSpec::Indicator { polygon, height } => {
                let h = height.unwrap_or(1.0);
                if !(h > 0.0) || !h.is_finite() {
                    return Err(Error::validation("height", "must be positive"));
                }
                Ok(PolyhedralLogConcave::scaled_indicator(polygon, h).into())
            }
            FunctionSpec::Polyhedral { pieces, domain } => {
                let pieces = pieces.iter().map(|p| AffinePiece::new(Vec2::new(p[0], p[1]), p[2])).collect();
                let domain = match domain {
                    DomainSpec::Unbounded(_) => Domain::Unbounded,
                    DomainSpec::Polygon(p) => Domain::Bounded(p),
                };
                Ok(PolyhedralLogConcave::new(pieces, domain)?.into())
            }
            FunctionSpec::Radial { dim, knots, tail_slope } => Ok(RadialLogConcave::new(dim, knots, tail_slope)?.into()),
        }
    }
}

impl From<LogConcave> for FunctionSpec {
    fn from(f: LogConcave) -> Self {
        match f {
            LogConcave::Polyhedral(p) => {
                if p.is_indicator() {
                    let h = p.pieces()[0].offset.exp();
                    let polygon = p.domain_polygon().unwrap().clone();
                    return FunctionSpec::Indicator { polygon, height: (h != 1.0).then_some(h) };
                }
                let pieces = p.pieces().iter().map(|a| [a.gradient.x, a.gradient.y, a.offset]).collect();
                let domain = match p.domain() {
                    Domain::Bounded(poly) => DomainSpec::Polygon(poly.clone()),
                    Domain::Unbounded => DomainSpec::Unbounded(UnboundedTag::Unbounded),
                };
                FunctionSpec::Polyhedral { pieces, domain }
            }
            LogConcave::Radial(r) => FunctionSpec::Radial {
                dim: r.dim(),
                knots: r.knots().to_vec(),
                tail_slope: r.tail_slope(),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_documents() {
        let f: LogConcave = serde_json::from_str(r#"{"kind":"indicator","polygon":[[-1,-1],[1,-1],[1,1],[-1,1]]}"#).unwrap();
        assert!((f.mass() - 4.0).abs() < 1e-14);
        let g: LogConcave = serde_json::from_str(
            r#"{"kind":"polyhedral","pieces":[[1,0,0],[-1,0,0],[0,1,0],[0,-1,0]],"domain":"unbounded"}"#,
        )
        .unwrap();
        assert!((g.mass() - 8.0).abs() < 1e-10);
        let h: LogConcave =
            serde_json::from_str(r#"{"kind":"radial","dim":2,"knots":[[0,0]],"tail_slope":1.0}"#).unwrap();
        assert!((h.mass() - 2.0 * std::f64::consts::PI).abs() < 1e-12);
        for x in [f, g, h] {
            let s = serde_json::to_string(&x).unwrap();
            assert_eq!(serde_json::from_str::<LogConcave>(&s).unwrap(), x);
        }
    }

    #[test]
    fn decreasing_slopes_are_a_convexity_error() {
        let err = serde_json::from_str::<LogConcave>(
            r#"{"kind":"radial","dim":2,"knots":[[0,0],[1,2],[2,2.5]],"tail_slope":null}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("convexity"));
    }
}
