//! Affine surface areas of log-concave functions and the inequality suite.
//!
//! Test bodies are star bodies sampled on an angle grid. `h_{Q°}` is taken
//! to be `|x| / ρ_Q(x/|x|)` throughout, which agrees with the polar body's
//! support function for convex `Q` and is the natural extension otherwise.

mod optimizer;
mod suite;

pub use optimizer::{affine_surface_area, affine_surface_area_of_pair, geominimal_surface_area, geominimal_surface_area_of_pair, OmegaEstimate, OptimizerConfig};
pub use suite::{run_inequality_suite, InequalityReport, SuiteConfig, SUITE_NAMES};

use std::f64::consts::PI;

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::blaschke::mean_blaschke_symmetral;
use crate::convex2d::{angle_of, unit, Vec2};
use crate::error::{Error, Result};
use crate::logconcave::LogConcave;
use crate::measures::{extract, SurfaceAreaPair, RADIAL_EMBEDDING};
use crate::solver::SolverConfig;

/// Default number of directions of a [`StarBody`].
pub const STAR_GRID: usize = 180;

/// Star body given by its radial function at `N` equally spaced angles
/// `2πk/N`, interpolated linearly in the angle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StarBody {
    radii: Vec<f64>,
}

impl StarBody {
    pub fn new(radii: Vec<f64>) -> Result<Self> {
        if radii.len() < 3 {
            return Err(Error::validation("radii", "need at least three directions"));
        }
        if radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
            return Err(Error::validation("radii", "radii must be positive"));
        }
        Ok(StarBody { radii })
    }

    pub fn round(n: usize) -> Self {
        StarBody { radii: vec![1.0; n] }
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn step(&self) -> f64 {
        2.0 * PI / self.radii.len() as f64
    }

    pub fn direction(&self, k: usize) -> Vec2 {
        unit(self.step() * k as f64)
    }

    /// Grid cell `k` and weight `w` of `angle`: `ρ = (1-w) ρ_k + w ρ_{k+1}`.
    pub(crate) fn locate(&self, angle: f64) -> (usize, f64) {
        let n = self.radii.len();
        let t = angle.rem_euclid(2.0 * PI) / self.step();
        let k = (t.floor() as usize).min(n - 1);
        (k, (t - k as f64).clamp(0.0, 1.0))
    }

    pub fn radius_at(&self, angle: f64) -> f64 {
        let (k, w) = self.locate(angle);
        (1.0 - w) * self.radii[k] + w * self.radii[(k + 1) % self.radii.len()]
    }

    /// `h_{Q°}(x) = |x| / ρ_Q(x/|x|)`.
    pub fn polar_support(&self, x: &Vec2) -> f64 {
        let r = x.norm();
        if r == 0.0 {
            return 0.0;
        }
        r / self.radius_at(angle_of(x))
    }

    /// `½ Σ ρ_k² Δσ`.
    pub fn volume(&self) -> f64 {
        0.5 * self.step() * self.radii.iter().map(|r| r * r).sum::<f64>()
    }

    /// `(1/3) Σ ρ_k³ u_k Δσ / vol`.
    pub fn centroid(&self) -> Vec2 {
        let m: Vec2 = self.radii.iter().enumerate().map(|(k, r)| r.powi(3) * self.direction(k)).sum();
        m * (self.step() / 3.0) / self.volume()
    }

    pub fn mean_radius(&self) -> f64 {
        self.radii.iter().sum::<f64>() / self.radii.len() as f64
    }

    /// `|centroid| / mean ρ`.
    pub fn centroid_defect(&self) -> f64 {
        self.centroid().norm() / self.mean_radius()
    }

    /// Rescaled so that `∫ ρ² dσ = 2π`.
    pub fn normalized(&self) -> StarBody {
        let s = (PI / self.volume()).sqrt();
        StarBody { radii: self.radii.iter().map(|r| r * s).collect() }
    }

    pub fn scale(&self, s: f64) -> StarBody {
        assert!(s > 0.0);
        StarBody { radii: self.radii.iter().map(|r| r * s).collect() }
    }

    /// `A Q` resampled on the same grid: `ρ_{AQ}(u) = ρ_Q(v/|v|) / |v|` with
    /// `v = A^{-1} u`. The discrete centroid is not preserved exactly.
    pub fn linear_image(&self, a: &Matrix2<f64>) -> Result<StarBody> {
        let inv = a.try_inverse().ok_or(Error::SingularTransform)?;
        let radii = (0..self.len())
            .map(|k| {
                let v = inv * self.direction(k);
                self.radius_at(angle_of(&v)) / v.norm()
            })
            .collect();
        StarBody::new(radii)
    }

    /// Discrete convexity of the body: the gauge samples `g_k = 1/ρ_k` must
    /// satisfy `g_{k-1} + g_{k+1} >= 2 cos(Δσ) g_k`.
    pub fn is_convex(&self, rel_tol: f64) -> bool {
        let n = self.radii.len();
        let c = 2.0 * self.step().cos();
        (0..n).all(|k| {
            let g = |i: usize| 1.0 / self.radii[i % n];
            g(k + n - 1) + g(k + 1) >= c * g(k) * (1.0 - rel_tol)
        })
    }
}

/// Precomputed atom positions against a star body grid.
#[derive(Clone, Debug)]
pub(crate) struct AtomTable {
    /// `(cell, weight, mass · |x|)`.
    pub(crate) atoms: Vec<(usize, f64, f64)>,
}

impl AtomTable {
    pub(crate) fn new(pair: &SurfaceAreaPair, grid: &StarBody) -> Self {
        let atoms = pair
            .mu()
            .iter()
            .chain(pair.nu())
            .filter(|(x, m)| x.norm() > 0.0 && *m > 0.0)
            .map(|(x, m)| {
                let (k, w) = grid.locate(angle_of(x));
                (k, w, m * x.norm())
            })
            .collect();
        AtomTable { atoms }
    }

    /// `δ(f, 1_{Q°}) = Σ m |x| / ρ(x/|x|)`.
    pub(crate) fn first_variation(&self, radii: &[f64]) -> f64 {
        let n = radii.len();
        self.atoms.iter().map(|(k, w, c)| c / ((1.0 - w) * radii[*k] + w * radii[(k + 1) % n])).sum()
    }
}

/// `Ω_Q = δ(f, 1_{Q°}) vol(Q)^{1/2}` for a planar pair.
pub fn omega_q_of_pair(pair: &SurfaceAreaPair, q: &StarBody) -> f64 {
    AtomTable::new(pair, q).first_variation(q.radii()) * q.volume().sqrt()
}

/// `Ω_Q(f)`; radial functions are embedded at [`RADIAL_EMBEDDING`]
/// directions.
pub fn omega_q(f: &LogConcave, q: &StarBody) -> Result<f64> {
    Ok(omega_q_of_pair(&extract(f).planar(RADIAL_EMBEDDING)?, q))
}

/// `(2π)^{1/3} W_1(f)^{2/3}`, the value of `Ω_♯` at the mean symmetral.
pub fn affine_isoperimetric_bound(f: &LogConcave) -> f64 {
    isoperimetric_bound_from_w1(extract(f).w1())
}

pub fn isoperimetric_bound_from_w1(w1: f64) -> f64 {
    (2.0 * PI).cbrt() * w1.powf(2.0 / 3.0)
}

/// `δ(f, f)` against `J(f)(n + log J(f)) + Ent(f)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EntropyIdentity {
    pub delta: f64,
    pub rhs: f64,
    pub relative_error: f64,
}

pub fn entropy_identity_check(f: &LogConcave) -> Result<EntropyIdentity> {
    let delta = extract(f).first_variation(f)?;
    let j = f.mass();
    let rhs = j * (f.dim() as f64 + j.ln()) + f.entropy();
    let scale = delta.abs().max(rhs.abs()).max(j);
    Ok(EntropyIdentity { delta, rhs, relative_error: (delta - rhs).abs() / scale })
}

/// Functionals covered by the comparison principle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComparedFunctional {
    Entropy,
    AffineSurfaceArea,
}

/// `F(f) <= F(f^♯)` for the mean Blaschke symmetral `f^♯`.
#[derive(Clone, Debug, Serialize)]
pub struct Comparison {
    pub functional: ComparedFunctional,
    pub value: f64,
    pub symmetral_value: f64,
    /// `F(f^♯) - F(f)`.
    pub margin: f64,
}

pub fn comparison_principle_check(
    functional: ComparedFunctional,
    f: &LogConcave,
    solver: &SolverConfig,
    optimizer: &OptimizerConfig,
) -> Result<Comparison> {
    let sym: LogConcave = mean_blaschke_symmetral(f, solver)?.into();
    let (value, symmetral_value) = match functional {
        ComparedFunctional::Entropy => (f.entropy(), sym.entropy()),
        ComparedFunctional::AffineSurfaceArea => {
            (affine_surface_area(f, optimizer)?.value, affine_surface_area(&sym, optimizer)?.value)
        }
    };
    Ok(Comparison { functional, value, symmetral_value, margin: symmetral_value - value })
}

/// `δ(f∘T, g) |det T|` against `δ(f, g∘T^{-1})`.
pub fn first_variation_covariance(f: &LogConcave, g: &LogConcave, t: &Matrix2<f64>) -> Result<(f64, f64)> {
    let det = t.determinant();
    let inv = t.try_inverse().ok_or(Error::SingularTransform)?;
    let lhs = extract(&f.compose_linear(t)?).first_variation(g)? * det.abs();
    let rhs = extract(f).first_variation(&g.compose_linear(&inv)?)?;
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex2d::Polygon;
    use crate::logconcave::{AffinePiece, Domain, PolyhedralLogConcave, RadialLogConcave};
    use approx::assert_relative_eq;

    #[test]
    fn omega_of_disk_against_disk() {
        let f: LogConcave = RadialLogConcave::ball_indicator(2, 1.0, 1.0).unwrap().into();
        let q = StarBody::round(STAR_GRID);
        assert_relative_eq!(omega_q(&f, &q).unwrap(), 2.0 * PI * PI.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn omega_is_zero_homogeneous_in_q() {
        let f = LogConcave::indicator(Polygon::regular(7, 1.3));
        let radii: Vec<f64> = (0..STAR_GRID).map(|k| 1.0 + 0.3 * (3.0 * k as f64 * 0.0349).sin()).collect();
        let q = StarBody::new(radii).unwrap();
        let a = omega_q(&f, &q).unwrap();
        let b = omega_q(&f, &q.scale(7.5)).unwrap();
        assert!((a - b).abs() < 1e-10 * a);
    }

    #[test]
    fn round_body_is_centered_and_convex() {
        let q = StarBody::round(STAR_GRID);
        assert!(q.centroid_defect() < 1e-12);
        assert!(q.is_convex(1e-12));
        assert_relative_eq!(q.volume(), PI, max_relative = 1e-12);
        let spike = StarBody::new((0..STAR_GRID).map(|k| if k == 0 { 5.0 } else { 1.0 }).collect()).unwrap();
        assert!(!spike.is_convex(1e-12));
        assert!(spike.centroid_defect() > 1e-3);
    }

    #[test]
    fn linear_image_of_round_body_is_an_ellipse() {
        let a = Matrix2::new(2.0, 0.0, 0.0, 0.5);
        let e = StarBody::round(STAR_GRID).linear_image(&a).unwrap();
        assert_relative_eq!(e.radius_at(0.0), 2.0, max_relative = 1e-12);
        assert_relative_eq!(e.radius_at(0.5 * PI), 0.5, max_relative = 1e-12);
    }

    #[test]
    fn omega_q_is_additive_and_homogeneous() {
        let f = LogConcave::indicator(Polygon::regular(5, 1.0));
        let g = LogConcave::indicator(Polygon::square(0.6));
        let radii: Vec<f64> = (0..STAR_GRID).map(|k| 1.0 + 0.2 * (2.0 * k as f64 * 0.0349).cos()).collect();
        let q = StarBody::new(radii).unwrap();
        let (pf, pg) = (extract(&f).planar(8).unwrap(), extract(&g).planar(8).unwrap());
        let sum = omega_q_of_pair(&pf.add(&pg), &q);
        assert_relative_eq!(sum, omega_q_of_pair(&pf, &q) + omega_q_of_pair(&pg, &q), max_relative = 1e-12);
        assert_relative_eq!(omega_q_of_pair(&pf.scale(2.5), &q), 2.5 * omega_q_of_pair(&pf, &q), max_relative = 1e-12);
    }

    #[test]
    fn square_bound() {
        let f = LogConcave::indicator(Polygon::square(1.0));
        assert_relative_eq!(affine_isoperimetric_bound(&f), (2.0 * PI).cbrt() * 4.0, max_relative = 1e-12);
    }

    #[test]
    fn entropy_identity_for_indicator_and_linf() {
        let f = LogConcave::indicator(Polygon::regular(6, 1.1));
        assert!(entropy_identity_check(&f).unwrap().relative_error < 1e-12);
        let pieces = [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)].iter().map(|&(x, y)| AffinePiece::new(Vec2::new(x, y), 0.0)).collect();
        let g: LogConcave = PolyhedralLogConcave::new(pieces, Domain::Unbounded).unwrap().into();
        assert!(entropy_identity_check(&g).unwrap().relative_error < 1e-10);
    }

    #[test]
    fn first_variation_is_affinely_covariant() {
        let f = LogConcave::indicator(Polygon::regular(5, 1.0));
        let g = LogConcave::indicator(Polygon::square(0.7));
        let t = Matrix2::new(1.3, 0.4, -0.2, 0.9);
        let (lhs, rhs) = first_variation_covariance(&f, &g, &t).unwrap();
        assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
    }
}
