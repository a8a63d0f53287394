//! Projection bodies and the LYZ body of a planar pair.

use serde::Serialize;

use super::blaschke_symmetral;
use crate::convex2d::{cross, minkowski_problem_2d, zonotope, Polygon, SphereMeasure2, Vec2};
use crate::error::{Error, Result};
use crate::logconcave::LogConcave;
use crate::measures::{extract, extract_pair, SurfaceAreaPair, RADIAL_EMBEDDING};
use crate::solver::SolverConfig;

/// Zonotope with generators `a z / 2` and `b θ / 2`, so that
/// `h(u) = ½ (Σ a |<z, u>| + Σ b |<θ, u>|)`.
pub fn projection_body_of_pair(pair: &SurfaceAreaPair) -> Result<Polygon> {
    let gens: Vec<Vec2> = pair.mu().iter().map(|(z, a)| 0.5 * a * z).chain(pair.nu().iter().map(|(t, b)| 0.5 * b * t)).collect();
    zonotope(&gens)
}

/// Projection body of `f`; radial functions go through their planar
/// embedding.
pub fn projection_body(f: &LogConcave) -> Result<Polygon> {
    projection_body_of_pair(&extract(f).planar(RADIAL_EMBEDDING)?)
}

/// `J(Π°f) = ∫ e^{-h_{Πf}}` computed two ways.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PolarProjectionMass {
    /// Exact integral over the cones of the normal fan of `Πf`.
    pub cone_route: f64,
    /// `2 · area((Πf)°)`.
    pub polar_route: f64,
}

impl PolarProjectionMass {
    pub fn relative_gap(&self) -> f64 {
        (self.cone_route - self.polar_route).abs() / self.polar_route
    }
}

/// On the normal cone of vertex `v`, spanned by unit normals `n₁, n₂`,
/// `h = <v, ·>` and `∫ e^{-<v,x>} dx = |n₁ × n₂| / (h(n₁) h(n₂))`.
pub fn polar_projection_mass(f: &LogConcave) -> Result<PolarProjectionMass> {
    let body = projection_body(f)?;
    let normals = body.edge_normals();
    let n = normals.len();
    let mut cone_route = 0.0;
    for i in 0..n {
        // Vertex i + 1 sits between the normals of edges i and i + 1.
        let n1 = normals[i].0;
        let n2 = normals[(i + 1) % n].0;
        let v = body.vertices()[(i + 1) % n];
        cone_route += cross(&n1, &n2).abs() / (v.dot(&n1) * v.dot(&n2));
    }
    let polar_route = 2.0 * body.polar()?.area();
    Ok(PolarProjectionMass { cone_route, polar_route })
}

/// The two sides of `Π(B_u^♯ f) = τ_u(Π f)`.
#[derive(Clone, Debug, Serialize)]
pub struct Intertwining {
    /// Projection body of the solved symmetral.
    pub lhs: Polygon,
    /// Minkowski symmetral of the projection body of `f`.
    pub rhs: Polygon,
    pub hausdorff: f64,
    pub diameter: f64,
}

/// The left side solves for `B_u^♯ f` and extracts its pair again, so the
/// two sides share nothing beyond `f`.
pub fn symmetral_intertwining_check(f: &LogConcave, u: &Vec2, cfg: &SolverConfig) -> Result<Intertwining> {
    let sym = blaschke_symmetral(u, f, cfg)?;
    let lhs = match &sym {
        LogConcave::Polyhedral(p) => projection_body_of_pair(&extract_pair(p))?,
        LogConcave::Radial(_) => projection_body(&sym)?,
    };
    let rhs = projection_body(f)?.minkowski_symmetral(u);
    let hausdorff = lhs.hausdorff_distance(&rhs);
    Ok(Intertwining { diameter: rhs.diameter(), lhs, rhs, hausdorff })
}

/// Asymmetric LYZ body: the polygon whose surface area measure is
/// `(z/|z|, a|z|)` over μ atoms plus ν, translated to have its centroid at
/// the origin.
pub fn lyz_body(f: &LogConcave) -> Result<Polygon> {
    let pair = extract(f).planar(RADIAL_EMBEDDING)?;
    let atoms = pair
        .mu()
        .iter()
        .filter(|(z, _)| z.norm() > 0.0)
        .map(|(z, a)| (*z, a * z.norm()))
        .chain(pair.nu().iter().copied());
    let measure = SphereMeasure2::new(atoms)?;
    if measure.in_closed_halfplane() {
        return Err(Error::DegenerateSpan);
    }
    let body = minkowski_problem_2d(&measure)?;
    let c = body.centroid();
    Ok(body.translate(&-c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logconcave::{AffinePiece, Domain, PolyhedralLogConcave, RadialLogConcave};
    use approx::assert_abs_diff_eq;

    #[test]
    fn square_projection_body() {
        let f = LogConcave::indicator(Polygon::square(1.0));
        let p = projection_body(&f).unwrap();
        assert!(p.hausdorff_distance(&Polygon::square(2.0)) < 1e-12);
        let m = polar_projection_mass(&f).unwrap();
        assert_abs_diff_eq!(m.cone_route, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.polar_route, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn gaussian_projection_body_is_a_disk() {
        let f: LogConcave = RadialLogConcave::gaussian(2, 0.01, 10.0).unwrap().into();
        let p = projection_body(&f).unwrap();
        let r = (2.0 * std::f64::consts::PI).sqrt();
        for k in 0..16 {
            let u = crate::convex2d::unit(0.37 * k as f64);
            assert!((p.support(&u) / r - 1.0).abs() < 0.01);
        }
    }

    #[test]
    fn lyz_body_of_indicator_is_the_body() {
        let k = Polygon::new(vec![Vec2::new(-1.0, -0.5), Vec2::new(1.5, -0.2), Vec2::new(0.2, 1.0)]).unwrap();
        let body = lyz_body(&LogConcave::indicator(k.clone())).unwrap();
        let centered = k.translate(&-k.centroid());
        assert!(body.hausdorff_distance(&centered) < 1e-9);
    }

    #[test]
    fn projection_body_of_lyz_body() {
        let f: LogConcave = PolyhedralLogConcave::new(
            vec![
                AffinePiece::new(Vec2::new(0.7, 0.1), 0.0),
                AffinePiece::new(Vec2::new(-0.4, 0.5), 0.2),
                AffinePiece::new(Vec2::new(-0.2, -0.6), -0.1),
            ],
            Domain::Unbounded,
        )
        .unwrap()
        .into();
        let lyz = lyz_body(&f).unwrap();
        let classical = crate::convex2d::projection_body_2d(&lyz.surface_area_measure()).unwrap();
        assert!(classical.hausdorff_distance(&projection_body(&f).unwrap()) < 1e-9);
    }
}
