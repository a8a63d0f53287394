//! A fixed, finite family of test functions with linear growth, used as a
//! stand-in metric for convergence of measure pairs.

use serde::Serialize;

use super::{RadialPair, SurfaceAreaPair};
use crate::convex2d::{Polygon, Vec2};
use crate::error::Result;

/// Directions used when a radial pair is compared with a planar one.
pub const RADIAL_EMBEDDING: usize = 256;

/// Test function `ξ` together with its horizon `ξ̄` on the circle.
#[derive(Clone, Debug, Serialize)]
pub enum TestFunction {
    /// `|x|`, horizon 1.
    Norm,
    /// `sqrt(<x, e_i>^2 + 1)`, horizon `|θ_i|`.
    SmoothAbs(usize),
    /// Support function of a polygon; its own horizon.
    Support(Polygon),
    /// `e^{-|x|^2}`, horizon 0.
    Bump,
}

impl TestFunction {
    pub fn value(&self, x: &Vec2) -> f64 {
        match self {
            TestFunction::Norm => x.norm(),
            TestFunction::SmoothAbs(i) => (x[*i] * x[*i] + 1.0).sqrt(),
            TestFunction::Support(p) => p.support(x),
            TestFunction::Bump => (-x.norm_squared()).exp(),
        }
    }

    pub fn horizon(&self, theta: &Vec2) -> f64 {
        match self {
            TestFunction::Norm => 1.0,
            TestFunction::SmoothAbs(i) => theta[*i].abs(),
            TestFunction::Support(p) => p.support(theta),
            TestFunction::Bump => 0.0,
        }
    }

    pub fn name(&self) -> String {
        match self {
            TestFunction::Norm => "norm".into(),
            TestFunction::SmoothAbs(i) => format!("smooth_abs_{i}"),
            TestFunction::Support(p) => format!("support_{}gon", p.len()),
            TestFunction::Bump => "bump".into(),
        }
    }

    /// `∫ ξ dμ + ∫ ξ̄ dν`.
    pub fn pair_integral(&self, p: &SurfaceAreaPair) -> f64 {
        p.mu().iter().map(|(z, a)| a * self.value(z)).sum::<f64>()
            + p.nu().iter().map(|(t, b)| b * self.horizon(t)).sum::<f64>()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CosmicFamily {
    pub version: u32,
    pub functions: Vec<TestFunction>,
}

impl CosmicFamily {
    /// Version 1: norm, two smoothed coordinate moduli, support functions of
    /// a triangle, a rotated pentagon and an off-center rectangle, and a
    /// Gaussian bump.
    pub fn v1() -> Self {
        let triangle = Polygon::new(vec![Vec2::new(1.0, 0.0), Vec2::new(-0.5, 0.8), Vec2::new(-0.5, -0.8)]).unwrap();
        let rot = nalgebra::Rotation2::new(0.3).into_inner();
        let pentagon = Polygon::regular(5, 1.0).linear_image(&rot).unwrap();
        let rectangle = Polygon::rectangle(Vec2::new(-0.5, -0.7), Vec2::new(1.5, 0.3)).unwrap();
        CosmicFamily {
            version: 1,
            functions: vec![
                TestFunction::Norm,
                TestFunction::SmoothAbs(0),
                TestFunction::SmoothAbs(1),
                TestFunction::Support(triangle),
                TestFunction::Support(pentagon),
                TestFunction::Support(rectangle),
                TestFunction::Bump,
            ],
        }
    }

    pub fn integrals(&self, p: &SurfaceAreaPair) -> Vec<f64> {
        self.functions.iter().map(|xi| xi.pair_integral(p)).collect()
    }
}

impl Default for CosmicFamily {
    fn default() -> Self {
        Self::v1()
    }
}

/// `max_ξ |∫ξ dμ_p + ∫ξ̄ dν_p - (same for q)|`.
pub fn cosmic_distance(p: &SurfaceAreaPair, q: &SurfaceAreaPair, family: &CosmicFamily) -> f64 {
    family.integrals(p).iter().zip(family.integrals(q)).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

/// Distance to a radial pair embedded at [`RADIAL_EMBEDDING`] directions.
pub fn cosmic_distance_to_radial(p: &SurfaceAreaPair, r: &RadialPair, family: &CosmicFamily) -> Result<f64> {
    Ok(cosmic_distance(p, &r.embed(RADIAL_EMBEDDING)?, family))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logconcave::PolyhedralLogConcave;
    use crate::measures::{extract_pair, haar_average};

    #[test]
    fn translation_invariant_and_positive() {
        let fam = CosmicFamily::v1();
        let k = Polygon::square(1.0);
        let p = extract_pair(&PolyhedralLogConcave::indicator(k.clone()));
        let q = extract_pair(&PolyhedralLogConcave::indicator(k.translate(&Vec2::new(0.4, -1.0))));
        assert!(cosmic_distance(&p, &p, &fam) == 0.0);
        assert!(cosmic_distance(&p, &q, &fam) < 1e-12);
        let r = haar_average(&p).unwrap();
        assert!(cosmic_distance_to_radial(&p, &r, &fam).unwrap() > 1e-3);
    }
}
