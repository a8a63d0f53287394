use super::{minkowski_problem_2d, rot90, Polygon, SphereMeasure2, Vec2};
use crate::error::Result;

/// Blaschke sum: the body whose surface area measure is `S_K + S_L`,
/// returned with its Steiner point at the origin.
pub fn blaschke_sum_2d(k: &Polygon, l: &Polygon) -> Result<Polygon> {
    minkowski_problem_2d(&k.surface_area_measure().add(&l.surface_area_measure()))
}

/// Blaschke scaling `λ·K = λ^{1/(n-1)} K`, which is plain dilation in the
/// plane.
pub fn blaschke_scale_2d(k: &Polygon, lambda: f64) -> Polygon {
    k.scale(lambda)
}

/// Zonotope `Σ [-g, g]` over the given generators, centered at the origin.
/// Zero generators are ignored.
pub fn zonotope(generators: &[Vec2]) -> Result<Polygon> {
    let atoms = generators.iter().filter(|g| g.norm() > 0.0).flat_map(|g| {
        let n = rot90(g);
        let len = 2.0 * g.norm();
        [(n, len), (-n, len)]
    });
    minkowski_problem_2d(&SphereMeasure2::new(atoms)?)
}

/// Projection body through Cauchy's formula: the zonotope with generators
/// `mass · direction / 2`, so that `h(u) = ½ Σ mass |<u, direction>|`.
pub fn projection_body_2d(s: &SphereMeasure2) -> Result<Polygon> {
    let gens: Vec<Vec2> = s.atoms().iter().map(|(u, m)| 0.5 * m * u).collect();
    zonotope(&gens)
}

/// Kneser–Süss margin `vol(λ·K # (1-λ)·L)^{1/2} - λ vol(K)^{1/2} - (1-λ) vol(L)^{1/2}`.
pub fn classical_ks_margin(k: &Polygon, l: &Polygon, lambda: f64) -> Result<f64> {
    assert!((0.0..=1.0).contains(&lambda), "lambda must lie in [0, 1]");
    let rhs = lambda * k.area().sqrt() + (1.0 - lambda) * l.area().sqrt();
    let measure = k.surface_area_measure().scale(lambda).add(&l.surface_area_measure().scale(1.0 - lambda));
    let body = minkowski_problem_2d(&measure)?;
    Ok(body.area().sqrt() - rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn square_sums() {
        let s = Polygon::square(1.0);
        let sum = blaschke_sum_2d(&s, &s).unwrap();
        assert_abs_diff_eq!(sum.area(), 16.0, epsilon = 1e-12);
        assert!(sum.hausdorff_distance(&Polygon::square(2.0)) < 1e-12);
    }

    #[test]
    fn square_and_rotated_square_give_regular_octagon() {
        let s = Polygon::square(1.0);
        let rot = nalgebra::Rotation2::new(PI / 4.0).into_inner();
        let r = s.linear_image(&rot).unwrap();
        let oct = blaschke_sum_2d(&s, &r).unwrap();
        assert_eq!(oct.len(), 8);
        for (a, b) in oct.edges() {
            assert_abs_diff_eq!((b - a).norm(), 2.0, epsilon = 1e-12);
        }
        let radii: Vec<f64> = oct.vertices().iter().map(|v| v.norm()).collect();
        for r in &radii {
            assert_abs_diff_eq!(*r, radii[0], epsilon = 1e-12);
        }
    }

    #[test]
    fn disk_polygon_doubles() {
        let d = Polygon::regular(64, 1.0);
        let sum = blaschke_sum_2d(&d, &d).unwrap();
        assert!(sum.hausdorff_distance(&Polygon::regular(64, 2.0)) < 1e-3);
    }

    #[test]
    fn projection_body_of_square() {
        let z = projection_body_2d(&Polygon::square(1.0).surface_area_measure()).unwrap();
        assert!(z.hausdorff_distance(&Polygon::square(2.0)) < 1e-12);
    }

    #[test]
    fn projection_body_of_disk_polygon() {
        let z = projection_body_2d(&Polygon::regular(256, 1.3).surface_area_measure()).unwrap();
        for v in z.vertices() {
            assert!((v.norm() - 2.6).abs() < 1e-3);
        }
    }

    #[test]
    fn ks_margin_cases() {
        let k = Polygon::square(1.0);
        assert_abs_diff_eq!(classical_ks_margin(&k, &k, 0.3).unwrap(), 0.0, epsilon = 1e-12);
        let rot = nalgebra::Rotation2::new(PI / 4.0).into_inner();
        let l = k.linear_image(&rot).unwrap();
        assert!(classical_ks_margin(&k, &l, 0.5).unwrap() > 1e-3);
        assert_abs_diff_eq!(classical_ks_margin(&k, &l, 0.0).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(classical_ks_margin(&k, &l, 1.0).unwrap(), 0.0, epsilon = 1e-12);
    }
}
