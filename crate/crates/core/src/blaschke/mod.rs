//! Blaschke addition, homothety and symmetrization of log-concave functions.
//!
//! Every operation is carried out on surface area measure pairs, where it is
//! plain atom arithmetic, and the result is handed to the solver. Outputs of
//! the planar solver are in the Steiner gauge, so translation classes get a
//! fixed representative.

mod iterate;
mod projection;
mod schedule;

pub use iterate::{iterate_symmetrization, quantize_directions, IterateConfig, SymmetrizationRecord, SymmetrizationTrace};
pub use projection::{
    lyz_body, polar_projection_mass, projection_body, projection_body_of_pair, symmetral_intertwining_check,
    Intertwining, PolarProjectionMass,
};
pub use schedule::SymmetrizationSchedule;

use crate::convex2d::{blaschke_sum_2d, Polygon, Vec2};
use crate::error::{Error, Result};
use crate::logconcave::{LogConcave, RadialLogConcave};
use crate::measures::{extract, AnyPair};
use crate::solver::{solve, solve_radial, SolverConfig};

/// Pair of `f₁ ♯ f₂`.
pub fn sum_pair(f1: &LogConcave, f2: &LogConcave) -> Result<AnyPair> {
    extract(f1).add(&extract(f2))
}

/// Pair of `B_u^♯ f = ½⊙f ♯ ½⊙R_u f`.
pub fn symmetral_pair(u: &Vec2, pair: &AnyPair) -> Result<AnyPair> {
    pair.scale(0.5).add(&pair.reflect(u).scale(0.5))
}

pub fn blaschke_sum(f1: &LogConcave, f2: &LogConcave, cfg: &SolverConfig) -> Result<LogConcave> {
    Ok(solve(&sum_pair(f1, f2)?, cfg)?.0)
}

pub fn blaschke_homothety(lambda: f64, f: &LogConcave, cfg: &SolverConfig) -> Result<LogConcave> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::validation("lambda", "must be a positive number"));
    }
    Ok(solve(&extract(f).scale(lambda), cfg)?.0)
}

/// `B_u^♯ f`; `u` need not be normalized.
pub fn blaschke_symmetral(u: &Vec2, f: &LogConcave, cfg: &SolverConfig) -> Result<LogConcave> {
    if !(u.norm() > 0.0) {
        return Err(Error::validation("u", "direction must be nonzero"));
    }
    Ok(solve(&symmetral_pair(u, &extract(f))?, cfg)?.0)
}

/// Radial function whose pair is the rotation average of the pair of `f`.
pub fn mean_blaschke_symmetral(f: &LogConcave, cfg: &SolverConfig) -> Result<RadialLogConcave> {
    Ok(solve_radial(&extract(f).haar_average()?, cfg)?.0)
}

/// `1_K ♯ 1_L = λ^{-1} 1_{λ(K#L)}` in the plane, with
/// `λ = (vol K + vol L) / vol(K#L)`. Returns the height `λ^{-1}` and the
/// body `λ(K#L)`, Steiner point at the origin.
pub fn indicator_sum_closed_form(k: &Polygon, l: &Polygon) -> Result<(f64, Polygon)> {
    let sum = blaschke_sum_2d(k, l)?;
    let lambda = (k.area() + l.area()) / sum.area();
    Ok((1.0 / lambda, sum.scale(lambda)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logconcave::PolyhedralLogConcave;
    use crate::solver::equal_up_to_translation;
    use approx::assert_abs_diff_eq;

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    #[test]
    fn square_closed_form() {
        let sq = Polygon::square(1.0);
        let (c, m) = indicator_sum_closed_form(&sq, &sq).unwrap();
        assert_abs_diff_eq!(c, 2.0, epsilon = 1e-12);
        assert!(m.hausdorff_distance(&sq) < 1e-12);
    }

    #[test]
    fn indicator_sum_matches_closed_form() {
        let k = Polygon::new(vec![Vec2::new(-1.0, -0.5), Vec2::new(1.5, -0.2), Vec2::new(0.2, 1.0)]).unwrap();
        let l = Polygon::square(0.6);
        let f = blaschke_sum(&LogConcave::indicator(k.clone()), &LogConcave::indicator(l.clone()), &cfg()).unwrap();
        let (c, m) = indicator_sum_closed_form(&k, &l).unwrap();
        let g = LogConcave::Polyhedral(PolyhedralLogConcave::scaled_indicator(m, c));
        assert_abs_diff_eq!(f.max_value(), c, epsilon = 1e-8);
        assert!(equal_up_to_translation(&f, &g, 1e-6, 60).unwrap().equal);
    }

    #[test]
    fn homothety_scales_mass() {
        let f = LogConcave::indicator(Polygon::regular(5, 1.0));
        let g = blaschke_homothety(2.5, &f, &cfg()).unwrap();
        assert_abs_diff_eq!(g.mass(), 2.5 * f.mass(), epsilon = 1e-8);
        assert!(blaschke_homothety(0.0, &f, &cfg()).is_err());
    }

    #[test]
    fn symmetral_of_symmetric_function_is_itself() {
        let f = LogConcave::indicator(Polygon::rectangle(Vec2::new(-1.0, -0.4), Vec2::new(1.0, 0.4)).unwrap());
        let g = blaschke_symmetral(&Vec2::new(0.0, 1.0), &f, &cfg()).unwrap();
        assert!(equal_up_to_translation(&f, &g, 1e-7, 60).unwrap().equal);
    }

    #[test]
    fn mean_symmetral_of_square() {
        let f = LogConcave::indicator(Polygon::square(1.0));
        let r = mean_blaschke_symmetral(&f, &cfg()).unwrap();
        assert_abs_diff_eq!(r.max_value(), 4.0 / std::f64::consts::PI, epsilon = 1e-10);
        assert_abs_diff_eq!(r.support_radius().unwrap(), 1.0, epsilon = 1e-10);
    }
}
