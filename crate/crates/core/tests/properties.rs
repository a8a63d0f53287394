//! Structural invariants over randomly drawn polygons and functions.
//!
//! Inputs come from the corpus generators driven by a proptest seed, so
//! every case is admissible and shrinking reduces to the seed value.

use std::f64::consts::PI;

use nalgebra::Matrix2;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use blaschke::blaschke::{blaschke_homothety, mean_blaschke_symmetral, projection_body};
use blaschke::convex2d::{
    blaschke_sum_2d, classical_ks_margin, minkowski_problem_2d, projection_body_2d, unit, Polygon, Vec2,
};
use blaschke::corpus::{random_bounded, random_polygon, random_radial, random_unbounded};
use blaschke::functionals::{omega_q_of_pair, StarBody};
use blaschke::logconcave::{LogConcave, PolyhedralLogConcave};
use blaschke::measures::{extract, extract_pair, extract_radial_pair, SurfaceAreaPair};
use blaschke::solver::{residual_at, solve_polyhedral_state, solve_radial, PolyhedralState, SolverConfig};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn polygon(seed: u64) -> Polygon {
    let mut r = rng(seed);
    let n = r.gen_range(3..=9);
    random_polygon(&mut r, n, 1.0)
}

fn polyhedral(seed: u64) -> PolyhedralLogConcave {
    let mut r = rng(seed);
    if r.gen_bool(0.5) {
        random_bounded(&mut r)
    } else {
        random_unbounded(&mut r)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn aligned_hausdorff(k: &Polygon, l: &Polygon) -> f64 {
    k.translate(&-k.steiner_point()).hausdorff_distance(&l.translate(&-l.steiner_point()))
}

fn sorted_atoms(atoms: &[(Vec2, f64)]) -> Vec<(f64, f64, f64)> {
    let mut v: Vec<_> = atoms.iter().map(|(z, a)| (z.x, z.y, *a)).collect();
    v.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.total_cmp(&q.1)));
    v
}

fn same_atoms(p: &[(Vec2, f64)], q: &[(Vec2, f64)], tol: f64) -> bool {
    let (p, q) = (sorted_atoms(p), sorted_atoms(q));
    p.len() == q.len()
        && p.iter().zip(&q).all(|(a, b)| (a.0 - b.0).abs() <= tol && (a.1 - b.1).abs() <= tol && (a.2 - b.2).abs() <= tol * a.2.abs().max(1.0))
}

fn same_pair(p: &SurfaceAreaPair, q: &SurfaceAreaPair, tol: f64) -> bool {
    same_atoms(p.mu(), q.mu(), tol) && same_atoms(p.nu(), q.nu(), tol)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn surface_area_measure_is_closed(seed in any::<u64>()) {
        let k = polygon(seed);
        let s = k.surface_area_measure();
        prop_assert!(s.resultant().norm() <= 1e-12 * k.perimeter());
    }

    #[test]
    fn minkowski_problem_inverts_surface_area_measure(seed in any::<u64>()) {
        let k = polygon(seed);
        let back = minkowski_problem_2d(&k.surface_area_measure()).unwrap();
        prop_assert!(aligned_hausdorff(&k, &back) <= 1e-9 * k.diameter());
    }

    #[test]
    fn body_blaschke_sum_commutes(a in any::<u64>(), b in any::<u64>()) {
        let (k, l) = (polygon(a), polygon(b));
        let kl = blaschke_sum_2d(&k, &l).unwrap();
        let lk = blaschke_sum_2d(&l, &k).unwrap();
        prop_assert!(aligned_hausdorff(&kl, &lk) <= 1e-9 * kl.diameter());
        let left = k.surface_area_measure().add(&l.surface_area_measure());
        let right = l.surface_area_measure().add(&k.surface_area_measure());
        prop_assert!(same_atoms(left.atoms(), right.atoms(), 1e-12));
    }

    #[test]
    fn body_blaschke_sum_associates(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (k, l, m) = (polygon(a), polygon(b), polygon(c));
        let left = blaschke_sum_2d(&blaschke_sum_2d(&k, &l).unwrap(), &m).unwrap();
        let right = blaschke_sum_2d(&k, &blaschke_sum_2d(&l, &m).unwrap()).unwrap();
        prop_assert!(aligned_hausdorff(&left, &right) <= 1e-9 * left.diameter());
    }

    #[test]
    fn projection_body_is_even_and_sublinear(seed in any::<u64>()) {
        let s = polygon(seed).surface_area_measure();
        let pi = projection_body_2d(&s).unwrap();
        let h = |u: &Vec2| pi.support(u);
        for k in 0..360 {
            let u = unit(k as f64 * PI / 180.0);
            let v = unit(k as f64 * PI / 180.0 + 1.0);
            prop_assert!((h(&u) - h(&-u)).abs() <= 1e-12 * pi.diameter());
            prop_assert!(h(&(u + v)) <= h(&u) + h(&v) + 1e-12 * pi.diameter());
        }
    }

    #[test]
    fn classical_kneser_suss_margin(a in any::<u64>(), b in any::<u64>(), t in 0.05f64..0.95) {
        let (k, l) = (polygon(a), polygon(b));
        prop_assert!(classical_ks_margin(&k, &l, t).unwrap() >= -1e-9);
        let homothet = k.scale(1.7).translate(&Vec2::new(0.3, -0.4));
        prop_assert!(classical_ks_margin(&k, &homothet, t).unwrap().abs() <= 1e-9);
    }

    #[test]
    fn cells_partition_the_domain(seed in any::<u64>()) {
        let f = random_bounded(&mut rng(seed));
        let area = f.domain_polygon().unwrap().area();
        prop_assert!(rel(f.laguerre_cells().total_area(), area) <= 1e-9);
    }

    #[test]
    fn mass_and_entropy_survive_rigid_motions(seed in any::<u64>(), x in -2.0f64..2.0, y in -2.0f64..2.0, angle in 0.0f64..PI) {
        let f = polyhedral(seed);
        let moved = [f.translate(&Vec2::new(x, y)), f.reflect(&unit(angle))];
        for g in &moved {
            prop_assert!(rel(g.mass(), f.mass()) <= 1e-10);
            prop_assert!((g.entropy() - f.entropy()).abs() <= 1e-10 * f.mass().max(1.0));
        }
    }

    #[test]
    fn linear_maps_scale_mass_and_keep_unimodular_entropy(seed in any::<u64>(), s in 0.4f64..2.5, shear in -1.5f64..1.5, angle in 0.0f64..PI) {
        let f = polyhedral(seed);
        let rot = Matrix2::new(angle.cos(), -angle.sin(), angle.sin(), angle.cos());
        let t = rot * Matrix2::new(s, shear, 0.0, 1.0 / s);
        let g = f.compose_linear(&t).unwrap();
        prop_assert!(rel(g.mass(), f.mass()) <= 1e-9);
        prop_assert!((g.entropy() - f.entropy()).abs() <= 1e-9 * f.mass().max(1.0));
        let stretched = f.compose_linear(&(t * 1.3)).unwrap();
        prop_assert!(rel(stretched.mass(), f.mass() / 1.69) <= 1e-9);
    }

    #[test]
    fn support_function_is_convex_with_known_origin_value(seed in any::<u64>(), a in any::<[i8; 4]>()) {
        let f = polyhedral(seed);
        prop_assert!((f.support_function(&Vec2::zeros()) + f.min_phi().0).abs() <= 1e-12);
        let y0 = Vec2::new(a[0] as f64, a[1] as f64) / 128.0;
        let y1 = Vec2::new(a[2] as f64, a[3] as f64) / 128.0;
        let h = |t: f64| f.support_function(&((1.0 - t) * y0 + t * y1));
        let (h0, h1) = (h(0.0), h(1.0));
        if h0.is_finite() && h1.is_finite() {
            for k in 1..10 {
                let t = k as f64 / 10.0;
                prop_assert!(h(t) <= (1.0 - t) * h0 + t * h1 + 1e-9 * (1.0 + h0.abs() + h1.abs()));
            }
        }
    }

    #[test]
    fn superlevel_sets_shrink(seed in any::<u64>()) {
        let f = polyhedral(seed);
        let top = f.max_value();
        let levels: Vec<f64> = (1..10).map(|k| top * k as f64 / 10.0).collect();
        for w in levels.windows(2) {
            let (outer, inner) = (f.superlevel(w[0]).unwrap(), f.superlevel(w[1]).unwrap());
            prop_assert!(inner.vertices().iter().all(|v| outer.contains(v)));
        }
    }

    #[test]
    fn extracted_pairs_are_centered(seed in any::<u64>()) {
        prop_assert!(extract_pair(&polyhedral(seed)).relative_centering_defect() <= 1e-9);
    }

    #[test]
    fn first_variation_is_additive_in_the_pair(a in any::<u64>(), b in any::<u64>(), g in any::<u64>(), lambda in 0.1f64..4.0) {
        let (p, q) = (extract_pair(&polyhedral(a)), extract_pair(&polyhedral(b)));
        let g = LogConcave::Polyhedral(random_bounded(&mut rng(g)));
        let sum = p.add(&q).first_variation(&g).unwrap();
        let parts = p.first_variation(&g).unwrap() + q.first_variation(&g).unwrap();
        prop_assert!(rel(sum, parts) <= 1e-12);
        prop_assert!(rel(p.scale(lambda).first_variation(&g).unwrap(), lambda * p.first_variation(&g).unwrap()) <= 1e-12);
    }

    #[test]
    fn reflection_pushes_atoms_forward(seed in any::<u64>(), angle in 0.0f64..PI) {
        let f = polyhedral(seed);
        let u = unit(angle);
        let direct = extract_pair(&f.reflect(&u));
        prop_assert!(same_pair(&direct, &extract_pair(&f).reflect(&u), 1e-12));
    }

    #[test]
    fn pair_algebra_is_exact(a in any::<u64>(), b in any::<u64>(), c in any::<u64>(), l1 in 0.1f64..3.0, l2 in 0.1f64..3.0) {
        let (p, q, r) = (extract_pair(&polyhedral(a)), extract_pair(&polyhedral(b)), extract_pair(&polyhedral(c)));
        prop_assert!(same_pair(&p.add(&q), &q.add(&p), 1e-12));
        prop_assert!(same_pair(&p.add(&q).add(&r), &p.add(&q.add(&r)), 1e-12));
        prop_assert!(same_pair(&p.scale(l1 + l2), &p.scale(l1).add(&p.scale(l2)), 1e-12));
        let s = p.add(&q).scale(l1);
        prop_assert!(rel(s.mu_total(), l1 * (p.mu_total() + q.mu_total())) <= 1e-12);
        prop_assert!(rel(s.w1(), l1 * (p.w1() + q.w1())) <= 1e-12);
    }

    #[test]
    fn projection_body_is_homogeneous(seed in any::<u64>(), lambda in 0.3f64..3.0) {
        let f = LogConcave::Polyhedral(polyhedral(seed));
        let scaled = blaschke_homothety(lambda, &f, &SolverConfig::default()).unwrap();
        let (pf, ps) = (projection_body(&f).unwrap(), projection_body(&scaled).unwrap());
        prop_assert!(ps.hausdorff_distance(&pf.scale(lambda)) <= 1e-8 * ps.diameter());
    }

    #[test]
    fn mean_symmetral_preserves_mass_and_w1(seed in any::<u64>()) {
        let f = LogConcave::Polyhedral(polyhedral(seed));
        let r = LogConcave::Radial(mean_blaschke_symmetral(&f, &SolverConfig::default()).unwrap());
        prop_assert!(rel(r.mass(), f.mass()) <= 1e-8);
        prop_assert!(rel(extract(&r).w1(), extract(&f).w1()) <= 1e-8);
    }

    #[test]
    fn omega_q_is_linear_in_the_pair_and_blind_to_scale(a in any::<u64>(), b in any::<u64>(), radii in proptest::collection::vec(0.5f64..2.0, 64), lambda in 0.1f64..10.0) {
        let (p, q) = (extract_pair(&polyhedral(a)), extract_pair(&polyhedral(b)));
        let body = StarBody::new(radii).unwrap();
        let sum = omega_q_of_pair(&p.add(&q), &body);
        prop_assert!(rel(sum, omega_q_of_pair(&p, &body) + omega_q_of_pair(&q, &body)) <= 1e-12);
        prop_assert!(rel(omega_q_of_pair(&p.scale(lambda), &body), lambda * omega_q_of_pair(&p, &body)) <= 1e-12);
        prop_assert!(rel(omega_q_of_pair(&p, &body.scale(lambda)), omega_q_of_pair(&p, &body)) <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn translation_leaves_residuals_unchanged(seed in any::<u64>(), x in -0.5f64..0.5, y in -0.5f64..0.5) {
        let pair = extract_pair(&polyhedral(seed));
        let (state, _) = solve_polyhedral_state(&pair, &SolverConfig::default()).unwrap();
        let v = Vec2::new(x, y);
        let moved = PolyhedralState {
            offsets: state.offsets.iter().zip(pair.mu()).map(|(c, (z, _))| c + z.dot(&v)).collect(),
            supports: state.supports.iter().zip(pair.nu()).map(|(d, (t, _))| d + t.dot(&v)).collect(),
        };
        let (r0, r1) = (residual_at(&pair, &state).unwrap(), residual_at(&pair, &moved).unwrap());
        for (a, b) in r0.iter().zip(&r1) {
            prop_assert!((a - b).abs() <= 1e-10);
        }
    }

    #[test]
    fn accepted_newton_steps_never_raise_the_residual(seed in any::<u64>()) {
        let pair = extract_pair(&polyhedral(seed));
        let (_, trace) = solve_polyhedral_state(&pair, &SolverConfig::default()).unwrap();
        // Rows with a zero step open a new Newton run (a homotopy stage).
        for w in trace.iterates.windows(2) {
            if w[1].step > 0.0 {
                prop_assert!(w[1].residual <= w[0].residual);
            }
        }
    }

    #[test]
    fn radial_solutions_are_convex(seed in any::<u64>()) {
        let mut r = rng(seed);
        let dim = if r.gen_bool(0.25) { 3 } else { 2 };
        let f = random_radial(&mut r, dim);
        let (g, _) = solve_radial(&extract_radial_pair(&f), &SolverConfig::default()).unwrap();
        let slopes: Vec<f64> = g.knots().windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)).collect();
        for w in slopes.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-12);
        }
        if let (Some(last), Some(tail)) = (slopes.last(), g.tail_slope()) {
            prop_assert!(tail >= last - 1e-12);
        }
    }
}
