//! Repeated Blaschke symmetrization along a schedule of directions.
//!
//! The iteration runs on pairs: each step averages the pair with its
//! reflection, which doubles the number of off-axis atoms. Once a count
//! exceeds the direction grid, atom directions are snapped to the grid by
//! linear splitting of their mass, followed by a least-squares correction
//! that restores the centering and the exact totals.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};
use serde::Serialize;

use super::{symmetral_pair, SymmetrizationSchedule};
use crate::convex2d::{angle_of, unit, Vec2};
use crate::error::{Error, Result};
use crate::functionals::{affine_surface_area, affine_surface_area_of_pair, OptimizerConfig, StarBody};
use crate::logconcave::LogConcave;
use crate::measures::{cosmic_distance_to_radial, extract, AnyPair, CosmicFamily, RadialPair, SurfaceAreaPair};
use crate::solver::{solve, SolverConfig};

#[derive(Clone, Debug)]
pub struct IterateConfig {
    pub solver: SolverConfig,
    /// Directions of the quantization grid.
    pub direction_grid: usize,
    pub optimizer: OptimizerConfig,
    /// Skip the `Ω_♯` column (it dominates the running time).
    pub omega: bool,
    pub family: CosmicFamily,
}

impl Default for IterateConfig {
    fn default() -> Self {
        IterateConfig {
            solver: SolverConfig::default(),
            direction_grid: 720,
            optimizer: OptimizerConfig::default(),
            omega: true,
            family: CosmicFamily::v1(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetrizationRecord {
    /// 0 is the input function.
    pub step: usize,
    /// Angle of the reflection direction; `NaN`-free, 0 for step 0.
    pub angle: f64,
    pub w1: f64,
    pub mass: f64,
    pub entropy: f64,
    /// Optimizer estimate of `Ω_♯`, or 0 when the column is disabled.
    pub omega_sharp: f64,
    pub cosmic_distance: f64,
    pub atoms: usize,
    pub quantized: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetrizationTrace {
    pub records: Vec<SymmetrizationRecord>,
    /// Step at which the iteration stopped with an error.
    #[serde(skip)]
    pub failure: Option<(usize, Error)>,
    /// The function after the last completed step.
    #[serde(skip)]
    pub last: Option<LogConcave>,
}

impl SymmetrizationTrace {
    pub fn final_distance(&self) -> Option<f64> {
        self.records.last().map(|r| r.cosmic_distance)
    }
}

/// Snaps atom directions onto `grid` equally spaced angles.
///
/// The mass of an atom at angle `φ` between grid angles `φ_j < φ_{j+1}` is
/// split linearly between them (radii of μ atoms are kept). The split moves
/// the first moments, so the masses are then corrected by the smallest
/// change in the `Σ δ²/m` norm that restores `Σ m θ` for ν and `Σ a z`
/// for μ while keeping the totals `Σ b`, `Σ a` and `Σ a|z|` fixed. Atoms at
/// the origin are left alone.
pub fn quantize_directions(pair: &SurfaceAreaPair, grid: usize) -> Result<SurfaceAreaPair> {
    if grid < 3 {
        return Err(Error::validation("direction_grid", "needs at least 3 directions"));
    }
    let step = 2.0 * PI / grid as f64;
    let split = |angle: f64| -> [(usize, f64); 2] {
        let x = angle.rem_euclid(2.0 * PI) / step;
        let j = (x.floor() as usize).min(grid - 1);
        let w = x - j as f64;
        [(j, 1.0 - w), ((j + 1) % grid, w)]
    };

    let mut nu = vec![0.0; grid];
    for (t, b) in pair.nu() {
        for (j, w) in split(angle_of(t)) {
            nu[j] += w * b;
        }
    }
    let target: Vec2 = pair.nu().iter().map(|(t, b)| *b * t).sum();
    let dirs: Vec<Vec2> = (0..grid).map(|j| unit(step * j as f64)).collect();
    correct_nu(&mut nu, &dirs, &target)?;

    // μ atoms keyed by (radius index, grid direction).
    let mut radii: Vec<f64> = Vec::new();
    let mut mu_grid: Vec<(usize, usize, f64)> = Vec::new();
    let mut origin = Vec::new();
    for (z, a) in pair.mu() {
        let r = z.norm();
        if r == 0.0 {
            origin.push((*z, *a));
            continue;
        }
        let ri = match radii.iter().position(|s| (s - r).abs() <= 1e-12 * r) {
            Some(i) => i,
            None => {
                radii.push(r);
                radii.len() - 1
            }
        };
        for (j, w) in split(angle_of(z)) {
            mu_grid.push((ri, j, w * a));
        }
    }
    let mut mu: Vec<(Vec2, f64)> = mu_grid.iter().map(|(ri, j, a)| (radii[*ri] * dirs[*j], *a)).collect();
    let target: Vec2 = pair.mu().iter().map(|(z, a)| *a * z).sum();
    correct_mu(&mut mu, &target)?;
    mu.extend(origin);
    SurfaceAreaPair::new(mu, dirs.into_iter().zip(nu).filter(|(_, b)| *b > 0.0).collect())
}

/// `δb_j = b_j (λ₀ + <λ, θ_j>)` with `Σ δb = 0`, `Σ δb θ = target - Σ b θ`.
fn correct_nu(nu: &mut [f64], dirs: &[Vec2], target: &Vec2) -> Result<()> {
    let mut m = Matrix3::zeros();
    let mut moment = Vec2::zeros();
    for (b, t) in nu.iter().zip(dirs) {
        let v = Vector3::new(1.0, t.x, t.y);
        m += *b * v * v.transpose();
        moment += *b * t;
    }
    if moment == *target {
        return Ok(());
    }
    let d = target - moment;
    let lambda = m.lu().solve(&Vector3::new(0.0, d.x, d.y)).ok_or(Error::DegenerateSpan)?;
    for (b, t) in nu.iter_mut().zip(dirs) {
        *b *= 1.0 + lambda[0] + lambda[1] * t.x + lambda[2] * t.y;
        if *b < 0.0 {
            return Err(Error::validation("direction_grid", "too coarse to keep the pair centered"));
        }
    }
    Ok(())
}

/// Same for μ with the extra constraint `Σ δa |z| = 0`.
fn correct_mu(mu: &mut [(Vec2, f64)], target: &Vec2) -> Result<()> {
    if mu.is_empty() {
        return Ok(());
    }
    let basis = |z: &Vec2| Vector4::new(1.0, z.norm(), z.x, z.y);
    let mut m = Matrix4::zeros();
    let mut moment = Vec2::zeros();
    for (z, a) in mu.iter() {
        let v = basis(z);
        m += *a * v * v.transpose();
        moment += *a * z;
    }
    if moment == *target {
        return Ok(());
    }
    let d = target - moment;
    let rhs = Vector4::new(0.0, 0.0, d.x, d.y);
    // A single radius makes the first two constraints dependent.
    let lambda = match m.lu().solve(&rhs) {
        Some(l) if l.iter().all(|x| x.is_finite()) => l,
        _ => {
            let m3 = Matrix3::from_fn(|i, j| m[(if i == 0 { 0 } else { i + 1 }, if j == 0 { 0 } else { j + 1 })]);
            let l = m3.lu().solve(&Vector3::new(0.0, d.x, d.y)).ok_or(Error::DegenerateSpan)?;
            Vector4::new(l[0], 0.0, l[1], l[2])
        }
    };
    for (z, a) in mu.iter_mut() {
        *a *= 1.0 + lambda.dot(&basis(z));
        if *a < 0.0 {
            return Err(Error::validation("direction_grid", "too coarse to keep the pair centered"));
        }
    }
    Ok(())
}

fn record(
    step: usize,
    angle: f64,
    pair: &AnyPair,
    f: &LogConcave,
    target: &RadialPair,
    cfg: &IterateConfig,
    warm: &mut Vec<StarBody>,
    quantized: bool,
) -> Result<SymmetrizationRecord> {
    let (omega_sharp, cosmic_distance, atoms) = match pair {
        AnyPair::Planar(p) => {
            let omega = if cfg.omega {
                let est = affine_surface_area_of_pair(p, &cfg.optimizer, warm);
                *warm = vec![est.body];
                est.value
            } else {
                0.0
            };
            (omega, cosmic_distance_to_radial(p, target, &cfg.family)?, p.mu().len() + p.nu().len())
        }
        AnyPair::Radial(r) => {
            let omega = if cfg.omega { affine_surface_area(f, &cfg.optimizer)?.value } else { 0.0 };
            (omega, 0.0, r.grad().len())
        }
    };
    Ok(SymmetrizationRecord {
        step,
        angle,
        w1: pair.w1(),
        mass: f.mass(),
        entropy: f.entropy(),
        omega_sharp,
        cosmic_distance,
        atoms,
        quantized,
    })
}

/// Records `f` and then `steps` symmetrals `f_k = B_{u_k} f_{k-1}`, each in
/// the Steiner gauge. The distance column compares the current pair with
/// the rotation average of the input pair. A failing step ends the trace
/// with the error stored in `failure`.
pub fn iterate_symmetrization(
    f: &LogConcave,
    schedule: &SymmetrizationSchedule,
    steps: usize,
    cfg: &IterateConfig,
) -> Result<SymmetrizationTrace> {
    cfg.solver.validate()?;
    let mut pair = extract(f);
    let target = pair.haar_average()?;
    let mut warm = Vec::new();
    let mut trace = SymmetrizationTrace { records: Vec::new(), failure: None, last: Some(f.clone()) };
    trace.records.push(record(0, 0.0, &pair, f, &target, cfg, &mut warm, false)?);
    for k in 1..=steps {
        let angle = schedule.angle(k);
        let outcome = (|| -> Result<(AnyPair, LogConcave, bool)> {
            let mut next = symmetral_pair(&unit(angle), &pair)?;
            let mut quantized = false;
            if let AnyPair::Planar(p) = &next {
                if p.mu().len() > cfg.direction_grid || p.nu().len() > cfg.direction_grid {
                    next = AnyPair::Planar(quantize_directions(p, cfg.direction_grid)?);
                    quantized = true;
                }
            }
            let (g, _) = solve(&next, &cfg.solver)?;
            Ok((next, g, quantized))
        })();
        match outcome.and_then(|(next, g, q)| Ok((record(k, angle, &next, &g, &target, cfg, &mut warm, q)?, next, g))) {
            Ok((rec, next, g)) => {
                trace.records.push(rec);
                pair = next;
                trace.last = Some(g);
            }
            Err(e) => {
                trace.failure = Some((k, e));
                break;
            }
        }
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex2d::Polygon;
    use crate::logconcave::RadialLogConcave;
    use crate::measures::extract_pair;
    use crate::logconcave::PolyhedralLogConcave;

    fn quick() -> IterateConfig {
        IterateConfig { omega: false, ..IterateConfig::default() }
    }

    #[test]
    fn radial_start_stays_at_distance_zero() {
        let f: LogConcave = RadialLogConcave::cone(2, 1.0).unwrap().into();
        let trace = iterate_symmetrization(&f, &SymmetrizationSchedule::Golden, 3, &quick()).unwrap();
        assert!(trace.failure.is_none());
        assert_eq!(trace.records.len(), 4);
        assert!(trace.records.iter().all(|r| r.cosmic_distance == 0.0));
    }

    #[test]
    fn quantization_keeps_totals_and_centering() {
        let k = Polygon::new(vec![Vec2::new(-1.0, -0.5), Vec2::new(1.5, -0.2), Vec2::new(0.2, 1.0)]).unwrap();
        let p = extract_pair(&PolyhedralLogConcave::indicator(k));
        let q = quantize_directions(&p, 16).unwrap();
        assert!((q.nu_total() - p.nu_total()).abs() < 1e-12);
        assert!((q.mu_total() - p.mu_total()).abs() < 1e-12);
        assert!(q.centering_defect().norm() < 1e-12);
        assert!(q.nu().len() <= 16);
    }

    #[test]
    fn square_columns_are_constant() {
        let f = LogConcave::indicator(Polygon::square(1.0));
        let trace = iterate_symmetrization(&f, &SymmetrizationSchedule::Golden, 4, &quick()).unwrap();
        assert!(trace.failure.is_none(), "{:?}", trace.failure);
        for r in &trace.records {
            assert!((r.w1 - 8.0).abs() < 1e-9 && (r.mass - 4.0).abs() < 1e-6, "{r:?}");
        }
        assert!(trace.final_distance().unwrap() < trace.records[0].cosmic_distance);
    }
}
