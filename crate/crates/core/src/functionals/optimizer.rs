//! Minimization of `Ω_Q` over sampled star bodies with centroid at the
//! origin.
//!
//! The variables are `log ρ_k`; steps are Barzilai–Borwein gradient steps
//! with a nonmonotone acceptance test, each followed by a projection that
//! moves the centroid back to the origin (and, for the geominimal variant,
//! replaces the body by its convex hull). Any feasible body gives an upper
//! bound on the infimum, so the result is the best feasible iterate seen.

use std::f64::consts::PI;

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use super::{AtomTable, StarBody, STAR_GRID};
use crate::convex2d::{angle_of, Polygon, Vec2};
use crate::error::{Error, Result};
use crate::logconcave::LogConcave;
use crate::measures::{extract, SurfaceAreaPair, RADIAL_EMBEDDING};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Directions of the star body grid.
    pub grid: usize,
    pub max_iterations: usize,
    /// Heights of the spike seeds placed at the heaviest atom directions.
    pub spike_heights: Vec<f64>,
    /// Number of atom directions that receive a spike.
    pub spike_directions: usize,
    /// Largest admissible `|centroid| / mean ρ`.
    pub centroid_tol: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            grid: STAR_GRID,
            max_iterations: 400,
            spike_heights: vec![1.0, 4.0, 16.0, 64.0],
            spike_directions: 8,
            centroid_tol: 1e-6,
        }
    }
}

/// Best test body found for `Ω_♯` or `G_♯`. `value` is an upper bound on
/// the true functional unless `exact` is set.
#[derive(Clone, Debug, Serialize)]
pub struct OmegaEstimate {
    pub value: f64,
    /// `Ω_Q` at the best body.
    pub best_omega_q: f64,
    pub body: StarBody,
    /// Index of the winning seed (0 is the round body, extra seeds last).
    pub seed: usize,
    pub iterations: usize,
    /// The iteration cap was hit before the objective settled.
    pub stalled: bool,
    /// Closed form (radial functions), not an optimizer output.
    pub exact: bool,
}

/// `Ω_♯ = 2^{1/3} (inf_Q Ω_Q)^{2/3}`; radial functions use the closed form
/// `(2π)^{1/3} W_1^{2/3}`, since their infimum is attained at balls.
pub fn affine_surface_area(f: &LogConcave, cfg: &OptimizerConfig) -> Result<OmegaEstimate> {
    if let LogConcave::Radial(r) = f {
        planar_only(r.dim())?;
        let w1 = extract(f).w1();
        let best = w1 * PI.sqrt();
        return Ok(closed_form(omega_sharp(best), best, cfg.grid));
    }
    Ok(affine_surface_area_of_pair(&extract(f).planar(RADIAL_EMBEDDING)?, cfg, &[]))
}

/// `G_♯ = inf over convex Q of δ(f, 1_{Q°}) (vol Q / π)^{1/2}`; `W_1` for
/// radial functions.
pub fn geominimal_surface_area(f: &LogConcave, cfg: &OptimizerConfig) -> Result<OmegaEstimate> {
    if let LogConcave::Radial(r) = f {
        planar_only(r.dim())?;
        let w1 = extract(f).w1();
        return Ok(closed_form(w1, w1 * PI.sqrt(), cfg.grid));
    }
    Ok(geominimal_surface_area_of_pair(&extract(f).planar(RADIAL_EMBEDDING)?, cfg, &[]))
}

fn planar_only(dim: usize) -> Result<()> {
    if dim != 2 {
        return Err(Error::Unsupported(format!("closed form in dimension {dim}")));
    }
    Ok(())
}

fn closed_form(value: f64, best: f64, grid: usize) -> OmegaEstimate {
    OmegaEstimate {
        value,
        best_omega_q: best,
        body: StarBody::round(grid),
        seed: 0,
        iterations: 0,
        stalled: false,
        exact: true,
    }
}

pub(crate) fn omega_sharp(inf_omega_q: f64) -> f64 {
    2f64.cbrt() * inf_omega_q.powf(2.0 / 3.0)
}

/// Optimizer on a planar pair, with optional extra seeds (resampled to the
/// configured grid if needed).
pub fn affine_surface_area_of_pair(pair: &SurfaceAreaPair, cfg: &OptimizerConfig, extra: &[StarBody]) -> OmegaEstimate {
    let run = minimize(pair, cfg, extra, false);
    OmegaEstimate { value: omega_sharp(run.best), ..run.into_estimate() }
}

pub fn geominimal_surface_area_of_pair(pair: &SurfaceAreaPair, cfg: &OptimizerConfig, extra: &[StarBody]) -> OmegaEstimate {
    let run = minimize(pair, cfg, extra, true);
    OmegaEstimate { value: run.best / PI.sqrt(), ..run.into_estimate() }
}

struct Run {
    best: f64,
    body: StarBody,
    seed: usize,
    iterations: usize,
    stalled: bool,
}

impl Run {
    fn into_estimate(self) -> OmegaEstimate {
        OmegaEstimate {
            value: f64::NAN,
            best_omega_q: self.best,
            body: self.body,
            seed: self.seed,
            iterations: self.iterations,
            stalled: self.stalled,
            exact: false,
        }
    }
}

struct Problem {
    table: AtomTable,
    dirs: Vec<Vec2>,
    step: f64,
    convex: bool,
    centroid_tol: f64,
}

impl Problem {
    /// `log Ω_Q` and its gradient in `log ρ`.
    fn objective(&self, rho: &[f64]) -> (f64, Vec<f64>) {
        let n = rho.len();
        let mut s = 0.0;
        let mut ds = vec![0.0; n];
        for (k, w, c) in &self.table.atoms {
            let k1 = (k + 1) % n;
            let r = (1.0 - w) * rho[*k] + w * rho[k1];
            s += c / r;
            let d = c / (r * r);
            ds[*k] -= d * (1.0 - w);
            ds[k1] -= d * w;
        }
        let v = 0.5 * self.step * rho.iter().map(|r| r * r).sum::<f64>();
        let grad = (0..n).map(|k| rho[k] * ds[k] / s + 0.5 * rho[k] * rho[k] * self.step / v).collect();
        (s.ln() + 0.5 * v.ln(), grad)
    }

    /// Newton steps on the translation that zeroes `Σ ρ³ u`, using
    /// `ρ(u) -> ρ(u) - <s, u>` to first order.
    fn center(&self, rho: &mut [f64]) {
        for _ in 0..3 {
            let mut m = Vec2::zeros();
            let mut jac = Matrix2::zeros();
            for (r, u) in rho.iter().zip(&self.dirs) {
                m += r.powi(3) * u;
                jac += 3.0 * r * r * u * u.transpose();
            }
            let Some(inv) = jac.try_inverse() else { return };
            let s = inv * m;
            let floor = 1e-9 * rho.iter().copied().fold(0.0, f64::max);
            for (r, u) in rho.iter_mut().zip(&self.dirs) {
                *r = (*r - s.dot(u)).max(floor);
            }
        }
    }

    /// Smallest discretely convex body containing the samples: the convex
    /// hull of the points `ρ_k u_k`, translated exactly (not to first order)
    /// until the sampled centroid vanishes, and sampled back on the rays.
    fn convexify(&self, rho: &[f64]) -> Option<Vec<f64>> {
        let pts: Vec<Vec2> = rho.iter().zip(&self.dirs).map(|(r, u)| *r * u).collect();
        let hull = Polygon::convex_hull(&pts).ok()?;
        let edges: Vec<(Vec2, f64)> = hull.edge_normals().iter().map(|(n, _)| (*n, hull.support(n))).collect();
        let sample = |shift: &Vec2| -> Option<Vec<f64>> {
            let planes: Vec<(Vec2, f64)> = edges.iter().map(|(n, h)| (*n, h - n.dot(shift))).collect();
            if planes.iter().any(|(_, h)| *h <= 0.0) {
                return None;
            }
            Some(
                self.dirs
                    .iter()
                    .map(|u| {
                        planes.iter().filter(|(n, _)| n.dot(u) > 0.0).map(|(n, h)| h / n.dot(u)).fold(f64::INFINITY, f64::min)
                    })
                    .collect(),
            )
        };
        let mut shift = Vec2::zeros();
        let mut out = sample(&shift)?;
        for _ in 0..4 {
            let mut m = Vec2::zeros();
            let mut jac = Matrix2::zeros();
            for (r, u) in out.iter().zip(&self.dirs) {
                m += r.powi(3) * u;
                jac += 3.0 * r * r * u * u.transpose();
            }
            shift += jac.try_inverse()? * m;
            out = sample(&shift)?;
        }
        Some(out)
    }

    /// Projected and normalized body, with a feasibility verdict.
    fn project(&self, mut rho: Vec<f64>) -> (Vec<f64>, bool) {
        self.center(&mut rho);
        if self.convex {
            if let Some(c) = self.convexify(&rho) {
                rho = c;
            }
        }
        let v = 0.5 * self.step * rho.iter().map(|r| r * r).sum::<f64>();
        let s = (PI / v).sqrt();
        rho.iter_mut().for_each(|r| *r *= s);
        let body = StarBody { radii: rho };
        let feasible = body.centroid_defect() <= self.centroid_tol && (!self.convex || body.is_convex(1e-9));
        (body.radii, feasible)
    }
}

fn seeds(pair: &SurfaceAreaPair, cfg: &OptimizerConfig, extra: &[StarBody]) -> Vec<Vec<f64>> {
    let n = cfg.grid;
    let step = 2.0 * PI / n as f64;
    let mut out = vec![vec![1.0; n]];
    let mut atoms: Vec<(f64, f64)> =
        pair.mu().iter().chain(pair.nu()).filter(|(x, _)| x.norm() > 0.0).map(|(x, m)| (angle_of(x), m * x.norm())).collect();
    atoms.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.total_cmp(&b.0)));
    atoms.truncate(cfg.spike_directions);
    if !atoms.is_empty() {
        for height in &cfg.spike_heights {
            let rho: Vec<f64> = (0..n)
                .map(|k| {
                    let a = step * k as f64;
                    let bump: f64 = atoms
                        .iter()
                        .map(|(t, _)| {
                            let d = (a - t).rem_euclid(2.0 * PI);
                            let d = d.min(2.0 * PI - d);
                            (1.0 - d / step).max(0.0)
                        })
                        .sum();
                    1.0 + height * bump
                })
                .collect();
            out.push(rho);
        }
    }
    for q in extra {
        if q.len() == n {
            out.push(q.radii().to_vec());
        } else {
            out.push((0..n).map(|k| q.radius_at(step * k as f64)).collect());
        }
    }
    out
}

fn minimize(pair: &SurfaceAreaPair, cfg: &OptimizerConfig, extra: &[StarBody], convex: bool) -> Run {
    let n = cfg.grid;
    let round = StarBody::round(n);
    let problem = Problem {
        table: AtomTable::new(pair, &round),
        dirs: (0..n).map(|k| round.direction(k)).collect(),
        step: round.step(),
        convex,
        centroid_tol: cfg.centroid_tol,
    };
    let mut best = Run { best: f64::INFINITY, body: round.clone(), seed: 0, iterations: 0, stalled: false };
    for (index, seed) in seeds(pair, cfg, extra).into_iter().enumerate() {
        let (rho, feasible) = problem.project(seed);
        let (value, iterations, stalled, rho, feasible) = descend(&problem, rho, feasible, cfg.max_iterations);
        best.iterations += iterations;
        if feasible && value < best.best {
            best.best = value;
            best.body = StarBody { radii: rho };
            best.seed = index;
            best.stalled = stalled;
        }
    }
    best.best = best.best.exp();
    best
}

/// Returns `(best log Ω_Q, iterations, stalled, body, feasible)`.
fn descend(p: &Problem, rho: Vec<f64>, feasible: bool, max_iterations: usize) -> (f64, usize, bool, Vec<f64>, bool) {
    const WINDOW: usize = 10;
    let (mut f, mut g) = p.objective(&rho);
    let mut ell: Vec<f64> = rho.iter().map(|r| r.ln()).collect();
    let mut best = if feasible { (f, rho.clone()) } else { (f64::INFINITY, rho.clone()) };
    let mut recent = vec![f];
    let mut history = vec![best.0];
    let gmax = g.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut alpha = if gmax > 0.0 { 0.1 / gmax } else { 1.0 };
    let mut iterations = 0;
    let mut settled = false;
    while iterations < max_iterations {
        iterations += 1;
        let mut accepted = None;
        for _ in 0..30 {
            let trial: Vec<f64> = ell.iter().zip(&g).map(|(l, d)| (l - alpha * d).exp()).collect();
            let (rho_t, feas_t) = p.project(trial);
            let (f_t, g_t) = p.objective(&rho_t);
            let reference = recent.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if f_t.is_finite() && f_t <= reference + 1e-14 {
                accepted = Some((rho_t, feas_t, f_t, g_t));
                break;
            }
            alpha *= 0.25;
        }
        let Some((rho_t, feas_t, f_t, g_t)) = accepted else {
            settled = true;
            break;
        };
        let ell_t: Vec<f64> = rho_t.iter().map(|r| r.ln()).collect();
        let (mut ss, mut sy) = (0.0, 0.0);
        for k in 0..ell.len() {
            let s = ell_t[k] - ell[k];
            ss += s * s;
            sy += s * (g_t[k] - g[k]);
        }
        alpha = if sy > 0.0 { (ss / sy).clamp(1e-8, 1e4) } else { (2.0 * alpha).min(1e4) };
        if feas_t && f_t < best.0 {
            best = (f_t, rho_t.clone());
        }
        ell = ell_t;
        f = f_t;
        g = g_t;
        recent.push(f);
        if recent.len() > WINDOW {
            recent.remove(0);
        }
        history.push(best.0);
        if history.len() > 25 {
            let old = history[history.len() - 26];
            if old.is_finite() && old - best.0 < 1e-11 {
                settled = true;
                break;
            }
        }
        if ss < 1e-28 {
            settled = true;
            break;
        }
    }
    // Hitting the cap counts as a stall unless the last window had already flattened out.
    let stalled = !settled && {
        let old = history[history.len().saturating_sub(26)];
        history.len() <= 25 || !old.is_finite() || old - best.0 > 1e-7
    };
    let feasible = best.0.is_finite();
    (best.0, iterations, stalled, best.1, feasible)
}
