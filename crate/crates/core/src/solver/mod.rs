//! Reconstruction of a log-concave function from its surface area measure
//! pair, plus comparison up to translation.

mod polyhedral;
mod radial;

use serde::{Deserialize, Serialize};

pub use polyhedral::{gauge_kernel, jacobian_at, residual_at, solve_polyhedral, solve_polyhedral_state, steiner_gauge, PolyhedralState};
pub use radial::solve_radial;

use crate::convex2d::Vec2;
use crate::error::{Error, Result};
use crate::logconcave::{LogConcave, PolyhedralLogConcave};
use crate::measures::{extract_aligned, AnyPair, SurfaceAreaPair};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JacobianMode {
    Analytic,
    #[serde(rename = "fd")]
    FiniteDifference,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub max_iterations: usize,
    /// Target for the relative residual ∞-norm.
    pub residual_tol: f64,
    /// Backtracking factor of the line search.
    pub damping: f64,
    pub jacobian: JacobianMode,
    /// Tail margin, in units of `φ`, kept inside the truncation box of
    /// unbounded domains.
    pub clip_margin: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iterations: 200,
            residual_tol: 1e-8,
            damping: 0.5,
            jacobian: JacobianMode::Analytic,
            clip_margin: 50.0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.residual_tol > 0.0) {
            return Err(Error::validation("residual_tol", "must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(Error::validation("max_iterations", "must be at least 1"));
        }
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return Err(Error::validation("damping", "must lie in (0, 1)"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub residual: f64,
    pub step: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveTrace {
    pub iterates: Vec<TraceRow>,
    pub converged: bool,
    /// Relative residual per atom (μ first, then ν) at the returned point.
    pub final_residuals: Vec<f64>,
}

impl SolveTrace {
    pub fn last_residual(&self) -> f64 {
        self.iterates.last().map_or(f64::NAN, |r| r.residual)
    }

    pub(crate) fn push(&mut self, residual: f64, step: f64) {
        let iteration = self.iterates.len();
        self.iterates.push(TraceRow { iteration, residual, step });
    }
}

/// Solves either kind of pair. Planar results are in the Steiner gauge,
/// radial ones are centered at the origin.
pub fn solve(pair: &AnyPair, cfg: &SolverConfig) -> Result<(LogConcave, SolveTrace)> {
    match pair {
        AnyPair::Planar(p) => solve_polyhedral(p, cfg).map(|(f, t)| (f.into(), t)),
        AnyPair::Radial(r) => solve_radial(r, cfg).map(|(f, t)| (f.into(), t)),
    }
}

/// `(extracted - target) / target` per atom, μ atoms first. The pieces of
/// `f` must carry the μ points and the domain edges the ν directions.
pub fn residual(target: &SurfaceAreaPair, f: &PolyhedralLogConcave) -> Result<Vec<f64>> {
    let tol = 1e-9;
    if f.pieces().len() != target.mu().len() {
        return Err(Error::LayoutMismatch);
    }
    let (mu, nu) = extract_aligned(f);
    let mut out = Vec::with_capacity(target.mu().len() + target.nu().len());
    for (z, a) in target.mu() {
        let i = f
            .pieces()
            .iter()
            .position(|p| (p.gradient - z).norm() <= tol * (1.0 + z.norm()))
            .ok_or(Error::LayoutMismatch)?;
        out.push(mu[i] / a - 1.0);
    }
    let normals = f.domain_polygon().map(|p| p.edge_normals()).unwrap_or_default();
    if normals.len() != target.nu().len() {
        return Err(Error::LayoutMismatch);
    }
    for (theta, b) in target.nu() {
        let j = normals.iter().position(|(u, _)| (u - theta).norm() <= 1e-7).ok_or(Error::LayoutMismatch)?;
        out.push(nu[j] / b - 1.0);
    }
    Ok(out)
}

pub fn residual_norm(r: &[f64]) -> f64 {
    r.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Result of comparing two functions up to translation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Alignment {
    pub equal: bool,
    /// Translation applied to the second function.
    pub shift: [f64; 2],
    /// `sup |f - g(· - shift)| / max f` on the comparison grid.
    pub relative_error: f64,
}

/// Reference point of the translation gauge: the Steiner point of
/// `{f >= max f / e}` (the origin for radial functions).
pub fn gauge_point(f: &LogConcave) -> Result<Vec2> {
    match f {
        LogConcave::Radial(_) => Ok(Vec2::zeros()),
        LogConcave::Polyhedral(p) => Ok(p.superlevel(p.max_value() / std::f64::consts::E)?.steiner_point()),
    }
}

/// Aligns gauge points, then compares values on a cell-centered grid of
/// `grid × grid` nodes covering both functions.
pub fn equal_up_to_translation(f: &LogConcave, g: &LogConcave, tol: f64, grid: usize) -> Result<Alignment> {
    if f.dim() != 2 || g.dim() != 2 {
        return Err(Error::Unsupported("comparison on a planar grid".into()));
    }
    let sf = gauge_point(f)?;
    let sg = gauge_point(g)?;
    let shift = sf - sg;
    let half = 1.05 * (f.bounding_half_width() + sf.norm()).max(g.bounding_half_width() + sg.norm() + shift.norm());
    let h = 2.0 * half / grid as f64;
    let top = f.max_value();
    let mut worst: f64 = 0.0;
    for i in 0..grid {
        for j in 0..grid {
            let x = Vec2::new(-half + h * (i as f64 + 0.5), -half + h * (j as f64 + 0.5));
            let d = (f.eval(&x) - g.eval(&(x - shift))).abs();
            worst = worst.max(d);
        }
    }
    let rel = worst / top;
    Ok(Alignment { equal: rel <= tol, shift: [shift.x, shift.y], relative_error: rel })
}
