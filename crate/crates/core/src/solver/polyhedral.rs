//! Newton solver for the planar polyhedral class.
//!
//! Unknowns are one offset `c_i` per μ atom and one support value `d_j` per
//! ν atom; the candidate is `f = e^{-max(<z_i,x> - c_i)}` on
//! `{<θ_j, x> <= d_j}`. Residuals are relative mass errors per atom.

use nalgebra::{DMatrix, DVector, Matrix2};
use serde::{Deserialize, Serialize};

use super::{residual_norm, JacobianMode, SolveTrace, SolverConfig};
use crate::convex2d::{cross, rot90, EdgeLabel, LabeledPolygon, Polygon, Vec2};
use crate::error::{Error, Result};
use crate::logconcave::integrate::{ring_integrals, segment_integral};
use crate::logconcave::{AffinePiece, Domain, PolyhedralLogConcave};
use crate::measures::{admissible, SurfaceAreaPair};

/// Offsets aligned with `pair.mu()` and supports aligned with `pair.nu()`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyhedralState {
    pub offsets: Vec<f64>,
    pub supports: Vec<f64>,
}

impl PolyhedralState {
    fn from_vec(x: &[f64], m: usize) -> Self {
        PolyhedralState { offsets: x[..m].to_vec(), supports: x[m..].to_vec() }
    }

    fn to_vec(&self) -> Vec<f64> {
        self.offsets.iter().chain(&self.supports).copied().collect()
    }
}

struct Layout {
    z: Vec<Vec2>,
    theta: Vec<Vec2>,
    /// Coercivity rate of the gradient hull (unbounded case only).
    alpha: f64,
    margin: f64,
}

impl Layout {
    fn new(p: &SurfaceAreaPair, margin: f64) -> Result<Self> {
        let z: Vec<Vec2> = p.mu().iter().map(|(z, _)| *z).collect();
        let theta: Vec<Vec2> = p.nu().iter().map(|(t, _)| *t).collect();
        let mut alpha = 0.0;
        if theta.is_empty() {
            let pieces = z.iter().map(|z| AffinePiece::new(*z, 0.0)).collect();
            alpha = PolyhedralLogConcave::from_parts(pieces, Domain::Unbounded)
                .coercivity_rate()
                .ok_or(Error::CoercivityViolation)?;
        }
        Ok(Layout { z, theta, alpha, margin })
    }

    fn m(&self) -> usize {
        self.z.len()
    }

    fn n(&self) -> usize {
        self.z.len() + self.theta.len()
    }

    fn pieces(&self, x: &[f64]) -> Vec<AffinePiece> {
        self.z.iter().zip(x).map(|(z, c)| AffinePiece::new(*z, *c)).collect()
    }

    /// `Σ w_l F_l` vanishes identically for centered targets, with
    /// `w = (a_i z_i, b_j θ_j)`.
    fn weights(&self, target: &[f64]) -> Vec<Vec2> {
        let m = self.m();
        (0..self.n()).map(|l| if l < m { target[l] * self.z[l] } else { target[l] * self.theta[l - m] }).collect()
    }
}

/// Geometry of a candidate with every cell and edge present.
struct Candidate {
    f: PolyhedralLogConcave,
    base: LabeledPolygon,
    regions: Vec<Option<LabeledPolygon>>,
    masses: Vec<f64>,
}

fn evaluate(layout: &Layout, x: &[f64]) -> Option<Candidate> {
    if x.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let m = layout.m();
    let pieces = layout.pieces(&x[..m]);
    let (base, domain) = if layout.theta.is_empty() {
        let lo = x[..m].iter().copied().fold(f64::INFINITY, f64::min);
        let hi = x[..m].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let half = (hi - lo + layout.margin) / layout.alpha;
        (LabeledPolygon::square(half, EdgeLabel::Box), Domain::Unbounded)
    } else {
        let d = &x[m..];
        let big = 1e3 * (1.0 + d.iter().fold(0.0f64, |a, v| a.max(v.abs())));
        let mut region = LabeledPolygon::square(big, EdgeLabel::Box);
        for (j, theta) in layout.theta.iter().enumerate() {
            region = region.clip(theta, d[j], EdgeLabel::Domain(j))?;
        }
        let mut seen = vec![false; layout.theta.len()];
        for l in &region.labels {
            match l {
                EdgeLabel::Domain(j) if !seen[*j] => seen[*j] = true,
                _ => return None,
            }
        }
        if seen.iter().any(|s| !s) {
            return None;
        }
        let poly = Polygon::from_raw(region.vertices.clone());
        (region, Domain::Bounded(poly))
    };
    let f = PolyhedralLogConcave::from_parts(pieces, domain);
    let regions = f.cells_in(&base);
    if regions.iter().any(Option::is_none) {
        return None;
    }
    let mut masses: Vec<f64> = regions
        .iter()
        .zip(f.pieces())
        .map(|(r, p)| ring_integrals(&r.as_ref().unwrap().vertices, &p.gradient, p.offset).0)
        .collect();
    if !layout.theta.is_empty() {
        masses.extend(edge_masses_by_label(&f, &regions, layout.theta.len()));
    }
    if masses.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
        return None;
    }
    Some(Candidate { f, base, regions, masses })
}

fn edge_masses_by_label(f: &PolyhedralLogConcave, regions: &[Option<LabeledPolygon>], k: usize) -> Vec<f64> {
    let mut out = vec![0.0; k];
    for (i, r) in regions.iter().enumerate() {
        let r = r.as_ref().unwrap();
        let p = &f.pieces()[i];
        for (e, label) in r.labels.iter().enumerate() {
            if let EdgeLabel::Domain(j) = label {
                let (a, b) = r.edge(e);
                out[*j] += segment_integral((b - a).norm(), -p.value(&a), -p.value(&b));
            }
        }
    }
    out
}

fn relative_residuals(masses: &[f64], target: &[f64]) -> Vec<f64> {
    masses.iter().zip(target).map(|(m, t)| m / t - 1.0).collect()
}

fn phi_of(pieces: &[AffinePiece], x: &Vec2) -> f64 {
    pieces.iter().map(|p| p.value(x)).fold(f64::NEG_INFINITY, f64::max)
}

/// Jacobian of the raw masses (not divided by targets).
fn analytic_jacobian(layout: &Layout, cand: &Candidate) -> DMatrix<f64> {
    let m = layout.m();
    let n = layout.n();
    let mut jac = DMatrix::zeros(n, n);
    let pieces = cand.f.pieces();
    for (i, r) in cand.regions.iter().enumerate() {
        let r = r.as_ref().unwrap();
        let p = &pieces[i];
        jac[(i, i)] += cand.masses[i];
        for (e, label) in r.labels.iter().enumerate() {
            let (a, b) = r.edge(e);
            let flux = || segment_integral((b - a).norm(), -p.value(&a), -p.value(&b));
            match *label {
                EdgeLabel::Piece(k) => {
                    // Raising c_i pushes the interface into cell i.
                    let speed = 1.0 / (layout.z[k] - layout.z[i]).norm();
                    let fl = flux() * speed;
                    jac[(i, i)] -= fl;
                    jac[(i, k)] += fl;
                }
                EdgeLabel::Domain(j) => {
                    let s = flux();
                    jac[(i, m + j)] += s;
                    jac[(m + j, i)] += s;
                    jac[(m + j, m + j)] -= layout.z[i].dot(&layout.theta[j]) * s;
                }
                _ => {}
            }
        }
    }
    // Edge endpoints slide when their own or a neighbouring support moves.
    let base = &cand.base;
    let nb = base.len();
    for e in 0..nb {
        let EdgeLabel::Domain(j) = base.labels[e] else { continue };
        let t = rot90(&layout.theta[j]);
        let (start, end) = base.edge(e);
        let next = base.labels[(e + 1) % nb];
        let prev = base.labels[(e + nb - 1) % nb];
        for (corner, other, sign) in [(end, next, 1.0), (start, prev, -1.0)] {
            let EdgeLabel::Domain(l) = other else { continue };
            let mat = Matrix2::new(layout.theta[j].x, layout.theta[j].y, layout.theta[l].x, layout.theta[l].y);
            let Some(inv) = mat.try_inverse() else { continue };
            let value = (-phi_of(pieces, &corner)).exp();
            let dj = inv.column(0).dot(&t);
            let dl = inv.column(1).dot(&t);
            jac[(m + j, m + j)] += sign * value * dj;
            jac[(m + j, m + l)] += sign * value * dl;
        }
    }
    jac
}

fn fd_jacobian(layout: &Layout, x: &[f64], cand: &Candidate) -> Option<DMatrix<f64>> {
    let n = layout.n();
    let mut jac = DMatrix::zeros(n, n);
    for col in 0..n {
        let h = 1e-6 * x[col].abs().max(1.0);
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[col] += h;
        xm[col] -= h;
        let (mp, mm, width) = match (evaluate(layout, &xp), evaluate(layout, &xm)) {
            (Some(p), Some(q)) => (p.masses, q.masses, 2.0 * h),
            (Some(p), None) => (p.masses, cand.masses.clone(), h),
            (None, Some(q)) => (cand.masses.clone(), q.masses, h),
            (None, None) => return None,
        };
        for row in 0..n {
            jac[(row, col)] = (mp[row] - mm[row]) / width;
        }
    }
    Some(jac)
}

/// Translation directions `(<z_i, e_k>, <θ_j, e_k>)`, `k = 1, 2`, of the
/// unknowns `(c, d)`.
pub fn gauge_kernel(pair: &SurfaceAreaPair) -> [Vec<f64>; 2] {
    let col = |k: usize| pair.mu().iter().map(|(z, _)| z[k]).chain(pair.nu().iter().map(|(t, _)| t[k])).collect();
    [col(0), col(1)]
}

/// Relative residuals at a given state.
pub fn residual_at(pair: &SurfaceAreaPair, state: &PolyhedralState) -> Result<Vec<f64>> {
    let layout = Layout::new(pair, SolverConfig::default().clip_margin)?;
    let target = targets(pair);
    let cand = evaluate(&layout, &state.to_vec()).ok_or(Error::validation("state", "a cell or edge is empty"))?;
    Ok(relative_residuals(&cand.masses, &target))
}

/// Jacobian of the relative residuals at a given state.
pub fn jacobian_at(pair: &SurfaceAreaPair, state: &PolyhedralState, mode: JacobianMode) -> Result<DMatrix<f64>> {
    let layout = Layout::new(pair, SolverConfig::default().clip_margin)?;
    let target = targets(pair);
    let x = state.to_vec();
    let cand = evaluate(&layout, &x).ok_or(Error::validation("state", "a cell or edge is empty"))?;
    let mut jac = match mode {
        JacobianMode::Analytic => analytic_jacobian(&layout, &cand),
        JacobianMode::FiniteDifference => fd_jacobian(&layout, &x, &cand).ok_or(Error::validation("state", "no valid neighbour"))?,
    };
    for (r, t) in target.iter().enumerate() {
        jac.row_mut(r).scale_mut(1.0 / t);
    }
    Ok(jac)
}

fn targets(pair: &SurfaceAreaPair) -> Vec<f64> {
    pair.mu().iter().map(|(_, a)| *a).chain(pair.nu().iter().map(|(_, b)| *b)).collect()
}

fn initial_guess(layout: &Layout, target: &[f64]) -> Option<Vec<f64>> {
    let m = layout.m();
    let mass: f64 = target[..m].iter().sum();
    let rmax = layout.z.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut x = vec![0.0; layout.n()];
    let sigma = if layout.theta.is_empty() {
        10.0 / (rmax * rmax)
    } else {
        let boundary: f64 = target[m..].iter().sum();
        let r0 = 2.0 * mass / boundary;
        for d in &mut x[m..] {
            *d = r0;
        }
        if rmax > 0.0 {
            r0 / (2.0 * rmax)
        } else {
            1.0
        }
    };
    for i in 0..m {
        x[i] = 0.5 * sigma * layout.z[i].norm_squared();
    }
    let cand = evaluate(layout, &x)?;
    let total: f64 = cand.masses[..m].iter().sum();
    let shift = (mass / total).ln();
    for c in &mut x[..m] {
        *c += shift;
    }
    evaluate(layout, &x).map(|_| x)
}

/// Rows replaced by the gauge: the pair with the largest and most
/// independent centering weights.
fn dropped_rows(weights: &[Vec2]) -> (usize, usize) {
    let k1 = (0..weights.len()).max_by(|&a, &b| weights[a].norm().total_cmp(&weights[b].norm())).unwrap();
    let k2 = (0..weights.len())
        .filter(|&k| k != k1)
        .max_by(|&a, &b| cross(&weights[k1], &weights[a]).abs().total_cmp(&cross(&weights[k1], &weights[b]).abs()))
        .unwrap();
    (k1, k2)
}

enum Outcome {
    Converged(Vec<f64>),
    Stalled(Vec<f64>),
}

/// Damped Newton towards `target` from a valid `x`.
fn newton(
    layout: &Layout,
    kernel: &[Vec<f64>; 2],
    mut x: Vec<f64>,
    target: &[f64],
    cfg: &SolverConfig,
    trace: &mut SolveTrace,
) -> Outcome {
    let n = layout.n();
    let (k1, k2) = dropped_rows(&layout.weights(target));
    let mut cand = evaluate(layout, &x).expect("caller passes a valid point");
    let mut res = relative_residuals(&cand.masses, target);
    let mut norm = residual_norm(&res);
    // Every cell and edge keeps a fixed share of its mass, so that a step
    // cannot trade a large residual for a nearly empty cell.
    let floor = 0.5 * cand.masses.iter().zip(target).map(|(m, t)| m / t).fold(1.0, f64::min);
    trace.push(norm, 0.0);
    for _ in 0..cfg.max_iterations {
        if norm <= cfg.residual_tol {
            return Outcome::Converged(x);
        }
        let raw = match cfg.jacobian {
            JacobianMode::Analytic => Some(analytic_jacobian(layout, &cand)),
            JacobianMode::FiniteDifference => fd_jacobian(layout, &x, &cand),
        };
        let Some(mut jac) = raw else { return Outcome::Stalled(x) };
        let mut rhs = DVector::from_iterator(n, res.iter().map(|r| -r));
        for r in 0..n {
            jac.row_mut(r).scale_mut(1.0 / target[r]);
        }
        for (row, kv) in [(k1, &kernel[0]), (k2, &kernel[1])] {
            for c in 0..n {
                jac[(row, c)] = kv[c];
            }
            rhs[row] = 0.0;
        }
        let step = match jac.clone().lu().solve(&rhs) {
            Some(s) if s.iter().all(|v| v.is_finite()) => s,
            _ => match jac.svd(true, true).solve(&rhs, 1e-14) {
                Ok(s) => s,
                Err(_) => return Outcome::Stalled(x),
            },
        };
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, s)| a + alpha * s).collect();
            if let Some(c) = evaluate(layout, &trial) {
                let r = relative_residuals(&c.masses, target);
                let nn = residual_norm(&r);
                let kept = c.masses.iter().zip(target).all(|(m, t)| *m >= floor * t);
                if kept && nn <= (1.0 - 1e-4 * alpha) * norm {
                    x = trial;
                    cand = c;
                    res = r;
                    norm = nn;
                    accepted = true;
                    break;
                }
            }
            alpha *= cfg.damping;
        }
        if !accepted {
            return Outcome::Stalled(x);
        }
        trace.push(norm, alpha);
    }
    if norm <= cfg.residual_tol {
        Outcome::Converged(x)
    } else {
        Outcome::Stalled(x)
    }
}

/// Unknowns `(c, d)` solving the pair, before any translation gauge.
pub fn solve_polyhedral_state(pair: &SurfaceAreaPair, cfg: &SolverConfig) -> Result<(PolyhedralState, SolveTrace)> {
    cfg.validate()?;
    let report = admissible(pair);
    if !report.is_admissible() {
        return Err(Error::NotAdmissible(report));
    }
    if !pair.nu().is_empty() {
        let s = crate::convex2d::SphereMeasure2::new(pair.nu().iter().copied())?;
        if s.len() < 3 || s.in_closed_halfplane() {
            return Err(Error::Unsupported("boundary normals must not lie in a closed half-plane".into()));
        }
    }
    let layout = Layout::new(pair, cfg.clip_margin)?;
    let target = targets(pair);
    let kernel = gauge_kernel(pair);
    let m = layout.m();
    let mut trace = SolveTrace::default();
    let x0 = initial_guess(&layout, &target).ok_or_else(|| Error::NoConvergence(Box::new(trace.clone())))?;
    let finish = |x: Vec<f64>, mut trace: SolveTrace| {
        let cand = evaluate(&layout, &x).unwrap();
        trace.final_residuals = relative_residuals(&cand.masses, &target);
        trace.converged = true;
        (PolyhedralState::from_vec(&x, m), trace)
    };
    let x_start = match newton(&layout, &kernel, x0.clone(), &target, cfg, &mut trace) {
        Outcome::Converged(x) => return Ok(finish(x, trace)),
        Outcome::Stalled(x) => x,
    };
    // Homotopy from the masses the stalled point already has to the target.
    let start_masses = evaluate(&layout, &x_start).unwrap().masses;
    let mut x = x_start;
    let mut tau: f64 = 0.0;
    let mut dtau: f64 = 0.25;
    let mut budget = 10 * cfg.max_iterations;
    while tau < 1.0 {
        if dtau < 1e-7 || budget == 0 {
            trace.final_residuals = relative_residuals(&evaluate(&layout, &x).unwrap().masses, &target);
            return Err(Error::NoConvergence(Box::new(trace)));
        }
        let next = (tau + dtau).min(1.0);
        let stage: Vec<f64> = start_masses.iter().zip(&target).map(|(s, t)| (1.0 - next) * s + next * t).collect();
        let before = trace.iterates.len();
        let stage_cfg = SolverConfig { max_iterations: cfg.max_iterations.min(60), ..cfg.clone() };
        let outcome = newton(&layout, &kernel, x.clone(), &stage, &stage_cfg, &mut trace);
        budget = budget.saturating_sub(trace.iterates.len() - before);
        match outcome {
            Outcome::Converged(xn) => {
                x = xn;
                tau = next;
                dtau = (2.0 * dtau).min(1.0);
            }
            Outcome::Stalled(_) => dtau *= 0.25,
        }
    }
    Ok(finish(x, trace))
}

impl PolyhedralState {
    /// The function these unknowns describe for `pair`.
    pub fn function(&self, pair: &SurfaceAreaPair) -> Result<PolyhedralLogConcave> {
        let layout = Layout::new(pair, SolverConfig::default().clip_margin)?;
        let cand = evaluate(&layout, &self.to_vec()).ok_or(Error::validation("state", "a cell or edge is empty"))?;
        let domain = match cand.f.domain() {
            Domain::Bounded(p) => Domain::Bounded(Polygon::new(p.vertices().to_vec())?),
            Domain::Unbounded => Domain::Unbounded,
        };
        PolyhedralLogConcave::new(cand.f.pieces().to_vec(), domain)
    }
}

/// Translates `f` so that `{f >= max f / e}` has its Steiner point at the
/// origin.
pub fn steiner_gauge(f: &PolyhedralLogConcave) -> Result<PolyhedralLogConcave> {
    let s = f.superlevel(f.max_value() / std::f64::consts::E)?.steiner_point();
    Ok(f.translate(&-s))
}

/// Functional Minkowski problem in the polyhedral class: the function with
/// the given pair, in the Steiner gauge.
///
/// Pairs of scaled indicators (one μ atom, at the origin) are solved in
/// closed form: with `S_{M₀} = ν` from the classical Minkowski problem the
/// solution is `c 1_{M₀/c}` with `c = area(M₀) / μ({0})`.
pub fn solve_polyhedral(pair: &SurfaceAreaPair, cfg: &SolverConfig) -> Result<(PolyhedralLogConcave, SolveTrace)> {
    if let [(z, a)] = pair.mu() {
        if z.norm() == 0.0 && !pair.nu().is_empty() {
            cfg.validate()?;
            let report = admissible(pair);
            if !report.is_admissible() {
                return Err(Error::NotAdmissible(report));
            }
            let m0 = crate::convex2d::minkowski_problem_2d(&crate::convex2d::SphereMeasure2::new(pair.nu().iter().copied())?)?;
            let c = m0.area() / a;
            let f = PolyhedralLogConcave::scaled_indicator(m0.scale(1.0 / c), c);
            let mut trace = SolveTrace::default();
            trace.final_residuals = super::residual(pair, &f)?;
            trace.push(residual_norm(&trace.final_residuals), 0.0);
            trace.converged = true;
            return Ok((steiner_gauge(&f)?, trace));
        }
    }
    let (state, trace) = solve_polyhedral_state(pair, cfg)?;
    let f = state.function(pair)?;
    Ok((steiner_gauge(&f)?, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::extract_pair;
    use approx::assert_abs_diff_eq;

    fn linf_pair() -> SurfaceAreaPair {
        let mu = [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)].iter().map(|&(x, y)| (Vec2::new(x, y), 2.0)).collect();
        SurfaceAreaPair::new(mu, vec![]).unwrap()
    }

    #[test]
    fn square_indicator_round_trip() {
        let pair = extract_pair(&PolyhedralLogConcave::indicator(Polygon::square(1.0)));
        let (f, trace) = solve_polyhedral(&pair, &SolverConfig::default()).unwrap();
        assert!(trace.converged);
        assert!(f.is_indicator());
        assert_abs_diff_eq!(f.max_value(), 1.0, epsilon = 1e-9);
        assert!(f.domain_polygon().unwrap().hausdorff_distance(&Polygon::square(1.0)) < 1e-9);
    }

    #[test]
    fn indicator_closed_form_matches_newton() {
        let k = Polygon::new(vec![Vec2::new(-1.0, -0.8), Vec2::new(1.4, -0.5), Vec2::new(0.9, 1.1), Vec2::new(-0.7, 0.9)]).unwrap();
        let pair = extract_pair(&PolyhedralLogConcave::scaled_indicator(k, 1.7));
        let (closed, _) = solve_polyhedral(&pair, &SolverConfig::default()).unwrap();
        let (state, trace) = solve_polyhedral_state(&pair, &SolverConfig::default()).unwrap();
        assert!(trace.converged);
        let newton = steiner_gauge(&state.function(&pair).unwrap()).unwrap();
        assert_abs_diff_eq!(closed.max_value(), newton.max_value(), epsilon = 1e-8);
        let (a, b) = (closed.domain_polygon().unwrap(), newton.domain_polygon().unwrap());
        assert!(a.hausdorff_distance(b) < 1e-8);
    }

    #[test]
    fn linf_offsets_are_zero() {
        let (state, _) = solve_polyhedral_state(&linf_pair(), &SolverConfig::default()).unwrap();
        for c in &state.offsets {
            assert_abs_diff_eq!(*c, 0.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn analytic_jacobian_matches_finite_differences() {
        let k = Polygon::new(vec![Vec2::new(-1.0, -0.8), Vec2::new(1.4, -0.5), Vec2::new(0.9, 1.1), Vec2::new(-0.7, 0.9)]).unwrap();
        let f = PolyhedralLogConcave::new(
            vec![
                AffinePiece::new(Vec2::new(0.5, 0.1), 0.0),
                AffinePiece::new(Vec2::new(-0.4, 0.3), 0.1),
                AffinePiece::new(Vec2::new(0.1, -0.6), -0.1),
            ],
            Domain::Bounded(k.clone()),
        )
        .unwrap();
        let pair = extract_pair(&f);
        assert_eq!(pair.mu().len(), 3);
        let offsets = pair.mu().iter().map(|(z, _)| f.pieces().iter().find(|p| p.gradient == *z).unwrap().offset).collect();
        let supports = pair.nu().iter().map(|(t, _)| k.support(t)).collect();
        let state = PolyhedralState { offsets, supports };
        let r = residual_at(&pair, &state).unwrap();
        assert!(residual_norm(&r) < 1e-12);
        let ja = jacobian_at(&pair, &state, JacobianMode::Analytic).unwrap();
        let jf = jacobian_at(&pair, &state, JacobianMode::FiniteDifference).unwrap();
        assert!((&ja - &jf).amax() < 1e-6, "{ja} vs {jf}");
    }
}
