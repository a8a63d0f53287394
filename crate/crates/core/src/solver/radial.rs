//! Shooting solver for radial pairs.
//!
//! Gradient atoms `(g_k, a_k)` sorted by `g` become consecutive annuli on
//! which the profile has slope `g_k` and carries mass `a_k`. Given `w(0)`
//! the annuli are laid out one after another; `w(0)` is then adjusted until
//! the last condition holds (tail mass when there is no boundary mass, the
//! boundary term otherwise).

use super::{SolveTrace, SolverConfig};
use crate::error::{Error, Result};
use crate::logconcave::integrate::{power_exp_integral, sphere_area};
use crate::logconcave::RadialLogConcave;
use crate::measures::RadialPair;

/// Outcome of laying out all annuli for one value of `w(0)`.
enum Shot {
    /// Residual of the final condition (log of achieved over wanted).
    Residual(f64, Vec<(f64, f64)>),
    /// Some annulus cannot hold its mass: `w(0)` is too large.
    TooLittleMass,
}

struct Problem<'a> {
    pair: &'a RadialPair,
    area: f64,
    k: u32,
}

impl Problem<'_> {
    /// Outer radius `s` of the annulus starting at `start` with slope `g`,
    /// value `w_start`, holding `mass`. `None` if even `s = ∞` is too small.
    fn annulus_end(&self, start: f64, w_start: f64, g: f64, mass: f64) -> Option<f64> {
        let want = mass * w_start.exp() / self.area;
        let integral = |s: f64| power_exp_integral(self.k, g, start, Some(s));
        if g > 0.0 && power_exp_integral(self.k, g, start, None) <= want {
            return None;
        }
        let mut lo = start;
        let mut hi = start + (want / (start.max(1e-300)).powi(self.k as i32)).min(1.0).max(1e-3);
        if !hi.is_finite() {
            hi = start + 1.0;
        }
        while integral(hi) < want {
            lo = hi;
            hi = start + 2.0 * (hi - start);
            if !hi.is_finite() {
                return None;
            }
        }
        // Safeguarded Newton on a monotone function.
        let mut s = 0.5 * (lo + hi);
        for _ in 0..200 {
            let val = integral(s) - want;
            if val > 0.0 {
                hi = s;
            } else {
                lo = s;
            }
            let deriv = s.powi(self.k as i32) * (-g * (s - start)).exp();
            let mut next = if deriv > 0.0 { s - val / deriv } else { f64::NAN };
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - s).abs() <= 1e-15 * s.abs().max(1e-300) || hi - lo <= 1e-15 * hi {
                return Some(next);
            }
            s = next;
        }
        Some(s)
    }

    fn shoot(&self, w0: f64) -> Shot {
        let atoms = self.pair.grad();
        let last = atoms.len() - 1;
        let bounded = self.pair.boundary() > 0.0;
        let mut knots = vec![(0.0, w0)];
        let (mut r, mut w) = (0.0, w0);
        for (idx, &(g, a)) in atoms.iter().enumerate() {
            if idx == last && !bounded {
                let tail = self.area * (-w).exp() * power_exp_integral(self.k, g, r, None);
                return Shot::Residual((tail / a).ln(), knots);
            }
            let Some(end) = self.annulus_end(r, w, g, a) else { return Shot::TooLittleMass };
            w += g * (end - r);
            r = end;
            knots.push((r, w));
        }
        let boundary = (-w).exp() * self.area * r.powi(self.k as i32);
        Shot::Residual((boundary / self.pair.boundary()).ln(), knots)
    }
}

/// Solves for the radial profile with the given pair. The residual of the
/// final condition decreases in `w(0)`, so a bracket is grown and then
/// shrunk by bisection with secant steps.
pub fn solve_radial(pair: &RadialPair, cfg: &SolverConfig) -> Result<(RadialLogConcave, SolveTrace)> {
    cfg.validate()?;
    let problem = Problem { pair, area: sphere_area(pair.dim()), k: pair.dim() as u32 - 1 };
    let mut trace = SolveTrace::default();
    // Residual as a function of w0, with "too little mass" read as -∞.
    let eval = |w0: f64| match problem.shoot(w0) {
        Shot::Residual(r, _) => r,
        Shot::TooLittleMass => f64::NEG_INFINITY,
    };
    let mut lo = -(pair.mu_total().ln().abs() + 1.0);
    let mut hi = -lo;
    let mut step = 1.0;
    let mut r_lo = eval(lo);
    while !(r_lo > 0.0) {
        lo -= step;
        step *= 2.0;
        r_lo = eval(lo);
        if step > 1e6 {
            return Err(Error::InfeasibleBoundary("no profile height gives enough mass".into()));
        }
    }
    step = 1.0;
    let mut r_hi = eval(hi);
    while r_hi > 0.0 {
        hi += step;
        step *= 2.0;
        r_hi = eval(hi);
        if step > 1e6 {
            return Err(Error::InfeasibleBoundary("no profile height is small enough".into()));
        }
    }
    for _ in 0..400 {
        let secant = lo - r_lo * (hi - lo) / (r_hi - r_lo);
        let mid = if r_hi.is_finite() && secant > lo + 0.05 * (hi - lo) && secant < hi - 0.05 * (hi - lo) {
            secant
        } else {
            0.5 * (lo + hi)
        };
        let r = eval(mid);
        trace.push(r.abs(), hi - lo);
        if r > 0.0 {
            lo = mid;
            r_lo = r;
        } else {
            hi = mid;
            r_hi = r;
        }
        if r.abs() <= 1e-14 || hi - lo <= 1e-15 * (1.0 + lo.abs()) {
            break;
        }
    }
    // The positive end is always feasible; at convergence both ends agree.
    let w0 = if r_hi.is_finite() && r_hi.abs() < r_lo { hi } else { lo };
    let Shot::Residual(r, knots) = problem.shoot(w0) else {
        return Err(Error::NoConvergence(Box::new(trace)));
    };
    trace.final_residuals = vec![r];
    if r.abs() > cfg.residual_tol {
        return Err(Error::NoConvergence(Box::new(trace)));
    }
    trace.converged = true;
    let tail = if pair.boundary() > 0.0 { None } else { Some(pair.grad().last().unwrap().0) };
    let knots = dedup_knots(knots);
    let f = RadialLogConcave::new(pair.dim(), knots, tail)?;
    let slopes: Vec<f64> = f.segments().iter().map(|s| s.slope).collect();
    assert!(slopes.windows(2).all(|w| w[1] >= w[0] - 1e-9 * (1.0 + w[0].abs())), "radial solution must be convex");
    Ok((f, trace))
}

/// Drops zero-width annuli produced by vanishing masses.
fn dedup_knots(knots: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(knots.len());
    for k in knots {
        match out.last() {
            Some(last) if k.0 <= last.0 => {}
            _ => out.push(k),
        }
    }
    out
}
