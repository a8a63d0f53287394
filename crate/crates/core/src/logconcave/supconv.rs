//! Grid oracle for the mass of a sup-convolution `f ⋆ t·g`, used to check
//! first variations by finite differences.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::LogConcave;
use crate::convex2d::{Polygon, Vec2};
use crate::error::{Error, Result};

/// Splits a flat `g = c 1_K` into `(c, K)`.
fn flat_parts(g: &LogConcave) -> Result<(f64, Polygon)> {
    if !g.is_flat() || g.dim() != 2 {
        return Err(Error::Unsupported("sup-convolution oracle needs g = c·1_K in the plane".into()));
    }
    match g {
        LogConcave::Polyhedral(p) => Ok((p.max_value(), p.domain_polygon().unwrap().clone())),
        LogConcave::Radial(r) => Ok((r.max_value(), Polygon::regular(256, r.support_radius().unwrap()))),
    }
}

/// Closed boundary of a polygon parametrized by arclength.
struct Perimeter {
    vertices: Vec<Vec2>,
    cumulative: Vec<f64>,
}

impl Perimeter {
    fn new(p: &Polygon) -> Self {
        let vertices = p.vertices().to_vec();
        let mut cumulative = vec![0.0];
        for (a, b) in p.edges() {
            cumulative.push(cumulative.last().unwrap() + (b - a).norm());
        }
        Perimeter { vertices, cumulative }
    }

    fn length(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    fn point(&self, s: f64) -> Vec2 {
        let len = self.length();
        let s = s.rem_euclid(len);
        let i = self.cumulative.partition_point(|c| *c <= s).clamp(1, self.vertices.len()) - 1;
        let a = self.vertices[i];
        let b = self.vertices[(i + 1) % self.vertices.len()];
        let seg = self.cumulative[i + 1] - self.cumulative[i];
        a + (b - a) * ((s - self.cumulative[i]) / seg)
    }
}

const COARSE_PROBES: usize = 64;

/// Largest value of `f` on `x - ∂(tK)`: the best of [`COARSE_PROBES`]
/// evenly spaced samples, refined by golden-section search on the two
/// neighbouring arcs.
fn boundary_max(f: &LogConcave, x: &Vec2, rim: &Perimeter) -> f64 {
    let len = rim.length();
    let step = len / COARSE_PROBES as f64;
    let at = |s: f64| f.eval(&(x - rim.point(s)));
    let (mut best_s, mut best) = (0.0, f64::NEG_INFINITY);
    for i in 0..COARSE_PROBES {
        let s = step * i as f64;
        let v = at(s);
        if v > best {
            best = v;
            best_s = s;
        }
    }
    let golden = 0.5 * (5f64.sqrt() - 1.0);
    for (mut a, mut b) in [(best_s - step, best_s), (best_s, best_s + step)] {
        let mut c = b - golden * (b - a);
        let mut d = a + golden * (b - a);
        let (mut fc, mut fd) = (at(c), at(d));
        while b - a > 1e-6 * step {
            if fc >= fd {
                b = d;
                d = c;
                fd = fc;
                c = b - golden * (b - a);
                fc = at(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + golden * (b - a);
                fd = at(d);
            }
        }
        best = best.max(fc).max(fd);
    }
    best
}

/// Midpoint-rule mass of `f ⋆ t·g` on a grid of spacing `h`, for
/// `g = c 1_K`. At each node `x` the value is `c^t max_{y ∈ tK} f(x - y)`:
/// the global maximum of `f` when its argmax lies in `x - tK`, otherwise the
/// maximum over the boundary of `x - tK` (log-concave functions have a
/// single maximum on convex sets). Cell-centered nodes make the error
/// `O(h)` at discontinuities.
pub fn sup_convolution_mass(f: &LogConcave, g: &LogConcave, t: f64, h: f64) -> Result<f64> {
    if !(t >= 0.0) || !(h > 0.0) {
        return Err(Error::validation("grid", "need t >= 0 and h > 0"));
    }
    if f.dim() != 2 {
        return Err(Error::Unsupported("sup-convolution oracle is planar".into()));
    }
    let (c, k) = flat_parts(g)?;
    let tk = (t > 0.0).then(|| k.scale(t));
    let rim = tk.as_ref().map(Perimeter::new);
    let halfplanes: Vec<(Vec2, f64)> = tk
        .as_ref()
        .map(|tk| tk.edge_normals().into_iter().zip(tk.vertices()).map(|((u, _), v)| (u, u.dot(v))).collect())
        .unwrap_or_default();
    let top = f.max_value();
    let star = f.argmax();
    let reach = tk.as_ref().map_or(0.0, |tk| tk.vertices().iter().map(|v| v.norm()).fold(0.0, f64::max));
    let half = f.bounding_half_width() + reach + h;
    let n = (2.0 * half / h).ceil() as usize;
    let origin = -half + 0.5 * h;
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let x0 = origin + h * i as f64;
            let mut sum = 0.0;
            for j in 0..n {
                let x = Vec2::new(x0, origin + h * j as f64);
                sum += match &rim {
                    None => f.eval(&x),
                    Some(rim) => {
                        let d = x - star;
                        if halfplanes.iter().all(|(u, s)| u.dot(&d) <= *s) {
                            top
                        } else {
                            boundary_max(f, &x, rim)
                        }
                    }
                };
            }
            sum
        })
        .collect();
    Ok(c.powf(t) * h * h * rows.iter().sum::<f64>())
}

/// Right derivative at `t = 0` of `J(f ⋆ t·g)` from a least-squares
/// quadratic through grid masses at the given `ts`. For `g = 1_B` the exact
/// mass is quadratic in `t`, so the fit carries only grid error.
pub fn sup_convolution_slope(f: &LogConcave, g: &LogConcave, ts: &[f64], h: f64) -> Result<f64> {
    if ts.len() < 3 {
        return Err(Error::validation("ts", "at least three step sizes are needed"));
    }
    let masses = ts.iter().map(|t| sup_convolution_mass(f, g, *t, h)).collect::<Result<Vec<_>>>()?;
    let a = DMatrix::from_fn(ts.len(), 3, |r, c| ts[r].powi(c as i32));
    let b = DVector::from_vec(masses);
    let coef = a.svd(true, true).solve(&b, 1e-14).map_err(|e| Error::Unsupported(e.to_string()))?;
    Ok(coef[1])
}
