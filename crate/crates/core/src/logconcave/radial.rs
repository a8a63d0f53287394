use serde::{Deserialize, Serialize};

use super::integrate::{gauss_legendre, power_exp_integral, sphere_area};
use crate::convex2d::{Polygon, Vec2};
use crate::error::{Error, Result};

/// Edge count of the polygons standing in for disks.
pub const DISK_EDGES: usize = 1024;

/// `f(x) = e^{-w(|x|)}` in `R^n` with `w` convex, nondecreasing and
/// piecewise linear through `knots`; past the last knot `w` continues with
/// `tail_slope` or jumps to `+∞`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RadialDoc", into = "RadialDoc")]
pub struct RadialLogConcave {
    dim: usize,
    knots: Vec<(f64, f64)>,
    tail_slope: Option<f64>,
}

/// Straight piece of the profile: `w(r) = w_start + slope (r - start)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub end: Option<f64>,
    pub w_start: f64,
    pub slope: f64,
}

impl Segment {
    /// `∫_start^end r^{k} e^{-w(r)} dr`.
    pub fn power_integral(&self, k: u32) -> f64 {
        (-self.w_start).exp() * power_exp_integral(k, self.slope, self.start, self.end)
    }
}

const SLOPE_TOL: f64 = 1e-12;

impl RadialLogConcave {
    pub fn new(dim: usize, knots: Vec<(f64, f64)>, tail_slope: Option<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::validation("dim", "dimension must be at least 1"));
        }
        if knots.is_empty() {
            return Err(Error::validation("knots", "at least one knot is required"));
        }
        if knots[0].0 != 0.0 {
            return Err(Error::validation("knots", "first knot must sit at r = 0"));
        }
        if knots.iter().any(|(r, w)| !r.is_finite() || !w.is_finite()) {
            return Err(Error::validation("knots", "non-finite value"));
        }
        let mut prev_slope = 0.0;
        for pair in knots.windows(2) {
            let (r0, w0) = pair[0];
            let (r1, w1) = pair[1];
            if r1 <= r0 {
                return Err(Error::validation("knots", "radii must increase strictly"));
            }
            let s = (w1 - w0) / (r1 - r0);
            let tol = SLOPE_TOL * (1.0 + s.abs());
            if s < -tol {
                return Err(Error::validation("monotonicity", format!("profile decreases at r = {r0}")));
            }
            if s < prev_slope - tol {
                return Err(Error::validation("convexity", format!("slope drops at r = {r0}")));
            }
            prev_slope = s.max(prev_slope);
        }
        match tail_slope {
            Some(t) => {
                if !(t > 0.0) || !t.is_finite() {
                    return Err(Error::validation("tail_slope", "must be positive and finite"));
                }
                if t < prev_slope - SLOPE_TOL * (1.0 + t) {
                    return Err(Error::validation("convexity", "tail slope below the last segment slope"));
                }
            }
            None => {
                if knots.len() < 2 {
                    return Err(Error::validation("knots", "bounded profile needs a positive support radius"));
                }
            }
        }
        Ok(RadialLogConcave { dim, knots, tail_slope })
    }

    /// `height · 1_{radius B}`.
    pub fn ball_indicator(dim: usize, radius: f64, height: f64) -> Result<Self> {
        if !(radius > 0.0 && height > 0.0) {
            return Err(Error::validation("ball", "radius and height must be positive"));
        }
        let w = -height.ln();
        Self::new(dim, vec![(0.0, w), (radius, w)], None)
    }

    /// `e^{-slope |x|}`.
    pub fn cone(dim: usize, slope: f64) -> Result<Self> {
        Self::new(dim, vec![(0.0, 0.0)], Some(slope))
    }

    /// Piecewise-linear interpolation of `|x|^2 / 2` with knots every `step`
    /// up to `r_max`, continued linearly with slope `r_max`.
    pub fn gaussian(dim: usize, step: f64, r_max: f64) -> Result<Self> {
        let n = (r_max / step).round() as usize;
        let knots = (0..=n)
            .map(|k| {
                let r = r_max * k as f64 / n as f64;
                (r, 0.5 * r * r)
            })
            .collect();
        Self::new(dim, knots, Some(r_max))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn tail_slope(&self) -> Option<f64> {
        self.tail_slope
    }

    /// `None` for profiles with an infinite tail.
    pub fn support_radius(&self) -> Option<f64> {
        match self.tail_slope {
            Some(_) => None,
            None => Some(self.knots.last().unwrap().0),
        }
    }

    pub fn segments(&self) -> Vec<Segment> {
        let mut out: Vec<Segment> = self
            .knots
            .windows(2)
            .map(|p| Segment {
                start: p[0].0,
                end: Some(p[1].0),
                w_start: p[0].1,
                slope: ((p[1].1 - p[0].1) / (p[1].0 - p[0].0)).max(0.0),
            })
            .collect();
        if let Some(t) = self.tail_slope {
            let (r, w) = *self.knots.last().unwrap();
            out.push(Segment { start: r, end: None, w_start: w, slope: t });
        }
        out
    }

    /// `w(r)`, `+∞` beyond a finite support radius.
    pub fn profile(&self, r: f64) -> f64 {
        let r = r.abs();
        let (r_last, w_last) = *self.knots.last().unwrap();
        if r > r_last {
            return match self.tail_slope {
                Some(t) => w_last + t * (r - r_last),
                None => f64::INFINITY,
            };
        }
        let k = self.knots.partition_point(|(rk, _)| *rk <= r).max(1);
        if k >= self.knots.len() {
            return w_last;
        }
        let (r0, w0) = self.knots[k - 1];
        let (r1, w1) = self.knots[k];
        w0 + (w1 - w0) * (r - r0) / (r1 - r0)
    }

    pub fn eval_radius(&self, r: f64) -> f64 {
        (-self.profile(r)).exp()
    }

    /// Planar evaluation; only meaningful for `dim == 2`.
    pub fn eval(&self, x: &Vec2) -> f64 {
        self.eval_radius(x.norm())
    }

    pub fn max_value(&self) -> f64 {
        (-self.knots[0].1).exp()
    }

    /// `n ω_n ∫ r^{n-1} e^{-w}` restricted to one segment.
    pub fn segment_mass(&self, seg: &Segment) -> f64 {
        sphere_area(self.dim) * seg.power_integral(self.dim as u32 - 1)
    }

    pub fn mass(&self) -> f64 {
        self.segments().iter().map(|s| self.segment_mass(s)).sum()
    }

    /// `∫ f log f - J log J`.
    pub fn entropy(&self) -> f64 {
        let k = self.dim as u32 - 1;
        let mut moment = 0.0;
        let mut mass = 0.0;
        for seg in self.segments() {
            let i0 = seg.power_integral(k);
            let i1 = seg.power_integral(k + 1);
            // w(r) = (w_start - slope·start) + slope·r
            moment -= (seg.w_start - seg.slope * seg.start) * i0 + seg.slope * i1;
            mass += i0;
        }
        let area = sphere_area(self.dim);
        let (j, m) = (area * mass, area * moment);
        m - j * j.ln()
    }

    /// `h_f(y)` as a function of `s = |y|`.
    pub fn support_at(&self, s: f64) -> f64 {
        let s = s.abs();
        if let Some(t) = self.tail_slope {
            if s > t * (1.0 + 1e-12) {
                return f64::INFINITY;
            }
        }
        self.knots.iter().map(|(r, w)| s * r - w).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn support_function(&self, y: &Vec2) -> f64 {
        self.support_at(y.norm())
    }

    /// Radius of `{f >= t}`, `None` when the level set is empty.
    pub fn level_radius(&self, t: f64) -> Option<f64> {
        let level = -t.ln();
        let w0 = self.knots[0].1;
        if level < w0 - 1e-14 * (1.0 + w0.abs()) {
            return None;
        }
        for seg in self.segments() {
            let w_end = seg.end.map_or(f64::INFINITY, |e| seg.w_start + seg.slope * (e - seg.start));
            if level <= w_end {
                if seg.slope <= 0.0 {
                    return Some(seg.end.unwrap());
                }
                let r = seg.start + (level - seg.w_start) / seg.slope;
                return Some(seg.end.map_or(r, |e| r.min(e)));
            }
        }
        self.support_radius()
    }

    /// `{f >= t}` as a regular polygon with `DISK_EDGES` vertices on the
    /// level circle (planar only).
    pub fn superlevel(&self, t: f64) -> Result<Polygon> {
        if self.dim != 2 {
            return Err(Error::Unsupported("superlevel sets are planar".into()));
        }
        match self.level_radius(t) {
            Some(r) if r > 0.0 => Ok(Polygon::regular(DISK_EDGES, r)),
            _ => Err(Error::EmptyLevel),
        }
    }

    /// `λ f`.
    pub fn scale_values(&self, lambda: f64) -> Self {
        assert!(lambda > 0.0);
        let shift = lambda.ln();
        RadialLogConcave {
            dim: self.dim,
            knots: self.knots.iter().map(|(r, w)| (*r, w - shift)).collect(),
            tail_slope: self.tail_slope,
        }
    }

    /// `W_1 = ∫_0^{max f} S({f >= s}) ds`, integrated numerically in
    /// `t = -log s` along each profile segment.
    pub fn layer_cake_w1(&self) -> f64 {
        let area = sphere_area(self.dim);
        let p = self.dim as i32 - 1;
        let gl = gauss_legendre(24);
        let mut total = 0.0;
        if let Some(r) = self.support_radius() {
            // Levels below f(R) see the whole ball.
            let w_r = self.knots.last().unwrap().1;
            total += area * r.powi(p) * (-w_r).exp();
        }
        let mut integrate = |t0: f64, t1: f64, rho: &dyn Fn(f64) -> f64| {
            let (mid, half) = (0.5 * (t0 + t1), 0.5 * (t1 - t0));
            for (x, w) in &gl {
                let t = mid + half * x;
                total += half * w * area * rho(t).powi(p) * (-t).exp();
            }
        };
        for seg in self.segments() {
            if seg.slope <= 0.0 {
                continue;
            }
            let rho = |t: f64| seg.start + (t - seg.w_start) / seg.slope;
            match seg.end {
                Some(e) => integrate(seg.w_start, seg.w_start + seg.slope * (e - seg.start), &rho),
                None => {
                    // e^{-t} has dropped below 1e-40 relative after 92 units.
                    let mut t = seg.w_start;
                    for _ in 0..46 {
                        integrate(t, t + 2.0, &rho);
                        t += 2.0;
                    }
                }
            }
        }
        total
    }
}

#[derive(Serialize, Deserialize)]
struct RadialDoc {
    dim: usize,
    knots: Vec<(f64, f64)>,
    tail_slope: Option<f64>,
}

impl TryFrom<RadialDoc> for RadialLogConcave {
    type Error = Error;
    fn try_from(d: RadialDoc) -> Result<Self> {
        RadialLogConcave::new(d.dim, d.knots, d.tail_slope)
    }
}

impl From<RadialLogConcave> for RadialDoc {
    fn from(f: RadialLogConcave) -> Self {
        RadialDoc { dim: f.dim, knots: f.knots, tail_slope: f.tail_slope }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::PI;

    #[test]
    fn cone_mass_and_support() {
        let f = RadialLogConcave::cone(2, 1.0).unwrap();
        assert_relative_eq!(f.mass(), 2.0 * PI, max_relative = 1e-12);
        assert_abs_diff_eq!(f.eval(&Vec2::new(0.6, 0.8)), (-1.0f64).exp(), epsilon = 1e-15);
        assert_eq!(f.support_at(0.7), 0.0);
        assert!(f.support_at(1.01).is_infinite());
        // ∫ f log f = -2π ∫ r^2 e^{-r} = -4π
        assert_relative_eq!(f.entropy(), -4.0 * PI - 2.0 * PI * (2.0 * PI).ln(), max_relative = 1e-12);
    }

    #[test]
    fn gaussian_constants() {
        let f = RadialLogConcave::gaussian(2, 1e-4, 12.0).unwrap();
        assert_abs_diff_eq!(f.mass(), 2.0 * PI, epsilon = 1e-8);
        let ent = -2.0 * PI - 2.0 * PI * (2.0 * PI).ln();
        assert_abs_diff_eq!(f.entropy(), ent, epsilon = 1e-6);
        for s in [0.0, 0.5, 1.3, 4.0] {
            assert_abs_diff_eq!(f.support_at(s), 0.5 * s * s, epsilon = 1e-8);
        }
        assert_abs_diff_eq!(f.level_radius((-0.5f64).exp()).unwrap(), 1.0, epsilon = 1e-8);
    }

    #[test]
    fn ball_indicator() {
        let f = RadialLogConcave::ball_indicator(2, 1.5, 2.0).unwrap();
        assert_relative_eq!(f.mass(), 2.0 * PI * 1.5 * 1.5, max_relative = 1e-14);
        assert_eq!(f.support_radius(), Some(1.5));
        assert_eq!(f.eval(&Vec2::new(1.6, 0.0)), 0.0);
        let a = PI * 2.25;
        assert_relative_eq!(f.entropy(), -2.0 * a * a.ln(), max_relative = 1e-12);
        assert_relative_eq!(f.layer_cake_w1(), 2.0 * 2.0 * PI * 1.5, max_relative = 1e-13);
        assert_relative_eq!(f.support_at(2.0), 3.0 + 2f64.ln(), max_relative = 1e-14);
    }

    #[test]
    fn higher_dimensional_mass() {
        // n = 3, w = r: 4π Γ(3) = 8π
        let f = RadialLogConcave::cone(3, 1.0).unwrap();
        assert_relative_eq!(f.mass(), 8.0 * PI, max_relative = 1e-12);
        // n = 1, ball of radius 2: length 4
        let g = RadialLogConcave::ball_indicator(1, 2.0, 1.0).unwrap();
        assert_relative_eq!(g.mass(), 4.0, max_relative = 1e-14);
    }

    #[test]
    fn rejects_bad_profiles() {
        assert!(matches!(
            RadialLogConcave::new(2, vec![(0.0, 0.0), (1.0, 2.0), (2.0, 2.5)], None),
            Err(Error::Validation { field, .. }) if field == "convexity"
        ));
        assert!(RadialLogConcave::new(2, vec![(0.0, 1.0), (1.0, 0.0)], None).is_err());
        assert!(RadialLogConcave::new(2, vec![(0.1, 0.0), (1.0, 0.0)], None).is_err());
        assert!(RadialLogConcave::new(2, vec![(0.0, 0.0)], None).is_err());
    }

    #[test]
    fn layer_cake_matches_slope_weighted_mass() {
        let f = RadialLogConcave::new(2, vec![(0.0, 0.0), (0.5, 0.1), (1.5, 1.6)], Some(2.0)).unwrap();
        let direct: f64 = f.segments().iter().map(|s| s.slope * f.segment_mass(s)).sum();
        assert_relative_eq!(f.layer_cake_w1(), direct, max_relative = 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let f = RadialLogConcave::cone(2, 1.5).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(serde_json::from_str::<RadialLogConcave>(&s).unwrap(), f);
    }
}
