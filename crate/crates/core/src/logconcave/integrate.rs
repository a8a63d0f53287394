//! Closed-form integrals of exponentials of affine functions.
//!
//! Over a triangle `T` with vertex values `t_0, t_1, t_2` of an affine `ℓ`,
//! `∫_T e^ℓ = 2|T| e[t_0, t_1, t_2]` where `e[...]` is the divided
//! difference of `exp`. Divided differences with clustered nodes are summed
//! as a power series, which keeps the formula accurate as `ℓ` flattens out.

use std::f64::consts::PI;

use crate::convex2d::{cross, Polygon, Vec2};

const SERIES_SPAN: f64 = 1.0;
const SERIES_TERMS: usize = 40;

/// Divided difference of `exp` at the given nodes (repeats allowed, at most
/// eight nodes).
pub fn exp_divided_difference(nodes: &[f64]) -> f64 {
    assert!(!nodes.is_empty() && nodes.len() <= 8);
    let mut sorted = [0.0; 8];
    sorted[..nodes.len()].copy_from_slice(nodes);
    let s = &mut sorted[..nodes.len()];
    s.sort_by(f64::total_cmp);
    dd_sorted(s)
}

fn dd_sorted(t: &[f64]) -> f64 {
    let k = t.len() - 1;
    if k == 0 {
        return t[0].exp();
    }
    let span = t[k] - t[0];
    if span <= SERIES_SPAN {
        return t[0].exp() * dd_series(t);
    }
    (dd_sorted(&t[1..]) - dd_sorted(&t[..k])) / span
}

/// `e[t_0..t_k] = e^{t_0} Σ_m h_m(δ_1..δ_k) / (m+k)!` with `δ_i = t_i - t_0`
/// and `h_m` the complete homogeneous symmetric polynomials.
fn dd_series(t: &[f64]) -> f64 {
    let k = t.len() - 1;
    let mut h = [0.0; SERIES_TERMS];
    h[0] = 1.0;
    for &ti in &t[1..] {
        let d = ti - t[0];
        for m in 1..SERIES_TERMS {
            h[m] += d * h[m - 1];
        }
    }
    let mut fact = (1..=k).map(|i| i as f64).product::<f64>();
    let mut sum = 0.0;
    for (m, hm) in h.iter().enumerate() {
        if m > 0 {
            fact *= (m + k) as f64;
        }
        let term = hm / fact;
        sum += term;
        if m > 4 && term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// `(∫_T e^ℓ, ∫_T ℓ e^ℓ)` for a triangle with vertex values `t`.
pub fn triangle_integrals(p: [Vec2; 3], t: [f64; 3]) -> (f64, f64) {
    let twice_area = cross(&(p[1] - p[0]), &(p[2] - p[0])).abs();
    let base = twice_area * exp_divided_difference(&t);
    // d/ds ∫ e^{sℓ} at s = 1; the derivative of a divided difference in a
    // node is the divided difference with that node repeated.
    let mut moment = 0.0;
    for &tk in &t {
        moment += tk * exp_divided_difference(&[t[0], t[1], t[2], tk]);
    }
    (base, twice_area * moment)
}

/// `∫ e^ℓ` along a segment of length `len` with end values `t0`, `t1`.
pub fn segment_integral(len: f64, t0: f64, t1: f64) -> f64 {
    len * exp_divided_difference(&[t0, t1])
}

/// `(∫_P e^{c - <a,x>}, ∫_P (c - <a,x>) e^{c - <a,x>})` over a convex vertex
/// ring, fanned from the vertex average.
pub(crate) fn ring_integrals(vertices: &[Vec2], a: &Vec2, c: f64) -> (f64, f64) {
    let n = vertices.len();
    let center = vertices.iter().sum::<Vec2>() / n as f64;
    let value = |x: &Vec2| c - a.dot(x);
    let tc = value(&center);
    let mut mass = 0.0;
    let mut moment = 0.0;
    for i in 0..n {
        let p = vertices[i];
        let q = vertices[(i + 1) % n];
        let (m, mo) = triangle_integrals([center, p, q], [tc, value(&p), value(&q)]);
        mass += m;
        moment += mo;
    }
    (mass, moment)
}

/// Exact `∫_P e^{-(<a,x> - c)} dx`.
pub fn integrate_exp_affine(a: &Vec2, c: f64, p: &Polygon) -> f64 {
    ring_integrals(p.vertices(), a, c).0
}

/// `∫_a^b r^k e^{-α (r - a)} dr`, with `b = None` meaning infinity (then
/// `α > 0` is required).
pub fn power_exp_integral(k: u32, alpha: f64, a: f64, b: Option<f64>) -> f64 {
    // Expand r^k = (a + s)^k; every term is nonnegative, so no cancellation.
    let len = b.map(|b| b - a);
    let mut sum = 0.0;
    let mut binom = 1.0;
    for j in 0..=k {
        if j > 0 {
            binom = binom * (k - j + 1) as f64 / j as f64;
        }
        let apow = if k - j == 0 { 1.0 } else { a.powi((k - j) as i32) };
        if apow == 0.0 {
            continue;
        }
        sum += binom * apow * shifted_moment(j, alpha, len);
    }
    sum
}

/// `I_j = ∫_0^L s^j e^{-α s} ds`.
fn shifted_moment(j: u32, alpha: f64, len: Option<f64>) -> f64 {
    let jf = j as f64;
    let j_fact: f64 = (1..=j).map(|i| i as f64).product();
    let Some(len) = len else {
        assert!(alpha > 0.0, "infinite segment needs a positive slope");
        return j_fact / alpha.powi(j as i32 + 1);
    };
    if len <= 0.0 {
        return 0.0;
    }
    let x = alpha * len;
    if x <= 1.0 {
        // Alternating series Σ (-x)^m / (m! (j+m+1)); |x| <= 1 keeps it tame.
        let mut term = 1.0;
        let mut sum = 1.0 / (jf + 1.0);
        for m in 1..60 {
            term *= -x / m as f64;
            let add = term / (jf + m as f64 + 1.0);
            sum += add;
            if add.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        return len.powi(j as i32 + 1) * sum;
    }
    j_fact / alpha.powi(j as i32 + 1) * regularized_lower_gamma(j + 1, x)
}

/// `P(s, x)` for integer `s >= 1`.
fn regularized_lower_gamma(s: u32, x: f64) -> f64 {
    if x > 40.0 + 2.0 * s as f64 {
        let mut term = 1.0;
        let mut q = 1.0;
        for i in 1..s {
            term *= x / i as f64;
            q += term;
        }
        return 1.0 - (-x).exp() * q;
    }
    // Positive series e^{-x} Σ_i x^{s+i} / (s+i)!.
    let mut term = (-x).exp();
    for i in 1..=s {
        term *= x / i as f64;
    }
    let mut sum = term;
    let mut i = s;
    loop {
        i += 1;
        term *= x / i as f64;
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    sum
}

/// Volume of the unit ball in dimension `n`.
pub fn ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / n as f64 * ball_volume(n - 2),
    }
}

/// `n ω_n`, the area of the unit sphere in `R^n`.
pub fn sphere_area(n: usize) -> f64 {
    n as f64 * ball_volume(n)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}
