use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use super::integrate::{ring_integrals, segment_integral};
use crate::convex2d::{cross, reflect_point, EdgeLabel, LabeledPolygon, Polygon, Vec2};
use crate::error::{Error, Result};

/// `x ↦ <gradient, x> - offset`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffinePiece {
    pub gradient: Vec2,
    pub offset: f64,
}

impl AffinePiece {
    pub fn new(gradient: Vec2, offset: f64) -> Self {
        AffinePiece { gradient, offset }
    }

    #[inline]
    pub fn value(&self, x: &Vec2) -> f64 {
        self.gradient.dot(x) - self.offset
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    Bounded(Polygon),
    /// All of the plane; requires the origin inside the gradient hull.
    Unbounded,
}

/// `f = e^{-φ}` with `φ = max_i (<z_i, x> - c_i)` on a polygon or on the
/// whole plane.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyhedralLogConcave {
    pieces: Vec<AffinePiece>,
    domain: Domain,
}

/// Region where one piece attains the maximum.
#[derive(Clone, Debug)]
pub struct Cell {
    pub piece: usize,
    pub(crate) region: LabeledPolygon,
}

impl Cell {
    pub fn vertices(&self) -> &[Vec2] {
        &self.region.vertices
    }

    pub fn area(&self) -> f64 {
        self.region.area()
    }

    pub fn polygon(&self) -> Result<Polygon> {
        Polygon::new(self.region.vertices.clone())
    }
}

#[derive(Clone, Debug)]
pub struct CellComplex {
    pub cells: Vec<Cell>,
    /// Pieces that are nowhere the maximum.
    pub dropped: Vec<usize>,
}

impl CellComplex {
    pub fn total_area(&self) -> f64 {
        self.cells.iter().map(Cell::area).sum()
    }
}

/// Tail margin (in units of `φ`) beyond which unbounded cells are cut off.
const TRUNCATION_MARGIN: f64 = 50.0;

impl PolyhedralLogConcave {
    pub fn new(pieces: Vec<AffinePiece>, domain: Domain) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::validation("pieces", "at least one affine piece is required"));
        }
        for p in &pieces {
            if !p.gradient.x.is_finite() || !p.gradient.y.is_finite() || !p.offset.is_finite() {
                return Err(Error::validation("pieces", "non-finite coefficient"));
            }
        }
        let f = PolyhedralLogConcave { pieces, domain };
        if f.domain == Domain::Unbounded {
            f.coercivity_rate().ok_or(Error::CoercivityViolation)?;
        }
        Ok(f)
    }

    /// Skips validation; callers guarantee coercivity.
    pub(crate) fn from_parts(pieces: Vec<AffinePiece>, domain: Domain) -> Self {
        PolyhedralLogConcave { pieces, domain }
    }

    /// `1_K`.
    pub fn indicator(k: Polygon) -> Self {
        Self::scaled_indicator(k, 1.0)
    }

    /// `height · 1_K`.
    pub fn scaled_indicator(k: Polygon, height: f64) -> Self {
        assert!(height > 0.0);
        PolyhedralLogConcave {
            pieces: vec![AffinePiece::new(Vec2::zeros(), height.ln())],
            domain: Domain::Bounded(k),
        }
    }

    pub fn pieces(&self) -> &[AffinePiece] {
        &self.pieces
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn domain_polygon(&self) -> Option<&Polygon> {
        match &self.domain {
            Domain::Bounded(p) => Some(p),
            Domain::Unbounded => None,
        }
    }

    /// True for a constant multiple of an indicator.
    pub fn is_indicator(&self) -> bool {
        self.pieces.len() == 1 && self.pieces[0].gradient == Vec2::zeros() && self.domain != Domain::Unbounded
    }

    pub fn phi(&self, x: &Vec2) -> f64 {
        if let Domain::Bounded(p) = &self.domain {
            if !p.contains(x) {
                return f64::INFINITY;
            }
        }
        self.pieces.iter().map(|p| p.value(x)).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn eval(&self, x: &Vec2) -> f64 {
        (-self.phi(x)).exp()
    }

    /// Largest `α` with `φ(x) >= α|x| - max c`: the inradius of the gradient
    /// hull about the origin. `None` if the origin is not interior.
    pub fn coercivity_rate(&self) -> Option<f64> {
        let grads: Vec<Vec2> = self.pieces.iter().map(|p| p.gradient).collect();
        let hull = Polygon::convex_hull(&grads).ok()?;
        let rate = hull
            .edge_normals()
            .iter()
            .zip(hull.vertices())
            .map(|((u, _), v)| u.dot(v))
            .fold(f64::INFINITY, f64::min);
        (rate > 1e-12 * (1.0 + hull.diameter())).then_some(rate)
    }

    /// Half-width of the box that replaces the plane for unbounded domains;
    /// outside it `f < e^{-50} · max f`.
    pub fn truncation_half_width(&self) -> Option<f64> {
        match self.domain {
            Domain::Bounded(_) => None,
            Domain::Unbounded => {
                let alpha = self.coercivity_rate().expect("validated on construction");
                let (lo, hi) = self.offset_range();
                Some((hi - lo + TRUNCATION_MARGIN) / alpha)
            }
        }
    }

    fn offset_range(&self) -> (f64, f64) {
        let lo = self.pieces.iter().map(|p| p.offset).fold(f64::INFINITY, f64::min);
        let hi = self.pieces.iter().map(|p| p.offset).fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    pub(crate) fn base_region(&self) -> LabeledPolygon {
        match &self.domain {
            Domain::Bounded(p) => {
                let labels = (0..p.len()).map(EdgeLabel::Domain).collect();
                LabeledPolygon::new(p.vertices().to_vec(), labels)
            }
            Domain::Unbounded => {
                LabeledPolygon::square(self.truncation_half_width().unwrap(), EdgeLabel::Box)
            }
        }
    }

    /// Active region of every piece, aligned with piece indices.
    pub(crate) fn cell_regions(&self) -> Vec<Option<LabeledPolygon>> {
        self.cells_in(&self.base_region())
    }

    /// Active regions inside an arbitrary labeled base region.
    pub(crate) fn cells_in(&self, base: &LabeledPolygon) -> Vec<Option<LabeledPolygon>> {
        let scale = self.pieces.iter().map(|p| p.gradient.norm()).fold(1.0, f64::max);
        (0..self.pieces.len())
            .map(|i| {
                let pi = &self.pieces[i];
                let mut region = base.clone();
                for (k, pk) in self.pieces.iter().enumerate() {
                    if k == i {
                        continue;
                    }
                    let normal = pk.gradient - pi.gradient;
                    let offset = pk.offset - pi.offset;
                    if normal.norm() <= 1e-14 * scale {
                        // Parallel pieces: the smaller offset wins, ties go
                        // to the lower index.
                        if offset < 0.0 || (offset == 0.0 && k < i) {
                            return None;
                        }
                        continue;
                    }
                    region = region.clip(&normal, offset, EdgeLabel::Piece(k))?;
                }
                Some(region)
            })
            .collect()
    }

    pub fn laguerre_cells(&self) -> CellComplex {
        let mut cells = Vec::new();
        let mut dropped = Vec::new();
        for (i, r) in self.cell_regions().into_iter().enumerate() {
            match r {
                Some(region) => cells.push(Cell { piece: i, region }),
                None => dropped.push(i),
            }
        }
        CellComplex { cells, dropped }
    }

    /// `(J(f), ∫ f log f)`.
    pub fn mass_and_moment(&self) -> (f64, f64) {
        let mut mass = 0.0;
        let mut moment = 0.0;
        for cell in self.laguerre_cells().cells {
            let p = &self.pieces[cell.piece];
            let (m, mo) = ring_integrals(&cell.region.vertices, &p.gradient, p.offset);
            mass += m;
            moment += mo;
        }
        (mass, moment)
    }

    pub fn mass(&self) -> f64 {
        self.mass_and_moment().0
    }

    /// `Ent(f) = ∫ f log f - J log J`.
    pub fn entropy(&self) -> f64 {
        let (j, m) = self.mass_and_moment();
        m - j * j.ln()
    }

    /// Minimum of `φ` and a point where it is attained (always a vertex of
    /// the cell complex).
    pub fn min_phi(&self) -> (f64, Vec2) {
        let mut best = (f64::INFINITY, Vec2::zeros());
        for cell in self.laguerre_cells().cells {
            let p = &self.pieces[cell.piece];
            for v in &cell.region.vertices {
                let val = p.value(v);
                if val < best.0 {
                    best = (val, *v);
                }
            }
        }
        best
    }

    pub fn max_value(&self) -> f64 {
        (-self.min_phi().0).exp()
    }

    /// `h_f(y) = sup_x <y, x> - φ(x)`; `+∞` where the Legendre transform is
    /// infinite.
    pub fn support_function(&self, y: &Vec2) -> f64 {
        match &self.domain {
            Domain::Bounded(_) => {
                let mut best = f64::NEG_INFINITY;
                for cell in self.laguerre_cells().cells {
                    let p = &self.pieces[cell.piece];
                    for v in &cell.region.vertices {
                        best = best.max(y.dot(v) - p.value(v));
                    }
                }
                best
            }
            Domain::Unbounded => self.hull_envelope(y),
        }
    }

    /// Lower convex envelope of the points `(z_i, c_i)` at `y`; on the whole
    /// plane this is the Legendre transform. Basic feasible solutions of the
    /// underlying linear program use at most three pieces.
    fn hull_envelope(&self, y: &Vec2) -> f64 {
        let z: Vec<Vec2> = self.pieces.iter().map(|p| p.gradient).collect();
        let c: Vec<f64> = self.pieces.iter().map(|p| p.offset).collect();
        let scale = z.iter().map(|v| v.norm()).fold(y.norm(), f64::max).max(1.0);
        let tol = 1e-11 * scale;
        let m = z.len();
        let mut best = f64::INFINITY;
        for i in 0..m {
            if (y - z[i]).norm() <= tol {
                best = best.min(c[i]);
            }
            for j in i + 1..m {
                let e = z[j] - z[i];
                let len2 = e.norm_squared();
                if len2 <= tol * tol {
                    continue;
                }
                let w = y - z[i];
                if cross(&e, &w).abs() <= tol * len2.sqrt() {
                    let lam = e.dot(&w) / len2;
                    if (-1e-12..=1.0 + 1e-12).contains(&lam) {
                        let lam = lam.clamp(0.0, 1.0);
                        best = best.min((1.0 - lam) * c[i] + lam * c[j]);
                    }
                }
                for k in j + 1..m {
                    let det = cross(&(z[j] - z[i]), &(z[k] - z[i]));
                    if det.abs() <= tol * tol {
                        continue;
                    }
                    let lj = cross(&w, &(z[k] - z[i])) / det;
                    let lk = cross(&(z[j] - z[i]), &w) / det;
                    let li = 1.0 - lj - lk;
                    if li >= -1e-12 && lj >= -1e-12 && lk >= -1e-12 {
                        best = best.min(li * c[i] + lj * c[j] + lk * c[k]);
                    }
                }
            }
        }
        best
    }

    /// `h_{supp f}(θ)`, or `None` on the whole plane.
    pub fn domain_support(&self, theta: &Vec2) -> Option<f64> {
        self.domain_polygon().map(|p| p.support(theta))
    }

    /// `{φ <= level}` as a labeled region (`None` if empty).
    pub(crate) fn sublevel_region(&self, level: f64) -> Option<LabeledPolygon> {
        let mut region = match &self.domain {
            Domain::Bounded(_) => self.base_region(),
            Domain::Unbounded => {
                let alpha = self.coercivity_rate().unwrap();
                let hi = self.offset_range().1;
                LabeledPolygon::square(2.0 * (level + hi).abs().max(1.0) / alpha + 1.0, EdgeLabel::Box)
            }
        };
        for p in &self.pieces {
            region = region.clip(&p.gradient, level + p.offset, EdgeLabel::Level)?;
        }
        Some(region)
    }

    /// `{f >= t}`.
    pub fn superlevel(&self, t: f64) -> Result<Polygon> {
        if !(t > 0.0) {
            return Err(Error::validation("t", "level must be positive"));
        }
        let region = self.sublevel_region(-t.ln()).ok_or(Error::EmptyLevel)?;
        Polygon::new(region.vertices).map_err(|_| Error::EmptyLevel)
    }

    /// `f(· - v)`.
    pub fn translate(&self, v: &Vec2) -> Self {
        let pieces = self.pieces.iter().map(|p| AffinePiece::new(p.gradient, p.offset + p.gradient.dot(v))).collect();
        let domain = match &self.domain {
            Domain::Bounded(p) => Domain::Bounded(p.translate(v)),
            Domain::Unbounded => Domain::Unbounded,
        };
        PolyhedralLogConcave { pieces, domain }
    }

    /// `f ∘ R_u` with `R_u` the reflection about `u^⊥`.
    pub fn reflect(&self, u: &Vec2) -> Self {
        let pieces = self.pieces.iter().map(|p| AffinePiece::new(reflect_point(&p.gradient, u), p.offset)).collect();
        let domain = match &self.domain {
            Domain::Bounded(p) => Domain::Bounded(p.reflect(u)),
            Domain::Unbounded => Domain::Unbounded,
        };
        PolyhedralLogConcave { pieces, domain }
    }

    /// `f ∘ T` for an invertible linear `T`.
    pub fn compose_linear(&self, t: &Matrix2<f64>) -> Result<Self> {
        let inv = t.try_inverse().ok_or(Error::SingularTransform)?;
        let tt = t.transpose();
        let pieces = self.pieces.iter().map(|p| AffinePiece::new(tt * p.gradient, p.offset)).collect();
        let domain = match &self.domain {
            Domain::Bounded(p) => Domain::Bounded(p.linear_image(&inv)?),
            Domain::Unbounded => Domain::Unbounded,
        };
        PolyhedralLogConcave::new(pieces, domain)
    }

    /// `λ f`.
    pub fn scale_values(&self, lambda: f64) -> Self {
        assert!(lambda > 0.0);
        let pieces = self.pieces.iter().map(|p| AffinePiece::new(p.gradient, p.offset + lambda.ln())).collect();
        PolyhedralLogConcave { pieces, domain: self.domain.clone() }
    }

    /// Square `[-w, w]^2` containing everywhere `f >= 1e-13 · max f`.
    pub fn bounding_half_width(&self) -> f64 {
        match &self.domain {
            Domain::Bounded(p) => p.vertices().iter().map(|v| v.x.abs().max(v.y.abs())).fold(0.0, f64::max),
            Domain::Unbounded => {
                let alpha = self.coercivity_rate().unwrap();
                let (lo, hi) = self.offset_range();
                (hi - lo + 30.0) / alpha
            }
        }
    }

    /// `W_1 = ∫_0^{max f} S({f >= s}) ds`, integrated in `t = -log s`.
    /// Between consecutive values of `φ` at cell-complex vertices the level
    /// perimeter is affine in `t`, so Gauss–Legendre is exact there.
    pub fn layer_cake_w1(&self) -> f64 {
        let mut critical: Vec<f64> = Vec::new();
        for cell in self.laguerre_cells().cells {
            let r = &cell.region;
            let n = r.len();
            for i in 0..n {
                let prev = r.labels[(i + n - 1) % n];
                if r.labels[i] == EdgeLabel::Box || prev == EdgeLabel::Box {
                    continue;
                }
                critical.push(self.pieces[cell.piece].value(&r.vertices[i]));
            }
        }
        critical.sort_by(f64::total_cmp);
        critical.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + b.abs()));
        let perimeter = |t: f64| {
            self.sublevel_region(t).map_or(0.0, |r| (0..r.len()).map(|i| {
                let (a, b) = r.edge(i);
                (b - a).norm()
            }).sum())
        };
        let gl = super::integrate::gauss_legendre(8);
        let mut total = 0.0;
        for w in critical.windows(2) {
            let (mid, half) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
            for (x, wt) in &gl {
                let t = mid + half * x;
                total += half * wt * perimeter(t) * (-t).exp();
            }
        }
        let last = *critical.last().unwrap();
        total + match &self.domain {
            Domain::Bounded(p) => p.perimeter() * (-last).exp(),
            Domain::Unbounded => {
                // With p affine on [T, ∞), ∫_T^∞ p(t) e^{-t} dt = e^{-T} p(T + 1).
                (-last).exp() * perimeter(last + 1.0)
            }
        }
    }

    /// Boundary integrals: for each domain edge `j`, `∫_{edge_j} f dH¹`.
    pub(crate) fn edge_masses(&self, regions: &[Option<LabeledPolygon>]) -> Vec<f64> {
        let n = self.domain_polygon().map_or(0, Polygon::len);
        let mut out = vec![0.0; n];
        for (i, region) in regions.iter().enumerate() {
            let Some(region) = region else { continue };
            let p = &self.pieces[i];
            for (e, label) in region.labels.iter().enumerate() {
                if let EdgeLabel::Domain(j) = label {
                    let (a, b) = region.edge(e);
                    out[*j] += segment_integral((b - a).norm(), -p.value(&a), -p.value(&b));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    pub(crate) fn linf() -> PolyhedralLogConcave {
        let pieces = [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)]
            .iter()
            .map(|&(x, y)| AffinePiece::new(Vec2::new(x, y), 0.0))
            .collect();
        PolyhedralLogConcave::new(pieces, Domain::Unbounded).unwrap()
    }

    #[test]
    fn indicator_values() {
        let f = PolyhedralLogConcave::indicator(Polygon::square(1.0));
        assert_eq!(f.eval(&Vec2::new(0.5, -0.2)), 1.0);
        assert_eq!(f.eval(&Vec2::new(1.5, 0.0)), 0.0);
        assert_relative_eq!(f.mass(), 4.0, max_relative = 1e-14);
        assert_relative_eq!(f.entropy(), -4.0 * 4f64.ln(), max_relative = 1e-13);
        assert_relative_eq!(-4.0 * 4f64.ln(), -5.545177444479562, max_relative = 1e-15);
    }

    #[test]
    fn scaled_indicator_entropy() {
        // Ent(c 1_A) = -c |A| log |A|
        let f = PolyhedralLogConcave::scaled_indicator(Polygon::square(0.7), 2.5);
        let a: f64 = 1.4 * 1.4;
        assert_relative_eq!(f.entropy(), -2.5 * a * a.ln(), max_relative = 1e-13);
    }

    #[test]
    fn linf_cells_on_a_square() {
        let g = PolyhedralLogConcave::new(linf().pieces.clone(), Domain::Bounded(Polygon::square(2.0))).unwrap();
        let cx = g.laguerre_cells();
        assert_eq!(cx.cells.len(), 4);
        for c in &cx.cells {
            assert_abs_diff_eq!(c.area(), 4.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(cx.total_area(), 16.0, epsilon = 1e-12);
    }

    #[test]
    fn linf_unbounded_mass_and_entropy() {
        let f = linf();
        // Each quarter cone carries ∫_0^∞ 2t e^{-t} dt = 2.
        assert_relative_eq!(f.mass(), 8.0, max_relative = 1e-12);
        // ∫ f log f = -∫ |x|_∞ e^{-|x|_∞} = -4 ∫ 2 t^2 e^{-t} = -16
        assert_relative_eq!(f.entropy(), -16.0 - 8.0 * 8f64.ln(), max_relative = 1e-12);
        assert_abs_diff_eq!(f.support_function(&Vec2::new(1.0, 0.0)), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f.support_function(&Vec2::new(0.5, 0.5)), 0.0, epsilon = 1e-12);
        assert!(f.support_function(&Vec2::new(0.6, 0.6)).is_infinite());
        assert_abs_diff_eq!(f.max_value(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn duplicate_pieces_keep_one_cell() {
        let p = AffinePiece::new(Vec2::new(0.3, 0.1), 0.2);
        let f = PolyhedralLogConcave::new(vec![p, p], Domain::Bounded(Polygon::square(1.0))).unwrap();
        let cx = f.laguerre_cells();
        assert_eq!(cx.cells.len(), 1);
        assert_eq!(cx.dropped, vec![1]);
    }

    #[test]
    fn coercivity_is_checked() {
        let pieces = vec![AffinePiece::new(Vec2::new(1.0, 0.0), 0.0), AffinePiece::new(Vec2::new(0.0, 1.0), 0.0)];
        assert!(matches!(PolyhedralLogConcave::new(pieces, Domain::Unbounded), Err(Error::CoercivityViolation)));
    }

    #[test]
    fn indicator_support_is_body_support() {
        let k = Polygon::new(vec![Vec2::new(-1.0, -0.5), Vec2::new(2.0, 0.0), Vec2::new(0.0, 1.5)]).unwrap();
        let f = PolyhedralLogConcave::indicator(k.clone());
        for a in 0..12 {
            let y = 1.7 * crate::convex2d::unit(a as f64 * 0.5);
            assert_abs_diff_eq!(f.support_function(&y), k.support(&y), epsilon = 1e-14);
        }
    }

    #[test]
    fn superlevels() {
        let f = PolyhedralLogConcave::indicator(Polygon::square(1.0));
        assert_abs_diff_eq!(f.superlevel(0.5).unwrap().area(), 4.0, epsilon = 1e-12);
        assert!(matches!(f.superlevel(1.5), Err(Error::EmptyLevel)));
        let g = linf();
        let lev = g.superlevel((-1.0f64).exp()).unwrap();
        assert_abs_diff_eq!(lev.area(), 4.0, epsilon = 1e-12);
    }

    #[test]
    fn transforms() {
        let k = Polygon::new(vec![Vec2::new(-1.0, -0.5), Vec2::new(2.0, 0.0), Vec2::new(0.0, 1.5)]).unwrap();
        let f = PolyhedralLogConcave::new(
            vec![AffinePiece::new(Vec2::new(0.4, -0.3), 0.1), AffinePiece::new(Vec2::new(-0.5, 0.2), -0.2)],
            Domain::Bounded(k),
        )
        .unwrap();
        let v = Vec2::new(0.3, -1.1);
        let g = f.translate(&v);
        for i in 0..20 {
            let x = Vec2::new(-1.0 + 0.13 * i as f64, 0.9 - 0.07 * i as f64);
            assert_abs_diff_eq!(g.eval(&(x + v)), f.eval(&x), epsilon = 1e-14);
        }
        assert_relative_eq!(g.mass(), f.mass(), max_relative = 1e-12);
        let u = Vec2::new(0.6, 0.8);
        let r = f.reflect(&u);
        assert_relative_eq!(r.entropy(), f.entropy(), max_relative = 1e-12);
        let rr = r.reflect(&u);
        for i in 0..20 {
            let x = Vec2::new(-0.9 + 0.1 * i as f64, 0.3);
            assert_abs_diff_eq!(rr.eval(&x), f.eval(&x), epsilon = 1e-12);
        }
        let t = Matrix2::new(1.3, 0.4, -0.2, 0.8);
        let ft = f.compose_linear(&t).unwrap();
        assert_relative_eq!(ft.mass(), f.mass() / t.determinant().abs(), max_relative = 1e-12);
    }
}
