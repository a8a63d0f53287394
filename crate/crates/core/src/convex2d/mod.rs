//! Planar convex polygons and the classical operations on them.
//!
//! A [`Polygon`] is stored as a counter-clockwise, strictly convex vertex
//! list. Everything downstream (cells of log-concave functions, zonotopes,
//! level sets) is built from these, so the constructors are strict about
//! orientation and convexity and merge collinear vertices.

mod clip;
mod measure;
mod ops;

pub(crate) use clip::{EdgeLabel, LabeledPolygon};
pub(crate) use measure::merge_directions;
pub use measure::{minkowski_problem_2d, SphereMeasure2, DIRECTION_MERGE_TOL};
pub use ops::{blaschke_scale_2d, blaschke_sum_2d, classical_ks_margin, projection_body_2d, zonotope};

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec2 = Vector2<f64>;

/// Default relative tolerance for merging collinear vertices.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

#[inline]
pub fn cross(a: &Vec2, b: &Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Counter-clockwise rotation by a right angle.
#[inline]
pub fn rot90(v: &Vec2) -> Vec2 {
    Vec2::new(-v.y, v.x)
}

#[inline]
pub fn unit(angle: f64) -> Vec2 {
    Vec2::new(angle.cos(), angle.sin())
}

#[inline]
pub fn angle_of(v: &Vec2) -> f64 {
    v.y.atan2(v.x)
}

/// Reflection of `x` about the line `u^⊥` (u is normalized internally).
pub fn reflect_point(x: &Vec2, u: &Vec2) -> Vec2 {
    let u = u.normalize();
    x - 2.0 * x.dot(&u) * u
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolygonDoc", into = "PolygonDoc")]
pub struct Polygon {
    vertices: Vec<Vec2>,
    tolerance: f64,
}

impl Polygon {
    pub fn new(vertices: Vec<Vec2>) -> Result<Self> {
        Self::with_tolerance(vertices, DEFAULT_TOLERANCE)
    }

    pub fn with_tolerance(vertices: Vec<Vec2>, tolerance: f64) -> Result<Self> {
        if !(tolerance >= 0.0) {
            return Err(Error::validation("tolerance", "must be nonnegative"));
        }
        if vertices.iter().any(|v| !v.x.is_finite() || !v.y.is_finite()) {
            return Err(Error::validation("vertices", "non-finite coordinate"));
        }
        let vertices = normalize_ring(vertices, tolerance)?;
        Ok(Polygon { vertices, tolerance })
    }

    /// Convex hull of a point cloud (monotone chain); interior and collinear
    /// points are discarded.
    pub fn convex_hull(points: &[Vec2]) -> Result<Self> {
        let mut pts: Vec<Vec2> = points.to_vec();
        pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        pts.dedup_by(|a, b| (*a - *b).norm() == 0.0);
        if pts.len() < 3 {
            return Err(Error::DegeneratePolygon("fewer than three distinct points".into()));
        }
        let turn = |o: &Vec2, a: &Vec2, b: &Vec2| cross(&(a - o), &(b - o));
        let mut lower: Vec<Vec2> = Vec::new();
        for p in &pts {
            while lower.len() >= 2 && turn(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= 0.0 {
                lower.pop();
            }
            lower.push(*p);
        }
        let mut upper: Vec<Vec2> = Vec::new();
        for p in pts.iter().rev() {
            while upper.len() >= 2 && turn(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= 0.0 {
                upper.pop();
            }
            upper.push(*p);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        Polygon::new(lower)
    }

    /// Regular `n`-gon inscribed in the circle of the given radius, with a
    /// vertex on the positive x-axis. Used as the disk approximation.
    pub fn regular(n: usize, radius: f64) -> Self {
        assert!(n >= 3 && radius > 0.0);
        let vertices = (0..n)
            .map(|k| radius * unit(2.0 * std::f64::consts::PI * k as f64 / n as f64))
            .collect();
        Polygon { vertices, tolerance: DEFAULT_TOLERANCE }
    }

    pub fn rectangle(min: Vec2, max: Vec2) -> Result<Self> {
        Polygon::new(vec![min, Vec2::new(max.x, min.y), max, Vec2::new(min.x, max.y)])
    }

    /// The square `[-h, h]^2`.
    pub fn square(half_side: f64) -> Self {
        Polygon::rectangle(Vec2::new(-half_side, -half_side), Vec2::new(half_side, half_side))
            .expect("square with positive side")
    }

    /// Bounded intersection of half-planes `<n_j, x> <= d_j`.
    pub fn from_halfplanes(halfplanes: &[(Vec2, f64)]) -> Result<Self> {
        let scale = halfplanes
            .iter()
            .map(|(n, d)| d.abs() / n.norm().max(f64::MIN_POSITIVE))
            .fold(1.0, f64::max);
        let mut region = LabeledPolygon::square(1e3 * scale, EdgeLabel::Box);
        for (j, (n, d)) in halfplanes.iter().enumerate() {
            region = region
                .clip(n, *d, EdgeLabel::Domain(j))
                .ok_or_else(|| Error::DegeneratePolygon("empty half-plane intersection".into()))?;
        }
        if region.labels.iter().any(|l| *l == EdgeLabel::Box) {
            return Err(Error::DegenerateSpan);
        }
        Polygon::new(region.vertices)
    }

    pub(crate) fn from_raw(vertices: Vec<Vec2>) -> Self {
        Polygon { vertices, tolerance: DEFAULT_TOLERANCE }
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Edges as `(start, end)` in counter-clockwise order.
    pub fn edges(&self) -> impl Iterator<Item = (Vec2, Vec2)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Outer unit normals and lengths of the edges, in order.
    pub fn edge_normals(&self) -> Vec<(Vec2, f64)> {
        self.edges()
            .map(|(a, b)| {
                let e = b - a;
                let len = e.norm();
                (Vec2::new(e.y, -e.x) / len, len)
            })
            .collect()
    }

    pub fn area(&self) -> f64 {
        let mut twice = 0.0;
        for (a, b) in self.edges() {
            twice += cross(&a, &b);
        }
        0.5 * twice
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| (b - a).norm()).sum()
    }

    /// Center of mass of the region.
    pub fn centroid(&self) -> Vec2 {
        let mut c = Vec2::zeros();
        let mut twice = 0.0;
        let o = self.vertices[0];
        for (a, b) in self.edges() {
            let w = cross(&(a - o), &(b - o));
            twice += w;
            c += w * (a + b - 2.0 * o) / 3.0;
        }
        o + c / twice
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                d = d.max((a - b).norm());
            }
        }
        d
    }

    pub fn support(&self, u: &Vec2) -> f64 {
        self.vertices.iter().map(|v| v.dot(u)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Closed-set membership with a relative slack.
    pub fn contains(&self, x: &Vec2) -> bool {
        let v0 = self.vertices[0];
        let spread = self.vertices.iter().map(|v| (v - v0).norm()).fold(0.0, f64::max);
        let slack = 1e-12 * (1.0 + spread);
        self.edges().all(|(a, b)| cross(&(b - a), &(x - a)) >= -slack * (b - a).norm())
    }

    pub fn translate(&self, v: &Vec2) -> Polygon {
        Polygon { vertices: self.vertices.iter().map(|p| p + v).collect(), tolerance: self.tolerance }
    }

    /// Dilation about the origin; `s` must be positive.
    pub fn scale(&self, s: f64) -> Polygon {
        assert!(s > 0.0, "scale factor must be positive");
        Polygon { vertices: self.vertices.iter().map(|p| p * s).collect(), tolerance: self.tolerance }
    }

    /// Image under an invertible linear map.
    pub fn linear_image(&self, t: &Matrix2<f64>) -> Result<Polygon> {
        let det = t.determinant();
        if det.abs() <= 1e-14 * t.norm_squared().max(f64::MIN_POSITIVE) {
            return Err(Error::SingularTransform);
        }
        let mut vertices: Vec<Vec2> = self.vertices.iter().map(|p| t * p).collect();
        if det < 0.0 {
            vertices.reverse();
        }
        Polygon::with_tolerance(vertices, self.tolerance)
    }

    /// Reflection about the line `u^⊥`.
    pub fn reflect(&self, u: &Vec2) -> Polygon {
        let mut vertices: Vec<Vec2> = self.vertices.iter().map(|p| reflect_point(p, u)).collect();
        vertices.reverse();
        Polygon { vertices, tolerance: self.tolerance }
    }

    pub fn surface_area_measure(&self) -> SphereMeasure2 {
        SphereMeasure2::new(self.edge_normals()).expect("polygon edges have positive length")
    }

    /// Steiner point `(1/π) ∫ h_K(u) u dσ(u)`, integrated exactly over the
    /// normal arc of each vertex (where `h_K(u) = <v, u>`).
    pub fn steiner_point(&self) -> Vec2 {
        let normals = self.edge_normals();
        let n = self.vertices.len();
        let mut s = Vec2::zeros();
        for i in 0..n {
            let before = normals[(i + n - 1) % n].0;
            let after = normals[i].0;
            let a = angle_of(&before);
            let b = a + cross(&before, &after).atan2(before.dot(&after));
            let (s2a, s2b) = ((2.0 * a).sin(), (2.0 * b).sin());
            let (c2a, c2b) = ((2.0 * a).cos(), (2.0 * b).cos());
            let half = 0.5 * (b - a);
            let cc = half + 0.25 * (s2b - s2a);
            let ss = half - 0.25 * (s2b - s2a);
            let cs = -0.25 * (c2b - c2a);
            let v = self.vertices[i];
            s += Vec2::new(cc * v.x + cs * v.y, cs * v.x + ss * v.y);
        }
        s / std::f64::consts::PI
    }

    /// Polar body; each edge with normal `u` and support `h` becomes the
    /// vertex `u / h`.
    pub fn polar(&self) -> Result<Polygon> {
        let v0 = self.vertices[0];
        let spread = self.vertices.iter().map(|v| (v - v0).norm()).fold(0.0, f64::max);
        let slack = 1e-12 * (1.0 + spread);
        let mut vertices = Vec::with_capacity(self.len());
        for ((a, _), (u, _)) in self.edges().zip(self.edge_normals()) {
            let h = a.dot(&u);
            if h <= slack {
                return Err(Error::OriginOutside);
            }
            vertices.push(u / h);
        }
        Polygon::new(vertices)
    }

    /// Minkowski sum, assembled from the union of the edge sets.
    pub fn minkowski_sum(&self, other: &Polygon) -> Polygon {
        let measure = self.surface_area_measure().add(&other.surface_area_measure());
        let body = minkowski_problem_2d(&measure).expect("sum of closed edge sets is closed");
        body.translate(&(self.steiner_point() + other.steiner_point()))
    }

    /// `½K + ½R_u K`.
    pub fn minkowski_symmetral(&self, u: &Vec2) -> Polygon {
        self.minkowski_sum(&self.reflect(u)).scale(0.5)
    }

    /// Hausdorff distance `sup_u |h_K(u) - h_L(u)|`, evaluated exactly: on
    /// every arc between consecutive normals of either body the difference
    /// is a single linear functional of `u`.
    pub fn hausdorff_distance(&self, other: &Polygon) -> f64 {
        let mut breaks: Vec<f64> = self
            .edge_normals()
            .iter()
            .chain(other.edge_normals().iter())
            .map(|(u, _)| angle_of(u))
            .collect();
        breaks.sort_by(f64::total_cmp);
        let two_pi = 2.0 * std::f64::consts::PI;
        let mut best: f64 = 0.0;
        for (i, &a) in breaks.iter().enumerate() {
            let b = if i + 1 < breaks.len() { breaks[i + 1] } else { breaks[0] + two_pi };
            let mid = unit(0.5 * (a + b));
            let v = argmax_vertex(&self.vertices, &mid) - argmax_vertex(&other.vertices, &mid);
            best = best.max(max_abs_on_arc(&v, a, b));
        }
        best
    }
}

fn argmax_vertex(vertices: &[Vec2], u: &Vec2) -> Vec2 {
    *vertices
        .iter()
        .max_by(|p, q| p.dot(u).total_cmp(&q.dot(u)))
        .expect("nonempty polygon")
}

/// `max |<v, u(t)>|` for `t` in `[a, b]`.
fn max_abs_on_arc(v: &Vec2, a: f64, b: f64) -> f64 {
    let f = |t: f64| v.dot(&unit(t)).abs();
    let mut m = f(a).max(f(b));
    let phi = angle_of(v);
    let pi = std::f64::consts::PI;
    for k in -4..=4 {
        let t = phi + k as f64 * pi;
        if t > a && t < b {
            m = m.max(v.norm());
        }
    }
    m
}

fn normalize_ring(mut vs: Vec<Vec2>, tol: f64) -> Result<Vec<Vec2>> {
    if vs.len() < 3 {
        return Err(Error::DegeneratePolygon("fewer than three vertices".into()));
    }
    let diam = vs.iter().flat_map(|a| vs.iter().map(move |b| (a - b).norm())).fold(0.0, f64::max);
    if diam == 0.0 {
        return Err(Error::DegeneratePolygon("all vertices coincide".into()));
    }
    let abs_tol = tol * diam;
    loop {
        let n = vs.len();
        if n < 3 {
            return Err(Error::DegeneratePolygon("collapsed to fewer than three vertices".into()));
        }
        let mut removed = None;
        for i in 0..n {
            let prev = vs[(i + n - 1) % n];
            let cur = vs[i];
            let next = vs[(i + 1) % n];
            let a = cur - prev;
            let b = next - cur;
            if a.norm() <= abs_tol {
                removed = Some(i);
                break;
            }
            let turn = cross(&a, &b);
            if turn.abs() <= tol * a.norm() * b.norm() {
                if a.dot(&b) < 0.0 {
                    return Err(Error::NotConvex { index: i });
                }
                removed = Some(i);
                break;
            }
            if turn < 0.0 {
                return Err(Error::NotConvex { index: i });
            }
        }
        match removed {
            Some(i) => {
                vs.remove(i);
            }
            None => break,
        }
    }
    // Left turns everywhere still admits a doubly wound star; the exterior
    // angles of a simple convex ring sum to exactly 2π.
    let n = vs.len();
    let mut turning = 0.0;
    for i in 0..n {
        let a = vs[(i + 1) % n] - vs[i];
        let b = vs[(i + 2) % n] - vs[(i + 1) % n];
        turning += cross(&a, &b).atan2(a.dot(&b));
    }
    if (turning - 2.0 * std::f64::consts::PI).abs() > 1e-6 {
        return Err(Error::NotConvex { index: 0 });
    }
    let mut twice_area = 0.0;
    for i in 0..n {
        twice_area += cross(&vs[i], &vs[(i + 1) % n]);
    }
    if 0.5 * twice_area <= (tol * diam).powi(2) {
        return Err(Error::DegeneratePolygon("area below tolerance".into()));
    }
    Ok(vs)
}

/// JSON form: either a bare list of `[x, y]` pairs or an object with
/// `vertices` and an optional `tolerance`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolygonDoc {
    Bare(Vec<[f64; 2]>),
    Full {
        vertices: Vec<[f64; 2]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tolerance: Option<f64>,
    },
}

impl TryFrom<PolygonDoc> for Polygon {
    type Error = Error;

    fn try_from(doc: PolygonDoc) -> Result<Self> {
        let (vertices, tolerance) = match doc {
            PolygonDoc::Bare(v) => (v, None),
            PolygonDoc::Full { vertices, tolerance } => (vertices, tolerance),
        };
        let vertices = vertices.into_iter().map(|[x, y]| Vec2::new(x, y)).collect();
        Polygon::with_tolerance(vertices, tolerance.unwrap_or(DEFAULT_TOLERANCE))
    }
}

impl From<Polygon> for PolygonDoc {
    fn from(p: Polygon) -> Self {
        let vertices = p.vertices.iter().map(|v| [v.x, v.y]).collect();
        if p.tolerance == DEFAULT_TOLERANCE {
            PolygonDoc::Bare(vertices)
        } else {
            PolygonDoc::Full { vertices, tolerance: Some(p.tolerance) }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn triangle() -> Polygon {
        Polygon::new(vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)]).unwrap()
    }

    #[test]
    fn support_values() {
        let sq = Polygon::square(1.0);
        assert_eq!(sq.support(&Vec2::new(1.0, 0.0)), 1.0);
        assert_eq!(sq.support(&Vec2::new(1.0, 1.0)), 2.0);
        assert_eq!(triangle().support(&Vec2::new(-1.0, -1.0)), 0.0);
    }

    #[test]
    fn rejects_clockwise_and_reflex_input() {
        let cw = vec![Vec2::new(0.0, 0.0), Vec2::new(0.0, 1.0), Vec2::new(1.0, 0.0)];
        assert!(matches!(Polygon::new(cw), Err(Error::NotConvex { .. })));
        let dart = vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(2.0, 1.0),
            Vec2::new(0.0, 2.0),
            Vec2::new(0.5, 1.0),
        ];
        assert!(Polygon::new(dart).is_err());
    }

    #[test]
    fn collinear_vertices_are_merged() {
        let p = Polygon::new(vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(2.0, 0.0),
            Vec2::new(2.0, 2.0),
            Vec2::new(0.0, 2.0),
        ])
        .unwrap();
        assert_eq!(p.len(), 4);
        assert_abs_diff_eq!(p.area(), 4.0, epsilon = 1e-14);
    }

    #[test]
    fn steiner_point_matches_exterior_angle_weights() {
        // For polygons the Steiner point is the exterior-angle weighted mean
        // of the vertices; this is an independent formula.
        let p = Polygon::new(vec![
            Vec2::new(0.3, -0.2),
            Vec2::new(2.0, 0.1),
            Vec2::new(1.1, 1.7),
            Vec2::new(-0.4, 0.9),
        ])
        .unwrap();
        let normals = p.edge_normals();
        let n = p.len();
        let mut expected = Vec2::zeros();
        for i in 0..n {
            let a = normals[(i + n - 1) % n].0;
            let b = normals[i].0;
            let ext = cross(&a, &b).atan2(a.dot(&b));
            expected += ext / (2.0 * std::f64::consts::PI) * p.vertices()[i];
        }
        let s = p.steiner_point();
        assert_abs_diff_eq!(s.x, expected.x, epsilon = 1e-13);
        assert_abs_diff_eq!(s.y, expected.y, epsilon = 1e-13);
    }

    #[test]
    fn polar_of_square_is_cross_polytope() {
        let q = Polygon::square(1.0).polar().unwrap();
        assert_eq!(q.len(), 4);
        assert_abs_diff_eq!(q.area(), 2.0, epsilon = 1e-14);
        for v in q.vertices() {
            assert_abs_diff_eq!(v.norm(), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn polar_requires_interior_origin() {
        let t = triangle();
        assert!(matches!(t.polar(), Err(Error::OriginOutside)));
    }

    #[test]
    fn polar_of_regular_polygon() {
        let n = 64;
        let r = 1.7;
        let q = Polygon::regular(n, r).polar().unwrap();
        // The polar of an inscribed n-gon is circumscribed about radius 1/r.
        let outer = 1.0 / (r * (std::f64::consts::PI / n as f64).cos());
        for v in q.vertices() {
            assert_abs_diff_eq!(v.norm(), outer, epsilon = 1e-12);
        }
        assert!(q.hausdorff_distance(&Polygon::regular(n, 1.0 / r)) < 1e-2 / r);
    }

    #[test]
    fn hausdorff_of_translate() {
        let p = triangle();
        let q = p.translate(&Vec2::new(0.3, -0.4));
        assert_abs_diff_eq!(p.hausdorff_distance(&q), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn hausdorff_of_nested_squares() {
        let d = Polygon::square(1.0).hausdorff_distance(&Polygon::square(2.0));
        assert_abs_diff_eq!(d, 2f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn halfplane_intersection() {
        let hp = [
            (Vec2::new(1.0, 0.0), 1.0),
            (Vec2::new(-1.0, 0.0), 1.0),
            (Vec2::new(0.0, 1.0), 2.0),
            (Vec2::new(0.0, -1.0), 0.5),
        ];
        let p = Polygon::from_halfplanes(&hp).unwrap();
        assert_abs_diff_eq!(p.area(), 5.0, epsilon = 1e-12);
        let open = [(Vec2::new(1.0, 0.0), 1.0), (Vec2::new(0.0, 1.0), 1.0)];
        assert!(Polygon::from_halfplanes(&open).is_err());
    }

    #[test]
    fn json_round_trip() {
        let p = triangle();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, "[[0.0,0.0],[1.0,0.0],[0.0,1.0]]");
        let q: Polygon = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
        let r: Polygon =
            serde_json::from_str(r#"{"vertices":[[0,0],[1,0],[0,1]],"tolerance":1e-8}"#).unwrap();
        assert_eq!(r.tolerance(), 1e-8);
        assert!(serde_json::from_str::<Polygon>("[[0,0],[0,1],[1,0]]").is_err());
    }
}
