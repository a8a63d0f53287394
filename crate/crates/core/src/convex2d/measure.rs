use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{angle_of, cross, reflect_point, rot90, Polygon, Vec2};
use crate::error::{Error, Result};

/// Angular radius below which two directions are the same atom.
pub const DIRECTION_MERGE_TOL: f64 = 1e-10;

/// Finite atomic measure on the unit circle, kept sorted by angle in
/// `(-π, π]` with distinct directions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereMeasure2 {
    atoms: Vec<(Vec2, f64)>,
}

impl SphereMeasure2 {
    /// Normalizes directions, drops zero masses and merges parallel atoms.
    pub fn new(atoms: impl IntoIterator<Item = (Vec2, f64)>) -> Result<Self> {
        let mut list = Vec::new();
        for (dir, mass) in atoms {
            if !(mass >= 0.0) || !mass.is_finite() {
                return Err(Error::validation("mass", format!("{mass} is not a nonnegative number")));
            }
            let norm = dir.norm();
            if !(norm > 0.0) || !norm.is_finite() {
                return Err(Error::validation("direction", "zero or non-finite vector"));
            }
            if mass > 0.0 {
                list.push((dir / norm, mass));
            }
        }
        Ok(SphereMeasure2 { atoms: merge_directions(list, DIRECTION_MERGE_TOL) })
    }

    pub fn atoms(&self) -> &[(Vec2, f64)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.atoms.iter().map(|(_, m)| m).sum()
    }

    /// `Σ mass · direction`.
    pub fn resultant(&self) -> Vec2 {
        self.atoms.iter().map(|(u, m)| *m * u).sum()
    }

    pub fn is_centered(&self, tol: f64) -> bool {
        self.resultant().norm() <= tol * self.total()
    }

    pub fn add(&self, other: &SphereMeasure2) -> SphereMeasure2 {
        let list = self.atoms.iter().chain(other.atoms.iter()).copied().collect();
        SphereMeasure2 { atoms: merge_directions(list, DIRECTION_MERGE_TOL) }
    }

    pub fn scale(&self, lambda: f64) -> SphereMeasure2 {
        assert!(lambda >= 0.0);
        if lambda == 0.0 {
            return SphereMeasure2 { atoms: Vec::new() };
        }
        SphereMeasure2 { atoms: self.atoms.iter().map(|(u, m)| (*u, lambda * m)).collect() }
    }

    /// Push-forward under the reflection about `u^⊥`.
    pub fn reflect(&self, u: &Vec2) -> SphereMeasure2 {
        let list = self.atoms.iter().map(|(d, m)| (reflect_point(d, u), *m)).collect();
        SphereMeasure2 { atoms: merge_directions(list, DIRECTION_MERGE_TOL) }
    }

    /// `½ ∫ |<u, v>| dS(v)`, the support function of the projection body.
    pub fn projection_support(&self, u: &Vec2) -> f64 {
        0.5 * self.atoms.iter().map(|(v, m)| m * u.dot(v).abs()).sum::<f64>()
    }

    /// True if every direction lies in some closed half-plane.
    pub fn in_closed_halfplane(&self) -> bool {
        if self.atoms.len() < 3 {
            return true;
        }
        let angles: Vec<f64> = self.atoms.iter().map(|(u, _)| angle_of(u)).collect();
        let mut max_gap: f64 = 0.0;
        for i in 0..angles.len() {
            let next = if i + 1 < angles.len() { angles[i + 1] } else { angles[0] + 2.0 * PI };
            max_gap = max_gap.max(next - angles[i]);
        }
        max_gap >= PI - 1e-12
    }
}

pub(crate) fn merge_directions(mut list: Vec<(Vec2, f64)>, tol: f64) -> Vec<(Vec2, f64)> {
    if list.is_empty() {
        return list;
    }
    list.sort_by(|a, b| angle_of(&a.0).total_cmp(&angle_of(&b.0)));
    let mut merged: Vec<(Vec2, f64)> = Vec::with_capacity(list.len());
    for (u, m) in list {
        if let Some(last) = merged.last_mut() {
            if angle_between(&last.0, &u) <= tol {
                let w = last.1 + m;
                last.0 = ((last.1 * last.0 + m * u) / w).normalize();
                last.1 = w;
                continue;
            }
        }
        merged.push((u, m));
    }
    if merged.len() > 1 {
        let last = merged.len() - 1;
        if angle_between(&merged[0].0, &merged[last].0) <= tol {
            let (u, m) = merged.pop().unwrap();
            let w = merged[0].1 + m;
            merged[0].0 = ((merged[0].1 * merged[0].0 + m * u) / w).normalize();
            merged[0].1 = w;
        }
    }
    merged.sort_by(|a, b| angle_of(&a.0).total_cmp(&angle_of(&b.0)));
    merged
}

fn angle_between(a: &Vec2, b: &Vec2) -> f64 {
    cross(a, b).atan2(a.dot(b)).abs()
}

/// Reconstructs the polygon with surface area measure `s` (the classical
/// planar Minkowski problem). Edges are chained in normal order; a residual
/// closure error is spread over the edges in proportion to their lengths.
/// The result has its Steiner point at the origin.
pub fn minkowski_problem_2d(s: &SphereMeasure2) -> Result<Polygon> {
    let total = s.total();
    let r = s.resultant();
    if r.norm() > 1e-9 * total {
        return Err(Error::NotCentered(r.x, r.y));
    }
    if s.len() < 3 || s.in_closed_halfplane() {
        return Err(Error::DegenerateSpan);
    }
    let correction = rot90(&r);
    let mut vertices = Vec::with_capacity(s.len());
    let mut p = Vec2::zeros();
    for (u, m) in s.atoms() {
        vertices.push(p);
        p += *m * rot90(u) - (m / total) * correction;
    }
    let body = Polygon::new(vertices)?;
    let c = body.steiner_point();
    Ok(body.translate(&-c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn square_measure() {
        let s = Polygon::square(1.0).surface_area_measure();
        assert_eq!(s.len(), 4);
        for (u, m) in s.atoms() {
            assert_abs_diff_eq!(*m, 2.0, epsilon = 1e-15);
            assert_abs_diff_eq!(u.x.abs() + u.y.abs(), 1.0, epsilon = 1e-15);
        }
        assert!(s.resultant().norm() < 1e-15);
    }

    #[test]
    fn equilateral_triangle_from_three_atoms() {
        let m = 1.7;
        let s = SphereMeasure2::new((0..3).map(|k| {
            let a = 2.0 * PI * k as f64 / 3.0 + 0.2;
            (Vec2::new(a.cos(), a.sin()), m)
        }))
        .unwrap();
        let t = minkowski_problem_2d(&s).unwrap();
        assert_eq!(t.len(), 3);
        for (a, b) in t.edges() {
            assert_abs_diff_eq!((b - a).norm(), m, epsilon = 1e-14);
        }
        assert!(t.steiner_point().norm() < 1e-14);
    }

    #[test]
    fn halfplane_measures_are_rejected() {
        let s = SphereMeasure2::new(vec![
            (Vec2::new(1.0, 0.0), 1.0),
            (Vec2::new(0.0, 1.0), 2.0),
            (Vec2::new(-1.0, 0.0), 1.0),
        ])
        .unwrap();
        assert!(matches!(minkowski_problem_2d(&s), Err(Error::NotCentered(..))));
        assert!(s.in_closed_halfplane());
        let t = SphereMeasure2::new(vec![(Vec2::new(1.0, 0.0), 1.0), (Vec2::new(-1.0, 0.0), 1.0)]).unwrap();
        assert!(matches!(minkowski_problem_2d(&t), Err(Error::DegenerateSpan)));
    }

    #[test]
    fn parallel_atoms_merge_across_the_branch_cut() {
        let s = SphereMeasure2::new(vec![
            (Vec2::new(-1.0, 1e-13), 1.0),
            (Vec2::new(-1.0, -1e-13), 2.0),
            (Vec2::new(1.0, 0.0), 3.0),
        ])
        .unwrap();
        assert_eq!(s.len(), 2);
        assert_abs_diff_eq!(s.total(), 6.0, epsilon = 1e-15);
    }
}
