//! Half-plane clipping of convex polygons that remembers where each edge
//! came from. Cells of a log-concave function need this to tell domain
//! edges (which carry boundary mass) from interfaces between pieces.

use super::{cross, Vec2};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum EdgeLabel {
    /// Edge `j` of a polygonal domain.
    Domain(usize),
    /// Interface with affine piece `k`.
    Piece(usize),
    /// Artificial truncation box.
    Box,
    /// Level-set constraint.
    Level,
}

/// Convex CCW polygon whose edge `i` runs from `vertices[i]` to
/// `vertices[i + 1]` and carries `labels[i]`.
#[derive(Clone, Debug)]
pub(crate) struct LabeledPolygon {
    pub vertices: Vec<Vec2>,
    pub labels: Vec<EdgeLabel>,
}

impl LabeledPolygon {
    pub fn new(vertices: Vec<Vec2>, labels: Vec<EdgeLabel>) -> Self {
        debug_assert_eq!(vertices.len(), labels.len());
        LabeledPolygon { vertices, labels }
    }

    pub fn square(half: f64, label: EdgeLabel) -> Self {
        let v = vec![
            Vec2::new(-half, -half),
            Vec2::new(half, -half),
            Vec2::new(half, half),
            Vec2::new(-half, half),
        ];
        LabeledPolygon::new(v, vec![label; 4])
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        let o = self.vertices[0];
        let mut twice = 0.0;
        for i in 1..n.saturating_sub(1) {
            twice += cross(&(self.vertices[i] - o), &(self.vertices[i + 1] - o));
        }
        0.5 * twice
    }

    pub fn edge(&self, i: usize) -> (Vec2, Vec2) {
        (self.vertices[i], self.vertices[(i + 1) % self.vertices.len()])
    }

    fn scale(&self) -> f64 {
        self.vertices.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Keeps the part with `<normal, x> <= offset`; the new edge along the
    /// clipping line gets `label`. Returns `None` when nothing of positive
    /// area remains.
    pub fn clip(&self, normal: &Vec2, offset: f64, label: EdgeLabel) -> Option<LabeledPolygon> {
        let n = self.vertices.len();
        let scale = self.scale();
        let eps = 1e-13 * (normal.norm() * scale + offset.abs()).max(f64::MIN_POSITIVE);
        let side: Vec<f64> = self.vertices.iter().map(|v| normal.dot(v) - offset).collect();
        if side.iter().all(|s| *s <= eps) {
            return Some(self.clone());
        }
        if side.iter().all(|s| *s >= -eps) {
            return None;
        }
        let mut vertices = Vec::with_capacity(n + 1);
        let mut labels = Vec::with_capacity(n + 1);
        for i in 0..n {
            let j = (i + 1) % n;
            let (p, q) = (self.vertices[i], self.vertices[j]);
            let (sp, sq) = (side[i], side[j]);
            let p_in = sp <= eps;
            let q_in = sq <= eps;
            match (p_in, q_in) {
                (true, true) => {
                    vertices.push(p);
                    labels.push(self.labels[i]);
                }
                (true, false) => {
                    vertices.push(p);
                    labels.push(self.labels[i]);
                    if sp < -eps {
                        vertices.push(p + (q - p) * (sp / (sp - sq)));
                        labels.push(label);
                    } else {
                        // p sits on the line; the clipping edge starts here.
                        *labels.last_mut().unwrap() = label;
                    }
                }
                (false, true) => {
                    if sq < -eps {
                        vertices.push(p + (q - p) * (sp / (sp - sq)));
                        labels.push(self.labels[i]);
                    }
                }
                (false, false) => {}
            }
        }
        let out = LabeledPolygon { vertices, labels }.dedup(1e-14 * scale.max(f64::MIN_POSITIVE));
        if out.vertices.len() < 3 || out.area() <= 1e-24 * scale * scale {
            return None;
        }
        Some(out)
    }

    /// Removes zero-length edges, keeping the label of the edge that follows.
    fn dedup(mut self, tol: f64) -> Self {
        let mut i = 0;
        while self.vertices.len() > 2 && i < self.vertices.len() {
            let n = self.vertices.len();
            let j = (i + 1) % n;
            if (self.vertices[i] - self.vertices[j]).norm() <= tol {
                self.vertices.remove(i);
                self.labels.remove(i);
            } else {
                i += 1;
            }
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn clip_square_diagonally() {
        let sq = LabeledPolygon::square(1.0, EdgeLabel::Box);
        let half = sq.clip(&Vec2::new(1.0, 1.0), 0.0, EdgeLabel::Piece(3)).unwrap();
        assert_eq!(half.len(), 3);
        assert_abs_diff_eq!(half.area(), 2.0, epsilon = 1e-14);
        assert_eq!(half.labels.iter().filter(|l| **l == EdgeLabel::Piece(3)).count(), 1);
    }

    #[test]
    fn clip_through_vertex_keeps_labels_consistent() {
        let sq = LabeledPolygon::square(1.0, EdgeLabel::Box);
        let strip = sq.clip(&Vec2::new(1.0, 0.0), 0.25, EdgeLabel::Level).unwrap();
        assert_abs_diff_eq!(strip.area(), 2.5, epsilon = 1e-14);
        let tri = sq.clip(&Vec2::new(1.0, -1.0), 0.0, EdgeLabel::Level).unwrap();
        assert_eq!(tri.len(), 3);
        assert_abs_diff_eq!(tri.area(), 2.0, epsilon = 1e-14);
        // The new edge runs between the two opposite corners.
        let k = tri.labels.iter().position(|l| *l == EdgeLabel::Level).unwrap();
        let (a, b) = tri.edge(k);
        assert_abs_diff_eq!((a - b).norm(), 8f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn clip_away_everything() {
        let sq = LabeledPolygon::square(1.0, EdgeLabel::Box);
        assert!(sq.clip(&Vec2::new(1.0, 0.0), -1.0, EdgeLabel::Level).is_none());
        assert!(sq.clip(&Vec2::new(1.0, 0.0), -2.0, EdgeLabel::Level).is_none());
        assert_eq!(sq.clip(&Vec2::new(1.0, 0.0), 1.0, EdgeLabel::Level).unwrap().len(), 4);
    }
}
