//! Deterministic random test functions and polygons.
//!
//! Generators reject samples whose cells or edges carry less than a small
//! fraction of the mass, so every instance is well conditioned for the
//! solver and the pair has exactly one atom per piece and per domain edge.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::convex2d::{unit, Polygon, Vec2};
use crate::logconcave::{AffinePiece, Domain, LogConcave, PolyhedralLogConcave, RadialLogConcave};
use crate::measures::extract_pair;

pub const DEFAULT_SEED: u64 = 0x5eed_b1a5;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub name: String,
    pub function: LogConcave,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolygonPair {
    pub name: String,
    pub first: Polygon,
    pub second: Polygon,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSize {
    pub bounded: usize,
    pub unbounded: usize,
    pub radial: usize,
    pub polygon_pairs: usize,
}

impl Default for CorpusSize {
    fn default() -> Self {
        CorpusSize { bounded: 30, unbounded: 20, radial: 20, polygon_pairs: 20 }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Corpus {
    pub functions: Vec<CorpusEntry>,
    pub polygon_pairs: Vec<PolygonPair>,
}

impl Corpus {
    pub fn generate(seed: u64, size: CorpusSize) -> Corpus {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut functions = Vec::new();
        for i in 0..size.bounded {
            functions.push(CorpusEntry { name: format!("bounded-{i:02}"), function: random_bounded(&mut rng).into() });
        }
        for i in 0..size.unbounded {
            functions.push(CorpusEntry { name: format!("unbounded-{i:02}"), function: random_unbounded(&mut rng).into() });
        }
        for i in 0..size.radial {
            // Every fourth profile lives in R^3.
            let dim = if i % 4 == 3 { 3 } else { 2 };
            functions.push(CorpusEntry { name: format!("radial-{i:02}"), function: random_radial(&mut rng, dim).into() });
        }
        let polygon_pairs = (0..size.polygon_pairs)
            .map(|i| {
                let n1 = rng.gen_range(3..=8);
                let n2 = rng.gen_range(3..=8);
                PolygonPair { name: format!("polygons-{i:02}"), first: random_polygon(&mut rng, n1, 1.0), second: random_polygon(&mut rng, n2, 1.0) }
            })
            .collect();
        Corpus { functions, polygon_pairs }
    }

    /// The corpus used by the acceptance run: 30 bounded and 20 unbounded
    /// polyhedral functions, 20 radial profiles and 20 polygon pairs.
    pub fn standard() -> Corpus {
        Self::generate(DEFAULT_SEED, CorpusSize::default())
    }

    pub fn polyhedral(&self) -> impl Iterator<Item = (&str, &PolyhedralLogConcave)> {
        self.functions.iter().filter_map(|e| e.function.as_polyhedral().map(|p| (e.name.as_str(), p)))
    }

    pub fn radial(&self) -> impl Iterator<Item = (&str, &RadialLogConcave)> {
        self.functions.iter().filter_map(|e| e.function.as_radial().map(|r| (e.name.as_str(), r)))
    }

    pub fn bounded(&self) -> impl Iterator<Item = (&str, &PolyhedralLogConcave)> {
        self.polyhedral().filter(|(_, p)| p.domain_polygon().is_some())
    }

    pub fn unbounded(&self) -> impl Iterator<Item = (&str, &PolyhedralLogConcave)> {
        self.polyhedral().filter(|(_, p)| p.domain_polygon().is_none())
    }
}

/// Convex hull of `n` points at sorted random angles and radii in
/// `[0.6, 1.4]·scale`, redrawn until it has `n` vertices and no short edge.
pub fn random_polygon(rng: &mut impl Rng, n: usize, scale: f64) -> Polygon {
    assert!(n >= 3);
    loop {
        let mut angles: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
        angles.sort_by(f64::total_cmp);
        let pts: Vec<Vec2> = angles.iter().map(|a| scale * rng.gen_range(0.6..1.4) * unit(*a)).collect();
        let Ok(p) = Polygon::convex_hull(&pts) else { continue };
        if p.len() == n && p.edge_normals().iter().all(|(_, len)| *len > 0.15 * scale) {
            return p;
        }
    }
}

fn well_spread(f: &PolyhedralLogConcave) -> bool {
    let pair = extract_pair(f);
    let j = pair.mu_total();
    let nu = pair.nu_total();
    pair.mu().len() == f.pieces().len()
        && pair.mu().iter().all(|(_, a)| *a >= 0.03 * j)
        && pair.nu().iter().all(|(_, b)| *b >= 0.02 * nu)
        && f.domain_polygon().map_or(true, |d| d.len() == pair.nu().len())
}

/// `1 to 4` pieces with gradients in the disk of radius 1.5 on a random
/// polygon with 3 to 7 vertices.
pub fn random_bounded(rng: &mut impl Rng) -> PolyhedralLogConcave {
    loop {
        let n = rng.gen_range(3..=7);
        let scale = rng.gen_range(0.8..1.6);
        let domain = random_polygon(rng, n, scale);
        let k = rng.gen_range(1..=4);
        let pieces = (0..k)
            .map(|_| {
                let z = rng.gen_range(0.0..1.5) * unit(rng.gen_range(0.0..2.0 * PI));
                AffinePiece::new(z, rng.gen_range(-0.3..0.3))
            })
            .collect();
        let Ok(f) = PolyhedralLogConcave::new(pieces, Domain::Bounded(domain)) else { continue };
        if well_spread(&f) {
            return f;
        }
    }
}

/// `3 to 6` pieces whose gradients surround the origin with inradius at
/// least 0.3.
pub fn random_unbounded(rng: &mut impl Rng) -> PolyhedralLogConcave {
    loop {
        let k = rng.gen_range(3..=6);
        let pieces: Vec<AffinePiece> = (0..k)
            .map(|_| {
                let z = rng.gen_range(0.5..2.0) * unit(rng.gen_range(0.0..2.0 * PI));
                AffinePiece::new(z, rng.gen_range(-0.5..0.5))
            })
            .collect();
        let Ok(f) = PolyhedralLogConcave::new(pieces, Domain::Unbounded) else { continue };
        if f.coercivity_rate().map_or(false, |a| a >= 0.3) && well_spread(&f) {
            return f;
        }
    }
}

/// Convex profile with 1 to 4 linear segments and either a finite support
/// radius or a linear tail.
pub fn random_radial(rng: &mut impl Rng, dim: usize) -> RadialLogConcave {
    let segments = rng.gen_range(1..=4);
    let bounded = rng.gen_bool(0.5);
    let mut slope = if bounded { rng.gen_range(0.0..0.8) } else { rng.gen_range(0.3..1.0) };
    let mut r = 0.0;
    let mut w = rng.gen_range(-0.5..0.5);
    let mut knots = vec![(r, w)];
    for _ in 0..segments {
        let len = rng.gen_range(0.3..1.2);
        r += len;
        w += slope * len;
        knots.push((r, w));
        slope += rng.gen_range(0.2..1.5);
    }
    let tail = (!bounded).then_some(slope);
    RadialLogConcave::new(dim, knots, tail).expect("increasing slopes give a convex profile")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic() {
        let size = CorpusSize { bounded: 3, unbounded: 3, radial: 4, polygon_pairs: 2 };
        let a = serde_json::to_string(&Corpus::generate(7, size)).unwrap();
        let b = serde_json::to_string(&Corpus::generate(7, size)).unwrap();
        assert_eq!(a, b);
        let c = serde_json::to_string(&Corpus::generate(8, size)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn standard_counts() {
        let c = Corpus::standard();
        assert_eq!(c.bounded().count(), 30);
        assert_eq!(c.unbounded().count(), 20);
        assert_eq!(c.radial().count(), 20);
        assert_eq!(c.polygon_pairs.len(), 20);
    }
}
