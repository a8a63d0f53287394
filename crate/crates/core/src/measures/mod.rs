//! Surface area measure pairs `(μ_f, ν_f)` and what can be read off them.

mod cosmic;

use std::fmt;
use std::f64::consts::PI;

use nalgebra::{Matrix2, SymmetricEigen};
use serde::{Deserialize, Serialize};

pub use cosmic::{cosmic_distance, cosmic_distance_to_radial, CosmicFamily, TestFunction, RADIAL_EMBEDDING};

use crate::convex2d::{angle_of, reflect_point, unit, Vec2};
use crate::error::{Error, Result};
use crate::logconcave::{LogConcave, PolyhedralLogConcave, RadialLogConcave};

/// Gradient atoms closer than this are merged.
pub const MU_MERGE_TOL: f64 = 1e-9;

/// Atomic pair in the plane: `μ` on points, `ν` on unit directions. Atoms
/// are merged and kept in a canonical order (μ lexicographic, ν by angle).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PairDoc", into = "PairDoc")]
pub struct SurfaceAreaPair {
    mu: Vec<(Vec2, f64)>,
    nu: Vec<(Vec2, f64)>,
}

impl SurfaceAreaPair {
    pub fn new(mu: Vec<(Vec2, f64)>, nu: Vec<(Vec2, f64)>) -> Result<Self> {
        for (z, a) in &mu {
            if !(z.x.is_finite() && z.y.is_finite()) || !(*a >= 0.0 && a.is_finite()) {
                return Err(Error::validation("mu", "atoms need finite points and nonnegative masses"));
            }
        }
        let mut nu_unit = Vec::with_capacity(nu.len());
        for (t, b) in &nu {
            let n = t.norm();
            if !(n > 0.0 && n.is_finite()) || !(*b >= 0.0 && b.is_finite()) {
                return Err(Error::validation("nu", "atoms need nonzero directions and nonnegative masses"));
            }
            nu_unit.push((t / n, *b));
        }
        Ok(SurfaceAreaPair { mu: merge_points(mu), nu: merge_dirs(nu_unit) })
    }

    pub fn mu(&self) -> &[(Vec2, f64)] {
        &self.mu
    }

    pub fn nu(&self) -> &[(Vec2, f64)] {
        &self.nu
    }

    pub fn mu_total(&self) -> f64 {
        self.mu.iter().map(|(_, a)| a).sum()
    }

    pub fn nu_total(&self) -> f64 {
        self.nu.iter().map(|(_, b)| b).sum()
    }

    /// `Σ a z + Σ b θ`.
    pub fn centering_defect(&self) -> Vec2 {
        let m: Vec2 = self.mu.iter().map(|(z, a)| *a * z).sum();
        let n: Vec2 = self.nu.iter().map(|(t, b)| *b * t).sum();
        m + n
    }

    /// Defect divided by `Σ a|z| + Σ b` (zero when that vanishes).
    pub fn relative_centering_defect(&self) -> f64 {
        let scale = self.w1();
        if scale == 0.0 {
            0.0
        } else {
            self.centering_defect().norm() / scale
        }
    }

    /// `W_1 = Σ a|z| + Σ b`.
    pub fn w1(&self) -> f64 {
        self.mu.iter().map(|(z, a)| a * z.norm()).sum::<f64>() + self.nu_total()
    }

    pub fn add(&self, other: &SurfaceAreaPair) -> SurfaceAreaPair {
        let mu = self.mu.iter().chain(&other.mu).copied().collect();
        let nu = self.nu.iter().chain(&other.nu).copied().collect();
        SurfaceAreaPair { mu: merge_points(mu), nu: merge_dirs(nu) }
    }

    pub fn scale(&self, lambda: f64) -> SurfaceAreaPair {
        assert!(lambda > 0.0, "pair scaling needs a positive factor");
        SurfaceAreaPair {
            mu: self.mu.iter().map(|(z, a)| (*z, lambda * a)).collect(),
            nu: self.nu.iter().map(|(t, b)| (*t, lambda * b)).collect(),
        }
    }

    /// Push-forward under the reflection about `u^⊥`.
    pub fn reflect(&self, u: &Vec2) -> SurfaceAreaPair {
        let mu = self.mu.iter().map(|(z, a)| (reflect_point(z, u), *a)).collect();
        let nu = self.nu.iter().map(|(t, b)| (reflect_point(t, u), *b)).collect();
        SurfaceAreaPair { mu: merge_points(mu), nu: merge_dirs(nu) }
    }

    /// Pair of `f ∘ T` for `f` with this pair: `z -> Tᵀz` with mass
    /// `a / |det T|`, and `θ -> Tᵀθ / |Tᵀθ|` with mass `b |Tᵀθ| / |det T|`.
    pub fn linear_image(&self, t: &nalgebra::Matrix2<f64>) -> Result<SurfaceAreaPair> {
        let det = t.determinant().abs();
        if !(det > 0.0 && det.is_finite()) {
            return Err(Error::SingularTransform);
        }
        let tt = t.transpose();
        let mu = self.mu.iter().map(|(z, a)| (tt * z, a / det)).collect();
        let nu = self
            .nu
            .iter()
            .map(|(th, b)| {
                let v = tt * th;
                (v / v.norm(), b * v.norm() / det)
            })
            .collect();
        SurfaceAreaPair::new(mu, nu)
    }

    pub fn check_admissible(&self) -> Result<()> {
        let report = admissible(self);
        if report.is_admissible() {
            Ok(())
        } else {
            Err(Error::NotAdmissible(report))
        }
    }

    /// `δ(f, g) = Σ a h_g(z) + Σ b h_{supp g}(θ)` with `f` the function of
    /// this pair.
    pub fn first_variation(&self, g: &LogConcave) -> Result<f64> {
        let mut total = 0.0;
        for (z, a) in &self.mu {
            let h = g.support_function(z);
            if !h.is_finite() {
                return Err(Error::InfiniteSupport(z.x, z.y));
            }
            total += a * h;
        }
        for (t, b) in &self.nu {
            total += b * g.domain_support(t).ok_or(Error::UnboundedSupportTerm)?;
        }
        Ok(total)
    }

    /// `δ(f, 1_K)` for a body given by its support function.
    pub fn first_variation_body(&self, support: impl Fn(&Vec2) -> f64) -> f64 {
        self.mu.iter().map(|(z, a)| a * support(z)).sum::<f64>() + self.nu.iter().map(|(t, b)| b * support(t)).sum::<f64>()
    }
}

/// Outcome of the three admissibility conditions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub nonzero_mu: bool,
    pub centered: bool,
    pub defect: [f64; 2],
    pub spanning: bool,
    /// Normal of a line through the origin carrying every atom, when
    /// spanning fails.
    pub offending_normal: Option<[f64; 2]>,
}

impl AdmissibilityReport {
    pub fn is_admissible(&self) -> bool {
        self.nonzero_mu && self.centered && self.spanning
    }
}

impl fmt::Display for AdmissibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.nonzero_mu {
            parts.push("mu is zero".to_string());
        }
        if !self.centered {
            parts.push(format!("centering defect ({:.3e}, {:.3e})", self.defect[0], self.defect[1]));
        }
        if !self.spanning {
            let n = self.offending_normal.unwrap_or([0.0, 0.0]);
            parts.push(format!("atoms lie on the line with normal ({:.4}, {:.4})", n[0], n[1]));
        }
        if parts.is_empty() {
            write!(f, "admissible")
        } else {
            write!(f, "{}", parts.join("; "))
        }
    }
}

/// Relative centering tolerance for admissibility.
pub const CENTERING_TOL: f64 = 1e-9;

pub fn admissible(p: &SurfaceAreaPair) -> AdmissibilityReport {
    let nonzero_mu = p.mu_total() > 0.0;
    let d = p.centering_defect();
    let centered = d.norm() <= CENTERING_TOL * p.w1().max(f64::MIN_POSITIVE) || d.norm() == 0.0;
    let mut m = Matrix2::zeros();
    for (z, a) in &p.mu {
        m += *a * z * z.transpose();
    }
    for (t, b) in &p.nu {
        m += *b * t * t.transpose();
    }
    let eig = SymmetricEigen::new(m);
    let (imin, lmin) = if eig.eigenvalues[0] <= eig.eigenvalues[1] { (0, eig.eigenvalues[0]) } else { (1, eig.eigenvalues[1]) };
    let trace = m.trace();
    let spanning = trace > 0.0 && lmin > 1e-12 * trace;
    let offending_normal = (!spanning).then(|| {
        let v = eig.eigenvectors.column(imin);
        [v[0], v[1]]
    });
    AdmissibilityReport { nonzero_mu, centered, defect: [d.x, d.y], spanning, offending_normal }
}

/// Per-piece cell masses and per-edge boundary masses, aligned with the
/// pieces of `f` and the edges of its domain.
pub fn extract_aligned(f: &PolyhedralLogConcave) -> (Vec<f64>, Vec<f64>) {
    let regions = f.cell_regions();
    let mu = regions
        .iter()
        .enumerate()
        .map(|(i, r)| {
            r.as_ref().map_or(0.0, |r| {
                let p = &f.pieces()[i];
                crate::logconcave::integrate::ring_integrals(&r.vertices, &p.gradient, p.offset).0
            })
        })
        .collect();
    (mu, f.edge_masses(&regions))
}

/// `(μ_f, ν_f)`: one μ atom `(z_i, ∫_{cell_i} f)` per active piece and one ν
/// atom `(outer normal, ∫_edge f)` per domain edge.
pub fn extract_pair(f: &PolyhedralLogConcave) -> SurfaceAreaPair {
    let (mu_mass, nu_mass) = extract_aligned(f);
    let mu = f.pieces().iter().zip(mu_mass).filter(|(_, a)| *a > 0.0).map(|(p, a)| (p.gradient, a)).collect();
    let nu = match f.domain_polygon() {
        Some(poly) => poly.edge_normals().into_iter().zip(nu_mass).filter(|(_, b)| *b > 0.0).map(|((u, _), b)| (u, b)).collect(),
        None => Vec::new(),
    };
    SurfaceAreaPair::new(mu, nu).expect("extracted atoms are finite")
}

/// Rotation-invariant pair in `R^n`: μ spread uniformly over spheres of
/// radius `g`, ν uniform on the unit sphere with total mass `boundary`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RadialPairDoc", into = "RadialPairDoc")]
pub struct RadialPair {
    dim: usize,
    grad: Vec<(f64, f64)>,
    boundary: f64,
}

impl RadialPair {
    pub fn new(dim: usize, grad: Vec<(f64, f64)>, boundary: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::validation("dim", "dimension must be at least 1"));
        }
        if grad.iter().any(|(g, a)| !(*g >= 0.0 && g.is_finite()) || !(*a >= 0.0 && a.is_finite())) {
            return Err(Error::validation("grad", "atoms need g >= 0 and nonnegative masses"));
        }
        if !(boundary >= 0.0 && boundary.is_finite()) {
            return Err(Error::validation("boundary", "must be nonnegative"));
        }
        let mut grad: Vec<(f64, f64)> = grad.into_iter().filter(|(_, a)| *a > 0.0).collect();
        grad.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(grad.len());
        for (g, a) in grad {
            match merged.last_mut() {
                Some(last) if (g - last.0).abs() <= MU_MERGE_TOL * (1.0 + g) => {
                    last.0 = (last.0 * last.1 + g * a) / (last.1 + a);
                    last.1 += a;
                }
                _ => merged.push((g, a)),
            }
        }
        if merged.is_empty() {
            return Err(Error::validation("grad", "total gradient mass must be positive"));
        }
        if boundary == 0.0 && merged.iter().all(|(g, _)| *g == 0.0) {
            return Err(Error::validation("grad", "without boundary mass some atom needs g > 0"));
        }
        Ok(RadialPair { dim, grad: merged, boundary })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `(g, mass)` sorted by `g`.
    pub fn grad(&self) -> &[(f64, f64)] {
        &self.grad
    }

    pub fn boundary(&self) -> f64 {
        self.boundary
    }

    pub fn mu_total(&self) -> f64 {
        self.grad.iter().map(|(_, a)| a).sum()
    }

    pub fn w1(&self) -> f64 {
        self.grad.iter().map(|(g, a)| g * a).sum::<f64>() + self.boundary
    }

    /// Sum of two pairs of the same dimension.
    pub fn add(&self, other: &RadialPair) -> Result<RadialPair> {
        if self.dim != other.dim {
            return Err(Error::validation("dim", "radial pairs of different dimensions"));
        }
        let grad = self.grad.iter().chain(&other.grad).copied().collect();
        RadialPair::new(self.dim, grad, self.boundary + other.boundary)
    }

    pub fn scale(&self, lambda: f64) -> RadialPair {
        assert!(lambda > 0.0);
        RadialPair {
            dim: self.dim,
            grad: self.grad.iter().map(|(g, a)| (*g, lambda * a)).collect(),
            boundary: lambda * self.boundary,
        }
    }

    /// Planar pair with every sphere replaced by `directions` equally spaced
    /// atoms (starting at angle 0).
    pub fn embed(&self, directions: usize) -> Result<SurfaceAreaPair> {
        if self.dim != 2 {
            return Err(Error::Unsupported("only planar radial pairs embed".into()));
        }
        let dirs: Vec<Vec2> = (0..directions).map(|k| unit(2.0 * PI * k as f64 / directions as f64)).collect();
        let share = 1.0 / directions as f64;
        let mut mu = Vec::new();
        for (g, a) in &self.grad {
            if *g == 0.0 {
                mu.push((Vec2::zeros(), *a));
            } else {
                mu.extend(dirs.iter().map(|u| (*g * u, a * share)));
            }
        }
        let nu = if self.boundary > 0.0 { dirs.iter().map(|u| (*u, self.boundary * share)).collect() } else { Vec::new() };
        SurfaceAreaPair::new(mu, nu)
    }

    /// `δ(f, g)`; exact for radial `g` of the same dimension, otherwise via
    /// the planar embedding at 1024 directions.
    pub fn first_variation(&self, g: &LogConcave) -> Result<f64> {
        match g {
            LogConcave::Radial(r) if r.dim() == self.dim => {
                let mut total = 0.0;
                for (s, a) in &self.grad {
                    let h = r.support_at(*s);
                    if !h.is_finite() {
                        return Err(Error::InfiniteSupport(*s, 0.0));
                    }
                    total += a * h;
                }
                if self.boundary > 0.0 {
                    total += self.boundary * r.support_radius().ok_or(Error::UnboundedSupportTerm)?;
                }
                Ok(total)
            }
            _ => self.embed(1024)?.first_variation(g),
        }
    }
}

/// `(slope, annulus mass)` per profile segment, plus the boundary term
/// `e^{-w(R)} n ω_n R^{n-1}` for a finite support radius.
pub fn extract_radial_pair(f: &RadialLogConcave) -> RadialPair {
    let grad = f.segments().iter().map(|s| (s.slope, f.segment_mass(s))).collect();
    let boundary = match f.support_radius() {
        Some(r) => {
            let w = f.knots().last().unwrap().1;
            (-w).exp() * crate::logconcave::integrate::sphere_area(f.dim()) * r.powi(f.dim() as i32 - 1)
        }
        None => 0.0,
    };
    RadialPair::new(f.dim(), grad, boundary).expect("profiles have positive mass")
}

/// Pair of either representation, planar pairs for polyhedral functions.
pub fn extract(f: &LogConcave) -> AnyPair {
    match f {
        LogConcave::Polyhedral(p) => AnyPair::Planar(extract_pair(p)),
        LogConcave::Radial(r) => AnyPair::Radial(extract_radial_pair(r)),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum AnyPair {
    Planar(SurfaceAreaPair),
    Radial(RadialPair),
}

impl AnyPair {
    pub fn w1(&self) -> f64 {
        match self {
            AnyPair::Planar(p) => p.w1(),
            AnyPair::Radial(r) => r.w1(),
        }
    }

    pub fn mu_total(&self) -> f64 {
        match self {
            AnyPair::Planar(p) => p.mu_total(),
            AnyPair::Radial(r) => r.mu_total(),
        }
    }

    pub fn first_variation(&self, g: &LogConcave) -> Result<f64> {
        match self {
            AnyPair::Planar(p) => p.first_variation(g),
            AnyPair::Radial(r) => r.first_variation(g),
        }
    }

    /// Sum; a radial pair meeting a planar one is embedded at
    /// [`RADIAL_EMBEDDING`] directions first.
    pub fn add(&self, other: &AnyPair) -> Result<AnyPair> {
        match (self, other) {
            (AnyPair::Radial(a), AnyPair::Radial(b)) => Ok(AnyPair::Radial(a.add(b)?)),
            _ => Ok(AnyPair::Planar(self.planar(RADIAL_EMBEDDING)?.add(&other.planar(RADIAL_EMBEDDING)?))),
        }
    }

    pub fn scale(&self, lambda: f64) -> AnyPair {
        match self {
            AnyPair::Planar(p) => AnyPair::Planar(p.scale(lambda)),
            AnyPair::Radial(r) => AnyPair::Radial(r.scale(lambda)),
        }
    }

    /// Push-forward under the reflection about `u^⊥`; radial pairs are fixed.
    pub fn reflect(&self, u: &Vec2) -> AnyPair {
        match self {
            AnyPair::Planar(p) => AnyPair::Planar(p.reflect(u)),
            AnyPair::Radial(r) => AnyPair::Radial(r.clone()),
        }
    }

    /// Average over all rotations and reflections.
    pub fn haar_average(&self) -> Result<RadialPair> {
        match self {
            AnyPair::Planar(p) => haar_average(p),
            AnyPair::Radial(r) => Ok(r.clone()),
        }
    }

    /// Planar form; radial pairs are embedded at `directions` atoms.
    pub fn planar(&self, directions: usize) -> Result<SurfaceAreaPair> {
        match self {
            AnyPair::Planar(p) => Ok(p.clone()),
            AnyPair::Radial(r) => r.embed(directions),
        }
    }
}

/// `W_1` from the pair.
pub fn quermassintegral_w1(p: &SurfaceAreaPair) -> f64 {
    p.w1()
}

/// `W_1` from the perimeters of superlevel sets.
pub fn quermassintegral_layercake(f: &LogConcave) -> f64 {
    f.layer_cake_w1()
}

/// Average of the pair over all rotations (and reflections).
pub fn haar_average(p: &SurfaceAreaPair) -> Result<RadialPair> {
    let grad = p.mu().iter().map(|(z, a)| (z.norm(), *a)).collect();
    RadialPair::new(2, grad, p.nu_total())
}

fn merge_points(mut list: Vec<(Vec2, f64)>) -> Vec<(Vec2, f64)> {
    list.retain(|(_, a)| *a > 0.0);
    list.sort_by(|a, b| a.0.x.total_cmp(&b.0.x).then(a.0.y.total_cmp(&b.0.y)));
    let mut out: Vec<(Vec2, f64)> = Vec::with_capacity(list.len());
    for (z, a) in list {
        // Matches within tolerance can sit a few entries back after sorting on x.
        let found = out.iter_mut().rev().take_while(|(w, _)| z.x - w.x <= MU_MERGE_TOL * (1.0 + z.norm())).find(|(w, _)| (z - *w).norm() <= MU_MERGE_TOL * (1.0 + z.norm()));
        match found {
            Some((w, b)) => {
                *w = (*b * *w + a * z) / (*b + a);
                *b += a;
            }
            None => out.push((z, a)),
        }
    }
    out
}

fn merge_dirs(list: Vec<(Vec2, f64)>) -> Vec<(Vec2, f64)> {
    let list = list.into_iter().filter(|(_, b)| *b > 0.0).collect();
    let mut out = crate::convex2d::merge_directions(list, MU_MERGE_TOL);
    out.sort_by(|a, b| angle_of(&a.0).total_cmp(&angle_of(&b.0)));
    out
}

#[derive(Serialize, Deserialize)]
struct PairDoc {
    dim: usize,
    mu: Vec<[f64; 3]>,
    nu: Vec<[f64; 3]>,
}

impl TryFrom<PairDoc> for SurfaceAreaPair {
    type Error = Error;
    fn try_from(d: PairDoc) -> Result<Self> {
        if d.dim != 2 {
            return Err(Error::validation("dim", "planar pairs only; use the radial format otherwise"));
        }
        SurfaceAreaPair::new(
            d.mu.iter().map(|a| (Vec2::new(a[0], a[1]), a[2])).collect(),
            d.nu.iter().map(|a| (Vec2::new(a[0], a[1]), a[2])).collect(),
        )
    }
}

impl From<SurfaceAreaPair> for PairDoc {
    fn from(p: SurfaceAreaPair) -> Self {
        PairDoc {
            dim: 2,
            mu: p.mu.iter().map(|(z, a)| [z.x, z.y, *a]).collect(),
            nu: p.nu.iter().map(|(t, b)| [t.x, t.y, *b]).collect(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RadialPairDoc {
    dim: usize,
    grad: Vec<(f64, f64)>,
    boundary: f64,
}

impl TryFrom<RadialPairDoc> for RadialPair {
    type Error = Error;
    fn try_from(d: RadialPairDoc) -> Result<Self> {
        RadialPair::new(d.dim, d.grad, d.boundary)
    }
}

impl From<RadialPair> for RadialPairDoc {
    fn from(p: RadialPair) -> Self {
        RadialPairDoc { dim: p.dim, grad: p.grad, boundary: p.boundary }
    }
}
