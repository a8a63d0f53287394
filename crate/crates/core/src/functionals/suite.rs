//! Batch verification of the inequalities satisfied by Blaschke addition
//! and the affine functionals.
//!
//! Every check yields one [`InequalityReport`] with `margin >= 0` meaning
//! the inequality holds. The `Ω_♯` checks compare optimizer outputs, which
//! are only upper bounds. To keep both sides of an inequality comparable,
//! each side is evaluated as a minimum over one shared set of test bodies
//! (every body the optimizer returned for any function of the instance), so
//! the exact pair-level identities behind the inequality carry over to the
//! estimates.

use std::f64::consts::PI;
use std::time::Instant;

use nalgebra::{Matrix2, Rotation2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use super::{
    affine_surface_area, affine_surface_area_of_pair, geominimal_surface_area_of_pair, omega_q_of_pair,
    optimizer::omega_sharp, OptimizerConfig, StarBody,
};
use crate::blaschke::mean_blaschke_symmetral;
use crate::convex2d::{blaschke_sum_2d, unit, Polygon, Vec2};
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::logconcave::LogConcave;
use crate::measures::{extract, SurfaceAreaPair, RADIAL_EMBEDDING};
use crate::solver::{solve, SolverConfig};

pub const SUITE_NAMES: [&str; 10] = [
    "minkowski_first",
    "entropy_concavity",
    "ks_multiplicative",
    "mixed_volume",
    "omega_superadditivity",
    "omega_symmetral",
    "omega_comparison",
    "petty",
    "delta_covariance",
    "omega_covariance",
];

/// Directions of the radial embedding in the `Ω_♯` covariance check.
const COVARIANCE_EMBEDDING: usize = 1 << 14;

/// Relative slack allowed on every margin.
pub const MARGIN_TOL: f64 = 1e-8;
/// Relative bound on `|margin|` at constructed equality cases.
pub const WITNESS_TOL: f64 = 1e-6;

#[derive(Clone, Debug, Serialize)]
pub struct InequalityReport {
    pub name: String,
    pub instance: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `>= 0` when the inequality holds.
    pub margin: f64,
    /// `max(|lhs|, |rhs|)`, the unit for tolerances.
    pub scale: f64,
    /// The instance is a constructed equality case.
    pub equality_witness: bool,
    /// SHA-256 of the instance inputs.
    pub digest: String,
    pub seconds: f64,
    /// Set when the instance could not be evaluated; numbers are then 0.
    pub error: Option<String>,
}

impl InequalityReport {
    pub fn passes(&self) -> bool {
        self.error.is_none()
            && self.margin >= -MARGIN_TOL * self.scale
            && (!self.equality_witness || self.margin.abs() <= WITNESS_TOL * self.scale)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteConfig {
    /// Subset of [`SUITE_NAMES`]; empty runs all.
    pub suites: Vec<String>,
    pub t_grid: Vec<f64>,
    /// Function instances per inequality (witnesses come on top).
    pub instances: usize,
    pub polygon_pairs: usize,
    /// Seed for the random linear maps.
    pub seed: u64,
    pub solver: SolverConfig,
    pub optimizer: OptimizerConfig,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            suites: Vec::new(),
            t_grid: (1..=9).map(|k| k as f64 / 10.0).collect(),
            instances: 6,
            polygon_pairs: 20,
            seed: crate::corpus::DEFAULT_SEED,
            solver: SolverConfig::default(),
            optimizer: OptimizerConfig::default(),
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(s) = self.suites.iter().find(|s| !SUITE_NAMES.contains(&s.as_str())) {
            return Err(Error::validation("suite", format!("unknown suite {s:?}")));
        }
        if self.t_grid.is_empty() || self.t_grid.iter().any(|t| !(*t > 0.0 && *t < 1.0)) {
            return Err(Error::validation("t_grid", "needs points strictly between 0 and 1"));
        }
        self.solver.validate()
    }

    fn selected(&self, name: &str) -> bool {
        self.suites.is_empty() || self.suites.iter().any(|s| s == name)
    }
}

/// `(lhs, rhs, margin)`.
type Outcome = Result<(f64, f64, f64)>;

struct Job {
    name: &'static str,
    instance: String,
    witness: bool,
    digest: String,
    run: Box<dyn Fn() -> Outcome + Send + Sync>,
}

fn digest(name: &str, inputs: serde_json::Value) -> String {
    let bytes = serde_json::to_vec(&json!({ "name": name, "inputs": inputs })).expect("inputs serialize");
    hex::encode(Sha256::digest(bytes))
}

fn job(name: &'static str, instance: String, witness: bool, inputs: serde_json::Value, run: impl Fn() -> Outcome + Send + Sync + 'static) -> Job {
    Job { digest: digest(name, inputs), name, instance, witness, run: Box::new(run) }
}

fn execute(job: &Job) -> InequalityReport {
    let start = Instant::now();
    let outcome = (job.run)();
    let seconds = start.elapsed().as_secs_f64();
    let (lhs, rhs, margin, error) = match outcome {
        Ok((l, r, m)) if l.is_finite() && r.is_finite() && m.is_finite() => (l, r, m, None),
        Ok(_) => (0.0, 0.0, 0.0, Some("non-finite value".to_string())),
        Err(e) => (0.0, 0.0, 0.0, Some(e.to_string())),
    };
    InequalityReport {
        name: job.name.to_string(),
        instance: job.instance.clone(),
        lhs,
        rhs,
        margin,
        scale: lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE),
        equality_witness: job.witness,
        digest: job.digest.clone(),
        seconds,
        error,
    }
}

fn planar(f: &LogConcave) -> Result<SurfaceAreaPair> {
    extract(f).planar(RADIAL_EMBEDDING)
}

/// `min over bodies of Ω_Q(pair)`.
fn best_over(pair: &SurfaceAreaPair, bodies: &[StarBody]) -> f64 {
    bodies.iter().map(|q| omega_q_of_pair(pair, q)).fold(f64::INFINITY, f64::min)
}

/// `R = rotation(a) · diag(s, ±s/κ) · rotation(b)` with condition number
/// `κ ∈ [1, 10]`.
fn random_map(rng: &mut impl Rng) -> Matrix2<f64> {
    let s = rng.gen_range(0.7..1.5);
    let kappa = rng.gen_range(1.0..10.0);
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let d = Matrix2::new(s, 0.0, 0.0, sign * s / kappa);
    Rotation2::new(rng.gen_range(0.0..PI)).into_inner() * d * Rotation2::new(rng.gen_range(0.0..PI)).into_inner()
}

struct Pools {
    bounded: Vec<(String, LogConcave)>,
    unbounded: Vec<(String, LogConcave)>,
    radial: Vec<(String, LogConcave)>,
}

impl Pools {
    fn new(corpus: &Corpus) -> Pools {
        let pick = |it: &mut dyn Iterator<Item = (&str, LogConcave)>| it.map(|(n, f)| (n.to_string(), f)).collect::<Vec<_>>();
        Pools {
            bounded: pick(&mut corpus.bounded().map(|(n, p)| (n, LogConcave::from(p.clone())))),
            unbounded: pick(&mut corpus.unbounded().map(|(n, p)| (n, LogConcave::from(p.clone())))),
            radial: pick(&mut corpus.radial().filter(|(_, r)| r.dim() == 2).map(|(n, r)| (n, LogConcave::from(r.clone())))),
        }
    }

    /// Cycles bounded, unbounded and radial members.
    fn mixed(&self, i: usize) -> Option<&(String, LogConcave)> {
        let pool = match i % 3 {
            0 => &self.bounded,
            1 => &self.unbounded,
            _ => &self.radial,
        };
        let pool = if pool.is_empty() { &self.bounded } else { pool };
        (!pool.is_empty()).then(|| &pool[(i / 3) % pool.len()])
    }

    fn polyhedral(&self, i: usize) -> Option<&(String, LogConcave)> {
        let pool = if i % 2 == 0 || self.unbounded.is_empty() { &self.bounded } else { &self.unbounded };
        (!pool.is_empty()).then(|| &pool[(i / 2) % pool.len()])
    }

    fn bounded(&self, i: usize) -> Option<&(String, LogConcave)> {
        (!self.bounded.is_empty()).then(|| &self.bounded[i % self.bounded.len()])
    }
}

/// Runs the selected checks on `corpus`. Failures of single instances are
/// recorded in their reports; only an invalid configuration is an error.
pub fn run_inequality_suite(corpus: &Corpus, cfg: &SuiteConfig) -> Result<Vec<InequalityReport>> {
    cfg.validate()?;
    let pools = Pools::new(corpus);
    let mut jobs = Vec::new();
    let n = cfg.instances;
    let shift = Vec2::new(0.37, -0.21);

    if cfg.selected("minkowski_first") {
        let mut cases = Vec::new();
        for i in 0..n {
            // g needs bounded support whenever f has a boundary part.
            if let (Some(f), Some(g)) = (pools.mixed(i), pools.bounded(i + 1)) {
                cases.push((f.clone(), g.clone(), false));
            }
        }
        for f in [pools.bounded(0), pools.unbounded.first()].into_iter().flatten() {
            if let Ok(g) = f.1.translate(&shift) {
                cases.push((f.clone(), (format!("{}+shift", f.0), g), true));
            }
        }
        for ((fname, f), (gname, g), witness) in cases {
            let inputs = json!([f, g]);
            jobs.push(job("minkowski_first", format!("{fname}|{gname}"), witness, inputs, move || {
                let lhs = extract(&f).first_variation(&g)?;
                let j = f.mass();
                let rhs = j * (2.0 + g.mass().ln()) + f.entropy();
                Ok((lhs, rhs, lhs - rhs))
            }));
        }
    }

    if cfg.selected("entropy_concavity") {
        let mut cases = Vec::new();
        for i in 0..n {
            if let (Some(a), Some(b)) = (pools.polyhedral(i), pools.polyhedral(i + 3)) {
                cases.push((a.clone(), b.clone(), false));
            }
        }
        if pools.radial.len() >= 2 {
            cases.push((pools.radial[0].clone(), pools.radial[1].clone(), false));
        }
        if let Some(f) = pools.bounded(0) {
            cases.push((f.clone(), (format!("{}+shift", f.0), f.1.translate(&shift)?), true));
        }
        for ((n1, f1), (n2, f2), witness) in cases {
            for &t in &cfg.t_grid {
                let (f1, f2, solver) = (f1.clone(), f2.clone(), cfg.solver.clone());
                let inputs = json!([f1, f2, t]);
                jobs.push(job("entropy_concavity", format!("{n1}|{n2}|t={t}"), witness, inputs, move || {
                    let pair = extract(&f1).scale(1.0 - t).add(&extract(&f2).scale(t))?;
                    let (h, _) = solve(&pair, &solver)?;
                    let lhs = h.entropy();
                    let rhs = (1.0 - t) * f1.entropy() + t * f2.entropy();
                    Ok((lhs, rhs, lhs - rhs))
                }));
            }
        }
    }

    let polygon_pairs: Vec<_> = corpus.polygon_pairs.iter().take(cfg.polygon_pairs).collect();

    if cfg.selected("ks_multiplicative") {
        let mut cases: Vec<(String, Polygon, Polygon, bool)> =
            polygon_pairs.iter().map(|p| (p.name.clone(), p.first.clone(), p.second.clone(), false)).collect();
        if let Some(p) = polygon_pairs.first() {
            cases.push((format!("{}-first+shift", p.name), p.first.clone(), p.first.translate(&shift), true));
        }
        for (name, k, l, witness) in cases {
            for &t in &cfg.t_grid {
                let (k, l) = (k.clone(), l.clone());
                let inputs = json!([k, l, t]);
                jobs.push(job("ks_multiplicative", format!("{name}|t={t}"), witness, inputs, move || {
                    let b = blaschke_sum_2d(&k.scale(1.0 - t), &l.scale(t))?;
                    let (vk, vl) = (k.area(), l.area());
                    let m = (1.0 - t) * vk + t * vl;
                    let lhs = b.area().sqrt();
                    let rhs = m * vk.powf(-(1.0 - t) * vk / (2.0 * m)) * vl.powf(-t * vl / (2.0 * m));
                    Ok((lhs, rhs, lhs - rhs))
                }));
            }
        }
    }

    if cfg.selected("mixed_volume") {
        let mut cases = Vec::new();
        for (i, p) in polygon_pairs.iter().enumerate() {
            let m = &polygon_pairs[(i + 1) % polygon_pairs.len()].first;
            cases.push((p.name.clone(), p.first.clone(), p.second.clone(), m.clone(), false));
        }
        if let Some(p) = polygon_pairs.first() {
            let k = &p.first;
            cases.push((format!("{}-first x3", p.name), k.clone(), k.translate(&shift), k.translate(&(-shift)), true));
        }
        for (name, k, l, m, witness) in cases {
            let inputs = json!([k, l, m]);
            jobs.push(job("mixed_volume", name, witness, inputs, move || {
                let h = |s: &Polygon| s.edge_normals().iter().map(|(u, len)| len * m.support(u)).sum::<f64>();
                let lhs = h(&k) + h(&l);
                let (vk, vl) = (k.area(), l.area());
                let rhs = (vk + vl) * (2.0 + m.area().ln()) - vk * vk.ln() - vl * vl.ln();
                Ok((lhs, rhs, lhs - rhs))
            }));
        }
    }

    if cfg.selected("omega_superadditivity") {
        let mut cases = Vec::new();
        for i in 0..n {
            if let (Some(f), Some(g)) = (pools.mixed(i), pools.mixed(i + 4)) {
                cases.push((f.clone(), g.clone(), false));
            }
        }
        if let Some(f) = pools.bounded(0) {
            cases.push((f.clone(), (format!("{}+shift", f.0), f.1.translate(&shift)?), true));
        }
        for ((fname, f), (gname, g), witness) in cases {
            let opt = cfg.optimizer.clone();
            let inputs = json!([f, g, opt]);
            jobs.push(job("omega_superadditivity", format!("{fname}|{gname}"), witness, inputs, move || {
                let (pf, pg) = (planar(&f)?, planar(&g)?);
                let sum = pf.add(&pg);
                let bodies: Vec<StarBody> =
                    [&sum, &pf, &pg].iter().map(|p| affine_surface_area_of_pair(p, &opt, &[]).body).collect();
                // Ω_♯^{3/2} = √2 · inf Ω_Q.
                let lhs = 2f64.sqrt() * best_over(&sum, &bodies);
                let rhs = 2f64.sqrt() * (best_over(&pf, &bodies) + best_over(&pg, &bodies));
                Ok((lhs, rhs, lhs - rhs))
            }));
        }
    }

    if cfg.selected("omega_symmetral") {
        let mut cases = Vec::new();
        for i in 0..n {
            if let Some(f) = pools.mixed(i) {
                cases.push((f.clone(), unit(0.4 + 1.1 * i as f64), false));
            }
        }
        // Symmetric about the vertical axis, reflected across it.
        let rect = LogConcave::indicator(Polygon::rectangle(Vec2::new(-1.0, -0.4), Vec2::new(1.0, 0.4))?);
        cases.push((("rectangle".to_string(), rect), Vec2::new(1.0, 0.0), true));
        for ((name, f), u, witness) in cases {
            let opt = cfg.optimizer.clone();
            let inputs = json!([f, [u.x, u.y], opt]);
            jobs.push(job("omega_symmetral", format!("{name}|u=({:.4},{:.4})", u.x, u.y), witness, inputs, move || {
                let p = planar(&f)?;
                let reflected = p.reflect(&u);
                let sym = p.scale(0.5).add(&reflected.scale(0.5));
                let bodies: Vec<StarBody> = [&sym, &p].iter().map(|q| affine_surface_area_of_pair(q, &opt, &[]).body).collect();
                // Ω_Q(R_u f) = Ω_{R_u Q}(f), and R_u Q is centered.
                let lhs = omega_sharp(best_over(&sym, &bodies));
                let rhs = omega_sharp(best_over(&p, &bodies).min(best_over(&reflected, &bodies)));
                Ok((lhs, rhs, lhs - rhs))
            }));
        }
    }

    if cfg.selected("omega_comparison") {
        let mut cases = Vec::new();
        for i in 0..n {
            if let Some(f) = pools.mixed(i) {
                cases.push((f.clone(), false));
            }
        }
        cases.extend(pools.radial.first().map(|f| (f.clone(), true)));
        for ((name, f), witness) in cases {
            let (opt, solver) = (cfg.optimizer.clone(), cfg.solver.clone());
            let inputs = json!([f, opt]);
            jobs.push(job("omega_comparison", name, witness, inputs, move || {
                let lhs = affine_surface_area(&f, &opt)?.value;
                let sym: LogConcave = mean_blaschke_symmetral(&f, &solver)?.into();
                let rhs = affine_surface_area(&sym, &opt)?.value;
                Ok((lhs, rhs, rhs - lhs))
            }));
        }
    }

    if cfg.selected("petty") {
        let mut cases = Vec::new();
        for i in 0..n {
            if let Some(f) = pools.polyhedral(i) {
                cases.push((f.clone(), false));
            }
        }
        cases.push((("unit-disk".to_string(), crate::logconcave::RadialLogConcave::ball_indicator(2, 1.0, 1.0)?.into()), true));
        for ((name, f), witness) in cases {
            let opt = cfg.optimizer.clone();
            let inputs = json!([f, opt]);
            jobs.push(job("petty", name, witness, inputs, move || {
                let (omega, g) = match &f {
                    LogConcave::Radial(_) => (affine_surface_area(&f, &opt)?.value, super::geominimal_surface_area(&f, &opt)?.value),
                    LogConcave::Polyhedral(_) => {
                        let p = planar(&f)?;
                        let geo = geominimal_surface_area_of_pair(&p, &opt, &[]);
                        // The convex minimizer is also a candidate for Ω_♯.
                        let inf = affine_surface_area_of_pair(&p, &opt, &[]).best_omega_q.min(omega_q_of_pair(&p, &geo.body));
                        (omega_sharp(inf), geo.value)
                    }
                };
                let lhs = omega.powi(3);
                let rhs = 2.0 * PI * g * g;
                Ok((lhs, rhs, rhs - lhs))
            }));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    if cfg.selected("delta_covariance") {
        for i in 0..n {
            let (Some((fname, f)), Some((gname, g))) = (pools.polyhedral(i), pools.bounded(i + 2)) else { continue };
            let t = random_map(&mut rng);
            let (f, g) = (f.clone(), g.clone());
            let inputs = json!([f, g, t]);
            jobs.push(job("delta_covariance", format!("{fname}|{gname}"), false, inputs, move || {
                let det = t.determinant().abs();
                let inv = t.try_inverse().ok_or(Error::SingularTransform)?;
                let lhs = extract(&f.compose_linear(&t)?).first_variation(&g)? * det;
                let rhs = extract(&f).first_variation(&g.compose_linear(&inv)?)?;
                Ok((lhs, rhs, 1e-9 * lhs.abs().max(rhs.abs()) - (lhs - rhs).abs()))
            }));
        }
    }

    if cfg.selected("omega_covariance") {
        // Polyhedral functions have Ω_♯ = 0 and their estimates are grid
        // artifacts, so this check runs on embedded radial profiles.
        let mut cases: Vec<(String, LogConcave)> = pools.radial.iter().take(n).cloned().collect();
        cases.push(("unit-disk".to_string(), crate::logconcave::RadialLogConcave::ball_indicator(2, 1.0, 1.0)?.into()));
        for (name, f) in cases {
            let t = random_map(&mut rng);
            let opt = cfg.optimizer.clone();
            let inputs = json!([f, t, opt]);
            jobs.push(job("omega_covariance", name, false, inputs, move || {
                // Ω_Q(f∘T) = Ω_{T^{-T}Q}(f) |det T|^{-1/2}.
                // Dense enough that mapped atoms stay closer than the body grid
                // (the map changes angular densities by up to κ²).
                let det = t.determinant().abs();
                let p = extract(&f).planar(COVARIANCE_EMBEDDING)?;
                let pt = p.linear_image(&t)?;
                let first = affine_surface_area_of_pair(&p, &opt, &[]);
                let mapped = affine_surface_area_of_pair(&pt, &opt, &[first.body.linear_image(&t.transpose())?]);
                let inv_t = t.transpose().try_inverse().ok_or(Error::SingularTransform)?;
                let back = affine_surface_area_of_pair(&p, &opt, &[mapped.body.linear_image(&inv_t)?]);
                let lhs = mapped.value * det.cbrt();
                let rhs = first.value.min(back.value);
                Ok((lhs, rhs, 0.01 * rhs - (lhs - rhs).abs()))
            }));
        }
    }

    Ok(jobs.par_iter().map(execute).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::CorpusSize;

    fn small() -> Corpus {
        Corpus::generate(3, CorpusSize { bounded: 3, unbounded: 3, radial: 3, polygon_pairs: 3 })
    }

    #[test]
    fn cheap_suites_pass() {
        let cfg = SuiteConfig {
            suites: ["minkowski_first", "ks_multiplicative", "mixed_volume", "delta_covariance"].map(String::from).to_vec(),
            instances: 3,
            ..SuiteConfig::default()
        };
        let reports = run_inequality_suite(&small(), &cfg).unwrap();
        assert!(!reports.is_empty());
        for r in &reports {
            assert!(r.passes(), "{r:?}");
        }
        assert!(reports.iter().any(|r| r.equality_witness));
    }

    #[test]
    fn unknown_suite_is_rejected() {
        let cfg = SuiteConfig { suites: vec!["nope".into()], ..SuiteConfig::default() };
        assert!(run_inequality_suite(&small(), &cfg).is_err());
    }

    #[test]
    fn digests_are_stable() {
        let cfg = SuiteConfig { suites: vec!["mixed_volume".into()], ..SuiteConfig::default() };
        let a: Vec<String> = run_inequality_suite(&small(), &cfg).unwrap().into_iter().map(|r| r.digest).collect();
        let b: Vec<String> = run_inequality_suite(&small(), &cfg).unwrap().into_iter().map(|r| r.digest).collect();
        assert_eq!(a, b);
    }
}
