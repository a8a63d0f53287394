use serde_json::{json, Value};

use blaschke::blaschke::{
    iterate_symmetrization, lyz_body, polar_projection_mass, projection_body, symmetral_pair, IterateConfig,
    SymmetrizationSchedule, SymmetrizationTrace,
};
use blaschke::convex2d::{unit, Polygon, Vec2};
use blaschke::corpus::Corpus;
use blaschke::functionals::{
    affine_isoperimetric_bound, affine_surface_area, entropy_identity_check, geominimal_surface_area, run_inequality_suite,
    InequalityReport, OmegaEstimate, OptimizerConfig, SuiteConfig,
};
use blaschke::logconcave::LogConcave;
use blaschke::measures::{quermassintegral_layercake, AnyPair};
use blaschke::solver::{solve, SolveTrace, SolverConfig};

use crate::error::{CliError, CliResult, EXIT_FAILED_CHECK, EXIT_NO_CONVERGENCE, EXIT_OPTIMIZER_STALL};
use crate::input::{function_json, pair_json, Input};
use crate::svg::{color, line_chart, PlaneFigure, Series};
use crate::table::Table;

pub enum Payload {
    Json(Value),
    Table(Table),
}

/// What a command produced. A nonzero `exit` still writes the payload.
pub struct Output {
    pub payload: Payload,
    pub svg: Option<String>,
    pub exit: u8,
    pub note: Option<String>,
    /// Files written by the command itself.
    pub files: Vec<String>,
    /// Trace of the solve behind the result, for `--solver-trace`.
    pub solve_trace: Option<SolveTrace>,
}

impl Output {
    fn json(v: Value) -> Self {
        Output { payload: Payload::Json(v), svg: None, exit: 0, note: None, files: Vec::new(), solve_trace: None }
    }

    fn with_svg(mut self, svg: String) -> Self {
        self.svg = Some(svg);
        self
    }
}

fn contour_figure(f: &LogConcave, title: &str) -> String {
    let mut fig = PlaneFigure::default();
    fig.contours(f, color(0));
    if let Some(d) = f.as_polyhedral().and_then(|p| p.domain_polygon()) {
        fig.polygon(d, "#444444", 1.0, Some("domain".into()));
    }
    fig.render(title)
}

pub fn compute(input: &Input, solver: &SolverConfig) -> CliResult<Output> {
    let f = input.function(solver)?;
    let pair = input.pair();
    let identity = entropy_identity_check(&f)?;
    let (defect, kind) = match &pair {
        AnyPair::Planar(p) => (p.relative_centering_defect(), "polyhedral"),
        AnyPair::Radial(_) => (0.0, "radial"),
    };
    let report = json!({
        "kind": kind,
        "dim": f.dim(),
        "mass": f.mass(),
        "entropy": f.entropy(),
        "max_value": f.max_value(),
        "w1": pair.w1(),
        "w1_layer_cake": quermassintegral_layercake(&f),
        "relative_centering_defect": defect,
        "delta_f_f": identity.delta,
        "entropy_identity_rhs": identity.rhs,
        "entropy_identity_error": identity.relative_error,
        "pair": pair_json(&pair),
    });
    let out = Output::json(report);
    Ok(if f.dim() == 2 { out.with_svg(contour_figure(&f, "level sets")) } else { out })
}

/// Solves `pair` and wraps the function with its figure and trace.
fn solved_output(pair: &AnyPair, solver: &SolverConfig, title: &str) -> CliResult<Output> {
    let (f, trace) = solve(pair, solver)?;
    let svg = (f.dim() == 2).then(|| contour_figure(&f, title));
    Ok(Output { payload: Payload::Json(function_json(&f)), svg, exit: 0, note: None, files: Vec::new(), solve_trace: Some(trace) })
}

pub fn sum(a: &Input, b: &Input, solver: &SolverConfig) -> CliResult<Output> {
    solved_output(&a.pair().add(&b.pair())?, solver, "Blaschke sum")
}

pub fn homothety(input: &Input, lambda: f64, solver: &SolverConfig) -> CliResult<Output> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(CliError::validation(format!("--lambda must be a positive number, got {lambda}")));
    }
    solved_output(&input.pair().scale(lambda), solver, &format!("{lambda} ⊙ f"))
}

pub fn symmetral(input: &Input, angle: f64, solver: &SolverConfig) -> CliResult<Output> {
    let pair = symmetral_pair(&unit(angle), &input.pair())?;
    solved_output(&pair, solver, &format!("Blaschke symmetral, angle {angle}"))
}

pub fn mean_symmetral(input: &Input, solver: &SolverConfig) -> CliResult<Output> {
    let pair = AnyPair::Radial(input.pair().haar_average()?);
    solved_output(&pair, solver, "mean Blaschke symmetral")
}

const SOLVE_TRACE_COLUMNS: [&str; 3] = ["iteration", "residual", "step"];

pub fn solve_trace_table(trace: &SolveTrace) -> Table {
    let mut t = Table::new(&SOLVE_TRACE_COLUMNS);
    for r in &trace.iterates {
        t.row(vec![r.iteration.to_string(), Table::num(r.residual), Table::num(r.step)]);
    }
    t
}

const TRACE_COLUMNS: [&str; 10] =
    ["step", "angle", "w1", "mass", "entropy", "omega_sharp", "cosmic_distance", "atoms", "quantized", "status"];

fn trace_table(trace: &SymmetrizationTrace) -> Table {
    let mut t = Table::new(&TRACE_COLUMNS);
    for r in &trace.records {
        t.row(vec![
            r.step.to_string(),
            Table::num(r.angle),
            Table::num(r.w1),
            Table::num(r.mass),
            Table::num(r.entropy),
            Table::num(r.omega_sharp),
            Table::num(r.cosmic_distance),
            r.atoms.to_string(),
            r.quantized.to_string(),
            "ok".into(),
        ]);
    }
    if let Some((step, e)) = &trace.failure {
        let mut row = vec![String::new(); TRACE_COLUMNS.len()];
        row[0] = step.to_string();
        row[9] = format!("error: {e}");
        t.row(row);
    }
    t
}

pub fn iterate(input: &Input, schedule: &SymmetrizationSchedule, steps: usize, cfg: &IterateConfig) -> CliResult<Output> {
    let f = input.function(&cfg.solver)?;
    let trace = iterate_symmetrization(&f, schedule, steps, cfg)?;
    let x: Vec<f64> = trace.records.iter().map(|r| r.step as f64).collect();
    let column = |name: &str, get: fn(&blaschke::blaschke::SymmetrizationRecord) -> f64| Series {
        name: name.into(),
        values: trace.records.iter().map(get).collect(),
    };
    let mut series = vec![
        column("W1", |r| r.w1),
        column("J", |r| r.mass),
        column("entropy", |r| r.entropy),
        column("cosmic distance", |r| r.cosmic_distance),
    ];
    if cfg.omega {
        series.push(column("omega (upper bound)", |r| r.omega_sharp));
    }
    let svg = line_chart(&format!("symmetrization, {schedule} schedule"), &x, "step", &series);
    let (exit, note) = match &trace.failure {
        Some((step, e)) => (EXIT_NO_CONVERGENCE, Some(format!("stopped at step {step}: {e}"))),
        None => (0, None),
    };
    Ok(Output { payload: Payload::Table(trace_table(&trace)), svg: Some(svg), exit, note, files: Vec::new(), solve_trace: None })
}

fn overlay(f: &LogConcave, body: &Polygon, label: &str) -> String {
    let mut fig = PlaneFigure::default();
    if f.dim() == 2 {
        fig.contours(f, color(0));
    }
    fig.polygon(body, color(1), 2.0, Some(label.into()));
    fig.render(label)
}

fn polygon_json(p: &Polygon) -> Value {
    json!({
        "vertices": p.vertices().iter().map(|v| [v.x, v.y]).collect::<Vec<_>>(),
        "area": p.area(),
        "perimeter": p.perimeter(),
    })
}

pub fn projbody(input: &Input, solver: &SolverConfig) -> CliResult<Output> {
    let f = input.function(solver)?;
    let body = projection_body(&f)?;
    let mass = polar_projection_mass(&f)?;
    let mut v = polygon_json(&body);
    v["polar_mass"] = json!({ "cone_route": mass.cone_route, "polar_route": mass.polar_route });
    Ok(Output::json(v).with_svg(overlay(&f, &body, "projection body")))
}

pub fn lyz(input: &Input, solver: &SolverConfig) -> CliResult<Output> {
    let f = input.function(solver)?;
    let body = lyz_body(&f)?;
    Ok(Output::json(polygon_json(&body)).with_svg(overlay(&f, &body, "LYZ body")))
}

fn estimate_output(f: &LogConcave, est: OmegaEstimate, bound: Option<f64>, label: &str) -> Output {
    let radii = est.body.radii().to_vec();
    let mut v = json!({
        "value": est.value,
        "exact": est.exact,
        "upper_bound": !est.exact,
        "best_omega_q": est.best_omega_q,
        "seed": est.seed,
        "iterations": est.iterations,
        "stalled": est.stalled,
        "body_radii": radii,
    });
    if let Some(b) = bound {
        v["isoperimetric_bound"] = json!(b);
    }
    let points: Vec<Vec2> = radii.iter().enumerate().map(|(k, r)| *r * est.body.direction(k)).collect();
    let mut fig = PlaneFigure::default();
    if f.dim() == 2 {
        fig.contours(f, color(0));
    }
    fig.outline(points, color(1), 2.0, Some(label.into()));
    let svg = Some(fig.render(label));
    let (exit, note) = if est.stalled {
        (EXIT_OPTIMIZER_STALL, Some("optimizer hit its iteration cap; the best value so far was written".to_string()))
    } else {
        (0, None)
    };
    Output { payload: Payload::Json(v), svg, exit, note, files: Vec::new(), solve_trace: None }
}

pub fn asa(input: &Input, solver: &SolverConfig, cfg: &OptimizerConfig) -> CliResult<Output> {
    let f = input.function(solver)?;
    let est = affine_surface_area(&f, cfg)?;
    Ok(estimate_output(&f, est, Some(affine_isoperimetric_bound(&f)), "best test body"))
}

pub fn geominimal(input: &Input, solver: &SolverConfig, cfg: &OptimizerConfig) -> CliResult<Output> {
    let f = input.function(solver)?;
    let est = geominimal_surface_area(&f, cfg)?;
    Ok(estimate_output(&f, est, None, "best convex test body"))
}

const REPORT_COLUMNS: [&str; 11] =
    ["name", "instance", "lhs", "rhs", "margin", "scale", "relative_margin", "equality_witness", "passes", "digest", "status"];

/// Timing stays out of the table so reruns are byte-identical.
fn report_table(reports: &[InequalityReport]) -> Table {
    let mut t = Table::new(&REPORT_COLUMNS);
    for r in reports {
        let numbers = match r.error {
            None => vec![Table::num(r.lhs), Table::num(r.rhs), Table::num(r.margin), Table::num(r.scale), Table::num(r.margin / r.scale.max(f64::MIN_POSITIVE))],
            Some(_) => vec![String::new(); 5],
        };
        let mut row = vec![r.name.clone(), r.instance.clone()];
        row.extend(numbers);
        row.push(r.equality_witness.to_string());
        row.push(r.passes().to_string());
        row.push(r.digest.clone());
        row.push(r.error.as_ref().map_or("ok".into(), |e| format!("error: {e}")));
        t.row(row);
    }
    t
}

pub fn verify(corpus: &Corpus, cfg: &SuiteConfig) -> CliResult<Output> {
    let reports = run_inequality_suite(corpus, cfg)?;
    let failed = reports.iter().filter(|r| !r.passes()).count();
    let (exit, note) = if failed > 0 {
        (EXIT_FAILED_CHECK, Some(format!("{failed} of {} reports failed", reports.len())))
    } else {
        (0, Some(format!("all {} reports passed", reports.len())))
    };
    Ok(Output { payload: Payload::Table(report_table(&reports)), svg: None, exit, note, files: Vec::new(), solve_trace: None })
}

/// `a,b,...`, or `lo..hi` in steps of 0.1 with both ends included.
pub fn parse_t_grid(s: &str) -> CliResult<Vec<f64>> {
    let number = |t: &str| t.trim().parse::<f64>().map_err(|e| CliError::validation(format!("--t-grid: {t:?}: {e}")));
    if let Some((lo, hi)) = s.split_once("..") {
        let (lo, hi) = (number(lo)?, number(hi)?);
        if !(lo <= hi) {
            return Err(CliError::validation(format!("--t-grid: empty range {s:?}")));
        }
        // Integer steps keep the grid free of accumulated rounding.
        let (a, b) = ((lo * 10.0).round() as i64, (hi * 10.0).round() as i64);
        if (a as f64 / 10.0 - lo).abs() > 1e-12 || (b as f64 / 10.0 - hi).abs() > 1e-12 {
            return Err(CliError::validation(format!("--t-grid: range ends must be multiples of 0.1, got {s:?}")));
        }
        return Ok((a..=b).map(|k| k as f64 / 10.0).collect());
    }
    s.split(',').map(number).collect()
}

pub fn corpus_summary(corpus: &Corpus) -> Value {
    json!({
        "functions": corpus.functions.len(),
        "bounded": corpus.bounded().count(),
        "unbounded": corpus.unbounded().count(),
        "radial": corpus.radial().count(),
        "polygon_pairs": corpus.polygon_pairs.len(),
    })
}
