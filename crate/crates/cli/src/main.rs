//! `blaschke-lab`: batch front end for the `blaschke` library.
//!
//! Every run prints a JSON manifest on stdout. Results go to `-o` (JSON for
//! objects, CSV for tables) or, without it, inline into the manifest.
//! Failures print a JSON error object on stderr and exit with 2
//! (validation), 3 (solver did not converge) or 4 (optimizer stall, best
//! value still written); `verify` exits with 1 when a margin fails.

mod commands;
mod error;
mod input;
mod svg;
mod table;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use blaschke::blaschke::{IterateConfig, SymmetrizationSchedule};
use blaschke::corpus::{Corpus, CorpusSize, DEFAULT_SEED};
use blaschke::functionals::{OptimizerConfig, SuiteConfig, SUITE_NAMES};
use blaschke::solver::{JacobianMode, SolverConfig};

use commands::{Output, Payload};
use error::{CliError, CliResult};

const SEED_ENV: &str = "BLASCHKE_LAB_SEED";

#[derive(Parser)]
#[command(name = "blaschke-lab", version, about = "Blaschke addition and affine functionals of log-concave functions")]
struct Cli {
    #[command(flatten)]
    opts: Options,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug, Serialize)]
struct Options {
    /// Residual tolerance of the solver.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Iteration cap of the solver, or of the optimizer for asa/geominimal.
    #[arg(long = "max-iter", global = true)]
    max_iter: Option<usize>,
    /// Direction grid: quantization for iterate, test bodies for
    /// asa/geominimal/verify.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Jacobian of the solver.
    #[arg(long, global = true, value_enum)]
    jacobian: Option<Jacobian>,
    /// CSV file for the solver trace (iteration, residual, step) of
    /// sum/homothety/symmetral/mean-symmetral; also written when the solver
    /// fails to converge.
    #[arg(long = "solver-trace", global = true)]
    solver_trace: Option<PathBuf>,
    /// Corpus and random-map seed; BLASCHKE_LAB_SEED takes precedence.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for parallel work.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Result file (or directory for `corpus`).
    #[arg(short = 'o', long = "out", global = true)]
    out: Option<PathBuf>,
    /// SVG figure.
    #[arg(long, global = true)]
    svg: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
enum Jacobian {
    Analytic,
    Fd,
}

#[derive(Subcommand, Clone, Debug)]
enum Command {
    /// Mass, entropy, W1, the surface area pair and the entropy identity.
    Compute { input: String },
    /// Blaschke sum of two functions or pairs.
    Sum { first: String, second: String },
    /// Blaschke homothety `lambda ⊙ f`.
    Homothety {
        input: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
    },
    /// Blaschke symmetral in the direction at `--angle` radians.
    Symmetral {
        input: String,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        angle: f64,
    },
    /// Mean Blaschke symmetral (a radial function).
    MeanSymmetral { input: String },
    /// Repeated symmetrization; writes the trace table.
    Iterate {
        input: String,
        /// `golden` or `list:a,b,...` (radians).
        #[arg(long, default_value = "golden")]
        schedule: String,
        #[arg(long, default_value_t = 24)]
        steps: usize,
        /// Skip the affine surface area column.
        #[arg(long)]
        no_omega: bool,
    },
    /// Projection body and the mass of its polar body.
    Projbody { input: String },
    /// Asymmetric LYZ body.
    Lyz { input: String },
    /// Affine surface area (optimizer value, an upper bound).
    Asa { input: String },
    /// Geominimal surface area (optimizer value, an upper bound).
    Geominimal { input: String },
    /// Inequality suite over a corpus; writes the report table.
    Verify {
        /// `all` or a comma list of suite names.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Corpus directory; the generated corpus for `--seed` otherwise.
        #[arg(long)]
        corpus: Option<String>,
        /// Interpolation parameters of the concavity checks: `a,b,...` or
        /// `lo..hi` in steps of 0.1.
        #[arg(long = "t-grid")]
        t_grid: Option<String>,
        /// Report CSV; same as `-o`.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Function instances per inequality.
        #[arg(long)]
        instances: Option<usize>,
    },
    /// Writes the generated corpus for `--seed` into the `-o` directory.
    Corpus,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Compute { .. } => "compute",
            Command::Sum { .. } => "sum",
            Command::Homothety { .. } => "homothety",
            Command::Symmetral { .. } => "symmetral",
            Command::MeanSymmetral { .. } => "mean-symmetral",
            Command::Iterate { .. } => "iterate",
            Command::Projbody { .. } => "projbody",
            Command::Lyz { .. } => "lyz",
            Command::Asa { .. } => "asa",
            Command::Geominimal { .. } => "geominimal",
            Command::Verify { .. } => "verify",
            Command::Corpus => "corpus",
        }
    }

    fn uses_grid(&self) -> bool {
        matches!(self, Command::Iterate { .. } | Command::Asa { .. } | Command::Geominimal { .. } | Command::Verify { .. })
    }

    fn uses_solver_trace(&self) -> bool {
        matches!(self, Command::Sum { .. } | Command::Homothety { .. } | Command::Symmetral { .. } | Command::MeanSymmetral { .. })
    }

    fn uses_seed(&self) -> bool {
        matches!(self, Command::Verify { .. } | Command::Corpus)
    }
}

#[derive(Serialize)]
struct InputDigest {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct RunManifest {
    command: String,
    inputs: Vec<InputDigest>,
    config: Value,
    tool_version: &'static str,
    seconds: f64,
    outputs: Vec<String>,
    exit_code: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<Value>,
}

fn seed(opts: &Options) -> CliResult<u64> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s.trim().parse().map_err(|e| CliError::validation(format!("{SEED_ENV}={s:?}: {e}"))),
        Err(_) => Ok(opts.seed.unwrap_or(DEFAULT_SEED)),
    }
}

fn solver_config(opts: &Options, optimizer_owns_cap: bool) -> CliResult<SolverConfig> {
    let mut cfg = SolverConfig::default();
    if let Some(t) = opts.tol {
        cfg.residual_tol = t;
    }
    if let (Some(m), false) = (opts.max_iter, optimizer_owns_cap) {
        cfg.max_iterations = m;
    }
    if let Some(j) = opts.jacobian {
        cfg.jacobian = match j {
            Jacobian::Analytic => JacobianMode::Analytic,
            Jacobian::Fd => JacobianMode::FiniteDifference,
        };
    }
    cfg.validate()?;
    Ok(cfg)
}

fn optimizer_config(opts: &Options, owns_cap: bool) -> CliResult<OptimizerConfig> {
    let mut cfg = OptimizerConfig::default();
    if let Some(g) = opts.grid {
        if g < 8 {
            return Err(CliError::validation("--grid needs at least 8 directions"));
        }
        cfg.grid = g;
    }
    if let (Some(m), true) = (opts.max_iter, owns_cap) {
        if m == 0 {
            return Err(CliError::validation("--max-iter must be positive"));
        }
        cfg.max_iterations = m;
    }
    Ok(cfg)
}

struct Run {
    inputs: Vec<InputDigest>,
    config: Value,
    output: Output,
}

fn loaded(paths: &[&String]) -> CliResult<Vec<input::Input>> {
    paths.iter().map(|p| input::load(p)).collect()
}

fn digests(inputs: &[input::Input]) -> Vec<InputDigest> {
    inputs.iter().map(|i| InputDigest { path: i.path.clone(), sha256: i.digest.clone() }).collect()
}

fn execute(cmd: &Command, opts: &Options) -> CliResult<Run> {
    if opts.grid.is_some() && !cmd.uses_grid() {
        return Err(CliError::validation(format!("--grid has no effect on {}", cmd.name())));
    }
    if opts.solver_trace.is_some() && !cmd.uses_solver_trace() {
        return Err(CliError::validation(format!("--solver-trace has no effect on {}", cmd.name())));
    }
    if opts.seed.is_some() && !cmd.uses_seed() {
        return Err(CliError::validation(format!("--seed has no effect on {}", cmd.name())));
    }
    if let Some(j) = opts.jobs {
        if j == 0 {
            return Err(CliError::validation("--jobs must be positive"));
        }
        // Fails only if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j).build_global();
    }
    let optimizer_owns_cap = matches!(cmd, Command::Asa { .. } | Command::Geominimal { .. });
    let solver = solver_config(opts, optimizer_owns_cap)?;
    let base = json!({ "solver": solver });
    let single = |path: &String, f: &dyn Fn(&input::Input) -> CliResult<Output>| -> CliResult<Run> {
        let inputs = loaded(&[path])?;
        let output = f(&inputs[0])?;
        Ok(Run { inputs: digests(&inputs), config: base.clone(), output })
    };
    match cmd {
        Command::Compute { input } => single(input, &|i| commands::compute(i, &solver)),
        Command::Sum { first, second } => {
            let inputs = loaded(&[first, second])?;
            let output = commands::sum(&inputs[0], &inputs[1], &solver)?;
            Ok(Run { inputs: digests(&inputs), config: base, output })
        }
        Command::Homothety { input, lambda } => {
            let mut run = single(input, &|i| commands::homothety(i, *lambda, &solver))?;
            run.config["lambda"] = json!(lambda);
            Ok(run)
        }
        Command::Symmetral { input, angle } => {
            let mut run = single(input, &|i| commands::symmetral(i, *angle, &solver))?;
            run.config["angle"] = json!(angle);
            Ok(run)
        }
        Command::MeanSymmetral { input } => single(input, &|i| commands::mean_symmetral(i, &solver)),
        Command::Iterate { input, schedule, steps, no_omega } => {
            let schedule: SymmetrizationSchedule = schedule.parse()?;
            let optimizer = optimizer_config(opts, false)?;
            let mut cfg = IterateConfig { solver: solver.clone(), optimizer, omega: !no_omega, ..IterateConfig::default() };
            if let Some(g) = opts.grid {
                cfg.direction_grid = g;
            }
            let config = json!({
                "solver": solver,
                "schedule": schedule.to_string(),
                "steps": steps,
                "direction_grid": cfg.direction_grid,
                "omega": cfg.omega,
                "optimizer": cfg.optimizer,
            });
            let inputs = loaded(&[input])?;
            let output = commands::iterate(&inputs[0], &schedule, *steps, &cfg)?;
            Ok(Run { inputs: digests(&inputs), config, output })
        }
        Command::Projbody { input } => single(input, &|i| commands::projbody(i, &solver)),
        Command::Lyz { input } => single(input, &|i| commands::lyz(i, &solver)),
        Command::Asa { input } | Command::Geominimal { input } => {
            let optimizer = optimizer_config(opts, true)?;
            let is_asa = matches!(cmd, Command::Asa { .. });
            let mut run = single(input, &|i| {
                if is_asa {
                    commands::asa(i, &solver, &optimizer)
                } else {
                    commands::geominimal(i, &solver, &optimizer)
                }
            })?;
            run.config["optimizer"] = json!(optimizer);
            Ok(run)
        }
        Command::Verify { suite, corpus, t_grid, instances, .. } => {
            let seed = seed(opts)?;
            let (corpus, inputs) = match corpus {
                Some(dir) => {
                    let (c, d) = input::load_corpus(dir)?;
                    (c, vec![InputDigest { path: dir.clone(), sha256: d }])
                }
                None => (Corpus::generate(seed, CorpusSize::default()), Vec::new()),
            };
            let suites = if suite == "all" { Vec::new() } else { suite.split(',').map(|s| s.trim().to_string()).collect() };
            let mut cfg = SuiteConfig { suites, seed, solver, optimizer: optimizer_config(opts, false)?, ..SuiteConfig::default() };
            if let Some(t) = t_grid {
                cfg.t_grid = commands::parse_t_grid(t)?;
            }
            if let Some(n) = instances {
                cfg.instances = *n;
            }
            cfg.validate().map_err(|e| {
                CliError::from(e).with_details(json!({ "known_suites": SUITE_NAMES }))
            })?;
            let config = json!({ "suite": cfg, "corpus": commands::corpus_summary(&corpus) });
            let output = commands::verify(&corpus, &cfg)?;
            Ok(Run { inputs, config, output })
        }
        Command::Corpus => {
            let Some(dir) = &opts.out else {
                return Err(CliError::validation("corpus needs -o DIR"));
            };
            if opts.svg.is_some() {
                return Err(CliError::validation("corpus has no figure"));
            }
            let seed = seed(opts)?;
            let corpus = Corpus::generate(seed, CorpusSize::default());
            let written = input::write_corpus(&corpus, dir)?;
            let output = Output {
                payload: Payload::Json(json!({ "directory": dir, "files": written.len() })),
                svg: None,
                exit: 0,
                note: None,
                files: written,
                solve_trace: None,
            };
            Ok(Run { inputs: Vec::new(), config: json!({ "seed": seed, "size": CorpusSize::default() }), output })
        }
    }
}

fn write_text(path: &Path, bytes: &[u8]) -> CliResult<String> {
    let shown = path.to_string_lossy().into_owned();
    fs::write(path, bytes).map_err(|e| CliError::io(&shown, &e))?;
    Ok(shown)
}

/// Writes the payload and the figure, returning the paths written and the
/// inline result when there is no `-o`.
fn persist(cmd: &Command, opts: &Options, output: &Output) -> CliResult<(Vec<String>, Option<Value>)> {
    if opts.svg.is_some() && output.svg.is_none() {
        return Err(CliError::validation(format!("{} has no figure", cmd.name())));
    }
    let mut written = output.files.clone();
    let mut inline = None;
    match (&opts.out, cmd) {
        (_, Command::Corpus) => {
            if let Payload::Json(v) = &output.payload {
                inline = Some(v.clone());
            }
        }
        (Some(path), _) => {
            let bytes = match &output.payload {
                Payload::Json(v) => {
                    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
                    s.push('\n');
                    s.into_bytes()
                }
                Payload::Table(t) => t.to_csv()?,
            };
            written.push(write_text(path, &bytes)?);
        }
        (None, _) => {
            inline = Some(match &output.payload {
                Payload::Json(v) => v.clone(),
                Payload::Table(t) => t.to_json(),
            });
        }
    }
    if let (Some(path), Some(svg)) = (&opts.svg, &output.svg) {
        written.push(write_text(path, svg.as_bytes())?);
    }
    if let (Some(path), Some(trace)) = (&opts.solver_trace, &output.solve_trace) {
        written.push(write_text(path, &commands::solve_trace_table(trace).to_csv()?)?);
    }
    Ok((written, inline))
}

/// Folds `verify --report` into `-o`.
fn normalize(cli: &mut Cli) -> CliResult<()> {
    if let Command::Verify { report: Some(path), .. } = &cli.command {
        if cli.opts.out.is_some() {
            return Err(CliError::validation("give the report path once, with --report or -o"));
        }
        cli.opts.out = Some(path.clone());
    }
    Ok(())
}

fn main() -> ExitCode {
    let mut cli = Cli::parse();
    let start = Instant::now();
    let outcome = normalize(&mut cli).and_then(|()| execute(&cli.command, &cli.opts)).and_then(|run| {
        let (outputs, result) = persist(&cli.command, &cli.opts, &run.output)?;
        Ok((run, outputs, result))
    });
    match outcome {
        Ok((run, outputs, result)) => {
            let manifest = RunManifest {
                command: cli.command.name().to_string(),
                inputs: run.inputs,
                config: run.config,
                tool_version: env!("CARGO_PKG_VERSION"),
                seconds: start.elapsed().as_secs_f64(),
                outputs,
                exit_code: run.output.exit,
                note: run.output.note,
                result,
            };
            // A closed pipe on stdout is not an error of the run.
            let _ = writeln!(std::io::stdout().lock(), "{}", serde_json::to_string_pretty(&manifest).expect("manifest serializes"));
            ExitCode::from(run.output.exit)
        }
        Err(mut e) => {
            if let (Some(path), Some(trace)) = (&cli.opts.solver_trace, &e.trace) {
                let written = commands::solve_trace_table(trace).to_csv().map_err(CliError::from).and_then(|b| write_text(path, &b));
                match written {
                    Ok(path) => e.details["trace_file"] = json!(path),
                    Err(w) => e.details["trace_file_error"] = json!(w.message),
                }
            }
            let _ = writeln!(std::io::stderr().lock(), "{}", serde_json::to_string_pretty(&json!({ "error": e })).expect("errors serialize"));
            ExitCode::from(e.code)
        }
    }
}
