//! Command-line front end.
//!
//! Settings are resolved in three layers: built-in defaults, then an optional
//! TOML config file (`--config`), then command-line flags. Flags always win.
//!
//! Config-file keys (all optional):
//!
//! | key            | meaning                                   |
//! |----------------|-------------------------------------------|
//! | `method`       | one of the CLI method names               |
//! | `epsilon`      | scale parameter, `0 < eps < 1`            |
//! | `cells`        | number of grid cells `J`                  |
//! | `dt`           | macro step                                |
//! | `horizon`      | final time `T`                            |
//! | `potential`    | `zero`, `quadratic`, `sine`, `exp-sine`, `charge-quadratic` |
//! | `micro_steps`  | `M`                                       |
//! | `micro_used`   | `M̃`                                      |
//! | `hbar`, `mass`, `x_center`, `steps` | physical smoke run   |

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::analysis::{
    bench_errors, bench_timing, convergence_study, BenchRow, BenchSettings, ConvergenceRow,
    MethodCase,
};
use crate::error::{Error, Result};
use crate::model::{
    build_grid, default_micro_steps, default_micro_used, init_packet, init_scaled, MethodId,
    PhysicalConfig, PotentialSpec, SolverConfig, WaveField,
};
use crate::operators::{assemble_physical, stability_margin};
use crate::splitting::{drive, run_with, RunOptions, RunResult, Snapshots};

pub const TIMEOUT_ENV: &str = "MULTISPLIT_TIMEOUT_S";

pub const DEFAULT_EPSILON: f64 = 1e-2;
pub const DEFAULT_CELLS: usize = 100;
pub const DEFAULT_DT: f64 = 8e-4;
pub const DEFAULT_HORIZON: f64 = 0.1;
pub const TIMING_DT_GRID: [f64; 3] = [8e-4, 4e-4, 2e-4];
pub const ERROR_MICRO_GRID: [(usize, usize); 3] = [(1, 1), (10, 5), (100, 50)];

#[derive(Debug, Parser)]
#[command(
    name = "multisplit",
    version,
    about = "Multiscale splitting solvers for the 1D Schrödinger equation"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Run one method and write wave-field snapshots.
    Run {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Method: fd, ab, aba, bab, full-ab, hmm-ab, extra-ab, extra2-ab, extra2-aba (default ab).
        #[arg(long)]
        method: Option<String>,
        /// Number of snapshots (plus the initial state).
        #[arg(long, default_value_t = 10)]
        snapshots: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Observed orders under repeated halving of dt against a fine unsplit run.
    Convergence {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Comma-separated methods.
        #[arg(long, default_value = "ab,extra-ab,extra2-aba")]
        methods: String,
        /// Number of dt levels (each half the previous).
        #[arg(long, default_value_t = 3)]
        levels: usize,
        /// Reference step is the finest dt divided by this.
        #[arg(long, default_value_t = 10)]
        refinement: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Error table against the unsplit scheme at equal dt.
    BenchError {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, default_value = "ab,aba,hmm-ab,extra-ab,extra2-ab")]
        methods: String,
        /// Comma-separated M:Mtilde pairs.
        #[arg(long, default_value = "1:1,10:5,100:50")]
        micro: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Wall-time table over a dt grid.
    BenchTime {
        #[command(flatten)]
        shape: ShapeArgs,
        #[arg(long, default_value = "fd,ab,aba,bab,extra-ab,extra2-ab")]
        methods: String,
        /// Comma-separated macro steps.
        #[arg(long = "dt", default_value = "0.0008,0.0004,0.0002")]
        dt_grid: String,
        /// Timed repetitions per row (median reported).
        #[arg(long, default_value_t = 3)]
        repetitions: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Short unsplit run of the physical packet problem.
    PhysicalSmoke {
        #[arg(long, visible_alias = "J")]
        cells: Option<usize>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        potential: Option<String>,
        #[arg(long)]
        hbar: Option<f64>,
        #[arg(long)]
        mass: Option<f64>,
        #[arg(long)]
        x_center: Option<f64>,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Args, Default)]
struct ProblemArgs {
    #[command(flatten)]
    shape: ShapeArgs,
    /// Macro step dt (default 8e-4).
    #[arg(long)]
    dt: Option<f64>,
}

#[derive(Debug, Args, Default)]
struct ShapeArgs {
    /// Scale parameter epsilon (default 1e-2).
    #[arg(long)]
    epsilon: Option<f64>,
    /// Grid cells J (default 100).
    #[arg(long, visible_alias = "J")]
    cells: Option<usize>,
    /// Final time T (default 0.1).
    #[arg(long, visible_alias = "T")]
    horizon: Option<f64>,
    /// Potential: zero, quadratic, sine, exp-sine, charge-quadratic (default sine).
    #[arg(long)]
    potential: Option<String>,
    /// Micro steps M per A stage (default round(1/epsilon)).
    #[arg(long, visible_alias = "M")]
    micro_steps: Option<usize>,
    /// Computed micro steps Mtilde (default max(1, M/2)).
    #[arg(long, visible_alias = "Mtilde")]
    micro_used: Option<usize>,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// TOML config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV (stdout when omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Write zero wall times so output is byte-reproducible.
    #[arg(long)]
    no_timing: bool,
}

/// Keys accepted in `--config` files.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub method: Option<String>,
    pub epsilon: Option<f64>,
    pub cells: Option<usize>,
    pub dt: Option<f64>,
    pub horizon: Option<f64>,
    pub potential: Option<String>,
    pub micro_steps: Option<usize>,
    pub micro_used: Option<usize>,
    pub hbar: Option<f64>,
    pub mass: Option<f64>,
    pub x_center: Option<f64>,
    pub steps: Option<usize>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> std::result::Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("--config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| usage(format!("--config {}: {e}", path.display())))
    }
}

/// Parsed and validated command.
#[derive(Debug, Clone)]
pub enum Command {
    Run {
        config: SolverConfig,
        snapshots: usize,
    },
    Convergence {
        base: SolverConfig,
        cases: Vec<MethodCase>,
        levels: usize,
        refinement: usize,
    },
    BenchError {
        base: SolverConfig,
        methods: Vec<MethodId>,
        micro_grid: Vec<(usize, usize)>,
        settings: BenchSettings,
    },
    BenchTime {
        base: SolverConfig,
        methods: Vec<MethodId>,
        dt_grid: Vec<f64>,
        settings: BenchSettings,
    },
    PhysicalSmoke {
        config: PhysicalConfig,
    },
}

#[derive(Debug, Clone)]
pub struct CliInvocation {
    pub command: Command,
    pub output: Option<PathBuf>,
    pub no_timing: bool,
}

impl CliInvocation {
    pub fn subcommand(&self) -> &'static str {
        match self.command {
            Command::Run { .. } => "run",
            Command::Convergence { .. } => "convergence",
            Command::BenchError { .. } => "bench-error",
            Command::BenchTime { .. } => "bench-time",
            Command::PhysicalSmoke { .. } => "physical-smoke",
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Rejected by the argument parser (includes `--help`).
    Parse(clap::Error),
    /// Arguments parsed but failed validation.
    Usage(String),
    /// Failure while computing or writing output.
    Runtime(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(e) => e.exit_code(),
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Parse(e) => write!(f, "{e}"),
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::Runtime(e) => write!(f, "error: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Runtime(e)
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn parse_method(flag: &str, s: &str) -> std::result::Result<MethodId, CliError> {
    s.trim()
        .parse()
        .map_err(|_| usage(format!("{flag}: unknown method `{s}`")))
}

fn parse_methods(s: &str) -> std::result::Result<Vec<MethodId>, CliError> {
    let v = s
        .split(',')
        .map(|m| parse_method("--methods", m))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if v.is_empty() {
        return Err(usage("--methods: empty list"));
    }
    Ok(v)
}

fn parse_potential(flag: &str, s: &str) -> std::result::Result<PotentialSpec, CliError> {
    s.trim()
        .parse()
        .map_err(|_| usage(format!("{flag}: unknown potential `{s}`")))
}

fn positive(flag: &str, v: f64) -> std::result::Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(usage(format!("{flag}: must be positive, got {v}")))
    }
}

fn parse_dt_grid(s: &str) -> std::result::Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|t| {
            let v: f64 = t
                .trim()
                .parse()
                .map_err(|_| usage(format!("--dt: cannot parse `{t}`")))?;
            positive("--dt", v)
        })
        .collect()
}

fn parse_micro_grid(s: &str) -> std::result::Result<Vec<(usize, usize)>, CliError> {
    s.split(',')
        .map(|pair| {
            let (m, mt) = pair
                .trim()
                .split_once(':')
                .ok_or_else(|| usage(format!("--micro: expected M:Mtilde, got `{pair}`")))?;
            let m: usize = m
                .parse()
                .map_err(|_| usage(format!("--micro: bad M in `{pair}`")))?;
            let mt: usize = mt
                .parse()
                .map_err(|_| usage(format!("--micro: bad Mtilde in `{pair}`")))?;
            if m == 0 || mt == 0 {
                return Err(usage(format!(
                    "--micro: M and Mtilde must be positive in `{pair}`"
                )));
            }
            if mt > m {
                return Err(usage(format!("--micro: Mtilde {mt} exceeds M {m}")));
            }
            Ok((m, mt))
        })
        .collect()
}

/// Builds the scaled configuration from flags over config-file values.
fn resolve_problem(
    problem: &ProblemArgs,
    file: &ConfigFile,
    method: MethodId,
) -> std::result::Result<SolverConfig, CliError> {
    let p = &problem.shape;
    let epsilon = p.epsilon.or(file.epsilon).unwrap_or(DEFAULT_EPSILON);
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(usage(format!(
            "--epsilon: must lie in (0, 1), got {epsilon}"
        )));
    }
    let cells = p.cells.or(file.cells).unwrap_or(DEFAULT_CELLS);
    if cells < 2 {
        return Err(usage(format!(
            "--cells: need at least 2 cells, got {cells}"
        )));
    }
    let dt = positive("--dt", problem.dt.or(file.dt).unwrap_or(DEFAULT_DT))?;
    let horizon = positive(
        "--horizon",
        p.horizon.or(file.horizon).unwrap_or(DEFAULT_HORIZON),
    )?;
    let potential = match p.potential.as_deref().or(file.potential.as_deref()) {
        Some(s) => parse_potential("--potential", s)?,
        None => PotentialSpec::Sine,
    };
    let micro_m = p
        .micro_steps
        .or(file.micro_steps)
        .unwrap_or_else(|| default_micro_steps(epsilon));
    if micro_m == 0 {
        return Err(usage("--micro-steps: M must be positive"));
    }
    let micro_used = p
        .micro_used
        .or(file.micro_used)
        .unwrap_or_else(|| default_micro_used(micro_m));
    if micro_used == 0 {
        return Err(usage("--micro-used: Mtilde must be positive"));
    }
    if micro_used > micro_m {
        return Err(usage(format!(
            "--micro-used: Mtilde = {micro_used} exceeds M = {micro_m}"
        )));
    }
    let cfg = SolverConfig {
        epsilon,
        dt_macro: dt,
        micro_m,
        micro_used,
        horizon,
        grid: Arc::new(build_grid(cells, 1.0).map_err(|e| usage(format!("--cells: {e}")))?),
        potential,
        method,
    };
    cfg.validate()
        .map_err(|e| usage(format!("--horizon/--dt: {e}")))?;
    Ok(cfg)
}

fn load_file(common: &CommonArgs) -> std::result::Result<ConfigFile, CliError> {
    common
        .config
        .as_deref()
        .map(ConfigFile::load)
        .transpose()
        .map(Option::unwrap_or_default)
}

fn bench_settings() -> std::result::Result<BenchSettings, CliError> {
    let mut s = BenchSettings::default();
    if let Ok(v) = std::env::var(TIMEOUT_ENV) {
        let secs: f64 = v
            .trim()
            .parse()
            .map_err(|_| usage(format!("{TIMEOUT_ENV}: cannot parse `{v}`")))?;
        s.time_budget = Duration::from_secs_f64(positive(TIMEOUT_ENV, secs)?);
    }
    Ok(s)
}

/// Parses `argv` (including the program name) into a validated invocation.
pub fn parse_args<I, T>(argv: I) -> std::result::Result<CliInvocation, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(CliError::Parse)?;
    let (command, common) = match cli.command {
        Sub::Run {
            problem,
            method,
            snapshots,
            common,
        } => {
            let file = load_file(&common)?;
            let method = match method.as_deref().or(file.method.as_deref()) {
                Some(s) => parse_method("--method", s)?,
                None => MethodId::AB,
            };
            let config = resolve_problem(&problem, &file, method)?;
            (Command::Run { config, snapshots }, common)
        }
        Sub::Convergence {
            problem,
            methods,
            levels,
            refinement,
            common,
        } => {
            let file = load_file(&common)?;
            let base = resolve_problem(&problem, &file, MethodId::FdUnsplit)?;
            if levels < 2 {
                return Err(usage("--levels: need at least 2"));
            }
            if refinement == 0 {
                return Err(usage("--refinement: must be positive"));
            }
            let cases = parse_methods(&methods)?
                .into_iter()
                .map(|m| MethodCase::new(m, base.micro_m, base.micro_used))
                .collect();
            (
                Command::Convergence {
                    base,
                    cases,
                    levels,
                    refinement,
                },
                common,
            )
        }
        Sub::BenchError {
            problem,
            methods,
            micro,
            common,
        } => {
            let file = load_file(&common)?;
            let base = resolve_problem(&problem, &file, MethodId::FdUnsplit)?;
            (
                Command::BenchError {
                    base,
                    methods: parse_methods(&methods)?,
                    micro_grid: parse_micro_grid(&micro)?,
                    settings: bench_settings()?,
                },
                common,
            )
        }
        Sub::BenchTime {
            shape,
            methods,
            dt_grid,
            repetitions,
            common,
        } => {
            let file = load_file(&common)?;
            let dt_grid = parse_dt_grid(&dt_grid)?;
            let problem = ProblemArgs {
                shape,
                dt: dt_grid.first().copied(),
            };
            let base = resolve_problem(&problem, &file, MethodId::FdUnsplit)?;
            if repetitions == 0 {
                return Err(usage("--repetitions: must be positive"));
            }
            for &dt in &dt_grid {
                base.with_dt(dt)
                    .validate()
                    .map_err(|e| usage(format!("--dt: {e}")))?;
            }
            let mut settings = bench_settings()?;
            settings.repetitions = repetitions;
            (
                Command::BenchTime {
                    base,
                    methods: parse_methods(&methods)?,
                    dt_grid,
                    settings,
                },
                common,
            )
        }
        Sub::PhysicalSmoke {
            cells,
            dt,
            steps,
            potential,
            hbar,
            mass,
            x_center,
            common,
        } => {
            let file = load_file(&common)?;
            let cells = cells.or(file.cells).unwrap_or(400);
            if cells < 2 {
                return Err(usage(format!(
                    "--cells: need at least 2 cells, got {cells}"
                )));
            }
            let dt = positive("--dt", dt.or(file.dt).unwrap_or(1e-20))?;
            let steps = steps.or(file.steps).unwrap_or(100);
            if steps == 0 {
                return Err(usage("--steps: must be positive"));
            }
            let potential = match potential.as_deref().or(file.potential.as_deref()) {
                Some(s) => parse_potential("--potential", s)?,
                None => PotentialSpec::ChargeQuadratic,
            };
            let mut config = PhysicalConfig::preset(cells, dt, steps, potential);
            if let Some(h) = hbar.or(file.hbar) {
                config.hbar = positive("--hbar", h)?;
            }
            if let Some(m) = mass.or(file.mass) {
                config.mass = positive("--mass", m)?;
            }
            if let Some(xc) = x_center.or(file.x_center) {
                config.x_center = xc;
            }
            config
                .validate()
                .map_err(|e| usage(format!("--x-center: {e}")))?;
            (Command::PhysicalSmoke { config }, common)
        }
    };
    Ok(CliInvocation {
        command,
        output: common.output,
        no_timing: common.no_timing,
    })
}

/// Unsplit implicit run of the physical problem for `cfg.n_steps` steps.
pub fn physical_smoke(cfg: &PhysicalConfig, snapshots: Snapshots) -> Result<RunResult> {
    let start = Instant::now();
    let initial = init_packet(cfg)?;
    let grid = initial.grid();
    let sys = assemble_physical(grid, cfg.hbar, cfg.mass, cfg.dt, cfg.potential)?;
    let margin = stability_margin(cfg.potential, grid, cfg.dt, cfg.hbar);
    let opts = RunOptions {
        snapshots,
        time_budget: None,
    };
    let (final_field, snapshots) = drive(
        |f| crate::splitting::step_fd_unsplit(f, &sys),
        &initial,
        cfg.n_steps,
        cfg.dt,
        &opts,
        start,
    )?;
    Ok(RunResult {
        final_time: cfg.n_steps as f64 * cfg.dt,
        final_field,
        snapshots,
        wall_seconds: start.elapsed().as_secs_f64(),
        steps_taken: cfg.n_steps,
        stability_margin: margin,
        method: MethodId::FdUnsplit,
        warnings: Vec::new(),
    })
}

/// Shortest round-trip decimal.
fn num(v: f64) -> String {
    format!("{v:?}")
}

fn write_field_rows<W: Write>(w: &mut csv::Writer<W>, t: f64, field: &WaveField) -> Result<()> {
    for (x, v) in field.grid().interior().iter().zip(field.values()) {
        w.write_record([
            num(t),
            num(*x),
            num(v.re),
            num(v.im),
            num(v.re * v.re + v.im * v.im),
        ])?;
    }
    Ok(())
}

/// `t,x,re,im,abs2`, one row per snapshot and interior node. Falls back to
/// the final state when the run kept no snapshots.
pub fn write_field_csv<W: Write>(result: &RunResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "x", "re", "im", "abs2"])?;
    if result.snapshots.is_empty() {
        write_field_rows(&mut w, result.final_time, &result.final_field)?;
    } else {
        for (t, f) in &result.snapshots {
            write_field_rows(&mut w, *t, f)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn emit_field_csv(result: &RunResult, path: &Path) -> Result<()> {
    write_field_csv(result, BufWriter::new(File::create(path)?))
}

/// `method,dt,M,Mtilde,error_l1,wall_seconds,status`.
pub fn write_bench_csv<W: Write>(rows: &[BenchRow], out: W, no_timing: bool) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::Config("no bench rows to write".into()));
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "method",
        "dt",
        "M",
        "Mtilde",
        "error_l1",
        "wall_seconds",
        "status",
    ])?;
    for r in rows {
        w.write_record([
            r.method.cli_name().to_string(),
            num(r.dt_macro),
            r.micro_m.to_string(),
            r.micro_used.map(|m| m.to_string()).unwrap_or_default(),
            r.error_l1.map(num).unwrap_or_default(),
            num(if no_timing { 0.0 } else { r.wall_seconds }),
            r.status.as_str().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_bench_csv(rows: &[BenchRow], path: &Path, no_timing: bool) -> Result<()> {
    write_bench_csv(rows, BufWriter::new(File::create(path)?), no_timing)
}

/// `method,dt,dt_micro,M,Mtilde,error_l1,observed_order`.
pub fn write_convergence_csv<W: Write>(rows: &[ConvergenceRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "method",
        "dt",
        "dt_micro",
        "M",
        "Mtilde",
        "error_l1",
        "observed_order",
    ])?;
    for r in rows {
        w.write_record([
            r.case.method.cli_name().to_string(),
            num(r.dt_macro),
            num(r.dt_micro),
            r.case.micro_m.to_string(),
            if r.case.method.uses_partial_micro() {
                r.case.micro_used.to_string()
            } else {
                String::new()
            },
            num(r.error_l1),
            r.observed_order.map(num).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn with_output(
    path: Option<&Path>,
    write: impl FnOnce(Box<dyn Write>) -> Result<()>,
) -> Result<()> {
    match path {
        Some(p) => write(Box::new(BufWriter::new(File::create(p)?))),
        None => write(Box::new(io::stdout().lock())),
    }
}

/// Runs a parsed invocation, writing its CSV output.
pub fn execute(inv: &CliInvocation) -> Result<()> {
    let out = inv.output.as_deref();
    match &inv.command {
        Command::Run { config, snapshots } => {
            let initial = init_scaled(&config.grid)?;
            let opts = RunOptions {
                snapshots: Snapshots::Count(*snapshots),
                time_budget: None,
            };
            let result = run_with(config, &initial, &opts)?;
            log::info!(
                "{}: {} steps in {:.3} s, stability margin {:.3}",
                result.method,
                result.steps_taken,
                result.wall_seconds,
                result.stability_margin
            );
            with_output(out, |w| write_field_csv(&result, w))
        }
        Command::Convergence {
            base,
            cases,
            levels,
            refinement,
        } => {
            let rows = convergence_study(base, cases, base.dt_macro, *levels, *refinement)?;
            with_output(out, |w| write_convergence_csv(&rows, w))
        }
        Command::BenchError {
            base,
            methods,
            micro_grid,
            settings,
        } => {
            let rows = bench_errors(base, methods, micro_grid, settings)?;
            with_output(out, |w| write_bench_csv(&rows, w, inv.no_timing))
        }
        Command::BenchTime {
            base,
            methods,
            dt_grid,
            settings,
        } => {
            let rows = bench_timing(base, methods, dt_grid, settings)?;
            with_output(out, |w| write_bench_csv(&rows, w, inv.no_timing))
        }
        Command::PhysicalSmoke { config } => {
            let result = physical_smoke(config, Snapshots::None)?;
            log::info!(
                "physical smoke: {} steps, L2 norm {:e}",
                result.steps_taken,
                result.final_field.norm_l2()
            );
            with_output(out, |w| write_field_csv(&result, w))
        }
    }
}
