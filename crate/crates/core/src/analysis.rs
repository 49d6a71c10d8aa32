//! Error metric, observed convergence orders and the error/timing benches.

use std::time::Duration;

use crate::error::{Error, Result};
use crate::model::{init_scaled, MethodId, SolverConfig, WaveField};
use crate::splitting::{run_with, RunOptions, Snapshots};

/// `sum_j dx |a_j - b_j|` over the interior nodes.
pub fn l1_error(a: &WaveField, b: &WaveField) -> Result<f64> {
    if a.len() != b.len() || !a.same_grid(b) {
        return Err(Error::Dimension {
            expected: a.len(),
            found: b.len(),
        });
    }
    let dx = a.grid().dx();
    Ok(a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| dx * (x - y).norm())
        .sum())
}

/// `log2(err_coarse / err_fine)` for a halved step.
pub fn observed_order(err_coarse: f64, err_fine: f64) -> Result<f64> {
    if !(err_coarse > 0.0 && err_fine > 0.0) || !err_coarse.is_finite() || !err_fine.is_finite() {
        return Err(Error::UndefinedOrder(format!(
            "errors must be positive and finite (got {err_coarse:e}, {err_fine:e})"
        )));
    }
    Ok((err_coarse / err_fine).log2())
}

/// One Richardson halving.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderEstimate {
    pub dt_coarse: f64,
    pub dt_fine: f64,
    pub err_coarse: f64,
    pub err_fine: f64,
    pub observed_order: f64,
}

impl OrderEstimate {
    pub fn new(dt_coarse: f64, dt_fine: f64, err_coarse: f64, err_fine: f64) -> Result<Self> {
        if (dt_fine - 0.5 * dt_coarse).abs() > 1e-12 * dt_coarse {
            return Err(Error::Config(format!(
                "fine step {dt_fine:e} is not half of {dt_coarse:e}"
            )));
        }
        Ok(Self {
            dt_coarse,
            dt_fine,
            err_coarse,
            err_fine,
            observed_order: observed_order(err_coarse, err_fine)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowStatus {
    Ok,
    Timeout,
}

impl RowStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::Timeout => "timeout",
        }
    }
}

/// One line of an error or timing table.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub method: MethodId,
    pub dt_macro: f64,
    pub micro_m: usize,
    /// `None` for methods that do not use `M̃`.
    pub micro_used: Option<usize>,
    /// `None` when the row timed out.
    pub error_l1: Option<f64>,
    pub wall_seconds: f64,
    pub status: RowStatus,
}

/// A method together with its micro-step rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MethodCase {
    pub method: MethodId,
    pub micro_m: usize,
    pub micro_used: usize,
}

impl MethodCase {
    pub fn new(method: MethodId, micro_m: usize, micro_used: usize) -> Self {
        Self {
            method,
            micro_m,
            micro_used,
        }
    }

    fn apply(&self, base: &SolverConfig) -> SolverConfig {
        base.with_method(self.method)
            .with_micro(self.micro_m, self.micro_used)
    }
}

#[derive(Debug, Clone)]
pub struct BenchSettings {
    /// Per-row wall-time budget.
    pub time_budget: Duration,
    /// Timed repetitions per timing row; the median is reported.
    pub repetitions: usize,
    /// Discard one untimed run before each timing row.
    pub warm_up: bool,
}

impl Default for BenchSettings {
    fn default() -> Self {
        Self {
            time_budget: Duration::from_secs(120),
            repetitions: 3,
            warm_up: true,
        }
    }
}

enum Outcome {
    Done { field: WaveField, seconds: f64 },
    TimedOut { seconds: f64 },
}

fn run_case(cfg: &SolverConfig, initial: &WaveField, budget: Duration) -> Result<Outcome> {
    let opts = RunOptions {
        snapshots: Snapshots::None,
        time_budget: Some(budget),
    };
    match run_with(cfg, initial, &opts) {
        Ok(r) => Ok(Outcome::Done {
            field: r.final_field,
            seconds: r.wall_seconds,
        }),
        Err(Error::Timeout { budget, .. }) => Ok(Outcome::TimedOut { seconds: budget }),
        Err(e) => Err(e),
    }
}

fn reference(base: &SolverConfig, dt: f64, initial: &WaveField) -> Result<WaveField> {
    let cfg = base.with_method(MethodId::FdUnsplit).with_dt(dt);
    let opts = RunOptions {
        snapshots: Snapshots::None,
        time_budget: None,
    };
    Ok(run_with(&cfg, initial, &opts)?.final_field)
}

fn row(cfg: &SolverConfig, error_l1: Option<f64>, wall_seconds: f64) -> BenchRow {
    BenchRow {
        method: cfg.method,
        dt_macro: cfg.dt_macro,
        micro_m: cfg.micro_m,
        micro_used: cfg.method.uses_partial_micro().then_some(cfg.micro_used),
        status: if error_l1.is_some() {
            RowStatus::Ok
        } else {
            RowStatus::Timeout
        },
        error_l1,
        wall_seconds,
    }
}

/// Error of every `(method, M, M̃)` against the unsplit scheme at the same
/// `dt`, method-major.
pub fn bench_errors(
    base: &SolverConfig,
    methods: &[MethodId],
    micro_grid: &[(usize, usize)],
    settings: &BenchSettings,
) -> Result<Vec<BenchRow>> {
    let initial = init_scaled(&base.grid)?;
    let exact = reference(base, base.dt_macro, &initial)?;
    let mut rows = Vec::with_capacity(methods.len() * micro_grid.len());
    for &method in methods {
        for &(m, mt) in micro_grid {
            let cfg = MethodCase::new(method, m, mt).apply(base);
            rows.push(match run_case(&cfg, &initial, settings.time_budget)? {
                Outcome::Done { field, seconds } => {
                    row(&cfg, Some(l1_error(&exact, &field)?), seconds)
                }
                Outcome::TimedOut { seconds } => row(&cfg, None, seconds),
            });
        }
    }
    Ok(rows)
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// Median wall time of every method on every `dt`, with the error against
/// the unsplit scheme at that `dt`. Rows run one after another on the
/// calling thread.
pub fn bench_timing(
    base: &SolverConfig,
    methods: &[MethodId],
    dt_grid: &[f64],
    settings: &BenchSettings,
) -> Result<Vec<BenchRow>> {
    let initial = init_scaled(&base.grid)?;
    let references = dt_grid
        .iter()
        .map(|&dt| reference(base, dt, &initial))
        .collect::<Result<Vec<_>>>()?;
    let reps = settings.repetitions.max(1);
    let mut rows = Vec::with_capacity(methods.len() * dt_grid.len());
    for &method in methods {
        for (&dt, exact) in dt_grid.iter().zip(&references) {
            let cfg = base.with_method(method).with_dt(dt);
            if settings.warm_up {
                if let Outcome::TimedOut { seconds } =
                    run_case(&cfg, &initial, settings.time_budget)?
                {
                    rows.push(row(&cfg, None, seconds));
                    continue;
                }
            }
            let mut times = Vec::with_capacity(reps);
            let mut error = None;
            let mut timed_out = None;
            for _ in 0..reps {
                match run_case(&cfg, &initial, settings.time_budget)? {
                    Outcome::Done { field, seconds } => {
                        times.push(seconds);
                        error = Some(l1_error(exact, &field)?);
                    }
                    Outcome::TimedOut { seconds } => {
                        timed_out = Some(seconds);
                        break;
                    }
                }
            }
            rows.push(match timed_out {
                Some(seconds) => row(&cfg, None, seconds),
                None => row(&cfg, error, median(times)),
            });
        }
    }
    Ok(rows)
}

/// One line of a convergence study.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub case: MethodCase,
    pub dt_macro: f64,
    pub dt_micro: f64,
    pub error_l1: f64,
    /// Order against the previous (twice coarser) level.
    pub observed_order: Option<f64>,
}

/// Errors on `dt_coarse / 2^k`, `k < levels`, against one unsplit run with
/// step `dt_finest / refinement`.
pub fn convergence_study(
    base: &SolverConfig,
    cases: &[MethodCase],
    dt_coarse: f64,
    levels: usize,
    refinement: usize,
) -> Result<Vec<ConvergenceRow>> {
    if levels < 2 || refinement == 0 {
        return Err(Error::Config(
            "a convergence study needs at least 2 levels and a positive refinement".into(),
        ));
    }
    let initial = init_scaled(&base.grid)?;
    let dts: Vec<f64> = (0..levels)
        .map(|k| dt_coarse / f64::powi(2.0, k as i32))
        .collect();
    let dt_ref = dts[levels - 1] / refinement as f64;
    let exact = reference(base, dt_ref, &initial)?;
    let opts = RunOptions {
        snapshots: Snapshots::None,
        time_budget: None,
    };

    let mut rows = Vec::new();
    for case in cases {
        let mut prev: Option<(f64, f64)> = None;
        for &dt in &dts {
            let cfg = case.apply(base).with_dt(dt);
            let out = run_with(&cfg, &initial, &opts)?;
            let err = l1_error(&exact, &out.final_field)?;
            let order = prev
                .map(|(dtc, ec)| OrderEstimate::new(dtc, dt, ec, err).map(|o| o.observed_order))
                .transpose()?;
            rows.push(ConvergenceRow {
                case: *case,
                dt_macro: dt,
                dt_micro: cfg.dt_micro(),
                error_l1: err,
                observed_order: order,
            });
            prev = Some((dt, err));
        }
    }
    Ok(rows)
}
