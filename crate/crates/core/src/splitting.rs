//! Time steppers: the unsplit implicit scheme, the AB/ABA/BAB splittings and
//! the multiscale variants (Full-AB, HMM-AB, extrapolated AB/ABA).
//!
//! Every A (potential) stage is a run of explicit micro steps with the
//! diagonal factor of a [`PotentialPropagator`]; every B (diffusion) stage is
//! one implicit solve. The extrapolated variants compute only the first `M̃`
//! of the `M` micro steps and extrapolate the micro trajectory in time to the
//! end of the A stage.

use std::fmt;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::model::{ComplexScalar, MethodId, SolverConfig, WaveField};
use crate::operators::{
    apply_potential_substeps, solve_field, stability_margin, unsplit_from_samples,
    PotentialPropagator, TridiagonalSystem,
};

/// Tail of a micro trajectory `u(m) = B1^m u(0)`: the states with indices
/// `first_index ..= first_index + states.len() - 1`.
#[derive(Debug, Clone)]
pub struct MicroTrajectory {
    first_index: usize,
    states: Vec<WaveField>,
    dt_micro: f64,
}

impl MicroTrajectory {
    /// Runs `micro_used` micro steps one at a time and keeps the last `keep`
    /// states (index 0 is the input itself).
    pub fn generate(
        field: &WaveField,
        prop: &PotentialPropagator,
        micro_used: usize,
        keep: usize,
    ) -> Result<Self> {
        prop.check_len(field.len())?;
        if keep == 0 || keep > micro_used + 1 {
            return Err(Error::Config(format!(
                "cannot keep {keep} states of a {micro_used}-step micro trajectory"
            )));
        }
        let first_index = micro_used + 1 - keep;
        let n = field.len();
        let mut tails = vec![vec![ComplexScalar::new(0.0, 0.0); n]; keep];
        for (j, (&u0, &f)) in field.values().iter().zip(prop.factors()).enumerate() {
            let mut u = u0;
            if first_index == 0 {
                tails[0][j] = u;
            }
            for m in 1..=micro_used {
                u *= f;
                if m >= first_index {
                    tails[m - first_index][j] = u;
                }
            }
        }
        Ok(Self {
            first_index,
            states: tails.into_iter().map(|v| field.with_values(v)).collect(),
            dt_micro: prop.dt_micro(),
        })
    }

    pub fn first_index(&self) -> usize {
        self.first_index
    }

    pub fn last_index(&self) -> usize {
        self.first_index + self.states.len() - 1
    }

    pub fn states(&self) -> &[WaveField] {
        &self.states
    }

    /// State at micro index `m`, if retained.
    pub fn state(&self, m: usize) -> Option<&WaveField> {
        m.checked_sub(self.first_index)
            .and_then(|k| self.states.get(k))
    }

    pub fn dt_micro(&self) -> f64 {
        self.dt_micro
    }
}

fn check_same(a: &WaveField, b: &WaveField) -> Result<()> {
    if a.len() != b.len() || !a.same_grid(b) {
        return Err(Error::Dimension {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(())
}

/// Gap between the last retained micro time `(M̃-1) dt` and the target.
fn extrapolation_gap(dt_micro: f64, micro_used: usize, dt_target: f64) -> f64 {
    dt_target - dt_micro * (micro_used as f64 - 1.0)
}

/// `u(M̃-1) + s (u(M̃) - u(M̃-1)) / dt` with `s = dt_target - dt (M̃-1)`.
pub fn extrapolate_linear(
    u_prev: &WaveField,
    u_last: &WaveField,
    dt_micro: f64,
    micro_used: usize,
    dt_target: f64,
) -> Result<WaveField> {
    check_same(u_prev, u_last)?;
    let s = extrapolation_gap(dt_micro, micro_used, dt_target);
    let values = u_prev
        .values()
        .iter()
        .zip(u_last.values())
        .map(|(&p, &l)| p + s * (l - p) / dt_micro)
        .collect();
    Ok(u_prev.with_values(values))
}

/// Second-order Taylor extrapolation from the states at `M̃-2, M̃-1, M̃`:
/// `u(M̃-1) + s D1 + s^2/2 D2` with forward differences `D1`, `D2`.
pub fn extrapolate_quadratic(
    u_mm2: &WaveField,
    u_prev: &WaveField,
    u_last: &WaveField,
    dt_micro: f64,
    micro_used: usize,
    dt_target: f64,
) -> Result<WaveField> {
    check_same(u_prev, u_last)?;
    check_same(u_mm2, u_last)?;
    let s = extrapolation_gap(dt_micro, micro_used, dt_target);
    let h2 = dt_micro * dt_micro;
    let values = u_mm2
        .values()
        .iter()
        .zip(u_prev.values())
        .zip(u_last.values())
        .map(|((&q, &p), &l)| {
            let d1 = (l - p) / dt_micro;
            let d2 = (l - 2.0 * p + q) / h2;
            p + s * d1 + 0.5 * s * s * d2
        })
        .collect();
    Ok(u_prev.with_values(values))
}

/// `Psi(k) = B^{-1} Psi(k-1)` for the unsplit implicit matrix.
pub fn step_fd_unsplit(field: &WaveField, unsplit: &TridiagonalSystem) -> Result<WaveField> {
    solve_field(unsplit, field)
}

/// AB: `M` potential micro steps, then one implicit diffusion solve.
pub fn step_ab(
    field: &WaveField,
    prop: &PotentialPropagator,
    diffusion: &TridiagonalSystem,
    micro_m: usize,
) -> Result<WaveField> {
    let u1 = apply_potential_substeps(field, prop, micro_m)?;
    solve_field(diffusion, &u1)
}

/// Full-AB: as AB, but the micro steps are taken one by one over the
/// whole interval.
pub fn step_full_ab(
    field: &WaveField,
    prop: &PotentialPropagator,
    diffusion: &TridiagonalSystem,
    micro_m: usize,
) -> Result<WaveField> {
    let traj = MicroTrajectory::generate(field, prop, micro_m, 1)?;
    solve_field(diffusion, &traj.states[0])
}

/// ABA: A over `dt/2`, B over `dt`, A over `dt/2`. `prop` must use the
/// half-interval micro step `(dt/2)/M`.
pub fn step_aba(
    field: &WaveField,
    prop: &PotentialPropagator,
    diffusion: &TridiagonalSystem,
    micro_m: usize,
) -> Result<WaveField> {
    let u1 = apply_potential_substeps(field, prop, micro_m)?;
    let u2 = solve_field(diffusion, &u1)?;
    apply_potential_substeps(&u2, prop, micro_m)
}

/// BAB: B over `dt/2`, A over `dt`, B over `dt/2`. `half_diffusion` must be
/// assembled with `dt/2`.
pub fn step_bab(
    field: &WaveField,
    prop: &PotentialPropagator,
    half_diffusion: &TridiagonalSystem,
    micro_m: usize,
) -> Result<WaveField> {
    let u1 = solve_field(half_diffusion, field)?;
    let u2 = apply_potential_substeps(&u1, prop, micro_m)?;
    solve_field(half_diffusion, &u2)
}

/// HMM-AB: the diffusion solve is fed the average of the first `M̃` micro
/// states `B1^m Psi`, `m = 1..M̃`.
pub fn step_hmm_ab(
    field: &WaveField,
    prop: &PotentialPropagator,
    diffusion: &TridiagonalSystem,
    micro_m: usize,
    micro_used: usize,
) -> Result<WaveField> {
    prop.check_len(field.len())?;
    check_micro(micro_m, micro_used, 1)?;
    let values = field
        .values()
        .iter()
        .zip(prop.factors())
        .map(|(&u0, &f)| {
            // running mean: exact when all states coincide
            let mut u = u0;
            let mut mean = ComplexScalar::new(0.0, 0.0);
            for m in 1..=micro_used {
                u *= f;
                mean += (u - mean) / m as f64;
            }
            mean
        })
        .collect();
    solve_field(diffusion, &field.with_values(values))
}

fn check_micro(micro_m: usize, micro_used: usize, min_used: usize) -> Result<()> {
    if micro_used < min_used {
        return Err(Error::Config(format!(
            "Mtilde = {micro_used} is below the minimum {min_used} for this method"
        )));
    }
    if micro_used > micro_m {
        return Err(Error::Config(format!(
            "Mtilde = {micro_used} exceeds M = {micro_m}"
        )));
    }
    Ok(())
}

fn linear_a_stage(
    field: &WaveField,
    prop: &PotentialPropagator,
    micro_m: usize,
    micro_used: usize,
) -> Result<WaveField> {
    let traj = MicroTrajectory::generate(field, prop, micro_used, 2)?;
    let target = micro_m as f64 * prop.dt_micro();
    extrapolate_linear(
        &traj.states[0],
        &traj.states[1],
        prop.dt_micro(),
        micro_used,
        target,
    )
}

fn quadratic_a_stage(
    field: &WaveField,
    prop: &PotentialPropagator,
    micro_m: usize,
    micro_used: usize,
) -> Result<WaveField> {
    let traj = MicroTrajectory::generate(field, prop, micro_used, 3)?;
    let target = micro_m as f64 * prop.dt_micro();
    let [q, p, l] = &traj.states[..] else {
        unreachable!("three states requested")
    };
    extrapolate_quadratic(q, p, l, prop.dt_micro(), micro_used, target)
}

/// Extrapolated-AB: `M̃` micro steps, linear extrapolation to `dt`, then the
/// diffusion solve. Requires `2 <= M̃ <= M`.
pub fn step_extra_ab(
    field: &WaveField,
    prop: &PotentialPropagator,
    diffusion: &TridiagonalSystem,
    micro_m: usize,
    micro_used: usize,
) -> Result<WaveField> {
    check_micro(micro_m, micro_used, 2)?;
    let u1 = linear_a_stage(field, prop, micro_m, micro_used)?;
    solve_field(diffusion, &u1)
}

/// Higher-order extrapolated AB: quadratic extrapolation of the A stage.
/// Requires `3 <= M̃ <= M`.
pub fn step_higher_extra_ab(
    field: &WaveField,
    prop: &PotentialPropagator,
    diffusion: &TridiagonalSystem,
    micro_m: usize,
    micro_used: usize,
) -> Result<WaveField> {
    check_micro(micro_m, micro_used, 3)?;
    let u1 = quadratic_a_stage(field, prop, micro_m, micro_used)?;
    solve_field(diffusion, &u1)
}

/// Higher-order extrapolated ABA: quadratically extrapolated A half steps
/// around a full diffusion solve. `prop` uses `(dt/2)/M`.
pub fn step_higher_extra_aba(
    field: &WaveField,
    prop: &PotentialPropagator,
    diffusion: &TridiagonalSystem,
    micro_m: usize,
    micro_used: usize,
) -> Result<WaveField> {
    check_micro(micro_m, micro_used, 3)?;
    let u1 = quadratic_a_stage(field, prop, micro_m, micro_used)?;
    let u2 = solve_field(diffusion, &u1)?;
    quadratic_a_stage(&u2, prop, micro_m, micro_used)
}

/// Diagnostics raised while preparing or running a configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum RunWarning {
    /// `dt_micro * max V / eps > 1`.
    StabilityMarginExceeded { margin: f64 },
    /// Not enough micro states for the extrapolation; the plain splitting
    /// is used instead.
    ExtrapolationFallback {
        method: MethodId,
        fallback: MethodId,
        micro_used: usize,
    },
    /// `T / dt` was not an integer.
    HorizonRounded { steps: usize, rounding_error: f64 },
}

impl fmt::Display for RunWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunWarning::StabilityMarginExceeded { margin } => {
                write!(f, "micro step violates dt <= eps/V (margin {margin:.3})")
            }
            RunWarning::ExtrapolationFallback {
                method,
                fallback,
                micro_used,
            } => write!(
                f,
                "{method} needs more micro states than Mtilde = {micro_used}; running {fallback}"
            ),
            RunWarning::HorizonRounded {
                steps,
                rounding_error,
            } => write!(
                f,
                "T/dt is not an integer; taking {steps} steps (horizon off by {rounding_error:e})"
            ),
        }
    }
}

/// Operators assembled once for a configuration.
#[derive(Debug, Clone)]
pub struct Stepper {
    method: MethodId,
    micro_m: usize,
    micro_used: usize,
    prop: Option<PotentialPropagator>,
    system: TridiagonalSystem,
    stability_margin: f64,
    warnings: Vec<RunWarning>,
}

impl Stepper {
    pub fn new(config: &SolverConfig) -> Result<Self> {
        config.validate()?;
        let grid = config.grid.as_ref();
        let samples = config.potential.sample_interior(grid);
        let mut warnings = Vec::new();

        let method = match config.method {
            MethodId::ExtraAB if config.micro_used < 2 => Some(MethodId::AB),
            MethodId::HigherExtraAB if config.micro_used < 3 => Some(MethodId::AB),
            MethodId::HigherExtraABA if config.micro_used < 3 => Some(MethodId::ABA),
            _ => None,
        }
        .inspect(|&fallback| {
            warnings.push(RunWarning::ExtrapolationFallback {
                method: config.method,
                fallback,
                micro_used: config.micro_used,
            });
        })
        .unwrap_or(config.method);

        let dt = config.dt_macro;
        let eps = config.epsilon;
        let (prop, system, margin) = if method == MethodId::FdUnsplit {
            let margin = stability_margin(config.potential, grid, dt, eps);
            (None, unsplit_from_samples(grid, eps, dt, &samples)?, margin)
        } else {
            let dt_micro = config.with_method(method).dt_micro();
            let diffusion_dt = if method == MethodId::BAB {
                0.5 * dt
            } else {
                dt
            };
            let margin = stability_margin(config.potential, grid, dt_micro, eps);
            if margin > 1.0 {
                warnings.push(RunWarning::StabilityMarginExceeded { margin });
            }
            (
                Some(PotentialPropagator::from_samples(&samples, dt_micro, eps)),
                crate::operators::assemble_diffusion(grid, eps, diffusion_dt)?,
                margin,
            )
        };

        Ok(Self {
            method,
            micro_m: config.micro_m,
            micro_used: config.micro_used,
            prop,
            system,
            stability_margin: margin,
            warnings,
        })
    }

    /// Method actually stepped (after any fallback).
    pub fn method(&self) -> MethodId {
        self.method
    }

    pub fn stability_margin(&self) -> f64 {
        self.stability_margin
    }

    pub fn warnings(&self) -> &[RunWarning] {
        &self.warnings
    }

    pub fn propagator(&self) -> Option<&PotentialPropagator> {
        self.prop.as_ref()
    }

    /// Unsplit matrix for FD, the diffusion matrix otherwise.
    pub fn system(&self) -> &TridiagonalSystem {
        &self.system
    }

    pub fn step(&self, field: &WaveField) -> Result<WaveField> {
        let sys = &self.system;
        let (m, mt) = (self.micro_m, self.micro_used);
        let Some(prop) = self.prop.as_ref() else {
            return step_fd_unsplit(field, sys);
        };
        match self.method {
            MethodId::FdUnsplit => unreachable!("unsplit stepper has no propagator"),
            MethodId::AB => step_ab(field, prop, sys, m),
            MethodId::FullAB => step_full_ab(field, prop, sys, m),
            MethodId::ABA => step_aba(field, prop, sys, m),
            MethodId::BAB => step_bab(field, prop, sys, m),
            MethodId::HmmAB => step_hmm_ab(field, prop, sys, m, mt),
            MethodId::ExtraAB => step_extra_ab(field, prop, sys, m, mt),
            MethodId::HigherExtraAB => step_higher_extra_ab(field, prop, sys, m, mt),
            MethodId::HigherExtraABA => step_higher_extra_aba(field, prop, sys, m, mt),
        }
    }
}

/// Which intermediate states a run keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Snapshots {
    None,
    /// Roughly this many evenly spaced states, plus the initial and final.
    Count(usize),
    /// Every `k`-th macro step, plus the initial and final.
    Every(usize),
}

impl Snapshots {
    fn stride(self, steps: usize) -> Option<usize> {
        match self {
            Snapshots::None => None,
            Snapshots::Count(0) | Snapshots::Every(0) => None,
            Snapshots::Count(n) => Some((steps / n).max(1)),
            Snapshots::Every(k) => Some(k),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub snapshots: Snapshots,
    /// Abort with [`Error::Timeout`] once the stepping exceeds this.
    pub time_budget: Option<Duration>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            snapshots: Snapshots::Count(10),
            time_budget: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub final_field: WaveField,
    /// Time of `final_field`.
    pub final_time: f64,
    pub snapshots: Vec<(f64, WaveField)>,
    pub wall_seconds: f64,
    pub steps_taken: usize,
    pub stability_margin: f64,
    pub method: MethodId,
    pub warnings: Vec<RunWarning>,
}

/// Runs `config.method` from `initial` to the horizon with default options.
pub fn run(config: &SolverConfig, initial: &WaveField) -> Result<RunResult> {
    run_with(config, initial, &RunOptions::default())
}

pub fn run_with(
    config: &SolverConfig,
    initial: &WaveField,
    opts: &RunOptions,
) -> Result<RunResult> {
    if initial.grid() != config.grid.as_ref() {
        return Err(Error::Dimension {
            expected: config.grid.interior_len(),
            found: initial.len(),
        });
    }
    let start = Instant::now();
    let stepper = Stepper::new(config)?;
    let steps = config.macro_steps();
    let mut warnings = stepper.warnings().to_vec();
    if steps.rounding_error.abs() > 1e-9 * config.horizon {
        warnings.push(RunWarning::HorizonRounded {
            steps: steps.count,
            rounding_error: steps.rounding_error,
        });
    }
    for w in &warnings {
        log::warn!("{}: {w}", config.method);
    }

    let (field, snapshots) = drive(
        |f| stepper.step(f),
        initial,
        steps.count,
        config.dt_macro,
        opts,
        start,
    )?;

    Ok(RunResult {
        final_time: steps.count as f64 * config.dt_macro,
        final_field: field,
        snapshots,
        wall_seconds: start.elapsed().as_secs_f64(),
        steps_taken: steps.count,
        stability_margin: stepper.stability_margin(),
        method: stepper.method(),
        warnings,
    })
}

type Trajectory = (WaveField, Vec<(f64, WaveField)>);

/// Shared stepping loop: finiteness check, time budget and snapshots.
pub(crate) fn drive(
    step: impl Fn(&WaveField) -> Result<WaveField>,
    initial: &WaveField,
    n_steps: usize,
    dt: f64,
    opts: &RunOptions,
    start: Instant,
) -> Result<Trajectory> {
    let stride = opts.snapshots.stride(n_steps);
    let mut snapshots = Vec::new();
    if stride.is_some() {
        snapshots.push((0.0, initial.clone()));
    }
    let mut field = initial.clone();
    for k in 1..=n_steps {
        field = step(&field).map_err(|e| e.at_step(k))?;
        if !field.is_finite() {
            return Err(Error::Blowup { step: k });
        }
        if let Some(stride) = stride {
            if k % stride == 0 || k == n_steps {
                snapshots.push((k as f64 * dt, field.clone()));
            }
        }
        if let Some(budget) = opts.time_budget {
            if start.elapsed() > budget {
                return Err(Error::Timeout {
                    step: k,
                    budget: budget.as_secs_f64(),
                });
            }
        }
    }
    Ok((field, snapshots))
}
