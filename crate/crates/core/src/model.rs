//! Grids, wave fields, potentials and problem configurations.
//!
//! The scaled problem lives on `[0, 1]` and is driven by the small parameter
//! `epsilon`; the physical problem uses SI units on a nanometre-scale domain.
//! Both use homogeneous Dirichlet boundaries, so a [`WaveField`] only stores
//! the `J - 1` interior nodes.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex scalar used for every wave-function value.
pub type ComplexScalar = Complex64;

/// Elementary charge in coulomb.
pub const ELECTRON_CHARGE: f64 = 1.602_176_6e-19;
/// Reduced Planck constant (CODATA) in J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Electron rest mass in kg.
pub const ELECTRON_MASS: f64 = 9.109_383_7e-31;

/// Uniform 1D grid with `cells + 1` nodes `x_j = j * dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    cells: usize,
    length: f64,
    dx: f64,
    nodes: Vec<f64>,
}

impl Grid1D {
    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// All nodes including both boundaries.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Nodes `x_1 .. x_{J-1}`.
    pub fn interior(&self) -> &[f64] {
        &self.nodes[1..self.cells]
    }

    /// Number of stored unknowns (`J - 1`).
    pub fn interior_len(&self) -> usize {
        self.cells - 1
    }
}

/// Builds a uniform grid with `cells` intervals over `[0, length]`.
pub fn build_grid(cells: usize, length: f64) -> Result<Grid1D> {
    if cells < 2 {
        return Err(Error::InvalidGrid(format!(
            "need at least 2 cells, got {cells}"
        )));
    }
    if !(length.is_finite() && length > 0.0) {
        return Err(Error::InvalidGrid(format!(
            "length must be positive and finite, got {length}"
        )));
    }
    let dx = length / cells as f64;
    let mut nodes: Vec<f64> = (0..=cells).map(|j| j as f64 * dx).collect();
    // pin the right end exactly
    nodes[cells] = length;
    Ok(Grid1D {
        cells,
        length,
        dx,
        nodes,
    })
}

/// Discrete wave function on the interior nodes of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    grid: Arc<Grid1D>,
    values: Vec<ComplexScalar>,
}

impl WaveField {
    pub fn new(grid: Arc<Grid1D>, values: Vec<ComplexScalar>) -> Result<Self> {
        let expected = grid.interior_len();
        if values.len() != expected {
            return Err(Error::Dimension {
                expected,
                found: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Arc<Grid1D>) -> Self {
        let n = grid.interior_len();
        Self {
            grid,
            values: vec![ComplexScalar::new(0.0, 0.0); n],
        }
    }

    /// Same grid, new values. Length is checked only in debug builds.
    pub(crate) fn with_values(&self, values: Vec<ComplexScalar>) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        Self {
            grid: Arc::clone(&self.grid),
            values,
        }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn grid_arc(&self) -> &Arc<Grid1D> {
        &self.grid
    }

    pub fn values(&self) -> &[ComplexScalar] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [ComplexScalar] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<ComplexScalar> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Discrete L2 norm `sqrt(dx * sum |psi_j|^2)`.
    pub fn norm_l2(&self) -> f64 {
        (self.grid.dx() * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values
            .iter()
            .all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn same_grid(&self, other: &WaveField) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }
}

/// `psi(x, 0) = sin(pi x)` on the unit interval.
pub fn init_scaled(grid: &Arc<Grid1D>) -> Result<WaveField> {
    if (grid.length() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidGrid(format!(
            "scaled problem needs length 1, got {}",
            grid.length()
        )));
    }
    let values = grid
        .interior()
        .iter()
        .map(|&x| ComplexScalar::new((PI * x).sin(), 0.0))
        .collect();
    WaveField::new(Arc::clone(grid), values)
}

/// Gaussian packet `exp(-0.5((x-xc)/s)^2) * exp(i 2 pi (x-xc)/lambda)`.
pub fn init_packet(cfg: &PhysicalConfig) -> Result<WaveField> {
    cfg.validate()?;
    let grid = Arc::new(cfg.grid()?);
    let values = grid
        .interior()
        .iter()
        .map(|&x| {
            let r = x - cfg.x_center;
            let envelope = (-0.5 * (r / cfg.s_width).powi(2)).exp();
            let phase = 2.0 * PI * r / cfg.lambda;
            ComplexScalar::new(envelope * phase.cos(), envelope * phase.sin())
        })
        .collect();
    WaveField::new(grid, values)
}

/// Time-independent potential catalogue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialSpec {
    Zero,
    /// `x^2`
    Quadratic,
    /// `sin(2 pi x)`
    Sine,
    /// `exp(sin(2 pi x))`
    ExpSine,
    /// `e * x^2` with the elementary charge `e`.
    ChargeQuadratic,
}

impl PotentialSpec {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            PotentialSpec::Zero => 0.0,
            PotentialSpec::Quadratic => x * x,
            PotentialSpec::Sine => (2.0 * PI * x).sin(),
            PotentialSpec::ExpSine => (2.0 * PI * x).sin().exp(),
            PotentialSpec::ChargeQuadratic => ELECTRON_CHARGE * x * x,
        }
    }

    /// `V(x_j)` at the interior nodes, in storage order.
    pub fn sample_interior(self, grid: &Grid1D) -> Vec<f64> {
        grid.interior().iter().map(|&x| self.eval(x)).collect()
    }

    pub fn name(self) -> &'static str {
        match self {
            PotentialSpec::Zero => "zero",
            PotentialSpec::Quadratic => "quadratic",
            PotentialSpec::Sine => "sine",
            PotentialSpec::ExpSine => "exp-sine",
            PotentialSpec::ChargeQuadratic => "charge-quadratic",
        }
    }

    pub const ALL: [PotentialSpec; 5] = [
        PotentialSpec::Zero,
        PotentialSpec::Quadratic,
        PotentialSpec::Sine,
        PotentialSpec::ExpSine,
        PotentialSpec::ChargeQuadratic,
    ];
}

pub fn eval_potential(spec: PotentialSpec, x: f64) -> f64 {
    spec.eval(x)
}

impl fmt::Display for PotentialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PotentialSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PotentialSpec::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown potential `{s}`")))
    }
}

/// Time integrator selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MethodId {
    FdUnsplit,
    AB,
    ABA,
    BAB,
    FullAB,
    HmmAB,
    ExtraAB,
    HigherExtraAB,
    HigherExtraABA,
}

impl MethodId {
    pub const ALL: [MethodId; 9] = [
        MethodId::FdUnsplit,
        MethodId::AB,
        MethodId::ABA,
        MethodId::BAB,
        MethodId::FullAB,
        MethodId::HmmAB,
        MethodId::ExtraAB,
        MethodId::HigherExtraAB,
        MethodId::HigherExtraABA,
    ];

    pub fn cli_name(self) -> &'static str {
        match self {
            MethodId::FdUnsplit => "fd",
            MethodId::AB => "ab",
            MethodId::ABA => "aba",
            MethodId::BAB => "bab",
            MethodId::FullAB => "full-ab",
            MethodId::HmmAB => "hmm-ab",
            MethodId::ExtraAB => "extra-ab",
            MethodId::HigherExtraAB => "extra2-ab",
            MethodId::HigherExtraABA => "extra2-aba",
        }
    }

    /// Micro steps cover half a macro step (Strang-type A half steps).
    pub fn uses_half_step_micro(self) -> bool {
        matches!(self, MethodId::ABA | MethodId::HigherExtraABA)
    }

    /// Whether `micro_used` (M̃) affects the method.
    pub fn uses_partial_micro(self) -> bool {
        matches!(
            self,
            MethodId::HmmAB
                | MethodId::ExtraAB
                | MethodId::HigherExtraAB
                | MethodId::HigherExtraABA
        )
    }

    pub fn is_split(self) -> bool {
        self != MethodId::FdUnsplit
    }
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.cli_name())
    }
}

impl FromStr for MethodId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MethodId::ALL
            .into_iter()
            .find(|m| m.cli_name() == s)
            .ok_or_else(|| Error::Config(format!("unknown method `{s}`")))
    }
}

/// Default micro-step count `round(1/epsilon)`, at least 1.
pub fn default_micro_steps(epsilon: f64) -> usize {
    ((1.0 / epsilon).round() as usize).max(1)
}

/// Default number of computed micro steps `max(1, M/2)`.
pub fn default_micro_used(micro_m: usize) -> usize {
    (micro_m / 2).max(1)
}

/// Macro-step count obtained by rounding `T / dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MacroSteps {
    pub count: usize,
    /// `count * dt - T`.
    pub rounding_error: f64,
}

/// Configuration of one run of the scaled problem.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub epsilon: f64,
    pub dt_macro: f64,
    pub micro_m: usize,
    pub micro_used: usize,
    pub horizon: f64,
    pub grid: Arc<Grid1D>,
    pub potential: PotentialSpec,
    pub method: MethodId,
}

impl SolverConfig {
    /// Scaled problem on `[0, 1]` with the default micro-step rule.
    pub fn scaled(
        epsilon: f64,
        cells: usize,
        dt_macro: f64,
        horizon: f64,
        potential: PotentialSpec,
        method: MethodId,
    ) -> Result<Self> {
        let micro_m = default_micro_steps(epsilon);
        let cfg = Self {
            epsilon,
            dt_macro,
            micro_m,
            micro_used: default_micro_used(micro_m),
            horizon,
            grid: Arc::new(build_grid(cells, 1.0)?),
            potential,
            method,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// `eps = 1e-2, J = 100, dt = 8e-4, T = 0.1, V = sin(2 pi x)`.
    pub fn canonical(method: MethodId) -> Self {
        Self::scaled(1e-2, 100, 8e-4, 0.1, PotentialSpec::Sine, method)
            .expect("canonical configuration is valid")
    }

    pub fn with_method(&self, method: MethodId) -> Self {
        Self {
            method,
            ..self.clone()
        }
    }

    pub fn with_micro(&self, micro_m: usize, micro_used: usize) -> Self {
        Self {
            micro_m,
            micro_used,
            ..self.clone()
        }
    }

    pub fn with_dt(&self, dt_macro: f64) -> Self {
        Self {
            dt_macro,
            ..self.clone()
        }
    }

    pub fn with_potential(&self, potential: PotentialSpec) -> Self {
        Self {
            potential,
            ..self.clone()
        }
    }

    /// Micro step `dt/M`, or `(dt/2)/M` for the Strang-type A half steps.
    pub fn dt_micro(&self) -> f64 {
        if self.method.uses_half_step_micro() {
            0.5 * self.dt_macro / self.micro_m as f64
        } else {
            self.dt_macro / self.micro_m as f64
        }
    }

    pub fn macro_steps(&self) -> MacroSteps {
        let count = (self.horizon / self.dt_macro).round() as usize;
        MacroSteps {
            count,
            rounding_error: count as f64 * self.dt_macro - self.horizon,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Config(format!(
                "epsilon must lie in (0, 1), got {}",
                self.epsilon
            )));
        }
        if !(self.dt_macro.is_finite() && self.dt_macro > 0.0) {
            return Err(Error::Config(format!(
                "dt must be positive, got {}",
                self.dt_macro
            )));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::Config(format!(
                "T must be positive, got {}",
                self.horizon
            )));
        }
        if self.micro_m == 0 || self.micro_used == 0 {
            return Err(Error::Config("M and Mtilde must be positive".into()));
        }
        if self.micro_m > u32::MAX as usize {
            return Err(Error::Config(format!("M = {} is too large", self.micro_m)));
        }
        if self.micro_used > self.micro_m {
            return Err(Error::Config(format!(
                "Mtilde = {} exceeds M = {}",
                self.micro_used, self.micro_m
            )));
        }
        if self.macro_steps().count == 0 {
            return Err(Error::Config(format!(
                "T = {} is shorter than half a macro step dt = {}",
                self.horizon, self.dt_macro
            )));
        }
        Ok(())
    }
}

/// Physical (SI-unit) problem with a Gaussian packet initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalConfig {
    pub hbar: f64,
    pub mass: f64,
    pub length: f64,
    pub lambda: f64,
    pub s_width: f64,
    pub x_center: f64,
    pub dx: f64,
    pub dt: f64,
    pub n_steps: usize,
    pub potential: PotentialSpec,
}

impl PhysicalConfig {
    pub const DOMAIN_LENGTH: f64 = 4e-9;

    /// Electron in a `4 nm` box: `lambda = L/40`, `s = L/25`, `x_c = L/2`.
    pub fn preset(cells: usize, dt: f64, n_steps: usize, potential: PotentialSpec) -> Self {
        let length = Self::DOMAIN_LENGTH;
        Self {
            hbar: HBAR,
            mass: ELECTRON_MASS,
            length,
            lambda: length / 40.0,
            s_width: length / 25.0,
            x_center: 0.5 * length,
            dx: length / cells as f64,
            dt,
            n_steps,
            potential,
        }
    }

    /// Full-resolution grid: `dx = 1e-12`, `dt = 1e-20`.
    pub fn full_resolution(n_steps: usize, potential: PotentialSpec) -> Self {
        Self::preset(4000, 1e-20, n_steps, potential)
    }

    pub fn cells(&self) -> usize {
        (self.length / self.dx).round() as usize
    }

    pub fn grid(&self) -> Result<Grid1D> {
        build_grid(self.cells(), self.length)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("hbar", self.hbar),
            ("mass", self.mass),
            ("length", self.length),
            ("lambda", self.lambda),
            ("s", self.s_width),
            ("dx", self.dx),
            ("dt", self.dt),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.x_center > 0.0 && self.x_center < self.length) {
            return Err(Error::Config(format!(
                "x_center = {} outside (0, {})",
                self.x_center, self.length
            )));
        }
        if self.n_steps == 0 {
            return Err(Error::Config("n_steps must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_four_cells() {
        let g = build_grid(4, 1.0).unwrap();
        assert_eq!(g.dx(), 0.25);
        assert_eq!(g.nodes(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(g.interior_len(), 3);
    }

    #[test]
    fn grid_reference_spacings() {
        let g = build_grid(1000, 1.0).unwrap();
        assert!((g.dx() - 1e-3).abs() < 1e-18);
        let g = build_grid(4000, 4e-9).unwrap();
        assert!((g.dx() - 1e-12).abs() / 1e-12 < 1e-14);
        assert_eq!(g.nodes()[4000], 4e-9);
        assert!((g.dx() * 4000.0 - 4e-9).abs() / 4e-9 < 4.0 * f64::EPSILON);
    }

    #[test]
    fn grid_rejects_degenerate() {
        assert!(matches!(build_grid(1, 1.0), Err(Error::InvalidGrid(_))));
        assert!(matches!(build_grid(10, 0.0), Err(Error::InvalidGrid(_))));
    }

    #[test]
    fn scaled_initial_values() {
        let g = Arc::new(build_grid(4, 1.0).unwrap());
        let f = init_scaled(&g).unwrap();
        let v = f.values();
        assert!((v[0].re - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((v[1].re - 1.0).abs() < 1e-15);
        assert!(v.iter().all(|c| c.im == 0.0));
    }

    #[test]
    fn scaled_initial_is_symmetric() {
        let g = Arc::new(build_grid(100, 1.0).unwrap());
        let f = init_scaled(&g).unwrap();
        let v = f.values();
        let n = v.len();
        for j in 0..n {
            assert!((v[j].re - v[n - 1 - j].re).abs() < 1e-14);
        }
    }

    #[test]
    fn scaled_rejects_non_unit_domain() {
        let g = Arc::new(build_grid(10, 2.0).unwrap());
        assert!(init_scaled(&g).is_err());
    }

    #[test]
    fn packet_center_and_envelope() {
        let cfg = PhysicalConfig::preset(400, 1e-20, 1, PotentialSpec::Zero);
        assert_eq!(cfg.lambda, cfg.length / 40.0);
        assert_eq!(cfg.s_width, cfg.length / 25.0);
        let f = init_packet(&cfg).unwrap();
        let xs = f.grid().interior().to_vec();
        // x_c = L/2 is node 200, interior index 199
        let c = f.values()[199];
        assert!((xs[199] - cfg.x_center).abs() < 1e-24);
        assert!((c.re - 1.0).abs() < 1e-12 && c.im.abs() < 1e-10);
        for (x, v) in xs.iter().zip(f.values()) {
            let env = (-0.5 * ((x - cfg.x_center) / cfg.s_width).powi(2)).exp();
            assert!((v.norm() - env).abs() <= 1e-15 * env.max(1e-300) + 1e-300);
        }
    }

    #[test]
    fn packet_one_wavelength_off_center() {
        // lambda = 10 dx on J = 400
        let cfg = PhysicalConfig::preset(400, 1e-20, 1, PotentialSpec::Zero);
        let f = init_packet(&cfg).unwrap();
        let v = f.values()[199 + 10];
        let expected = (-0.5 * (cfg.lambda / cfg.s_width).powi(2)).exp();
        assert!((v.re - expected).abs() < 1e-12);
        assert!(v.im.abs() < 1e-12);
    }

    #[test]
    fn potential_catalogue() {
        assert_eq!(eval_potential(PotentialSpec::Quadratic, 0.0), 0.0);
        assert!((eval_potential(PotentialSpec::Sine, 0.25) - 1.0).abs() < 1e-15);
        assert_eq!(eval_potential(PotentialSpec::ExpSine, 0.0), 1.0);
        assert_eq!(
            eval_potential(PotentialSpec::ChargeQuadratic, 2.0),
            4.0 * 1.602_176_6e-19
        );
        for x in [-3.0, 0.0, 0.3, 7.5] {
            assert_eq!(eval_potential(PotentialSpec::Zero, x), 0.0);
            assert!(eval_potential(PotentialSpec::Quadratic, x) >= 0.0);
            assert!(eval_potential(PotentialSpec::ExpSine, x) >= 0.0);
            assert!(eval_potential(PotentialSpec::ChargeQuadratic, x) >= 0.0);
        }
    }

    #[test]
    fn names_round_trip() {
        for m in MethodId::ALL {
            assert_eq!(m.cli_name().parse::<MethodId>().unwrap(), m);
        }
        for p in PotentialSpec::ALL {
            assert_eq!(p.name().parse::<PotentialSpec>().unwrap(), p);
        }
        assert!("nope".parse::<MethodId>().is_err());
    }

    #[test]
    fn config_defaults_and_micro_step() {
        let c = SolverConfig::scaled(1e-3, 100, 8e-4, 0.1, PotentialSpec::Sine, MethodId::ExtraAB)
            .unwrap();
        assert_eq!((c.micro_m, c.micro_used), (1000, 500));
        assert!((c.dt_micro() - 8e-7).abs() < 1e-20);
        let aba = c.with_method(MethodId::ABA);
        assert!((aba.dt_micro() - 4e-7).abs() < 1e-20);
        assert_eq!(c.macro_steps().count, 125);
    }

    #[test]
    fn config_rejects_bad_micro() {
        let c = SolverConfig::canonical(MethodId::HmmAB).with_micro(10, 11);
        assert!(c.validate().is_err());
        let c = SolverConfig::canonical(MethodId::HmmAB).with_micro(0, 0);
        assert!(c.validate().is_err());
    }
}
