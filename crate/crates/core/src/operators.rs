//! Split operators and the tridiagonal solver.
//!
//! The potential part is advanced explicitly with the diagonal factor
//! `1 - i dt V_j / eps`; the diffusion part (and the unsplit scheme) is an
//! implicit step with a constant-coefficient tridiagonal matrix solved by the
//! Thomas algorithm.

use crate::error::{Error, Result};
use crate::model::{ComplexScalar, Grid1D, PotentialSpec, WaveField};

const I: ComplexScalar = ComplexScalar::new(0.0, 1.0);
const ONE: ComplexScalar = ComplexScalar::new(1.0, 0.0);
const SQUARING_MAX: usize = 16;

/// Pivots with modulus below this are treated as singular.
pub const PIVOT_FLOOR: f64 = 1e-300;

/// `n x n` tridiagonal matrix stored by diagonals.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem {
    lower: Vec<ComplexScalar>,
    diag: Vec<ComplexScalar>,
    upper: Vec<ComplexScalar>,
}

impl TridiagonalSystem {
    /// `lower[i]` sits at row `i + 1`, `upper[i]` at row `i`.
    pub fn new(
        lower: Vec<ComplexScalar>,
        diag: Vec<ComplexScalar>,
        upper: Vec<ComplexScalar>,
    ) -> Result<Self> {
        let n = diag.len();
        if n == 0 {
            return Err(Error::Dimension {
                expected: 1,
                found: 0,
            });
        }
        for side in [&lower, &upper] {
            if side.len() != n - 1 {
                return Err(Error::Dimension {
                    expected: n - 1,
                    found: side.len(),
                });
            }
        }
        Ok(Self { lower, diag, upper })
    }

    /// Matrix with `1 + 2a + shift_j` on the diagonal and `-a` off it.
    fn laplacian_like(
        coeff: ComplexScalar,
        shifts: impl ExactSizeIterator<Item = ComplexScalar>,
    ) -> Self {
        let n = shifts.len();
        let off = vec![-coeff; n.saturating_sub(1)];
        let centre = ONE + 2.0 * coeff;
        Self {
            lower: off.clone(),
            diag: shifts.map(|s| centre + s).collect(),
            upper: off,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::laplacian_like(
            ComplexScalar::new(0.0, 0.0),
            std::iter::repeat_n(ComplexScalar::new(0.0, 0.0), n),
        )
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn lower(&self) -> &[ComplexScalar] {
        &self.lower
    }

    pub fn diag(&self) -> &[ComplexScalar] {
        &self.diag
    }

    pub fn upper(&self) -> &[ComplexScalar] {
        &self.upper
    }

    /// True when every diagonal is a single repeated value.
    pub fn has_uniform_diagonals(&self) -> bool {
        fn uniform(v: &[ComplexScalar]) -> bool {
            v.windows(2).all(|w| w[0] == w[1])
        }
        uniform(&self.lower) && uniform(&self.diag) && uniform(&self.upper)
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[ComplexScalar]) -> Result<Vec<ComplexScalar>> {
        let n = self.len();
        if x.len() != n {
            return Err(Error::Dimension {
                expected: n,
                found: x.len(),
            });
        }
        let mut y: Vec<ComplexScalar> = self.diag.iter().zip(x).map(|(d, v)| d * v).collect();
        for i in 0..n - 1 {
            y[i] += self.upper[i] * x[i + 1];
            y[i + 1] += self.lower[i] * x[i];
        }
        Ok(y)
    }
}

/// Diagonal explicit propagator for the potential part.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialPropagator {
    factors: Vec<ComplexScalar>,
    dt_micro: f64,
}

impl PotentialPropagator {
    /// `factors[j] = 1 - i * dt_micro * V_j / epsilon`.
    pub fn from_samples(samples: &[f64], dt_micro: f64, epsilon: f64) -> Self {
        let scale = dt_micro / epsilon;
        Self {
            factors: samples
                .iter()
                .map(|&v| ComplexScalar::new(1.0, -scale * v))
                .collect(),
            dt_micro,
        }
    }

    pub fn factors(&self) -> &[ComplexScalar] {
        &self.factors
    }

    pub fn dt_micro(&self) -> f64 {
        self.dt_micro
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        if n != self.factors.len() {
            return Err(Error::Dimension {
                expected: self.factors.len(),
                found: n,
            });
        }
        Ok(())
    }
}

pub fn build_potential_propagator(
    grid: &Grid1D,
    spec: PotentialSpec,
    dt_micro: f64,
    epsilon: f64,
) -> Result<PotentialPropagator> {
    if !(dt_micro > 0.0 && dt_micro.is_finite()) {
        return Err(Error::Config(format!(
            "micro step must be positive, got {dt_micro}"
        )));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::Config(format!(
            "epsilon must lie in (0, 1], got {epsilon}"
        )));
    }
    Ok(PotentialPropagator::from_samples(
        &spec.sample_interior(grid),
        dt_micro,
        epsilon,
    ))
}

/// Multiplies node `j` by `factors[j]^m` (exponentiation by squaring).
pub fn apply_potential_substeps(
    field: &WaveField,
    prop: &PotentialPropagator,
    m: usize,
) -> Result<WaveField> {
    prop.check_len(field.len())?;
    if m == 0 {
        return Ok(field.clone());
    }
    let values = field
        .values()
        .iter()
        .zip(prop.factors())
        .map(|(v, f)| v * node_power(*f, m))
        .collect();
    Ok(field.with_values(values))
}

/// `f^m`: by squaring for small `m`, otherwise in polar form with `ln|f|`
/// taken through `ln_1p`, which keeps factors close to the unit circle at
/// full relative accuracy for large `m`.
fn node_power(f: ComplexScalar, m: usize) -> ComplexScalar {
    if m <= SQUARING_MAX {
        return f.powu(m as u32);
    }
    let (re, im) = (f.re.abs(), f.im.abs());
    let (big, small) = if re >= im { (re, im) } else { (im, re) };
    if big == 0.0 {
        return ComplexScalar::new(0.0, 0.0);
    }
    let ln_r = big.ln() + 0.5 * (small / big).powi(2).ln_1p();
    let m = m as f64;
    ComplexScalar::from_polar((m * ln_r).exp(), m * f.arg())
}

/// Same result as [`apply_potential_substeps`] via `m` successive
/// multiplications.
pub fn apply_potential_repeated(
    field: &WaveField,
    prop: &PotentialPropagator,
    m: usize,
) -> Result<WaveField> {
    prop.check_len(field.len())?;
    let values = field
        .values()
        .iter()
        .zip(prop.factors())
        .map(|(&v, &f)| (0..m).fold(v, |acc, _| acc * f))
        .collect();
    Ok(field.with_values(values))
}

fn check_step(dt: f64) -> Result<()> {
    if dt >= 0.0 && dt.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "time step must be nonnegative, got {dt}"
        )))
    }
}

/// Implicit diffusion matrix `B2`: `1 + 2a` on the diagonal, `-a` off it,
/// with `a = i eps dt / dx^2`.
pub fn assemble_diffusion(grid: &Grid1D, epsilon: f64, dt: f64) -> Result<TridiagonalSystem> {
    check_step(dt)?;
    let a = I * (epsilon * dt / (grid.dx() * grid.dx()));
    let n = grid.interior_len();
    Ok(TridiagonalSystem::laplacian_like(
        a,
        std::iter::repeat_n(ComplexScalar::new(0.0, 0.0), n),
    ))
}

/// Backward-Euler matrix of the full scaled right-hand side
/// `i eps psi_xx - (i/eps) V psi`.
pub fn assemble_unsplit(
    grid: &Grid1D,
    epsilon: f64,
    dt: f64,
    spec: PotentialSpec,
) -> Result<TridiagonalSystem> {
    unsplit_from_samples(grid, epsilon, dt, &spec.sample_interior(grid))
}

pub(crate) fn unsplit_from_samples(
    grid: &Grid1D,
    epsilon: f64,
    dt: f64,
    samples: &[f64],
) -> Result<TridiagonalSystem> {
    check_step(dt)?;
    let a = I * (epsilon * dt / (grid.dx() * grid.dx()));
    let scale = dt / epsilon;
    Ok(TridiagonalSystem::laplacian_like(
        a,
        samples.iter().map(|&v| I * (scale * v)),
    ))
}

/// Backward-Euler matrix of `psi_t = i hbar/(2m) psi_xx - (i/hbar) V psi`.
pub fn assemble_physical(
    grid: &Grid1D,
    hbar: f64,
    mass: f64,
    dt: f64,
    spec: PotentialSpec,
) -> Result<TridiagonalSystem> {
    check_step(dt)?;
    let a = I * (hbar * dt / (2.0 * mass * grid.dx() * grid.dx()));
    let scale = dt / hbar;
    Ok(TridiagonalSystem::laplacian_like(
        a,
        spec.sample_interior(grid)
            .into_iter()
            .map(|v| I * (scale * v)),
    ))
}

/// Solves `sys * x = rhs` by forward elimination and back substitution
/// without pivoting.
pub fn thomas_solve(sys: &TridiagonalSystem, rhs: &[ComplexScalar]) -> Result<Vec<ComplexScalar>> {
    let n = sys.len();
    if rhs.len() != n {
        return Err(Error::Dimension {
            expected: n,
            found: rhs.len(),
        });
    }
    let (lower, diag, upper) = (sys.lower(), sys.diag(), sys.upper());
    let mut c = vec![ComplexScalar::new(0.0, 0.0); n];
    let mut x = vec![ComplexScalar::new(0.0, 0.0); n];

    let mut pivot = diag[0];
    if pivot.norm() < PIVOT_FLOOR {
        return Err(Error::SingularSystem {
            row: 0,
            pivot: pivot.norm(),
        });
    }
    x[0] = rhs[0] / pivot;
    for i in 1..n {
        c[i - 1] = upper[i - 1] / pivot;
        pivot = diag[i] - lower[i - 1] * c[i - 1];
        if pivot.norm() < PIVOT_FLOOR {
            return Err(Error::SingularSystem {
                row: i,
                pivot: pivot.norm(),
            });
        }
        x[i] = (rhs[i] - lower[i - 1] * x[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        let next = x[i + 1];
        x[i] -= c[i] * next;
    }
    Ok(x)
}

/// Solves the system for a field's values, keeping the grid.
pub fn solve_field(sys: &TridiagonalSystem, field: &WaveField) -> Result<WaveField> {
    Ok(field.with_values(thomas_solve(sys, field.values())?))
}

/// `dt_micro * max_j V(x_j) / epsilon` over all grid nodes; values above 1
/// violate `dt <= eps / V`.
pub fn stability_margin(spec: PotentialSpec, grid: &Grid1D, dt_micro: f64, epsilon: f64) -> f64 {
    let vmax = grid
        .nodes()
        .iter()
        .map(|&x| spec.eval(x))
        .fold(f64::NEG_INFINITY, f64::max);
    dt_micro * vmax / epsilon
}
