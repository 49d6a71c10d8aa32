//! Dense reference linear algebra for the oracle tests.
#![allow(dead_code)]

use multisplit::operators::TridiagonalSystem;
use multisplit::ComplexScalar as C;

pub type Dense = Vec<Vec<C>>;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn to_dense(sys: &TridiagonalSystem) -> Dense {
    let n = sys.len();
    let mut a = vec![vec![c(0.0, 0.0); n]; n];
    for i in 0..n {
        a[i][i] = sys.diag()[i];
        if i + 1 < n {
            a[i][i + 1] = sys.upper()[i];
            a[i + 1][i] = sys.lower()[i];
        }
    }
    a
}

pub fn diag_dense(d: &[C]) -> Dense {
    let n = d.len();
    let mut a = vec![vec![c(0.0, 0.0); n]; n];
    for i in 0..n {
        a[i][i] = d[i];
    }
    a
}

pub fn identity(n: usize) -> Dense {
    diag_dense(&vec![c(1.0, 0.0); n])
}

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let m = b[0].len();
    let mut out = vec![vec![c(0.0, 0.0); m]; n];
    for i in 0..n {
        for k in 0..b.len() {
            for j in 0..m {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

pub fn matpow(a: &Dense, p: usize) -> Dense {
    (0..p).fold(identity(a.len()), |acc, _| matmul(&acc, a))
}

pub fn matvec(a: &Dense, x: &[C]) -> Vec<C> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(r, v)| r * v).sum())
        .collect()
}

/// Gaussian elimination with partial pivoting on the full matrix.
pub fn dense_solve(a: &Dense, b: &[C]) -> Vec<C> {
    let n = a.len();
    let mut m: Vec<Vec<C>> = a
        .iter()
        .zip(b)
        .map(|(row, &r)| {
            let mut v = row.clone();
            v.push(r);
            v
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].norm().total_cmp(&m[j][col].norm()))
            .unwrap();
        m.swap(col, piv);
        let pivot = m[col].clone();
        for row in m.iter_mut().skip(col + 1) {
            let f = row[col] / pivot[col];
            for (a, p) in row[col..].iter_mut().zip(&pivot[col..]) {
                *a -= f * p;
            }
        }
    }
    let mut x = vec![c(0.0, 0.0); n];
    for i in (0..n).rev() {
        let s: C = (i + 1..n).map(|k| m[i][k] * x[k]).sum();
        x[i] = (m[i][n] - s) / m[i][i];
    }
    x
}

pub fn dense_inverse_apply(a: &Dense, x: &[C]) -> Vec<C> {
    dense_solve(a, x)
}

pub fn max_abs(v: &[C]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_rel_diff(a: &[C], b: &[C]) -> f64 {
    let d = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    d / max_abs(b).max(f64::MIN_POSITIVE)
}

/// Random diagonally dominant complex tridiagonal system of size `n`.
pub fn random_dominant_system(rng: &mut impl rand::Rng, n: usize) -> (TridiagonalSystem, Vec<C>) {
    let mut z = || c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let lower: Vec<C> = (0..n - 1).map(|_| z()).collect();
    let upper: Vec<C> = (0..n - 1).map(|_| z()).collect();
    let rhs: Vec<C> = (0..n).map(|_| z()).collect();
    let diag: Vec<C> = (0..n)
        .map(|i| {
            let off = if i > 0 { lower[i - 1].norm() } else { 0.0 }
                + if i + 1 < n { upper[i].norm() } else { 0.0 };
            let d = z();
            let dir = if d.norm() > 0.0 {
                d / d.norm()
            } else {
                c(1.0, 0.0)
            };
            dir * (off + 0.5 + d.norm())
        })
        .collect();
    (TridiagonalSystem::new(lower, diag, upper).unwrap(), rhs)
}

/// Dense `n x n` matrix `tridiag(-a, 1 + 2a + shift_j, -a)` built from scratch.
pub fn dense_laplacian_like(n: usize, a: C, shifts: &[C]) -> Dense {
    let mut m = vec![vec![c(0.0, 0.0); n]; n];
    for j in 0..n {
        m[j][j] = c(1.0, 0.0) + 2.0 * a + shifts.get(j).copied().unwrap_or_default();
        if j > 0 {
            m[j][j - 1] = -a;
        }
        if j + 1 < n {
            m[j][j + 1] = -a;
        }
    }
    m
}

pub fn random_vec(rng: &mut impl rand::Rng, n: usize) -> Vec<C> {
    (0..n)
        .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}
