//! Dense square matrices and a cyclic Jacobi eigenvalue solver for the
//! symmetric case.

use crate::error::{Error, Result};

/// Asymmetry tolerated by [`symmetric_eigenvalues`], relative to the
/// largest entry.
pub const SYMMETRY_TOL: f64 = 1e-9;

const MAX_SWEEPS: usize = 100;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Shape(format!(
                "{} entries for a {n}x{n} matrix",
                data.len()
            )));
        }
        Ok(Self { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        self.data
            .chunks_exact(self.n)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in i + 1..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }
}

/// All eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues(c: &SquareMatrix) -> Result<Vec<f64>> {
    let n = c.dim();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if let Some(i) = c.data.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index: i });
    }
    let scale = c.max_abs();
    if c.max_asymmetry() > SYMMETRY_TOL * scale.max(1.0) {
        return Err(Error::Shape(format!(
            "matrix is not symmetric (asymmetry {:e})",
            c.max_asymmetry()
        )));
    }
    // work on the symmetrized copy
    let mut a = c.clone();
    for i in 0..n {
        for j in i + 1..n {
            let v = 0.5 * (a.get(i, j) + a.get(j, i));
            a.set(i, j, v);
            a.set(j, i, v);
        }
    }
    jacobi_sweeps(&mut a);
    let mut eig: Vec<f64> = (0..n).map(|i| a.get(i, i)).collect();
    eig.sort_unstable_by(f64::total_cmp);
    Ok(eig)
}

/// Largest eigenvalue of a symmetric matrix.
pub fn max_eigenvalue(c: &SquareMatrix) -> Result<f64> {
    let eig = symmetric_eigenvalues(c)?;
    Ok(eig[eig.len() - 1])
}

fn off_diagonal_norm(a: &SquareMatrix) -> f64 {
    let mut s = 0.0;
    for i in 0..a.n {
        for j in 0..a.n {
            if i != j {
                s += a.get(i, j) * a.get(i, j);
            }
        }
    }
    s.sqrt()
}

// Cyclic Jacobi rotations (row-by-row ordering) until the off-diagonal mass
// is negligible against the Frobenius norm.
fn jacobi_sweeps(a: &mut SquareMatrix) {
    let n = a.n;
    let total: f64 = a.data.iter().map(|v| v * v).sum::<f64>().sqrt();
    if total == 0.0 {
        return;
    }
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(a) <= f64::EPSILON * total {
            return;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, cs * akp - sn * akq);
                    a.set(k, q, sn * akp + cs * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, cs * apk - sn * aqk);
                    a.set(q, k, sn * apk + cs * aqk);
                }
                a.set(p, q, 0.0);
                a.set(q, p, 0.0);
            }
        }
    }
}
