//! Natural cubic spline interpolation.

use crate::error::{Error, Result};

/// Natural cubic spline through strictly increasing knots.
#[derive(Debug, Clone)]
pub struct NaturalSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    // second derivatives at the knots; zero at both ends
    m: Vec<f64>,
}

impl NaturalSpline {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::Shape(format!(
                "{} knot positions for {} values",
                xs.len(),
                ys.len()
            )));
        }
        if xs.len() < 2 {
            return Err(Error::DegenerateEnvelope { knots: xs.len() });
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Parameter(
                "spline knots must be strictly increasing".into(),
            ));
        }
        let m = second_derivatives(&xs, &ys);
        Ok(Self { xs, ys, m })
    }

    pub fn knots(&self) -> (&[f64], &[f64]) {
        (&self.xs, &self.ys)
    }

    /// Evaluate at `t`. Outside the knot range the end segments are
    /// extended.
    pub fn eval(&self, t: f64) -> f64 {
        let seg = match self.xs.partition_point(|&x| x <= t) {
            0 => 0,
            i => (i - 1).min(self.xs.len() - 2),
        };
        self.eval_segment(seg, t)
    }

    /// Evaluate at the sample positions `0, 1, .., n - 1`.
    pub fn eval_grid(&self, n: usize) -> Vec<f64> {
        let last = self.xs.len() - 2;
        let mut seg = 0;
        (0..n)
            .map(|i| {
                let t = i as f64;
                while seg < last && self.xs[seg + 1] <= t {
                    seg += 1;
                }
                self.eval_segment(seg, t)
            })
            .collect()
    }

    fn eval_segment(&self, i: usize, t: f64) -> f64 {
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let h = x1 - x0;
        let a = (x1 - t) / h;
        let b = (t - x0) / h;
        a * self.ys[i]
            + b * self.ys[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }
}

/// Thomas-algorithm solve of the natural-spline moment equations.
fn second_derivatives(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut m = vec![0.0; n];
    if n < 3 {
        return m;
    }
    let inner = n - 2;
    let mut diag = vec![0.0; inner];
    let mut upper = vec![0.0; inner];
    let mut rhs = vec![0.0; inner];
    for k in 0..inner {
        let i = k + 1;
        let h0 = xs[i] - xs[i - 1];
        let h1 = xs[i + 1] - xs[i];
        diag[k] = 2.0 * (h0 + h1);
        upper[k] = h1;
        rhs[k] = 6.0 * ((ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0);
    }
    // sub-diagonal entry of row k is h0 of that row
    for k in 1..inner {
        let lower = xs[k + 1] - xs[k];
        let w = lower / diag[k - 1];
        diag[k] -= w * upper[k - 1];
        rhs[k] -= w * rhs[k - 1];
    }
    m[inner] = rhs[inner - 1] / diag[inner - 1];
    for k in (0..inner - 1).rev() {
        m[k + 1] = (rhs[k] - upper[k] * m[k + 2]) / diag[k];
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Dense solve for the 4(n-1) piecewise-cubic coefficients from the
    /// interpolation, continuity and natural end conditions.
    fn dense_spline(xs: &[f64], ys: &[f64]) -> impl Fn(f64) -> f64 {
        let segs = xs.len() - 1;
        let size = 4 * segs;
        let mut a = vec![vec![0.0; size]; size];
        let mut b = vec![0.0; size];
        let mut row = 0;
        // s_i(t) = c0 + c1 (t - x_i) + c2 (t - x_i)^2 + c3 (t - x_i)^3
        for i in 0..segs {
            let h = xs[i + 1] - xs[i];
            a[row][4 * i] = 1.0;
            b[row] = ys[i];
            row += 1;
            a[row][4 * i] = 1.0;
            a[row][4 * i + 1] = h;
            a[row][4 * i + 2] = h * h;
            a[row][4 * i + 3] = h * h * h;
            b[row] = ys[i + 1];
            row += 1;
            if i + 1 < segs {
                a[row][4 * i + 1] = 1.0;
                a[row][4 * i + 2] = 2.0 * h;
                a[row][4 * i + 3] = 3.0 * h * h;
                a[row][4 * (i + 1) + 1] = -1.0;
                row += 1;
                a[row][4 * i + 2] = 2.0;
                a[row][4 * i + 3] = 6.0 * h;
                a[row][4 * (i + 1) + 2] = -2.0;
                row += 1;
            }
        }
        a[row][2] = 2.0;
        row += 1;
        let h = xs[segs] - xs[segs - 1];
        a[row][4 * (segs - 1) + 2] = 2.0;
        a[row][4 * (segs - 1) + 3] = 6.0 * h;
        // Gaussian elimination with partial pivoting
        for col in 0..size {
            let piv = (col..size)
                .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
                .unwrap();
            a.swap(col, piv);
            b.swap(col, piv);
            for r in col + 1..size {
                let f = a[r][col] / a[col][col];
                if f != 0.0 {
                    for c in col..size {
                        a[r][c] -= f * a[col][c];
                    }
                    b[r] -= f * b[col];
                }
            }
        }
        let mut c = vec![0.0; size];
        for r in (0..size).rev() {
            let s: f64 = (r + 1..size).map(|k| a[r][k] * c[k]).sum();
            c[r] = (b[r] - s) / a[r][r];
        }
        let xs = xs.to_vec();
        move |t: f64| {
            let i = xs.partition_point(|&x| x <= t).saturating_sub(1).min(segs - 1);
            let d = t - xs[i];
            c[4 * i] + d * (c[4 * i + 1] + d * (c[4 * i + 2] + d * c[4 * i + 3]))
        }
    }

    #[test]
    fn constant_knots_give_constant_spline() {
        let s = NaturalSpline::new(vec![-3.0, 1.0, 4.0, 9.0, 20.0], vec![2.5; 5]).unwrap();
        for v in s.eval_grid(20) {
            assert!((v - 2.5).abs() < 1e-12);
        }
    }

    #[test]
    fn two_knots_give_a_line() {
        let s = NaturalSpline::new(vec![2.0, 10.0], vec![1.0, 5.0]).unwrap();
        for (i, v) in s.eval_grid(12).into_iter().enumerate() {
            let expected = 1.0 + 0.5 * (i as f64 - 2.0);
            assert!((v - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn passes_through_knots() {
        let xs = vec![0.0, 3.0, 4.0, 8.0, 15.0, 16.0];
        let ys = vec![1.0, -2.0, 0.5, 7.0, -1.0, 0.0];
        let s = NaturalSpline::new(xs.clone(), ys.clone()).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert!((s.eval(*x) - y).abs() < 1e-10);
        }
    }

    #[test]
    fn matches_dense_solver_on_random_knots() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let mut xs = vec![0.0];
            for _ in 0..4 {
                let next = xs.last().unwrap() + rng.random_range(1.0..12.0);
                xs.push(next);
            }
            let ys: Vec<f64> = (0..5).map(|_| rng.random_range(-50.0..50.0)).collect();
            let s = NaturalSpline::new(xs.clone(), ys.clone()).unwrap();
            let oracle = dense_spline(&xs, &ys);
            let n = *xs.last().unwrap() as usize + 1;
            for (i, v) in s.eval_grid(n).into_iter().enumerate() {
                let o = oracle(i as f64);
                assert!((v - o).abs() < 1e-9, "t={i}: {v} vs {o}");
            }
        }
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(matches!(
            NaturalSpline::new(vec![1.0], vec![1.0]),
            Err(Error::DegenerateEnvelope { knots: 1 })
        ));
        assert!(NaturalSpline::new(vec![1.0, 1.0], vec![1.0, 2.0]).is_err());
        assert!(NaturalSpline::new(vec![1.0, 2.0], vec![1.0]).is_err());
    }
}
