//! Least-squares linear-phase FIR bandpass design and causal convolution.
//!
//! Frequencies are normalized to Nyquist: `1.0` is half the sampling rate.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::SampledSignal;

pub const DEFAULT_ORDER: usize = 10;
pub const DEFAULT_BAND: (f64, f64) = (0.02, 0.5);

/// Width of the don't-care region centered on each band edge.
pub const TRANSITION_WIDTH: f64 = 0.01;

/// Symmetric (Type I) FIR taps together with the design that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirCoefficients {
    taps: Vec<f64>,
    order: usize,
    band: (f64, f64),
}

impl FirCoefficients {
    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn band(&self) -> (f64, f64) {
        self.band
    }

    /// Group delay in samples.
    pub fn delay(&self) -> usize {
        self.order / 2
    }

    pub fn filter(&self, signal: &SampledSignal) -> Result<SampledSignal> {
        if signal.is_empty() {
            return Err(Error::EmptyInput);
        }
        signal.with_samples(convolve(signal.samples(), &self.taps))
    }
}

/// Least-squares bandpass design.
///
/// Minimizes the integrated squared error between the zero-phase amplitude
/// response `A(f) = a0 + sum_k a_k cos(k pi f)` and the ideal response (1 on
/// the passband, 0 on the stopbands), with a don't-care gap of
/// [`TRANSITION_WIDTH`] around each edge. The band integrals have closed
/// forms, so the normal equations are assembled exactly and solved by
/// Cholesky factorization.
pub fn design_firls(order: usize, low: f64, high: f64) -> Result<FirCoefficients> {
    if order < 2 || order % 2 != 0 {
        return Err(Error::UnsupportedOrder(order));
    }
    if !(low > 0.0 && low < high && high < 1.0) {
        return Err(Error::Band { low, high });
    }
    let half = TRANSITION_WIDTH / 2.0;
    let pass = (low + half, high - half);
    if pass.0 >= pass.1 {
        return Err(Error::Band { low, high });
    }
    let mut bands = vec![pass];
    if low - half > 0.0 {
        bands.push((0.0, low - half));
    }
    if high + half < 1.0 {
        bands.push((high + half, 1.0));
    }

    let m = order / 2;
    let n = m + 1;
    // Q[k][l] = sum over bands of int cos(k pi f) cos(l pi f) df
    let mut q = vec![0.0; n * n];
    for k in 0..n {
        for l in 0..n {
            q[k * n + l] = bands
                .iter()
                .map(|&(f1, f2)| {
                    0.5 * (cos_integral(k.abs_diff(l), f1, f2) + cos_integral(k + l, f1, f2))
                })
                .sum();
        }
    }
    let b: Vec<f64> = (0..n).map(|k| cos_integral(k, pass.0, pass.1)).collect();
    let a = solve_spd(&mut q, b, n)?;

    let mut taps = vec![0.0; order + 1];
    taps[m] = a[0];
    for k in 1..n {
        taps[m - k] = a[k] / 2.0;
        taps[m + k] = a[k] / 2.0;
    }
    Ok(FirCoefficients {
        taps,
        order,
        band: (low, high),
    })
}

/// `int_{f1}^{f2} cos(j pi f) df`
fn cos_integral(j: usize, f1: f64, f2: f64) -> f64 {
    if j == 0 {
        f2 - f1
    } else {
        let w = j as f64 * PI;
        ((w * f2).sin() - (w * f1).sin()) / w
    }
}

/// In-place Cholesky solve of a symmetric positive definite system.
fn solve_spd(a: &mut [f64], mut b: Vec<f64>, n: usize) -> Result<Vec<f64>> {
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if d <= 0.0 {
            return Err(Error::Parameter(
                "least-squares normal equations are not positive definite".into(),
            ));
        }
        let d = d.sqrt();
        a[j * n + j] = d;
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / d;
        }
    }
    for i in 0..n {
        let s: f64 = (0..i).map(|k| a[i * n + k] * b[k]).sum();
        b[i] = (b[i] - s) / a[i * n + i];
    }
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[k * n + i] * b[k]).sum();
        b[i] = (b[i] - s) / a[i * n + i];
    }
    Ok(b)
}

/// Causal direct-form convolution with zero initial conditions, truncated
/// to the input length.
pub fn convolve(x: &[f64], taps: &[f64]) -> Vec<f64> {
    (0..x.len())
        .map(|n| {
            let span = taps.len().min(n + 1);
            taps[..span]
                .iter()
                .zip(x[n + 1 - span..=n].iter().rev())
                .map(|(h, v)| h * v)
                .sum()
        })
        .collect()
}

/// Advance a filtered signal by `order / 2` samples to undo the group delay
/// of a linear-phase filter. The vacated tail repeats the last sample.
pub fn compensate_delay(x: &[f64], order: usize) -> Result<Vec<f64>> {
    let shift = order / 2;
    if x.len() <= shift || x.is_empty() {
        return Err(Error::TooShort {
            needed: shift + 1,
            got: x.len(),
        });
    }
    let last = x[x.len() - 1];
    let mut out = Vec::with_capacity(x.len());
    out.extend_from_slice(&x[shift..]);
    out.resize(x.len(), last);
    Ok(out)
}

/// Complex frequency response `(re, im)` at normalized frequency `f`.
pub fn frequency_response(taps: &[f64], f: f64) -> (f64, f64) {
    let w = PI * f;
    taps.iter()
        .enumerate()
        .fold((0.0, 0.0), |(re, im), (n, &h)| {
            let phi = w * n as f64;
            (re + h * phi.cos(), im - h * phi.sin())
        })
}

/// Magnitude response at normalized frequency `f`.
pub fn magnitude_response(taps: &[f64], f: f64) -> f64 {
    let (re, im) = frequency_response(taps, f);
    re.hypot(im)
}
