//! Eigenvalue-based SNR scoring.
//!
//! Signal and noise are each embedded in an `m`-lag trajectory matrix; the
//! SNR compares the dominant eigenvalues of the two covariances:
//! `S = 10 log10((ls - ln) / ln)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::eigen::{max_eigenvalue, SquareMatrix};
use crate::error::{Error, Result};
use crate::signal::{remove_mean, SampledSignal};

pub const DEFAULT_EMBED_DIM: usize = 32;

/// Matrix whose row `k` is `x[k .. k + m]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryMatrix<'a> {
    x: &'a [f64],
    m: usize,
}

impl<'a> TrajectoryMatrix<'a> {
    pub fn new(x: &'a [f64], m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Parameter("embedding dimension must be >= 1".into()));
        }
        if x.len() < m {
            return Err(Error::TooShort {
                needed: m,
                got: x.len(),
            });
        }
        Ok(Self { x, m })
    }

    pub fn rows(&self) -> usize {
        self.x.len() - self.m + 1
    }

    pub fn cols(&self) -> usize {
        self.m
    }

    pub fn row(&self, k: usize) -> &'a [f64] {
        &self.x[k..k + self.m]
    }

    /// `(1/K) X^T X`.
    pub fn covariance(&self) -> SquareMatrix {
        let k = self.rows();
        let mut c = SquareMatrix::zeros(self.m);
        for i in 0..self.m {
            for j in i..self.m {
                let a = &self.x[i..i + k];
                let b = &self.x[j..j + k];
                let v = a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>() / k as f64;
                c.set(i, j, v);
                c.set(j, i, v);
            }
        }
        c
    }
}

/// Trajectory covariance of `x` with embedding dimension `m`. No mean is
/// removed here.
pub fn covariance_matrix(x: &[f64], m: usize) -> Result<SquareMatrix> {
    Ok(TrajectoryMatrix::new(x, m)?.covariance())
}

/// `reference - estimate`, sample by sample.
pub fn residual_noise(reference: &SampledSignal, estimate: &SampledSignal) -> Result<SampledSignal> {
    check_pair(reference, estimate)?;
    let diff = reference
        .samples()
        .iter()
        .zip(estimate.samples())
        .map(|(r, e)| r - e)
        .collect();
    reference.with_samples(diff)
}

fn check_pair(a: &SampledSignal, b: &SampledSignal) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::Shape(format!(
            "signal lengths differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if a.sample_rate() != b.sample_rate() {
        return Err(Error::Shape(format!(
            "sample rates differ: {} vs {} Hz",
            a.sample_rate(),
            b.sample_rate()
        )));
    }
    Ok(())
}

/// Dominant covariance eigenvalue of the mean-removed input.
pub fn dominant_eigenvalue(x: &[f64], m: usize) -> Result<f64> {
    let centred = remove_mean(x)?;
    max_eigenvalue(&covariance_matrix(&centred, m)?)
}

/// SNR in dB. Fails with [`Error::ZeroNoise`] when the noise eigenvalue is
/// zero and [`Error::SignalWeakerThanNoise`] when it is not exceeded by the
/// signal's.
pub fn snr_db(signal: &[f64], noise: &[f64], m: usize) -> Result<f64> {
    let ls = dominant_eigenvalue(signal, m)?;
    let ln = dominant_eigenvalue(noise, m)?;
    snr_from_eigenvalues(ls, ln)
}

pub fn snr_from_eigenvalues(signal_eig: f64, noise_eig: f64) -> Result<f64> {
    if noise_eig <= 0.0 {
        return Err(Error::ZeroNoise);
    }
    if signal_eig <= noise_eig {
        return Err(Error::SignalWeakerThanNoise {
            signal_eig,
            noise_eig,
        });
    }
    Ok(10.0 * ((signal_eig - noise_eig) / noise_eig).log10())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SnrMode {
    /// Clean reference known: noise = clean - denoised.
    TrueNoise,
    /// Blind: noise = noisy - denoised, signal = denoised.
    ResidualProxy,
}

impl fmt::Display for SnrMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SnrMode::TrueNoise => "true-noise",
            SnrMode::ResidualProxy => "residual-proxy",
        })
    }
}

impl FromStr for SnrMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "true" | "true-noise" => Ok(SnrMode::TrueNoise),
            "proxy" | "residual-proxy" => Ok(SnrMode::ResidualProxy),
            other => Err(Error::Parameter(format!(
                "unknown SNR mode '{other}' (expected true or proxy)"
            ))),
        }
    }
}

/// Result of one SNR evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum SnrOutcome {
    Db { snr_db: f64 },
    /// Noise eigenvalue is zero: the estimate reproduces the reference.
    PerfectReconstruction,
    SignalWeakerThanNoise { signal_eig: f64, noise_eig: f64 },
}

impl SnrOutcome {
    pub fn db(&self) -> Option<f64> {
        match self {
            SnrOutcome::Db { snr_db } => Some(*snr_db),
            _ => None,
        }
    }

    fn from_result(r: Result<f64>) -> Result<Self> {
        match r {
            Ok(snr_db) => Ok(SnrOutcome::Db { snr_db }),
            Err(Error::ZeroNoise) => Ok(SnrOutcome::PerfectReconstruction),
            Err(Error::SignalWeakerThanNoise {
                signal_eig,
                noise_eig,
            }) => Ok(SnrOutcome::SignalWeakerThanNoise {
                signal_eig,
                noise_eig,
            }),
            Err(e) => Err(e),
        }
    }
}

impl fmt::Display for SnrOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SnrOutcome::Db { snr_db } => write!(f, "{snr_db} dB"),
            SnrOutcome::PerfectReconstruction => f.write_str("perfect reconstruction"),
            SnrOutcome::SignalWeakerThanNoise { .. } => f.write_str("signal weaker than noise"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnrReport {
    pub method: String,
    pub mode: SnrMode,
    pub outcome: SnrOutcome,
    pub runtime_ms: f64,
    pub params: BTreeMap<String, String>,
}

impl SnrReport {
    pub fn snr_db(&self) -> Option<f64> {
        self.outcome.db()
    }
}

/// Score a denoised signal. With `clean` the true noise is used, otherwise
/// the removed component stands in for it. Degenerate eigenvalue cases are
/// reported in [`SnrReport::outcome`] rather than as errors.
pub fn evaluate_method(
    method: &str,
    noisy: &SampledSignal,
    denoised: &SampledSignal,
    clean: Option<&SampledSignal>,
    m: usize,
    runtime_ms: f64,
    params: BTreeMap<String, String>,
) -> Result<SnrReport> {
    check_pair(noisy, denoised)?;
    if !(runtime_ms.is_finite() && runtime_ms >= 0.0) {
        return Err(Error::Parameter(format!("runtime {runtime_ms} ms")));
    }
    let (mode, signal, noise) = match clean {
        Some(clean) => {
            check_pair(clean, denoised)?;
            (SnrMode::TrueNoise, clean, residual_noise(clean, denoised)?)
        }
        None => (
            SnrMode::ResidualProxy,
            denoised,
            residual_noise(noisy, denoised)?,
        ),
    };
    let outcome = SnrOutcome::from_result(snr_db(signal.samples(), noise.samples(), m))?;
    Ok(SnrReport {
        method: method.to_string(),
        mode,
        outcome,
        runtime_ms,
        params,
    })
}
