//! Stationary (undecimated) wavelet transform by the à-trous scheme, with
//! universal-threshold shrinkage of the detail coefficients.
//!
//! The input is extended periodically to a multiple of `2^levels` samples.
//! Level `j` filters the previous approximation with the wavelet's filter
//! pair upsampled by `2^(j-1)`; nothing is decimated, so every coefficient
//! array has the padded length and circular shifts of the input commute
//! with the transform.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wavelet::Wavelet;

pub const DEFAULT_LEVELS: usize = 6;

/// MAD-to-sigma factor for Gaussian noise.
const MAD_SCALE: f64 = 0.6745;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Extension {
    #[default]
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdMode {
    #[default]
    Soft,
    Hard,
}

impl fmt::Display for ThresholdMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ThresholdMode::Soft => "soft",
            ThresholdMode::Hard => "hard",
        })
    }
}

impl FromStr for ThresholdMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "soft" => Ok(ThresholdMode::Soft),
            "hard" => Ok(ThresholdMode::Hard),
            other => Err(Error::Parameter(format!(
                "unknown threshold mode '{other}' (expected soft or hard)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwtConfig {
    pub wavelet: Wavelet,
    pub levels: usize,
    pub mode: ThresholdMode,
    pub multiplier: f64,
}

impl Default for SwtConfig {
    fn default() -> Self {
        Self {
            wavelet: Wavelet::default(),
            levels: DEFAULT_LEVELS,
            mode: ThresholdMode::default(),
            multiplier: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwtDecomposition {
    /// Detail coefficients, level 1 (finest) first.
    pub details: Vec<Vec<f64>>,
    pub approximation: Vec<f64>,
    pub wavelet: Wavelet,
    pub original_len: usize,
    pub extension: Extension,
}

impl SwtDecomposition {
    pub fn levels(&self) -> usize {
        self.details.len()
    }

    pub fn padded_len(&self) -> usize {
        self.approximation.len()
    }
}

/// Forward transform.
pub fn swt_decompose(x: &[f64], levels: usize, wavelet: Wavelet) -> Result<SwtDecomposition> {
    if levels < 1 {
        return Err(Error::Parameter("SWT needs at least one level".into()));
    }
    if x.is_empty() {
        return Err(Error::EmptyInput);
    }
    if levels >= usize::BITS as usize - 1 {
        return Err(Error::Parameter(format!("{levels} SWT levels is too many")));
    }
    let block = 1usize << levels;
    let padded_len = x.len().div_ceil(block) * block;
    let mut approx: Vec<f64> = (0..padded_len).map(|i| x[i % x.len()]).collect();

    let lo = wavelet.lowpass();
    let hi = wavelet.highpass();
    let mut details = Vec::with_capacity(levels);
    for level in 0..levels {
        let step = 1usize << level;
        let detail = circular_filter(&approx, &hi, step);
        approx = circular_filter(&approx, lo, step);
        details.push(detail);
    }
    Ok(SwtDecomposition {
        details,
        approximation: approx,
        wavelet,
        original_len: x.len(),
        extension: Extension::Periodic,
    })
}

/// `out[t] = sum_k filter[k] * x[(t - k * step) mod n]`
fn circular_filter(x: &[f64], filter: &[f64], step: usize) -> Vec<f64> {
    let n = x.len();
    let offsets: Vec<usize> = (0..filter.len()).map(|k| (k * step) % n).collect();
    (0..n)
        .map(|t| {
            filter
                .iter()
                .zip(&offsets)
                .map(|(h, &off)| h * x[(t + n - off) % n])
                .sum()
        })
        .collect()
}

/// Adjoint of [`circular_filter`]: `out[t] = sum_k filter[k] * x[(t + k * step) mod n]`
fn circular_correlate_add(out: &mut [f64], x: &[f64], filter: &[f64], step: usize) {
    let n = x.len();
    let offsets: Vec<usize> = (0..filter.len()).map(|k| (k * step) % n).collect();
    for (t, o) in out.iter_mut().enumerate() {
        *o += filter
            .iter()
            .zip(&offsets)
            .map(|(h, &off)| h * x[(t + off) % n])
            .sum::<f64>();
    }
}

/// Inverse transform, trimmed to the original signal length.
///
/// Each level is inverted by the adjoint of its filter pair scaled by one
/// half, which equals the average of the even- and odd-phase decimated
/// inverses.
pub fn iswt_reconstruct(dec: &SwtDecomposition) -> Result<Vec<f64>> {
    let n = dec.approximation.len();
    if dec.details.is_empty() {
        return Err(Error::Shape("decomposition has no detail levels".into()));
    }
    if let Some((level, d)) = dec.details.iter().enumerate().find(|(_, d)| d.len() != n) {
        return Err(Error::Shape(format!(
            "level {} detail has {} coefficients, approximation has {n}",
            level + 1,
            d.len()
        )));
    }
    if n == 0 || dec.original_len == 0 || dec.original_len > n {
        return Err(Error::Shape(format!(
            "original length {} does not fit padded length {n}",
            dec.original_len
        )));
    }
    let lo = dec.wavelet.lowpass();
    let hi = dec.wavelet.highpass();
    let mut approx = dec.approximation.clone();
    for (level, detail) in dec.details.iter().enumerate().rev() {
        let step = 1usize << level;
        let mut prev = vec![0.0; n];
        circular_correlate_add(&mut prev, &approx, lo, step);
        circular_correlate_add(&mut prev, detail, &hi, step);
        prev.iter_mut().for_each(|v| *v *= 0.5);
        approx = prev;
    }
    approx.truncate(dec.original_len);
    Ok(approx)
}

pub fn soft_threshold(c: f64, t: f64) -> f64 {
    c.signum() * (c.abs() - t).max(0.0)
}

pub fn hard_threshold(c: f64, t: f64) -> f64 {
    if c.abs() > t {
        c
    } else {
        0.0
    }
}

/// Noise scale from the finest details: `median(|d1|) / 0.6745`.
pub fn noise_sigma(dec: &SwtDecomposition) -> f64 {
    let Some(finest) = dec.details.first() else {
        return 0.0;
    };
    let mut mags: Vec<f64> = finest.iter().map(|v| v.abs()).collect();
    median_in_place(&mut mags) / MAD_SCALE
}

/// Universal threshold `multiplier * sigma * sqrt(2 ln N)` over the padded
/// length `N`.
pub fn universal_threshold(dec: &SwtDecomposition, multiplier: f64) -> f64 {
    let n = dec.padded_len().max(1) as f64;
    multiplier * noise_sigma(dec) * (2.0 * n.ln()).sqrt()
}

/// Shrink every detail level with one global threshold; the approximation
/// is left untouched.
pub fn threshold_coeffs(
    dec: &SwtDecomposition,
    mode: ThresholdMode,
    multiplier: f64,
) -> SwtDecomposition {
    let t = universal_threshold(dec, multiplier);
    let shrink = match mode {
        ThresholdMode::Soft => soft_threshold,
        ThresholdMode::Hard => hard_threshold,
    };
    SwtDecomposition {
        details: dec
            .details
            .iter()
            .map(|d| d.iter().map(|&c| shrink(c, t)).collect())
            .collect(),
        ..dec.clone()
    }
}

/// Decompose, threshold and reconstruct.
pub fn denoise(x: &[f64], cfg: &SwtConfig) -> Result<Vec<f64>> {
    let dec = swt_decompose(x, cfg.levels, cfg.wavelet)?;
    iswt_reconstruct(&threshold_coeffs(&dec, cfg.mode, cfg.multiplier))
}

fn median_in_place(v: &mut [f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    let mid = v.len() / 2;
    let (_, upper, _) = v.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *upper;
    if v.len() % 2 == 1 {
        upper
    } else {
        let lower = v[..mid].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower + upper)
    }
}
