//! Signal container, windowed mean removal and overlap-add recombination.
//!
//! Every filter in the toolkit runs on mean-removed windows of a longer
//! recording. [`plan_windows`] cuts the recording into fixed-length windows
//! with a fixed hop, [`remove_mean`] takes the per-window arithmetic mean out
//! and [`reassemble`] stitches processed windows back together with a linear
//! crossfade over each overlap.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sampling rate of the recordings the toolkit was tuned for.
pub const DEFAULT_SAMPLE_RATE: f64 = 256.0;

/// A uniformly sampled, finite, real-valued sequence (amplitudes in µV).
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    samples: Vec<f64>,
    sample_rate: f64,
}

impl SampledSignal {
    pub fn new(samples: Vec<f64>, sample_rate: f64) -> Result<Self> {
        if !(sample_rate.is_finite() && sample_rate > 0.0) {
            return Err(Error::Parameter(format!(
                "sample rate must be positive and finite, got {sample_rate}"
            )));
        }
        if let Some(index) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Duration in seconds.
    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }

    /// New signal at the same sampling rate.
    pub fn with_samples(&self, samples: Vec<f64>) -> Result<Self> {
        Self::new(samples, self.sample_rate)
    }
}

/// Segmentation of a signal into fixed-length windows with a fixed overlap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowPlan {
    window_len: usize,
    overlap_fraction: f64,
    hop: usize,
}

impl Default for WindowPlan {
    fn default() -> Self {
        Self::new(256, 0.25).expect("default window plan is valid")
    }
}

impl WindowPlan {
    pub fn new(window_len: usize, overlap_fraction: f64) -> Result<Self> {
        if window_len == 0 {
            return Err(Error::Parameter("window length must be >= 1".into()));
        }
        if !(0.0..1.0).contains(&overlap_fraction) {
            return Err(Error::Parameter(format!(
                "overlap fraction must lie in [0, 1), got {overlap_fraction}"
            )));
        }
        let hop = (window_len as f64 * (1.0 - overlap_fraction)).round() as usize;
        if hop == 0 || hop > window_len {
            return Err(Error::Parameter(format!(
                "window length {window_len} with overlap {overlap_fraction} gives hop {hop}"
            )));
        }
        Ok(Self {
            window_len,
            overlap_fraction,
            hop,
        })
    }

    pub fn window_len(&self) -> usize {
        self.window_len
    }

    pub fn overlap_fraction(&self) -> f64 {
        self.overlap_fraction
    }

    pub fn hop(&self) -> usize {
        self.hop
    }
}

/// Half-open `(start, end)` window ranges covering `[0, signal_len)`.
///
/// Consecutive starts differ by the plan's hop; the last window is truncated
/// at the end of the signal rather than padded.
pub fn plan_windows(signal_len: usize, plan: &WindowPlan) -> Result<Vec<(usize, usize)>> {
    if signal_len == 0 {
        return Err(Error::EmptyInput);
    }
    let mut ranges = Vec::with_capacity(signal_len / plan.hop + 1);
    let mut start = 0;
    loop {
        let end = (start + plan.window_len).min(signal_len);
        ranges.push((start, end));
        if end == signal_len {
            break;
        }
        start += plan.hop;
    }
    Ok(ranges)
}

/// Subtract the window's arithmetic mean from every sample.
pub fn remove_mean(window: &[f64]) -> Result<Vec<f64>> {
    if window.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mu = mean(window);
    Ok(window.iter().map(|v| v - mu).collect())
}

pub(crate) fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Merge processed windows back into one signal of length `signal_len`.
///
/// Windows are folded in order. Where a window overlaps what has already
/// been written, the blend weight of the new window ramps linearly from 0 to
/// 1 across the overlap (exclusive at both ends), so two windows that agree
/// on the overlap reproduce their common values exactly.
pub fn reassemble(
    windows: &[Vec<f64>],
    ranges: &[(usize, usize)],
    signal_len: usize,
) -> Result<Vec<f64>> {
    if windows.len() != ranges.len() {
        return Err(Error::Shape(format!(
            "{} windows for {} ranges",
            windows.len(),
            ranges.len()
        )));
    }
    if windows.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut out = vec![0.0; signal_len];
    let mut covered = 0usize;
    for (i, (win, &(start, end))) in windows.iter().zip(ranges).enumerate() {
        if end < start || end > signal_len || win.len() != end - start {
            return Err(Error::Shape(format!(
                "window {i} has {} samples for range ({start}, {end}) in a signal of {signal_len}",
                win.len()
            )));
        }
        if start > covered {
            return Err(Error::Shape(format!(
                "gap before window {i}: samples {covered}..{start} are not covered"
            )));
        }
        let overlap = covered.min(end) - start;
        let denom = (overlap + 1) as f64;
        for (j, &v) in win[..overlap].iter().enumerate() {
            let w = (j + 1) as f64 / denom;
            let slot = &mut out[start + j];
            *slot += w * (v - *slot);
        }
        out[start + overlap..end].copy_from_slice(&win[overlap..]);
        covered = covered.max(end);
    }
    if covered != signal_len {
        return Err(Error::Shape(format!(
            "windows cover {covered} of {signal_len} samples"
        )));
    }
    Ok(out)
}
