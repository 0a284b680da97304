//! FIR median hybrid (FMH) filter: the median of five linear subfilters
//! around each sample.
//!
//! With half-length `L` the subfilters at index `n` are
//!
//! | subfilter | value                                  |
//! |-----------|----------------------------------------|
//! | `p1`      | mean of `x[n+1 ..= n+L]` (forward)     |
//! | `p2`      | `sum h[i] x[n-1-i]` (backward FIR)     |
//! | `p3`      | `x[n]`                                 |
//! | `p4`      | `sum h[i] x[n+1+i]` (forward FIR)      |
//! | `p5`      | mean of `x[n-L ..= n-1]` (backward)    |
//!
//! and the output is the plain median of `w_i * p_i`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_HALF_LEN: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FmhConfig {
    half_len: usize,
    weights: [f64; 5],
    taps: Vec<f64>,
    unit_gain: bool,
}

impl Default for FmhConfig {
    fn default() -> Self {
        Self::uniform(DEFAULT_HALF_LEN).expect("default FMH config is valid")
    }
}

impl FmhConfig {
    pub fn new(half_len: usize, weights: [f64; 5], taps: Vec<f64>) -> Result<Self> {
        if half_len < 2 {
            return Err(Error::Parameter(format!(
                "FMH half length must be >= 2, got {half_len}"
            )));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::Parameter(format!(
                "FMH weights must be positive, got {weights:?}"
            )));
        }
        if taps.len() != half_len {
            return Err(Error::Shape(format!(
                "{} FIR taps for half length {half_len}",
                taps.len()
            )));
        }
        let unit_gain = (taps.iter().sum::<f64>() - 1.0).abs() < 1e-12;
        Ok(Self {
            half_len,
            weights,
            taps,
            unit_gain,
        })
    }

    /// Unit weights and uniform taps `1/L`, so the FIR subfilters reduce to
    /// one-sided means.
    pub fn uniform(half_len: usize) -> Result<Self> {
        let taps = vec![1.0 / half_len.max(1) as f64; half_len];
        Self::new(half_len, [1.0; 5], taps)
    }

    pub fn half_len(&self) -> usize {
        self.half_len
    }

    pub fn weights(&self) -> [f64; 5] {
        self.weights
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }
}

/// The five subfilter outputs at an interior index `n`
/// (`L <= n < x.len() - L`).
pub fn subfilter_outputs(x: &[f64], n: usize, cfg: &FmhConfig) -> Result<[f64; 5]> {
    let l = cfg.half_len;
    if n < l || n + l >= x.len() {
        return Err(Error::Parameter(format!(
            "index {n} is not interior for half length {l} in {} samples",
            x.len()
        )));
    }
    let forward = &x[n + 1..=n + l];
    let backward = &x[n - l..n];
    let p1 = anchored_mean(forward);
    let p5 = anchored_mean(backward);
    let p2 = cfg.fir(backward.iter().rev().copied());
    let p4 = cfg.fir(forward.iter().copied());
    Ok([p1, p2, x[n], p4, p5])
}

// Sums are taken relative to the window's first sample so that a constant
// window returns its value bit-exactly.
fn anchored_mean(w: &[f64]) -> f64 {
    let r = w[0];
    r + w.iter().map(|v| v - r).sum::<f64>() / w.len() as f64
}

impl FmhConfig {
    /// `sum h[i] * s[i]`, with `s` ordered nearest sample first.
    fn fir(&self, samples: impl Iterator<Item = f64> + Clone) -> f64 {
        if self.unit_gain {
            let r = samples.clone().next().unwrap_or(0.0);
            r + self.taps.iter().zip(samples).map(|(h, v)| h * (v - r)).sum::<f64>()
        } else {
            self.taps.iter().zip(samples).map(|(h, v)| h * v).sum()
        }
    }
}

/// Third order statistic of `w_i * v_i`.
pub fn weighted_median5(values: [f64; 5], weights: [f64; 5]) -> f64 {
    let mut p = [0.0; 5];
    for i in 0..5 {
        p[i] = weights[i] * values[i];
    }
    p.sort_unstable_by(f64::total_cmp);
    p[2]
}

/// Filter a whole signal. The first and last `L` samples are handled by
/// reflecting the input about its ends (`x[-1] = x[0]`) before filtering.
pub fn fmh_filter(x: &[f64], cfg: &FmhConfig) -> Result<Vec<f64>> {
    let l = cfg.half_len;
    if x.len() < 2 * l + 1 {
        return Err(Error::TooShort {
            needed: 2 * l + 1,
            got: x.len(),
        });
    }
    let mut padded = Vec::with_capacity(x.len() + 2 * l);
    padded.extend(x[..l].iter().rev());
    padded.extend_from_slice(x);
    padded.extend(x[x.len() - l..].iter().rev());

    (l..l + x.len())
        .map(|n| subfilter_outputs(&padded, n, cfg).map(|p| weighted_median5(p, cfg.weights)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn config_validation() {
        assert!(FmhConfig::uniform(1).is_err());
        assert!(FmhConfig::new(3, [1.0, 1.0, 0.0, 1.0, 1.0], vec![0.3; 3]).is_err());
        assert!(FmhConfig::new(3, [1.0; 5], vec![0.5; 2]).is_err());
        assert_eq!(FmhConfig::default().half_len(), 16);
    }

    #[test]
    fn subfilters_on_constant() {
        let cfg = FmhConfig::uniform(4).unwrap();
        let x = [3.25; 20];
        let p = subfilter_outputs(&x, 10, &cfg).unwrap();
        for v in p {
            assert!((v - 3.25).abs() < 1e-14);
        }
    }

    #[test]
    fn subfilters_on_impulse() {
        let cfg = FmhConfig::uniform(4).unwrap();
        let mut x = [0.0; 21];
        x[10] = 1.0;
        assert_eq!(
            subfilter_outputs(&x, 10, &cfg).unwrap(),
            [0.0, 0.0, 1.0, 0.0, 0.0]
        );
    }

    #[test]
    fn subfilters_hand_computed() {
        let cfg = FmhConfig::new(2, [1.0; 5], vec![0.5, 0.5]).unwrap();
        let x = [1.0, 2.0, 4.0, 8.0, 16.0];
        assert_eq!(
            subfilter_outputs(&x, 2, &cfg).unwrap(),
            [12.0, 1.5, 4.0, 12.0, 1.5]
        );
        assert!(subfilter_outputs(&x, 1, &cfg).is_err());
        assert!(subfilter_outputs(&x, 3, &cfg).is_err());
    }

    #[test]
    fn asymmetric_taps_pair_with_nearest_samples() {
        let cfg = FmhConfig::new(2, [1.0; 5], vec![1.0, 0.0]).unwrap();
        let x = [1.0, 2.0, 4.0, 8.0, 16.0];
        let p = subfilter_outputs(&x, 2, &cfg).unwrap();
        assert_eq!(p[1], 2.0);
        assert_eq!(p[3], 8.0);
    }

    #[test]
    fn weighted_median_examples() {
        assert_eq!(weighted_median5([1.0, 2.0, 3.0, 4.0, 5.0], [1.0; 5]), 3.0);
        assert_eq!(
            weighted_median5([1.0, 5.0, 3.0, 4.0, 10.0], [2.0, 1.0, 1.0, 1.0, 1.0]),
            4.0
        );
        let w = [0.5, 3.0, 1.5, 2.0, 0.25];
        assert_eq!(weighted_median5([2.0; 5], w), 1.5 * 2.0);
    }

    #[test]
    fn constant_is_a_root() {
        for (c, l) in [(-7.5, 16), (0.1, 5), (1.0 / 3.0, 7), (123.456, 3)] {
            let x = vec![c; 100];
            assert_eq!(fmh_filter(&x, &FmhConfig::uniform(l).unwrap()).unwrap(), x);
        }
    }

    #[test]
    fn impulse_is_removed() {
        let mut x = vec![0.0; 101];
        x[50] = 1.0;
        let y = fmh_filter(&x, &FmhConfig::default()).unwrap();
        assert_eq!(y[50], 0.0);
    }

    #[test]
    fn step_preserved_outside_band() {
        let l = 8;
        let cfg = FmhConfig::uniform(l).unwrap();
        let edge = 2 * l;
        let x: Vec<f64> = (0..4 * l).map(|i| if i < edge { 0.0 } else { 1.0 }).collect();
        let y = fmh_filter(&x, &cfg).unwrap();
        for i in 0..x.len() {
            if i + l < edge || i >= edge + l {
                assert_eq!(y[i], x[i], "index {i}");
            }
        }
        assert!(y.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn too_short_rejected() {
        let cfg = FmhConfig::uniform(4).unwrap();
        assert!(matches!(
            fmh_filter(&[0.0; 8], &cfg),
            Err(Error::TooShort { needed: 9, got: 8 })
        ));
    }

    proptest! {
        #[test]
        fn output_bounded_by_neighbourhood(
            x in prop::collection::vec(-100.0f64..100.0, 40..200),
            l in 2usize..10,
        ) {
            let cfg = FmhConfig::uniform(l).unwrap();
            let y = fmh_filter(&x, &cfg).unwrap();
            prop_assert_eq!(y.len(), x.len());
            for n in l..x.len() - l {
                let hood = &x[n - l..=n + l];
                let lo = hood.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = hood.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                prop_assert!(y[n] >= lo - 1e-12 && y[n] <= hi + 1e-12);
            }
        }

        #[test]
        fn isolated_spike_removed(
            level in -50.0f64..50.0,
            spike in -500.0f64..500.0,
            pos in 5usize..55,
        ) {
            // nearer the ends the reflected padding puts a mirror image of
            // the spike inside its own neighbourhood
            let mut x = vec![level; 60];
            x[pos] += spike;
            let y = fmh_filter(&x, &FmhConfig::uniform(5).unwrap()).unwrap();
            prop_assert_eq!(y[pos], level);
        }
    }
}
