//! Empirical mode decomposition by envelope-mean sifting, and partial
//! reconstruction from a band of intrinsic mode functions (IMFs).

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spline::NaturalSpline;

pub const MIN_SIGNAL_LEN: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmdParams {
    pub max_imfs: usize,
    pub sd_threshold: f64,
    pub max_sift_iters: usize,
}

impl Default for EmdParams {
    fn default() -> Self {
        Self {
            max_imfs: 11,
            sd_threshold: 0.3,
            max_sift_iters: 10,
        }
    }
}

/// IMFs in extraction order (highest frequency first) plus the final
/// residual. `imfs.iter().sum() + residual` reproduces the input.
#[derive(Debug, Clone, PartialEq)]
pub struct ImfSet {
    pub imfs: Vec<Vec<f64>>,
    pub residual: Vec<f64>,
    pub sift_counts: Vec<usize>,
}

impl ImfSet {
    pub fn len(&self) -> usize {
        self.imfs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.imfs.is_empty()
    }

    pub fn signal_len(&self) -> usize {
        self.residual.len()
    }

    /// Sum of the IMFs whose one-based index falls in `keep`. Indices past
    /// the number of available IMFs are skipped; the residual is never
    /// included.
    pub fn reconstruct(&self, keep: RangeInclusive<usize>) -> Result<Vec<f64>> {
        let first = (*keep.start()).max(1);
        let last = (*keep.end()).min(self.imfs.len());
        if first > last {
            return Err(Error::EmptySelection);
        }
        let mut out = vec![0.0; self.signal_len()];
        for imf in &self.imfs[first - 1..last] {
            for (o, v) in out.iter_mut().zip(imf) {
                *o += v;
            }
        }
        Ok(out)
    }
}

/// Indices of local maxima and minima.
///
/// A flat run counts once, at its first index, and only when it is strictly
/// above (below) the samples on both sides of the run. Runs touching either
/// end of the signal never count.
pub fn find_extrema(x: &[f64]) -> Result<(Vec<usize>, Vec<usize>)> {
    if x.len() < 3 {
        return Err(Error::TooShort {
            needed: 3,
            got: x.len(),
        });
    }
    let mut maxima = Vec::new();
    let mut minima = Vec::new();
    let n = x.len();
    let mut i = 1;
    while i < n - 1 {
        let prev = x[i - 1];
        let cur = x[i];
        if prev == cur {
            i += 1;
            continue;
        }
        let mut j = i;
        while j + 1 < n && x[j + 1] == cur {
            j += 1;
        }
        if j + 1 < n {
            let next = x[j + 1];
            if prev < cur && next < cur {
                maxima.push(i);
            } else if prev > cur && next > cur {
                minima.push(i);
            }
        }
        i = j + 1;
    }
    Ok((maxima, minima))
}

/// Natural cubic spline through `x` at the given extrema, evaluated at
/// every sample.
///
/// The two extrema nearest each end are mirrored across that end before
/// fitting so the spline does not swing freely near the boundaries.
pub fn envelope(x: &[f64], extrema: &[usize]) -> Result<Vec<f64>> {
    if extrema.is_empty() {
        return Err(Error::DegenerateEnvelope { knots: 0 });
    }
    let n = x.len();
    let right_edge = (n - 1) as f64;
    let take = extrema.len().min(2);
    let mut xs = Vec::with_capacity(extrema.len() + 4);
    let mut ys = Vec::with_capacity(extrema.len() + 4);
    for &e in extrema[..take].iter().rev() {
        xs.push(-(e as f64));
        ys.push(x[e]);
    }
    for &e in extrema {
        xs.push(e as f64);
        ys.push(x[e]);
    }
    for &e in extrema[extrema.len() - take..].iter().rev() {
        xs.push(2.0 * right_edge - e as f64);
        ys.push(x[e]);
    }
    Ok(NaturalSpline::new(xs, ys)?.eval_grid(n))
}

/// Extract one IMF by repeatedly subtracting the mean of the upper and
/// lower envelopes.
///
/// Stops when the Cauchy-type criterion
/// `SD = sum (d_prev - d)^2 / (d_prev^2 + eps)` drops below `sd_threshold`,
/// after `max_sift_iters` passes, or when the detail runs out of extrema.
/// `eps = 1e-12 * max(1, max|d_prev|^2)` keeps the ratio finite at zero
/// crossings without breaking amplitude scaling. Returns the detail and the
/// number of passes made.
pub fn sift(x: &[f64], sd_threshold: f64, max_sift_iters: usize) -> Result<(Vec<f64>, usize)> {
    let (maxima, minima) = find_extrema(x)?;
    if maxima.len() < 2 || minima.len() < 2 {
        return Err(Error::DegenerateEnvelope {
            knots: maxima.len().min(minima.len()),
        });
    }
    let mut detail = x.to_vec();
    let mut iters = 0;
    let (mut maxima, mut minima) = (maxima, minima);
    while iters < max_sift_iters.max(1) {
        let upper = envelope(&detail, &maxima)?;
        let lower = envelope(&detail, &minima)?;
        let next: Vec<f64> = detail
            .iter()
            .zip(upper.iter().zip(&lower))
            .map(|(d, (u, l))| d - 0.5 * (u + l))
            .collect();
        iters += 1;

        let peak = detail.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let eps = 1e-12 * (peak * peak).max(1.0);
        let sd: f64 = detail
            .iter()
            .zip(&next)
            .map(|(p, q)| (p - q) * (p - q) / (p * p + eps))
            .sum();
        detail = next;
        if sd < sd_threshold {
            break;
        }
        (maxima, minima) = find_extrema(&detail)?;
        if maxima.len() < 2 || minima.len() < 2 {
            break;
        }
    }
    Ok((detail, iters))
}

/// Decompose a signal into at most `params.max_imfs` IMFs.
///
/// Extraction stops early once the running residual has fewer than two
/// maxima or two minima.
pub fn decompose(x: &[f64], params: &EmdParams) -> Result<ImfSet> {
    if x.len() < MIN_SIGNAL_LEN {
        return Err(Error::TooShort {
            needed: MIN_SIGNAL_LEN,
            got: x.len(),
        });
    }
    let mut residual = x.to_vec();
    let mut imfs = Vec::new();
    let mut sift_counts = Vec::new();
    while imfs.len() < params.max_imfs {
        let (maxima, minima) = find_extrema(&residual)?;
        if maxima.len() < 2 || minima.len() < 2 {
            break;
        }
        let (imf, iters) = match sift(&residual, params.sd_threshold, params.max_sift_iters) {
            Ok(r) => r,
            Err(Error::DegenerateEnvelope { .. }) => break,
            Err(e) => return Err(e),
        };
        for (r, v) in residual.iter_mut().zip(&imf) {
            *r -= v;
        }
        imfs.push(imf);
        sift_counts.push(iters);
    }
    Ok(ImfSet {
        imfs,
        residual,
        sift_counts,
    })
}

/// `|#extrema - #zero crossings|` for a candidate IMF.
pub fn imf_condition_gap(imf: &[f64]) -> Result<usize> {
    let (maxima, minima) = find_extrema(imf)?;
    let crossings = imf
        .windows(2)
        .filter(|w| (w[0] < 0.0 && w[1] >= 0.0) || (w[0] >= 0.0 && w[1] < 0.0))
        .count();
    Ok((maxima.len() + minima.len()).abs_diff(crossings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};
    use std::f64::consts::PI;

    fn tone(freq: f64, n: usize, fs: f64) -> Vec<f64> {
        (0..n).map(|i| (2.0 * PI * freq * i as f64 / fs).sin()).collect()
    }

    fn pearson(a: &[f64], b: &[f64]) -> f64 {
        let ma = a.iter().sum::<f64>() / a.len() as f64;
        let mb = b.iter().sum::<f64>() / b.len() as f64;
        let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
        for (x, y) in a.iter().zip(b) {
            sab += (x - ma) * (y - mb);
            saa += (x - ma) * (x - ma);
            sbb += (y - mb) * (y - mb);
        }
        sab / (saa * sbb).sqrt()
    }

    /// Brute-force triplet scan, valid for signals without flat runs.
    fn triplet_extrema(x: &[f64]) -> (Vec<usize>, Vec<usize>) {
        let mut maxima = Vec::new();
        let mut minima = Vec::new();
        for i in 1..x.len() - 1 {
            if x[i - 1] < x[i] && x[i] > x[i + 1] {
                maxima.push(i);
            }
            if x[i - 1] > x[i] && x[i] < x[i + 1] {
                minima.push(i);
            }
        }
        (maxima, minima)
    }

    #[test]
    fn extrema_examples() {
        assert_eq!(find_extrema(&[0.0, 1.0, 0.0]).unwrap(), (vec![1], vec![]));
        assert_eq!(
            find_extrema(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap(),
            (vec![], vec![])
        );
        assert!(matches!(find_extrema(&[1.0, 2.0]), Err(Error::TooShort { .. })));
    }

    #[test]
    fn extrema_of_one_sine_period() {
        let x = tone(1.0, 64, 64.0);
        let found = find_extrema(&x).unwrap();
        assert_eq!(found, triplet_extrema(&x));
        assert_eq!(found, (vec![16], vec![48]));
    }

    #[test]
    fn plateau_extrema_use_first_index() {
        let x = [0.0, 2.0, 2.0, 2.0, 1.0, -1.0, -1.0, 0.0, 0.0, 3.0, 3.0];
        assert_eq!(find_extrema(&x).unwrap(), (vec![1], vec![5]));
        // a shelf on the way up is not an extremum
        assert_eq!(
            find_extrema(&[0.0, 1.0, 1.0, 2.0, 0.0]).unwrap(),
            (vec![3], vec![])
        );
    }

    #[test]
    fn constant_envelope() {
        let mut x = vec![0.0; 40];
        for &i in &[5, 15, 25, 35] {
            x[i] = 3.0;
        }
        let env = envelope(&x, &[5, 15, 25, 35]).unwrap();
        assert!(env.iter().all(|v| (v - 3.0).abs() < 1e-12));
        assert!(matches!(
            envelope(&x, &[]),
            Err(Error::DegenerateEnvelope { knots: 0 })
        ));
    }

    #[test]
    fn envelope_passes_through_extrema() {
        let x: Vec<f64> = (0..200)
            .map(|i| (i as f64 * 0.3).sin() * (1.0 + i as f64 / 50.0))
            .collect();
        let (maxima, _) = find_extrema(&x).unwrap();
        let env = envelope(&x, &maxima).unwrap();
        for &i in &maxima {
            assert!((env[i] - x[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn sine_is_its_own_imf() {
        let x = tone(8.0, 512, 256.0);
        let (imf, iters) = sift(&x, 0.3, 10).unwrap();
        assert!(pearson(&imf, &x) >= 0.99);
        assert!(iters <= 2, "took {iters} iterations");
    }

    #[test]
    fn sift_rejects_trend() {
        let x: Vec<f64> = (0..100).map(|i| 5.0 + 0.1 * i as f64).collect();
        assert!(matches!(
            sift(&x, 0.3, 10),
            Err(Error::DegenerateEnvelope { .. })
        ));
    }

    #[test]
    fn ramp_has_no_imfs() {
        let x: Vec<f64> = (0..256).map(|i| i as f64 * 0.5 - 3.0).collect();
        let set = decompose(&x, &EmdParams::default()).unwrap();
        assert!(set.is_empty());
        assert_eq!(set.residual, x);
    }

    #[test]
    fn too_short_signal() {
        assert!(matches!(
            decompose(&[1.0; 15], &EmdParams::default()),
            Err(Error::TooShort { needed: 16, got: 15 })
        ));
    }

    #[test]
    fn white_noise_imf_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let x: Vec<f64> = (0..1024).map(|_| StandardNormal.sample(&mut rng)).collect();
            let set = decompose(&x, &EmdParams::default()).unwrap();
            assert!((5..=11).contains(&set.len()), "{} IMFs", set.len());
            for imf in &set.imfs {
                // the local-mean condition says little about modes with only
                // a handful of cycles in the record
                let (maxima, minima) = find_extrema(imf).unwrap();
                if maxima.len() + minima.len() < 150 {
                    continue;
                }
                let m = imf.iter().sum::<f64>() / imf.len() as f64;
                let sd = (imf.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / imf.len() as f64)
                    .sqrt();
                assert!(m.abs() < 0.05 * sd, "imf mean {m} vs std {sd}");
            }
            // the sift cap can stop a few extrema short of a strict IMF
            for imf in &set.imfs {
                let (maxima, minima) = find_extrema(imf).unwrap();
                let allowed = 1 + (maxima.len() + minima.len()) / 20;
                assert!(imf_condition_gap(imf).unwrap() <= allowed);
            }
        }
    }

    #[test]
    fn reconstruct_selection_rules() {
        let set = ImfSet {
            imfs: (1..=5).map(|k| vec![k as f64; 4]).collect(),
            residual: vec![100.0; 4],
            sift_counts: vec![1; 5],
        };
        assert_eq!(set.reconstruct(2..=9).unwrap(), vec![14.0; 4]);
        assert_eq!(set.reconstruct(1..=5).unwrap(), vec![15.0; 4]);
        let three = ImfSet {
            imfs: set.imfs[..3].to_vec(),
            residual: vec![0.0; 4],
            sift_counts: vec![1; 3],
        };
        #[allow(clippy::reversed_empty_ranges)]
        let empty = 1..=0;
        assert!(matches!(three.reconstruct(empty), Err(Error::EmptySelection)));
        assert!(matches!(three.reconstruct(4..=9), Err(Error::EmptySelection)));
    }

    #[test]
    fn all_imfs_plus_residual_is_complete() {
        let x: Vec<f64> = (0..1024)
            .map(|i| {
                let t = i as f64 / 256.0;
                (2.0 * PI * 4.0 * t).sin() + (2.0 * PI * 32.0 * t).sin() + 0.3 * t
            })
            .collect();
        let set = decompose(&x, &EmdParams::default()).unwrap();
        let mut sum = set.reconstruct(1..=set.len()).unwrap();
        for (s, r) in sum.iter_mut().zip(&set.residual) {
            *s += r;
        }
        let err: f64 = sum.iter().zip(&x).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let norm: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(err / norm < 1e-8);
    }

    #[test]
    fn decompose_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x: Vec<f64> = (0..512).map(|_| StandardNormal.sample(&mut rng)).collect();
        let a = decompose(&x, &EmdParams::default()).unwrap();
        let b = decompose(&x, &EmdParams::default()).unwrap();
        assert_eq!(a, b);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn amplitude_equivariance(seed in 0u64..1000, scale in 0.1f64..50.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x: Vec<f64> = (0..256)
                .map(|_| 10.0 * Distribution::<f64>::sample(&StandardNormal, &mut rng))
                .collect();
            let scaled: Vec<f64> = x.iter().map(|v| v * scale).collect();
            let a = decompose(&x, &EmdParams::default()).unwrap();
            let b = decompose(&scaled, &EmdParams::default()).unwrap();
            prop_assert_eq!(a.len(), b.len());
            for (ia, ib) in a.imfs.iter().zip(&b.imfs) {
                let norm: f64 = ia.iter().map(|v| (v * scale).powi(2)).sum::<f64>().sqrt();
                let err: f64 = ia
                    .iter()
                    .zip(ib)
                    .map(|(p, q)| (p * scale - q).powi(2))
                    .sum::<f64>()
                    .sqrt();
                prop_assert!(err <= 1e-6 * norm, "relative error {}", err / norm);
            }
        }
    }
}
