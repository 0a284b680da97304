//! Synthetic EOG: saccade steps, blink bumps and slow drift, plus seeded
//! white Gaussian noise.
//!
//! Randomness comes from ChaCha8 seeded via `seed_from_u64`, so a corpus is
//! reproducible from its seed alone.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{mean, SampledSignal, DEFAULT_SAMPLE_RATE};

/// Clean amplitudes are kept inside this range (µV).
pub const AMPLITUDE_LIMIT_UV: f64 = 3500.0;

/// Saccade transition duration range (s).
pub const SACCADE_DURATION_S: (f64, f64) = (0.020, 0.060);
/// Blink duration range (s).
pub const BLINK_DURATION_S: (f64, f64) = (0.200, 0.400);
/// Drift frequency range (Hz).
pub const DRIFT_FREQ_HZ: (f64, f64) = (0.05, 0.45);

// Offset mixed into a signal seed to obtain its noise seed.
const NOISE_SEED_OFFSET: u64 = 0x6e6f_6973_6500_0001;

/// Injected noise level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseLevel {
    SigmaUv(f64),
    /// Target sample-power SNR in dB, relative to the clean signal variance.
    SnrDb(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EogSceneConfig {
    pub duration_s: f64,
    pub sample_rate: f64,
    /// Saccades per second.
    pub saccade_rate: f64,
    pub saccade_amplitude_uv: (f64, f64),
    /// Blinks per minute.
    pub blink_rate: f64,
    pub blink_amplitude_uv: (f64, f64),
    pub drift_amplitude_uv: f64,
    pub noise: NoiseLevel,
    pub seed: u64,
}

impl Default for EogSceneConfig {
    fn default() -> Self {
        Self {
            duration_s: 10.0,
            sample_rate: DEFAULT_SAMPLE_RATE,
            saccade_rate: 2.0,
            saccade_amplitude_uv: (100.0, 400.0),
            blink_rate: 12.0,
            blink_amplitude_uv: (150.0, 350.0),
            drift_amplitude_uv: 20.0,
            noise: NoiseLevel::SnrDb(10.0),
            seed: 0,
        }
    }
}

impl EogSceneConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Parameter(format!("scene {what}")));
        if !(self.duration_s.is_finite() && self.duration_s > 0.0) {
            return bad("duration must be positive");
        }
        if !(self.sample_rate.is_finite() && self.sample_rate > 0.0) {
            return bad("sample rate must be positive");
        }
        for (name, v) in [
            ("saccade rate", self.saccade_rate),
            ("blink rate", self.blink_rate),
            ("drift amplitude", self.drift_amplitude_uv),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return bad(&format!("{name} must be >= 0"));
            }
        }
        for (name, (lo, hi)) in [
            ("saccade amplitude", self.saccade_amplitude_uv),
            ("blink amplitude", self.blink_amplitude_uv),
        ] {
            if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi) {
                return bad(&format!("{name} range must satisfy 0 <= low <= high"));
            }
            if hi > AMPLITUDE_LIMIT_UV {
                return bad(&format!("{name} above {AMPLITUDE_LIMIT_UV} uV"));
            }
        }
        match self.noise {
            NoiseLevel::SigmaUv(s) if !(s.is_finite() && s >= 0.0) => bad("noise sigma must be >= 0"),
            NoiseLevel::SnrDb(s) if !s.is_finite() => bad("target SNR must be finite"),
            _ => Ok(()),
        }
    }

    pub fn n_samples(&self) -> usize {
        (self.duration_s * self.sample_rate).round() as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Saccade,
    Blink,
}

/// One generated event. For saccades `amplitude_uv` is the signed step size
/// and `onset_s` the transition midpoint; for blinks it is the bump height
/// and the bump start.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EogEvent {
    pub kind: EventKind,
    pub onset_s: f64,
    pub duration_s: f64,
    pub amplitude_uv: f64,
}

/// Clean synthetic EOG.
pub fn gen_clean_eog(cfg: &EogSceneConfig) -> Result<SampledSignal> {
    gen_clean_eog_with_events(cfg).map(|(s, _)| s)
}

/// Clean synthetic EOG and the events that built it.
pub fn gen_clean_eog_with_events(cfg: &EogSceneConfig) -> Result<(SampledSignal, Vec<EogEvent>)> {
    cfg.validate()?;
    let n = cfg.n_samples();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let fs = cfg.sample_rate;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut events = Vec::new();
    let mut y = vec![0.0; n];

    // saccades: Poisson arrivals, each a logistic step
    if cfg.saccade_rate > 0.0 {
        let gaps = Exp::new(cfg.saccade_rate).map_err(|e| Error::Parameter(e.to_string()))?;
        let (amp_lo, amp_hi) = cfg.saccade_amplitude_uv;
        let gaze_limit = 2.0 * amp_hi;
        let mut level = 0.0;
        let mut step = vec![0.0; n + 1];
        let mut t = gaps.sample(&mut rng);
        while t < cfg.duration_s {
            let dur = rng.random_range(SACCADE_DURATION_S.0..=SACCADE_DURATION_S.1);
            let mag = rng.random_range(amp_lo..=amp_hi);
            let mut amp = if rng.random_bool(0.5) { mag } else { -mag };
            if (level + amp).abs() > gaze_limit {
                amp = -amp;
            }
            level += amp;
            add_logistic_step(&mut y, &mut step, fs, t, dur, amp);
            events.push(EogEvent {
                kind: EventKind::Saccade,
                onset_s: t,
                duration_s: dur,
                amplitude_uv: amp,
            });
            t += gaps.sample(&mut rng);
        }
        let mut acc = 0.0;
        for (v, s) in y.iter_mut().zip(&step) {
            acc += s;
            *v += acc;
        }
    }

    if cfg.blink_rate > 0.0 {
        let gaps = Exp::new(cfg.blink_rate / 60.0).map_err(|e| Error::Parameter(e.to_string()))?;
        let (amp_lo, amp_hi) = cfg.blink_amplitude_uv;
        let mut t = gaps.sample(&mut rng);
        while t < cfg.duration_s {
            let dur = rng.random_range(BLINK_DURATION_S.0..=BLINK_DURATION_S.1);
            let amp = rng.random_range(amp_lo..=amp_hi);
            add_blink(&mut y, fs, t, dur, amp);
            events.push(EogEvent {
                kind: EventKind::Blink,
                onset_s: t,
                duration_s: dur,
                amplitude_uv: amp,
            });
            t += gaps.sample(&mut rng);
        }
    }

    if cfg.drift_amplitude_uv > 0.0 {
        let f = rng.random_range(DRIFT_FREQ_HZ.0..=DRIFT_FREQ_HZ.1);
        let phase = rng.random_range(0.0..std::f64::consts::TAU);
        for (i, v) in y.iter_mut().enumerate() {
            *v += cfg.drift_amplitude_uv * (std::f64::consts::TAU * f * i as f64 / fs + phase).sin();
        }
    }

    for v in &mut y {
        *v = v.clamp(-AMPLITUDE_LIMIT_UV, AMPLITUDE_LIMIT_UV);
    }
    Ok((SampledSignal::new(y, fs)?, events))
}

// The logistic is evaluated exactly within +-LOGISTIC_SPAN time constants of
// the midpoint; past that the step is added as a constant through `step`
// (a difference array).
const LOGISTIC_SPAN: f64 = 36.0;

fn add_logistic_step(y: &mut [f64], step: &mut [f64], fs: f64, mid: f64, dur: f64, amp: f64) {
    // the transition from 1% to 99% of the step takes `dur`
    let tau = dur / (2.0 * 99f64.ln());
    let n = y.len();
    let lo = ((mid - LOGISTIC_SPAN * tau) * fs).ceil().max(0.0) as usize;
    let hi = (((mid + LOGISTIC_SPAN * tau) * fs).floor().max(-1.0) + 1.0) as usize;
    let hi = hi.min(n);
    for (i, v) in y.iter_mut().enumerate().take(hi).skip(lo) {
        let t = i as f64 / fs;
        *v += amp / (1.0 + (-(t - mid) / tau).exp());
    }
    step[hi] += amp;
}

fn add_blink(y: &mut [f64], fs: f64, onset: f64, dur: f64, amp: f64) {
    let lo = (onset * fs).ceil() as usize;
    let hi = (((onset + dur) * fs).ceil() as usize).min(y.len());
    for (i, v) in y.iter_mut().enumerate().take(hi).skip(lo) {
        let phase = (i as f64 / fs - onset) / dur;
        *v += amp * 0.5 * (1.0 - (std::f64::consts::TAU * phase).cos());
    }
}

/// `clean` plus i.i.d. N(0, sigma^2) draws.
pub fn add_white_noise(clean: &SampledSignal, sigma: f64, seed: u64) -> Result<SampledSignal> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::Parameter(format!("noise sigma {sigma}")));
    }
    if sigma == 0.0 {
        return Ok(clean.clone());
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::Parameter(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noisy = clean
        .samples()
        .iter()
        .map(|c| c + normal.sample(&mut rng))
        .collect();
    clean.with_samples(noisy)
}

/// Noise standard deviation giving `snr_db` against the variance of `clean`.
pub fn sigma_for_snr(clean: &[f64], snr_db: f64) -> f64 {
    if clean.is_empty() {
        return 0.0;
    }
    let mu = mean(clean);
    let var = clean.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / clean.len() as f64;
    (var / 10f64.powf(snr_db / 10.0)).sqrt()
}

/// `10 log10(var(clean) / mean((noisy - clean)^2))`.
pub fn sample_power_snr_db(clean: &[f64], noisy: &[f64]) -> Result<f64> {
    if clean.len() != noisy.len() {
        return Err(Error::Shape(format!(
            "{} clean vs {} noisy samples",
            clean.len(),
            noisy.len()
        )));
    }
    if clean.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = clean.len() as f64;
    let mu = mean(clean);
    let var = clean.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / n;
    let noise = clean
        .iter()
        .zip(noisy)
        .map(|(c, y)| (y - c) * (y - c))
        .sum::<f64>()
        / n;
    Ok(10.0 * (var / noise).log10())
}

pub fn noise_seed(signal_seed: u64) -> u64 {
    signal_seed ^ NOISE_SEED_OFFSET
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusPair {
    pub seed: u64,
    pub clean: SampledSignal,
    pub noisy: SampledSignal,
    pub sigma: f64,
}

/// `n_signals` pairs; pair `i` uses scene seed `base_seed + i` (the
/// template's own seed is ignored) and noise seed `noise_seed` of that.
pub fn gen_corpus(n_signals: usize, template: &EogSceneConfig, base_seed: u64) -> Result<Vec<CorpusPair>> {
    if n_signals == 0 {
        return Err(Error::Parameter("corpus needs at least one signal".into()));
    }
    (0..n_signals as u64)
        .map(|i| {
            let seed = base_seed.wrapping_add(i);
            let cfg = EogSceneConfig {
                seed,
                ..template.clone()
            };
            let clean = gen_clean_eog(&cfg)?;
            let sigma = match cfg.noise {
                NoiseLevel::SigmaUv(s) => s,
                NoiseLevel::SnrDb(db) => sigma_for_snr(clean.samples(), db),
            };
            let noisy = add_white_noise(&clean, sigma, noise_seed(seed))?;
            Ok(CorpusPair {
                seed,
                clean,
                noisy,
                sigma,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rustfft::{num_complex::Complex, FftPlanner};

    fn quiet() -> EogSceneConfig {
        EogSceneConfig {
            saccade_rate: 0.0,
            blink_rate: 0.0,
            drift_amplitude_uv: 0.0,
            ..Default::default()
        }
    }

    #[test]
    fn no_events_gives_zero() {
        let s = gen_clean_eog(&quiet()).unwrap();
        assert_eq!(s.len(), 2560);
        assert!(s.samples().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let cfg = EogSceneConfig {
            seed: 77,
            ..Default::default()
        };
        assert_eq!(gen_clean_eog(&cfg).unwrap(), gen_clean_eog(&cfg).unwrap());
        let other = EogSceneConfig { seed: 78, ..cfg.clone() };
        assert_ne!(gen_clean_eog(&cfg).unwrap(), gen_clean_eog(&other).unwrap());
    }

    #[test]
    fn saccade_count_near_rate() {
        let counts: Vec<usize> = (0..20)
            .map(|seed| {
                let cfg = EogSceneConfig {
                    seed,
                    ..Default::default()
                };
                let (_, ev) = gen_clean_eog_with_events(&cfg).unwrap();
                ev.iter().filter(|e| e.kind == EventKind::Saccade).count()
            })
            .collect();
        let mean = counts.iter().sum::<usize>() as f64 / counts.len() as f64;
        assert!((15.0..=25.0).contains(&mean), "{mean}");
    }

    #[test]
    fn saccade_steps_visible_in_signal() {
        // an isolated saccade moves the level by its amplitude
        let cfg = EogSceneConfig {
            blink_rate: 0.0,
            drift_amplitude_uv: 0.0,
            saccade_rate: 0.3,
            seed: 4,
            ..Default::default()
        };
        let (s, ev) = gen_clean_eog_with_events(&cfg).unwrap();
        let x = s.samples();
        let fs = s.sample_rate();
        for w in ev.windows(3) {
            let (prev, cur, next) = (w[0], w[1], w[2]);
            if cur.onset_s - prev.onset_s > 0.5 && next.onset_s - cur.onset_s > 0.5 {
                let before = x[((cur.onset_s - 0.2) * fs) as usize];
                let after = x[((cur.onset_s + 0.2) * fs) as usize];
                assert!((after - before - cur.amplitude_uv).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn events_within_configured_ranges() {
        for seed in 0..10 {
            let cfg = EogSceneConfig {
                seed,
                ..Default::default()
            };
            let (s, ev) = gen_clean_eog_with_events(&cfg).unwrap();
            for e in &ev {
                match e.kind {
                    EventKind::Saccade => {
                        assert!((0.02..=0.06).contains(&e.duration_s));
                        assert!((100.0..=400.0).contains(&e.amplitude_uv.abs()));
                    }
                    EventKind::Blink => {
                        assert!((0.2..=0.4).contains(&e.duration_s));
                        assert!(e.amplitude_uv > 0.0);
                    }
                }
            }
            assert!(s.samples().iter().all(|v| v.abs() <= AMPLITUDE_LIMIT_UV));
        }
    }

    #[test]
    fn spectral_energy_below_100_hz() {
        for seed in 0..5 {
            let cfg = EogSceneConfig {
                seed,
                ..Default::default()
            };
            let s = gen_clean_eog(&cfg).unwrap();
            let mu = mean(s.samples());
            let mut buf: Vec<Complex<f64>> =
                s.samples().iter().map(|v| Complex::new(v - mu, 0.0)).collect();
            let n = buf.len();
            FftPlanner::new().plan_fft_forward(n).process(&mut buf);
            let cutoff = (100.0 * n as f64 / s.sample_rate()) as usize;
            let power: Vec<f64> = buf[..=n / 2].iter().map(|c| c.norm_sqr()).collect();
            let total: f64 = power.iter().sum();
            let low: f64 = power[..=cutoff].iter().sum();
            assert!(low / total >= 0.99, "seed {seed}: {}", low / total);
        }
    }

    #[test]
    fn invalid_configs_rejected() {
        let base = EogSceneConfig::default();
        for cfg in [
            EogSceneConfig { duration_s: 0.0, ..base.clone() },
            EogSceneConfig { saccade_rate: -1.0, ..base.clone() },
            EogSceneConfig { saccade_amplitude_uv: (300.0, 100.0), ..base.clone() },
            EogSceneConfig { blink_amplitude_uv: (0.0, 5000.0), ..base.clone() },
            EogSceneConfig { noise: NoiseLevel::SigmaUv(-2.0), ..base.clone() },
        ] {
            assert!(gen_clean_eog(&cfg).is_err(), "{cfg:?}");
        }
    }

    #[test]
    fn zero_sigma_is_identity() {
        let clean = gen_clean_eog(&EogSceneConfig::default()).unwrap();
        assert_eq!(add_white_noise(&clean, 0.0, 1).unwrap(), clean);
        assert!(add_white_noise(&clean, -1.0, 1).is_err());
    }

    #[test]
    fn noise_statistics() {
        let n = 100_000;
        let clean = SampledSignal::new(vec![0.0; n], 256.0).unwrap();
        let sigma = 3.0;
        let noisy = add_white_noise(&clean, sigma, 123).unwrap();
        let e = noisy.samples();
        let mu = mean(e);
        let sd = (e.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / n as f64).sqrt();
        assert!((sd / sigma - 1.0).abs() < 0.02);
        assert!(mu.abs() < 3.0 * sigma / (n as f64).sqrt());
        let var = sd * sd;
        for lag in 1..=10 {
            let r = (0..n - lag).map(|i| (e[i] - mu) * (e[i + lag] - mu)).sum::<f64>()
                / (n as f64 * var);
            assert!(r.abs() < 0.02, "lag {lag}: {r}");
        }
    }

    #[test]
    fn corpus_single_pair_composes() {
        let tpl = EogSceneConfig::default();
        let c = gen_corpus(1, &tpl, 40).unwrap();
        let clean = gen_clean_eog(&EogSceneConfig { seed: 40, ..tpl }).unwrap();
        let sigma = sigma_for_snr(clean.samples(), 10.0);
        assert_eq!(c[0].clean, clean);
        assert_eq!(c[0].noisy, add_white_noise(&clean, sigma, noise_seed(40)).unwrap());
        assert!(gen_corpus(0, &EogSceneConfig::default(), 0).is_err());
    }

    #[test]
    fn corpus_distinct_and_on_target() {
        let c = gen_corpus(20, &EogSceneConfig::default(), 1000).unwrap();
        assert_eq!(c.len(), 20);
        for i in 0..c.len() {
            for j in i + 1..c.len() {
                assert_ne!(c[i].clean, c[j].clean);
            }
            let snr = sample_power_snr_db(c[i].clean.samples(), c[i].noisy.samples()).unwrap();
            assert!((snr - 10.0).abs() <= 1.0, "pair {i}: {snr}");
            let n = c[i].clean.len() as f64;
            let resid: Vec<f64> = c[i]
                .noisy
                .samples()
                .iter()
                .zip(c[i].clean.samples())
                .map(|(y, x)| y - x)
                .collect();
            assert!(mean(&resid).abs() <= 3.0 * c[i].sigma / n.sqrt());
        }
        assert_eq!(c, gen_corpus(20, &EogSceneConfig::default(), 1000).unwrap());
    }
}
