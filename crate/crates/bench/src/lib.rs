//! Fixtures shared by the kernel benchmarks.

use eog_denoise::signal::remove_mean;
use eog_denoise::synth::{gen_corpus, EogSceneConfig, NoiseLevel};
use eog_denoise::{Result, SampledSignal};

pub const WINDOW: usize = 256;

/// One 10 s noisy synthetic recording at 10 dB input SNR.
pub fn noisy_recording(seed: u64) -> Result<(SampledSignal, SampledSignal)> {
    let scene = EogSceneConfig {
        noise: NoiseLevel::SnrDb(10.0),
        ..EogSceneConfig::default()
    };
    let pair = gen_corpus(1, &scene, seed)?.remove(0);
    Ok((pair.clean, pair.noisy))
}

/// A mean-removed window of `WINDOW` samples cut from the middle of a recording.
pub fn noisy_window(seed: u64) -> Result<Vec<f64>> {
    let (_, noisy) = noisy_recording(seed)?;
    let start = noisy.len() / 2;
    remove_mean(&noisy.samples()[start..start + WINDOW])
}
