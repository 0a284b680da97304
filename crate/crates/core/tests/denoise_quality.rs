use eog_denoise::pipeline::{window_centred, Denoiser, Method, MethodParams};
use eog_denoise::snr::snr_db;
use eog_denoise::swt::{self, SwtConfig};
use eog_denoise::synth::{add_white_noise, gen_clean_eog, sigma_for_snr, EogSceneConfig};
use eog_denoise::{SampledSignal, WindowPlan};

fn residual(clean: &[f64], estimate: &[f64]) -> Vec<f64> {
    clean.iter().zip(estimate).map(|(c, e)| c - e).collect()
}

// The input SNR here is the injected sample-power ratio (5 dB); the output is
// scored with the eigenvalue estimator against the clean sine.
#[test]
fn swt_improves_noisy_sine() {
    let fs = 256.0;
    let clean: Vec<f64> = (0..1024)
        .map(|i| 50.0 * (std::f64::consts::TAU * 4.0 * i as f64 / fs).sin())
        .collect();
    let clean = SampledSignal::new(clean, fs).unwrap();
    let input = 5.0;
    let sigma = sigma_for_snr(clean.samples(), input);
    for seed in 0..5 {
        let noisy = add_white_noise(&clean, sigma, seed).unwrap();
        let out = swt::denoise(noisy.samples(), &SwtConfig::default()).unwrap();
        let output = snr_db(clean.samples(), &residual(clean.samples(), &out), 32).unwrap();
        assert!(output > input, "seed {seed}: {output} <= {input}");
    }
}

#[test]
fn fmh_beats_unfiltered_on_synthetic_eog() {
    let scene = EogSceneConfig { seed: 11, ..Default::default() };
    let clean = gen_clean_eog(&scene).unwrap();
    let noisy = add_white_noise(&clean, sigma_for_snr(clean.samples(), 10.0), 12).unwrap();
    let plan = WindowPlan::default();
    let reference = window_centred(&clean, &noisy, &plan).unwrap();
    let baseline = window_centred(&noisy, &noisy, &plan).unwrap();
    let d = Denoiser::new(Method::Fmh, &MethodParams::default()).unwrap();
    let out = d.denoise(&noisy, &plan).unwrap();
    assert_eq!(out.window_failures, 0);
    let before = snr_db(reference.samples(), &residual(reference.samples(), baseline.samples()), 32).unwrap();
    let after = snr_db(reference.samples(), &residual(reference.samples(), out.signal.samples()), 32).unwrap();
    assert!(after > before, "{after} <= {before}");
}

#[test]
fn every_method_keeps_length_and_rate() {
    let scene = EogSceneConfig { duration_s: 3.3, seed: 2, ..Default::default() };
    let clean = gen_clean_eog(&scene).unwrap();
    let noisy = add_white_noise(&clean, 10.0, 3).unwrap();
    for m in Method::ALL {
        let d = Denoiser::new(m, &MethodParams::default()).unwrap();
        let out = d.denoise(&noisy, &WindowPlan::default()).unwrap();
        assert_eq!(out.signal.len(), noisy.len(), "{m}");
        assert_eq!(out.signal.sample_rate(), noisy.sample_rate());
        assert_eq!(out.window_failures, 0, "{m}");
        assert!(out.signal.samples().iter().all(|v| v.is_finite()));
    }
}
