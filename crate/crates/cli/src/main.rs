mod settings;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use eog_denoise::emd;
use eog_denoise::io::{read_signal_csv, write_columns_csv, write_signal_csv};
use eog_denoise::pipeline::{
    run_pipeline, window_centred, CorpusSpec, Denoiser, Method, MethodParams, RunConfig,
    DEFAULT_CORPUS_SIZE, DEFAULT_SEED,
};
use eog_denoise::report::ReportFormat;
use eog_denoise::synth::{gen_corpus, EogSceneConfig, NoiseLevel};
use eog_denoise::{FmhConfig, SampledSignal, SnrMode, ThresholdMode, Wavelet, WindowPlan};

use settings::{parse_band, parse_keep, ConfigFile};

#[derive(Parser, Debug)]
#[command(name = "eog-denoise", version, about = "Denoise EOG signals and benchmark the denoisers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a synthetic corpus of clean/noisy CSV pairs.
    Synth(SynthArgs),
    /// Denoise one CSV signal with one method.
    Denoise(DenoiseArgs),
    /// Score methods over a corpus and write a benchmark report.
    Bench(BenchArgs),
    /// Write raw, denoised and IMF columns for external plotting.
    PlotData(PlotArgs),
}

/// Options shared by every subcommand.
#[derive(Args, Debug, Default)]
struct Common {
    /// Flat `key = value` file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed (falls back to the config file, then EOG_DENOISE_SEED).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Sample rate for single-column input files (Hz).
    #[arg(long, global = true)]
    fs: Option<f64>,
    /// Window length in samples.
    #[arg(long, global = true)]
    window: Option<usize>,
    /// Window overlap fraction in [0, 1).
    #[arg(long, global = true)]
    overlap: Option<f64>,
    /// One-based IMF range kept by EMD, e.g. 2-9.
    #[arg(long = "emd-keep", global = true)]
    emd_keep: Option<String>,
    /// haar, db2, db4, db8 or sym4.
    #[arg(long = "swt-wavelet", global = true)]
    swt_wavelet: Option<Wavelet>,
    /// soft or hard.
    #[arg(long = "swt-mode", global = true)]
    swt_mode: Option<ThresholdMode>,
    /// FMH half length L.
    #[arg(long = "fmh-L", global = true)]
    fmh_l: Option<usize>,
    /// FIR band edges as fractions of Nyquist, e.g. 0.02,0.5.
    #[arg(long = "fir-band", global = true)]
    fir_band: Option<String>,
}

#[derive(Args, Debug)]
struct SceneArgs {
    /// Number of synthetic signals.
    #[arg(long = "n-signals")]
    n_signals: Option<usize>,
    /// Target input SNR in dB (sample-power).
    #[arg(long = "input-snr", conflicts_with = "sigma")]
    input_snr: Option<f64>,
    /// Noise standard deviation in µV instead of a target SNR.
    #[arg(long)]
    sigma: Option<f64>,
    /// Signal duration in seconds.
    #[arg(long)]
    duration: Option<f64>,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    scene: SceneArgs,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DenoiseArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    input: Option<PathBuf>,
    /// fir, emd, swt or fmh.
    #[arg(long)]
    method: Option<String>,
    /// Output CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    scene: SceneArgs,
    /// Input CSV files; without them a synthetic corpus is generated.
    #[arg(long, num_args = 1..)]
    input: Vec<PathBuf>,
    /// Clean reference CSVs matching --input, for true-noise scoring.
    #[arg(long, num_args = 1..)]
    reference: Vec<PathBuf>,
    /// fir, emd, swt, fmh, a comma list, or all.
    #[arg(long)]
    method: Option<String>,
    /// true (clean reference known) or proxy.
    #[arg(long = "snr-mode")]
    snr_mode: Option<SnrMode>,
    /// Embedding dimension of the SNR covariance.
    #[arg(long = "embed-m")]
    embed_m: Option<usize>,
    /// Report path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// text, csv or jsonl.
    #[arg(long)]
    format: Option<ReportFormat>,
    /// Worker threads (default: all CPUs).
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args, Debug)]
struct PlotArgs {
    #[command(flatten)]
    common: Common,
    /// Input CSV; without it one synthetic signal is generated.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long = "input-snr")]
    input_snr: Option<f64>,
    /// Output CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load_config(common: &Common) -> Result<ConfigFile> {
    match &common.config {
        Some(p) => ConfigFile::load(p),
        None => Ok(ConfigFile::default()),
    }
}

fn window_plan(common: &Common, cfg: &ConfigFile) -> Result<WindowPlan> {
    let default = WindowPlan::default();
    let len = cfg.pick(common.window, "window")?.unwrap_or(default.window_len());
    let overlap = cfg
        .pick(common.overlap, "overlap")?
        .unwrap_or(default.overlap_fraction());
    Ok(WindowPlan::new(len, overlap)?)
}

fn method_params(common: &Common, cfg: &ConfigFile) -> Result<MethodParams> {
    let mut p = MethodParams::default();
    if let Some(k) = cfg.pick(common.emd_keep.clone(), "emd-keep")? {
        p.emd_keep = parse_keep(&k)?;
    }
    if let Some(w) = cfg.pick(common.swt_wavelet, "swt-wavelet")? {
        p.swt.wavelet = w;
    }
    if let Some(m) = cfg.pick(common.swt_mode, "swt-mode")? {
        p.swt.mode = m;
    }
    if let Some(l) = cfg.pick(common.fmh_l, "fmh-L")? {
        p.fmh = FmhConfig::uniform(l)?;
    }
    if let Some(b) = cfg.pick(common.fir_band.clone(), "fir-band")? {
        p.fir_band = parse_band(&b)?;
    }
    Ok(p)
}

fn scene(args: &SceneArgs, cfg: &ConfigFile) -> Result<(usize, EogSceneConfig)> {
    let n = cfg
        .pick(args.n_signals, "n-signals")?
        .unwrap_or(DEFAULT_CORPUS_SIZE);
    let mut scene = EogSceneConfig::default();
    if let Some(d) = cfg.pick(args.duration, "duration")? {
        scene.duration_s = d;
    }
    let sigma = cfg.pick(args.sigma, "sigma")?;
    let snr = cfg.pick(args.input_snr, "input-snr")?;
    scene.noise = match (args.input_snr, args.sigma, snr, sigma) {
        // a flag beats either config key
        (Some(db), _, _, _) => NoiseLevel::SnrDb(db),
        (_, Some(s), _, _) => NoiseLevel::SigmaUv(s),
        (_, _, Some(_), Some(_)) => bail!("config sets both input-snr and sigma"),
        (_, _, Some(db), None) => NoiseLevel::SnrDb(db),
        (_, _, None, Some(s)) => NoiseLevel::SigmaUv(s),
        _ => scene.noise,
    };
    Ok((n, scene))
}

fn required<T>(v: Option<T>, flag: &str) -> Result<T> {
    v.with_context(|| format!("--{flag} is required (flag or config key)"))
}

fn cmd_synth(a: SynthArgs) -> Result<ExitCode> {
    let cfg = load_config(&a.common)?;
    let seed = cfg.seed(a.common.seed, DEFAULT_SEED)?;
    let out: PathBuf = required(cfg.pick(a.out, "out")?, "out")?;
    let (n, scene) = scene(&a.scene, &cfg)?;
    std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    let corpus = gen_corpus(n, &scene, seed)?;
    for (i, pair) in corpus.iter().enumerate() {
        write_signal_csv(&out.join(format!("clean_{i:03}.csv")), &pair.clean)?;
        write_signal_csv(&out.join(format!("noisy_{i:03}.csv")), &pair.noisy)?;
    }
    eprintln!(
        "wrote {} clean/noisy pairs to {} (seeds {}..{})",
        corpus.len(),
        out.display(),
        seed,
        seed + n as u64 - 1
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_denoise(a: DenoiseArgs) -> Result<ExitCode> {
    let cfg = load_config(&a.common)?;
    let input: PathBuf = required(cfg.pick(a.input, "input")?, "input")?;
    let out: PathBuf = required(cfg.pick(a.out, "out")?, "out")?;
    let method: Method = required(cfg.pick(a.method, "method")?, "method")?.parse()?;
    let fs = cfg.pick(a.common.fs, "fs")?;
    let plan = window_plan(&a.common, &cfg)?;
    let params = method_params(&a.common, &cfg)?;
    let signal = read_signal_csv(&input, fs)?;
    let result = Denoiser::new(method, &params)?.denoise(&signal, &plan)?;
    write_signal_csv(&out, &result.signal)?;
    eprintln!(
        "{}: {} windows, {} passed through unfiltered",
        method.label(),
        result.windows,
        result.window_failures
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_bench(a: BenchArgs) -> Result<ExitCode> {
    let cfg = load_config(&a.common)?;
    let seed = cfg.seed(a.common.seed, DEFAULT_SEED)?;
    let methods = Method::parse_list(&cfg.pick(a.method, "method")?.unwrap_or_else(|| "all".into()))?;
    let inputs = if a.input.is_empty() {
        cfg.raw("input").map(split_paths).unwrap_or_default()
    } else {
        a.input
    };
    let references = if a.reference.is_empty() {
        cfg.raw("reference").map(split_paths).unwrap_or_default()
    } else {
        a.reference
    };
    let corpus = if inputs.is_empty() {
        let (n_signals, scene) = scene(&a.scene, &cfg)?;
        CorpusSpec::Synthetic { n_signals, scene }
    } else {
        CorpusSpec::Files {
            inputs,
            references,
            fs: cfg.pick(a.common.fs, "fs")?,
        }
    };
    let snr_mode = match cfg.pick(a.snr_mode, "snr-mode")? {
        Some(m) => m,
        None => match &corpus {
            CorpusSpec::Files { references, .. } if references.is_empty() => SnrMode::ResidualProxy,
            _ => SnrMode::TrueNoise,
        },
    };
    let run = RunConfig {
        corpus,
        methods,
        params: method_params(&a.common, &cfg)?,
        plan: window_plan(&a.common, &cfg)?,
        snr_mode,
        embed_m: cfg.pick(a.embed_m, "embed-m")?.unwrap_or(RunConfig::default().embed_m),
        seed,
        workers: cfg.pick(a.workers, "workers")?,
    };
    let format = cfg.pick(a.format, "format")?.unwrap_or_default();
    let report = run_pipeline(&run)?;
    let text = report.render(format)?;
    match cfg.pick(a.out, "out")? {
        Some(p) => std::fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    if report.complete() {
        Ok(ExitCode::SUCCESS)
    } else {
        let missing: Vec<&str> = report
            .rows
            .iter()
            .filter(|r| r.mean_snr_db.is_none())
            .map(|r| r.key.as_str())
            .collect();
        eprintln!("no finite SNR for: {}", missing.join(", "));
        Ok(ExitCode::from(2))
    }
}

fn split_paths(s: &str) -> Vec<PathBuf> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(PathBuf::from)
        .collect()
}

fn cmd_plot_data(a: PlotArgs) -> Result<ExitCode> {
    let cfg = load_config(&a.common)?;
    let out: PathBuf = required(cfg.pick(a.out, "out")?, "out")?;
    let plan = window_plan(&a.common, &cfg)?;
    let params = method_params(&a.common, &cfg)?;
    let (raw, clean) = match cfg.pick(a.input, "input")? {
        Some(p) => (read_signal_csv(&p, cfg.pick(a.common.fs, "fs")?)?, None),
        None => {
            let seed = cfg.seed(a.common.seed, DEFAULT_SEED)?;
            let mut scene = EogSceneConfig::default();
            if let Some(db) = cfg.pick(a.input_snr, "input-snr")? {
                scene.noise = NoiseLevel::SnrDb(db);
            }
            let pair = gen_corpus(1, &scene, seed)?.remove(0);
            (pair.noisy, Some(pair.clean))
        }
    };
    write_plot_data(&out, &raw, clean.as_ref(), &plan, &params)?;
    eprintln!("wrote {} rows to {}", raw.len(), out.display());
    Ok(ExitCode::SUCCESS)
}

fn write_plot_data(
    out: &Path,
    raw: &SampledSignal,
    clean: Option<&SampledSignal>,
    plan: &WindowPlan,
    params: &MethodParams,
) -> Result<()> {
    let fs = raw.sample_rate();
    let time: Vec<f64> = (0..raw.len()).map(|i| i as f64 / fs).collect();
    let centred = window_centred(raw, raw, plan)?;
    let mut headers = vec!["time_s".to_string(), "raw_uv".to_string()];
    let mut cols: Vec<Vec<f64>> = vec![time, raw.samples().to_vec()];
    if let Some(c) = clean {
        headers.push("clean_uv".into());
        cols.push(window_centred(c, raw, plan)?.into_samples());
    }
    headers.push("centred_uv".into());
    cols.push(centred.samples().to_vec());
    for m in Method::ALL {
        let d = Denoiser::new(m, params)?.denoise(raw, plan)?;
        headers.push(format!("{}_uv", m.key()));
        cols.push(d.signal.into_samples());
    }
    // IMFs of the whole mean-removed signal
    let whole = eog_denoise::signal::remove_mean(raw.samples())?;
    let imfs = emd::decompose(&whole, &params.emd)?;
    for (i, imf) in imfs.imfs.iter().enumerate() {
        headers.push(format!("imf_{}", i + 1));
        cols.push(imf.clone());
    }
    headers.push("imf_residual".into());
    cols.push(imfs.residual);
    let header_refs: Vec<&str> = headers.iter().map(String::as_str).collect();
    let col_refs: Vec<&[f64]> = cols.iter().map(Vec::as_slice).collect();
    write_columns_csv(out, &header_refs, &col_refs)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Synth(a) => cmd_synth(a),
        Command::Denoise(a) => cmd_denoise(a),
        Command::Bench(a) => cmd_bench(a),
        Command::PlotData(a) => cmd_plot_data(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
