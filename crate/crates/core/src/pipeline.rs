//! Windowed denoising of whole signals and the corpus benchmark.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::emd::{self, EmdParams};
use crate::error::{Error, Result};
use crate::fir::{self, FirCoefficients};
use crate::fmh::{self, FmhConfig};
use crate::io::read_signal_csv;
use crate::report::{BaselineRow, BenchmarkReport, CorpusDescriptor, MethodRow};
use crate::signal::{mean, plan_windows, reassemble, SampledSignal, WindowPlan};
use crate::snr::{evaluate_method, SnrMode, SnrOutcome, DEFAULT_EMBED_DIM};
use crate::swt::{self, SwtConfig};
use crate::synth::{gen_corpus, EogSceneConfig, NoiseLevel};

pub const DEFAULT_CORPUS_SIZE: usize = 20;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_EMD_KEEP: (usize, usize) = (2, 9);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Fir,
    Emd,
    Swt,
    Fmh,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Fir, Method::Emd, Method::Swt, Method::Fmh];

    pub fn key(self) -> &'static str {
        match self {
            Method::Fir => "fir",
            Method::Emd => "emd",
            Method::Swt => "swt",
            Method::Fmh => "fmh",
        }
    }

    /// Display name used in report tables.
    pub fn label(self) -> &'static str {
        match self {
            Method::Fir => "Band Pass FIR",
            Method::Emd => "EMD",
            Method::Swt => "SWT",
            Method::Fmh => "FIR Median Hybrid Filter",
        }
    }

    /// Published `(SNR dB, time ms)` for the original 20-subject recording.
    pub fn published(self) -> (f64, f64) {
        match self {
            Method::Fir => (21.75, 22.4),
            Method::Emd => (31.12, 33.7),
            Method::Swt => (24.23, 31.76),
            Method::Fmh => (25.15, 29.76),
        }
    }

    /// Parse a comma-separated list; `all` selects every method.
    pub fn parse_list(s: &str) -> Result<Vec<Method>> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if part.eq_ignore_ascii_case("all") {
                out.extend(Method::ALL);
            } else {
                out.push(part.parse()?);
            }
        }
        out.sort();
        out.dedup();
        if out.is_empty() {
            return Err(Error::Parameter("no method selected".into()));
        }
        Ok(out)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fir" => Ok(Method::Fir),
            "emd" => Ok(Method::Emd),
            "swt" => Ok(Method::Swt),
            "fmh" => Ok(Method::Fmh),
            other => Err(Error::Parameter(format!(
                "unknown method '{other}' (expected fir, emd, swt, fmh or all)"
            ))),
        }
    }
}

/// Per-method settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodParams {
    pub fir_order: usize,
    pub fir_band: (f64, f64),
    pub emd: EmdParams,
    /// One-based inclusive IMF range summed by the EMD denoiser.
    pub emd_keep: (usize, usize),
    pub swt: SwtConfig,
    pub fmh: FmhConfig,
}

impl Default for MethodParams {
    fn default() -> Self {
        Self {
            fir_order: fir::DEFAULT_ORDER,
            fir_band: fir::DEFAULT_BAND,
            emd: EmdParams::default(),
            emd_keep: DEFAULT_EMD_KEEP,
            swt: SwtConfig::default(),
            fmh: FmhConfig::default(),
        }
    }
}

impl MethodParams {
    pub fn describe(&self, method: Method) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        match method {
            Method::Fir => {
                put("order", self.fir_order.to_string());
                put("band", format!("{},{}", self.fir_band.0, self.fir_band.1));
            }
            Method::Emd => {
                put("max_imfs", self.emd.max_imfs.to_string());
                put("sd_threshold", self.emd.sd_threshold.to_string());
                put("max_sift_iters", self.emd.max_sift_iters.to_string());
                put("keep", format!("{}-{}", self.emd_keep.0, self.emd_keep.1));
            }
            Method::Swt => {
                put("wavelet", self.swt.wavelet.to_string());
                put("levels", self.swt.levels.to_string());
                put("mode", self.swt.mode.to_string());
                put("multiplier", self.swt.multiplier.to_string());
            }
            Method::Fmh => {
                put("L", self.fmh.half_len().to_string());
                put("weights", format!("{:?}", self.fmh.weights()));
            }
        }
        m
    }
}

/// A method with its parameters resolved (FIR taps designed once).
#[derive(Debug, Clone)]
pub struct Denoiser {
    method: Method,
    params: MethodParams,
    fir: Option<FirCoefficients>,
}

/// Output of [`Denoiser::denoise`].
#[derive(Debug, Clone, PartialEq)]
pub struct Denoised {
    pub signal: SampledSignal,
    pub windows: usize,
    /// Windows whose filter failed and were passed through unfiltered.
    pub window_failures: usize,
    /// Wall-clock spent inside the per-window filter calls.
    pub filter_time: Duration,
}

impl Denoiser {
    pub fn new(method: Method, params: &MethodParams) -> Result<Self> {
        let fir = match method {
            Method::Fir => Some(fir::design_firls(
                params.fir_order,
                params.fir_band.0,
                params.fir_band.1,
            )?),
            _ => None,
        };
        if params.emd_keep.0 > params.emd_keep.1 {
            return Err(Error::EmptySelection);
        }
        Ok(Self {
            method,
            params: params.clone(),
            fir,
        })
    }

    pub fn method(&self) -> Method {
        self.method
    }

    /// Filter one mean-removed window. FIR output is left delayed.
    pub fn filter_window(&self, w: &[f64]) -> Result<Vec<f64>> {
        match self.method {
            Method::Fir => {
                if w.is_empty() {
                    return Err(Error::EmptyInput);
                }
                let taps = self.fir.as_ref().expect("FIR designed in new").taps();
                Ok(fir::convolve(w, taps))
            }
            Method::Emd => {
                let set = emd::decompose(w, &self.params.emd)?;
                set.reconstruct(self.params.emd_keep.0..=self.params.emd_keep.1)
            }
            Method::Swt => swt::denoise(w, &self.params.swt),
            Method::Fmh => fmh::fmh_filter(w, &self.params.fmh),
        }
    }

    /// Window, mean-remove, filter, reassemble and (FIR only) undo the group
    /// delay.
    pub fn denoise(&self, x: &SampledSignal, plan: &WindowPlan) -> Result<Denoised> {
        let ranges = plan_windows(x.len(), plan)?;
        let mut out = Vec::with_capacity(ranges.len());
        let mut failures = 0;
        let mut elapsed = Duration::ZERO;
        for &(s, e) in &ranges {
            let w = &x.samples()[s..e];
            let mu = mean(w);
            let centred: Vec<f64> = w.iter().map(|v| v - mu).collect();
            let t0 = Instant::now();
            let filtered = self.filter_window(&centred);
            elapsed += t0.elapsed();
            match filtered {
                Ok(y) => out.push(y),
                Err(_) => {
                    failures += 1;
                    out.push(centred);
                }
            }
        }
        let mut y = reassemble(&out, &ranges, x.len())?;
        if let Some(f) = &self.fir {
            y = fir::compensate_delay(&y, f.order())?;
        }
        Ok(Denoised {
            signal: x.with_samples(y)?,
            windows: ranges.len(),
            window_failures: failures,
            filter_time: elapsed,
        })
    }
}

/// `x` with the window means of `means_of` subtracted window by window and
/// reassembled as the denoisers do. With `means_of = x` this is the
/// unfiltered baseline.
pub fn window_centred(x: &SampledSignal, means_of: &SampledSignal, plan: &WindowPlan) -> Result<SampledSignal> {
    if x.len() != means_of.len() {
        return Err(Error::Shape(format!(
            "{} samples vs {} for window means",
            x.len(),
            means_of.len()
        )));
    }
    let ranges = plan_windows(x.len(), plan)?;
    let windows: Vec<Vec<f64>> = ranges
        .iter()
        .map(|&(s, e)| {
            let mu = mean(&means_of.samples()[s..e]);
            x.samples()[s..e].iter().map(|v| v - mu).collect()
        })
        .collect();
    x.with_samples(reassemble(&windows, &ranges, x.len())?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CorpusSpec {
    /// `n_signals` scenes with seeds `seed, seed + 1, ...`.
    Synthetic { n_signals: usize, scene: EogSceneConfig },
    /// Recorded signals, with optional clean references in matching order.
    Files {
        inputs: Vec<PathBuf>,
        references: Vec<PathBuf>,
        fs: Option<f64>,
    },
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec::Synthetic {
            n_signals: DEFAULT_CORPUS_SIZE,
            scene: EogSceneConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub corpus: CorpusSpec,
    pub methods: Vec<Method>,
    pub params: MethodParams,
    pub plan: WindowPlan,
    pub snr_mode: SnrMode,
    pub embed_m: usize,
    pub seed: u64,
    /// Worker threads for per-signal parallelism; `None` uses every CPU.
    pub workers: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            corpus: CorpusSpec::default(),
            methods: Method::ALL.to_vec(),
            params: MethodParams::default(),
            plan: WindowPlan::default(),
            snr_mode: SnrMode::TrueNoise,
            embed_m: DEFAULT_EMBED_DIM,
            seed: DEFAULT_SEED,
            workers: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::Parameter("no method selected".into()));
        }
        if self.embed_m == 0 {
            return Err(Error::Parameter("embedding dimension must be >= 1".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::Parameter("workers must be >= 1".into()));
        }
        match &self.corpus {
            CorpusSpec::Synthetic { n_signals, scene } => {
                if *n_signals == 0 {
                    return Err(Error::Parameter("corpus needs at least one signal".into()));
                }
                scene.validate()
            }
            CorpusSpec::Files {
                inputs, references, ..
            } => {
                if inputs.is_empty() {
                    return Err(Error::Parameter("no input files".into()));
                }
                if !references.is_empty() && references.len() != inputs.len() {
                    return Err(Error::Parameter(format!(
                        "{} reference files for {} inputs",
                        references.len(),
                        inputs.len()
                    )));
                }
                if self.snr_mode == SnrMode::TrueNoise && references.is_empty() {
                    return Err(Error::Parameter(
                        "true-noise scoring needs clean reference files".into(),
                    ));
                }
                for p in inputs.iter().chain(references) {
                    if !p.exists() {
                        return Err(Error::Io {
                            path: p.clone(),
                            source: std::io::Error::new(
                                std::io::ErrorKind::NotFound,
                                "no such file",
                            ),
                        });
                    }
                }
                Ok(())
            }
        }
    }

    /// Flat description of everything that affects the numbers. The worker
    /// count is left out since results do not depend on it.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert(
            "methods".into(),
            self.methods.iter().map(|x| x.key()).collect::<Vec<_>>().join(","),
        );
        m.insert("window".into(), self.plan.window_len().to_string());
        m.insert("overlap".into(), self.plan.overlap_fraction().to_string());
        m.insert("snr_mode".into(), self.snr_mode.to_string());
        m.insert("embed_m".into(), self.embed_m.to_string());
        m.insert("seed".into(), self.seed.to_string());
        for method in &self.methods {
            for (k, v) in self.params.describe(*method) {
                m.insert(format!("{}.{k}", method.key()), v);
            }
        }
        match &self.corpus {
            CorpusSpec::Synthetic { n_signals, scene } => {
                m.insert("corpus.n_signals".into(), n_signals.to_string());
                m.insert("corpus.duration_s".into(), scene.duration_s.to_string());
                m.insert("corpus.sample_rate".into(), scene.sample_rate.to_string());
                m.insert("corpus.noise".into(), format!("{:?}", scene.noise));
            }
            CorpusSpec::Files {
                inputs, references, ..
            } => {
                m.insert("corpus.inputs".into(), inputs.len().to_string());
                m.insert("corpus.references".into(), references.len().to_string());
            }
        }
        m
    }
}

/// A noisy signal and, when known, its clean counterpart.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusItem {
    pub label: String,
    pub noisy: SampledSignal,
    pub clean: Option<SampledSignal>,
}

pub fn load_corpus(cfg: &RunConfig) -> Result<Vec<CorpusItem>> {
    match &cfg.corpus {
        CorpusSpec::Synthetic { n_signals, scene } => Ok(gen_corpus(*n_signals, scene, cfg.seed)?
            .into_iter()
            .map(|p| CorpusItem {
                label: format!("seed-{}", p.seed),
                noisy: p.noisy,
                clean: Some(p.clean),
            })
            .collect()),
        CorpusSpec::Files {
            inputs,
            references,
            fs,
        } => inputs
            .iter()
            .enumerate()
            .map(|(i, path)| {
                let noisy = read_signal_csv(path, *fs)?;
                let clean = match references.get(i) {
                    Some(r) => {
                        let c = read_signal_csv(r, *fs)?;
                        if c.len() != noisy.len() || c.sample_rate() != noisy.sample_rate() {
                            return Err(Error::Shape(format!(
                                "reference {} does not match {}",
                                r.display(),
                                path.display()
                            )));
                        }
                        Some(c)
                    }
                    None => None,
                };
                Ok(CorpusItem {
                    label: path.display().to_string(),
                    noisy,
                    clean,
                })
            })
            .collect(),
    }
}

/// Scores for one signal.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalScores {
    pub label: String,
    pub baseline: SnrOutcome,
    /// One entry per selected method, in selection order.
    pub methods: Vec<MethodScore>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodScore {
    pub method: Method,
    pub outcome: SnrOutcome,
    pub windows: usize,
    pub window_failures: usize,
    /// Mean filter wall-clock per window (ms), from the timed pass.
    pub runtime_ms: f64,
}

fn score_signal(
    item: &CorpusItem,
    denoisers: &[Denoiser],
    cfg: &RunConfig,
) -> Result<(SignalScores, Vec<Denoised>)> {
    let clean_ref = match (cfg.snr_mode, &item.clean) {
        (SnrMode::TrueNoise, Some(c)) => Some(window_centred(c, &item.noisy, &cfg.plan)?),
        (SnrMode::TrueNoise, None) => {
            return Err(Error::Parameter(format!(
                "{}: true-noise scoring needs a clean reference",
                item.label
            )))
        }
        (SnrMode::ResidualProxy, _) => None,
    };
    let baseline = window_centred(&item.noisy, &item.noisy, &cfg.plan)?;
    let base = evaluate_method(
        "baseline",
        &item.noisy,
        &baseline,
        clean_ref.as_ref(),
        cfg.embed_m,
        0.0,
        BTreeMap::new(),
    )?;
    // in proxy mode the residual is measured against the same centring the
    // denoisers apply
    let noisy_ref = &baseline;
    let mut methods = Vec::with_capacity(denoisers.len());
    let mut outputs = Vec::with_capacity(denoisers.len());
    for d in denoisers {
        let out = d.denoise(&item.noisy, &cfg.plan)?;
        let rep = evaluate_method(
            d.method().key(),
            noisy_ref,
            &out.signal,
            clean_ref.as_ref(),
            cfg.embed_m,
            0.0,
            BTreeMap::new(),
        )?;
        methods.push(MethodScore {
            method: d.method(),
            outcome: rep.outcome,
            windows: out.windows,
            window_failures: out.window_failures,
            runtime_ms: 0.0,
        });
        outputs.push(out);
    }
    Ok((
        SignalScores {
            label: item.label.clone(),
            baseline: base.outcome,
            methods,
        },
        outputs,
    ))
}

/// Score every signal (in parallel across signals), then time the filters
/// single-threaded. The scoring pass doubles as the discarded warm-up.
pub fn score_corpus(cfg: &RunConfig, corpus: &[CorpusItem]) -> Result<Vec<SignalScores>> {
    cfg.validate()?;
    let denoisers = cfg
        .methods
        .iter()
        .map(|m| Denoiser::new(*m, &cfg.params))
        .collect::<Result<Vec<_>>>()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cfg.workers {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Parameter(format!("thread pool: {e}")))?;
    let scored: Vec<(SignalScores, Vec<Denoised>)> = pool.install(|| {
        corpus
            .par_iter()
            .map(|item| score_signal(item, &denoisers, cfg))
            .collect::<Result<Vec<_>>>()
    })?;

    let mut out = Vec::with_capacity(scored.len());
    for (item, (mut scores, _)) in corpus.iter().zip(scored) {
        for (d, ms) in denoisers.iter().zip(&mut scores.methods) {
            let timed = d.denoise(&item.noisy, &cfg.plan)?;
            ms.runtime_ms = timed.filter_time.as_secs_f64() * 1e3 / timed.windows as f64;
        }
        out.push(scores);
    }
    Ok(out)
}

/// Full benchmark: load or synthesize the corpus, score every method and
/// aggregate into a report.
pub fn run_pipeline(cfg: &RunConfig) -> Result<BenchmarkReport> {
    cfg.validate()?;
    let corpus = load_corpus(cfg)?;
    let scores = score_corpus(cfg, &corpus)?;
    Ok(build_report(cfg, &corpus, &scores))
}

fn mean_std(v: &[f64]) -> (Option<f64>, Option<f64>) {
    if v.is_empty() {
        return (None, None);
    }
    let mu = mean(v);
    let sd = if v.len() > 1 {
        (v.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
    } else {
        0.0
    };
    (Some(mu), Some(sd))
}

pub fn build_report(cfg: &RunConfig, corpus: &[CorpusItem], scores: &[SignalScores]) -> BenchmarkReport {
    let rows: Vec<MethodRow> = cfg
        .methods
        .iter()
        .enumerate()
        .map(|(k, &method)| {
            let per: Vec<&MethodScore> = scores.iter().map(|s| &s.methods[k]).collect();
            let dbs: Vec<f64> = per.iter().filter_map(|m| m.outcome.db()).collect();
            let (mean_snr_db, std_snr_db) = mean_std(&dbs);
            let times: Vec<f64> = per.iter().map(|m| m.runtime_ms).collect();
            let (published_snr_db, published_time_ms) = method.published();
            MethodRow {
                method: method.label().to_string(),
                key: method.key().to_string(),
                mean_snr_db,
                std_snr_db,
                mean_runtime_ms: mean_std(&times).0.unwrap_or(0.0),
                n_scored: dbs.len(),
                n_perfect: per
                    .iter()
                    .filter(|m| m.outcome == SnrOutcome::PerfectReconstruction)
                    .count(),
                n_signal_weaker: per
                    .iter()
                    .filter(|m| matches!(m.outcome, SnrOutcome::SignalWeakerThanNoise { .. }))
                    .count(),
                window_failures: per.iter().map(|m| m.window_failures).sum(),
                published_snr_db,
                published_time_ms,
            }
        })
        .collect();

    let base: Vec<f64> = scores.iter().filter_map(|s| s.baseline.db()).collect();
    let (mean_b, std_b) = mean_std(&base);
    let baseline = BaselineRow {
        mean_snr_db: mean_b,
        std_snr_db: std_b,
        n_scored: base.len(),
    };

    let (kind, input_snr_db) = match &cfg.corpus {
        CorpusSpec::Synthetic { scene, .. } => (
            "synthetic",
            match scene.noise {
                NoiseLevel::SnrDb(db) => Some(db),
                NoiseLevel::SigmaUv(_) => None,
            },
        ),
        CorpusSpec::Files { .. } => ("files", None),
    };
    let corpus_desc = CorpusDescriptor {
        kind: kind.to_string(),
        n_signals: corpus.len(),
        sample_rate: corpus.first().map_or(0.0, |c| c.noisy.sample_rate()),
        total_samples: corpus.iter().map(|c| c.noisy.len()).sum(),
        input_snr_db,
        seed: cfg.seed,
    };

    BenchmarkReport::new(
        corpus_desc,
        cfg.snr_mode,
        cfg.embed_m,
        cfg.plan.window_len(),
        cfg.echo(),
        baseline,
        rows,
    )
}
