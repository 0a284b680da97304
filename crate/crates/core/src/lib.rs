//! Denoising of electrooculography (EOG) signals.
//!
//! Four interchangeable denoisers ([`fir`], [`emd`], [`swt`], [`fmh`]) run
//! over overlapping windows ([`signal`]), and an eigenvalue-based SNR
//! ([`snr`]) scores their output. [`synth`] builds ground-truth corpora and
//! [`pipeline`] ties everything into a benchmark report ([`report`]).

pub mod eigen;
pub mod emd;
pub mod error;
pub mod fir;
pub mod fmh;
pub mod io;
pub mod pipeline;
pub mod report;
pub mod signal;
pub mod snr;
pub mod spline;
pub mod swt;
pub mod synth;
pub mod wavelet;

pub use emd::{EmdParams, ImfSet};
pub use error::{Error, Result};
pub use fir::FirCoefficients;
pub use fmh::FmhConfig;
pub use pipeline::{CorpusSpec, Denoiser, Method, MethodParams, RunConfig};
pub use report::{BenchmarkReport, ReportFormat};
pub use signal::{SampledSignal, WindowPlan};
pub use snr::{SnrMode, SnrOutcome, SnrReport};
pub use swt::{SwtConfig, ThresholdMode};
pub use synth::{EogSceneConfig, NoiseLevel};
pub use wavelet::Wavelet;
