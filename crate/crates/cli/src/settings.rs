//! Flat `key = value` config files and flag/config/env precedence.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};

pub const SEED_ENV: &str = "EOG_DENOISE_SEED";

/// Keys accepted in a config file; each matches a long flag.
pub const KNOWN_KEYS: &[&str] = &[
    "seed",
    "fs",
    "window",
    "overlap",
    "method",
    "snr-mode",
    "embed-m",
    "workers",
    "format",
    "out",
    "input",
    "reference",
    "n-signals",
    "input-snr",
    "sigma",
    "duration",
    "emd-keep",
    "swt-wavelet",
    "swt-mode",
    "fmh-L",
    "fir-band",
];

#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    path: Option<PathBuf>,
    entries: BTreeMap<String, (String, usize)>,
}

fn normalize(key: &str) -> String {
    let k = key.trim().replace('_', "-");
    if k.eq_ignore_ascii_case("fmh-l") {
        "fmh-L".to_string()
    } else {
        k.to_ascii_lowercase()
    }
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text, Some(path))
    }

    pub fn parse(text: &str, path: Option<&Path>) -> Result<Self> {
        let where_ = |line: usize| match path {
            Some(p) => format!("{}:{line}", p.display()),
            None => format!("line {line}"),
        };
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                bail!("{}: expected key = value", where_(i + 1));
            };
            let key = normalize(k);
            if !KNOWN_KEYS.contains(&key.as_str()) {
                bail!("{}: unknown key '{}'", where_(i + 1), k.trim());
            }
            entries.insert(key, (v.trim().to_string(), i + 1));
        }
        Ok(Self {
            path: path.map(Path::to_path_buf),
            entries,
        })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    fn get<T>(&self, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        match self.entries.get(key) {
            None => Ok(None),
            Some((v, line)) => v.parse().map(Some).map_err(|e| {
                let file = self
                    .path
                    .as_ref()
                    .map_or_else(|| "config".to_string(), |p| p.display().to_string());
                anyhow::anyhow!("{file}:{line}: bad value for '{key}': {e}")
            }),
        }
    }

    /// The flag if given, else the config entry.
    pub fn pick<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }

    /// Seed from the flag, the config file, the environment, then `default`.
    pub fn seed(&self, flag: Option<u64>, default: u64) -> Result<u64> {
        if let Some(s) = self.pick(flag, "seed")? {
            return Ok(s);
        }
        match std::env::var(SEED_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .with_context(|| format!("{SEED_ENV}='{v}' is not an unsigned integer")),
            Err(_) => Ok(default),
        }
    }
}

/// `"2-9"`, `"2..9"`, `"2..=9"` or `"2,9"`; a single index selects one IMF.
pub fn parse_keep(s: &str) -> Result<(usize, usize)> {
    let s = s.trim();
    let parts: Vec<&str> = ["..=", "..", "-", ","]
        .iter()
        .find_map(|sep| s.split_once(sep).map(|(a, b)| vec![a, b]))
        .unwrap_or_else(|| vec![s, s]);
    let first: usize = parts[0].trim().parse().with_context(|| format!("bad IMF range '{s}'"))?;
    let last: usize = parts[1].trim().parse().with_context(|| format!("bad IMF range '{s}'"))?;
    if first == 0 || first > last {
        bail!("IMF range '{s}' must be one-based with first <= last");
    }
    Ok((first, last))
}

/// `"low,high"` as fractions of Nyquist.
pub fn parse_band(s: &str) -> Result<(f64, f64)> {
    let Some((a, b)) = s.split_once(',') else {
        bail!("band '{s}' must be 'low,high'");
    };
    let low: f64 = a.trim().parse().with_context(|| format!("bad band '{s}'"))?;
    let high: f64 = b.trim().parse().with_context(|| format!("bad band '{s}'"))?;
    Ok((low, high))
}
