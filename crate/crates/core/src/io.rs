//! CSV signal files.
//!
//! A signal file has the header `time_s,amplitude_uv` followed by one sample
//! per row. A single `amplitude_uv` column is also accepted when the sample
//! rate is supplied separately.

use std::fs::File;
use std::path::Path;

use crate::error::{Error, Result};
use crate::signal::SampledSignal;

pub const TIME_COLUMN: &str = "time_s";
pub const AMPLITUDE_COLUMN: &str = "amplitude_uv";

/// Allowed deviation of any sample interval from the nominal one.
pub const MAX_JITTER: f64 = 0.01;

pub fn read_signal_csv(path: &Path, fs: Option<f64>) -> Result<SampledSignal> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(file);
    let parse_err = |line: u64, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };

    let mut records = rdr.records();
    let header = match records.next() {
        Some(r) => r.map_err(|e| parse_err(line_of(&e), e.to_string()))?,
        None => return Err(Error::EmptyInput),
    };
    let fields: Vec<&str> = header.iter().collect();
    let two_column = match fields.as_slice() {
        [TIME_COLUMN, AMPLITUDE_COLUMN] => true,
        [AMPLITUDE_COLUMN] => false,
        _ => {
            return Err(parse_err(
                1,
                format!("expected header '{TIME_COLUMN},{AMPLITUDE_COLUMN}' or '{AMPLITUDE_COLUMN}'"),
            ))
        }
    };

    let mut times = Vec::new();
    let mut values = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| parse_err(line_of(&e), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        let num = |s: &str| -> Result<f64> {
            let v: f64 = s
                .parse()
                .map_err(|_| parse_err(line, format!("not a number: '{s}'")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(parse_err(line, format!("non-finite value '{s}'")))
            }
        };
        if two_column {
            times.push(num(&rec[0])?);
            values.push(num(&rec[1])?);
        } else {
            values.push(num(&rec[0])?);
        }
    }
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }

    let rate = if two_column {
        infer_rate(&times, fs)?
    } else {
        fs.ok_or_else(|| {
            Error::Sampling(format!(
                "{}: single-column file needs a sample rate",
                path.display()
            ))
        })?
    };
    SampledSignal::new(values, rate)
}

fn line_of(e: &csv::Error) -> u64 {
    e.position().map_or(0, |p| p.line())
}

fn infer_rate(times: &[f64], fs: Option<f64>) -> Result<f64> {
    if times.len() < 2 {
        return fs.ok_or_else(|| Error::Sampling("one sample: cannot infer the sample rate".into()));
    }
    let n = times.len();
    let dt = (times[n - 1] - times[0]) / (n - 1) as f64;
    if !(dt > 0.0) {
        return Err(Error::Sampling("timestamps must increase".into()));
    }
    for (i, w) in times.windows(2).enumerate() {
        let step = w[1] - w[0];
        if ((step - dt) / dt).abs() > MAX_JITTER {
            return Err(Error::Sampling(format!(
                "interval {step} s before sample {} deviates from {dt} s by more than {}%",
                i + 1,
                MAX_JITTER * 100.0
            )));
        }
    }
    let rate = 1.0 / dt;
    if let Some(f) = fs {
        if ((f - rate) / rate).abs() > MAX_JITTER {
            return Err(Error::Sampling(format!(
                "timestamps give {rate} Hz but {f} Hz was requested"
            )));
        }
    }
    Ok(rate)
}

/// Write `time_s,amplitude_uv` rows with round-trip float formatting.
pub fn write_signal_csv(path: &Path, signal: &SampledSignal) -> Result<()> {
    let fs = signal.sample_rate();
    let times: Vec<f64> = (0..signal.len()).map(|i| i as f64 / fs).collect();
    write_columns_csv(
        path,
        &[TIME_COLUMN, AMPLITUDE_COLUMN],
        &[&times, signal.samples()],
    )
}

/// Write equal-length columns under the given headers.
pub fn write_columns_csv(path: &Path, headers: &[&str], columns: &[&[f64]]) -> Result<()> {
    if headers.len() != columns.len() {
        return Err(Error::Shape(format!(
            "{} headers for {} columns",
            headers.len(),
            columns.len()
        )));
    }
    let n = columns.first().map_or(0, |c| c.len());
    if columns.iter().any(|c| c.len() != n) {
        return Err(Error::Shape("columns differ in length".into()));
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    let ser = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Serialize(format!("{other:?}")),
    };
    w.write_record(headers).map_err(ser)?;
    let mut row = Vec::with_capacity(columns.len());
    for i in 0..n {
        row.clear();
        row.extend(columns.iter().map(|c| c[i].to_string()));
        w.write_record(&row).map_err(ser)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn file_with(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    #[test]
    fn two_rows_at_256_hz() {
        let f = file_with("time_s,amplitude_uv\n0,1.0\n0.00390625,2.0\n");
        let s = read_signal_csv(f.path(), None).unwrap();
        assert_eq!(s.samples(), &[1.0, 2.0]);
        assert_eq!(s.sample_rate(), 256.0);
    }

    #[test]
    fn empty_data_section() {
        let f = file_with("time_s,amplitude_uv\n");
        assert!(matches!(read_signal_csv(f.path(), None), Err(Error::EmptyInput)));
        let f = file_with("");
        assert!(matches!(read_signal_csv(f.path(), None), Err(Error::EmptyInput)));
    }

    #[test]
    fn parse_error_carries_line() {
        let f = file_with("time_s,amplitude_uv\n0,1\n0.5,abc\n");
        match read_signal_csv(f.path(), None) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        let f = file_with("t,v\n0,1\n");
        assert!(matches!(
            read_signal_csv(f.path(), None),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn jittered_timestamps_rejected() {
        let f = file_with("time_s,amplitude_uv\n0,1\n0.01,1\n0.02,1\n0.035,1\n");
        assert!(matches!(read_signal_csv(f.path(), None), Err(Error::Sampling(_))));
        // within 1% is accepted
        let f = file_with("time_s,amplitude_uv\n0,1\n0.01,1\n0.02004,1\n0.03,1\n");
        assert!(read_signal_csv(f.path(), None).is_ok());
    }

    #[test]
    fn single_column_needs_rate() {
        let f = file_with("amplitude_uv\n1\n2\n3\n");
        assert!(matches!(read_signal_csv(f.path(), None), Err(Error::Sampling(_))));
        let s = read_signal_csv(f.path(), Some(128.0)).unwrap();
        assert_eq!((s.len(), s.sample_rate()), (3, 128.0));
    }

    #[test]
    fn missing_file_is_io_error_with_path() {
        let p = Path::new("/nonexistent/x.csv");
        match read_signal_csv(p, None) {
            Err(Error::Io { path, .. }) => assert_eq!(path, p),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn write_read_roundtrip() {
        let cfg = crate::synth::EogSceneConfig {
            seed: 3,
            ..Default::default()
        };
        let clean = crate::synth::gen_clean_eog(&cfg).unwrap();
        let noisy = crate::synth::add_white_noise(&clean, 5.0, 1).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sig.csv");
        write_signal_csv(&p, &noisy).unwrap();
        let back = read_signal_csv(&p, None).unwrap();
        assert_eq!(back.len(), noisy.len());
        assert!((back.sample_rate() - 256.0).abs() < 1e-9);
        for (a, b) in back.samples().iter().zip(noisy.samples()) {
            assert!((a - b).abs() <= 1e-6 * b.abs().max(1e-12));
        }
    }
}
