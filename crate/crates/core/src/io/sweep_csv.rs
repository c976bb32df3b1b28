use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::channel::{CMatrix, ChannelMatrix, FrequencySweep};
use crate::error::{Error, Result};

pub const SWEEP_HEADER: [&str; 5] = ["freq_hz", "rx", "tx", "re", "im"];
pub const REFERENCE_HEADER: [&str; 3] = ["freq_hz", "re", "im"];

/// Minimum reference magnitude accepted by [`deembed`].
pub const MIN_REFERENCE_MAGNITUDE: f64 = 1e-12;

/// One row per (frequency, rx, tx), rows ordered by frequency then rx then
/// tx, 0-based port indices. Floats use the shortest round-trip form.
pub fn sweep_to_csv(sweep: &FrequencySweep) -> String {
    let mut s = SWEEP_HEADER.join(",");
    s.push('\n');
    for m in &sweep.matrices {
        for i in 0..m.nr() {
            for j in 0..m.nt() {
                let h = m.entries[(i, j)];
                let _ = writeln!(s, "{},{i},{j},{},{}", m.frequency, h.re, h.im);
            }
        }
    }
    s
}

pub fn export_sweep(sweep: &FrequencySweep, path: &Path) -> Result<()> {
    super::write_atomic(path, sweep_to_csv(sweep).as_bytes())
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn records(text: &str, path: &Path, header: &[&str]) -> Result<Vec<(usize, csv::StringRecord)>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let got = rdr.headers().map_err(|e| parse_err(path, 1, e.to_string()))?.clone();
    if got.iter().collect::<Vec<_>>() != header {
        return Err(parse_err(
            path,
            1,
            format!("expected header `{}`, found `{}`", header.join(","), got.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(path, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        out.push((line, rec));
    }
    Ok(out)
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, idx: usize, name: &str, path: &Path, line: usize) -> Result<T> {
    rec.get(idx)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| parse_err(path, line, format!("invalid `{name}` value {:?}", rec.get(idx).unwrap_or(""))))
}

fn finite(x: f64, name: &str, path: &Path, line: usize) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(parse_err(path, line, format!("`{name}` must be finite")))
    }
}

/// Parses sweep CSV text. Row order is irrelevant; the full (rx, tx) grid
/// must be present exactly once for every frequency.
pub fn sweep_from_csv(text: &str, path: &Path, label: &str) -> Result<FrequencySweep> {
    let mut cells: BTreeMap<(u64, usize, usize), Complex64> = BTreeMap::new();
    let mut freqs: BTreeMap<u64, f64> = BTreeMap::new();
    let (mut nr, mut nt) = (0, 0);
    for (line, rec) in records(text, path, &SWEEP_HEADER)? {
        let f = finite(field::<f64>(&rec, 0, "freq_hz", path, line)?, "freq_hz", path, line)?;
        if !(f > 0.0) {
            return Err(parse_err(path, line, "`freq_hz` must be > 0"));
        }
        let rx: usize = field(&rec, 1, "rx", path, line)?;
        let tx: usize = field(&rec, 2, "tx", path, line)?;
        let re = finite(field(&rec, 3, "re", path, line)?, "re", path, line)?;
        let im = finite(field(&rec, 4, "im", path, line)?, "im", path, line)?;
        // positive finite floats order the same as their bit patterns
        let key = f.to_bits();
        freqs.insert(key, f);
        if cells.insert((key, rx, tx), Complex64::new(re, im)).is_some() {
            return Err(parse_err(path, line, format!("duplicate cell freq_hz={f} rx={rx} tx={tx}")));
        }
        nr = nr.max(rx + 1);
        nt = nt.max(tx + 1);
    }
    let mut matrices = Vec::with_capacity(freqs.len());
    for (&key, &f) in &freqs {
        let mut h = CMatrix::zeros(nr, nt);
        for i in 0..nr {
            for j in 0..nt {
                h[(i, j)] = *cells
                    .get(&(key, i, j))
                    .ok_or(Error::GridGap { freq_hz: f, rx: i, tx: j })?;
            }
        }
        matrices.push(ChannelMatrix::new(h, f)?);
    }
    FrequencySweep::new(label, matrices)
}

pub fn read_sweep(path: &Path) -> Result<FrequencySweep> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let label = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    sweep_from_csv(&text, path, &label)
}

/// Scalar complex response shared by every path, one value per frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceTrace {
    pub frequencies: Vec<f64>,
    pub values: Vec<Complex64>,
}

pub fn read_reference(path: &Path) -> Result<ReferenceTrace> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut frequencies = Vec::new();
    let mut values = Vec::new();
    for (line, rec) in records(&text, path, &REFERENCE_HEADER)? {
        let f = finite(field(&rec, 0, "freq_hz", path, line)?, "freq_hz", path, line)?;
        if let Some(&prev) = frequencies.last() {
            if !(f > prev) {
                return Err(Error::NonAscending(f));
            }
        }
        frequencies.push(f);
        let re = finite(field(&rec, 1, "re", path, line)?, "re", path, line)?;
        let im = finite(field(&rec, 2, "im", path, line)?, "im", path, line)?;
        values.push(Complex64::new(re, im));
    }
    Ok(ReferenceTrace { frequencies, values })
}

pub fn reference_to_csv(trace: &ReferenceTrace) -> String {
    let mut s = REFERENCE_HEADER.join(",");
    s.push('\n');
    for (f, v) in trace.frequencies.iter().zip(&trace.values) {
        let _ = writeln!(s, "{f},{},{}", v.re, v.im);
    }
    s
}

/// Divides every entry of `raw(f)` by the scalar reference `R(f)`.
pub fn deembed(raw: &FrequencySweep, reference: &ReferenceTrace) -> Result<FrequencySweep> {
    if reference.frequencies.len() != raw.len() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} reference points", raw.len()),
            actual: format!("{}", reference.frequencies.len()),
        });
    }
    let mut matrices = Vec::with_capacity(raw.len());
    for ((m, &fr), &r) in raw.matrices.iter().zip(&reference.frequencies).zip(&reference.values) {
        if (fr - m.frequency).abs() > 1e-9 * m.frequency.abs() {
            return Err(Error::invalid(format!(
                "reference frequency {fr} Hz does not match sweep frequency {} Hz",
                m.frequency
            )));
        }
        if r.norm() < MIN_REFERENCE_MAGNITUDE {
            return Err(Error::Numeric(format!(
                "reference magnitude {} below {MIN_REFERENCE_MAGNITUDE} at {} Hz",
                r.norm(),
                m.frequency
            )));
        }
        matrices.push(ChannelMatrix::new(m.entries.map(|h| h / r), m.frequency)?);
    }
    FrequencySweep::new(raw.label.clone(), matrices)
}

/// Reads a raw sweep and, when a reference trace is given, de-embeds it.
pub fn ingest_sweep(path: &Path, reference: Option<&Path>) -> Result<FrequencySweep> {
    let raw = read_sweep(path)?;
    match reference {
        Some(r) => deembed(&raw, &read_reference(r)?),
        None => Ok(raw),
    }
}
