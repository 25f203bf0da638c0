//! Sequence files and the plain-text artifacts.
//!
//! Sequences are CSV with header `index,re,im` and one sample per row,
//! written in scientific notation with 17 significant digits so that every
//! `f64` reads back bit for bit.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use pslseq::{ComplexSequence, IterationRecord, MetricsReport, C64};
use serde::Serialize;

use crate::error::{CliError, CliResult};

const HEADER: [&str; 3] = ["index", "re", "im"];

/// Formats a float with 17 significant digits.
pub fn exact(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_sequence<W: Write>(x: &ComplexSequence, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for (i, z) in x.samples().iter().enumerate() {
        w.write_record([i.to_string(), exact(z.re), exact(z.im)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn export_sequence(x: &ComplexSequence, path: &Path) -> CliResult<()> {
    let mut buf = Vec::new();
    write_sequence(x, &mut buf).map_err(|e| CliError::Internal(e.to_string()))?;
    write_file(path, &buf)
}

/// Parses a sequence file. `origin` names the source in error messages.
pub fn read_sequence<R: Read>(input: R, origin: &str) -> CliResult<ComplexSequence> {
    let bad = |message: String| CliError::validation("sequence", format!("{origin}: {message}"));
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header = r.headers().map_err(|e| bad(e.to_string()))?;
    if header.iter().ne(HEADER) {
        return Err(bad(format!("expected header \"index,re,im\", found {:?}", header.iter().collect::<Vec<_>>().join(","))));
    }
    let mut samples = Vec::new();
    for (row, record) in r.records().enumerate() {
        let line = row + 2;
        let record = record.map_err(|e| bad(format!("line {line}: {e}")))?;
        if record.len() != 3 {
            return Err(bad(format!("line {line}: expected 3 fields, found {}", record.len())));
        }
        let index: usize = record[0]
            .parse()
            .map_err(|_| bad(format!("line {line}: bad index {:?}", &record[0])))?;
        if index != row {
            return Err(bad(format!("line {line}: index {index} out of order, expected {row}")));
        }
        let value = |s: &str| -> CliResult<f64> {
            match s.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(bad(format!("line {line}: {s:?} is not a finite number"))),
            }
        };
        samples.push(C64::new(value(&record[1])?, value(&record[2])?));
    }
    if samples.is_empty() {
        return Err(bad("no samples".into()));
    }
    ComplexSequence::new(samples).map_err(|e| bad(e.to_string()))
}

pub fn import_sequence(path: &Path) -> CliResult<ComplexSequence> {
    let file = fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    read_sequence(file, &path.display().to_string())
}

/// `lag,db` rows for lags `1..N`, clamped at -400 dB.
pub fn lag_table(metrics: &MetricsReport) -> String {
    let mut s = String::from("lag,db\n");
    for (lag, db) in &metrics.normalized_autocorr_db {
        s.push_str(&format!("{lag},{db}\n"));
    }
    s
}

pub fn trace_table(trace: &[IterationRecord]) -> String {
    let mut s = String::from("iteration,psl,isl,window_psl,mpcl,delta\n");
    for t in trace {
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            t.iteration, t.psl, t.isl, t.window_psl, t.mpcl, t.delta
        ));
    }
    s
}

pub fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> CliResult<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}
