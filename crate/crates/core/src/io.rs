//! CSV formats.
//!
//! | file              | header                              |
//! |-------------------|-------------------------------------|
//! | time series       | `t,p_e,norm_error`                  |
//! | bath snapshot     | `index,omega,gamma,population`      |
//! | bath dump         | `index,omega,gamma`                 |
//! | impedance sweep   | `omega,re_z,im_z,abs_z`             |
//!
//! Floats are written with 17 significant digits so values round-trip
//! exactly; mode indices are 1-based.

use std::io::{Read, Write};

use thiserror::Error;

use crate::model::{BathKind, BathSpec, Mode, ModelError, Sample, Snapshot, TimeSeries};

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("unexpected header {found:?}, expected {expected:?}")]
    Header { found: Vec<String>, expected: &'static [&'static str] },
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// 17 significant digits, scientific notation.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

const SERIES_HEADER: &[&str] = &["t", "p_e", "norm_error"];
const BATH_HEADER: &[&str] = &["index", "omega", "gamma"];
const SNAPSHOT_HEADER: &[&str] = &["index", "omega", "gamma", "population"];

pub fn write_series_csv<W: Write>(out: W, series: &TimeSeries) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SERIES_HEADER)?;
    for s in &series.samples {
        w.write_record([fmt_f64(s.t), fmt_f64(s.p_e), fmt_f64(s.norm_error)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_series_csv<R: Read>(input: R) -> Result<TimeSeries, IoError> {
    let mut series = TimeSeries::new();
    for (line, row) in records(input, SERIES_HEADER)? {
        let [t, p_e, norm_error] = parse_row::<3>(&row, line)?;
        if series.samples.last().is_some_and(|s| s.t >= t) {
            return Err(IoError::Parse { line, message: "times must be strictly increasing".into() });
        }
        series.push(Sample { t, p_e, norm_error });
    }
    Ok(series)
}

pub fn write_bath_csv<W: Write>(out: W, bath: &BathSpec) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(BATH_HEADER)?;
    for (i, m) in bath.modes().iter().enumerate() {
        w.write_record([(i + 1).to_string(), fmt_f64(m.omega), fmt_f64(m.gamma)])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a bath dump as a [`BathKind::Custom`] bath.
pub fn read_bath_csv<R: Read>(input: R) -> Result<BathSpec, IoError> {
    let mut modes = Vec::new();
    for (line, row) in records(input, BATH_HEADER)? {
        let index: usize =
            row[0].trim().parse().map_err(|e| IoError::Parse { line, message: format!("index: {e}") })?;
        if index != modes.len() + 1 {
            return Err(IoError::Parse { line, message: format!("expected index {}, found {index}", modes.len() + 1) });
        }
        let omega = parse_f64(&row[1], line)?;
        let gamma = parse_f64(&row[2], line)?;
        modes.push(Mode::new(omega, gamma));
    }
    Ok(BathSpec::new(modes, BathKind::Custom, None)?)
}

pub fn write_snapshot_csv<W: Write>(out: W, bath: &BathSpec, snapshot: &Snapshot) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SNAPSHOT_HEADER)?;
    for (i, (m, p)) in bath.modes().iter().zip(&snapshot.populations).enumerate() {
        w.write_record([(i + 1).to_string(), fmt_f64(m.omega), fmt_f64(m.gamma), fmt_f64(*p)])?;
    }
    w.flush()?;
    Ok(())
}

fn records<R: Read>(input: R, expected: &'static [&'static str]) -> Result<Vec<(u64, csv::StringRecord)>, IoError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = reader.headers()?.clone();
    if header.iter().map(str::trim).ne(expected.iter().copied()) {
        return Err(IoError::Header { found: header.iter().map(String::from).collect(), expected });
    }
    reader
        .records()
        .map(|r| {
            let r = r?;
            let line = r.position().map_or(0, |p| p.line());
            Ok((line, r))
        })
        .collect()
}

fn parse_f64(field: &str, line: u64) -> Result<f64, IoError> {
    field.trim().parse().map_err(|e| IoError::Parse { line, message: format!("{field:?}: {e}") })
}

fn parse_row<const K: usize>(row: &csv::StringRecord, line: u64) -> Result<[f64; K], IoError> {
    let mut out = [0.0; K];
    for (slot, field) in out.iter_mut().zip(row.iter()) {
        *slot = parse_f64(field, line)?;
    }
    Ok(out)
}
