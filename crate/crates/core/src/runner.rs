//! Config-driven runs: build, integrate, analyze, write CSVs and a manifest.
//!
//! Every run directory holds `manifest.ini`. It is written with
//! `status = pending` before any work and rewritten at the end with the exit
//! status, derived quantities, analysis report, warnings and a SHA-256 for
//! each file the run produced.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::analytics::{self, Report};
use crate::bath::{self, DegenerateTlsParams, TransmissionLineParams, UniformTlsParams, GENERATOR};
use crate::circuit::{self, CircuitSpec, DispersionTable};
use crate::config::{BathConfig, ConfigError, EngineKind, RunConfig};
use crate::dynamics::{self, EngineConfig, EngineError};
use crate::io::{self, fmt_f64};
use crate::model::{lambda0, BathSpec, TimeSeries};
use crate::units::QubitSpec;

pub const MANIFEST: &str = "manifest.ini";
pub const SERIES_FILE: &str = "series.csv";
pub const SWEEP_SUMMARY: &str = "summary.csv";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExitStatus {
    Success = 0,
    ConfigError = 1,
    NumericalFailure = 2,
    IoError = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }

    fn label(self) -> &'static str {
        match self {
            ExitStatus::Success => "ok",
            ExitStatus::ConfigError => "config_error",
            ExitStatus::NumericalFailure => "numerical_failure",
            ExitStatus::IoError => "io_error",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pipeline {
    Impedance,
    Dispersion,
    Evolve,
}

impl Pipeline {
    fn label(self) -> &'static str {
        match self {
            Pipeline::Impedance => "impedance",
            Pipeline::Dispersion => "dispersion",
            Pipeline::Evolve => "evolve",
        }
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Setup(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Format(#[from] io::IoError),
}

impl RunError {
    pub fn status(&self) -> ExitStatus {
        match self {
            RunError::Config(_) | RunError::Setup(_) => ExitStatus::ConfigError,
            RunError::Engine(EngineError::InvalidConfig(_)) => ExitStatus::ConfigError,
            RunError::Engine(_) => ExitStatus::NumericalFailure,
            RunError::Io(_) | RunError::Csv(_) | RunError::Format(_) => ExitStatus::IoError,
        }
    }
}

/// Closed-form expectations for a bath, where a law applies.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Predictions {
    pub lambda0: Option<f64>,
    pub gamma: Option<f64>,
    pub revival_time: Option<f64>,
    pub plateau: Option<f64>,
}

/// Estimates extracted from a simulated series.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Measurements {
    pub gamma_fit: Option<f64>,
    pub fit_r_squared: Option<f64>,
    pub revival_time: Option<f64>,
    pub plateau_mean: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub status: ExitStatus,
    pub directory: PathBuf,
    pub measurements: Measurements,
    pub report: Report,
    pub message: Option<String>,
}

pub fn predict(config: &RunConfig, bath: &BathSpec) -> Predictions {
    let omega = config.omega;
    let l0 = lambda0(bath);
    let mut p = Predictions { lambda0: Some(l0), ..Predictions::default() };
    match config.bath {
        Some(BathConfig::Line { delta_omega, g, .. }) => {
            p.gamma = Some(analytics::decay_rate_line(g, omega, delta_omega));
            p.revival_time = Some(analytics::revival_time(delta_omega));
        }
        Some(BathConfig::Uniform { n_tls, omega_min, omega_max, .. }) => {
            let nu0 = n_tls as f64 / (omega_max - omega_min);
            let gamma0 = analytics::decay_rate_tls(nu0, l0, n_tls);
            p.gamma = Some(gamma0);
            if gamma0 > 0.0 {
                p.plateau = Some(analytics::long_time_plateau(omega, n_tls, gamma0));
            }
        }
        _ => {}
    }
    p
}

/// Fit, revival and plateau estimates with the configured windows.
pub fn analyze(series: &TimeSeries, config: &RunConfig) -> Measurements {
    let a = &config.analysis;
    let fit = analytics::fit_exponential(series, a.fit_p_hi, a.fit_p_lo).ok();
    let plateau_mean = config.plateau_window().and_then(|(lo, hi)| {
        let end = series.end_time()?;
        analytics::time_average(series, lo, hi.min(end)).ok()
    });
    Measurements {
        gamma_fit: fit.map(|f| f.gamma_fit),
        fit_r_squared: fit.map(|f| f.r_squared),
        revival_time: analytics::detect_revival(series, a.revival_floor_factor),
        plateau_mean,
    }
}

pub fn build_report(predictions: &Predictions, measured: &Measurements, series: &TimeSeries) -> Report {
    let mut r = Report::default();
    if let Some(l0) = predictions.lambda0 {
        r.push("lambda0", fmt_f64(l0));
    }
    r.compare("gamma", predictions.gamma, measured.gamma_fit);
    r.push("fit_r_squared", measured.fit_r_squared.map_or("none".into(), fmt_f64));
    r.compare("revival_time", predictions.revival_time, measured.revival_time);
    r.compare("plateau", predictions.plateau, measured.plateau_mean);
    r.push("samples", series.len());
    r.push("end_time", series.end_time().map_or("none".into(), fmt_f64));
    r.push("max_norm_error", fmt_f64(series.max_norm_error()));
    r
}

pub fn circuit_spec(config: &RunConfig) -> Result<CircuitSpec, RunError> {
    let c = config.circuit.ok_or_else(|| ConfigError::Missing("circuit".into()))?;
    CircuitSpec::new(c.l, c.c, c.cg, c.n, c.termination).map_err(|e| RunError::Setup(e.to_string()))
}

pub fn build_bath(config: &RunConfig) -> Result<BathSpec, RunError> {
    let spec = config.bath.ok_or_else(|| ConfigError::Missing("bath".into()))?;
    let built = match spec {
        BathConfig::Line { delta_omega, g, n_modes } => {
            bath::build_transmission_line_bath(&TransmissionLineParams { delta_omega, g, n_modes })
        }
        BathConfig::JjArray { g, max_modes } => bath::build_jj_array_bath(&circuit_spec(config)?, g, max_modes),
        BathConfig::Uniform { n_tls, omega_min, omega_max, coupling, seed } => {
            bath::build_uniform_tls_bath(&UniformTlsParams { n_tls, omega_min, omega_max, coupling, seed })
        }
        BathConfig::Degenerate { n_tls, r, lambda0, seed } => {
            bath::build_degenerate_tls_bath(&DegenerateTlsParams { n_tls, r, lambda0, omega_q: config.omega, seed })
        }
    };
    built.map_err(|e| RunError::Setup(e.to_string()))
}

pub fn engine_config(config: &RunConfig) -> Result<EngineConfig, RunError> {
    let e = config.engine.as_ref().ok_or_else(|| ConfigError::Missing("engine".into()))?;
    Ok(EngineConfig {
        dt: e.dt,
        t_max: e.t_max,
        sample_stride: e.sample_stride,
        snapshot_times: e.snapshot_times.clone(),
        norm_tolerance: e.norm_tolerance,
    })
}

struct RunDir {
    path: PathBuf,
    files: Vec<(String, String)>,
}

impl RunDir {
    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), RunError> {
        fs::write(self.path.join(name), bytes)?;
        self.files.push((name.into(), hex::encode(Sha256::digest(bytes))));
        Ok(())
    }
}

#[derive(Default)]
struct Partial {
    derived: Vec<(String, String)>,
    report: Report,
    measurements: Measurements,
    warnings: Vec<String>,
    partial_output: bool,
}

/// Runs `pipeline` into `config.output.directory`.
pub fn run(config: &RunConfig, pipeline: Pipeline) -> RunOutcome {
    run_in(config, pipeline, Path::new(&config.output.directory))
}

/// Runs `pipeline` into `dir`, ignoring `config.output.directory`.
pub fn run_in(config: &RunConfig, pipeline: Pipeline, dir: &Path) -> RunOutcome {
    let started = Instant::now();
    let mut out = RunDir { path: dir.to_path_buf(), files: Vec::new() };
    let mut partial = Partial::default();
    let header = |status: &str, code: Option<i32>, duration: Option<f64>| {
        let mut h = vec![
            ("tool".to_string(), format!("heatbath {}", env!("CARGO_PKG_VERSION"))),
            ("pipeline".to_string(), pipeline.label().to_string()),
            ("status".to_string(), status.to_string()),
        ];
        if let Some(code) = code {
            h.push(("exit_code".into(), code.to_string()));
        }
        h.push(("seed".into(), partial_seed(config)));
        h.push(("generator".into(), GENERATOR.into()));
        if let Some(d) = duration {
            h.push(("duration_seconds".into(), format!("{d:.3}")));
        }
        h
    };

    let pending = fs::create_dir_all(dir).and_then(|_| {
        let text = render_manifest(&header("pending", None, None), &Partial::default(), &[], config);
        fs::write(dir.join(MANIFEST), text)
    });
    if let Err(e) = pending {
        return RunOutcome {
            status: ExitStatus::IoError,
            directory: dir.into(),
            measurements: Measurements::default(),
            report: Report::default(),
            message: Some(format!("{}: {e}", dir.display())),
        };
    }

    let result = match pipeline {
        Pipeline::Impedance => impedance(config, &mut out),
        Pipeline::Dispersion => dispersion(config, &mut out),
        Pipeline::Evolve => evolve(config, &mut out, &mut partial),
    };
    let (status, message) = match &result {
        Ok(()) => (ExitStatus::Success, None),
        Err(e) => (e.status(), Some(e.to_string())),
    };
    let mut head = header(status.label(), Some(status.code()), Some(started.elapsed().as_secs_f64()));
    head.push(("partial_output".into(), partial.partial_output.to_string()));
    if let Some(m) = &message {
        head.push(("message".into(), m.replace('\n', " ")));
    }
    let text = render_manifest(&head, &partial, &out.files, config);
    let status = match fs::write(dir.join(MANIFEST), text) {
        Ok(()) => status,
        Err(_) => ExitStatus::IoError,
    };
    RunOutcome { status, directory: dir.into(), measurements: partial.measurements, report: partial.report, message }
}

fn partial_seed(config: &RunConfig) -> String {
    config.bath.and_then(|b| b.seed()).map_or("none".into(), |s| s.to_string())
}

fn render_manifest(head: &[(String, String)], p: &Partial, files: &[(String, String)], config: &RunConfig) -> String {
    let mut s = String::from("[run]\n");
    let mut section = |name: &str, entries: &[(String, String)]| {
        if !name.is_empty() {
            s.push_str(&format!("\n[{name}]\n"));
        }
        for (k, v) in entries {
            s.push_str(&format!("{k} = {v}\n"));
        }
    };
    section("", head);
    section("derived", &p.derived);
    section("report", &p.report.entries);
    let warnings: Vec<(String, String)> =
        p.warnings.iter().enumerate().map(|(i, w)| ((i + 1).to_string(), w.clone())).collect();
    section("warnings", &warnings);
    section("files", files);
    for line in config.to_string().lines() {
        match line.strip_prefix('[') {
            Some(rest) => s.push_str(&format!("[config.{rest}\n")),
            None => {
                s.push_str(line);
                s.push('\n');
            }
        }
    }
    s
}

/// `(file, sha256)` pairs listed in a manifest.
pub fn manifest_files(text: &str) -> Vec<(String, String)> {
    let mut in_files = false;
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.starts_with('[') {
            in_files = line == "[files]";
        } else if in_files {
            if let Some((k, v)) = line.split_once('=') {
                out.push((k.trim().to_string(), v.trim().to_string()));
            }
        }
    }
    out
}

/// Re-hashes every file listed in `dir/manifest.ini`; returns the mismatches.
pub fn verify_manifest(dir: &Path) -> std::io::Result<Vec<String>> {
    let text = fs::read_to_string(dir.join(MANIFEST))?;
    let mut bad = Vec::new();
    for (name, hash) in manifest_files(&text) {
        let bytes = fs::read(dir.join(&name))?;
        if hex::encode(Sha256::digest(&bytes)) != hash {
            bad.push(name);
        }
    }
    Ok(bad)
}

fn impedance(config: &RunConfig, out: &mut RunDir) -> Result<(), RunError> {
    let spec = circuit_spec(config)?;
    write_impedance(config, &spec, out)
}

fn write_impedance(config: &RunConfig, spec: &CircuitSpec, out: &mut RunDir) -> Result<(), RunError> {
    let range = config.output.impedance.ok_or_else(|| ConfigError::Missing("output.impedance_omega_min".into()))?;
    let sweep = circuit::impedance_sweep(spec, range.omega_min, range.omega_max, range.points)
        .map_err(|e| RunError::Setup(e.to_string()))?;
    let mut buf = Vec::new();
    circuit::write_impedance_csv(&mut buf, &sweep, 1.0)?;
    out.write("impedance.csv", &buf)
}

fn dispersion(config: &RunConfig, out: &mut RunDir) -> Result<(), RunError> {
    let spec = circuit_spec(config)?;
    let n = config.output.dispersion_modes.min(spec.n());
    let table = DispersionTable::new(&spec, n).map_err(|e| RunError::Setup(e.to_string()))?;
    let mut buf = Vec::new();
    table.write_csv(&mut buf, 1.0)?;
    out.write("dispersion.csv", &buf)
}

fn evolve(config: &RunConfig, out: &mut RunDir, partial: &mut Partial) -> Result<(), RunError> {
    let qubit = QubitSpec::new(config.omega).map_err(|e| RunError::Setup(e.to_string()))?;
    let bath = build_bath(config)?;
    let engine_cfg = engine_config(config)?;
    let kind = config.engine.as_ref().map_or(EngineKind::Direct, |e| e.engine);
    partial.warnings.extend(bath.warnings().iter().cloned());
    if kind == EngineKind::Kernel && !engine_cfg.snapshot_times.is_empty() {
        partial.warnings.push("the kernel engine has no bath amplitudes; snapshot_times ignored".into());
    }

    let predictions = predict(config, &bath);
    let dt = dynamics::resolve_dt(&qubit, &bath, &engine_cfg);
    partial.derived = vec![
        ("modes".into(), bath.len().to_string()),
        ("dt".into(), fmt_f64(dt)),
        ("steps".into(), engine_cfg.step_count(dt).to_string()),
    ];
    let show = |v: Option<f64>| v.map_or_else(|| "none".to_string(), fmt_f64);
    partial.derived.push(("lambda0".into(), show(predictions.lambda0)));
    partial.derived.push(("predicted_gamma".into(), show(predictions.gamma)));
    partial.derived.push(("predicted_revival_time".into(), show(predictions.revival_time)));
    partial.derived.push(("predicted_plateau".into(), show(predictions.plateau)));

    if config.output.emit_impedance_sweep {
        write_impedance(config, &circuit_spec(config)?, out)?;
    }
    if config.output.emit_bath_dump {
        let mut buf = Vec::new();
        io::write_bath_csv(&mut buf, &bath)?;
        out.write("bath.csv", &buf)?;
    }

    let result = match kind {
        EngineKind::Direct => dynamics::evolve(&qubit, &bath, &engine_cfg),
        EngineKind::Kernel => dynamics::evolve_kernel(&qubit, &bath, &engine_cfg),
    };
    let series = match &result {
        Ok(series) => series,
        Err(e) => match e.partial_series() {
            Some(series) => {
                partial.partial_output = true;
                series
            }
            None => return Err(result.unwrap_err().into()),
        },
    };

    let mut buf = Vec::new();
    io::write_series_csv(&mut buf, series)?;
    out.write(SERIES_FILE, &buf)?;
    for (k, snap) in series.snapshots.iter().enumerate() {
        let mut buf = Vec::new();
        io::write_snapshot_csv(&mut buf, &bath, snap)?;
        out.write(&format!("snapshot_{:03}.csv", k + 1), &buf)?;
        partial.derived.push((format!("snapshot_{:03}_t", k + 1), fmt_f64(snap.t)));
    }

    partial.measurements = analyze(series, config);
    partial.report = build_report(&predictions, &partial.measurements, series);
    result.map(|_| ()).map_err(RunError::from)
}

/// One row of a sweep summary.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub value: String,
    pub status: ExitStatus,
    pub measurements: Measurements,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub status: ExitStatus,
    pub rows: Vec<SweepRow>,
}

/// Runs `base` once per value of the `section.key` at `path`, at most `jobs`
/// at a time, each in its own subdirectory of `base.output.directory`.
///
/// `summary.csv` lists `value,gamma_fit,revival_time,plateau_mean,status` in
/// the order of `values`; the overall status is the worst sub-run status.
pub fn sweep(base: &RunConfig, path: &str, values: &[String], jobs: usize, pipeline: Pipeline) -> SweepOutcome {
    let root = PathBuf::from(&base.output.directory);
    let one = |(i, value): (usize, &String)| -> SweepRow {
        let dir = root.join(format!("{:03}_{}", i + 1, sanitize(value)));
        match base.with_override(path, value) {
            Ok(cfg) => {
                let outcome = run_in(&cfg, pipeline, &dir);
                SweepRow { value: value.clone(), status: outcome.status, measurements: outcome.measurements }
            }
            Err(_) => SweepRow {
                value: value.clone(),
                status: ExitStatus::ConfigError,
                measurements: Measurements::default(),
            },
        }
    };
    let rows: Vec<SweepRow> = match rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build() {
        Ok(pool) => pool.install(|| values.par_iter().enumerate().map(one).collect()),
        Err(_) => values.iter().enumerate().map(one).collect(),
    };
    let mut status = rows.iter().map(|r| r.status).max().unwrap_or(ExitStatus::Success);
    if write_summary(&root, &rows).is_err() {
        status = ExitStatus::IoError;
    }
    SweepOutcome { status, rows }
}

fn sanitize(value: &str) -> String {
    value.chars().map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' }).collect()
}

fn write_summary(root: &Path, rows: &[SweepRow]) -> Result<(), RunError> {
    fs::create_dir_all(root)?;
    let mut w = csv::Writer::from_path(root.join(SWEEP_SUMMARY))?;
    w.write_record(["value", "gamma_fit", "revival_time", "plateau_mean", "status"])?;
    let show = |v: Option<f64>| v.map_or_else(|| "none".to_string(), fmt_f64);
    for r in rows {
        let m = &r.measurements;
        w.write_record([
            r.value.clone(),
            show(m.gamma_fit),
            show(m.revival_time),
            show(m.plateau_mean),
            r.status.label().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Analysis report for an existing series, with predictions when a config
/// with a bath is supplied.
pub fn report(series: &TimeSeries, config: Option<&RunConfig>) -> Result<Report, RunError> {
    let default_cfg;
    let cfg = match config {
        Some(c) => c,
        None => {
            default_cfg = RunConfig {
                omega: 1.0,
                circuit: None,
                bath: None,
                engine: None,
                analysis: Default::default(),
                output: Default::default(),
            };
            &default_cfg
        }
    };
    let predictions = match cfg.bath {
        Some(_) => predict(cfg, &build_bath(cfg)?),
        None => Predictions::default(),
    };
    let mut measured = analyze(series, cfg);
    if cfg.engine.is_none() {
        // no run length known: average over the second half of the series
        measured.plateau_mean = match (series.samples.first(), series.end_time()) {
            (Some(first), Some(end)) if end > first.t => {
                analytics::time_average(series, 0.5 * (first.t + end), end).ok()
            }
            _ => None,
        };
    }
    Ok(build_report(&predictions, &measured, series))
}
