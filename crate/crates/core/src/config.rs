//! Run configuration.
//!
//! A flat INI dialect:
//!
//! ```text
//! # comment
//! [section]
//! key = value      # trailing comment
//! ```
//!
//! Numbers are decimal or scientific (`1e-7`, and `1e5` for counts), lists
//! are comma-separated, booleans are `true`/`false`. Keys are case-sensitive;
//! a section or key may appear once. All frequencies are in units of the
//! qubit frequency unless `qubit.omega` says otherwise, times in 1/that unit.
//!
//! | section    | keys                                                        |
//! |------------|-------------------------------------------------------------|
//! | `qubit`    | `omega` (required)                                          |
//! | `circuit`  | `L`, `C`, `Cg`, `N`, `termination` = open/short/load, `load_re`, `load_im` |
//! | `bath`     | `kind` = line/jj_array/uniform/degenerate, then per kind:   |
//! |            | line: `delta_omega`, `g`, `n_modes`                         |
//! |            | jj_array: `g`, `max_modes` (default `circuit.N`)            |
//! |            | uniform: `n_tls`, `gamma0` xor `gamma_max`, `omega_min` (0), `omega_max` (2Ω), `seed` (0) |
//! |            | degenerate: `n_tls`, `r`, `lambda0`, `seed` (0)             |
//! | `engine`   | `t_max`, `dt` = auto or step, `engine` = direct/kernel, `sample_stride` (1), `snapshot_times`, `norm_tolerance` (1e-7) |
//! | `analysis` | `fit_p_hi` (0.1), `fit_p_lo` (1e-7), `revival_floor_factor` (1e6), `plateau_t_lo`, `plateau_t_hi` (second half of the run) |
//! | `output`   | `directory` (out), `emit_bath_dump` (false), `emit_impedance_sweep` (false), `impedance_omega_min`, `impedance_omega_max`, `impedance_points` (10000), `dispersion_modes` (20) |
//!
//! `bath` and `engine` come together; `jj_array` needs `circuit`.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::bath::CouplingScale;
use crate::circuit::Termination;
use crate::dynamics::{TimeStep, DEFAULT_NORM_TOLERANCE};

pub const DEFAULT_FLOOR_FACTOR: f64 = 1e6;
pub const DEFAULT_IMPEDANCE_POINTS: usize = 10_000;
pub const DEFAULT_DISPERSION_MODES: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("syntax error on line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("missing `{0}`")]
    Missing(String),
    #[error("invalid value for `{path}`: {message}")]
    Domain { path: String, message: String },
    #[error("conflicting keys `{0}` and `{1}`: set only one")]
    Exclusive(String, String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitConfig {
    pub l: f64,
    pub c: f64,
    pub cg: f64,
    pub n: usize,
    pub termination: Termination,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BathConfig {
    Line { delta_omega: f64, g: f64, n_modes: usize },
    JjArray { g: f64, max_modes: usize },
    Uniform { n_tls: usize, omega_min: f64, omega_max: f64, coupling: CouplingScale, seed: u64 },
    Degenerate { n_tls: usize, r: f64, lambda0: f64, seed: u64 },
}

impl BathConfig {
    pub fn kind(&self) -> &'static str {
        match self {
            BathConfig::Line { .. } => "line",
            BathConfig::JjArray { .. } => "jj_array",
            BathConfig::Uniform { .. } => "uniform",
            BathConfig::Degenerate { .. } => "degenerate",
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match *self {
            BathConfig::Uniform { seed, .. } | BathConfig::Degenerate { seed, .. } => Some(seed),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineKind {
    Direct,
    Kernel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EngineSection {
    pub engine: EngineKind,
    pub dt: TimeStep,
    pub t_max: f64,
    pub sample_stride: usize,
    pub snapshot_times: Vec<f64>,
    pub norm_tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisConfig {
    pub fit_p_hi: f64,
    pub fit_p_lo: f64,
    pub revival_floor_factor: f64,
    pub plateau_window: Option<(f64, f64)>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self { fit_p_hi: 0.1, fit_p_lo: 1e-7, revival_floor_factor: DEFAULT_FLOOR_FACTOR, plateau_window: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImpedanceRange {
    pub omega_min: f64,
    pub omega_max: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub directory: String,
    pub emit_bath_dump: bool,
    pub emit_impedance_sweep: bool,
    pub impedance: Option<ImpedanceRange>,
    pub dispersion_modes: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: "out".into(),
            emit_bath_dump: false,
            emit_impedance_sweep: false,
            impedance: None,
            dispersion_modes: DEFAULT_DISPERSION_MODES,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub omega: f64,
    pub circuit: Option<CircuitConfig>,
    pub bath: Option<BathConfig>,
    pub engine: Option<EngineSection>,
    pub analysis: AnalysisConfig,
    pub output: OutputConfig,
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    resolve(Raw::parse(text)?)
}

impl RunConfig {
    /// Copy with one `section.key` replaced, re-validated as a whole.
    pub fn with_override(&self, path: &str, value: &str) -> Result<RunConfig, ConfigError> {
        let (section, key) = path
            .split_once('.')
            .ok_or_else(|| ConfigError::Domain { path: path.into(), message: "expected section.key".into() })?;
        let mut raw = Raw::parse(&self.to_string())?;
        raw.set(section, key, value);
        resolve(raw)
    }

    /// Copy with the bath seed replaced; a no-op for deterministic baths.
    pub fn with_seed(&self, seed: u64) -> RunConfig {
        let mut out = self.clone();
        if let Some(BathConfig::Uniform { seed: s, .. } | BathConfig::Degenerate { seed: s, .. }) = &mut out.bath {
            *s = seed;
        }
        out
    }

    /// Plateau averaging window, defaulting to the second half of the run.
    pub fn plateau_window(&self) -> Option<(f64, f64)> {
        self.analysis.plateau_window.or_else(|| self.engine.as_ref().map(|e| (0.5 * e.t_max, e.t_max)))
    }
}

/// Serializes with every default written out.
impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        let _ = writeln!(s, "[qubit]\nomega = {:?}", self.omega);
        if let Some(c) = &self.circuit {
            let _ = writeln!(s, "\n[circuit]\nL = {:?}\nC = {:?}\nCg = {:?}\nN = {}", c.l, c.c, c.cg, c.n);
            match c.termination {
                Termination::Open => s.push_str("termination = open\n"),
                Termination::Short => s.push_str("termination = short\n"),
                Termination::Load(z) => {
                    let _ = writeln!(s, "termination = load\nload_re = {:?}\nload_im = {:?}", z.re, z.im);
                }
            }
        }
        if let Some(b) = &self.bath {
            let _ = writeln!(s, "\n[bath]\nkind = {}", b.kind());
            let _ = match *b {
                BathConfig::Line { delta_omega, g, n_modes } => {
                    writeln!(s, "delta_omega = {delta_omega:?}\ng = {g:?}\nn_modes = {n_modes}")
                }
                BathConfig::JjArray { g, max_modes } => writeln!(s, "g = {g:?}\nmax_modes = {max_modes}"),
                BathConfig::Uniform { n_tls, omega_min, omega_max, coupling, seed } => {
                    let coupling = match coupling {
                        CouplingScale::DecayRate(v) => format!("gamma0 = {v:?}"),
                        CouplingScale::MaxCoupling(v) => format!("gamma_max = {v:?}"),
                    };
                    writeln!(s, "n_tls = {n_tls}\n{coupling}\nomega_min = {omega_min:?}\nomega_max = {omega_max:?}\nseed = {seed}")
                }
                BathConfig::Degenerate { n_tls, r, lambda0, seed } => {
                    writeln!(s, "n_tls = {n_tls}\nr = {r:?}\nlambda0 = {lambda0:?}\nseed = {seed}")
                }
            };
        }
        if let Some(e) = &self.engine {
            let engine = match e.engine {
                EngineKind::Direct => "direct",
                EngineKind::Kernel => "kernel",
            };
            let dt = match e.dt {
                TimeStep::Auto => "auto".to_string(),
                TimeStep::Fixed(dt) => format!("{dt:?}"),
            };
            let snaps: Vec<String> = e.snapshot_times.iter().map(|t| format!("{t:?}")).collect();
            let _ = writeln!(
                s,
                "\n[engine]\nengine = {engine}\nt_max = {:?}\ndt = {dt}\nsample_stride = {}\nsnapshot_times = {}\nnorm_tolerance = {:?}",
                e.t_max,
                e.sample_stride,
                snaps.join(", "),
                e.norm_tolerance
            );
        }
        let a = &self.analysis;
        let _ = writeln!(
            s,
            "\n[analysis]\nfit_p_hi = {:?}\nfit_p_lo = {:?}\nrevival_floor_factor = {:?}",
            a.fit_p_hi, a.fit_p_lo, a.revival_floor_factor
        );
        if let Some((lo, hi)) = a.plateau_window {
            let _ = writeln!(s, "plateau_t_lo = {lo:?}\nplateau_t_hi = {hi:?}");
        }
        let o = &self.output;
        let _ = writeln!(
            s,
            "\n[output]\ndirectory = {}\nemit_bath_dump = {}\nemit_impedance_sweep = {}\ndispersion_modes = {}",
            o.directory, o.emit_bath_dump, o.emit_impedance_sweep, o.dispersion_modes
        );
        if let Some(r) = &o.impedance {
            let _ = writeln!(
                s,
                "impedance_omega_min = {:?}\nimpedance_omega_max = {:?}\nimpedance_points = {}",
                r.omega_min, r.omega_max, r.points
            );
        }
        f.write_str(&s)
    }
}

/// Sections in file order, keys with their line numbers.
#[derive(Debug, Default)]
struct Raw {
    sections: BTreeMap<String, BTreeMap<String, (String, usize)>>,
}

const SECTIONS: &[&str] = &["qubit", "circuit", "bath", "engine", "analysis", "output"];

impl Raw {
    fn parse(text: &str) -> Result<Raw, ConfigError> {
        let mut raw = Raw::default();
        let mut current: Option<String> = None;
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let syntax = |message: String| ConfigError::Syntax { line: line_no, message };
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| syntax(format!("unterminated section header `{line}`")))?
                    .trim();
                if !SECTIONS.contains(&name) {
                    return Err(ConfigError::UnknownKey(name.into()));
                }
                if raw.sections.contains_key(name) {
                    return Err(syntax(format!("section [{name}] repeated")));
                }
                raw.sections.insert(name.into(), BTreeMap::new());
                current = Some(name.into());
                continue;
            }
            let (key, value) =
                line.split_once('=').ok_or_else(|| syntax(format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || key.contains(char::is_whitespace) {
                return Err(syntax(format!("bad key `{key}`")));
            }
            let section = current.as_ref().ok_or_else(|| syntax(format!("`{key}` appears before any section")))?;
            let entries = raw.sections.get_mut(section).expect("current section exists");
            if entries.insert(key.into(), (value.into(), line_no)).is_some() {
                return Err(syntax(format!("`{section}.{key}` repeated")));
            }
        }
        Ok(raw)
    }

    fn set(&mut self, section: &str, key: &str, value: &str) {
        self.sections.entry(section.into()).or_default().insert(key.into(), (value.into(), 0));
    }

    fn take(&mut self, name: &str) -> Option<Section> {
        self.sections.remove(name).map(|entries| Section { name: name.into(), entries })
    }
}

struct Section {
    name: String,
    entries: BTreeMap<String, (String, usize)>,
}

impl Section {
    fn path(&self, key: &str) -> String {
        format!("{}.{key}", self.name)
    }

    fn only(&self, allowed: &[&str]) -> Result<(), ConfigError> {
        match self.entries.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(ConfigError::UnknownKey(self.path(k))),
            None => Ok(()),
        }
    }

    fn has(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    fn str(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    fn domain(&self, key: &str, message: impl Into<String>) -> ConfigError {
        ConfigError::Domain { path: self.path(key), message: message.into() }
    }

    fn required<T>(
        &self,
        key: &str,
        parse: impl Fn(&Self, &str) -> Result<Option<T>, ConfigError>,
    ) -> Result<T, ConfigError> {
        parse(self, key)?.ok_or_else(|| ConfigError::Missing(self.path(key)))
    }

    fn f64(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.str(key)
            .map(|v| {
                let x: f64 = v.parse().map_err(|_| self.domain(key, format!("`{v}` is not a number")))?;
                if x.is_finite() {
                    Ok(x)
                } else {
                    Err(self.domain(key, "must be finite"))
                }
            })
            .transpose()
    }

    fn positive(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.f64(key)? {
            Some(x) if x <= 0.0 => Err(self.domain(key, format!("must be positive, got {x}"))),
            other => Ok(other),
        }
    }

    fn non_negative(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.f64(key)? {
            Some(x) if x < 0.0 => Err(self.domain(key, format!("must be non-negative, got {x}"))),
            other => Ok(other),
        }
    }

    /// Integer count; scientific notation allowed when exact.
    fn count(&self, key: &str) -> Result<Option<usize>, ConfigError> {
        self.str(key)
            .map(|v| {
                if let Ok(n) = v.parse::<usize>() {
                    return Ok(n);
                }
                match v.parse::<f64>() {
                    Ok(x) if x >= 0.0 && x.fract() == 0.0 && x < 2f64.powi(53) => Ok(x as usize),
                    _ => Err(self.domain(key, format!("`{v}` is not a non-negative integer"))),
                }
            })
            .transpose()
    }

    fn positive_count(&self, key: &str) -> Result<Option<usize>, ConfigError> {
        match self.count(key)? {
            Some(0) => Err(self.domain(key, "must be at least 1")),
            other => Ok(other),
        }
    }

    fn u64(&self, key: &str) -> Result<Option<u64>, ConfigError> {
        self.str(key)
            .map(|v| v.parse().map_err(|_| self.domain(key, format!("`{v}` is not an unsigned 64-bit integer"))))
            .transpose()
    }

    fn bool(&self, key: &str) -> Result<Option<bool>, ConfigError> {
        self.str(key)
            .map(|v| match v {
                "true" => Ok(true),
                "false" => Ok(false),
                _ => Err(self.domain(key, format!("expected true or false, got `{v}`"))),
            })
            .transpose()
    }

    fn list(&self, key: &str) -> Result<Vec<f64>, ConfigError> {
        let Some(v) = self.str(key) else { return Ok(Vec::new()) };
        v.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| match s.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(x),
                _ => Err(self.domain(key, format!("`{s}` is not a number"))),
            })
            .collect()
    }
}

fn resolve(mut raw: Raw) -> Result<RunConfig, ConfigError> {
    let qubit = raw.take("qubit").ok_or_else(|| ConfigError::Missing("qubit".into()))?;
    qubit.only(&["omega"])?;
    let omega = qubit.required("omega", Section::positive)?;

    let circuit = raw.take("circuit").map(|s| resolve_circuit(&s)).transpose()?;
    let bath = raw.take("bath").map(|s| resolve_bath(&s, omega, circuit.as_ref())).transpose()?;
    let engine = raw.take("engine").map(|s| resolve_engine(&s)).transpose()?;
    match (&bath, &engine) {
        (Some(_), None) => return Err(ConfigError::Missing("engine".into())),
        (None, Some(_)) => return Err(ConfigError::Missing("bath".into())),
        _ => {}
    }
    let analysis = raw.take("analysis").map(|s| resolve_analysis(&s)).transpose()?.unwrap_or_default();
    if let (Some((_, hi)), Some(e)) = (analysis.plateau_window, &engine) {
        if hi > e.t_max {
            return Err(ConfigError::Domain {
                path: "analysis.plateau_t_hi".into(),
                message: format!("exceeds engine.t_max = {}", e.t_max),
            });
        }
    }
    let output = raw.take("output").map(|s| resolve_output(&s)).transpose()?.unwrap_or_default();
    Ok(RunConfig { omega, circuit, bath, engine, analysis, output })
}

fn resolve_circuit(s: &Section) -> Result<CircuitConfig, ConfigError> {
    s.only(&["L", "C", "Cg", "N", "termination", "load_re", "load_im"])?;
    let l = s.required("L", Section::positive)?;
    let c = s.required("C", Section::non_negative)?;
    let cg = s.required("Cg", Section::positive)?;
    let n = s.required("N", Section::positive_count)?;
    let termination = match s.str("termination").unwrap_or("open") {
        "open" => Termination::Open,
        "short" => Termination::Short,
        "load" => {
            Termination::Load(C64::new(s.required("load_re", Section::f64)?, s.required("load_im", Section::f64)?))
        }
        other => return Err(s.domain("termination", format!("expected open, short or load, got `{other}`"))),
    };
    if !matches!(termination, Termination::Load(_)) {
        if let Some(k) = ["load_re", "load_im"].into_iter().find(|k| s.has(k)) {
            return Err(s.domain(k, "only valid with termination = load"));
        }
    }
    Ok(CircuitConfig { l, c, cg, n, termination })
}

fn resolve_bath(s: &Section, omega: f64, circuit: Option<&CircuitConfig>) -> Result<BathConfig, ConfigError> {
    let kind = s.str("kind").ok_or_else(|| ConfigError::Missing(s.path("kind")))?;
    let bath = match kind {
        "line" => {
            s.only(&["kind", "delta_omega", "g", "n_modes"])?;
            BathConfig::Line {
                delta_omega: s.required("delta_omega", Section::positive)?,
                g: s.required("g", Section::non_negative)?,
                n_modes: s.required("n_modes", Section::positive_count)?,
            }
        }
        "jj_array" => {
            s.only(&["kind", "g", "max_modes"])?;
            let circuit = circuit.ok_or_else(|| ConfigError::Missing("circuit".into()))?;
            BathConfig::JjArray {
                g: s.required("g", Section::non_negative)?,
                max_modes: s.positive_count("max_modes")?.unwrap_or(circuit.n),
            }
        }
        "uniform" => {
            s.only(&["kind", "n_tls", "gamma0", "gamma_max", "omega_min", "omega_max", "seed"])?;
            let coupling = match (s.positive("gamma0")?, s.non_negative("gamma_max")?) {
                (Some(_), Some(_)) => return Err(ConfigError::Exclusive(s.path("gamma0"), s.path("gamma_max"))),
                (Some(rate), None) => CouplingScale::DecayRate(rate),
                (None, Some(g)) => CouplingScale::MaxCoupling(g),
                (None, None) => return Err(ConfigError::Missing(format!("{} or gamma_max", s.path("gamma0")))),
            };
            let omega_min = s.non_negative("omega_min")?.unwrap_or(0.0);
            let omega_max = s.positive("omega_max")?.unwrap_or(2.0 * omega);
            if omega_max <= omega_min {
                return Err(s.domain("omega_max", format!("must exceed omega_min = {omega_min}")));
            }
            BathConfig::Uniform {
                n_tls: s.required("n_tls", Section::positive_count)?,
                omega_min,
                omega_max,
                coupling,
                seed: s.u64("seed")?.unwrap_or(0),
            }
        }
        "degenerate" => {
            s.only(&["kind", "n_tls", "r", "lambda0", "seed"])?;
            BathConfig::Degenerate {
                n_tls: s.required("n_tls", Section::positive_count)?,
                r: s.required("r", Section::f64)?,
                lambda0: s.required("lambda0", Section::positive)?,
                seed: s.u64("seed")?.unwrap_or(0),
            }
        }
        other => return Err(s.domain("kind", format!("expected line, jj_array, uniform or degenerate, got `{other}`"))),
    };
    Ok(bath)
}

fn resolve_engine(s: &Section) -> Result<EngineSection, ConfigError> {
    s.only(&["engine", "dt", "t_max", "sample_stride", "snapshot_times", "norm_tolerance"])?;
    let engine = match s.str("engine").unwrap_or("direct") {
        "direct" => EngineKind::Direct,
        "kernel" => EngineKind::Kernel,
        other => return Err(s.domain("engine", format!("expected direct or kernel, got `{other}`"))),
    };
    let dt = match s.str("dt") {
        None | Some("auto") => TimeStep::Auto,
        Some(_) => TimeStep::Fixed(s.required("dt", Section::positive)?),
    };
    let t_max = s.required("t_max", Section::positive)?;
    let snapshot_times = s.list("snapshot_times")?;
    if let Some(t) = snapshot_times.iter().find(|t| !(**t >= 0.0 && **t <= t_max)) {
        return Err(s.domain("snapshot_times", format!("{t} lies outside [0, t_max]")));
    }
    Ok(EngineSection {
        engine,
        dt,
        t_max,
        sample_stride: s.positive_count("sample_stride")?.unwrap_or(1),
        snapshot_times,
        norm_tolerance: s.positive("norm_tolerance")?.unwrap_or(DEFAULT_NORM_TOLERANCE),
    })
}

fn resolve_analysis(s: &Section) -> Result<AnalysisConfig, ConfigError> {
    s.only(&["fit_p_hi", "fit_p_lo", "revival_floor_factor", "plateau_t_lo", "plateau_t_hi"])?;
    let d = AnalysisConfig::default();
    let fit_p_hi = s.positive("fit_p_hi")?.unwrap_or(d.fit_p_hi);
    let fit_p_lo = s.positive("fit_p_lo")?.unwrap_or(d.fit_p_lo);
    if fit_p_lo >= fit_p_hi {
        return Err(s.domain("fit_p_lo", format!("must be below fit_p_hi = {fit_p_hi}")));
    }
    let revival_floor_factor = s.f64("revival_floor_factor")?.unwrap_or(d.revival_floor_factor);
    if revival_floor_factor <= 1.0 {
        return Err(s.domain("revival_floor_factor", "must exceed 1"));
    }
    let plateau_window = match (s.non_negative("plateau_t_lo")?, s.positive("plateau_t_hi")?) {
        (Some(lo), Some(hi)) if lo < hi => Some((lo, hi)),
        (Some(_), Some(_)) => return Err(s.domain("plateau_t_hi", "must exceed plateau_t_lo")),
        (None, None) => None,
        (Some(_), None) => return Err(ConfigError::Missing(s.path("plateau_t_hi"))),
        (None, Some(_)) => return Err(ConfigError::Missing(s.path("plateau_t_lo"))),
    };
    Ok(AnalysisConfig { fit_p_hi, fit_p_lo, revival_floor_factor, plateau_window })
}

fn resolve_output(s: &Section) -> Result<OutputConfig, ConfigError> {
    s.only(&[
        "directory",
        "emit_bath_dump",
        "emit_impedance_sweep",
        "impedance_omega_min",
        "impedance_omega_max",
        "impedance_points",
        "dispersion_modes",
    ])?;
    let d = OutputConfig::default();
    let impedance = match (s.positive("impedance_omega_min")?, s.positive("impedance_omega_max")?) {
        (Some(lo), Some(hi)) if lo < hi => Some(ImpedanceRange {
            omega_min: lo,
            omega_max: hi,
            points: s.count("impedance_points")?.unwrap_or(DEFAULT_IMPEDANCE_POINTS),
        }),
        (Some(_), Some(_)) => return Err(s.domain("impedance_omega_max", "must exceed impedance_omega_min")),
        (None, None) => None,
        (Some(_), None) => return Err(ConfigError::Missing(s.path("impedance_omega_max"))),
        (None, Some(_)) => return Err(ConfigError::Missing(s.path("impedance_omega_min"))),
    };
    if impedance.is_some_and(|r| r.points < 2) {
        return Err(s.domain("impedance_points", "must be at least 2"));
    }
    let emit_impedance_sweep = s.bool("emit_impedance_sweep")?.unwrap_or(false);
    if emit_impedance_sweep && impedance.is_none() {
        return Err(ConfigError::Missing(s.path("impedance_omega_min")));
    }
    let directory = s.str("directory").unwrap_or(&d.directory).to_string();
    if directory.is_empty() {
        return Err(s.domain("directory", "must not be empty"));
    }
    Ok(OutputConfig {
        directory,
        emit_bath_dump: s.bool("emit_bath_dump")?.unwrap_or(false),
        emit_impedance_sweep,
        impedance,
        dispersion_modes: s.count("dispersion_modes")?.unwrap_or(d.dispersion_modes),
    })
}
