//! Shared domain types: the discretized bath, the single-excitation state and
//! sampled time series.

use std::fmt;

use num_complex::Complex64 as C64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("bath must contain at least one mode")]
    EmptyBath,
    #[error("mode {index}: frequency {omega} is not finite")]
    NonFiniteFrequency { index: usize, omega: f64 },
    #[error("mode {index}: coupling {gamma} must be finite and non-negative")]
    InvalidCoupling { index: usize, gamma: f64 },
}

/// One bath mode: angular frequency ω_i and coupling γ_i to the qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub omega: f64,
    pub gamma: f64,
}

impl Mode {
    pub fn new(omega: f64, gamma: f64) -> Self {
        Self { omega, gamma }
    }
}

/// Which builder produced a bath.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BathKind {
    TransmissionLine,
    JjArray,
    UniformTls,
    DegenerateTls,
    Custom,
}

impl BathKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BathKind::TransmissionLine => "line",
            BathKind::JjArray => "jj_array",
            BathKind::UniformTls => "uniform",
            BathKind::DegenerateTls => "degenerate",
            BathKind::Custom => "custom",
        }
    }
}

impl fmt::Display for BathKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An immutable list of bath modes plus where it came from.
///
/// Modes with ω_i ≤ 0 are accepted (the detuned builder produces them for
/// r ≥ 1) but recorded in [`BathSpec::warnings`].
#[derive(Debug, Clone, PartialEq)]
pub struct BathSpec {
    modes: Vec<Mode>,
    kind: BathKind,
    seed: Option<u64>,
    warnings: Vec<String>,
}

impl BathSpec {
    pub fn new(modes: Vec<Mode>, kind: BathKind, seed: Option<u64>) -> Result<Self, ModelError> {
        if modes.is_empty() {
            return Err(ModelError::EmptyBath);
        }
        let mut non_positive = 0usize;
        for (i, m) in modes.iter().enumerate() {
            if !m.omega.is_finite() {
                return Err(ModelError::NonFiniteFrequency { index: i + 1, omega: m.omega });
            }
            if !(m.gamma >= 0.0 && m.gamma.is_finite()) {
                return Err(ModelError::InvalidCoupling { index: i + 1, gamma: m.gamma });
            }
            if m.omega <= 0.0 {
                non_positive += 1;
            }
        }
        let mut warnings = Vec::new();
        if non_positive > 0 {
            warnings.push(format!("{non_positive} of {} modes have non-positive frequency", modes.len()));
        }
        Ok(Self { modes, kind, seed, warnings })
    }

    pub(crate) fn with_warning(mut self, warning: impl Into<String>) -> Self {
        self.warnings.push(warning.into());
        self
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn kind(&self) -> BathKind {
        self.kind
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn frequencies(&self) -> impl Iterator<Item = f64> + '_ {
        self.modes.iter().map(|m| m.omega)
    }

    pub fn couplings(&self) -> impl Iterator<Item = f64> + '_ {
        self.modes.iter().map(|m| m.gamma)
    }
}

/// Collective coupling Λ₀ = sqrt(Σ γ_i²).
///
/// The squares are summed in ascending order, so the result does not depend
/// on the order of the mode list.
pub fn lambda0(bath: &BathSpec) -> f64 {
    lambda0_of(bath.modes())
}

pub(crate) fn lambda0_of(modes: &[Mode]) -> f64 {
    let mut squares: Vec<f64> = modes.iter().map(|m| m.gamma * m.gamma).collect();
    squares.sort_by(f64::total_cmp);
    squares.iter().sum::<f64>().sqrt()
}

/// Single-excitation wavefunction at time `t`: index 0 is the excited qubit,
/// index i ≥ 1 an excitation in bath mode i.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeState {
    pub t: f64,
    pub amplitudes: Vec<C64>,
}

impl AmplitudeState {
    /// |0⟩: qubit excited, bath in its ground state.
    pub fn excited_qubit(n_modes: usize) -> Self {
        let mut amplitudes = vec![C64::new(0.0, 0.0); n_modes + 1];
        amplitudes[0] = C64::new(1.0, 0.0);
        Self { t: 0.0, amplitudes }
    }

    pub fn n_modes(&self) -> usize {
        self.amplitudes.len().saturating_sub(1)
    }

    /// Excited-state population p_e = |C₀|².
    pub fn qubit_population(&self) -> f64 {
        self.amplitudes.first().map_or(0.0, |c| c.norm_sqr())
    }
}

/// Σ|C_i|² − 1.
pub fn norm_error(state: &AmplitudeState) -> f64 {
    state.amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>() - 1.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub p_e: f64,
    /// Σ|C_i|² − 1 at this sample; NaN when the engine does not track the
    /// bath amplitudes.
    pub norm_error: f64,
}

/// Bath populations |C_i|², i = 1…N, at a recorded time.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub populations: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TimeSeries {
    pub samples: Vec<Sample>,
    pub snapshots: Vec<Snapshot>,
}

impl TimeSeries {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, sample: Sample) {
        debug_assert!(self.samples.last().is_none_or(|s| s.t < sample.t), "sample times must be strictly increasing");
        self.samples.push(sample);
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn populations(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.p_e).collect()
    }

    /// Largest |norm_error| over the samples, ignoring NaN entries.
    pub fn max_norm_error(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_error.abs()).filter(|e| !e.is_nan()).fold(0.0, f64::max)
    }

    /// Samples with t_lo ≤ t ≤ t_hi, snapshots dropped.
    pub fn window(&self, t_lo: f64, t_hi: f64) -> TimeSeries {
        TimeSeries {
            samples: self.samples.iter().copied().filter(|s| s.t >= t_lo && s.t <= t_hi).collect(),
            snapshots: Vec::new(),
        }
    }

    pub fn end_time(&self) -> Option<f64> {
        self.samples.last().map(|s| s.t)
    }
}
