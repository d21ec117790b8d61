//! Single-excitation dynamics of a qubit coupled to N bath modes.
//!
//! Two independent engines produce p_e(t) = |C₀(t)|² from the initial state
//! |0⟩ (qubit excited, bath empty):
//!
//! * [`evolve`] integrates the full amplitude vector with fixed-step RK4 in
//!   the frame rotating at the qubit frequency,
//!
//!   ```text
//!   dC₀/dt = −i Σ γ_i C_i
//!   dC_i/dt = −i(ω_i − Ω) C_i − i γ_i C₀
//!   ```
//!
//!   which has the same populations as the interaction picture.
//! * [`evolve_kernel`] eliminates the bath and solves the memory-kernel
//!   equation dC₀/dt = −∫₀ᵗ K(t − t′) C₀(t′) dt′ with
//!   K(τ) = Σ γ_i² e^{i(Ω − ω_i)τ}. It costs O(steps²) and is meant as an
//!   oracle for small runs.

mod direct;
mod kernel;

use std::f64::consts::PI;

use thiserror::Error;

use crate::model::{lambda0, AmplitudeState, BathSpec, TimeSeries};
use crate::units::QubitSpec;

pub use direct::{evolve, DirectEngine};
pub use kernel::{evolve_kernel, MemoryKernel};

/// Minimum RK4 steps per period of the fastest rotation.
pub const STEPS_PER_ROTATION: f64 = 50.0;

/// Lowest frequency scale considered by [`resolve_dt`], in units of Ω.
pub const FREQUENCY_FLOOR: f64 = 1e-3;

pub const DEFAULT_NORM_TOLERANCE: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeStep {
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EngineConfig {
    pub dt: TimeStep,
    pub t_max: f64,
    /// Record a sample every `sample_stride` steps (the last step is always
    /// recorded).
    pub sample_stride: usize,
    /// Bath populations are dumped at the steps nearest to these times.
    pub snapshot_times: Vec<f64>,
    /// Runs abort once |Σ|C_i|² − 1| exceeds this.
    pub norm_tolerance: f64,
}

impl EngineConfig {
    pub fn new(t_max: f64) -> Self {
        Self {
            dt: TimeStep::Auto,
            t_max,
            sample_stride: 1,
            snapshot_times: Vec::new(),
            norm_tolerance: DEFAULT_NORM_TOLERANCE,
        }
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = TimeStep::Fixed(dt);
        self
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.sample_stride = stride;
        self
    }

    pub fn with_snapshots(mut self, times: Vec<f64>) -> Self {
        self.snapshot_times = times;
        self
    }

    pub fn with_norm_tolerance(mut self, tol: f64) -> Self {
        self.norm_tolerance = tol;
        self
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(EngineError::InvalidConfig(format!("t_max must be positive, got {}", self.t_max)));
        }
        if let TimeStep::Fixed(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(EngineError::InvalidConfig(format!("dt must be positive, got {dt}")));
            }
        }
        if self.sample_stride == 0 {
            return Err(EngineError::InvalidConfig("sample_stride must be at least 1".into()));
        }
        if !(self.norm_tolerance > 0.0) {
            return Err(EngineError::InvalidConfig(format!(
                "norm_tolerance must be positive, got {}",
                self.norm_tolerance
            )));
        }
        if let Some(t) = self.snapshot_times.iter().find(|t| !(**t >= 0.0 && **t <= self.t_max)) {
            return Err(EngineError::InvalidConfig(format!("snapshot time {t} outside [0, t_max]")));
        }
        Ok(())
    }

    /// Number of steps of size `dt` needed to reach `t_max`.
    pub fn step_count(&self, dt: f64) -> usize {
        ((self.t_max / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("invalid engine configuration: {0}")]
    InvalidConfig(String),
    #[error("norm drift {norm_error:e} at t = {t} exceeds tolerance")]
    NormDrift { t: f64, norm_error: f64, partial: Box<TimeSeries> },
    #[error("non-finite amplitude at t = {t}")]
    NonFinite { t: f64, partial: Box<TimeSeries> },
}

impl EngineError {
    /// Series recorded before a numerical failure.
    pub fn partial_series(&self) -> Option<&TimeSeries> {
        match self {
            EngineError::NormDrift { partial, .. } | EngineError::NonFinite { partial, .. } => Some(partial),
            EngineError::InvalidConfig(_) => None,
        }
    }
}

/// Time step for a run.
///
/// A fixed step is returned as is. `Auto` takes the smaller of
///
/// * 2π/(50·ω_scale) with ω_scale = max(max_i |Ω − ω_i|, Λ₀, 10⁻³Ω), i.e. at
///   least 50 steps per fastest rotation, and
/// * the step at which RK4's per-step norm loss, at most (hρ)⁶/72 for
///   spectral radius ρ ≤ max_i |Ω − ω_i| + Λ₀, stays below a quarter of
///   `norm_tolerance` over `t_max`.
pub fn resolve_dt(qubit: &QubitSpec, bath: &BathSpec, cfg: &EngineConfig) -> f64 {
    match cfg.dt {
        TimeStep::Fixed(dt) => dt,
        TimeStep::Auto => {
            let omega = qubit.omega();
            let max_detuning = bath.frequencies().map(|w| (omega - w).abs()).fold(0.0, f64::max);
            let l0 = lambda0(bath);
            let scale = max_detuning.max(l0).max(FREQUENCY_FLOOR * omega);
            let rotation_step = 2.0 * PI / scale / STEPS_PER_ROTATION;
            let radius = (max_detuning + l0).max(FREQUENCY_FLOOR * omega);
            let budget = 0.25 * cfg.norm_tolerance;
            let norm_step = (72.0 * budget / (cfg.t_max * radius.powi(6))).powf(0.2);
            rotation_step.min(norm_step)
        }
    }
}

/// |C_i|² for i = 1…N.
pub fn bath_populations(state: &AmplitudeState) -> Vec<f64> {
    state.amplitudes.iter().skip(1).map(|c| c.norm_sqr()).collect()
}
