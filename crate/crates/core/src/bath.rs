//! Seeded construction of the bath families: equally spaced line modes,
//! junction-array modes, a uniformly distributed TLS ensemble and a
//! degenerate (optionally detuned) TLS ensemble.
//!
//! Random builders draw from ChaCha20 seeded with `seed_from_u64`, one fresh
//! stream per call, and map each 64-bit output to `[0, 1)` as
//! `(x >> 11) · 2⁻⁵³`. Draws are consumed in mode order, ω_i before γ_i.
//! The algorithm is part of the reproducibility contract and is echoed in
//! run manifests as [`GENERATOR`].

use std::f64::consts::PI;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

use crate::circuit::{self, CircuitError, CircuitSpec};
use crate::model::{lambda0_of, BathKind, BathSpec, Mode, ModelError};

pub const GENERATOR: &str = "chacha20/seed_from_u64/u53-v1";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BathError {
    #[error("invalid bath parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

struct UnitStream(ChaCha20Rng);

impl UnitStream {
    fn new(seed: u64) -> Self {
        Self(ChaCha20Rng::seed_from_u64(seed))
    }

    fn next_unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_unit()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmissionLineParams {
    pub delta_omega: f64,
    pub g: f64,
    pub n_modes: usize,
}

/// ω_k = kΔω, γ_k = g√k for k = 1…N.
pub fn build_transmission_line_bath(params: &TransmissionLineParams) -> Result<BathSpec, BathError> {
    let TransmissionLineParams { delta_omega, g, n_modes } = *params;
    if !(delta_omega > 0.0 && delta_omega.is_finite()) {
        return Err(BathError::InvalidParams(format!("delta_omega must be positive, got {delta_omega}")));
    }
    if !(g >= 0.0 && g.is_finite()) {
        return Err(BathError::InvalidParams(format!("g must be non-negative, got {g}")));
    }
    if n_modes == 0 {
        return Err(BathError::InvalidParams("n_modes must be at least 1".into()));
    }
    let modes = (1..=n_modes).map(|k| Mode::new(k as f64 * delta_omega, g * (k as f64).sqrt())).collect();
    Ok(BathSpec::new(modes, BathKind::TransmissionLine, None)?)
}

/// Array modes from the dispersion relation with line-like couplings g√n.
pub fn build_jj_array_bath(circuit: &CircuitSpec, g: f64, max_modes: usize) -> Result<BathSpec, BathError> {
    if !(g >= 0.0 && g.is_finite()) {
        return Err(BathError::InvalidParams(format!("g must be non-negative, got {g}")));
    }
    if max_modes == 0 {
        return Err(BathError::InvalidParams("max_modes must be at least 1".into()));
    }
    let count = max_modes.min(circuit.n());
    let modes = (1..=count)
        .map(|n| Ok(Mode::new(circuit::dispersion(circuit, n)?, g * (n as f64).sqrt())))
        .collect::<Result<Vec<_>, CircuitError>>()?;
    let bath = BathSpec::new(modes, BathKind::JjArray, None)?;
    Ok(if max_modes > circuit.n() {
        bath.with_warning(format!("max_modes {max_modes} truncated to the {} array modes", circuit.n()))
    } else {
        bath
    })
}

/// How the coupling scale of the uniform ensemble is fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CouplingScale {
    /// Target golden-rule rate Γ₀; γ_max is derived from it.
    DecayRate(f64),
    MaxCoupling(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformTlsParams {
    pub n_tls: usize,
    pub omega_min: f64,
    pub omega_max: f64,
    pub coupling: CouplingScale,
    pub seed: u64,
}

impl UniformTlsParams {
    /// Band [0, 2Ω] with Ω = 1.
    pub fn with_decay_rate(n_tls: usize, gamma0: f64, seed: u64) -> Self {
        Self { n_tls, omega_min: 0.0, omega_max: 2.0, coupling: CouplingScale::DecayRate(gamma0), seed }
    }

    /// γ_max realizing `coupling`.
    ///
    /// With uniform density ν₀ = N/(ω_max − ω_min) and E[Λ₀²] = Nγ_max²/3,
    /// Γ₀ = 2πν₀Λ₀²/N inverts to γ_max = √(3(ω_max − ω_min)Γ₀/(2πN)).
    pub fn gamma_max(&self) -> f64 {
        match self.coupling {
            CouplingScale::MaxCoupling(g) => g,
            CouplingScale::DecayRate(rate) => {
                let width = self.omega_max - self.omega_min;
                (3.0 * width * rate / (2.0 * PI * self.n_tls as f64)).sqrt()
            }
        }
    }

    fn validate(&self) -> Result<(), BathError> {
        if self.n_tls == 0 {
            return Err(BathError::InvalidParams("n_tls must be at least 1".into()));
        }
        if !(self.omega_min >= 0.0 && self.omega_min < self.omega_max && self.omega_max.is_finite()) {
            return Err(BathError::InvalidParams(format!(
                "need 0 <= omega_min < omega_max, got [{}, {}]",
                self.omega_min, self.omega_max
            )));
        }
        let (name, value) = match self.coupling {
            CouplingScale::DecayRate(v) => ("gamma0", v),
            CouplingScale::MaxCoupling(v) => ("gamma_max", v),
        };
        if !(value >= 0.0 && value.is_finite()) {
            return Err(BathError::InvalidParams(format!("{name} must be non-negative, got {value}")));
        }
        Ok(())
    }
}

/// ω_i ~ U[ω_min, ω_max), γ_i ~ U[0, γ_max), independent draws.
pub fn build_uniform_tls_bath(params: &UniformTlsParams) -> Result<BathSpec, BathError> {
    params.validate()?;
    let gamma_max = params.gamma_max();
    let mut stream = UnitStream::new(params.seed);
    let modes = (0..params.n_tls)
        .map(|_| {
            let omega = stream.uniform(params.omega_min, params.omega_max);
            let gamma = gamma_max * stream.next_unit();
            Mode::new(omega, gamma)
        })
        .collect();
    Ok(BathSpec::new(modes, BathKind::UniformTls, Some(params.seed))?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegenerateTlsParams {
    pub n_tls: usize,
    /// Detuning fraction: every ω_i = (1 − r)Ω.
    pub r: f64,
    pub lambda0: f64,
    pub omega_q: f64,
    pub seed: u64,
}

/// Equal energies (1 − r)Ω, random couplings rescaled so Σγ_i² = Λ₀² exactly.
pub fn build_degenerate_tls_bath(params: &DegenerateTlsParams) -> Result<BathSpec, BathError> {
    let DegenerateTlsParams { n_tls, r, lambda0, omega_q, seed } = *params;
    if n_tls == 0 {
        return Err(BathError::InvalidParams("n_tls must be at least 1".into()));
    }
    if !(lambda0 > 0.0 && lambda0.is_finite()) {
        return Err(BathError::InvalidParams(format!("lambda0 must be positive, got {lambda0}")));
    }
    if !r.is_finite() {
        return Err(BathError::InvalidParams(format!("r must be finite, got {r}")));
    }
    let mut stream = UnitStream::new(seed);
    let omega = (1.0 - r) * omega_q;
    let mut modes: Vec<Mode> = (0..n_tls).map(|_| Mode::new(omega, stream.next_unit())).collect();
    let raw = lambda0_of(&modes);
    if raw == 0.0 {
        return Err(BathError::InvalidParams("all coupling draws were zero".into()));
    }
    let scale = lambda0 / raw;
    for m in &mut modes {
        m.gamma *= scale;
    }
    Ok(BathSpec::new(modes, BathKind::DegenerateTls, Some(seed))?)
}

/// Empirical mode density: count of ω_i in [ω − w/2, ω + w/2), divided by w.
pub fn density_at(bath: &BathSpec, omega: f64, window: f64) -> Result<f64, BathError> {
    if !(window > 0.0 && window.is_finite()) {
        return Err(BathError::InvalidParams(format!("window must be positive, got {window}")));
    }
    let (lo, hi) = (omega - 0.5 * window, omega + 0.5 * window);
    let count = bath.frequencies().filter(|&w| w >= lo && w < hi).count();
    Ok(count as f64 / window)
}
