use num_complex::Complex64 as C64;

use super::{resolve_dt, EngineConfig, EngineError};
use crate::model::{BathSpec, Sample, TimeSeries};
use crate::units::QubitSpec;

/// K(τ) = Σ γ_i² e^{i(Ω − ω_i)τ} sampled at τ_m = m·step.
#[derive(Debug, Clone, PartialEq)]
pub struct MemoryKernel {
    step: f64,
    values: Vec<C64>,
}

impl MemoryKernel {
    pub fn new(qubit: &QubitSpec, bath: &BathSpec, step: f64, len: usize) -> Self {
        let omega = qubit.omega();
        let modes: Vec<(f64, f64)> = bath.modes().iter().map(|m| (omega - m.omega, m.gamma * m.gamma)).collect();
        let values = (0..len)
            .map(|k| {
                let tau = k as f64 * step;
                modes.iter().map(|&(d, g2)| C64::from_polar(g2, d * tau)).sum()
            })
            .collect();
        Self { step, values }
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn tau(&self, k: usize) -> f64 {
        k as f64 * self.step
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }
}

/// Trapezoidal solution of dC₀/dt = −∫₀ᵗ K(t − s) C₀(s) ds on the grid of
/// `kernel`, from C₀(0) = 1. Returns C₀ at steps 0…n_steps.
///
/// Both the time integral and the convolution use the trapezoidal rule; the
/// implicit end-point term is solved exactly since it is scalar.
fn trapezoid(kernel: &MemoryKernel, n_steps: usize) -> Vec<C64> {
    let h = kernel.step;
    let k = kernel.values();
    let one = C64::new(1.0, 0.0);
    let denom = one + k[0] * (0.25 * h * h);
    let mut y = Vec::with_capacity(n_steps + 1);
    y.push(one);
    let mut force = C64::new(0.0, 0.0);
    for n in 0..n_steps {
        let mut s = k[n + 1] * y[0] * (0.5 * h);
        let mut acc = C64::new(0.0, 0.0);
        for j in 1..=n {
            acc += k[n + 1 - j] * y[j];
        }
        s += acc * h;
        let next = (y[n] + force * (0.5 * h) - s * (0.5 * h)) / denom;
        force = -(s + k[0] * next * (0.5 * h));
        y.push(next);
    }
    y
}

/// Memory-kernel engine: p_e(t) without bath amplitudes.
///
/// Solves the trapezoidal scheme at the resolved step and at half of it and
/// combines the two (Richardson, error O(h⁴)) at the coarse grid points.
/// Samples carry NaN as norm error; a population above 1 + `norm_tolerance`
/// aborts the run. Snapshot times are ignored.
pub fn evolve_kernel(qubit: &QubitSpec, bath: &BathSpec, cfg: &EngineConfig) -> Result<TimeSeries, EngineError> {
    cfg.validate()?;
    let dt = resolve_dt(qubit, bath, cfg);
    let n_steps = cfg.step_count(dt);

    let fine_kernel = MemoryKernel::new(qubit, bath, 0.5 * dt, 2 * n_steps + 1);
    let coarse_kernel = MemoryKernel { step: dt, values: fine_kernel.values.iter().step_by(2).copied().collect() };
    let coarse = trapezoid(&coarse_kernel, n_steps);
    let fine = trapezoid(&fine_kernel, 2 * n_steps);

    let mut series = TimeSeries::new();
    for step in (0..=n_steps).filter(|&s| s % cfg.sample_stride == 0 || s == n_steps) {
        let t = step as f64 * dt;
        let f = fine[2 * step];
        let c0 = f + (f - coarse[step]) / 3.0;
        let p_e = c0.norm_sqr();
        series.push(Sample { t, p_e, norm_error: f64::NAN });
        if !p_e.is_finite() {
            return Err(EngineError::NonFinite { t, partial: Box::new(series) });
        }
        if p_e - 1.0 > cfg.norm_tolerance {
            return Err(EngineError::NormDrift { t, norm_error: p_e - 1.0, partial: Box::new(series) });
        }
    }
    Ok(series)
}
