use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::{resolve_dt, EngineConfig, EngineError};
use crate::model::{AmplitudeState, BathSpec, Sample, Snapshot, TimeSeries};
use crate::units::QubitSpec;

/// Modes per reduction chunk. The sum for dC₀/dt is accumulated
/// sequentially inside each chunk and the chunk partials are combined
/// pairwise, so the result is bit-identical with or without threads.
const CHUNK: usize = 1024;

/// Bath size above which stages are evaluated on the rayon pool.
const PARALLEL_MIN_MODES: usize = 1 << 15;

/// Fixed-step RK4 integrator for the rotating-frame amplitude equations.
pub struct DirectEngine {
    detuning: Vec<f64>,
    coupling: Vec<f64>,
    y: Vec<C64>,
    k1: Vec<C64>,
    k2: Vec<C64>,
    k3: Vec<C64>,
    k4: Vec<C64>,
    scratch: Vec<C64>,
    partials: Vec<C64>,
    dt: f64,
    t0: f64,
    steps: u64,
}

impl DirectEngine {
    /// Engine at t = 0 in |0⟩.
    pub fn new(qubit: &QubitSpec, bath: &BathSpec, dt: f64) -> Self {
        let state = AmplitudeState::excited_qubit(bath.len());
        Self::build(qubit, bath, dt, state)
    }

    /// Engine starting from an arbitrary single-excitation state.
    pub fn with_state(qubit: &QubitSpec, bath: &BathSpec, dt: f64, state: AmplitudeState) -> Result<Self, EngineError> {
        if state.amplitudes.len() != bath.len() + 1 {
            return Err(EngineError::InvalidConfig(format!(
                "state has {} amplitudes, bath needs {}",
                state.amplitudes.len(),
                bath.len() + 1
            )));
        }
        Ok(Self::build(qubit, bath, dt, state))
    }

    fn build(qubit: &QubitSpec, bath: &BathSpec, dt: f64, state: AmplitudeState) -> Self {
        let omega = qubit.omega();
        let n = bath.len() + 1;
        let zero = C64::new(0.0, 0.0);
        Self {
            detuning: bath.frequencies().map(|w| w - omega).collect(),
            coupling: bath.couplings().collect(),
            y: state.amplitudes,
            k1: vec![zero; n],
            k2: vec![zero; n],
            k3: vec![zero; n],
            k4: vec![zero; n],
            scratch: vec![zero; n],
            partials: Vec::with_capacity(bath.len().div_ceil(CHUNK)),
            dt,
            t0: state.t,
            steps: 0,
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn time(&self) -> f64 {
        self.t0 + self.steps as f64 * self.dt
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.y
    }

    pub fn state(&self) -> AmplitudeState {
        AmplitudeState { t: self.time(), amplitudes: self.y.clone() }
    }

    pub fn qubit_population(&self) -> f64 {
        self.y[0].norm_sqr()
    }

    pub fn norm_error(&self) -> f64 {
        self.y.iter().map(|c| c.norm_sqr()).sum::<f64>() - 1.0
    }

    pub fn step(&mut self) {
        let h = self.dt;
        let parallel = self.detuning.len() >= PARALLEL_MIN_MODES;

        derivative(&self.detuning, &self.coupling, &self.y, &mut self.k1, &mut self.partials, parallel);
        axpy(&mut self.scratch, &self.y, 0.5 * h, &self.k1, parallel);
        derivative(&self.detuning, &self.coupling, &self.scratch, &mut self.k2, &mut self.partials, parallel);
        axpy(&mut self.scratch, &self.y, 0.5 * h, &self.k2, parallel);
        derivative(&self.detuning, &self.coupling, &self.scratch, &mut self.k3, &mut self.partials, parallel);
        axpy(&mut self.scratch, &self.y, h, &self.k3, parallel);
        derivative(&self.detuning, &self.coupling, &self.scratch, &mut self.k4, &mut self.partials, parallel);

        let w = h / 6.0;
        let combine = |(y, (((a, b), c), d)): (&mut C64, (((&C64, &C64), &C64), &C64))| {
            *y += (*a + 2.0 * (*b + *c) + *d) * w;
        };
        if parallel {
            self.y.par_iter_mut().zip(self.k1.par_iter().zip(&self.k2).zip(&self.k3).zip(&self.k4)).for_each(combine);
        } else {
            self.y.iter_mut().zip(self.k1.iter().zip(&self.k2).zip(&self.k3).zip(&self.k4)).for_each(combine);
        }
        self.steps += 1;
    }
}

/// out = y + a·k
fn axpy(out: &mut [C64], y: &[C64], a: f64, k: &[C64], parallel: bool) {
    let op = |(o, (y, k)): (&mut C64, (&C64, &C64))| *o = *y + *k * a;
    if parallel {
        out.par_iter_mut().zip(y.par_iter().zip(k)).for_each(op);
    } else {
        out.iter_mut().zip(y.iter().zip(k)).for_each(op);
    }
}

/// Right-hand side of the rotating-frame equations.
fn derivative(detuning: &[f64], coupling: &[f64], y: &[C64], out: &mut [C64], partials: &mut Vec<C64>, parallel: bool) {
    let c0 = y[0];
    let chunk = |((out, y), (det, g)): ((&mut [C64], &[C64]), (&[f64], &[f64]))| -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (((o, &c), &d), &g) in out.iter_mut().zip(y).zip(det).zip(g) {
            // −i(δc + γc₀)
            let z = c * d + c0 * g;
            *o = C64::new(z.im, -z.re);
            acc += c * g;
        }
        acc
    };
    let (head, bath_out) = out.split_at_mut(1);
    let bath_y = &y[1..];
    partials.clear();
    if parallel {
        bath_out
            .par_chunks_mut(CHUNK)
            .zip(bath_y.par_chunks(CHUNK))
            .zip(detuning.par_chunks(CHUNK).zip(coupling.par_chunks(CHUNK)))
            .map(chunk)
            .collect_into_vec(partials);
    } else {
        partials.extend(
            bath_out
                .chunks_mut(CHUNK)
                .zip(bath_y.chunks(CHUNK))
                .zip(detuning.chunks(CHUNK).zip(coupling.chunks(CHUNK)))
                .map(chunk),
        );
    }
    let sum = pairwise_sum(partials);
    head[0] = C64::new(sum.im, -sum.re);
}

fn pairwise_sum(values: &[C64]) -> C64 {
    match values.len() {
        0 => C64::new(0.0, 0.0),
        1 => values[0],
        n => {
            let (a, b) = values.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

fn snapshot_steps(times: &[f64], dt: f64, n_steps: usize) -> Vec<usize> {
    let mut steps: Vec<usize> = times.iter().map(|t| ((t / dt).round() as usize).min(n_steps)).collect();
    steps.sort_unstable();
    steps.dedup();
    steps
}

/// Integrates from |0⟩ and samples p_e(t).
///
/// Snapshot times are moved to the nearest step and recorded with the
/// snapped time. The run stops at the first sample whose norm error exceeds
/// `cfg.norm_tolerance` or is not finite; the error carries the series
/// recorded so far.
pub fn evolve(qubit: &QubitSpec, bath: &BathSpec, cfg: &EngineConfig) -> Result<TimeSeries, EngineError> {
    cfg.validate()?;
    let dt = resolve_dt(qubit, bath, cfg);
    let n_steps = cfg.step_count(dt);
    let snaps = snapshot_steps(&cfg.snapshot_times, dt, n_steps);
    let mut next_snap = snaps.iter().peekable();

    let mut engine = DirectEngine::new(qubit, bath, dt);
    let mut series = TimeSeries::new();
    for step in 0..=n_steps {
        if step > 0 {
            engine.step();
        }
        let t = step as f64 * dt;
        if next_snap.next_if(|&&s| s == step).is_some() {
            let populations = engine.amplitudes()[1..].iter().map(|c| c.norm_sqr()).collect();
            series.snapshots.push(Snapshot { t, populations });
        }
        if step % cfg.sample_stride == 0 || step == n_steps {
            let norm_error = engine.norm_error();
            series.push(Sample { t, p_e: engine.qubit_population(), norm_error });
            if !norm_error.is_finite() {
                return Err(EngineError::NonFinite { t, partial: Box::new(series) });
            }
            if norm_error.abs() > cfg.norm_tolerance {
                return Err(EngineError::NormDrift { t, norm_error, partial: Box::new(series) });
            }
        }
    }
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::{
        build_degenerate_tls_bath, build_transmission_line_bath, DegenerateTlsParams, TransmissionLineParams,
    };
    use crate::dynamics::bath_populations;
    use crate::model::{BathKind, Mode};

    fn custom(modes: &[(f64, f64)]) -> BathSpec {
        BathSpec::new(modes.iter().map(|&(w, g)| Mode::new(w, g)).collect(), BathKind::Custom, None).unwrap()
    }

    #[test]
    fn decoupled_qubit_stays_excited() {
        let bath =
            build_transmission_line_bath(&TransmissionLineParams { delta_omega: 0.01, g: 0.0, n_modes: 50 }).unwrap();
        let series = evolve(&QubitSpec::default(), &bath, &EngineConfig::new(50.0).with_dt(0.1)).unwrap();
        assert!(series.samples.iter().all(|s| s.p_e == 1.0 && s.norm_error == 0.0));
    }

    #[test]
    fn single_resonant_mode_is_vacuum_rabi() {
        let gamma = 0.05;
        let bath = custom(&[(1.0, gamma)]);
        let qubit = QubitSpec::default();
        let auto = evolve(&qubit, &bath, &EngineConfig::new(200.0)).unwrap();
        let fine = evolve(&qubit, &bath, &EngineConfig::new(200.0).with_dt(0.05)).unwrap();
        for (series, tol) in [(auto, 1e-6), (fine, 1e-10)] {
            for s in &series.samples {
                assert!((s.p_e - (gamma * s.t).cos().powi(2)).abs() < tol, "t={}", s.t);
            }
        }
    }

    #[test]
    fn degenerate_bath_follows_cos_squared() {
        let bath =
            build_degenerate_tls_bath(&DegenerateTlsParams { n_tls: 50, r: 0.0, lambda0: 0.01, omega_q: 1.0, seed: 3 })
                .unwrap();
        let series = evolve(&QubitSpec::default(), &bath, &EngineConfig::new(400.0)).unwrap();
        let worst = series.samples.iter().map(|s| (s.p_e - (0.01 * s.t).cos().powi(2)).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-6, "worst deviation {worst}");
    }

    #[test]
    fn symmetric_detunings_share_population() {
        let bath = custom(&[(0.9, 0.03), (1.1, 0.03)]);
        let mut engine = DirectEngine::new(&QubitSpec::default(), &bath, 0.01);
        for _ in 0..5000 {
            engine.step();
        }
        let pops = bath_populations(&engine.state());
        assert!(pops[0] > 1e-3);
        assert!((pops[0] - pops[1]).abs() < 1e-12, "{pops:?}");
        assert!((pops.iter().sum::<f64>() + engine.qubit_population() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn global_phase_leaves_populations_unchanged() {
        let bath = custom(&[(0.8, 0.02), (1.05, 0.04), (1.3, 0.01)]);
        let qubit = QubitSpec::default();
        // a phase of −1 is exact in floating point
        let mut flipped = AmplitudeState::excited_qubit(3);
        flipped.amplitudes[0] = C64::new(-1.0, 0.0);
        let mut a = DirectEngine::new(&qubit, &bath, 0.05);
        let mut b = DirectEngine::with_state(&qubit, &bath, 0.05, flipped).unwrap();
        for _ in 0..2000 {
            a.step();
            b.step();
        }
        let pa: Vec<f64> = a.amplitudes().iter().map(|c| c.norm_sqr()).collect();
        let pb: Vec<f64> = b.amplitudes().iter().map(|c| c.norm_sqr()).collect();
        assert_eq!(pa, pb);

        let phase = C64::from_polar(1.0, 0.7);
        let mut rotated = AmplitudeState::excited_qubit(3);
        rotated.amplitudes[0] = phase;
        let mut c = DirectEngine::with_state(&qubit, &bath, 0.05, rotated).unwrap();
        for _ in 0..2000 {
            c.step();
        }
        for (x, y) in pa.iter().zip(c.amplitudes()) {
            assert!((x - y.norm_sqr()).abs() < 1e-12);
        }
    }

    #[test]
    fn snapshots_snap_to_steps() {
        let bath = custom(&[(1.0, 0.05), (1.2, 0.05)]);
        let cfg = EngineConfig::new(10.0).with_dt(0.3).with_snapshots(vec![1.0, 1.04, 5.0]);
        let series = evolve(&QubitSpec::default(), &bath, &cfg).unwrap();
        let times: Vec<f64> = series.snapshots.iter().map(|s| s.t).collect();
        assert_eq!(times, vec![3.0 * 0.3, 17.0 * 0.3]);
        assert_eq!(series.snapshots[0].populations.len(), 2);
        assert!(series.end_time().unwrap() >= 10.0);
    }

    #[test]
    fn stride_and_final_sample() {
        let bath = custom(&[(1.0, 0.05)]);
        let cfg = EngineConfig::new(1.0).with_dt(0.1).with_stride(3);
        let series = evolve(&QubitSpec::default(), &bath, &cfg).unwrap();
        let steps: Vec<i64> = series.times().iter().map(|t| (t / 0.1).round() as i64).collect();
        assert_eq!(steps, vec![0, 3, 6, 9, 10]);
    }

    #[test]
    fn coarse_step_trips_norm_check() {
        let bath = custom(&[(1.0, 0.5), (2.0, 0.5)]);
        let cfg = EngineConfig::new(100.0).with_dt(0.5).with_norm_tolerance(1e-15);
        match evolve(&QubitSpec::default(), &bath, &cfg) {
            Err(e @ EngineError::NormDrift { .. }) => {
                let partial = e.partial_series().unwrap();
                assert!(!partial.is_empty());
                assert!(partial.end_time().unwrap() < 100.0);
            }
            other => panic!("expected norm drift, got {other:?}"),
        }
    }

    #[test]
    fn pairwise_sum_matches_plain_sum_for_small_input() {
        let v: Vec<C64> = (0..7).map(|i| C64::new(i as f64, -(i as f64))).collect();
        assert_eq!(pairwise_sum(&v), C64::new(21.0, -21.0));
    }

    #[test]
    fn parallel_and_serial_stages_agree_bitwise() {
        let n = PARALLEL_MIN_MODES + 777;
        let detuning: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let coupling: Vec<f64> = (0..n).map(|i| 1e-3 * (1.0 + (i as f64 * 0.11).cos())).collect();
        let y: Vec<C64> = (0..=n).map(|i| C64::new((i as f64).cos(), (i as f64 * 0.5).sin()) * 1e-3).collect();
        let mut a = vec![C64::new(0.0, 0.0); n + 1];
        let mut b = a.clone();
        let mut pa = Vec::new();
        let mut pb = Vec::new();
        derivative(&detuning, &coupling, &y, &mut a, &mut pa, true);
        derivative(&detuning, &coupling, &y, &mut b, &mut pb, false);
        assert_eq!(a, b);
    }
}
