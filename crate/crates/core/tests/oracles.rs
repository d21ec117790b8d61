//! Independent checks of the engines against formulations they do not share
//! code with.

use num_complex::Complex64 as C64;

use heatbath::bath::{build_uniform_tls_bath, UniformTlsParams};
use heatbath::dynamics::{evolve, evolve_kernel, DirectEngine, EngineConfig};
use heatbath::model::lambda0;
use heatbath::{BathKind, BathSpec, Mode, QubitSpec};

/// Plain RK4 on the interaction-picture equations
/// dC₀/dt = −i Σ γ_i e^{−iδ_i t} C_i, dC_i/dt = −i γ_i e^{iδ_i t} C₀, δ_i = ω_i − Ω.
fn interaction_picture(bath: &BathSpec, dt: f64, steps: usize) -> Vec<f64> {
    let modes: Vec<(f64, f64)> = bath.modes().iter().map(|m| (m.omega - 1.0, m.gamma)).collect();
    let rhs = |t: f64, c: &[C64]| -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); c.len()];
        for (i, &(d, g)) in modes.iter().enumerate() {
            let phase = C64::from_polar(1.0, d * t);
            out[0] += -C64::i() * g * phase.conj() * c[i + 1];
            out[i + 1] = -C64::i() * g * phase * c[0];
        }
        out
    };
    let mut c = vec![C64::new(0.0, 0.0); modes.len() + 1];
    c[0] = C64::new(1.0, 0.0);
    let mut p = vec![1.0];
    for k in 0..steps {
        let t = k as f64 * dt;
        let shift = |a: &[C64], b: &[C64], h: f64| a.iter().zip(b).map(|(x, y)| x + y * h).collect::<Vec<_>>();
        let k1 = rhs(t, &c);
        let k2 = rhs(t + 0.5 * dt, &shift(&c, &k1, 0.5 * dt));
        let k3 = rhs(t + 0.5 * dt, &shift(&c, &k2, 0.5 * dt));
        let k4 = rhs(t + dt, &shift(&c, &k3, dt));
        for i in 0..c.len() {
            c[i] += (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]) * (dt / 6.0);
        }
        p.push(c[0].norm_sqr());
    }
    p
}

fn small_bath() -> BathSpec {
    build_uniform_tls_bath(&UniformTlsParams::with_decay_rate(40, 0.03, 21)).unwrap()
}

#[test]
fn rotating_and_interaction_pictures_agree() {
    let bath = small_bath();
    let dt = 0.01;
    let steps = 5000;
    let reference = interaction_picture(&bath, dt, steps);
    let series = evolve(&QubitSpec::default(), &bath, &EngineConfig::new(dt * steps as f64).with_dt(dt)).unwrap();
    assert_eq!(series.len(), steps + 1);
    let worst = series.samples.iter().zip(&reference).map(|(s, p)| (s.p_e - p).abs()).fold(0.0, f64::max);
    assert!(worst < 1e-8, "max deviation {worst}");
}

#[test]
fn rk4_error_shrinks_sixteenfold_per_halving() {
    let bath = small_bath();
    let q = QubitSpec::default();
    let t = 40.0;
    let amplitude = |h: f64| {
        let mut e = DirectEngine::new(&q, &bath, h);
        for _ in 0..(t / h).round() as usize {
            e.step();
        }
        e.amplitudes().to_vec()
    };
    let reference = amplitude(0.4 / 64.0);
    let err = |h: f64| amplitude(h).iter().zip(&reference).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let (e1, e2) = (err(0.4), err(0.2));
    let ratio = e1 / e2;
    assert!((ratio - 16.0).abs() < 2.0, "ratio {ratio} ({e1:e} / {e2:e})");
}

#[test]
fn kernel_engine_converges_at_fourth_order() {
    let bath = small_bath();
    let q = QubitSpec::default();
    let p_end =
        |h: f64| evolve_kernel(&q, &bath, &EngineConfig::new(30.0).with_dt(h)).unwrap().samples.last().unwrap().p_e;
    let reference = p_end(0.3 / 16.0);
    let ratio = (p_end(0.6) - reference).abs() / (p_end(0.3) - reference).abs();
    assert!(ratio > 10.0, "ratio {ratio}");
}

#[test]
fn norm_loss_stays_within_rk4_bound() {
    // RK4 on a Hermitian generator loses at most (hρ)⁶/72 of the norm per
    // step, ρ the spectral radius; ρ ≤ max|δ_i| + Λ₀.
    let bath = small_bath();
    let h = 0.05;
    let rho = bath.frequencies().map(|w| (w - 1.0).abs()).fold(0.0, f64::max) + lambda0(&bath);
    let mut e = DirectEngine::new(&QubitSpec::default(), &bath, h);
    for k in 1..=20_000 {
        e.step();
        let bound = k as f64 * (h * rho).powi(6) / 72.0;
        assert!(e.norm_error() <= 1e-14 && -e.norm_error() <= bound + 1e-14, "step {k}");
    }
}

#[test]
fn single_mode_matches_two_level_formula() {
    // one detuned mode: p = 1 − (g²/Ω_R²) sin²(Ω_R t), Ω_R² = g² + (δ/2)²
    let (g, w) = (0.02, 1.03);
    let bath = BathSpec::new(vec![Mode::new(w, g)], BathKind::Custom, None).unwrap();
    let series = evolve(&QubitSpec::default(), &bath, &EngineConfig::new(400.0).with_dt(0.05)).unwrap();
    let rabi = (g * g + 0.25 * (w - 1.0) * (w - 1.0)).sqrt();
    for s in &series.samples {
        let exact = 1.0 - (g / rabi).powi(2) * (rabi * s.t).sin().powi(2);
        assert!((s.p_e - exact).abs() < 1e-10, "t = {}", s.t);
    }
}

#[test]
fn golden_rule_rate_round_trips_through_builder() {
    let n = 10_000;
    for seed in 0..3 {
        let bath = build_uniform_tls_bath(&UniformTlsParams::with_decay_rate(n, 0.03, seed)).unwrap();
        let rate = heatbath::analytics::decay_rate_tls(n as f64 / 2.0, lambda0(&bath), n);
        // relative sampling std of Σγ² is 3√(4/45)/√N ≈ 0.9%
        assert!((rate / 0.03 - 1.0).abs() < 0.036, "seed {seed}: {rate}");
    }
}
