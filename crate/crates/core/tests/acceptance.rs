//! End-to-end acceptance checks at their stated tolerances.
//!
//! Each test prints one `PASS`/`FAIL` line with the measured figures, then
//! asserts. Run with `--nocapture` to see the lines.

use std::fs;

use heatbath::analytics::{analytic_detuned_population, detect_revival, fit_exponential, time_average};
use heatbath::bath::{
    build_degenerate_tls_bath, build_transmission_line_bath, build_uniform_tls_bath, DegenerateTlsParams,
    TransmissionLineParams, UniformTlsParams,
};
use heatbath::circuit::{
    default_grid_points, dispersion, find_modes, impedance_sweep, input_impedance, log_grid, CircuitSpec, Termination,
};
use heatbath::config::{parse_config, DEFAULT_FLOOR_FACTOR};
use heatbath::dynamics::{evolve, evolve_kernel, EngineConfig};
use heatbath::runner::{run, sweep, ExitStatus, Pipeline, SERIES_FILE};
use heatbath::{QubitSpec, TimeSeries};

const NORM_TOLERANCE: f64 = 1e-7;

fn verdict(id: u32, name: &str, pass: bool, detail: String) {
    println!("{} {id:02} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{id:02} {name}: {detail}");
}

fn line_run() -> TimeSeries {
    let bath =
        build_transmission_line_bath(&TransmissionLineParams { delta_omega: 0.01, g: 0.001, n_modes: 300 }).unwrap();
    evolve(&QubitSpec::default(), &bath, &EngineConfig::new(700.0)).unwrap()
}

fn degenerate_run(r: f64, lambda0: f64, t_max: f64) -> TimeSeries {
    let params = DegenerateTlsParams { n_tls: 1000, r, lambda0, omega_q: 1.0, seed: 11 };
    let bath = build_degenerate_tls_bath(&params).unwrap();
    evolve(&QubitSpec::default(), &bath, &EngineConfig::new(t_max)).unwrap()
}

#[test]
fn dispersion_matches_impedance_scan() {
    let mut worst: f64 = 0.0;
    let mut counts = Vec::new();
    for ratio in [0.0, 100.0] {
        let spec = CircuitSpec::new(1.0, ratio, 1.0, 3000, Termination::Open).unwrap();
        let lo = 0.5 * dispersion(&spec, 1).unwrap();
        let hi = 0.5 * (dispersion(&spec, 20).unwrap() + dispersion(&spec, 21).unwrap());
        let modes = find_modes(&spec, lo, hi, default_grid_points(&spec, lo, hi)).unwrap();
        counts.push(modes.len());
        for (n, w) in modes.iter().take(20).enumerate() {
            let expected = dispersion(&spec, n + 1).unwrap();
            worst = worst.max((w / expected - 1.0).abs());
        }
    }
    let pass = counts.iter().all(|&c| c == 20) && worst <= 1e-3;
    verdict(
        1,
        "dispersion vs impedance scan",
        pass,
        format!("modes found {counts:?}, worst relative deviation {worst:.3e}"),
    );
}

#[test]
fn capacitive_asymptote() {
    let spec = CircuitSpec::new(1.0, 100.0, 1.0, 3000, Termination::Open).unwrap();
    let wp = spec.plasma_frequency();
    let scale = (spec.c() * spec.cg()).sqrt();
    let ratio = |w: f64| input_impedance(&spec, w).unwrap().abs_impedance() * w * scale;

    // infinite-ladder fixed point: Z² − Z_J Z − Z_J/(iωC_g) = 0
    let fixed_point = |w: f64| {
        let zj = heatbath::circuit::junction_impedance(&spec, w).unwrap().impedance().unwrap();
        let i = num_complex::Complex64::i();
        let b = zj / (i * w * spec.cg());
        let disc = (zj * zj + 4.0 * b).sqrt();
        let roots = [(zj + disc) / 2.0, (zj - disc) / 2.0];
        // the physical branch is capacitive above ω_p
        roots.into_iter().find(|z| z.im < 0.0).unwrap().norm() * w * scale
    };
    let grid = log_grid(5.0 * wp, 50.0 * wp, 400);
    let (mut lo, mut hi, mut oracle_dev) = (f64::INFINITY, 0.0f64, 0.0f64);
    let mut first_inside = None;
    for &w in &grid {
        let r = ratio(w);
        lo = lo.min(r);
        hi = hi.max(r);
        oracle_dev = oracle_dev.max((r - fixed_point(w)).abs());
        if first_inside.is_none() && r <= 1.06 {
            first_inside = Some(w / wp);
        }
    }
    let constant = (0.1 + 4.01f64.sqrt()) / 2.0;
    let far = ratio(1e4 * wp);
    let oracle_ok = oracle_dev <= 1e-6 && (far - constant).abs() <= 1e-6;
    let pass = lo >= 1.0 && hi <= 1.06 && oracle_ok;
    verdict(
        2,
        "capacitive asymptote",
        pass,
        format!(
            "|Z|ω√(CCg) on [5, 50]ω_p spans [{lo:.5}, {hi:.5}] (band [1, 1.06]; inside from {:.2}ω_p); \
             fixed-point oracle deviation {oracle_dev:.1e}; at 10⁴ω_p {far:.7} vs {constant:.7}",
            first_inside.unwrap_or(f64::NAN)
        ),
    );
}

#[test]
fn lossless_foster_sweep() {
    // Foster: dX/dω ≥ |X|/ω > 0 away from poles. Checked at every sweep point
    // by a central difference, so no grid interval needs to resolve the
    // pole-zero spacing.
    let mut violations = 0usize;
    let mut checked = 0usize;
    let mut worst_re: f64 = 0.0;
    let mut worst_slope = f64::INFINITY;
    let delta = 1e-10;
    for (ratio, n, term) in [
        (0.0, 3000, Termination::Open),
        (100.0, 3000, Termination::Open),
        (100.0, 3000, Termination::Short),
        (1.0, 25, Termination::Open),
        (10.0, 25, Termination::Short),
        (100.0, 7, Termination::Short),
    ] {
        let spec = CircuitSpec::new(1.0, ratio, 1.0, n, term).unwrap();
        let top = if ratio > 0.0 { 3.0 * spec.plasma_frequency() } else { 2.5 };
        let reactance = |w: f64| input_impedance(&spec, w).unwrap().impedance().map(|z| z.im);
        for p in impedance_sweep(&spec, 1e-4 * top, top, 10_000).unwrap() {
            let Some(z) = p.response.impedance() else { continue };
            worst_re = worst_re.max(z.re.abs() / z.norm());
            let (lo, hi) = (p.omega * (1.0 - delta), p.omega * (1.0 + delta));
            let (Some(x_lo), Some(x_hi)) = (reactance(lo), reactance(hi)) else { continue };
            if x_lo > 0.0 && x_hi < 0.0 {
                continue; // a pole inside the stencil
            }
            checked += 1;
            let slope = (x_hi - x_lo) / (hi - lo);
            let bound = z.im.abs() / p.omega;
            worst_slope = worst_slope.min(slope / bound.max(f64::MIN_POSITIVE));
            if !(slope > 0.0 && slope >= bound * (1.0 - 1e-4)) {
                violations += 1;
            }
        }
    }
    let pass = worst_re <= 1e-9 && violations == 0;
    verdict(
        3,
        "losslessness and Foster monotonicity",
        pass,
        format!(
            "max |Re Z|/|Z| {worst_re:.1e}, {checked} slopes checked, {violations} violate dX/dω ≥ |X|/ω > 0 \
             (min ratio {worst_slope:.4})"
        ),
    );
}

#[test]
fn line_decay_rate() {
    let series = line_run();
    let fit = fit_exponential(&series, 1e-1, 1e-7).unwrap();
    let target = 2.0 * std::f64::consts::PI * 1e-2;
    let rel = fit.gamma_fit / target - 1.0;
    let revival = detect_revival(&series, DEFAULT_FLOOR_FACTOR).unwrap_or(f64::INFINITY);
    let p_min = series.samples.iter().filter(|s| s.t < revival).map(|s| s.p_e).fold(f64::INFINITY, f64::min);
    let norm = series.max_norm_error();
    let pass = rel.abs() <= 0.05 && p_min < 1e-8 && norm <= NORM_TOLERANCE;
    verdict(
        4,
        "transmission-line decay",
        pass,
        format!(
            "Γ_fit {:.6} vs {target:.6} ({:+.2}%, r² {:.6}), min p_e before revival {p_min:.2e}, max norm error {norm:.1e}",
            fit.gamma_fit,
            100.0 * rel,
            fit.r_squared
        ),
    );
}

#[test]
fn line_revival_onset() {
    let series = line_run();
    let target = 2.0 * std::f64::consts::PI / 0.01;
    let found = detect_revival(&series, DEFAULT_FLOOR_FACTOR);
    let rel = found.map(|t| t / target - 1.0);
    let pass = rel.is_some_and(|r| r.abs() <= 0.05);
    verdict(5, "revival onset", pass, format!("detected {found:?} vs {target:.2} (relative {rel:?})"));
}

#[test]
fn degenerate_oscillation() {
    let l0 = 0.01;
    let series = degenerate_run(0.0, l0, 1000.0);
    let dev = series.samples.iter().map(|s| (s.p_e - (l0 * s.t).cos().powi(2)).abs()).fold(0.0, f64::max);
    let norm = series.max_norm_error();
    let pass = dev <= 1e-6 && norm <= NORM_TOLERANCE;
    verdict(6, "degenerate bath cos²(Λ₀t)", pass, format!("max deviation {dev:.2e}, max norm error {norm:.1e}"));
}

#[test]
fn detuned_closed_form() {
    let (r, l0) = (0.25, 0.05);
    let series = degenerate_run(r, l0, 500.0);
    let dev =
        series.samples.iter().map(|s| (s.p_e - analytic_detuned_population(l0, r, 1.0, s.t)).abs()).fold(0.0, f64::max);
    let norm = series.max_norm_error();
    let pass = dev <= 1e-5 && norm <= NORM_TOLERANCE;
    verdict(7, "detuned closed form", pass, format!("max deviation {dev:.2e}, max norm error {norm:.1e}"));
}

#[test]
fn distributed_tls_decay_and_plateau() {
    let bath = build_uniform_tls_bath(&UniformTlsParams::with_decay_rate(3000, 0.03, 1)).unwrap();
    let series = evolve(&QubitSpec::default(), &bath, &EngineConfig::new(10_000.0).with_stride(10)).unwrap();
    let fit = fit_exponential(&series, 1.0, 1e-2).unwrap();
    let rate_rel = fit.gamma_fit / 0.03 - 1.0;
    let plateau = time_average(&series, 5000.0, 10_000.0).unwrap();
    let level = 4.0 / (3000.0 * std::f64::consts::PI * 0.03);
    let factor = plateau / level;
    let revival = detect_revival(&series.window(5000.0, 10_000.0), DEFAULT_FLOOR_FACTOR);
    let norm = series.max_norm_error();
    let rate_ok = rate_rel.abs() <= 0.10;
    let plateau_ok = (0.5..=2.0).contains(&factor);
    let pass = rate_ok && plateau_ok && revival.is_none() && norm <= NORM_TOLERANCE;
    verdict(
        8,
        "distributed TLS decay and plateau",
        pass,
        format!(
            "Γ_fit {:.5} over t ∈ [{:.1}, {:.1}] ({:+.1}%, {}), plateau {plateau:.5} = {factor:.2}× {level:.6} ({}), \
             revival in window {revival:?}, max norm error {norm:.1e}",
            fit.gamma_fit,
            fit.window.0,
            fit.window.1,
            100.0 * rate_rel,
            if rate_ok { "ok" } else { "outside 10%" },
            if plateau_ok { "ok" } else { "outside ×2" },
        ),
    );
}

#[test]
fn engines_agree() {
    let bath = build_uniform_tls_bath(&UniformTlsParams::with_decay_rate(100, 0.03, 5)).unwrap();
    let cfg = EngineConfig::new(100.0);
    let q = QubitSpec::default();
    let direct = evolve(&q, &bath, &cfg).unwrap();
    let kernel = evolve_kernel(&q, &bath, &cfg).unwrap();
    let same_grid = direct.times() == kernel.times();
    let dev = direct.samples.iter().zip(&kernel.samples).map(|(a, b)| (a.p_e - b.p_e).abs()).fold(0.0, f64::max);
    let pass = same_grid && dev <= 1e-6;
    verdict(9, "direct vs memory-kernel engine", pass, format!("{} samples, max |Δp_e| {dev:.2e}", direct.len()));
}

fn config_text(bath: &str, t_max: f64, dir: &std::path::Path) -> String {
    format!(
        "[qubit]\nomega = 1\n[bath]\n{bath}\n[engine]\nt_max = {t_max}\nsnapshot_times = {}\n[output]\ndirectory = {}\nemit_bath_dump = true\n",
        0.5 * t_max,
        dir.display()
    )
}

#[test]
fn unitarity_and_determinism() {
    let root = tempfile::tempdir().unwrap();
    let cases = [
        ("kind = line\ndelta_omega = 0.01\ng = 0.001\nn_modes = 300", 700.0),
        ("kind = degenerate\nn_tls = 1000\nr = 0\nlambda0 = 0.01\nseed = 3", 1000.0),
        ("kind = degenerate\nn_tls = 1000\nr = 0.25\nlambda0 = 0.05\nseed = 3", 500.0),
        ("kind = uniform\nn_tls = 300\ngamma0 = 0.03\nseed = 9", 400.0),
    ];
    let mut failures = Vec::new();
    let mut worst_norm: f64 = 0.0;
    let mut compared = 0;
    for (k, (bath, t_max)) in cases.iter().enumerate() {
        let dirs: Vec<_> = (0..2).map(|r| root.path().join(format!("case{k}_run{r}"))).collect();
        for d in &dirs {
            let cfg = parse_config(&config_text(bath, *t_max, d)).unwrap();
            let outcome = run(&cfg, Pipeline::Evolve);
            if outcome.status != ExitStatus::Success {
                failures.push(format!("case {k}: {:?}", outcome.message));
            }
        }
        let series = heatbath::io::read_series_csv(fs::File::open(dirs[0].join(SERIES_FILE)).unwrap()).unwrap();
        worst_norm = worst_norm.max(series.max_norm_error());
        for f in ["series.csv", "bath.csv", "snapshot_001.csv"] {
            compared += 1;
            if fs::read(dirs[0].join(f)).unwrap() != fs::read(dirs[1].join(f)).unwrap() {
                failures.push(format!("case {k}: {f} differs between runs"));
            }
        }
    }

    // the same seeded sweep at different parallelism
    let base = config_text("kind = uniform\nn_tls = 200\ngamma0 = 0.03\nseed = 0", 200.0, &root.path().join("sweep"));
    let seeds: Vec<String> = (1..=4).map(|s| s.to_string()).collect();
    let mut trees = Vec::new();
    for jobs in [1, 3] {
        let dir = root.path().join(format!("sweep_jobs{jobs}"));
        let mut cfg = parse_config(&base).unwrap();
        cfg.output.directory = dir.display().to_string();
        let outcome = sweep(&cfg, "bath.seed", &seeds, jobs, Pipeline::Evolve);
        if outcome.status != ExitStatus::Success {
            failures.push(format!("sweep with {jobs} jobs exited {:?}", outcome.status));
        }
        let mut files = Vec::new();
        for (i, s) in seeds.iter().enumerate() {
            for f in ["series.csv", "bath.csv", "snapshot_001.csv"] {
                files.push(fs::read(dir.join(format!("{:03}_{s}", i + 1)).join(f)).unwrap());
            }
        }
        files.push(fs::read(dir.join("summary.csv")).unwrap());
        trees.push(files);
    }
    compared += trees[0].len();
    if trees[0] != trees[1] {
        failures.push("sweep outputs depend on --jobs".into());
    }
    let pass = failures.is_empty() && worst_norm <= NORM_TOLERANCE;
    verdict(
        10,
        "unitarity and determinism",
        pass,
        format!("{compared} file pairs compared, max norm error {worst_norm:.1e}, problems {failures:?}"),
    );
}
