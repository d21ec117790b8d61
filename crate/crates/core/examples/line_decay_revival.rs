//! Qubit decay into a finite transmission line: exponential decay over eight
//! decades at the golden-rule rate, then an abrupt revival at 2π/Δω.
//!
//! ```text
//! cargo run --release --example line_decay_revival [series.csv]
//! ```

use std::fs::File;

use heatbath::analytics::{decay_rate_line, detect_revival, fit_exponential, revival_time};
use heatbath::bath::{build_transmission_line_bath, TransmissionLineParams};
use heatbath::config::DEFAULT_FLOOR_FACTOR;
use heatbath::dynamics::{evolve, EngineConfig};
use heatbath::io::write_series_csv;
use heatbath::QubitSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (delta_omega, g) = (0.01, 0.001);
    let bath = build_transmission_line_bath(&TransmissionLineParams { delta_omega, g, n_modes: 300 })?;
    let series = evolve(&QubitSpec::default(), &bath, &EngineConfig::new(700.0).with_stride(10))?;

    let fit = fit_exponential(&series, 1e-1, 1e-7)?;
    let gamma = decay_rate_line(g, 1.0, delta_omega);
    println!("decay rate   fitted {:.5}   predicted {gamma:.5}   r² {:.6}", fit.gamma_fit, fit.r_squared);

    let revival = detect_revival(&series, DEFAULT_FLOOR_FACTOR);
    println!("revival      detected {revival:.2?}   predicted {:.2}", revival_time(delta_omega));

    for t in [0.0, 50.0, 100.0, 200.0, 300.0, 600.0, 640.0, 700.0] {
        let s = series.samples.iter().min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs())).unwrap();
        println!("  t = {:6.1}   p_e = {:.3e}", s.t, s.p_e);
    }
    println!("max norm error {:.1e}", series.max_norm_error());

    if let Some(path) = std::env::args().nth(1) {
        write_series_csv(File::create(&path)?, &series)?;
    }
    Ok(())
}
