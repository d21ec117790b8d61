//! Degenerate two-level ensembles: collective vacuum-Rabi oscillation at Λ₀
//! on resonance and the shallower, faster oscillation when detuned by rΩ.
//!
//! ```text
//! cargo run --release --example degenerate_tls
//! ```

use heatbath::analytics::analytic_detuned_population;
use heatbath::bath::{build_degenerate_tls_bath, DegenerateTlsParams};
use heatbath::dynamics::{evolve, EngineConfig};
use heatbath::QubitSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let lambda0 = 0.05;
    for r in [0.0, 0.25] {
        let bath = build_degenerate_tls_bath(&DegenerateTlsParams { n_tls: 1000, r, lambda0, omega_q: 1.0, seed: 1 })?;
        let series = evolve(&QubitSpec::default(), &bath, &EngineConfig::new(200.0))?;
        let worst = series
            .samples
            .iter()
            .map(|s| (s.p_e - analytic_detuned_population(lambda0, r, 1.0, s.t)).abs())
            .fold(0.0, f64::max);
        let p_min = series.populations().into_iter().fold(1.0, f64::min);
        println!("r = {r:4}: min p_e {p_min:.5}, max deviation from closed form {worst:.1e}");
    }
    Ok(())
}
