//! Decay into N two-level systems with energies spread over (0, 2Ω): the
//! golden-rule decay at Γ₀ and the residual population of a finite bath.
//!
//! ```text
//! cargo run --release --example distributed_tls_plateau [N] [t_max] [seed]
//! ```

use heatbath::analytics::{decay_rate_tls, fit_exponential, long_time_plateau, time_average};
use heatbath::bath::{build_uniform_tls_bath, UniformTlsParams};
use heatbath::dynamics::{evolve, EngineConfig};
use heatbath::model::lambda0;
use heatbath::QubitSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(Ok(1000), |a| a.parse())?;
    let t_max: f64 = args.next().map_or(Ok(4000.0), |a| a.parse())?;
    let seed: u64 = args.next().map_or(Ok(1), |a| a.parse())?;
    let gamma0 = 0.03;

    let bath = build_uniform_tls_bath(&UniformTlsParams::with_decay_rate(n, gamma0, seed))?;
    let realized = decay_rate_tls(n as f64 / 2.0, lambda0(&bath), n);
    let series = evolve(&QubitSpec::default(), &bath, &EngineConfig::new(t_max).with_stride(20))?;

    let early = fit_exponential(&series, 1.0, 0.1)?;
    println!("Γ₀ target {gamma0}, realized by the draw {realized:.5}, fitted on p_e ∈ [0.1, 1] {:.5}", early.gamma_fit);
    let plateau = time_average(&series, 0.5 * t_max, t_max)?;
    let level = long_time_plateau(1.0, n, gamma0);
    println!("mean p_e over the second half {plateau:.5}, 4Ω/(NπΓ₀) = {level:.5} (ratio {:.2})", plateau / level);
    println!("max norm error {:.1e}", series.max_norm_error());
    Ok(())
}
