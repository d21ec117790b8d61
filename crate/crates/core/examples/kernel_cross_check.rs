//! The amplitude integrator against the memory-kernel solver, which never
//! forms bath amplitudes.
//!
//! ```text
//! cargo run --release --example kernel_cross_check
//! ```

use heatbath::bath::{build_uniform_tls_bath, UniformTlsParams};
use heatbath::dynamics::{evolve, evolve_kernel, EngineConfig};
use heatbath::QubitSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let bath = build_uniform_tls_bath(&UniformTlsParams::with_decay_rate(100, 0.03, 5))?;
    let cfg = EngineConfig::new(100.0).with_stride(500);
    let q = QubitSpec::default();
    let direct = evolve(&q, &bath, &cfg)?;
    let kernel = evolve_kernel(&q, &bath, &cfg)?;
    println!("     t        direct          kernel          |Δ|");
    for (a, b) in direct.samples.iter().zip(&kernel.samples) {
        println!("{:7.2}   {:.10}   {:.10}   {:.1e}", a.t, a.p_e, b.p_e, (a.p_e - b.p_e).abs());
    }
    Ok(())
}
