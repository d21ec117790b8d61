//! Input impedance of a 3000-junction array with and without junction
//! capacitance: resonances from the impedance scan against the dispersion
//! relation, and the capacitive response above the plasma frequency.
//!
//! ```text
//! cargo run --release --example impedance_spectrum [out.csv]
//! ```

use std::fs::File;

use heatbath::circuit::{
    default_grid_points, dispersion, find_modes, impedance_sweep, input_impedance, write_impedance_csv, CircuitSpec,
    Termination,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for ratio in [0.0, 100.0] {
        let spec = CircuitSpec::new(1.0, ratio, 1.0, 3000, Termination::Open)?;
        let lo = 0.5 * dispersion(&spec, 1)?;
        let hi = 0.5 * (dispersion(&spec, 10)? + dispersion(&spec, 11)?);
        let modes = find_modes(&spec, lo, hi, default_grid_points(&spec, lo, hi))?;
        println!("C/Cg = {ratio}: plasma frequency {:.4}", spec.plasma_frequency());
        println!("  n   scan          dispersion    rel. diff");
        for (n, w) in modes.iter().enumerate() {
            let expected = dispersion(&spec, n + 1)?;
            println!("{:3}   {w:.9}   {expected:.9}   {:+.2e}", n + 1, w / expected - 1.0);
        }
    }

    let spec = CircuitSpec::new(1.0, 100.0, 1.0, 3000, Termination::Open)?;
    let wp = spec.plasma_frequency();
    println!("\n|Z| ω √(C Cg) above the plasma frequency (C/Cg = 100)");
    for k in [2.0, 5.0, 8.0, 10.0, 20.0, 50.0, 1e3] {
        let w = k * wp;
        let r = input_impedance(&spec, w)?.abs_impedance() * w * (spec.c() * spec.cg()).sqrt();
        println!("  {k:6}  ω_p   {r:.6}");
    }

    if let Some(path) = std::env::args().nth(1) {
        let sweep = impedance_sweep(&spec, 1e-3 * wp, 3.0 * wp, 20_000)?;
        write_impedance_csv(File::create(&path)?, &sweep, wp)?;
        println!("\nsweep (ω in units of ω_p) written to {path}");
    }
    Ok(())
}
