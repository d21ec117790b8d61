//! Mode frequencies of a junction array for both terminations, bare and
//! dressed by the junction capacitance.
//!
//! ```text
//! cargo run --example dispersion_table [N] [C/Cg]
//! ```

use heatbath::circuit::{CircuitSpec, DispersionTable, Termination};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(Ok(3000), |a| a.parse())?;
    let ratio: f64 = args.next().map_or(Ok(100.0), |a| a.parse())?;

    for termination in [Termination::Open, Termination::Short] {
        let spec = CircuitSpec::new(1.0, ratio, 1.0, n, termination)?;
        let table = DispersionTable::new(&spec, n)?;
        println!("{termination:?}, N = {n}, C/Cg = {ratio}, ω_p = {:.4}", spec.plasma_frequency());
        let picks = [1, 2, 3, n / 100, n / 10, n / 2, n].map(|k| k.max(1));
        for row in picks.iter().map(|&k| &table.rows[k - 1]) {
            println!("  n = {:5}   ω_n0 = {:10.6}   ω_n = {:.6}", row.n, row.omega_n0, row.omega_n);
        }
    }
    Ok(())
}
