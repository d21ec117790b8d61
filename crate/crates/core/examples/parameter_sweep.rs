//! Config-driven sweep: the detuning of a degenerate bath over several
//! values, run in parallel, each run with its own manifest.
//!
//! ```text
//! cargo run --release --example parameter_sweep [out_dir]
//! ```

use heatbath::config::parse_config;
use heatbath::runner::{sweep, Pipeline};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "out/sweep_r".into());
    let text = include_str!("configs/degenerate_tls.ini");
    let mut config = parse_config(text)?;
    config.output.directory = dir.clone();

    let values: Vec<String> = ["0", "0.1", "0.25", "0.5"].iter().map(|s| s.to_string()).collect();
    let outcome = sweep(&config, "bath.r", &values, 2, Pipeline::Evolve);
    for row in &outcome.rows {
        let p = row.measurements.plateau_mean.unwrap_or(f64::NAN);
        println!("r = {:5}  {:?}  mean p_e over the second half {p:.4}", row.value, row.status);
    }
    println!("summary in {dir}/summary.csv, exit status {}", outcome.status.code());
    Ok(())
}
