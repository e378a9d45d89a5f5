//! Preparation fidelity of the Bell-pair and cluster resources under
//! per-gate noise, as CSV.

use qbroadcast::cli::{cmd_sweep, SweepArgs, SweepConfig};

fn main() -> qbroadcast::Result<()> {
    let config = SweepConfig::from_args(&SweepArgs {
        noise: Some("all".into()),
        step: Some(0.1),
        ..Default::default()
    })?;
    print!("{}", cmd_sweep(&config)?);
    Ok(())
}
