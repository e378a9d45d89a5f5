//! The JSON report behind `qbroadcast simulate`, with seeded shot sampling.

use qbroadcast::cli::{cmd_simulate, CommonArgs, SimulateArgs, SimulateConfig};

fn main() -> qbroadcast::Result<()> {
    let args = SimulateArgs {
        protocol: Some("cluster-plus".into()),
        class: Some("equatorial".into()),
        phi: Some(0.0),
        sample: Some(true),
        common: CommonArgs {
            seed: Some(7),
            shots: Some(8192),
            ..Default::default()
        },
        ..Default::default()
    };
    let report = cmd_simulate(&SimulateConfig::from_args(&args)?)?;
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    Ok(())
}
