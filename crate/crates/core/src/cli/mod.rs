//! Command-line front end: `simulate`, `sweep`, `resources`, `export-qasm`.
//!
//! Every command can read a JSON config file (`--config`) whose keys are the
//! long flag names; flags given on the command line win. Angles are in units
//! of π.

mod simulate;
mod sweep;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::circuit::CircuitId;
use crate::metrics::resource_count;
use crate::qasm::to_qasm;
use crate::{Error, Result};

pub use simulate::{cmd_simulate, RunReport, SimulateConfig};
pub use sweep::{cmd_sweep, fmt_sig, SweepChannel, SweepConfig, SweepRow, CSV_HEADER};

#[derive(Debug, Parser)]
#[command(name = "qbroadcast", version, about = "Simulate broadcasting of known qubit states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one protocol and print a JSON report.
    Simulate(SimulateArgs),
    /// Sweep a noise strength and print CSV fidelities.
    Sweep(SweepArgs),
    /// Bell pairs needed for an m-coefficient state and n receivers.
    Resources(ResourcesArgs),
    /// Print a named circuit as OpenQASM 2.0.
    ExportQasm(ExportArgs),
}

/// Flags shared by every command.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct CommonArgs {
    /// Seed for every random choice.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Shots in sampling mode.
    #[arg(long)]
    pub shots: Option<u64>,
    /// Write output here instead of stdout.
    #[arg(long)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
    /// JSON file with default values for any long flag.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SimulateArgs {
    /// cluster, cluster-plus, bell-rsp, bell-teleport, probabilistic, joint,
    /// phase-chain, controlled or multidirectional.
    #[arg(long)]
    pub protocol: Option<String>,
    /// real-polar, equatorial or general.
    #[arg(long)]
    pub class: Option<String>,
    /// Polar angle in units of π.
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    /// Phase in units of π.
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    #[arg(long)]
    pub receivers: Option<usize>,
    /// Phase-chain phases in units of π, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub phases: Option<Vec<f64>>,
    /// Probabilistic links: the `b` of each `a|00⟩+b|11⟩`, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub link_b: Option<Vec<f64>>,
    /// Controlled protocol: reveal the controller's choice.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub disclose: Option<bool>,
    /// Joint protocol: second sender adapts to the first.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub adaptive: Option<bool>,
    /// Parties in the multi-directional protocol.
    #[arg(long)]
    pub parties: Option<usize>,
    /// Noise kind: bit-flip, depolarizing, amplitude-damping, phase-damping.
    #[arg(long)]
    pub noise: Option<String>,
    /// Noise strength.
    #[arg(long)]
    pub p: Option<f64>,
    /// transmitted-qubit or per-gate.
    #[arg(long)]
    pub noise_mode: Option<String>,
    /// Also sample outcomes with `--shots` shots.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub sample: Option<bool>,
    /// Include wall-clock time in the report.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub timing: Option<bool>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SweepArgs {
    /// prep (state preparation only) or broadcast.
    #[arg(long)]
    pub protocol: Option<String>,
    #[arg(long)]
    pub class: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    /// A noise kind, or `all`.
    #[arg(long)]
    pub noise: Option<String>,
    #[arg(long)]
    pub noise_mode: Option<String>,
    #[arg(long)]
    pub start: Option<f64>,
    #[arg(long)]
    pub stop: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    /// bell-pair, cluster or both.
    #[arg(long)]
    pub channels: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ResourcesArgs {
    /// Coefficients of the broadcast state.
    #[arg(long)]
    pub m: u64,
    /// Receivers.
    #[arg(long)]
    pub n: u32,
    /// Print JSON instead of the bare number.
    #[arg(long)]
    pub json: bool,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ExportArgs {
    /// fig1a, fig1b, fig3a or fig3b.
    pub circuit: String,
    #[command(flatten)]
    pub common: CommonArgs,
}

/// Overlays `flags` on the config file, flags winning.
pub fn merge_config<T: Serialize + DeserializeOwned>(flags: &T, config: Option<&Path>) -> Result<T> {
    let Some(path) = config else {
        return from_value(serde_json::to_value(flags).map_err(json_err)?);
    };
    let text = fs::read_to_string(path)?;
    let mut merged: Value = serde_json::from_str(&text).map_err(json_err)?;
    if !merged.is_object() {
        return Err(Error::InvalidArgument("config file must hold a JSON object".into()));
    }
    if let Value::Object(flag_map) = serde_json::to_value(flags).map_err(json_err)? {
        let target = merged.as_object_mut().expect("checked above");
        for (k, v) in flag_map {
            if !v.is_null() {
                target.insert(k, v);
            }
        }
    }
    from_value(merged)
}

fn from_value<T: DeserializeOwned>(v: Value) -> Result<T> {
    serde_json::from_value(v).map_err(json_err)
}

fn json_err(e: serde_json::Error) -> Error {
    Error::InvalidArgument(format!("config: {e}"))
}

/// Bare count, or JSON with `json`.
pub fn cmd_resources(m: u64, n: u32, json: bool) -> Result<String> {
    let count = resource_count(m, n)?;
    if json {
        Ok(serde_json::to_string_pretty(&count).map_err(json_err)? + "\n")
    } else {
        Ok(format!("{}\n", count.bell_pairs))
    }
}

pub fn cmd_export_qasm(id: &str) -> Result<String> {
    let id: CircuitId = id.parse()?;
    Ok(to_qasm(&id.circuit()))
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Runs a parsed command line.
pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(args) => {
            let merged: SimulateArgs = merge_config(&args, args.common.config.as_deref())?;
            let config = SimulateConfig::from_args(&merged)?;
            let report = cmd_simulate(&config)?;
            let text = serde_json::to_string_pretty(&report).map_err(json_err)? + "\n";
            emit(&text, args.common.output.as_deref())
        }
        Command::Sweep(args) => {
            let merged: SweepArgs = merge_config(&args, args.common.config.as_deref())?;
            let config = SweepConfig::from_args(&merged)?;
            emit(&cmd_sweep(&config)?, args.common.output.as_deref())
        }
        Command::Resources(args) => emit(
            &cmd_resources(args.m, args.n, args.json)?,
            args.common.output.as_deref(),
        ),
        Command::ExportQasm(args) => emit(&cmd_export_qasm(&args.circuit)?, args.common.output.as_deref()),
    }
}

/// Parses `std::env::args`, runs, and returns the process exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resources_text() {
        assert_eq!(cmd_resources(4, 1, false).unwrap(), "2\n");
        assert_eq!(cmd_resources(2, 10, false).unwrap(), "10\n");
        assert!(cmd_resources(2, 1, true).unwrap().contains("\"bell_pairs\": 1"));
        assert!(cmd_resources(1, 1, false).is_err());
    }

    #[test]
    fn export_unknown() {
        assert!(matches!(cmd_export_qasm("fig9"), Err(Error::UnknownCircuit(_))));
    }

    #[test]
    fn flags_override_config() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        fs::write(&path, r#"{"protocol": "cluster", "theta": 0.5, "seed": 4}"#).unwrap();
        let flags = SimulateArgs {
            theta: Some(0.25),
            ..Default::default()
        };
        let merged = merge_config(&flags, Some(&path)).unwrap();
        assert_eq!(merged.protocol.as_deref(), Some("cluster"));
        assert_eq!(merged.theta, Some(0.25));
        assert_eq!(merged.common.seed, Some(4));
    }

    #[test]
    fn parses_command_lines() {
        let cli = Cli::try_parse_from([
            "qbroadcast",
            "simulate",
            "--protocol",
            "joint",
            "--phi",
            "-0.5",
            "--adaptive",
        ])
        .unwrap();
        match cli.command {
            Command::Simulate(a) => {
                assert_eq!(a.phi, Some(-0.5));
                assert_eq!(a.adaptive, Some(true));
            }
            _ => panic!("wrong subcommand"),
        }
        let cli = Cli::try_parse_from(["qbroadcast", "resources", "--m", "4", "--n", "1"]).unwrap();
        assert!(matches!(
            cli.command,
            Command::Resources(ResourcesArgs { m: 4, n: 1, .. })
        ));
    }
}
