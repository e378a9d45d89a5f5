use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::simulate::target_from;
use super::SweepArgs;
use crate::circuit::{bell_pair_prep, cluster_prep, Circuit};
use crate::metrics::{receiver_fidelities, BranchFilter};
use crate::noise::{inject, NoiseKind, NoiseMode, NoiseSpec, NoisyStep};
use crate::protocol::{run_bell_rsp_broadcast, run_cluster_broadcast, BroadcastMode, KnownQubit};
use crate::tensor::{DensityMatrix, QubitIndex, StateVector};
use crate::{Error, Result};

pub const CSV_HEADER: &str = "noise_type,mode,p,channel,fidelity";

/// Grid points above this are refused.
const MAX_POINTS: usize = 100_000;

/// `%g`-style formatting with 12 significant digits.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let s = format!("{x:.11e}");
        let (mantissa, exponent) = s.split_once('e').expect("exponent form");
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        let e: i32 = exponent.parse().expect("integer exponent");
        format!("{mantissa}e{}{:02}", if e < 0 { '-' } else { '+' }, e.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepChannel {
    BellPair,
    Cluster,
}

impl SweepChannel {
    pub const ALL: [SweepChannel; 2] = [SweepChannel::BellPair, SweepChannel::Cluster];

    pub fn name(self) -> &'static str {
        match self {
            SweepChannel::BellPair => "bell-pair",
            SweepChannel::Cluster => "cluster",
        }
    }

    fn prep(self) -> Circuit {
        match self {
            SweepChannel::BellPair => bell_pair_prep(),
            SweepChannel::Cluster => cluster_prep(),
        }
    }

    fn travelling(self) -> [QubitIndex; 2] {
        match self {
            SweepChannel::BellPair => [QubitIndex(1), QubitIndex(3)],
            SweepChannel::Cluster => [QubitIndex(2), QubitIndex(3)],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SweepTarget {
    /// Fidelity of the prepared four-qubit resource with its ideal state.
    Prep,
    /// Mean receiver fidelity after a two-receiver broadcast.
    Broadcast,
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    quantity: SweepTarget,
    pub target: KnownQubit,
    pub kinds: Vec<NoiseKind>,
    pub mode: NoiseMode,
    pub grid: Vec<f64>,
    pub channels: Vec<SweepChannel>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub kind: NoiseKind,
    pub mode: NoiseMode,
    pub p: f64,
    pub channel: SweepChannel,
    pub fidelity: f64,
}

impl SweepRow {
    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.kind.name(),
            self.mode.name(),
            fmt_sig(self.p),
            self.channel.name(),
            fmt_sig(self.fidelity)
        )
    }
}

fn grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if step.is_nan() || step <= 0.0 || !start.is_finite() || !stop.is_finite() || stop < start {
        return Err(Error::InvalidArgument(format!(
            "bad sweep range {start}..{stop} step {step}"
        )));
    }
    let span = ((stop - start) / step + 1e-9).floor();
    if span >= MAX_POINTS as f64 {
        return Err(Error::InvalidArgument("sweep grid too large".into()));
    }
    Ok((0..=span as usize).map(|i| start + i as f64 * step).collect())
}

impl SweepConfig {
    pub fn from_args(a: &SweepArgs) -> Result<Self> {
        let quantity = match a.protocol.as_deref().unwrap_or("prep") {
            "prep" => SweepTarget::Prep,
            "broadcast" => SweepTarget::Broadcast,
            other => return Err(Error::InvalidArgument(format!("unknown sweep protocol `{other}`"))),
        };
        let kinds = match a.noise.as_deref().unwrap_or("all") {
            "all" => NoiseKind::STANDARD.to_vec(),
            one => vec![one.parse()?],
        };
        let channels = match a.channels.as_deref().unwrap_or("both") {
            "both" => SweepChannel::ALL.to_vec(),
            "bell-pair" => vec![SweepChannel::BellPair],
            "cluster" => vec![SweepChannel::Cluster],
            other => return Err(Error::InvalidArgument(format!("unknown sweep channel `{other}`"))),
        };
        let grid = grid(a.start.unwrap_or(0.0), a.stop.unwrap_or(0.5), a.step.unwrap_or(0.05))?;
        if grid.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidArgument("noise strengths must lie in [0, 1]".into()));
        }
        Ok(Self {
            quantity,
            target: target_from(a.class.as_deref(), a.theta, a.phi)?,
            kinds,
            mode: a.noise_mode.as_deref().unwrap_or("per-gate").parse()?,
            grid,
            channels,
        })
    }
}

/// Fidelity of the noisy four-qubit resource with the noiseless one.
pub fn prep_fidelity(channel: SweepChannel, spec: &NoiseSpec) -> Result<f64> {
    let circuit = channel.prep();
    let zero = StateVector::basis(4, 0);
    let ideal = circuit.run_pure(&zero)?;
    let initial = DensityMatrix::from_pure(&zero);
    let receivers = channel.travelling();
    let rho = match spec.mode {
        NoiseMode::PerGate => circuit.evolve(&initial, Some(spec))?,
        NoiseMode::TransmittedQubit => {
            let clean = circuit.evolve(&initial, None)?;
            inject(
                NoisyStep::Distribution {
                    state: &clean,
                    receivers: &receivers,
                },
                spec,
            )?
        }
    };
    Ok(rho.expectation(&ideal).clamp(0.0, 1.0))
}

fn broadcast_fidelity(channel: SweepChannel, target: &KnownQubit, spec: &NoiseSpec) -> Result<f64> {
    let t = match channel {
        SweepChannel::BellPair => run_bell_rsp_broadcast(target, 2, BroadcastMode::Rsp, Some(spec))?,
        SweepChannel::Cluster => run_cluster_broadcast(target, Some(spec))?,
    };
    let per = receiver_fidelities(&t, target, BranchFilter::All)?;
    Ok(per.iter().map(|r| r.average).sum::<f64>() / per.len() as f64)
}

pub fn sweep_rows(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    let mut jobs = Vec::new();
    for &kind in &config.kinds {
        for &p in &config.grid {
            for &channel in &config.channels {
                jobs.push((kind, p, channel));
            }
        }
    }
    jobs.into_par_iter()
        .map(|(kind, p, channel)| {
            let spec = match config.mode {
                NoiseMode::PerGate => NoiseSpec::per_gate(kind.channel(p)?),
                NoiseMode::TransmittedQubit => NoiseSpec::transmitted(kind.channel(p)?),
            };
            let fidelity = match config.quantity {
                SweepTarget::Prep => prep_fidelity(channel, &spec)?,
                SweepTarget::Broadcast => broadcast_fidelity(channel, &config.target, &spec)?,
            };
            Ok(SweepRow {
                kind,
                mode: config.mode,
                p,
                channel,
                fidelity,
            })
        })
        .collect()
}

/// CSV text: header plus one row per (noise kind, p, channel), LF endings.
pub fn cmd_sweep(config: &SweepConfig) -> Result<String> {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in sweep_rows(config)? {
        out.push_str(&row.csv());
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(0.05), "0.05");
        assert_eq!(fmt_sig(0.1 + 0.2), "0.3");
        assert_eq!(fmt_sig(1.0), "1");
        assert_eq!(fmt_sig(0.443560417413), "0.443560417413");
        assert_eq!(fmt_sig(1.5e-7), "1.5e-07");
        assert_eq!(fmt_sig(-2.25), "-2.25");
    }

    #[test]
    fn grid_endpoints() {
        let g = grid(0.0, 0.5, 0.05).unwrap();
        assert_eq!(g.len(), 11);
        assert!((g[10] - 0.5).abs() < 1e-12);
        assert!(grid(0.5, 0.0, 0.1).is_err());
        assert!(grid(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn csv_shape() {
        let c = SweepConfig::from_args(&SweepArgs {
            noise: Some("bit-flip".into()),
            stop: Some(0.1),
            ..Default::default()
        })
        .unwrap();
        let text = cmd_sweep(&c).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 1 + 3 * 2);
        assert_eq!(lines[1], "bit-flip,per-gate,0,bell-pair,1");
        assert!(!text.contains('\r'));
    }

    #[test]
    fn transmitted_prep_oracle() {
        // Bit flip on qubit 1 of |Φ+⟩ gives |Ψ+⟩, orthogonal to the ideal.
        let p = 0.3;
        let spec = NoiseSpec::transmitted(NoiseKind::BitFlip.channel(p).unwrap());
        let f = prep_fidelity(SweepChannel::BellPair, &spec).unwrap();
        assert!((f - (1.0 - p) * (1.0 - p)).abs() < 1e-12);
    }
}
