use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::Instant;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::SimulateArgs;
use crate::channels::ordered_pairs;
use crate::metrics::{receiver_fidelities_with, resource_count, BranchFilter, ResourceCount};
use crate::noise::{NoiseKind, NoiseMode, NoiseSpec};
use crate::protocol::{
    run_bell_rsp_broadcast, run_cluster_broadcast, run_cluster_plus_broadcast, run_joint_broadcast,
    run_multidirectional, run_phase_chain, run_probabilistic_broadcast, BroadcastMode, ControlledSession, KnownQubit,
    Transcript,
};
use crate::{Error, Result};

pub const DEFAULT_SHOTS: u64 = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolId {
    Cluster,
    ClusterPlus,
    BellRsp,
    BellTeleport,
    Probabilistic,
    Joint,
    PhaseChain,
    Controlled,
    Multidirectional,
}

impl std::str::FromStr for ProtocolId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::InvalidArgument(format!("unknown protocol `{s}`")))
    }
}

/// Fully resolved `simulate` settings; angles in radians.
#[derive(Debug, Clone)]
pub struct SimulateConfig {
    pub protocol: ProtocolId,
    pub target: KnownQubit,
    pub receivers: usize,
    pub phases: Vec<f64>,
    pub link_b: Vec<f64>,
    pub disclose: bool,
    pub adaptive: bool,
    pub parties: usize,
    pub noise: Option<NoiseSpec>,
    pub seed: u64,
    pub shots: Option<u64>,
    pub timing: bool,
}

pub(crate) fn target_from(class: Option<&str>, theta: Option<f64>, phi: Option<f64>) -> Result<KnownQubit> {
    let theta = theta.unwrap_or(0.25) * PI;
    let phi = phi.unwrap_or(0.0) * PI;
    match class.unwrap_or("real-polar") {
        "real-polar" => Ok(KnownQubit::real_polar(theta)),
        "equatorial" => Ok(KnownQubit::equatorial(phi)),
        "general" => Ok(KnownQubit::general(theta, phi)),
        other => Err(Error::InvalidArgument(format!("unknown target class `{other}`"))),
    }
}

pub(crate) fn noise_from(kind: Option<&str>, p: Option<f64>, mode: Option<&str>) -> Result<Option<NoiseSpec>> {
    let Some(kind) = kind else {
        return Ok(None);
    };
    let channel = kind.parse::<NoiseKind>()?.channel(p.unwrap_or(0.0))?;
    Ok(Some(match mode.unwrap_or("per-gate").parse::<NoiseMode>()? {
        NoiseMode::PerGate => NoiseSpec::per_gate(channel),
        NoiseMode::TransmittedQubit => NoiseSpec::transmitted(channel),
    }))
}

impl SimulateConfig {
    pub fn from_args(a: &SimulateArgs) -> Result<Self> {
        let protocol = a.protocol.as_deref().unwrap_or("bell-rsp").parse()?;
        Ok(Self {
            protocol,
            target: target_from(a.class.as_deref(), a.theta, a.phi)?,
            receivers: a.receivers.unwrap_or(2),
            phases: a
                .phases
                .clone()
                .unwrap_or_else(|| vec![0.5])
                .into_iter()
                .map(|x| x * PI)
                .collect(),
            link_b: a.link_b.clone().unwrap_or_else(|| vec![0.6]),
            disclose: a.disclose.unwrap_or(false),
            adaptive: a.adaptive.unwrap_or(true),
            parties: a.parties.unwrap_or(3),
            noise: noise_from(a.noise.as_deref(), a.p, a.noise_mode.as_deref())?,
            seed: a.common.seed.unwrap_or(0),
            shots: a
                .sample
                .unwrap_or(false)
                .then(|| a.common.shots.unwrap_or(DEFAULT_SHOTS)),
            timing: a.timing.unwrap_or(false),
        })
    }

    /// State each receiver should end with.
    fn expected(&self) -> KnownQubit {
        match self.protocol {
            ProtocolId::PhaseChain => KnownQubit::general(self.target.theta(), self.phases.iter().sum()),
            ProtocolId::Joint => KnownQubit::general(self.target.theta(), self.target.phi()),
            _ => self.target,
        }
    }

    fn run(&self) -> Result<Transcript> {
        let noise = self.noise.as_ref();
        let t = &self.target;
        let m = self.receivers;
        match self.protocol {
            ProtocolId::Cluster => run_cluster_broadcast(t, noise),
            ProtocolId::ClusterPlus => run_cluster_plus_broadcast(t, noise),
            ProtocolId::BellRsp => run_bell_rsp_broadcast(t, m, BroadcastMode::Rsp, noise),
            ProtocolId::BellTeleport => run_bell_rsp_broadcast(t, m, BroadcastMode::Teleport, noise),
            ProtocolId::Probabilistic => {
                let links: Vec<_> = self
                    .link_b
                    .iter()
                    .map(|&b| ((1.0 - b * b).max(0.0).sqrt(), b))
                    .collect();
                run_probabilistic_broadcast(t, &links, noise)
            }
            ProtocolId::Joint => run_joint_broadcast(t.theta(), t.phi(), m, self.adaptive, noise),
            ProtocolId::PhaseChain => run_phase_chain(t.theta(), &self.phases, m, noise),
            ProtocolId::Controlled => ControlledSession::new(*t, m, self.seed)?
                .with_noise(self.noise.clone())
                .run(self.disclose),
            ProtocolId::Multidirectional => {
                let targets = ordered_pairs(self.parties).into_iter().map(|p| (p, *t)).collect();
                run_multidirectional(self.parties, &targets, noise)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReceiverReport {
    pub sender: String,
    pub receiver: String,
    /// Probability-weighted fidelity over all branches.
    pub fidelity: f64,
    /// Same, conditioned on success.
    pub success_fidelity: f64,
    pub cbits: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeProbability {
    pub outcome: String,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotReport {
    pub shots: u64,
    pub counts: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Resources {
    pub bell_pairs: usize,
    pub channel_qubits: usize,
    /// Bell pairs an optimal scheme needs for this many receivers.
    pub optimal: ResourceCount,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub protocol: String,
    pub target: KnownQubit,
    pub branches: usize,
    pub receivers: Vec<ReceiverReport>,
    pub success_probability: f64,
    pub outcomes: Vec<OutcomeProbability>,
    pub resources: Resources,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sampling: Option<ShotReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timing_ms: Option<f64>,
}

/// Draws `shots` branches according to their probabilities and counts the
/// sender outcome strings.
pub fn sample_outcomes(t: &Transcript, shots: u64, seed: u64) -> Result<ShotReport> {
    let weights: Vec<f64> = t.branches.iter().map(|b| b.probability).collect();
    let dist = WeightedIndex::new(&weights).map_err(|e| Error::InvalidArgument(format!("sampling: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts: BTreeMap<String, u64> = t.outcome_distribution().into_iter().map(|(k, _)| (k, 0)).collect();
    for _ in 0..shots {
        *counts
            .entry(t.branches[dist.sample(&mut rng)].outcome_bits())
            .or_insert(0) += 1;
    }
    Ok(ShotReport { shots, counts })
}

pub fn cmd_simulate(config: &SimulateConfig) -> Result<RunReport> {
    let start = Instant::now();
    let t = config.run()?;
    let expected = config.expected();
    let psi = expected.state();
    let all = receiver_fidelities_with(&t, BranchFilter::All, |_| psi.clone())?;
    let ok = receiver_fidelities_with(&t, BranchFilter::SuccessOnly, |_| psi.clone())?;
    let cbits = t.cbits_per_receiver();
    let receivers = all
        .iter()
        .zip(&ok)
        .map(|(a, s)| ReceiverReport {
            sender: a.slot.sender.to_string(),
            receiver: a.slot.receiver.to_string(),
            fidelity: a.average,
            success_fidelity: s.average,
            cbits: cbits.get(&a.slot.receiver).copied().unwrap_or(0),
        })
        .collect::<Vec<_>>();
    let sampling = match config.shots {
        Some(shots) => Some(sample_outcomes(&t, shots, config.seed)?),
        None => None,
    };
    let receiver_count =
        u32::try_from(receivers.len().max(1)).map_err(|_| Error::InvalidArgument("too many receivers".into()))?;
    Ok(RunReport {
        protocol: t.protocol.clone(),
        target: expected,
        branches: t.branches.len(),
        receivers,
        success_probability: t.success_probability,
        outcomes: t
            .outcome_distribution()
            .into_iter()
            .map(|(outcome, probability)| OutcomeProbability { outcome, probability })
            .collect(),
        resources: Resources {
            bell_pairs: t.bell_pairs,
            channel_qubits: t.channel_qubits,
            optimal: resource_count(2, receiver_count)?,
        },
        seed: config.seed,
        sampling,
        timing_ms: config.timing.then(|| start.elapsed().as_secs_f64() * 1e3),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(args: SimulateArgs) -> SimulateConfig {
        SimulateConfig::from_args(&args).unwrap()
    }

    #[test]
    fn equatorial_bell_rsp_report() {
        let report = cmd_simulate(&config(SimulateArgs {
            protocol: Some("bell-rsp".into()),
            class: Some("equatorial".into()),
            phi: Some(0.0),
            ..Default::default()
        }))
        .unwrap();
        assert_eq!(report.resources.bell_pairs, 2);
        assert_eq!(report.resources.optimal.bell_pairs, 2);
        for r in &report.receivers {
            assert!((r.fidelity - 1.0).abs() < 1e-9);
            assert_eq!(r.cbits, 1);
        }
        assert!(report.timing_ms.is_none());
    }

    #[test]
    fn controlled_without_disclosure() {
        let report = cmd_simulate(&config(SimulateArgs {
            protocol: Some("controlled".into()),
            ..Default::default()
        }))
        .unwrap();
        for r in &report.receivers {
            assert!((r.fidelity - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn unsupported_combination_is_an_error() {
        let c = config(SimulateArgs {
            protocol: Some("cluster".into()),
            class: Some("general".into()),
            ..Default::default()
        });
        assert!(matches!(cmd_simulate(&c), Err(Error::UnsupportedClass { .. })));
        assert!("nonsense".parse::<ProtocolId>().is_err());
    }

    #[test]
    fn sampling_is_seeded() {
        let c = config(SimulateArgs {
            protocol: Some("cluster".into()),
            sample: Some(true),
            ..Default::default()
        });
        let a = cmd_simulate(&c).unwrap().sampling.unwrap();
        let b = cmd_simulate(&c).unwrap().sampling.unwrap();
        assert_eq!(a, b);
        assert_eq!(a.shots, DEFAULT_SHOTS);
        assert_eq!(a.counts.values().sum::<u64>(), DEFAULT_SHOTS);
    }
}
