use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::PauliFrame;
use crate::channels::PartyId;
use crate::tensor::DensityMatrix;

/// One measurement result.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub party: PartyId,
    pub label: String,
    pub value: usize,
    /// Number of classical bits the value occupies.
    pub width: usize,
}

impl Outcome {
    pub fn bits(&self) -> String {
        format!("{:0width$b}", self.value, width = self.width)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub from: PartyId,
    pub to: PartyId,
    pub bits: Vec<u8>,
}

/// A Pauli applied by `party`, with the indices into the branch's message
/// list that determined it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Correction {
    pub party: PartyId,
    pub pauli: PauliFrame,
    pub cites: Vec<usize>,
}

/// Which sender's state a receiver output is meant to hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct OutputSlot {
    pub sender: PartyId,
    pub receiver: PartyId,
}

#[derive(Debug, Clone)]
pub struct Branch {
    pub outcomes: Vec<Outcome>,
    pub probability: f64,
    pub messages: Vec<Message>,
    pub corrections: Vec<Correction>,
    /// Reduced single-qubit state at each receiver after corrections.
    pub outputs: Vec<(OutputSlot, DensityMatrix)>,
    pub success: bool,
}

impl Branch {
    /// Sender measurement results concatenated in protocol order; filter
    /// results at the receivers are left out.
    pub fn outcome_bits(&self) -> String {
        self.outcomes
            .iter()
            .filter(|o| !matches!(o.party, PartyId::Receiver(_)))
            .map(Outcome::bits)
            .collect()
    }

    pub fn output(&self, receiver: PartyId) -> Option<&DensityMatrix> {
        self.outputs
            .iter()
            .find(|(s, _)| s.receiver == receiver)
            .map(|(_, rho)| rho)
    }
}

#[derive(Debug, Clone)]
pub struct Transcript {
    pub protocol: String,
    pub branches: Vec<Branch>,
    /// Total probability of branches flagged successful.
    pub success_probability: f64,
    pub bell_pairs: usize,
    pub channel_qubits: usize,
}

impl Transcript {
    pub(crate) fn new(protocol: &str, branches: Vec<Branch>, bell_pairs: usize, channel_qubits: usize) -> Self {
        let success_probability = branches.iter().filter(|b| b.success).map(|b| b.probability).sum();
        Self {
            protocol: protocol.to_string(),
            branches,
            success_probability,
            bell_pairs,
            channel_qubits,
        }
    }

    pub fn total_probability(&self) -> f64 {
        self.branches.iter().map(|b| b.probability).sum()
    }

    /// Output slots in the order they appear in the first branch.
    pub fn slots(&self) -> Vec<OutputSlot> {
        self.branches
            .first()
            .map(|b| b.outputs.iter().map(|(s, _)| *s).collect())
            .unwrap_or_default()
    }

    /// Classical bits each receiver gets, read off the first branch. Every
    /// branch of these protocols sends the same message pattern.
    pub fn cbits_per_receiver(&self) -> BTreeMap<PartyId, usize> {
        let mut out = BTreeMap::new();
        if let Some(b) = self.branches.first() {
            for m in &b.messages {
                if matches!(m.to, PartyId::Receiver(_)) {
                    *out.entry(m.to).or_insert(0) += m.bits.len();
                }
            }
        }
        out
    }

    /// Probability of each sender outcome string, merged over receiver-side
    /// filter results, in first-appearance order.
    pub fn outcome_distribution(&self) -> Vec<(String, f64)> {
        let mut out: Vec<(String, f64)> = Vec::new();
        for b in &self.branches {
            let key = b.outcome_bits();
            match out.iter_mut().find(|(k, _)| *k == key) {
                Some((_, p)) => *p += b.probability,
                None => out.push((key, b.probability)),
            }
        }
        out
    }
}
