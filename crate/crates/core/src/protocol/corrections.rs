use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::broadcast::{cluster_piece, cluster_plus_piece, rsp_piece, teleport_piece, Link};
use super::joint::joint_piece;
use super::transcript::Branch;
use super::{KnownQubit, TargetClass};
use crate::channels::PartyId;
use crate::noise::pauli_matrix;
use crate::tensor::{CMatrix, EQUALITY_TOL};
use crate::{Error, Result};

/// `Z^z X^x`, with X applied first. Global phases are not tracked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct PauliFrame {
    pub x: bool,
    pub z: bool,
}

impl PauliFrame {
    pub const I: PauliFrame = PauliFrame { x: false, z: false };
    pub const X: PauliFrame = PauliFrame { x: true, z: false };
    pub const Z: PauliFrame = PauliFrame { x: false, z: true };
    pub const ZX: PauliFrame = PauliFrame { x: true, z: true };
    pub const ALL: [PauliFrame; 4] = [PauliFrame::I, PauliFrame::X, PauliFrame::Z, PauliFrame::ZX];

    pub fn matrix(self) -> CMatrix {
        let mut m = CMatrix::identity(2, 2);
        if self.x {
            m = pauli_matrix('X') * m;
        }
        if self.z {
            m = pauli_matrix('Z') * m;
        }
        m
    }

    /// The frame equal, up to phase, to applying `first` and then `self`.
    pub fn after(self, first: PauliFrame) -> PauliFrame {
        PauliFrame {
            x: self.x ^ first.x,
            z: self.z ^ first.z,
        }
    }
}

impl fmt::Display for PauliFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match (self.z, self.x) {
            (false, false) => "I",
            (false, true) => "X",
            (true, false) => "Z",
            (true, true) => "ZX",
        })
    }
}

/// Protocols with a fixed Pauli correction table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolKind {
    /// Four-qubit cluster resource with the `−|1111⟩` sign.
    Cluster,
    /// Four-qubit all-plus resource, one product measurement per receiver.
    ClusterPlus,
    /// One Bell pair, one classical bit.
    BellRsp,
    /// One Bell pair, two classical bits.
    Teleport,
    /// GHZ link, adaptive second sender.
    Joint,
    /// GHZ link, second sender ignores the first sender's result.
    JointNonAdaptive,
}

impl ProtocolKind {
    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::Cluster => "cluster",
            ProtocolKind::ClusterPlus => "cluster-plus",
            ProtocolKind::BellRsp => "bell-rsp",
            ProtocolKind::Teleport => "teleport",
            ProtocolKind::Joint => "joint",
            ProtocolKind::JointNonAdaptive => "joint-non-adaptive",
        }
    }

    /// Width of the sender outcome index.
    pub fn outcome_width(self) -> usize {
        match self {
            ProtocolKind::BellRsp => 1,
            _ => 2,
        }
    }
}

/// Outcome index to one Pauli per receiver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrectionRule {
    pub protocol: ProtocolKind,
    pub class: TargetClass,
    pub frames: BTreeMap<usize, Vec<PauliFrame>>,
}

impl CorrectionRule {
    pub fn frames(&self, outcome: usize) -> Option<&[PauliFrame]> {
        self.frames.get(&outcome).map(Vec::as_slice)
    }

    /// Outcome index as a bit string, e.g. `"11"`.
    pub fn label(&self, outcome: usize) -> String {
        format!("{:0w$b}", outcome, w = self.protocol.outcome_width())
    }
}

/// Outcome index to frames, `None` where no Pauli recovers the target.
pub(crate) type PartialRule = BTreeMap<usize, Option<Vec<PauliFrame>>>;

/// Frame for receiver `slot` of a piece, or `None` for a failed branch.
/// Without a rule the piece runs uncorrected.
pub(crate) fn frame_for(rule: Option<&PartialRule>, key: usize, slot: usize) -> Option<PauliFrame> {
    match rule {
        None => Some(PauliFrame::I),
        Some(rule) => rule.get(&key).cloned().flatten().map(|f| f[slot]),
    }
}

/// Generic members of each class used to search for corrections; the second
/// of each pair re-checks what the first found.
fn probe_targets(class: TargetClass) -> [KnownQubit; 2] {
    match class {
        TargetClass::RealPolar => [KnownQubit::real_polar(0.37), KnownQubit::real_polar(1.13)],
        TargetClass::Equatorial => [KnownQubit::equatorial(0.71), KnownQubit::equatorial(2.29)],
        TargetClass::General => [KnownQubit::general(0.43, 0.93), KnownQubit::general(1.07, -2.05)],
    }
}

fn uncorrected(protocol: ProtocolKind, target: &KnownQubit) -> Result<Vec<Branch>> {
    let sender = PartyId::Sender(1);
    let receiver = PartyId::Receiver(1);
    match protocol {
        ProtocolKind::Cluster => cluster_piece(target, None, None),
        ProtocolKind::ClusterPlus => cluster_plus_piece(target, None, None),
        ProtocolKind::BellRsp => rsp_piece(target, Link::PHI_PLUS, sender, receiver, None, None, None),
        ProtocolKind::Teleport => teleport_piece(
            &super::broadcast::copy_gates(target),
            Link::PHI_PLUS,
            sender,
            receiver,
            None,
            None,
            None,
        ),
        ProtocolKind::Joint | ProtocolKind::JointNonAdaptive => joint_piece(
            target.theta(),
            target.phi(),
            1,
            protocol == ProtocolKind::Joint,
            None,
            None,
        ),
    }
}

fn branch_key(b: &Branch) -> usize {
    b.outcomes.iter().fold(0, |acc, o| (acc << o.width) | o.value)
}

fn recovers(frame: PauliFrame, rho: &crate::tensor::DensityMatrix, target: &KnownQubit) -> Result<bool> {
    let fixed = rho.apply(&frame.matrix(), &[crate::tensor::QubitIndex(0)])?;
    Ok(fixed.expectation(&target.state()) > 1.0 - EQUALITY_TOL)
}

/// Searches, per sender outcome and receiver, the first of `I, X, Z, ZX`
/// that recovers both probe targets.
pub(crate) fn partial_rule(protocol: ProtocolKind, class: TargetClass) -> Result<PartialRule> {
    if protocol == ProtocolKind::Cluster && class != TargetClass::RealPolar {
        return Err(Error::UnsupportedClass {
            protocol: protocol.name().into(),
            class: class.name().into(),
        });
    }
    let [first, second] = probe_targets(class);
    let runs = [uncorrected(protocol, &first)?, uncorrected(protocol, &second)?];
    let mut rule = PartialRule::new();
    for (a, b) in runs[0].iter().zip(&runs[1]) {
        let key = branch_key(a);
        debug_assert_eq!(key, branch_key(b));
        let mut frames = Vec::with_capacity(a.outputs.len());
        for ((_, rho_a), (_, rho_b)) in a.outputs.iter().zip(&b.outputs) {
            let mut found = None;
            for f in PauliFrame::ALL {
                if recovers(f, rho_a, &first)? && recovers(f, rho_b, &second)? {
                    found = Some(f);
                    break;
                }
            }
            frames.push(found);
        }
        rule.insert(key, frames.into_iter().collect::<Option<Vec<_>>>());
    }
    Ok(rule)
}

/// Correction table for a deterministic protocol and target class, found by
/// running the uncorrected protocol on generic targets of the class and
/// verified on a second target.
///
/// Fails with [`Error::NoPauliCorrection`] when some outcome cannot be
/// corrected by a Pauli, e.g. general targets under one-bit preparation.
pub fn derive_corrections(protocol: ProtocolKind, class: TargetClass) -> Result<CorrectionRule> {
    let partial = partial_rule(protocol, class)?;
    let mut frames = BTreeMap::new();
    for (key, f) in partial {
        match f {
            Some(f) => {
                frames.insert(key, f);
            }
            None => {
                return Err(Error::NoPauliCorrection {
                    protocol: protocol.name().into(),
                    outcome: format!("{:0w$b}", key, w = protocol.outcome_width()),
                })
            }
        }
    }
    Ok(CorrectionRule {
        protocol,
        class,
        frames,
    })
}
