//! Entangled resource states and who holds which qubit.
//!
//! Bell states follow the usual naming: `Φ± = (|00⟩ ± |11⟩)/√2`,
//! `Ψ± = (|01⟩ ± |10⟩)/√2`.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::tensor::{r, tensor, tensor_all, QubitIndex, StateVector, C64, STRUCTURAL_TOL};
use crate::{Error, Result};

/// Largest register [`BroadcastChannel::state`] will materialize densely.
pub const MAX_DENSE_QUBITS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PartyId {
    Sender(usize),
    Receiver(usize),
    Controller,
}

impl fmt::Display for PartyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartyId::Sender(k) => write!(f, "sender{k}"),
            PartyId::Receiver(k) => write!(f, "receiver{k}"),
            PartyId::Controller => write!(f, "controller"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellKind {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellKind {
    pub const ALL: [BellKind; 4] = [
        BellKind::PhiPlus,
        BellKind::PhiMinus,
        BellKind::PsiPlus,
        BellKind::PsiMinus,
    ];

    /// Pauli `(x, z)` with `|B⟩ = (I ⊗ Z^z X^x)|Φ+⟩` up to sign.
    pub fn pauli_from_phi_plus(self) -> (bool, bool) {
        match self {
            BellKind::PhiPlus => (false, false),
            BellKind::PhiMinus => (false, true),
            BellKind::PsiPlus => (true, false),
            BellKind::PsiMinus => (true, true),
        }
    }
}

pub fn bell(kind: BellKind) -> StateVector {
    let h = FRAC_1_SQRT_2;
    let amps = match kind {
        BellKind::PhiPlus => [h, 0.0, 0.0, h],
        BellKind::PhiMinus => [h, 0.0, 0.0, -h],
        BellKind::PsiPlus => [0.0, h, h, 0.0],
        BellKind::PsiMinus => [0.0, h, -h, 0.0],
    };
    StateVector::from_real(&amps).expect("four amplitudes")
}

fn check_unit(a: f64, b: C64) -> Result<()> {
    let norm_sq = a * a + b.norm_sqr();
    if (norm_sq - 1.0).abs() > STRUCTURAL_TOL {
        return Err(Error::NotNormalized { norm_sq });
    }
    Ok(())
}

/// `a|00⟩ + b|11⟩`.
pub fn nonmax_bell(a: f64, b: C64) -> Result<StateVector> {
    check_unit(a, b)?;
    StateVector::new(vec![r(a), r(0.0), r(0.0), b])
}

/// `(|000⟩ + |111⟩)/√2`.
pub fn ghz3() -> StateVector {
    nonmax_ghz3(FRAC_1_SQRT_2, r(FRAC_1_SQRT_2)).expect("normalized")
}

/// `a|000⟩ + b|111⟩`.
pub fn nonmax_ghz3(a: f64, b: C64) -> Result<StateVector> {
    check_unit(a, b)?;
    let mut amps = vec![r(0.0); 8];
    amps[0] = r(a);
    amps[7] = b;
    StateVector::new(amps)
}

/// `(|0000⟩ + |0101⟩ + |1010⟩ − |1111⟩)/2`.
pub fn cluster_four() -> StateVector {
    four_qubit(&[(0b0000, 0.5), (0b0101, 0.5), (0b1010, 0.5), (0b1111, -0.5)])
}

/// `(|0000⟩ + |0101⟩ + |1010⟩ + |1111⟩)/2`, i.e. Bell pairs on (0,2) and (1,3).
pub fn cluster_four_plus() -> StateVector {
    four_qubit(&[(0b0000, 0.5), (0b0101, 0.5), (0b1010, 0.5), (0b1111, 0.5)])
}

/// `(|0001⟩ + |0110⟩ + |1011⟩ + |1100⟩)/2`, an alternative four-qubit
/// broadcasting resource whose optimal replacement is also two Bell pairs.
pub fn four_qubit_alternative() -> StateVector {
    four_qubit(&[(0b0001, 0.5), (0b0110, 0.5), (0b1011, 0.5), (0b1100, 0.5)])
}

fn four_qubit(terms: &[(usize, f64)]) -> StateVector {
    let mut amps = vec![r(0.0); 16];
    for &(i, a) in terms {
        amps[i] = r(a);
    }
    StateVector::new(amps).expect("sixteen amplitudes")
}

/// Which family a channel belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelKind {
    /// Product of two-qubit links, sender first.
    General,
    /// Product of three-qubit links shared by two senders and one receiver.
    Joint,
    /// One two-qubit link per ordered pair of parties.
    Multidirectional,
    /// The four-qubit cluster resource.
    Cluster,
}

/// A pre-shared resource kept in factored form.
///
/// The dense state is only built on request, so large products such as ten
/// Bell pairs can be described without allocating `2^20` amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct BroadcastChannel {
    kind: ChannelKind,
    factors: Vec<StateVector>,
    ownership: Vec<PartyId>,
    probabilistic: bool,
}

impl BroadcastChannel {
    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn factors(&self) -> &[StateVector] {
        &self.factors
    }

    pub fn n_qubits(&self) -> usize {
        self.ownership.len()
    }

    pub fn ownership(&self) -> &[PartyId] {
        &self.ownership
    }

    pub fn owner(&self, q: QubitIndex) -> Option<PartyId> {
        self.ownership.get(q.0).copied()
    }

    pub fn qubits_of(&self, party: PartyId) -> Vec<QubitIndex> {
        self.ownership
            .iter()
            .enumerate()
            .filter(|(_, p)| **p == party)
            .map(|(i, _)| QubitIndex(i))
            .collect()
    }

    pub fn receiver_qubits(&self) -> Vec<QubitIndex> {
        self.ownership
            .iter()
            .enumerate()
            .filter(|(_, p)| matches!(p, PartyId::Receiver(_)))
            .map(|(i, _)| QubitIndex(i))
            .collect()
    }

    /// True when some link is less than maximally entangled, so protocols
    /// over it can only succeed probabilistically.
    pub fn is_probabilistic(&self) -> bool {
        self.probabilistic
    }

    /// Dense state of the whole channel.
    pub fn state(&self) -> Result<StateVector> {
        if self.n_qubits() > MAX_DENSE_QUBITS {
            return Err(Error::TooLarge {
                qubits: self.n_qubits(),
                limit: MAX_DENSE_QUBITS,
            });
        }
        Ok(tensor_all(&self.factors).expect("channels have at least one factor"))
    }
}

fn check_part(part: &StateVector, qubits: usize) -> Result<()> {
    if part.n_qubits() != qubits {
        return Err(Error::DimensionMismatch {
            expected: 1 << qubits,
            found: part.dim(),
        });
    }
    if !part.is_normalized(STRUCTURAL_TOL) {
        return Err(Error::NotNormalized {
            norm_sq: part.norm_sqr(),
        });
    }
    Ok(())
}

/// Every single-qubit marginal equals `I/2`.
fn maximally_entangled(part: &StateVector) -> bool {
    let rho = part.to_density();
    (0..part.n_qubits()).all(|q| {
        let red = rho.partial_trace(&[QubitIndex(q)]).expect("valid index");
        (red.entry(0, 0).re - 0.5).abs() < STRUCTURAL_TOL && red.entry(0, 1).norm() < STRUCTURAL_TOL
    })
}

/// `⊗_i |φ^i⟩` over two-qubit links: the first qubit of link `i` stays with
/// the sender, the second goes to receiver `i`.
pub fn channel_general(parts: &[StateVector]) -> Result<BroadcastChannel> {
    if parts.is_empty() {
        return Err(Error::InvalidArgument("a channel needs at least one link".into()));
    }
    let mut ownership = Vec::with_capacity(parts.len() * 2);
    let mut probabilistic = false;
    for (i, part) in parts.iter().enumerate() {
        check_part(part, 2)?;
        probabilistic |= !maximally_entangled(part);
        ownership.push(PartyId::Sender(1));
        ownership.push(PartyId::Receiver(i + 1));
    }
    Ok(BroadcastChannel {
        kind: ChannelKind::General,
        factors: parts.to_vec(),
        ownership,
        probabilistic,
    })
}

/// `m` copies of `|Φ+⟩` as a general channel.
pub fn bell_pairs(m: usize) -> Result<BroadcastChannel> {
    channel_general(&vec![bell(BellKind::PhiPlus); m])
}

/// `⊗_i |φ^i⟩` over three-qubit links `(sender 1, sender 2, receiver i)`.
pub fn channel_joint(parts: &[StateVector]) -> Result<BroadcastChannel> {
    if parts.is_empty() {
        return Err(Error::InvalidArgument("a channel needs at least one link".into()));
    }
    let mut ownership = Vec::with_capacity(parts.len() * 3);
    let mut probabilistic = false;
    for (i, part) in parts.iter().enumerate() {
        check_part(part, 3)?;
        probabilistic |= !maximally_entangled(part);
        ownership.extend([PartyId::Sender(1), PartyId::Sender(2), PartyId::Receiver(i + 1)]);
    }
    Ok(BroadcastChannel {
        kind: ChannelKind::Joint,
        factors: parts.to_vec(),
        ownership,
        probabilistic,
    })
}

/// The four-qubit cluster resource: qubits 0 and 1 with the sender, qubit 2
/// with receiver 1 and qubit 3 with receiver 2.
pub fn cluster_channel(state: StateVector) -> Result<BroadcastChannel> {
    check_part(&state, 4)?;
    Ok(BroadcastChannel {
        kind: ChannelKind::Cluster,
        factors: vec![state],
        ownership: vec![
            PartyId::Sender(1),
            PartyId::Sender(1),
            PartyId::Receiver(1),
            PartyId::Receiver(2),
        ],
        probabilistic: false,
    })
}

/// One two-qubit link per ordered pair `(i, j)`, `i ≠ j`, in lexicographic
/// order. The first qubit of a link belongs to party `i` acting as sender,
/// the second to party `j` acting as receiver.
pub fn channel_multidirectional(
    n: usize,
    pair_states: &BTreeMap<(usize, usize), StateVector>,
) -> Result<BroadcastChannel> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "multi-directional broadcasting needs at least 2 parties, got {n}"
        )));
    }
    let pairs = ordered_pairs(n);
    if pair_states.len() != pairs.len() {
        return Err(Error::InvalidArgument(format!(
            "expected {} ordered pairs, got {}",
            pairs.len(),
            pair_states.len()
        )));
    }
    let mut factors = Vec::with_capacity(pairs.len());
    let mut ownership = Vec::with_capacity(2 * pairs.len());
    for (i, j) in pairs {
        let part = pair_states
            .get(&(i, j))
            .ok_or_else(|| Error::InvalidArgument(format!("missing link for direction ({i}, {j})")))?;
        check_part(part, 2)?;
        factors.push(part.clone());
        ownership.push(PartyId::Sender(i));
        ownership.push(PartyId::Receiver(j));
    }
    let probabilistic = factors.iter().any(|f| !maximally_entangled(f));
    Ok(BroadcastChannel {
        kind: ChannelKind::Multidirectional,
        factors,
        ownership,
        probabilistic,
    })
}

/// Ordered pairs `(i, j)` with `i ≠ j` over parties `1..=n`.
pub fn ordered_pairs(n: usize) -> Vec<(usize, usize)> {
    (1..=n)
        .flat_map(|i| (1..=n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect()
}

/// Superposition `Σ_k |χ_k⟩|k⟩/√m` with the index register held by a
/// controller.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlledChannel {
    pub state: StateVector,
    pub ownership: Vec<PartyId>,
    /// Number of alternative channels `m`.
    pub alternatives: usize,
    /// Qubits of the controller's index register.
    pub ancilla: Vec<QubitIndex>,
}

/// Builds the controlled resource from `m ≥ 2` pairwise distinct channels
/// with identical layouts. The index register uses `⌈log₂ m⌉` qubits and
/// `|a_k⟩ = |k⟩` in the computational basis.
pub fn channel_controlled(channels: &[BroadcastChannel]) -> Result<ControlledChannel> {
    let m = channels.len();
    if m < 2 {
        return Err(Error::InvalidArgument(format!(
            "a controlled channel needs at least 2 alternatives, got {m}"
        )));
    }
    let layout = channels[0].ownership();
    let states = channels
        .iter()
        .map(|ch| {
            if ch.ownership() != layout {
                return Err(Error::InvalidArgument(
                    "alternatives must share one qubit layout".into(),
                ));
            }
            ch.state()
        })
        .collect::<Result<Vec<_>>>()?;
    for i in 0..m {
        for j in 0..i {
            if states[i].overlap_sqr(&states[j]) > 1.0 - STRUCTURAL_TOL {
                return Err(Error::InvalidArgument(format!(
                    "alternatives {} and {} are the same channel",
                    j + 1,
                    i + 1
                )));
            }
        }
    }
    let index_qubits = (usize::BITS - (m - 1).leading_zeros()) as usize;
    let weight = r(1.0 / (m as f64).sqrt());
    let mut amps = vec![r(0.0); states[0].dim() << index_qubits];
    for (k, chi) in states.iter().enumerate() {
        let term = tensor(chi, &StateVector::basis(index_qubits, k));
        for (a, t) in amps.iter_mut().zip(term.amplitudes()) {
            *a += t * weight;
        }
    }
    let n = layout.len();
    let mut ownership = layout.to_vec();
    ownership.extend(std::iter::repeat_n(PartyId::Controller, index_qubits));
    Ok(ControlledChannel {
        state: StateVector::new(amps)?,
        ownership,
        alternatives: m,
        ancilla: (n..n + index_qubits).map(QubitIndex).collect(),
    })
}
