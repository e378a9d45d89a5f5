use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::corrections::{frame_for, partial_rule, PartialRule, PauliFrame, ProtocolKind};
use super::engine::{prepare_state, product, Engine};
use super::transcript::{Branch, OutputSlot, Transcript};
use super::{KnownQubit, TargetClass};
use crate::channels::{BellKind, PartyId};
use crate::circuit::{cluster_prep, Circuit, Gate};
use crate::noise::NoiseSpec;
use crate::tensor::{matrix, r, tensor, DensityMatrix, StateVector, C64, STRUCTURAL_TOL};
use crate::{Error, Result};

/// How a sender hands a known qubit to one receiver over a Bell pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BroadcastMode {
    /// One measurement and one classical bit. Deterministic for real-polar
    /// and equatorial targets; succeeds with probability 1/2 per receiver
    /// otherwise.
    Rsp,
    /// Teleportation of a locally prepared copy; two classical bits.
    Teleport,
}

impl BroadcastMode {
    pub fn name(self) -> &'static str {
        match self {
            BroadcastMode::Rsp => "rsp",
            BroadcastMode::Teleport => "teleport",
        }
    }

    /// The cheapest deterministic mode for a target class.
    pub fn for_class(class: TargetClass) -> Self {
        match class {
            TargetClass::General => BroadcastMode::Teleport,
            _ => BroadcastMode::Rsp,
        }
    }
}

impl fmt::Display for BroadcastMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BroadcastMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rsp" => Ok(BroadcastMode::Rsp),
            "teleport" => Ok(BroadcastMode::Teleport),
            _ => Err(Error::InvalidArgument(format!("unknown broadcast mode `{s}`"))),
        }
    }
}

/// Two-qubit resource shared by a sender (qubit 0) and a receiver (qubit 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Link {
    Bell(BellKind),
    /// Uniform mixture over the four Bell states.
    Secret,
    /// `a|00⟩ + b|11⟩`.
    NonMax(f64, f64),
}

impl Link {
    pub const PHI_PLUS: Link = Link::Bell(BellKind::PhiPlus);

    fn bell_circuit(kind: BellKind) -> Circuit {
        let mut c = Circuit::with_gates(2, [Gate::H(0), Gate::Cx { control: 0, target: 1 }]);
        let (x, z) = kind.pauli_from_phi_plus();
        if x {
            c.push(Gate::X(1));
        }
        if z {
            c.push(Gate::Z(1));
        }
        c
    }

    pub fn prepare(&self, noise: Option<&NoiseSpec>) -> Result<DensityMatrix> {
        match *self {
            Link::Bell(kind) => prepare_state(&Self::bell_circuit(kind), &[1], noise),
            Link::Secret => {
                let states = BellKind::ALL
                    .into_iter()
                    .map(|k| prepare_state(&Self::bell_circuit(k), &[1], noise))
                    .collect::<Result<Vec<_>>>()?;
                let parts: Vec<_> = states.iter().map(|s| (0.25, s)).collect();
                DensityMatrix::mixture(&parts)
            }
            Link::NonMax(a, b) => {
                let c = Circuit::with_gates(2, [Gate::Ry(0, 2.0 * b.atan2(a)), Gate::Cx { control: 0, target: 1 }]);
                prepare_state(&c, &[1], noise)
            }
        }
    }
}

/// `{conj t, conj t⊥}`: projecting the sender half of `|Φ+⟩` onto the first
/// vector leaves `t` at the receiver.
fn rsp_basis(target: &KnownQubit) -> Vec<StateVector> {
    let (a, b) = (target.alpha(), target.beta());
    vec![
        StateVector::new(vec![a.conj(), b.conj()]).expect("two amplitudes"),
        StateVector::new(vec![b, -a]).expect("two amplitudes"),
    ]
}

/// The four-vector measurement basis of the cluster scheme,
/// `CZ·{a⊗a, a⊗a⊥, a⊥⊗a, a⊥⊗a⊥}` with `a = α|0⟩+β|1⟩` and
/// `a⊥ = β|0⟩−α|1⟩`.
///
/// Only real amplitudes give an orthonormal set, so complex inputs are
/// rejected.
pub fn cluster_basis(alpha: impl Into<C64>, beta: impl Into<C64>) -> Result<[StateVector; 4]> {
    let (alpha, beta) = (alpha.into(), beta.into());
    if alpha.im.abs() > 1e-12 || beta.im.abs() > 1e-12 {
        return Err(Error::InvalidArgument(
            "the cluster basis needs real amplitudes; use teleport mode for complex targets".into(),
        ));
    }
    let (alpha, beta) = (alpha.re, beta.re);
    let norm_sq = alpha * alpha + beta * beta;
    if (norm_sq - 1.0).abs() > 1e-12 {
        return Err(Error::NotNormalized { norm_sq });
    }
    let a = StateVector::from_real(&[alpha, beta])?;
    let a_perp = StateVector::from_real(&[beta, -alpha])?;
    let cz = Gate::Cz(0, 1).matrix();
    let vectors = [(&a, &a), (&a, &a_perp), (&a_perp, &a), (&a_perp, &a_perp)]
        .map(|(u, v)| tensor(u, v).apply_matrix(&cz).expect("4x4 gate"));
    Ok(vectors)
}

fn bits_of(kind: BellKind) -> Vec<u8> {
    let (x, z) = kind.pauli_from_phi_plus();
    vec![x as u8, z as u8]
}

fn disclosed_frame(kind: Option<BellKind>) -> PauliFrame {
    kind.map(|k| {
        let (x, z) = k.pauli_from_phi_plus();
        PauliFrame { x, z }
    })
    .unwrap_or(PauliFrame::I)
}

/// One-bit preparation over one link. With `disclosed`, the controller first
/// tells the receiver which Bell state the link holds.
pub(crate) fn rsp_piece(
    target: &KnownQubit,
    link: Link,
    sender: PartyId,
    receiver: PartyId,
    disclosed: Option<BellKind>,
    rule: Option<&PartialRule>,
    noise: Option<&NoiseSpec>,
) -> Result<Vec<Branch>> {
    let mut e = Engine::from_state(link.prepare(noise)?, noise);
    let mut cites = Vec::new();
    if let Some(kind) = disclosed {
        e.send(PartyId::Controller, receiver, |_| bits_of(kind));
        cites.push(0);
    }
    let basis = rsp_basis(target);
    e.measure(sender, "rsp", &[0], |_| basis.clone())?;
    e.send(sender, receiver, |p| vec![p.value("rsp") as u8]);
    cites.push(cites.len());
    let undo = disclosed_frame(disclosed);
    e.correct(receiver, 1, &cites, |p| {
        frame_for(rule, p.key(), 0).map(|f| f.after(undo))
    })?;
    e.finish(&[(OutputSlot { sender, receiver }, 1)])
}

/// Gates preparing a local copy of `target` on qubit 2 from `|0⟩`.
pub(crate) fn copy_gates(target: &KnownQubit) -> Vec<Gate> {
    let mut gates = vec![Gate::Ry(2, 2.0 * target.theta())];
    if target.phi() != 0.0 {
        gates.push(Gate::Phase(2, target.phi()));
    }
    gates
}

/// Teleports a copy built by `copy` (acting on qubit 2) over the link on
/// qubits 0 (sender) and 1 (receiver).
pub(crate) fn teleport_piece(
    copy: &[Gate],
    link: Link,
    sender: PartyId,
    receiver: PartyId,
    disclosed: Option<BellKind>,
    rule: Option<&PartialRule>,
    noise: Option<&NoiseSpec>,
) -> Result<Vec<Branch>> {
    let start = link.prepare(noise)?.kron(&StateVector::basis(1, 0).to_density());
    let mut e = Engine::from_state(start, noise);
    for g in copy {
        e.gate(*g)?;
    }
    e.gate(Gate::Cx { control: 2, target: 0 })?;
    e.gate(Gate::H(2))?;
    let computational = vec![StateVector::basis(1, 0), StateVector::basis(1, 1)];
    e.measure(sender, "copy", &[2], |_| computational.clone())?;
    e.measure(sender, "link", &[0], |_| computational.clone())?;
    let mut cites = Vec::new();
    if let Some(kind) = disclosed {
        e.send(PartyId::Controller, receiver, |_| bits_of(kind));
        cites.push(0);
    }
    e.send(sender, receiver, |p| vec![p.value("copy") as u8, p.value("link") as u8]);
    cites.push(cites.len());
    let undo = disclosed_frame(disclosed);
    e.correct(receiver, 1, &cites, |p| {
        frame_for(rule, p.key(), 0).map(|f| f.after(undo))
    })?;
    e.finish(&[(OutputSlot { sender, receiver }, 1)])
}

/// Either mode over one link.
pub(crate) fn link_piece(
    target: &KnownQubit,
    mode: BroadcastMode,
    link: Link,
    sender: PartyId,
    receiver: PartyId,
    disclosed: Option<BellKind>,
    noise: Option<&NoiseSpec>,
) -> Result<Vec<Branch>> {
    match mode {
        BroadcastMode::Rsp => {
            let rule = partial_rule(ProtocolKind::BellRsp, target.class())?;
            rsp_piece(target, link, sender, receiver, disclosed, Some(&rule), noise)
        }
        BroadcastMode::Teleport => {
            let rule = partial_rule(ProtocolKind::Teleport, TargetClass::General)?;
            teleport_piece(
                &copy_gates(target),
                link,
                sender,
                receiver,
                disclosed,
                Some(&rule),
                noise,
            )
        }
    }
}

fn require_real_polar(protocol: &str, target: &KnownQubit) -> Result<()> {
    if target.class() != TargetClass::RealPolar {
        return Err(Error::UnsupportedClass {
            protocol: protocol.into(),
            class: target.class().name().into(),
        });
    }
    Ok(())
}

pub(crate) fn cluster_piece(
    target: &KnownQubit,
    rule: Option<&PartialRule>,
    noise: Option<&NoiseSpec>,
) -> Result<Vec<Branch>> {
    require_real_polar("cluster", target)?;
    let basis = cluster_basis(target.alpha(), target.beta())?.to_vec();
    let sender = PartyId::Sender(1);
    let receivers = [PartyId::Receiver(1), PartyId::Receiver(2)];
    let mut e = Engine::prepare(&cluster_prep(), &[2, 3], noise)?;
    e.measure(sender, "cluster", &[0, 1], |_| basis.clone())?;
    e.send(sender, receivers[0], |p| vec![(p.value("cluster") >> 1) as u8]);
    e.send(sender, receivers[1], |p| vec![(p.value("cluster") & 1) as u8]);
    for (slot, (rcv, q)) in receivers.into_iter().zip([2, 3]).enumerate() {
        e.correct(rcv, q, &[slot], |p| frame_for(rule, p.key(), slot))?;
    }
    e.finish(&[
        (
            OutputSlot {
                sender,
                receiver: receivers[0],
            },
            2,
        ),
        (
            OutputSlot {
                sender,
                receiver: receivers[1],
            },
            3,
        ),
    ])
}

pub(crate) fn cluster_plus_piece(
    target: &KnownQubit,
    rule: Option<&PartialRule>,
    noise: Option<&NoiseSpec>,
) -> Result<Vec<Branch>> {
    let prep = Circuit::with_gates(
        4,
        [
            Gate::H(0),
            Gate::H(1),
            Gate::Cx { control: 0, target: 2 },
            Gate::Cx { control: 1, target: 3 },
        ],
    );
    let basis = rsp_basis(target);
    let sender = PartyId::Sender(1);
    let receivers = [PartyId::Receiver(1), PartyId::Receiver(2)];
    let mut e = Engine::prepare(&prep, &[2, 3], noise)?;
    e.measure(sender, "q0", &[0], |_| basis.clone())?;
    e.measure(sender, "q1", &[1], |_| basis.clone())?;
    e.send(sender, receivers[0], |p| vec![p.value("q0") as u8]);
    e.send(sender, receivers[1], |p| vec![p.value("q1") as u8]);
    for (slot, (rcv, q)) in receivers.into_iter().zip([2, 3]).enumerate() {
        e.correct(rcv, q, &[slot], |p| frame_for(rule, p.key(), slot))?;
    }
    e.finish(&[
        (
            OutputSlot {
                sender,
                receiver: receivers[0],
            },
            2,
        ),
        (
            OutputSlot {
                sender,
                receiver: receivers[1],
            },
            3,
        ),
    ])
}

/// Broadcasts a real-polar qubit to two receivers over the four-qubit
/// cluster resource with the `−|1111⟩` sign. The sender measures both her
/// qubits in [`cluster_basis`] and sends one bit to each receiver.
pub fn run_cluster_broadcast(target: &KnownQubit, noise: Option<&NoiseSpec>) -> Result<Transcript> {
    require_real_polar("cluster", target)?;
    let rule = partial_rule(ProtocolKind::Cluster, TargetClass::RealPolar)?;
    let branches = cluster_piece(target, Some(&rule), noise)?;
    Ok(Transcript::new("cluster", branches, 0, 4))
}

/// Broadcasts over the all-plus four-qubit resource: the sender measures
/// each of her qubits separately and each receiver corrects on its own bit.
/// For `|+⟩` this is the X-basis circuit with a Z correction on outcome 1.
pub fn run_cluster_plus_broadcast(target: &KnownQubit, noise: Option<&NoiseSpec>) -> Result<Transcript> {
    let rule = partial_rule(ProtocolKind::ClusterPlus, target.class())?;
    let branches = cluster_plus_piece(target, Some(&rule), noise)?;
    Ok(Transcript::new("cluster-plus", branches, 0, 4))
}

/// Broadcasts `target` to `m` receivers over `m` copies of `|Φ+⟩`.
pub fn run_bell_rsp_broadcast(
    target: &KnownQubit,
    m: usize,
    mode: BroadcastMode,
    noise: Option<&NoiseSpec>,
) -> Result<Transcript> {
    if m == 0 {
        return Err(Error::InvalidArgument("at least one receiver is required".into()));
    }
    let pieces = (1..=m)
        .map(|i| {
            link_piece(
                target,
                mode,
                Link::PHI_PLUS,
                PartyId::Sender(1),
                PartyId::Receiver(i),
                None,
                noise,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let name = match mode {
        BroadcastMode::Rsp => "bell-rsp",
        BroadcastMode::Teleport => "bell-teleport",
    };
    Ok(Transcript::new(name, product(pieces), m, 2 * m))
}

/// Broadcasts a real-polar qubit over non-maximal links `a|00⟩ + b|11⟩`, one
/// per receiver, given as `(a, b)` with `a ≥ |b| > 0`.
///
/// The sender measures as for a maximal link. Each receiver applies the usual
/// Pauli and then the filter `diag(b/a, 1)` (outcome 0) or `diag(1, b/a)`
/// (outcome 1); passing the filter leaves the exact target.
pub fn run_probabilistic_broadcast(
    target: &KnownQubit,
    links: &[(f64, f64)],
    noise: Option<&NoiseSpec>,
) -> Result<Transcript> {
    require_real_polar("probabilistic", target)?;
    if links.is_empty() {
        return Err(Error::InvalidArgument("at least one link is required".into()));
    }
    for &(a, b) in links {
        let norm_sq = a * a + b * b;
        if (norm_sq - 1.0).abs() > STRUCTURAL_TOL {
            return Err(Error::NotNormalized { norm_sq });
        }
        if b == 0.0 {
            return Err(Error::InvalidArgument("link is not entangled (b = 0)".into()));
        }
        if a < b.abs() {
            return Err(Error::InvalidArgument(format!(
                "links need a ≥ |b|, got a = {a}, b = {b}"
            )));
        }
    }
    let rule = partial_rule(ProtocolKind::BellRsp, TargetClass::RealPolar)?;
    let basis = rsp_basis(target);
    let sender = PartyId::Sender(1);
    let pieces = links
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| {
            let receiver = PartyId::Receiver(i + 1);
            let mut e = Engine::from_state(Link::NonMax(a, b).prepare(noise)?, noise);
            e.measure(sender, "rsp", &[0], |_| basis.clone())?;
            e.send(sender, receiver, |p| vec![p.value("rsp") as u8]);
            e.correct(receiver, 1, &[0], |p| frame_for(Some(&rule), p.key(), 0))?;
            let (o, z) = (r(1.0), r(0.0));
            let ratio = r(b / a);
            e.filter(receiver, 1, |p| match p.value("rsp") {
                0 => matrix(2, 2, &[ratio, z, z, o]),
                _ => matrix(2, 2, &[o, z, z, ratio]),
            })?;
            e.finish(&[(OutputSlot { sender, receiver }, 1)])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Transcript::new(
        "probabilistic",
        product(pieces),
        links.len(),
        2 * links.len(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_3, FRAC_PI_4, PI};

    fn fidelity(b: &Branch, target: &KnownQubit) -> Vec<f64> {
        b.outputs
            .iter()
            .map(|(_, rho)| rho.expectation(&target.state()))
            .collect()
    }

    #[test]
    fn cluster_basis_examples() {
        let basis = cluster_basis(1.0, 0.0).unwrap();
        let expected: [&[f64]; 4] = [
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, -1.0, 0.0, 0.0],
            &[0.0, 0.0, -1.0, 0.0],
            &[0.0, 0.0, 0.0, -1.0],
        ];
        for (v, e) in basis.iter().zip(expected) {
            assert_eq!(v, &StateVector::from_real(e).unwrap());
        }
        let h = FRAC_1_SQRT_2;
        let basis = cluster_basis(h, h).unwrap();
        let first = StateVector::from_real(&[0.5, 0.5, 0.5, -0.5]).unwrap();
        assert!((basis[0].overlap_sqr(&first) - 1.0).abs() < 1e-15);
        let basis = cluster_basis(0.6, 0.8).unwrap();
        for (i, u) in basis.iter().enumerate() {
            for (j, v) in basis.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((u.inner(v) - r(expected)).norm() < 1e-12);
            }
        }
        assert!(cluster_basis(C64::new(0.6, 0.0), C64::new(0.0, 0.8)).is_err());
        assert!(cluster_basis(0.6, 0.6).is_err());
    }

    #[test]
    fn cluster_broadcast_balanced_target() {
        let target = KnownQubit::real_polar(FRAC_PI_4);
        let t = run_cluster_broadcast(&target, None).unwrap();
        assert_eq!(t.branches.len(), 4);
        for b in &t.branches {
            assert!((b.probability - 0.25).abs() < 1e-12);
            for f in fidelity(b, &target) {
                assert!((f - 1.0).abs() < 1e-9);
            }
        }
        assert_eq!(t.cbits_per_receiver().values().copied().collect::<Vec<_>>(), vec![1, 1]);
    }

    #[test]
    fn cluster_broadcast_pole() {
        let target = KnownQubit::real_polar(0.0);
        let t = run_cluster_broadcast(&target, None).unwrap();
        for b in &t.branches {
            for (_, rho) in &b.outputs {
                assert!((rho.entry(0, 0).re - 1.0).abs() < 1e-12);
            }
        }
        assert!(matches!(
            run_cluster_broadcast(&KnownQubit::equatorial(0.3), None),
            Err(Error::UnsupportedClass { .. })
        ));
    }

    #[test]
    fn cluster_plus_reproduces_x_basis_walkthrough() {
        let target = KnownQubit::equatorial(0.0);
        let t = run_cluster_plus_broadcast(&target, None).unwrap();
        assert_eq!(t.branches.len(), 4);
        let last = t.branches.iter().find(|b| b.outcome_bits() == "11").unwrap();
        let applied: Vec<_> = last.corrections.iter().map(|c| c.pauli).collect();
        assert_eq!(applied, vec![PauliFrame::Z, PauliFrame::Z]);
        for b in &t.branches {
            for f in fidelity(b, &target) {
                assert!((f - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn rsp_examples() {
        let target = KnownQubit::real_polar(FRAC_PI_3);
        let t = run_bell_rsp_broadcast(&target, 2, BroadcastMode::Rsp, None).unwrap();
        assert_eq!(t.branches.len(), 4);
        assert_eq!(t.bell_pairs, 2);
        for b in &t.branches {
            assert!((b.probability - 0.25).abs() < 1e-12);
            assert!(fidelity(b, &target).iter().all(|f| (f - 1.0).abs() < 1e-9));
        }
        let eq = KnownQubit::equatorial(PI / 2.0);
        let t = run_bell_rsp_broadcast(&eq, 3, BroadcastMode::Rsp, None).unwrap();
        assert_eq!(t.branches.len(), 8);
        assert!(t.cbits_per_receiver().values().all(|&n| n == 1));
        for b in &t.branches {
            assert!(fidelity(b, &eq).iter().all(|f| (f - 1.0).abs() < 1e-9));
            assert!(b.corrections.iter().all(|c| c.pauli == PauliFrame::Z));
        }
        assert!(run_bell_rsp_broadcast(&eq, 0, BroadcastMode::Rsp, None).is_err());
    }

    #[test]
    fn teleport_example() {
        let target = KnownQubit::general(PI / 5.0, PI / 7.0);
        let t = run_bell_rsp_broadcast(&target, 2, BroadcastMode::Teleport, None).unwrap();
        assert_eq!(t.branches.len(), 16);
        assert!(t.cbits_per_receiver().values().all(|&n| n == 2));
        for b in &t.branches {
            assert!(fidelity(b, &target).iter().all(|f| (f - 1.0).abs() < 1e-9));
            for c in &b.corrections {
                assert!(c.cites.iter().all(|&i| b.messages[i].to == c.party));
            }
        }
        assert!((t.total_probability() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn general_target_under_rsp_is_half_successful() {
        let target = KnownQubit::general(0.9, 0.4);
        let t = run_bell_rsp_broadcast(&target, 2, BroadcastMode::Rsp, None).unwrap();
        assert!((t.success_probability - 0.25).abs() < 1e-12);
        for b in t.branches.iter().filter(|b| b.success) {
            assert!(fidelity(b, &target).iter().all(|f| (f - 1.0).abs() < 1e-9));
        }
    }

    #[test]
    fn probabilistic_limits_and_errors() {
        let target = KnownQubit::real_polar(0.7);
        let h = FRAC_1_SQRT_2;
        let t = run_probabilistic_broadcast(&target, &[(h, h), (h, h)], None).unwrap();
        assert!((t.success_probability - 1.0).abs() < 1e-12);
        let t = run_probabilistic_broadcast(&target, &[(0.8, 0.6)], None).unwrap();
        assert!((t.success_probability - 0.72).abs() < 1e-12);
        for b in t.branches.iter().filter(|b| b.success) {
            assert!(fidelity(b, &target).iter().all(|f| (f - 1.0).abs() < 1e-9));
        }
        assert!(run_probabilistic_broadcast(&target, &[(1.0, 0.0)], None).is_err());
        assert!(run_probabilistic_broadcast(&target, &[(0.6, 0.8)], None).is_err());
        assert!(run_probabilistic_broadcast(&target, &[(0.6, 0.6)], None).is_err());
        assert!(run_probabilistic_broadcast(&KnownQubit::equatorial(0.1), &[(h, h)], None).is_err());
    }
}
