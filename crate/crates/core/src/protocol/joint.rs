use super::broadcast::{teleport_piece, Link};
use super::corrections::{frame_for, partial_rule, PartialRule, ProtocolKind};
use super::engine::{product, Engine};
use super::transcript::{Branch, OutputSlot, Transcript};
use super::TargetClass;
use crate::channels::PartyId;
use crate::circuit::{Circuit, Gate};
use crate::noise::NoiseSpec;
use crate::tensor::{r, StateVector, C64};
use crate::{Error, Result};

fn equatorial_pair(phase: f64) -> Vec<StateVector> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let e = C64::from_polar(h, phase);
    vec![
        StateVector::new(vec![r(h), e]).expect("two amplitudes"),
        StateVector::new(vec![r(h), -e]).expect("two amplitudes"),
    ]
}

/// One GHZ link `(sender 1, sender 2, receiver)`.
pub(crate) fn joint_piece(
    theta: f64,
    phi: f64,
    receiver: usize,
    adaptive: bool,
    rule: Option<&PartialRule>,
    noise: Option<&NoiseSpec>,
) -> Result<Vec<Branch>> {
    let prep = Circuit::with_gates(
        3,
        [
            Gate::H(0),
            Gate::Cx { control: 0, target: 1 },
            Gate::Cx { control: 0, target: 2 },
        ],
    );
    let (s1, s2, rcv) = (PartyId::Sender(1), PartyId::Sender(2), PartyId::Receiver(receiver));
    let (s, c) = theta.sin_cos();
    let amplitude = vec![StateVector::from_real(&[c, s])?, StateVector::from_real(&[s, -c])?];
    let phase = [equatorial_pair(-phi), equatorial_pair(phi)];
    let mut e = Engine::prepare(&prep, &[2], noise)?;
    e.measure(s1, "s1", &[0], |_| amplitude.clone())?;
    e.send(s1, s2, |p| vec![p.value("s1") as u8]);
    e.send(s1, rcv, |p| vec![p.value("s1") as u8]);
    e.measure(s2, "s2", &[1], |p| {
        let announced = if adaptive { p.value("s1") } else { 0 };
        phase[announced].clone()
    })?;
    e.send(s2, rcv, |p| vec![p.value("s2") as u8]);
    e.correct(rcv, 2, &[1, 2], |p| frame_for(rule, p.key(), 0))?;
    e.finish(&[(
        OutputSlot {
            sender: s1,
            receiver: rcv,
        },
        2,
    )])
}

/// Two senders jointly broadcast `cos θ|0⟩ + e^{iφ} sin θ|1⟩` to `m`
/// receivers over one GHZ state per receiver. Sender 1 knows only `θ`,
/// sender 2 only `φ`.
///
/// Sender 1 measures in `{cos θ|0⟩+sin θ|1⟩, sin θ|0⟩−cos θ|1⟩}` and
/// announces the result. Sender 2 measures in
/// `{(|0⟩ ± e^{∓iφ}|1⟩)/√2}`, with the sign of the phase flipped when sender
/// 1 announced 1. With `adaptive = false` sender 2 always uses the first
/// basis and branches where sender 1 got 1 fail.
pub fn run_joint_broadcast(
    theta: f64,
    phi: f64,
    m: usize,
    adaptive: bool,
    noise: Option<&NoiseSpec>,
) -> Result<Transcript> {
    if m == 0 {
        return Err(Error::InvalidArgument("at least one receiver is required".into()));
    }
    let kind = if adaptive {
        ProtocolKind::Joint
    } else {
        ProtocolKind::JointNonAdaptive
    };
    let rule = partial_rule(kind, TargetClass::General)?;
    let pieces = (1..=m)
        .map(|i| joint_piece(theta, phi, i, adaptive, Some(&rule), noise))
        .collect::<Result<Vec<_>>>()?;
    let name = if adaptive { "joint" } else { "joint-non-adaptive" };
    Ok(Transcript::new(name, product(pieces), 0, 3 * m))
}

/// `n = phases.len() + 1` senders in a chain. Sender 1 prepares
/// `cos θ|0⟩ + sin θ|1⟩`, sender `j + 1` applies `P(φ_j)`, and the last
/// sender teleports the result to a receiver. One copy travels the chain per
/// receiver, so each receiver ends with `cos θ|0⟩ + e^{iΣφ} sin θ|1⟩`.
pub fn run_phase_chain(theta: f64, phases: &[f64], m: usize, noise: Option<&NoiseSpec>) -> Result<Transcript> {
    if phases.is_empty() {
        return Err(Error::InvalidArgument("a phase chain needs at least one phase".into()));
    }
    if m == 0 {
        return Err(Error::InvalidArgument("at least one receiver is required".into()));
    }
    let last = PartyId::Sender(phases.len() + 1);
    let mut copy = vec![Gate::Ry(2, 2.0 * theta)];
    copy.extend(phases.iter().map(|&phi| Gate::Phase(2, phi)));
    let rule = partial_rule(ProtocolKind::Teleport, TargetClass::General)?;
    let pieces = (1..=m)
        .map(|i| {
            teleport_piece(
                &copy,
                Link::PHI_PLUS,
                last,
                PartyId::Receiver(i),
                None,
                Some(&rule),
                noise,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Transcript::new("phase-chain", product(pieces), m, 2 * m))
}
