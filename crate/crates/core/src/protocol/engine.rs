//! Branch-tree evolution for one independent piece of a protocol.

use super::transcript::{Branch, Correction, Message, Outcome, OutputSlot};
use super::PauliFrame;
use crate::channels::PartyId;
use crate::circuit::{apply_gate, Circuit, Gate, GateClass};
use crate::noise::{inject, NoiseMode, NoiseScope, NoiseSpec, NoisyStep};
use crate::tensor::{hermitian_sqrt, identity, max_abs_diff, CMatrix, DensityMatrix, QubitIndex, StateVector, C64};
use crate::{Error, Result};

/// Label used for receiver-side filter outcomes.
pub(crate) const FILTER: &str = "filter";

#[derive(Debug, Clone)]
pub(crate) struct Path {
    pub probability: f64,
    pub rho: DensityMatrix,
    pub outcomes: Vec<Outcome>,
    pub messages: Vec<Message>,
    pub corrections: Vec<Correction>,
    pub success: bool,
}

impl Path {
    pub fn value(&self, label: &str) -> usize {
        self.outcomes
            .iter()
            .find(|o| o.label == label)
            .map(|o| o.value)
            .unwrap_or_else(|| panic!("no outcome labelled {label}"))
    }

    /// Sender measurement results packed into one integer, first result in
    /// the high bits.
    pub fn key(&self) -> usize {
        self.outcomes
            .iter()
            .filter(|o| o.label != FILTER)
            .fold(0, |acc, o| (acc << o.width) | o.value)
    }
}

pub(crate) struct Engine<'a> {
    pub paths: Vec<Path>,
    noise: Option<&'a NoiseSpec>,
}

fn check_protocol_noise(noise: Option<&NoiseSpec>) -> Result<()> {
    if let Some(spec) = noise {
        if spec.mode == NoiseMode::TransmittedQubit && spec.scope != NoiseScope::ReceiverQubits {
            return Err(Error::InvalidArgument(
                "protocol runs attach transmitted-qubit noise to receiver qubits only".into(),
            ));
        }
    }
    Ok(())
}

/// Unitary sending `basis[k]` to `|k⟩`.
fn basis_change(basis: &[StateVector]) -> CMatrix {
    let dim = basis.len();
    CMatrix::from_fn(dim, dim, |k, j| basis[k].amplitude(j).conj())
}

impl<'a> Engine<'a> {
    /// Runs `prep` from `|0…0⟩` under per-gate noise, then applies
    /// transmitted-qubit noise to `receivers`.
    pub fn prepare(prep: &Circuit, receivers: &[usize], noise: Option<&'a NoiseSpec>) -> Result<Self> {
        Ok(Self::from_state(prepare_state(prep, receivers, noise)?, noise))
    }

    pub fn from_state(rho: DensityMatrix, noise: Option<&'a NoiseSpec>) -> Self {
        Self {
            paths: vec![Path {
                probability: 1.0,
                rho,
                outcomes: Vec::new(),
                messages: Vec::new(),
                corrections: Vec::new(),
                success: true,
            }],
            noise,
        }
    }

    /// A local operation, noisy under per-gate noise.
    pub fn gate(&mut self, gate: Gate) -> Result<()> {
        for p in &mut self.paths {
            p.rho = apply_gate(p.rho.clone(), &gate, self.noise)?;
        }
        Ok(())
    }

    /// Measures `qubits` in a basis that may depend on earlier results.
    ///
    /// Under per-gate noise a non-trivial basis is realized as a basis
    /// change (noisy on every measured qubit) followed by a computational
    /// measurement.
    pub fn measure(
        &mut self,
        party: PartyId,
        label: &str,
        qubits: &[usize],
        basis: impl Fn(&Path) -> Vec<StateVector>,
    ) -> Result<()> {
        let targets: Vec<QubitIndex> = qubits.iter().map(|&q| QubitIndex(q)).collect();
        let class = if qubits.len() == 1 {
            GateClass::SingleQubit
        } else {
            GateClass::TwoQubit
        };
        let width = qubits.len();
        let mut next = Vec::with_capacity(self.paths.len() << width);
        for path in self.paths.drain(..) {
            let mut basis = basis(&path);
            let mut rho = path.rho.clone();
            let u = basis_change(&basis);
            let noisy = self
                .noise
                .filter(|s| s.mode == NoiseMode::PerGate && s.hits_gate(class))
                .filter(|_| max_abs_diff(&u, &identity(width)) > 0.0);
            if let Some(spec) = noisy {
                rho = rho.apply(&u, &targets)?;
                for &t in &targets {
                    rho = crate::noise::apply_kraus(&rho, &spec.channel, t)?;
                }
                basis = (0..1 << width).map(|k| StateVector::basis(width, k)).collect();
            }
            for (k, b) in basis.iter().enumerate() {
                let (p, post) = rho.project(&targets, b)?;
                if let Some(state) = post {
                    let mut child = path.clone();
                    child.probability *= p;
                    child.rho = state;
                    child.outcomes.push(Outcome {
                        party,
                        label: label.to_string(),
                        value: k,
                        width,
                    });
                    next.push(child);
                }
            }
        }
        self.paths = next;
        Ok(())
    }

    pub fn send(&mut self, from: PartyId, to: PartyId, bits: impl Fn(&Path) -> Vec<u8>) {
        for p in &mut self.paths {
            let bits = bits(p);
            p.messages.push(Message { from, to, bits });
        }
    }

    /// Applies the frame chosen from the branch history, ideally. `None`
    /// marks the branch failed.
    pub fn correct(
        &mut self,
        party: PartyId,
        qubit: usize,
        cites: &[usize],
        frame: impl Fn(&Path) -> Option<PauliFrame>,
    ) -> Result<()> {
        for p in &mut self.paths {
            match frame(p) {
                Some(f) => {
                    if f != PauliFrame::I {
                        p.rho = p.rho.apply(&f.matrix(), &[QubitIndex(qubit)])?;
                        p.corrections.push(Correction {
                            party,
                            pauli: f,
                            cites: cites.to_vec(),
                        });
                    }
                }
                None => p.success = false,
            }
        }
        Ok(())
    }

    /// Two-outcome generalized measurement `{M, √(I − M†M)}` on one qubit;
    /// the second outcome marks the branch failed.
    pub fn filter(&mut self, party: PartyId, qubit: usize, op: impl Fn(&Path) -> CMatrix) -> Result<()> {
        let target = [QubitIndex(qubit)];
        let mut next = Vec::with_capacity(self.paths.len() * 2);
        for path in self.paths.drain(..) {
            let m = op(&path);
            let fail = hermitian_sqrt(&(CMatrix::identity(2, 2) - m.adjoint() * &m))?;
            for (value, k) in [(0usize, m), (1, fail)] {
                let mut rho = path.rho.apply(&k, &target)?.into_matrix();
                let p = rho.trace().re;
                if p <= 1e-15 {
                    continue;
                }
                rho /= C64::new(p, 0.0);
                let mut child = path.clone();
                child.probability *= p;
                child.rho = DensityMatrix::from_matrix(rho)?;
                child.success &= value == 0;
                child.outcomes.push(Outcome {
                    party,
                    label: FILTER.to_string(),
                    value,
                    width: 1,
                });
                next.push(child);
            }
        }
        self.paths = next;
        Ok(())
    }

    /// Reduces every path to the listed receiver qubits.
    pub fn finish(self, slots: &[(OutputSlot, usize)]) -> Result<Vec<Branch>> {
        self.paths
            .into_iter()
            .map(|p| {
                let outputs = slots
                    .iter()
                    .map(|&(slot, q)| Ok((slot, p.rho.partial_trace(&[QubitIndex(q)])?)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Branch {
                    outcomes: p.outcomes,
                    probability: p.probability,
                    messages: p.messages,
                    corrections: p.corrections,
                    outputs,
                    success: p.success,
                })
            })
            .collect()
    }
}

pub(crate) fn prepare_state(prep: &Circuit, receivers: &[usize], noise: Option<&NoiseSpec>) -> Result<DensityMatrix> {
    check_protocol_noise(noise)?;
    let initial = StateVector::basis(prep.n_qubits, 0).to_density();
    let receivers: Vec<QubitIndex> = receivers.iter().map(|&q| QubitIndex(q)).collect();
    match noise {
        Some(spec) => inject(
            NoisyStep::Circuit {
                circuit: prep,
                initial: &initial,
                receivers: &receivers,
            },
            spec,
        ),
        None => prep.evolve(&initial, None),
    }
}

/// Combines independent pieces: every choice of one branch per piece.
pub(crate) fn product(pieces: Vec<Vec<Branch>>) -> Vec<Branch> {
    let mut acc = vec![Branch {
        outcomes: Vec::new(),
        probability: 1.0,
        messages: Vec::new(),
        corrections: Vec::new(),
        outputs: Vec::new(),
        success: true,
    }];
    for piece in pieces {
        let mut next = Vec::with_capacity(acc.len() * piece.len());
        for a in &acc {
            for b in &piece {
                let offset = a.messages.len();
                let mut merged = a.clone();
                merged.outcomes.extend(b.outcomes.iter().cloned());
                merged.probability *= b.probability;
                merged.messages.extend(b.messages.iter().cloned());
                merged.corrections.extend(b.corrections.iter().map(|c| Correction {
                    party: c.party,
                    pauli: c.pauli,
                    cites: c.cites.iter().map(|i| i + offset).collect(),
                }));
                merged.outputs.extend(b.outputs.iter().cloned());
                merged.success &= b.success;
                next.push(merged);
            }
        }
        acc = next;
    }
    acc
}
