//! Gate lists, exhaustive branch execution, and the named preparation and
//! broadcasting circuits.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::noise::{apply_kraus, NoiseSpec};
use crate::tensor::{matrix, r, CMatrix, DensityMatrix, QubitIndex, StateVector, C64};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GateClass {
    SingleQubit,
    TwoQubit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    H(usize),
    X(usize),
    Y(usize),
    Z(usize),
    /// `diag(1, e^{iφ})`.
    Phase(usize, f64),
    /// `exp(-iθY/2)`.
    Ry(usize, f64),
    Cx {
        control: usize,
        target: usize,
    },
    Cz(usize, usize),
}

impl Gate {
    pub fn qubits(&self) -> Vec<QubitIndex> {
        match *self {
            Gate::H(q) | Gate::X(q) | Gate::Y(q) | Gate::Z(q) | Gate::Phase(q, _) | Gate::Ry(q, _) => {
                vec![QubitIndex(q)]
            }
            Gate::Cx { control, target } => vec![QubitIndex(control), QubitIndex(target)],
            Gate::Cz(a, b) => vec![QubitIndex(a), QubitIndex(b)],
        }
    }

    pub fn class(&self) -> GateClass {
        match self {
            Gate::Cx { .. } | Gate::Cz(..) => GateClass::TwoQubit,
            _ => GateClass::SingleQubit,
        }
    }

    pub fn matrix(&self) -> CMatrix {
        let z = r(0.0);
        let o = r(1.0);
        match *self {
            Gate::H(_) => matrix(2, 2, &[o, o, o, -o]) * r(FRAC_1_SQRT_2),
            Gate::X(_) => matrix(2, 2, &[z, o, o, z]),
            Gate::Y(_) => matrix(2, 2, &[z, C64::new(0.0, -1.0), C64::new(0.0, 1.0), z]),
            Gate::Z(_) => matrix(2, 2, &[o, z, z, -o]),
            Gate::Phase(_, phi) => matrix(2, 2, &[o, z, z, C64::from_polar(1.0, phi)]),
            Gate::Ry(_, theta) => {
                let (s, c) = (theta / 2.0).sin_cos();
                matrix(2, 2, &[r(c), r(-s), r(s), r(c)])
            }
            Gate::Cx { .. } => matrix(4, 4, &[o, z, z, z, z, o, z, z, z, z, z, o, z, z, o, z]),
            Gate::Cz(..) => matrix(4, 4, &[o, z, z, z, z, o, z, z, z, z, o, z, z, z, z, -o]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalRegister {
    pub name: String,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Op {
    Gate(Gate),
    /// Computational-basis measurement of `qubit` into `creg[bit]`.
    Measure {
        qubit: usize,
        creg: usize,
        bit: usize,
    },
    /// Applies `gate` when the register reads `value` (bit 0 least significant).
    Conditional {
        creg: usize,
        value: u64,
        gate: Gate,
    },
    Barrier,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub n_qubits: usize,
    pub cregs: Vec<ClassicalRegister>,
    pub ops: Vec<Op>,
}

/// One fully-resolved measurement history of a circuit.
#[derive(Debug, Clone)]
pub struct CircuitBranch {
    /// Final value of each classical register.
    pub registers: Vec<u64>,
    pub probability: f64,
    pub state: DensityMatrix,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            cregs: Vec::new(),
            ops: Vec::new(),
        }
    }

    pub fn with_gates(n_qubits: usize, gates: impl IntoIterator<Item = Gate>) -> Self {
        let mut c = Self::new(n_qubits);
        c.ops.extend(gates.into_iter().map(Op::Gate));
        c
    }

    pub fn add_creg(&mut self, name: &str, size: usize) -> usize {
        self.cregs.push(ClassicalRegister {
            name: name.to_string(),
            size,
        });
        self.cregs.len() - 1
    }

    pub fn push(&mut self, gate: Gate) -> &mut Self {
        self.ops.push(Op::Gate(gate));
        self
    }

    pub fn gates(&self) -> impl Iterator<Item = &Gate> {
        self.ops.iter().filter_map(|op| match op {
            Op::Gate(g) => Some(g),
            _ => None,
        })
    }

    pub fn gate_count(&self) -> usize {
        self.gates().count()
    }

    /// The gate-only prefix before the first measurement.
    pub fn unitary_prefix(&self) -> Circuit {
        let ops = self
            .ops
            .iter()
            .take_while(|op| !matches!(op, Op::Measure { .. } | Op::Conditional { .. }))
            .filter(|op| matches!(op, Op::Gate(_)))
            .cloned()
            .collect();
        Circuit {
            n_qubits: self.n_qubits,
            cregs: Vec::new(),
            ops,
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        for op in &self.ops {
            let gate = match op {
                Op::Gate(g) | Op::Conditional { gate: g, .. } => Some(g),
                Op::Measure { qubit, creg, bit } => {
                    if *qubit >= self.n_qubits {
                        return Err(Error::QubitOutOfRange {
                            index: *qubit,
                            n_qubits: self.n_qubits,
                        });
                    }
                    let size = self.cregs.get(*creg).map(|c| c.size).unwrap_or(0);
                    if *bit >= size {
                        return Err(Error::InvalidArgument(format!(
                            "classical bit {creg}[{bit}] does not exist"
                        )));
                    }
                    None
                }
                Op::Barrier => None,
            };
            if let Some(g) = gate {
                crate::tensor::check_targets(&g.qubits(), self.n_qubits)?;
            }
            if let Op::Conditional { creg, .. } = op {
                if *creg >= self.cregs.len() {
                    return Err(Error::InvalidArgument(format!(
                        "classical register {creg} does not exist"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Noiseless pure-state run of the gate ops; measurements are rejected.
    pub fn run_pure(&self, initial: &StateVector) -> Result<StateVector> {
        self.validate()?;
        let mut psi = initial.clone();
        for op in &self.ops {
            match op {
                Op::Gate(g) => psi.apply_in_place(&g.matrix(), &g.qubits())?,
                Op::Barrier => {}
                _ => return Err(Error::InvalidArgument("run_pure cannot execute measurements".into())),
            }
        }
        Ok(psi)
    }

    /// Mixed-state run of the gate ops with optional per-gate noise.
    /// Measurements are rejected; use [`Circuit::run_branches`].
    pub fn evolve(&self, initial: &DensityMatrix, noise: Option<&NoiseSpec>) -> Result<DensityMatrix> {
        self.validate()?;
        if initial.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: 1 << self.n_qubits,
                found: initial.dim(),
            });
        }
        let mut rho = initial.clone();
        for op in &self.ops {
            match op {
                Op::Gate(g) => rho = apply_gate(rho, g, noise)?,
                Op::Barrier => {}
                _ => return Err(Error::InvalidArgument("evolve cannot execute measurements".into())),
            }
        }
        Ok(rho)
    }

    /// Executes every measurement history exhaustively.
    pub fn run_branches(&self, initial: &DensityMatrix, noise: Option<&NoiseSpec>) -> Result<Vec<CircuitBranch>> {
        self.validate()?;
        let mut branches = vec![CircuitBranch {
            registers: vec![0; self.cregs.len()],
            probability: 1.0,
            state: initial.clone(),
        }];
        for op in &self.ops {
            match op {
                Op::Gate(g) => {
                    for b in &mut branches {
                        b.state = apply_gate(b.state.clone(), g, noise)?;
                    }
                }
                Op::Conditional { creg, value, gate } => {
                    for b in &mut branches {
                        if b.registers[*creg] == *value {
                            b.state = apply_gate(b.state.clone(), gate, noise)?;
                        }
                    }
                }
                Op::Measure { qubit, creg, bit } => {
                    let mut next = Vec::with_capacity(branches.len() * 2);
                    for b in branches {
                        for outcome in 0..2u64 {
                            let (p, post) = b
                                .state
                                .project(&[QubitIndex(*qubit)], &StateVector::basis(1, outcome as usize))?;
                            if let Some(state) = post {
                                let mut registers = b.registers.clone();
                                registers[*creg] = (registers[*creg] & !(1 << bit)) | (outcome << bit);
                                next.push(CircuitBranch {
                                    registers,
                                    probability: b.probability * p,
                                    state,
                                });
                            }
                        }
                    }
                    branches = next;
                }
                Op::Barrier => {}
            }
        }
        Ok(branches)
    }
}

pub(crate) fn apply_gate(mut rho: DensityMatrix, gate: &Gate, noise: Option<&NoiseSpec>) -> Result<DensityMatrix> {
    let qubits = gate.qubits();
    rho.apply_in_place(&gate.matrix(), &qubits)?;
    if let Some(spec) = noise.filter(|s| s.hits_gate(gate.class())) {
        for q in qubits {
            rho = apply_kraus(&rho, &spec.channel, q)?;
        }
    }
    Ok(rho)
}

/// Named circuits that can be exported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CircuitId {
    /// Two Bell pairs on (0,1) and (2,3).
    Fig1a,
    /// Four-qubit cluster state with the `−|1111⟩` sign.
    Fig1b,
    /// Broadcast of `|+⟩` over the all-plus four-qubit state.
    Fig3a,
    /// Broadcast of `|+⟩` over two Bell pairs.
    Fig3b,
}

impl CircuitId {
    pub const ALL: [CircuitId; 4] = [CircuitId::Fig1a, CircuitId::Fig1b, CircuitId::Fig3a, CircuitId::Fig3b];

    pub fn name(self) -> &'static str {
        match self {
            CircuitId::Fig1a => "fig1a",
            CircuitId::Fig1b => "fig1b",
            CircuitId::Fig3a => "fig3a",
            CircuitId::Fig3b => "fig3b",
        }
    }

    pub fn circuit(self) -> Circuit {
        match self {
            CircuitId::Fig1a => bell_pair_prep(),
            CircuitId::Fig1b => cluster_prep(),
            CircuitId::Fig3a => cluster_plus_broadcast(),
            CircuitId::Fig3b => bell_pair_broadcast(),
        }
    }
}

impl std::str::FromStr for CircuitId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CircuitId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::UnknownCircuit(s.to_string()))
    }
}

/// `H(0), CX(0→1), H(2), CX(2→3)`: prepares `|Φ+⟩ ⊗ |Φ+⟩`.
pub fn bell_pair_prep() -> Circuit {
    Circuit::with_gates(
        4,
        [
            Gate::H(0),
            Gate::Cx { control: 0, target: 1 },
            Gate::H(2),
            Gate::Cx { control: 2, target: 3 },
        ],
    )
}

/// `H(0), H(1), CX(0→2), CX(1→3), CZ(0,1)`: prepares
/// `(|0000⟩+|0101⟩+|1010⟩−|1111⟩)/2`.
pub fn cluster_prep() -> Circuit {
    Circuit::with_gates(
        4,
        [
            Gate::H(0),
            Gate::H(1),
            Gate::Cx { control: 0, target: 2 },
            Gate::Cx { control: 1, target: 3 },
            Gate::Cz(0, 1),
        ],
    )
}

fn x_basis_broadcast(prep: [Gate; 4], senders: [usize; 2], receivers: [usize; 2]) -> Circuit {
    let mut c = Circuit::with_gates(4, prep);
    c.ops.push(Op::Barrier);
    let regs = [c.add_creg("c0", 1), c.add_creg("c1", 1)];
    for s in senders {
        c.push(Gate::H(s));
    }
    for (s, reg) in senders.iter().zip(regs) {
        c.ops.push(Op::Measure {
            qubit: *s,
            creg: reg,
            bit: 0,
        });
    }
    for (rcv, reg) in receivers.iter().zip(regs) {
        c.ops.push(Op::Conditional {
            creg: reg,
            value: 1,
            gate: Gate::Z(*rcv),
        });
    }
    c
}

/// Sender holds qubits 0 and 1 of `(|0000⟩+|0101⟩+|1010⟩+|1111⟩)/2`, measures
/// both in the X basis, and each receiver applies Z on its own outcome bit.
pub fn cluster_plus_broadcast() -> Circuit {
    x_basis_broadcast(
        [
            Gate::H(0),
            Gate::H(1),
            Gate::Cx { control: 0, target: 2 },
            Gate::Cx { control: 1, target: 3 },
        ],
        [0, 1],
        [2, 3],
    )
}

/// Sender measures the first qubit of each Bell pair in the X basis; each
/// receiver applies Z when its pair's outcome is 1.
pub fn bell_pair_broadcast() -> Circuit {
    x_basis_broadcast(
        [
            Gate::H(0),
            Gate::Cx { control: 0, target: 1 },
            Gate::H(2),
            Gate::Cx { control: 2, target: 3 },
        ],
        [0, 2],
        [1, 3],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{hermiticity_deviation, max_abs_diff};

    #[test]
    fn gates_are_unitary() {
        for g in [
            Gate::H(0),
            Gate::X(0),
            Gate::Y(0),
            Gate::Z(0),
            Gate::Phase(0, 0.7),
            Gate::Ry(0, 1.3),
            Gate::Cx { control: 0, target: 1 },
            Gate::Cz(0, 1),
        ] {
            let m = g.matrix();
            let id = CMatrix::identity(m.nrows(), m.nrows());
            assert!(max_abs_diff(&(m.adjoint() * &m), &id) < 1e-15, "{g:?}");
        }
    }

    #[test]
    fn ry_prepares_real_polar_state() {
        let theta: f64 = 0.4;
        let psi = Circuit::with_gates(1, [Gate::Ry(0, 2.0 * theta)])
            .run_pure(&StateVector::zero(1))
            .unwrap();
        assert!((psi.amplitude(0).re - theta.cos()).abs() < 1e-15);
        assert!((psi.amplitude(1).re - theta.sin()).abs() < 1e-15);
    }

    #[test]
    fn bell_prep_gives_two_bell_pairs() {
        let psi = bell_pair_prep().run_pure(&StateVector::zero(4)).unwrap();
        for i in [0b0000, 0b0011, 0b1100, 0b1111] {
            assert!((psi.amplitude(i) - r(0.5)).norm() < 1e-15);
        }
    }

    #[test]
    fn cluster_prep_sign() {
        let psi = cluster_prep().run_pure(&StateVector::zero(4)).unwrap();
        assert!((psi.amplitude(0b1111) - r(-0.5)).norm() < 1e-15);
        assert!((psi.amplitude(0b0101) - r(0.5)).norm() < 1e-15);
    }

    #[test]
    fn broadcast_circuits_deliver_plus_in_every_branch() {
        let h = FRAC_1_SQRT_2;
        let plus = StateVector::from_real(&[h, h]).unwrap();
        for id in [CircuitId::Fig3a, CircuitId::Fig3b] {
            let c = id.circuit();
            let receivers = if id == CircuitId::Fig3a { [2, 3] } else { [1, 3] };
            let branches = c
                .run_branches(&DensityMatrix::from_pure(&StateVector::zero(4)), None)
                .unwrap();
            assert_eq!(branches.len(), 4);
            let total: f64 = branches.iter().map(|b| b.probability).sum();
            assert!((total - 1.0).abs() < 1e-12);
            for b in &branches {
                assert!((b.probability - 0.25).abs() < 1e-12);
                for q in receivers {
                    let red = b.state.partial_trace(&[QubitIndex(q)]).unwrap();
                    assert!((red.expectation(&plus) - 1.0).abs() < 1e-12, "{id:?} {:?}", b.registers);
                }
                assert!(hermiticity_deviation(b.state.matrix()) < 1e-12);
            }
        }
    }

    #[test]
    fn unitary_prefix_stops_at_measurement() {
        assert_eq!(bell_pair_broadcast().unitary_prefix().gate_count(), 6);
    }

    #[test]
    fn circuit_ids_round_trip_names() {
        for id in CircuitId::ALL {
            assert_eq!(id.name().parse::<CircuitId>().unwrap(), id);
        }
        assert!(matches!("fig9".parse::<CircuitId>(), Err(Error::UnknownCircuit(_))));
    }
}
