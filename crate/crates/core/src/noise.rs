//! Single-qubit Kraus channels and the two ways of attaching them to a run.
//!
//! All four channels use `p` as the probability of the error event. For the
//! bit-flip channel that means `K0 = √(1-p)·I`, `K1 = √p·X`.

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, GateClass};
use crate::tensor::{matrix, r, CMatrix, DensityMatrix, QubitIndex, C64};
use crate::{Error, Result};

/// Completeness tolerance for `Σ K†K = I`.
pub const COMPLETENESS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseKind {
    BitFlip,
    Depolarizing,
    AmplitudeDamping,
    PhaseDamping,
    /// Hand-built Kraus set.
    Custom,
}

impl NoiseKind {
    pub const STANDARD: [NoiseKind; 4] = [
        NoiseKind::BitFlip,
        NoiseKind::Depolarizing,
        NoiseKind::AmplitudeDamping,
        NoiseKind::PhaseDamping,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NoiseKind::BitFlip => "bit-flip",
            NoiseKind::Depolarizing => "depolarizing",
            NoiseKind::AmplitudeDamping => "amplitude-damping",
            NoiseKind::PhaseDamping => "phase-damping",
            NoiseKind::Custom => "custom",
        }
    }

    /// Builds the standard channel of this kind.
    pub fn channel(self, p: f64) -> Result<NoiseChannel> {
        match self {
            NoiseKind::BitFlip => bit_flip(p),
            NoiseKind::Depolarizing => depolarizing(p),
            NoiseKind::AmplitudeDamping => amplitude_damping(p),
            NoiseKind::PhaseDamping => phase_damping(p),
            NoiseKind::Custom => Err(Error::InvalidArgument(
                "custom channels need explicit Kraus operators".into(),
            )),
        }
    }
}

impl std::str::FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bit-flip" | "bitflip" | "bit_flip" => Ok(NoiseKind::BitFlip),
            "depolarizing" => Ok(NoiseKind::Depolarizing),
            "amplitude-damping" | "amplitude_damping" => Ok(NoiseKind::AmplitudeDamping),
            "phase-damping" | "phase_damping" => Ok(NoiseKind::PhaseDamping),
            other => Err(Error::InvalidArgument(format!("unknown noise kind `{other}`"))),
        }
    }
}

/// A single-qubit channel given by its Kraus operators.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseChannel {
    pub kind: NoiseKind,
    pub p: f64,
    kraus: Vec<CMatrix>,
}

impl NoiseChannel {
    /// Wraps an arbitrary Kraus list; completeness is not checked here.
    pub fn custom(kraus: Vec<CMatrix>) -> Self {
        Self {
            kind: NoiseKind::Custom,
            p: f64::NAN,
            kraus,
        }
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }
}

fn check_p(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::ProbabilityOutOfRange(p))
    }
}

fn scaled(m: [C64; 4], s: f64) -> CMatrix {
    matrix(2, 2, &m) * r(s)
}

const I2: [C64; 4] = [
    C64::new(1.0, 0.0),
    C64::new(0.0, 0.0),
    C64::new(0.0, 0.0),
    C64::new(1.0, 0.0),
];
const X2: [C64; 4] = [
    C64::new(0.0, 0.0),
    C64::new(1.0, 0.0),
    C64::new(1.0, 0.0),
    C64::new(0.0, 0.0),
];
const Y2: [C64; 4] = [
    C64::new(0.0, 0.0),
    C64::new(0.0, -1.0),
    C64::new(0.0, 1.0),
    C64::new(0.0, 0.0),
];
const Z2: [C64; 4] = [
    C64::new(1.0, 0.0),
    C64::new(0.0, 0.0),
    C64::new(0.0, 0.0),
    C64::new(-1.0, 0.0),
];

/// Flips the qubit with probability `p`.
pub fn bit_flip(p: f64) -> Result<NoiseChannel> {
    check_p(p)?;
    Ok(NoiseChannel {
        kind: NoiseKind::BitFlip,
        p,
        kraus: vec![scaled(I2, (1.0 - p).sqrt()), scaled(X2, p.sqrt())],
    })
}

/// `K0 = √(1-3p/4)·I`, `K1..3 = (√p/2)·{X, Y, Z}`.
pub fn depolarizing(p: f64) -> Result<NoiseChannel> {
    check_p(p)?;
    let s = p.sqrt() / 2.0;
    Ok(NoiseChannel {
        kind: NoiseKind::Depolarizing,
        p,
        kraus: vec![
            scaled(I2, (1.0 - 0.75 * p).sqrt()),
            scaled(X2, s),
            scaled(Y2, s),
            scaled(Z2, s),
        ],
    })
}

pub fn amplitude_damping(p: f64) -> Result<NoiseChannel> {
    check_p(p)?;
    Ok(NoiseChannel {
        kind: NoiseKind::AmplitudeDamping,
        p,
        kraus: vec![
            matrix(2, 2, &[r(1.0), r(0.0), r(0.0), r((1.0 - p).sqrt())]),
            matrix(2, 2, &[r(0.0), r(p.sqrt()), r(0.0), r(0.0)]),
        ],
    })
}

pub fn phase_damping(p: f64) -> Result<NoiseChannel> {
    check_p(p)?;
    Ok(NoiseChannel {
        kind: NoiseKind::PhaseDamping,
        p,
        kraus: vec![
            scaled(I2, (1.0 - p).sqrt()),
            matrix(2, 2, &[r(p.sqrt()), r(0.0), r(0.0), r(0.0)]),
            matrix(2, 2, &[r(0.0), r(0.0), r(0.0), r(p.sqrt())]),
        ],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompletenessReport {
    pub ok: bool,
    /// Largest entrywise deviation of `Σ K†K` from the identity.
    pub max_deviation: f64,
}

/// Checks `Σ_i K_i† K_i = I` (trace preservation).
pub fn validate_completeness(channel: &NoiseChannel) -> CompletenessReport {
    let mut sum = CMatrix::zeros(2, 2);
    for k in &channel.kraus {
        if k.shape() != (2, 2) {
            return CompletenessReport {
                ok: false,
                max_deviation: f64::INFINITY,
            };
        }
        sum += k.adjoint() * k;
    }
    let max_deviation = crate::tensor::max_abs_diff(&sum, &CMatrix::identity(2, 2));
    CompletenessReport {
        ok: max_deviation <= COMPLETENESS_TOL,
        max_deviation,
    }
}

/// `ρ' = Σ_i K_i ρ K_i†` on one qubit of the register.
pub fn apply_kraus(rho: &DensityMatrix, channel: &NoiseChannel, target: QubitIndex) -> Result<DensityMatrix> {
    let report = validate_completeness(channel);
    if !report.ok {
        return Err(Error::InvalidChannel {
            deviation: report.max_deviation,
        });
    }
    rho.apply_kraus_unchecked(&channel.kraus, target)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseMode {
    /// The channel hits each travelling (receiver-owned) qubit once, after
    /// the resource has been prepared.
    TransmittedQubit,
    /// The channel hits every qubit a gate touches, right after that gate.
    PerGate,
}

impl NoiseMode {
    pub fn name(self) -> &'static str {
        match self {
            NoiseMode::TransmittedQubit => "transmitted-qubit",
            NoiseMode::PerGate => "per-gate",
        }
    }
}

impl std::str::FromStr for NoiseMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "transmitted-qubit" | "transmitted" => Ok(NoiseMode::TransmittedQubit),
            "per-gate" | "gate" => Ok(NoiseMode::PerGate),
            other => Err(Error::InvalidArgument(format!("unknown noise mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NoiseScope {
    /// Every qubit owned by a receiver.
    ReceiverQubits,
    Qubits(Vec<QubitIndex>),
    AllGates,
    GateClasses(Vec<GateClass>),
}

/// Channel plus where it is attached.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpec {
    pub channel: NoiseChannel,
    pub mode: NoiseMode,
    pub scope: NoiseScope,
}

impl NoiseSpec {
    pub fn new(channel: NoiseChannel, mode: NoiseMode, scope: NoiseScope) -> Result<Self> {
        let consistent = matches!(
            (mode, &scope),
            (
                NoiseMode::TransmittedQubit,
                NoiseScope::ReceiverQubits | NoiseScope::Qubits(_)
            ) | (NoiseMode::PerGate, NoiseScope::AllGates | NoiseScope::GateClasses(_))
        );
        if !consistent {
            return Err(Error::InvalidArgument(format!(
                "scope {scope:?} does not fit noise mode {}",
                mode.name()
            )));
        }
        let report = validate_completeness(&channel);
        if !report.ok {
            return Err(Error::InvalidChannel {
                deviation: report.max_deviation,
            });
        }
        Ok(Self { channel, mode, scope })
    }

    /// Channel on every receiver-owned qubit after distribution.
    pub fn transmitted(channel: NoiseChannel) -> Self {
        Self {
            channel,
            mode: NoiseMode::TransmittedQubit,
            scope: NoiseScope::ReceiverQubits,
        }
    }

    /// Channel after every gate on every touched qubit.
    pub fn per_gate(channel: NoiseChannel) -> Self {
        Self {
            channel,
            mode: NoiseMode::PerGate,
            scope: NoiseScope::AllGates,
        }
    }

    pub(crate) fn hits_gate(&self, class: GateClass) -> bool {
        self.mode == NoiseMode::PerGate
            && match &self.scope {
                NoiseScope::AllGates => true,
                NoiseScope::GateClasses(classes) => classes.contains(&class),
                _ => false,
            }
    }

    /// Qubits hit in transmitted-qubit mode, given the receiver-owned set.
    pub(crate) fn transmitted_targets(&self, receivers: &[QubitIndex], n_qubits: usize) -> Result<Vec<QubitIndex>> {
        if self.mode != NoiseMode::TransmittedQubit {
            return Ok(Vec::new());
        }
        let qubits = match &self.scope {
            NoiseScope::ReceiverQubits => receivers.to_vec(),
            NoiseScope::Qubits(q) => q.clone(),
            _ => Vec::new(),
        };
        if let Some(bad) = qubits.iter().find(|q| q.0 >= n_qubits) {
            return Err(Error::QubitOutOfRange { index: bad.0, n_qubits });
        }
        Ok(qubits)
    }
}

/// A run step that noise can be attached to.
#[derive(Debug, Clone, Copy)]
pub enum NoisyStep<'a> {
    /// Run a gate sequence from `initial`; `receivers` marks the qubits that
    /// are sent away afterwards.
    Circuit {
        circuit: &'a Circuit,
        initial: &'a DensityMatrix,
        receivers: &'a [QubitIndex],
    },
    /// Hand a prepared resource out: receiver-owned qubits travel.
    Distribution {
        state: &'a DensityMatrix,
        receivers: &'a [QubitIndex],
    },
}

/// Evolves a step under `spec`.
///
/// Per-gate noise only acts where there are gates; transmitted-qubit noise
/// acts once on each scoped qubit after the step's gates.
pub fn inject(step: NoisyStep<'_>, spec: &NoiseSpec) -> Result<DensityMatrix> {
    let (mut rho, receivers) = match step {
        NoisyStep::Circuit {
            circuit,
            initial,
            receivers,
        } => (circuit.evolve(initial, Some(spec))?, receivers),
        NoisyStep::Distribution { state, receivers } => (state.clone(), receivers),
    };
    for q in spec.transmitted_targets(receivers, rho.n_qubits())? {
        rho = apply_kraus(&rho, &spec.channel, q)?;
    }
    Ok(rho)
}

pub(crate) fn pauli_matrix(which: char) -> CMatrix {
    match which {
        'I' => matrix(2, 2, &I2),
        'X' => matrix(2, 2, &X2),
        'Y' => matrix(2, 2, &Y2),
        'Z' => matrix(2, 2, &Z2),
        _ => panic!("not a Pauli: {which}"),
    }
}
