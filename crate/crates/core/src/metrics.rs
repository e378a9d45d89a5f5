//! Fidelity, per-receiver aggregation and entanglement cost.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::channels::PartyId;
use crate::protocol::{KnownQubit, OutputSlot, Transcript};
use crate::tensor::{eigen_noise_floor, hermitian_eigen, hermitian_sqrt, DensityMatrix, StateVector, STRUCTURAL_TOL};
use crate::{Error, Result};

fn check_dims(sigma: &DensityMatrix, rho: &DensityMatrix) -> Result<()> {
    if sigma.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: sigma.dim(),
            found: rho.dim(),
        });
    }
    Ok(())
}

/// The vector `ψ` with `ρ = |ψ⟩⟨ψ|`, if `ρ` has rank one.
fn pure_vector(rho: &DensityMatrix) -> Option<StateVector> {
    if (rho.purity() - 1.0).abs() > STRUCTURAL_TOL {
        return None;
    }
    let j = (0..rho.dim())
        .max_by(|&a, &b| rho.entry(a, a).re.total_cmp(&rho.entry(b, b).re))
        .expect("non-empty");
    let scale = rho.entry(j, j).re.sqrt();
    let amps = (0..rho.dim()).map(|i| rho.entry(i, j) / scale).collect();
    StateVector::new(amps).ok()
}

/// `⟨ψ|ρ|ψ⟩`.
pub fn pure_overlap_fidelity(psi: &StateVector, rho: &DensityMatrix) -> Result<f64> {
    if psi.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: psi.dim(),
            found: rho.dim(),
        });
    }
    Ok(rho.expectation(psi).clamp(0.0, 1.0))
}

/// `(Tr √(√σ ρ √σ))²` through matrix square roots, with no shortcut for pure
/// inputs.
pub fn uhlmann_fidelity_general(sigma: &DensityMatrix, rho: &DensityMatrix) -> Result<f64> {
    check_dims(sigma, rho)?;
    let root = hermitian_sqrt(sigma.matrix())?;
    let inner = &root * rho.matrix() * &root;
    let (values, _) = hermitian_eigen(&inner)?;
    let floor = eigen_noise_floor(&values);
    let trace: f64 = values.iter().filter(|&&v| v > floor).map(|v| v.sqrt()).sum();
    Ok((trace * trace).clamp(0.0, 1.0))
}

/// Uhlmann fidelity `F(σ, ρ) = (Tr √(√σ ρ √σ))²`, squared convention.
///
/// When either argument has rank one (purity within 1e-10 of 1) this is
/// `⟨ψ|ρ|ψ⟩`, which is used directly.
pub fn uhlmann_fidelity(sigma: &DensityMatrix, rho: &DensityMatrix) -> Result<f64> {
    check_dims(sigma, rho)?;
    if let Some(psi) = pure_vector(sigma) {
        return pure_overlap_fidelity(&psi, rho);
    }
    if let Some(psi) = pure_vector(rho) {
        return pure_overlap_fidelity(&psi, sigma);
    }
    uhlmann_fidelity_general(sigma, rho)
}

/// Bell pairs needed to broadcast an `m`-coefficient state to `n` receivers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceCount {
    pub m: u64,
    pub n: u32,
    pub bell_pairs: u64,
}

/// `⌈log₂ mⁿ⌉`, computed exactly as the bit length of `mⁿ − 1`.
pub fn resource_count(m: u64, n: u32) -> Result<ResourceCount> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 coefficients, got m = {m}"
        )));
    }
    if n < 1 {
        return Err(Error::InvalidArgument("need at least one receiver".into()));
    }
    let power = BigUint::from(m).pow(n);
    let bell_pairs = (power - 1u32).bits();
    Ok(ResourceCount { m, n, bell_pairs })
}

/// Which branches enter an average.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchFilter {
    All,
    /// Successful branches only, renormalized by their total probability.
    SuccessOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReceiverFidelity {
    pub slot: OutputSlot,
    /// `(branch index, fidelity)` for each included branch.
    pub per_branch: Vec<(usize, f64)>,
    /// Probability-weighted mean over the included branches.
    pub average: f64,
}

/// Fidelities at every output slot, each against the state `target_for`
/// returns for that slot.
pub fn receiver_fidelities_with(
    t: &Transcript,
    filter: BranchFilter,
    target_for: impl Fn(&OutputSlot) -> StateVector,
) -> Result<Vec<ReceiverFidelity>> {
    let included: Vec<usize> = t
        .branches
        .iter()
        .enumerate()
        .filter(|(_, b)| filter == BranchFilter::All || b.success)
        .map(|(i, _)| i)
        .collect();
    let weight: f64 = included.iter().map(|&i| t.branches[i].probability).sum();
    t.slots()
        .into_iter()
        .enumerate()
        .map(|(k, slot)| {
            let target = target_for(&slot);
            let per_branch = included
                .iter()
                .map(|&i| Ok((i, pure_overlap_fidelity(&target, &t.branches[i].outputs[k].1)?)))
                .collect::<Result<Vec<_>>>()?;
            let sum: f64 = per_branch.iter().map(|&(i, f)| t.branches[i].probability * f).sum();
            let average = match filter {
                BranchFilter::All => sum,
                BranchFilter::SuccessOnly if weight > 0.0 => sum / weight,
                BranchFilter::SuccessOnly => 0.0,
            }
            .clamp(0.0, 1.0);
            Ok(ReceiverFidelity {
                slot,
                per_branch,
                average,
            })
        })
        .collect()
}

/// Fidelities of every receiver with one common target.
pub fn receiver_fidelities(t: &Transcript, target: &KnownQubit, filter: BranchFilter) -> Result<Vec<ReceiverFidelity>> {
    let psi = target.state();
    receiver_fidelities_with(t, filter, |_| psi.clone())
}

/// Fidelity at one receiver; fails if the transcript has no output for it.
pub fn receiver_fidelity(
    t: &Transcript,
    receiver: PartyId,
    target: &KnownQubit,
    filter: BranchFilter,
) -> Result<ReceiverFidelity> {
    receiver_fidelities(t, target, filter)?
        .into_iter()
        .find(|r| r.slot.receiver == receiver)
        .ok_or_else(|| Error::ReceiverAbsent(receiver.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{bell, BellKind};
    use crate::noise::{bit_flip, NoiseSpec};
    use crate::protocol::{run_bell_rsp_broadcast, run_probabilistic_broadcast, BroadcastMode};

    fn plus() -> DensityMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        StateVector::from_real(&[h, h]).unwrap().to_density()
    }

    #[test]
    fn fidelity_examples() {
        let zero = StateVector::basis(1, 0).to_density();
        assert!((uhlmann_fidelity(&zero, &zero).unwrap() - 1.0).abs() < 1e-12);
        assert!((uhlmann_fidelity(&zero, &plus()).unwrap() - 0.5).abs() < 1e-12);
        assert!((uhlmann_fidelity_general(&zero, &plus()).unwrap() - 0.5).abs() < 1e-9);
        let phi = bell(BellKind::PhiPlus).to_density();
        let mixed = DensityMatrix::maximally_mixed(2);
        assert!((uhlmann_fidelity(&phi, &mixed).unwrap() - 0.25).abs() < 1e-12);
        assert!((uhlmann_fidelity_general(&mixed, &phi).unwrap() - 0.25).abs() < 1e-9);
        assert!((uhlmann_fidelity(&mixed, &mixed).unwrap() - 1.0).abs() < 1e-9);
        assert!(uhlmann_fidelity(&zero, &mixed).is_err());
    }

    #[test]
    fn resource_examples() {
        assert_eq!(resource_count(4, 1).unwrap().bell_pairs, 2);
        assert_eq!(resource_count(2, 2).unwrap().bell_pairs, 2);
        assert_eq!(resource_count(2, 1).unwrap().bell_pairs, 1);
        assert_eq!(resource_count(2, 10).unwrap().bell_pairs, 10);
        assert_eq!(resource_count(3, 1).unwrap().bell_pairs, 2);
        assert_eq!(resource_count(3, 2).unwrap().bell_pairs, 4);
        assert!(resource_count(1, 3).is_err());
        assert!(resource_count(2, 0).is_err());
    }

    #[test]
    fn aggregation() {
        let target = KnownQubit::real_polar(0.9);
        let t = run_bell_rsp_broadcast(&target, 2, BroadcastMode::Rsp, None).unwrap();
        for r in receiver_fidelities(&t, &target, BranchFilter::All).unwrap() {
            assert!((r.average - 1.0).abs() < 1e-9);
            assert_eq!(r.per_branch.len(), 4);
        }
        let err = receiver_fidelity(&t, PartyId::Receiver(3), &target, BranchFilter::All).unwrap_err();
        assert!(matches!(err, Error::ReceiverAbsent(_)));
    }

    #[test]
    fn bit_flip_on_transmitted_qubit() {
        // Equatorial |+⟩ is unmoved by X, so use a real-polar target where it is.
        let target = KnownQubit::real_polar(0.3);
        let p = 0.2;
        let noise = NoiseSpec::transmitted(bit_flip(p).unwrap());
        let t = run_bell_rsp_broadcast(&target, 1, BroadcastMode::Rsp, Some(&noise)).unwrap();
        let avg = receiver_fidelity(&t, PartyId::Receiver(1), &target, BranchFilter::All)
            .unwrap()
            .average;
        // Two Kraus branches: untouched with weight 1−p, X-flipped with weight p
        // (the flip commutes through the correction up to phase).
        let psi = target.state();
        let flipped = psi
            .apply(&crate::noise::pauli_matrix('X'), &[crate::tensor::QubitIndex(0)])
            .unwrap();
        let oracle = (1.0 - p) + p * psi.overlap_sqr(&flipped);
        assert!((avg - oracle).abs() < 1e-12);
    }

    #[test]
    fn success_only_filter() {
        let target = KnownQubit::real_polar(0.4);
        let t = run_probabilistic_broadcast(&target, &[(0.8, 0.6)], None).unwrap();
        let all = receiver_fidelities(&t, &target, BranchFilter::All).unwrap();
        let ok = receiver_fidelities(&t, &target, BranchFilter::SuccessOnly).unwrap();
        assert!((ok[0].average - 1.0).abs() < 1e-9);
        assert!(all[0].average < 1.0);
    }
}
