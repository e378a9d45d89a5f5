use super::{
    check_targets, complement, sub_offsets, CMatrix, DensityMatrix, QubitIndex, StateVector, C64, STRUCTURAL_TOL,
};
use crate::{Error, Result};

/// One outcome of a projective measurement on a pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementBranch {
    /// Index into the measurement basis.
    pub outcome: usize,
    pub probability: f64,
    /// State of the unmeasured qubits, renormalized. Zero-probability
    /// branches carry the zero vector.
    pub state: StateVector,
}

/// One outcome of a projective measurement on a mixed state.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedBranch {
    pub outcome: usize,
    pub probability: f64,
    /// Renormalized state of the unmeasured qubits, `None` when the outcome
    /// has zero probability.
    pub state: Option<DensityMatrix>,
}

fn check_basis(targets: &[QubitIndex], basis: &[StateVector]) -> Result<()> {
    let dim = 1usize << targets.len();
    if basis.len() != dim {
        return Err(Error::IncompleteBasis {
            expected: dim,
            found: basis.len(),
        });
    }
    for b in basis {
        if b.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: b.dim(),
            });
        }
    }
    let mut deviation: f64 = 0.0;
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate().skip(i) {
            let expected = if i == j { 1.0 } else { 0.0 };
            deviation = deviation.max((a.inner(b) - C64::new(expected, 0.0)).norm());
        }
    }
    if deviation > STRUCTURAL_TOL {
        return Err(Error::NonOrthonormalBasis { deviation });
    }
    Ok(())
}

/// Enumerates every outcome of measuring `targets` in an orthonormal `basis`.
///
/// No sampling takes place: all `2^k` branches are returned with their Born
/// probabilities and the renormalized state of the remaining qubits.
pub fn measure_projective(
    state: &StateVector,
    targets: &[QubitIndex],
    basis: &[StateVector],
) -> Result<Vec<MeasurementBranch>> {
    check_targets(targets, state.n_qubits())?;
    check_basis(targets, basis)?;
    let n = state.n_qubits();
    let ts: Vec<usize> = targets.iter().map(|t| t.0).collect();
    let rest = complement(&ts, n);
    let t_off = sub_offsets(&ts, n);
    let r_off = sub_offsets(&rest, n);
    let amps = state.amplitudes();
    basis
        .iter()
        .enumerate()
        .map(|(outcome, b)| {
            let projected: Vec<C64> = r_off
                .iter()
                .map(|ro| {
                    t_off
                        .iter()
                        .zip(b.amplitudes())
                        .map(|(to, bc)| bc.conj() * amps[ro | to])
                        .sum()
                })
                .collect();
            let v = StateVector::new(projected)?;
            let probability = v.norm_sqr();
            let state = if probability > 1e-15 { v.normalized()? } else { v };
            Ok(MeasurementBranch {
                outcome,
                probability,
                state,
            })
        })
        .collect()
}

/// Mixed-state counterpart of [`measure_projective`].
pub fn measure_projective_mixed(
    rho: &DensityMatrix,
    targets: &[QubitIndex],
    basis: &[StateVector],
) -> Result<Vec<MixedBranch>> {
    check_targets(targets, rho.n_qubits())?;
    check_basis(targets, basis)?;
    let n = rho.n_qubits();
    let ts: Vec<usize> = targets.iter().map(|t| t.0).collect();
    let rest = complement(&ts, n);
    let t_off = sub_offsets(&ts, n);
    let r_off = sub_offsets(&rest, n);
    let m = rho.matrix();
    basis
        .iter()
        .enumerate()
        .map(|(outcome, b)| {
            let bamps = b.amplitudes();
            let dim = r_off.len();
            let mut out = CMatrix::zeros(dim, dim);
            for (i, ri) in r_off.iter().enumerate() {
                for (j, rj) in r_off.iter().enumerate() {
                    let mut acc = C64::new(0.0, 0.0);
                    for (c, tc) in t_off.iter().enumerate() {
                        for (d, td) in t_off.iter().enumerate() {
                            acc += bamps[c].conj() * m[(ri | tc, rj | td)] * bamps[d];
                        }
                    }
                    out[(i, j)] = acc;
                }
            }
            let probability = out.trace().re.max(0.0);
            let state =
                (probability > 1e-15).then(|| DensityMatrix::from_raw(rest.len(), out / C64::new(probability, 0.0)));
            Ok(MixedBranch {
                outcome,
                probability,
                state,
            })
        })
        .collect()
}
