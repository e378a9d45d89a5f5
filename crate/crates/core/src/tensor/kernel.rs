use super::{check_targets, dim_to_qubits, sub_offsets, CMatrix, QubitIndex, C64};
use crate::{Error, Result};

fn check_op(op: &CMatrix, targets: &[QubitIndex], n_qubits: usize) -> Result<()> {
    check_targets(targets, n_qubits)?;
    let expected = 1usize << targets.len();
    if op.nrows() != expected || op.ncols() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: op.nrows().max(op.ncols()),
        });
    }
    Ok(())
}

/// Applies a `2^k × 2^k` operator to the `targets` of a length-`2^n` amplitude
/// slice in place, without building the full `2^n × 2^n` matrix.
pub fn apply_to_slice(op: &CMatrix, targets: &[QubitIndex], n_qubits: usize, amps: &mut [C64]) -> Result<()> {
    check_op(op, targets, n_qubits)?;
    if amps.len() != 1 << n_qubits {
        return Err(Error::DimensionMismatch {
            expected: 1 << n_qubits,
            found: amps.len(),
        });
    }
    apply_unchecked(op, targets, n_qubits, amps);
    Ok(())
}

pub(crate) fn apply_unchecked(op: &CMatrix, targets: &[QubitIndex], n_qubits: usize, amps: &mut [C64]) {
    let ts: Vec<usize> = targets.iter().map(|t| t.0).collect();
    let offsets = sub_offsets(&ts, n_qubits);
    let tmask: usize = offsets.iter().fold(0, |acc, o| acc | o);
    let dim = offsets.len();
    let mut gathered = vec![C64::new(0.0, 0.0); dim];
    for base in 0..amps.len() {
        if base & tmask != 0 {
            continue;
        }
        for (g, off) in gathered.iter_mut().zip(&offsets) {
            *g = amps[base | off];
        }
        for (row, off) in offsets.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (col, g) in gathered.iter().enumerate() {
                acc += op[(row, col)] * g;
            }
            amps[base | off] = acc;
        }
    }
}

/// Embeds a small operator acting on `targets` into the full `2^n`-dimensional
/// space, acting as identity on every other qubit.
pub fn embed_operator(op: &CMatrix, targets: &[QubitIndex], n_qubits: usize) -> Result<CMatrix> {
    check_op(op, targets, n_qubits)?;
    let dim = 1usize << n_qubits;
    let mut full = CMatrix::identity(dim, dim);
    for mut column in full.column_iter_mut() {
        apply_unchecked(op, targets, n_qubits, column.as_mut_slice());
    }
    Ok(full)
}

/// `rho ← op · rho · op†` on the given targets.
pub(crate) fn conjugate_in_place(op: &CMatrix, targets: &[QubitIndex], n_qubits: usize, rho: &mut CMatrix) {
    for mut column in rho.column_iter_mut() {
        apply_unchecked(op, targets, n_qubits, column.as_mut_slice());
    }
    rho.adjoint_mut();
    for mut column in rho.column_iter_mut() {
        apply_unchecked(op, targets, n_qubits, column.as_mut_slice());
    }
    rho.adjoint_mut();
}

pub(crate) fn op_qubits(op: &CMatrix) -> Result<usize> {
    dim_to_qubits(op.nrows()).ok_or(Error::DimensionMismatch {
        expected: op.nrows().next_power_of_two(),
        found: op.nrows(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{c, matrix, r, StateVector};

    fn x() -> CMatrix {
        matrix(2, 2, &[r(0.0), r(1.0), r(1.0), r(0.0)])
    }

    fn cnot() -> CMatrix {
        let mut m = CMatrix::zeros(4, 4);
        m[(0, 0)] = r(1.0);
        m[(1, 1)] = r(1.0);
        m[(2, 3)] = r(1.0);
        m[(3, 2)] = r(1.0);
        m
    }

    #[test]
    fn x_on_second_qubit() {
        let full = embed_operator(&x(), &[QubitIndex(1)], 2).unwrap();
        let out = StateVector::basis(2, 0).apply_matrix(&full).unwrap();
        assert!((out.amplitude(1) - r(1.0)).norm() < 1e-15);
    }

    #[test]
    fn cnot_control_zero_target_two() {
        let full = embed_operator(&cnot(), &[QubitIndex(0), QubitIndex(2)], 3).unwrap();
        let out = StateVector::basis(3, 0b100).apply_matrix(&full).unwrap();
        assert!((out.amplitude(0b101) - r(1.0)).norm() < 1e-15);
    }

    #[test]
    fn phase_pi_maps_plus_to_minus() {
        let p = matrix(
            2,
            2,
            &[r(1.0), r(0.0), r(0.0), C64::from_polar(1.0, std::f64::consts::PI)],
        );
        let full = embed_operator(&p, &[QubitIndex(0)], 1).unwrap();
        let s = 0.5f64.sqrt();
        let plus = StateVector::new(vec![r(s), r(s)]).unwrap();
        let out = plus.apply_matrix(&full).unwrap();
        assert!((out.amplitude(0) - r(s)).norm() < 1e-15);
        assert!((out.amplitude(1) - r(-s)).norm() < 1e-15);
    }

    #[test]
    fn reversed_targets_swap_roles() {
        // CNOT with targets (2, 0): qubit 2 controls, qubit 0 flips.
        let full = embed_operator(&cnot(), &[QubitIndex(2), QubitIndex(0)], 3).unwrap();
        let out = StateVector::basis(3, 0b001).apply_matrix(&full).unwrap();
        assert!((out.amplitude(0b101) - r(1.0)).norm() < 1e-15);
    }

    #[test]
    fn rejects_duplicates_and_mismatch() {
        assert_eq!(
            embed_operator(&cnot(), &[QubitIndex(1), QubitIndex(1)], 3),
            Err(Error::DuplicateTarget(1))
        );
        assert!(matches!(
            embed_operator(&cnot(), &[QubitIndex(1)], 3),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            embed_operator(&x(), &[QubitIndex(3)], 3),
            Err(Error::QubitOutOfRange { .. })
        ));
    }

    #[test]
    fn slice_kernel_matches_embedding() {
        let op = matrix(2, 2, &[c(0.3, 0.1), c(-0.2, 0.7), c(0.5, -0.4), c(0.9, 0.05)]);
        let amps: Vec<C64> = (0..8).map(|i| c(i as f64 * 0.1, 1.0 - i as f64 * 0.05)).collect();
        let mut fast = amps.clone();
        apply_to_slice(&op, &[QubitIndex(1)], 3, &mut fast).unwrap();
        let full = embed_operator(&op, &[QubitIndex(1)], 3).unwrap();
        let slow = full * nalgebra::DVector::from_vec(amps);
        for (a, b) in fast.iter().zip(slow.iter()) {
            assert!((a - b).norm() < 1e-14);
        }
    }
}
