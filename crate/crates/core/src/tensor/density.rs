use serde::{Deserialize, Serialize};

use super::kernel::{conjugate_in_place, op_qubits};
use super::{
    check_targets, complement, dim_to_qubits, hermitian_eigen, hermiticity_deviation, sub_offsets, CMatrix, QubitIndex,
    StateVector, C64, EQUALITY_TOL, STRUCTURAL_TOL,
};
use crate::{Error, Result};

/// Mixed state of `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    data: CMatrix,
}

/// Result of checking the density-matrix invariants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub hermiticity_deviation: f64,
    pub trace_error: f64,
    pub min_eigenvalue: f64,
}

impl DensityReport {
    pub fn is_valid(&self) -> bool {
        self.hermiticity_deviation <= 1e-12
            && self.trace_error <= EQUALITY_TOL
            && self.min_eigenvalue >= -STRUCTURAL_TOL
    }
}

impl DensityMatrix {
    /// Wraps a matrix after checking shape, Hermiticity and unit trace.
    pub fn from_matrix(data: CMatrix) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(Error::DimensionMismatch {
                expected: data.nrows(),
                found: data.ncols(),
            });
        }
        let n_qubits = dim_to_qubits(data.nrows()).ok_or(Error::DimensionMismatch {
            expected: data.nrows().next_power_of_two(),
            found: data.nrows(),
        })?;
        let deviation = hermiticity_deviation(&data);
        if deviation > STRUCTURAL_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let tr = data.trace();
        if (tr.re - 1.0).abs() > EQUALITY_TOL || tr.im.abs() > EQUALITY_TOL {
            return Err(Error::InvalidArgument(format!(
                "density matrix trace is {tr}, expected 1"
            )));
        }
        Ok(Self { n_qubits, data })
    }

    pub(crate) fn from_raw(n_qubits: usize, data: CMatrix) -> Self {
        debug_assert_eq!(data.nrows(), 1 << n_qubits);
        Self { n_qubits, data }
    }

    /// `|ψ⟩⟨ψ|` for the normalized direction of `psi`.
    pub fn from_pure(psi: &StateVector) -> Self {
        let v = psi.to_column();
        let v = v.clone() / C64::new(v.norm(), 0.0);
        Self {
            n_qubits: psi.n_qubits(),
            data: &v * v.adjoint(),
        }
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        Self {
            n_qubits,
            data: CMatrix::identity(dim, dim) / C64::new(dim as f64, 0.0),
        }
    }

    /// Convex combination `Σ w_i ρ_i`; weights must sum to 1.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let first = parts.first().ok_or(Error::InvalidArgument("empty mixture".into()))?;
        let n = first.1.n_qubits;
        let mut data = CMatrix::zeros(first.1.dim(), first.1.dim());
        let mut total = 0.0;
        for (w, rho) in parts {
            if rho.n_qubits != n {
                return Err(Error::DimensionMismatch {
                    expected: first.1.dim(),
                    found: rho.dim(),
                });
            }
            data += &rho.data * C64::new(*w, 0.0);
            total += w;
        }
        if (total - 1.0).abs() > EQUALITY_TOL {
            return Err(Error::InvalidArgument(format!("mixture weights sum to {total}")));
        }
        Ok(Self { n_qubits: n, data })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_matrix(self) -> CMatrix {
        self.data
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.data[(row, col)]
    }

    pub fn trace(&self) -> C64 {
        self.data.trace()
    }

    pub fn purity(&self) -> f64 {
        // Tr(ρ²) = Σ |ρ_ij|² for Hermitian ρ.
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn report(&self) -> DensityReport {
        let min_eigenvalue = hermitian_eigen(&self.data)
            .map(|(vals, _)| vals.iter().cloned().fold(f64::INFINITY, f64::min))
            .unwrap_or(f64::NEG_INFINITY);
        DensityReport {
            hermiticity_deviation: hermiticity_deviation(&self.data),
            trace_error: (self.trace() - C64::new(1.0, 0.0)).norm(),
            min_eigenvalue,
        }
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn expectation(&self, psi: &StateVector) -> f64 {
        let v = psi.to_column();
        (v.adjoint() * &self.data * &v)[(0, 0)].re
    }

    /// `ρ ⊗ σ`.
    pub fn kron(&self, other: &DensityMatrix) -> DensityMatrix {
        Self {
            n_qubits: self.n_qubits + other.n_qubits,
            data: self.data.kronecker(&other.data),
        }
    }

    /// `op ρ op†` with `op` acting on `targets`.
    pub fn apply(&self, op: &CMatrix, targets: &[QubitIndex]) -> Result<Self> {
        let mut out = self.clone();
        out.apply_in_place(op, targets)?;
        Ok(out)
    }

    pub(crate) fn apply_in_place(&mut self, op: &CMatrix, targets: &[QubitIndex]) -> Result<()> {
        check_targets(targets, self.n_qubits)?;
        if op_qubits(op)? != targets.len() {
            return Err(Error::DimensionMismatch {
                expected: 1 << targets.len(),
                found: op.nrows(),
            });
        }
        conjugate_in_place(op, targets, self.n_qubits, &mut self.data);
        Ok(())
    }

    /// `Σ_i K_i ρ K_i†` on a single target, without completeness checks.
    pub(crate) fn apply_kraus_unchecked(&self, kraus: &[CMatrix], target: QubitIndex) -> Result<Self> {
        check_targets(&[target], self.n_qubits)?;
        let mut acc = CMatrix::zeros(self.dim(), self.dim());
        for k in kraus {
            let mut term = self.data.clone();
            conjugate_in_place(k, &[target], self.n_qubits, &mut term);
            acc += term;
        }
        Ok(Self {
            n_qubits: self.n_qubits,
            data: acc,
        })
    }

    /// Projects `targets` onto `vector` (kept in the register), returning the
    /// outcome probability and the renormalized state; `None` for a
    /// zero-probability outcome.
    pub fn project(&self, targets: &[QubitIndex], vector: &StateVector) -> Result<(f64, Option<Self>)> {
        if vector.n_qubits() != targets.len() {
            return Err(Error::DimensionMismatch {
                expected: 1 << targets.len(),
                found: vector.dim(),
            });
        }
        let v = vector.to_column();
        let projector = &v * v.adjoint();
        let mut out = self.apply(&projector, targets)?;
        let p = out.trace().re;
        if p <= 1e-15 {
            return Ok((p.max(0.0), None));
        }
        out.data /= C64::new(p, 0.0);
        Ok((p, Some(out)))
    }

    /// Reduced state on `keep`, in the listed order.
    pub fn partial_trace(&self, keep: &[QubitIndex]) -> Result<DensityMatrix> {
        partial_trace(self, keep)
    }
}

/// Traces out every qubit not in `keep`. The kept qubits appear in the
/// order given.
pub fn partial_trace(rho: &DensityMatrix, keep: &[QubitIndex]) -> Result<DensityMatrix> {
    if keep.is_empty() {
        return Err(Error::EmptyKeepList);
    }
    check_targets(keep, rho.n_qubits)?;
    let kept: Vec<usize> = keep.iter().map(|q| q.0).collect();
    let traced = complement(&kept, rho.n_qubits);
    let kept_off = sub_offsets(&kept, rho.n_qubits);
    let traced_off = sub_offsets(&traced, rho.n_qubits);
    let dim = kept_off.len();
    let mut out = CMatrix::zeros(dim, dim);
    for (i, ki) in kept_off.iter().enumerate() {
        for (j, kj) in kept_off.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for t in &traced_off {
                acc += rho.data[(ki | t, kj | t)];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(DensityMatrix::from_raw(kept.len(), out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{max_abs_diff, r};

    fn bell() -> StateVector {
        let h = 0.5f64.sqrt();
        StateVector::from_real(&[h, 0.0, 0.0, h]).unwrap()
    }

    #[test]
    fn bell_reduction_is_maximally_mixed() {
        let red = bell().to_density().partial_trace(&[QubitIndex(0)]).unwrap();
        assert!(max_abs_diff(red.matrix(), DensityMatrix::maximally_mixed(1).matrix()) < 1e-15);
    }

    #[test]
    fn product_reduction() {
        let rho = StateVector::basis(2, 0b01).to_density();
        let red = rho.partial_trace(&[QubitIndex(1)]).unwrap();
        assert_eq!(red.entry(1, 1), r(1.0));
        assert_eq!(red.entry(0, 0), r(0.0));
    }

    #[test]
    fn empty_keep_list_is_an_error() {
        assert_eq!(bell().to_density().partial_trace(&[]), Err(Error::EmptyKeepList));
    }

    #[test]
    fn keep_order_is_respected() {
        let rho = StateVector::basis(3, 0b110).to_density();
        let red = rho.partial_trace(&[QubitIndex(2), QubitIndex(0)]).unwrap();
        // qubit 2 = 0, qubit 0 = 1 → |01⟩
        assert_eq!(red.entry(1, 1), r(1.0));
    }

    #[test]
    fn from_matrix_rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[r(0.5), r(0.3), r(0.0), r(0.5)]);
        assert!(matches!(DensityMatrix::from_matrix(m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn projection_keeps_register_size() {
        let rho = bell().to_density();
        let (p, post) = rho.project(&[QubitIndex(0)], &StateVector::basis(1, 1)).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        let post = post.unwrap();
        assert_eq!(post.n_qubits(), 2);
        assert!((post.entry(3, 3) - r(1.0)).norm() < 1e-15);
    }
}
