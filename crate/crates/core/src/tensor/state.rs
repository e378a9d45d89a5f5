use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::kernel::apply_unchecked;
use super::{check_targets, dim_to_qubits, CMatrix, DensityMatrix, QubitIndex, C64};
use crate::{Error, Result};

/// Pure state of `n` qubits as `2^n` complex amplitudes.
///
/// Measurement branches may carry unnormalized vectors; `norm()` reports the
/// tracked norm in that case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        let n_qubits = dim_to_qubits(amps.len()).ok_or(Error::DimensionMismatch {
            expected: amps.len().next_power_of_two(),
            found: amps.len(),
        })?;
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite amplitude".into()));
        }
        Ok(Self { n_qubits, amps })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::new(amps.iter().map(|&a| C64::new(a, 0.0)).collect())
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n_qubits];
        amps[index] = C64::new(1.0, 0.0);
        Self { n_qubits, amps }
    }

    pub fn zero(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::NotNormalized { norm_sq: 0.0 });
        }
        Ok(self.scaled(C64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self {
            n_qubits: self.n_qubits,
            amps: self.amps.iter().map(|a| a * factor).collect(),
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        assert_eq!(self.dim(), other.dim(), "inner product dimension mismatch");
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// `|⟨self|other⟩|²`, the fidelity of two normalized pure states.
    pub fn overlap_sqr(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Applies a small operator to `targets`.
    pub fn apply(&self, op: &CMatrix, targets: &[QubitIndex]) -> Result<Self> {
        let mut amps = self.amps.clone();
        super::apply_to_slice(op, targets, self.n_qubits, &mut amps)?;
        Ok(Self {
            n_qubits: self.n_qubits,
            amps,
        })
    }

    pub(crate) fn apply_in_place(&mut self, op: &CMatrix, targets: &[QubitIndex]) -> Result<()> {
        check_targets(targets, self.n_qubits)?;
        apply_unchecked(op, targets, self.n_qubits, &mut self.amps);
        Ok(())
    }

    /// Applies a full `2^n × 2^n` matrix.
    pub fn apply_matrix(&self, m: &CMatrix) -> Result<Self> {
        if m.nrows() != self.dim() || m.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: m.nrows(),
            });
        }
        let v = m * DVector::from_column_slice(&self.amps);
        Ok(Self {
            n_qubits: self.n_qubits,
            amps: v.as_slice().to_vec(),
        })
    }

    pub fn to_column(&self) -> DVector<C64> {
        DVector::from_column_slice(&self.amps)
    }

    /// `|ψ⟩⟨ψ|` of the normalized state.
    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }
}

/// Kronecker product `a ⊗ b`; the qubits of `a` come first.
pub fn tensor(a: &StateVector, b: &StateVector) -> StateVector {
    let mut amps = Vec::with_capacity(a.dim() * b.dim());
    for x in &a.amps {
        for y in &b.amps {
            amps.push(x * y);
        }
    }
    StateVector {
        n_qubits: a.n_qubits + b.n_qubits,
        amps,
    }
}

/// Tensor product of a non-empty list of states, left to right.
pub fn tensor_all<'a>(parts: impl IntoIterator<Item = &'a StateVector>) -> Option<StateVector> {
    parts.into_iter().fold(None, |acc, s| match acc {
        None => Some(s.clone()),
        Some(prev) => Some(tensor(&prev, s)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::r;

    #[test]
    fn zero_tensor_one_is_index_one() {
        let s = tensor(&StateVector::basis(1, 0), &StateVector::basis(1, 1));
        assert_eq!(s.n_qubits(), 2);
        assert_eq!(s.amplitude(1), r(1.0));
        assert_eq!(s.norm_sqr(), 1.0);
    }

    #[test]
    fn bell_tensor_bell() {
        let h = 0.5f64.sqrt();
        let phi = StateVector::from_real(&[h, 0.0, 0.0, h]).unwrap();
        let s = tensor(&phi, &phi);
        for i in 0..16 {
            let expected = if [0b0000, 0b0011, 0b1100, 0b1111].contains(&i) {
                0.5
            } else {
                0.0
            };
            assert!((s.amplitude(i) - r(expected)).norm() < 1e-15, "index {i}");
        }
    }

    #[test]
    fn linearity_on_first_factor() {
        let (a, b) = (C64::new(0.6, 0.0), C64::new(0.0, 0.8));
        let s = tensor(&StateVector::new(vec![a, b]).unwrap(), &StateVector::zero(1));
        assert_eq!(s.amplitudes(), &[a, r(0.0), b, r(0.0)]);
    }

    #[test]
    fn rejects_bad_lengths() {
        assert!(StateVector::from_real(&[1.0, 0.0, 0.0]).is_err());
        assert!(StateVector::from_real(&[f64::NAN, 0.0]).is_err());
    }
}
