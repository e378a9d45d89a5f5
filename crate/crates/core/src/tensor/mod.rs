//! Dense complex linear algebra for small multi-qubit registers.
//!
//! Bit ordering: qubit 0 is the leftmost ket label, i.e. the most
//! significant bit of an amplitude index. In a 3-qubit register `|q0 q1 q2⟩`
//! the basis state `|100⟩` has index 4. Every operator embedding, partial
//! trace and measurement in this module follows that convention, and a
//! k-qubit operator acting on `targets` reads `targets[0]` as its own most
//! significant bit.

mod density;
mod kernel;
mod matfun;
mod measure;
mod state;

pub use density::{partial_trace, DensityMatrix, DensityReport};
pub use kernel::{apply_to_slice, embed_operator};
pub use matfun::{eigen_noise_floor, hermitian_eigen, hermitian_sqrt};
pub use measure::{measure_projective, measure_projective_mixed, MeasurementBranch, MixedBranch};
pub use state::{tensor, tensor_all, StateVector};

pub use num_complex::Complex64 as C64;

/// Dense complex matrix used for operators and density matrices.
pub type CMatrix = nalgebra::DMatrix<C64>;

/// Tolerance for structural checks (Hermiticity, orthonormality, positivity).
pub const STRUCTURAL_TOL: f64 = 1e-10;
/// Tolerance for equality assertions on exact results.
pub const EQUALITY_TOL: f64 = 1e-9;
/// Tolerance for results that accumulate arithmetic (matrix functions).
pub const ACCUMULATED_TOL: f64 = 1e-8;

/// Position of a qubit inside a register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QubitIndex(pub usize);

impl From<usize> for QubitIndex {
    fn from(i: usize) -> Self {
        QubitIndex(i)
    }
}

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub(crate) fn r(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Largest entrywise modulus of `m - m†`.
pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Identity on `n` qubits.
pub fn identity(n_qubits: usize) -> CMatrix {
    CMatrix::identity(1 << n_qubits, 1 << n_qubits)
}

/// Builds a matrix from row-major entries.
pub fn matrix(rows: usize, cols: usize, row_major: &[C64]) -> CMatrix {
    CMatrix::from_row_slice(rows, cols, row_major)
}

pub(crate) fn dim_to_qubits(dim: usize) -> Option<usize> {
    if dim.is_power_of_two() {
        Some(dim.trailing_zeros() as usize)
    } else {
        None
    }
}

pub(crate) fn check_targets(targets: &[QubitIndex], n_qubits: usize) -> crate::Result<()> {
    for (i, t) in targets.iter().enumerate() {
        if t.0 >= n_qubits {
            return Err(crate::Error::QubitOutOfRange { index: t.0, n_qubits });
        }
        if targets[..i].contains(t) {
            return Err(crate::Error::DuplicateTarget(t.0));
        }
    }
    Ok(())
}

/// Bit mask of `qubit` in an `n_qubits` register.
#[inline]
pub(crate) fn qubit_mask(qubit: usize, n_qubits: usize) -> usize {
    1 << (n_qubits - 1 - qubit)
}

/// Full-register offsets for every value of the sub-register `targets`,
/// with `targets[0]` as the most significant bit of the sub-index.
pub(crate) fn sub_offsets(targets: &[usize], n_qubits: usize) -> Vec<usize> {
    let k = targets.len();
    (0..1usize << k)
        .map(|v| {
            targets
                .iter()
                .enumerate()
                .filter(|(i, _)| v >> (k - 1 - i) & 1 == 1)
                .map(|(_, &t)| qubit_mask(t, n_qubits))
                .sum()
        })
        .collect()
}

/// Qubits of an `n_qubits` register not listed in `targets`, ascending.
pub(crate) fn complement(targets: &[usize], n_qubits: usize) -> Vec<usize> {
    (0..n_qubits).filter(|q| !targets.contains(q)).collect()
}
