use nalgebra::DVector;

use super::{hermiticity_deviation, CMatrix, C64, STRUCTURAL_TOL};
use crate::{Error, Result};

/// Eigendecomposition of a Hermitian matrix: real eigenvalues and the
/// unitary whose columns are the matching eigenvectors.
pub fn hermitian_eigen(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    let deviation = hermiticity_deviation(m);
    if deviation > STRUCTURAL_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    Ok((eig.eigenvalues.iter().cloned().collect(), eig.eigenvectors))
}

/// Eigenvalues at or below this size are indistinguishable from zero after
/// a decomposition of `values`.
pub fn eigen_noise_floor(values: &[f64]) -> f64 {
    let scale = values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    values.len() as f64 * f64::EPSILON * scale
}

/// Principal square root of a Hermitian positive-semidefinite matrix.
///
/// Eigenvalues in `[-1e-10, 0)` and those under [`eigen_noise_floor`] are
/// treated as zero; anything more negative is rejected.
pub fn hermitian_sqrt(m: &CMatrix) -> Result<CMatrix> {
    let (values, vectors) = hermitian_eigen(m)?;
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -STRUCTURAL_TOL {
        return Err(Error::NotPositive { min_eigenvalue: min });
    }
    let floor = eigen_noise_floor(&values);
    let roots = DVector::from_iterator(
        values.len(),
        values
            .iter()
            .map(|&v| C64::new(if v > floor { v.sqrt() } else { 0.0 }, 0.0)),
    );
    let scaled = &vectors * CMatrix::from_diagonal(&roots);
    Ok(scaled * vectors.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{max_abs_diff, r};

    #[test]
    fn identity_root() {
        let id = CMatrix::identity(4, 4);
        assert!(max_abs_diff(&hermitian_sqrt(&id).unwrap(), &id) < 1e-14);
    }

    #[test]
    fn diagonal_root() {
        let m = CMatrix::from_diagonal(&DVector::from_vec(vec![r(4.0), r(9.0)]));
        let s = hermitian_sqrt(&m).unwrap();
        let expected = CMatrix::from_diagonal(&DVector::from_vec(vec![r(2.0), r(3.0)]));
        assert!(max_abs_diff(&s, &expected) < 1e-14);
    }

    #[test]
    fn half_identity_root() {
        let m = CMatrix::identity(2, 2) * r(0.5);
        let s = hermitian_sqrt(&m).unwrap();
        assert!(max_abs_diff(&s, &(CMatrix::identity(2, 2) * r(0.5f64.sqrt()))) < 1e-14);
    }

    #[test]
    fn complex_hermitian_root_squares_back() {
        let m = CMatrix::from_row_slice(2, 2, &[r(0.7), C64::new(0.1, -0.2), C64::new(0.1, 0.2), r(0.3)]);
        let s = hermitian_sqrt(&m).unwrap();
        assert!(max_abs_diff(&(&s * &s), &m) < 1e-12);
        assert!(hermiticity_deviation(&s) < 1e-12);
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = CMatrix::from_row_slice(2, 2, &[r(1.0), r(1.0), r(0.0), r(1.0)]);
        assert!(matches!(hermitian_sqrt(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn tiny_negative_eigenvalues_are_clamped() {
        let m = CMatrix::from_diagonal(&DVector::from_vec(vec![r(1.0), r(-1e-12)]));
        let s = hermitian_sqrt(&m).unwrap();
        assert_eq!(s[(1, 1)].re, 0.0);
        let bad = CMatrix::from_diagonal(&DVector::from_vec(vec![r(1.0), r(-1e-6)]));
        assert!(matches!(hermitian_sqrt(&bad), Err(Error::NotPositive { .. })));
    }
}
