use crate::error::{Error, Result};
use crate::matcore::{
    c64, check_finite, check_square, diag_real, frobenius, hermitian_part, hermiticity_error,
    identity, min_eigenvalue, ComplexMatrix,
};

/// Positive semidefinite, unit-trace Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

const STATE_TOL: f64 = 1e-10;

impl DensityMatrix {
    /// Validates `m` as a state: Hermitian, `λ_min ≥ −1e-10`, `|Tr − 1| ≤ 1e-10`.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        check_square(&m, "density matrix")?;
        check_finite(&m, "density matrix")?;
        if m.nrows() == 0 {
            return Err(Error::invalid("density matrix must have dimension at least 1"));
        }
        if hermiticity_error(&m) > 1e-12 * frobenius(&m).max(1.0) {
            return Err(Error::invalid("density matrix is not Hermitian"));
        }
        let m = hermitian_part(&m);
        let tr = m.trace().re;
        if (tr - 1.0).abs() > STATE_TOL {
            return Err(Error::invalid(format!("density matrix has trace {tr}, expected 1")));
        }
        let min = min_eigenvalue(&m)?;
        if min < -STATE_TOL {
            return Err(Error::invalid(format!(
                "density matrix has negative eigenvalue {min:e}"
            )));
        }
        Ok(DensityMatrix { matrix: m })
    }

    /// Normalizes a PSD matrix by its trace before validating.
    pub fn from_unnormalized(m: ComplexMatrix) -> Result<Self> {
        check_square(&m, "density matrix")?;
        let tr = m.trace().re;
        if !(tr > 0.0) {
            return Err(Error::invalid("matrix has non-positive trace"));
        }
        Self::new(m / c64(tr, 0.0))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        DensityMatrix {
            matrix: identity(d) / c64(d as f64, 0.0),
        }
    }

    /// Diagonal state from a probability vector.
    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        Self::new(diag_real(probs))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }
}

impl AsRef<ComplexMatrix> for DensityMatrix {
    fn as_ref(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_states() {
        assert!(DensityMatrix::new(diag_real(&[0.5, 0.6])).is_err());
        assert!(DensityMatrix::new(diag_real(&[1.2, -0.2])).is_err());
        let mut m = diag_real(&[0.5, 0.5]);
        m[(0, 1)] = c64(0.1, 0.0);
        assert!(DensityMatrix::new(m).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn accepts_states() {
        let s = DensityMatrix::diagonal(&[0.25, 0.75]).unwrap();
        assert_eq!(s.dim(), 2);
        let u = DensityMatrix::maximally_mixed(3);
        assert!((u.matrix().trace().re - 1.0).abs() < 1e-15);
        let n = DensityMatrix::from_unnormalized(diag_real(&[2.0, 2.0])).unwrap();
        assert_eq!(n, DensityMatrix::maximally_mixed(2));
    }
}
