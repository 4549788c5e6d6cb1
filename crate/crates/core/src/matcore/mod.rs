//! Dense complex-matrix primitives.
//!
//! Everything here works in the fixed computational basis. Bipartite operators
//! on `X ⊗ Y` use the row-major index `(x, y) ↦ x·d_Y + y`, so the first
//! factor is the slow index.

mod qmat;
mod riccati;
mod spectral;
mod tensor;

pub use qmat::{format_qmat, parse_qmat, read_qmat_file, write_qmat_file};
pub(crate) use qmat::Tokens;
pub use riccati::{riccati_residual, riccati_solve, verify_riccati_identity};
pub use spectral::{
    default_zero_tol, herm_eig, invsqrtm, min_eigenvalue, require_full_rank, spectral_fn, sqrtm, sqrtm_clamped,
    SpectralDecomposition, RANK_TOL,
};
pub use tensor::{conjugate_basis, kron, partial_trace, swap_subsystems, transpose_basis, Subsystem};

use nalgebra::DMatrix;
pub use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix, row/column indexed in the computational basis.
pub type ComplexMatrix = DMatrix<Complex64>;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

/// Frobenius norm.
pub fn frobenius(m: &ComplexMatrix) -> f64 {
    m.norm()
}

pub fn trace(m: &ComplexMatrix) -> Complex64 {
    m.trace()
}

/// `(M + M†) / 2`.
pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Largest entrywise deviation `|M[i][j] − conj(M[j][i])|`.
pub fn hermiticity_error(m: &ComplexMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Hermitian within `1e-12 · max(1, ‖M‖_F)`.
pub fn is_hermitian(m: &ComplexMatrix) -> bool {
    hermiticity_error(m) <= 1e-12 * frobenius(m).max(1.0)
}

pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b - b * a
}

pub(crate) fn check_finite(m: &ComplexMatrix, what: &str) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::invalid(format!("{what} has non-finite entries")))
    }
}

pub(crate) fn check_square(m: &ComplexMatrix, what: &str) -> Result<usize> {
    if m.is_square() {
        Ok(m.nrows())
    } else {
        Err(Error::invalid(format!(
            "{what} must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )))
    }
}

/// Diagonal matrix from real entries.
pub fn diag_real(values: &[f64]) -> ComplexMatrix {
    let n = values.len();
    ComplexMatrix::from_fn(n, n, |i, j| if i == j { c64(values[i], 0.0) } else { c64(0.0, 0.0) })
}

/// Builds a matrix from rows of real numbers.
pub fn from_real_rows(rows: &[&[f64]]) -> ComplexMatrix {
    let r = rows.len();
    let cols = rows.first().map_or(0, |row| row.len());
    ComplexMatrix::from_fn(r, cols, |i, j| c64(rows[i][j], 0.0))
}
