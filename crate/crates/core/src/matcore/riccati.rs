//! The Riccati-type equation `X B X = A` for PSD `A` and positive-definite `B`.
//!
//! Its unique PSD solution is `X = B^{-1/2} (√B A √B)^{1/2} B^{-1/2}`. For
//! positive-definite `A` the same operator also equals
//! `√A (√A B √A)^{-1/2} √A`, which gives an independent second route.

use super::{check_square, frobenius, hermitian_part, invsqrtm, require_full_rank, sqrtm, sqrtm_clamped, ComplexMatrix};
use crate::error::{Error, Result};

fn check_pair(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<usize> {
    let n = check_square(a, "A")?;
    if check_square(b, "B")? != n {
        return Err(Error::invalid(format!(
            "A is {n}x{n} but B is {}x{}",
            b.nrows(),
            b.ncols()
        )));
    }
    Ok(n)
}

/// Solves `X B X = A`.
pub fn riccati_solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_pair(a, b)?;
    require_full_rank(b, "B")?;
    let sqrt_b = sqrtm(b)?;
    let inv_sqrt_b = invsqrtm(b)?;
    let middle = sqrtm_clamped(&hermitian_part(&(&sqrt_b * a * &sqrt_b)))?;
    Ok(hermitian_part(&(&inv_sqrt_b * middle * &inv_sqrt_b)))
}

/// `‖X B X − A‖_F`.
pub fn riccati_residual(x: &ComplexMatrix, a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    frobenius(&(x * b * x - a))
}

/// Distance between the two closed forms of the Riccati solution.
pub fn verify_riccati_identity(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    check_pair(a, b)?;
    require_full_rank(a, "A")?;
    let via_b = riccati_solve(a, b)?;
    let sqrt_a = sqrtm(a)?;
    let inner = hermitian_part(&(&sqrt_a * b * &sqrt_a));
    let via_a = &sqrt_a * invsqrtm(&inner)? * &sqrt_a;
    Ok(frobenius(&(via_b - via_a)))
}
