use super::{ComplexMatrix, Complex64};
use crate::error::{Error, Result};

/// Tensor factor of a bipartite space `X ⊗ Y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    /// `X`, the slow index.
    First,
    /// `Y`, the fast index.
    Second,
}

/// Transpose in the computational basis.
pub fn transpose_basis(m: &ComplexMatrix) -> ComplexMatrix {
    m.transpose()
}

/// Entrywise complex conjugate in the computational basis.
pub fn conjugate_basis(m: &ComplexMatrix) -> ComplexMatrix {
    m.map(|z| z.conj())
}

/// Kronecker product `A ⊗ B` with index `(i, j) ↦ i·dim(B) + j`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

fn check_bipartite(m: &ComplexMatrix, dims: (usize, usize)) -> Result<()> {
    let n = dims.0 * dims.1;
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::invalid(format!(
            "expected a {n}x{n} operator for dims {dims:?}, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// Partial trace of an operator on `X ⊗ Y`, `dims = (d_X, d_Y)`, keeping `keep`.
pub fn partial_trace(m: &ComplexMatrix, dims: (usize, usize), keep: Subsystem) -> Result<ComplexMatrix> {
    check_bipartite(m, dims)?;
    let (dx, dy) = dims;
    let out = match keep {
        Subsystem::First => ComplexMatrix::from_fn(dx, dx, |i, j| {
            (0..dy).fold(Complex64::new(0.0, 0.0), |acc, k| acc + m[(i * dy + k, j * dy + k)])
        }),
        Subsystem::Second => ComplexMatrix::from_fn(dy, dy, |i, j| {
            (0..dx).fold(Complex64::new(0.0, 0.0), |acc, k| acc + m[(k * dy + i, k * dy + j)])
        }),
    };
    Ok(out)
}

/// Reorders an operator on `X ⊗ Y` (`dims = (d_X, d_Y)`) into one on `Y ⊗ X`.
pub fn swap_subsystems(m: &ComplexMatrix, dims: (usize, usize)) -> Result<ComplexMatrix> {
    check_bipartite(m, dims)?;
    let (dx, dy) = dims;
    Ok(ComplexMatrix::from_fn(dx * dy, dx * dy, |r, c| {
        let (ry, rx) = (r / dx, r % dx);
        let (cy, cx) = (c / dx, c % dx);
        m[(rx * dy + ry, cx * dy + cy)]
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{c64, diag_real, frobenius, identity};
    use crate::random::{random_complex, random_density, seeded};

    #[test]
    fn transpose_example() {
        let mut m = ComplexMatrix::zeros(2, 2);
        m[(0, 1)] = c64(0.0, 1.0);
        let t = transpose_basis(&m);
        assert_eq!(t[(1, 0)], c64(0.0, 1.0));
        assert_eq!(t[(0, 1)], c64(0.0, 0.0));
    }

    #[test]
    fn kron_identity_with_diag() {
        let k = kron(&identity(2), &diag_real(&[3.0, 5.0]));
        assert!(frobenius(&(k - diag_real(&[3.0, 5.0, 3.0, 5.0]))) < 1e-15);
    }

    #[test]
    fn swap_of_product_exchanges_factors() {
        let mut rng = seeded(11);
        let a = random_complex(2, 2, &mut rng);
        let b = random_complex(3, 3, &mut rng);
        let swapped = swap_subsystems(&kron(&a, &b), (2, 3)).unwrap();
        assert!(frobenius(&(swapped - kron(&b, &a))) < 1e-14);
    }

    #[test]
    fn partial_trace_of_product_state() {
        let mut rng = seeded(12);
        let rho = random_density(2, &mut rng);
        let sigma = random_density(3, &mut rng);
        let joint = kron(&rho, &sigma);
        let kept_first = partial_trace(&joint, (2, 3), Subsystem::First).unwrap();
        let kept_second = partial_trace(&joint, (2, 3), Subsystem::Second).unwrap();
        assert!(frobenius(&(kept_first - &rho)) < 1e-14);
        assert!(frobenius(&(kept_second - &sigma)) < 1e-14);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let m = identity(5);
        assert!(partial_trace(&m, (2, 3), Subsystem::First).is_err());
        assert!(swap_subsystems(&m, (2, 2)).is_err());
    }

    #[test]
    fn transpose_involution_and_adjoint() {
        let mut rng = seeded(13);
        let m = random_complex(3, 4, &mut rng);
        assert_eq!(transpose_basis(&transpose_basis(&m)), m);
        assert_eq!(conjugate_basis(&transpose_basis(&m)), m.adjoint());
    }
}
