use nalgebra::linalg::SymmetricEigen;

use super::{check_finite, check_square, hermitian_part, ComplexMatrix};
use crate::error::{Error, Result};

/// Relative rank cutoff: an operator is treated as full rank when its smallest
/// eigenvalue exceeds `RANK_TOL · λ_max`.
pub const RANK_TOL: f64 = 1e-10;

/// Relative cutoff below which eigenvalues count as zero in spectral functions.
pub fn default_zero_tol(dim: usize) -> f64 {
    1e-12 * dim.max(1) as f64
}

/// Eigendecomposition `M = U diag(λ) U†` with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// Largest eigenvalue magnitude.
    pub fn spectral_radius(&self) -> f64 {
        self.min().abs().max(self.max().abs())
    }

    /// `U diag(values) U†`.
    pub fn recompose(&self, values: &[f64]) -> ComplexMatrix {
        let u = &self.eigenvectors;
        let mut scaled = u.clone();
        for (j, &v) in values.iter().enumerate() {
            scaled.column_mut(j).scale_mut(v);
        }
        hermitian_part(&(scaled * u.adjoint()))
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.recompose(&self.eigenvalues)
    }
}

/// Hermitian eigendecomposition. The input is symmetrized first.
pub fn herm_eig(m: &ComplexMatrix) -> Result<SpectralDecomposition> {
    check_square(m, "matrix")?;
    check_finite(m, "matrix")?;
    let n = m.nrows();
    if n == 0 {
        return Ok(SpectralDecomposition {
            eigenvalues: Vec::new(),
            eigenvectors: ComplexMatrix::zeros(0, 0),
        });
    }
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors =
        ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Applies `f` to the spectrum of a Hermitian matrix.
///
/// Eigenvalues with `|λ| ≤ zero_tol · max|λ|` are snapped to zero before `f`
/// is applied; if `f(0)` is not finite (inverse-type functions) they map to 0,
/// giving the pseudo-inverse convention. A non-finite `f(λ)` on a retained
/// eigenvalue is a [`Error::DomainError`].
pub fn spectral_fn<F>(m: &ComplexMatrix, f: F, zero_tol: f64) -> Result<ComplexMatrix>
where
    F: Fn(f64) -> f64,
{
    let eig = herm_eig(m)?;
    let cutoff = zero_tol * eig.spectral_radius();
    let mut values = Vec::with_capacity(eig.dim());
    for &lambda in &eig.eigenvalues {
        let v = if lambda.abs() <= cutoff {
            let at_zero = f(0.0);
            if at_zero.is_finite() {
                at_zero
            } else {
                0.0
            }
        } else {
            let v = f(lambda);
            if !v.is_finite() {
                return Err(Error::DomainError(format!(
                    "function undefined at eigenvalue {lambda:e}"
                )));
            }
            v
        };
        values.push(v);
    }
    Ok(eig.recompose(&values))
}

/// Principal square root of a PSD matrix.
pub fn sqrtm(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    spectral_fn(m, f64::sqrt, default_zero_tol(m.nrows()))
}

/// Square root with negative eigenvalues clamped to zero and no snapping, for
/// products of full-rank operators whose spectrum spans many decades.
pub fn sqrtm_clamped(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    spectral_fn(m, |x| x.max(0.0).sqrt(), 0.0)
}

/// `M^{-1/2}` on the support of `M`, zero on its kernel.
pub fn invsqrtm(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    spectral_fn(m, |x| 1.0 / x.sqrt(), default_zero_tol(m.nrows()))
}

pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    Ok(herm_eig(m)?.min())
}

/// Fails with [`Error::RankDeficient`] unless `λ_min > RANK_TOL · λ_max`.
pub fn require_full_rank(m: &ComplexMatrix, what: &str) -> Result<SpectralDecomposition> {
    let eig = herm_eig(m)?;
    if eig.dim() == 0 || eig.min() <= RANK_TOL * eig.max().max(0.0) || eig.max() <= 0.0 {
        return Err(Error::rank(what, eig.min()));
    }
    Ok(eig)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{c64, diag_real, frobenius, from_real_rows, identity};
    use crate::random::{random_hermitian, seeded};

    #[test]
    fn diagonal_spectrum() {
        let eig = herm_eig(&diag_real(&[1.0, 2.0])).unwrap();
        assert_eq!(eig.eigenvalues.len(), 2);
        assert!((eig.eigenvalues[0] - 1.0).abs() < 1e-15);
        assert!((eig.eigenvalues[1] - 2.0).abs() < 1e-15);
        let mags = eig.eigenvectors.map(|z| c64(z.norm(), 0.0));
        assert!(frobenius(&(mags - identity(2))) < 1e-12);
    }

    #[test]
    fn pauli_x_spectrum() {
        let x = from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let eig = herm_eig(&x).unwrap();
        assert!((eig.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((eig.eigenvalues[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn random_reconstruction_and_unitarity() {
        let mut rng = seeded(7);
        for d in 2..=6 {
            let m = random_hermitian(d, &mut rng);
            let eig = herm_eig(&m).unwrap();
            let scale = frobenius(&m).max(1.0);
            assert!(frobenius(&(eig.reconstruct() - &m)) < 1e-10 * scale);
            let u = &eig.eigenvectors;
            assert!(frobenius(&(u.adjoint() * u - identity(d))) < 1e-10);
            assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn non_finite_rejected() {
        let mut m = identity(2);
        m[(0, 0)] = c64(f64::INFINITY, 0.0);
        assert!(matches!(herm_eig(&m), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn sqrt_and_invsqrt_examples() {
        let s = sqrtm(&diag_real(&[4.0, 9.0])).unwrap();
        assert!(frobenius(&(s - diag_real(&[2.0, 3.0]))) < 1e-14);
        let i = invsqrtm(&identity(3)).unwrap();
        assert!(frobenius(&(i - identity(3))) < 1e-14);
        let p = invsqrtm(&diag_real(&[4.0, 0.0])).unwrap();
        assert!(frobenius(&(p - diag_real(&[0.5, 0.0]))) < 1e-14);
    }

    #[test]
    fn sqrt_of_negative_is_domain_error() {
        let r = sqrtm(&diag_real(&[1.0, -0.5]));
        assert!(matches!(r, Err(Error::DomainError(_))));
        // Tiny negative eigenvalues are snapped to zero.
        let ok = sqrtm(&diag_real(&[1.0, -1e-15])).unwrap();
        assert!(ok[(1, 1)].norm() < 1e-15);
    }

    #[test]
    fn full_rank_check() {
        assert!(require_full_rank(&diag_real(&[1.0, 0.5]), "m").is_ok());
        let err = require_full_rank(&diag_real(&[1.0, 1e-12]), "tau").unwrap_err();
        match err {
            Error::RankDeficient { what, min_eig } => {
                assert_eq!(what, "tau");
                assert!((min_eig - 1e-12).abs() < 1e-20);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
