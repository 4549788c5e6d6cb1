//! Seeded random instances for tests, the verification harness and optimizer
//! restarts. All generators draw from a `ChaCha8Rng` so runs are reproducible
//! across platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channels::QuantumChannel;
use crate::matcore::{c64, hermitian_part, identity, ComplexMatrix};

pub type TestRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Matrix of i.i.d. standard complex Gaussians.
pub fn random_complex<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c64(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

pub fn random_hermitian<R: Rng>(d: usize, rng: &mut R) -> ComplexMatrix {
    hermitian_part(&random_complex(d, d, rng))
}

/// Traceless Hermitian direction with unit Frobenius norm.
pub fn random_traceless_hermitian<R: Rng>(d: usize, rng: &mut R) -> ComplexMatrix {
    let h = random_hermitian(d, rng);
    let t = h.trace() / d as f64;
    let h = h - identity(d) * t;
    let n = h.norm();
    h / c64(n, 0.0)
}

/// Haar-random unitary via QR of a Gaussian matrix with phase correction.
pub fn random_unitary<R: Rng>(d: usize, rng: &mut R) -> ComplexMatrix {
    random_isometry(d, d, rng)
}

/// `rows × cols` matrix with orthonormal columns (`rows ≥ cols`).
pub fn random_isometry<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    assert!(rows >= cols, "isometry needs rows >= cols");
    let g = random_complex(rows, cols, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..cols {
        let diag = r[(j, j)];
        let phase = if diag.norm() > 0.0 { diag / diag.norm() } else { c64(1.0, 0.0) };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

/// Hilbert–Schmidt random state `G G† / Tr`, mixed with a small amount of the
/// maximally mixed state so the smallest eigenvalue stays away from zero.
pub fn random_density<R: Rng>(d: usize, rng: &mut R) -> ComplexMatrix {
    let g = random_complex(d, d, rng);
    let w = &g * g.adjoint();
    let t = w.trace().re;
    let mixed = 0.05;
    hermitian_part(&(w / c64(t, 0.0) * c64(1.0 - mixed, 0.0) + identity(d) * c64(mixed / d as f64, 0.0)))
}

/// Random positive-definite matrix (not normalized).
pub fn random_positive_definite<R: Rng>(d: usize, rng: &mut R) -> ComplexMatrix {
    let g = random_complex(d, d, rng);
    let scale: f64 = rng.random_range(0.2..5.0);
    hermitian_part(&((&g * g.adjoint()) / c64(d as f64, 0.0) + identity(d) * c64(0.1, 0.0))) * c64(scale, 0.0)
}

/// Random pure state `|ψ⟩⟨ψ|`.
pub fn random_pure<R: Rng>(d: usize, rng: &mut R) -> ComplexMatrix {
    let v = random_isometry(d, 1, rng);
    &v * v.adjoint()
}

/// Random channel from a Stinespring isometry with `n_kraus` Kraus operators.
pub fn random_kraus<R: Rng>(d_in: usize, d_out: usize, n_kraus: usize, rng: &mut R) -> Vec<ComplexMatrix> {
    let v = random_isometry(d_out * n_kraus, d_in, rng);
    (0..n_kraus)
        .map(|k| v.rows(k * d_out, d_out).into_owned())
        .collect()
}

/// Weight of the completely depolarizing channel in [`random_channel`].
pub const CHANNEL_MIXING: f64 = 0.05;

/// Random CPTP map: an isometry-generated channel with `d_in · d_out` Kraus
/// operators, mixed with weight [`CHANNEL_MIXING`] into the completely
/// depolarizing channel so that the Choi operator is well conditioned.
pub fn random_channel<R: Rng>(d_in: usize, d_out: usize, rng: &mut R) -> QuantumChannel {
    let keep = (1.0 - CHANNEL_MIXING).sqrt();
    let mut kraus: Vec<ComplexMatrix> = random_kraus(d_in, d_out, d_in * d_out, rng)
        .into_iter()
        .map(|k| k.scale(keep))
        .collect();
    let w = (CHANNEL_MIXING / d_out as f64).sqrt();
    for i in 0..d_out {
        for j in 0..d_in {
            let mut k = ComplexMatrix::zeros(d_out, d_in);
            k[(i, j)] = c64(w, 0.0);
            kraus.push(k);
        }
    }
    QuantumChannel::from_kraus(d_in, d_out, kraus).expect("mixture of CPTP maps is CPTP")
}

/// Random probability vector with entries bounded away from zero.
pub fn random_pmf<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / s).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{frobenius, min_eigenvalue};

    #[test]
    fn unitary_is_unitary() {
        let mut rng = seeded(5);
        let u = random_unitary(4, &mut rng);
        assert!(frobenius(&(u.adjoint() * &u - identity(4))) < 1e-12);
    }

    #[test]
    fn density_is_state() {
        let mut rng = seeded(6);
        let rho = random_density(3, &mut rng);
        assert!((rho.trace().re - 1.0).abs() < 1e-14);
        assert!(min_eigenvalue(&rho).unwrap() > 0.0);
    }

    #[test]
    fn same_seed_same_draws() {
        let a = random_hermitian(3, &mut seeded(99));
        let b = random_hermitian(3, &mut seeded(99));
        assert_eq!(a, b);
    }
}
