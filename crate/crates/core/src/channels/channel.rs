use super::DensityMatrix;
use crate::error::{Error, Result};
use crate::matcore::{
    c64, check_finite, frobenius, herm_eig, hermitian_part, hermiticity_error, identity,
    partial_trace, swap_subsystems, ComplexMatrix, Subsystem,
};

/// Trace-preservation tolerance applied when a channel is constructed.
pub const TP_TOL: f64 = 1e-9;

/// Tolerance for negative Choi eigenvalues, relative to `max(1, λ_max)`.
const CP_TOL: f64 = 1e-10;

/// CPTP map `A → B` held both as Kraus operators and as its Choi operator.
#[derive(Debug, Clone)]
pub struct QuantumChannel {
    d_in: usize,
    d_out: usize,
    kraus: Vec<ComplexMatrix>,
    choi: ComplexMatrix,
}

/// Residuals of the CPTP conditions.
#[derive(Debug, Clone, Copy)]
pub struct CptpReport {
    /// `‖Tr_out C − 1_in‖_F`.
    pub tp_residual: f64,
    pub min_choi_eig: f64,
    pub accepted: bool,
}

fn check_kraus_dims(d_in: usize, d_out: usize, kraus: &[ComplexMatrix]) -> Result<()> {
    if d_in == 0 || d_out == 0 {
        return Err(Error::invalid("channel dimensions must be positive"));
    }
    if kraus.is_empty() {
        return Err(Error::invalid("channel needs at least one Kraus operator"));
    }
    for (k, op) in kraus.iter().enumerate() {
        if op.nrows() != d_out || op.ncols() != d_in {
            return Err(Error::invalid(format!(
                "Kraus operator {k} is {}x{}, expected {d_out}x{d_in}",
                op.nrows(),
                op.ncols()
            )));
        }
        check_finite(op, "Kraus operator")?;
    }
    Ok(())
}

/// `Σ_ij E(|i⟩⟨j|) ⊗ |i⟩⟨j|` in `(output ⊗ input)` order.
pub fn kraus_to_choi(d_in: usize, d_out: usize, kraus: &[ComplexMatrix]) -> ComplexMatrix {
    let n = d_in * d_out;
    let mut choi = ComplexMatrix::zeros(n, n);
    for k in kraus {
        // Column vector Σ_i K|i⟩ ⊗ |i⟩ has entry K[b][a] at b·d_in + a.
        let v = ComplexMatrix::from_fn(n, 1, |r, _| k[(r / d_in, r % d_in)]);
        choi += &v * v.adjoint();
    }
    hermitian_part(&choi)
}

/// Kraus operators from the spectral decomposition of a Choi operator.
///
/// Eigenvalues below `tol · λ_max` are discarded; the remaining operators are
/// ordered by descending eigenvalue.
pub fn choi_to_kraus(
    choi: &ComplexMatrix,
    d_in: usize,
    d_out: usize,
    tol: f64,
) -> Result<Vec<ComplexMatrix>> {
    let n = d_in * d_out;
    if choi.nrows() != n || choi.ncols() != n {
        return Err(Error::invalid(format!(
            "Choi operator is {}x{}, expected {n}x{n}",
            choi.nrows(),
            choi.ncols()
        )));
    }
    if hermiticity_error(choi) > 1e-10 * frobenius(choi).max(1.0) {
        return Err(Error::invalid("Choi operator is not Hermitian"));
    }
    let eig = herm_eig(choi)?;
    let lambda_max = eig.max();
    if eig.min() < -CP_TOL * lambda_max.max(1.0) {
        return Err(Error::NotCompletelyPositive {
            min_eig: eig.min(),
        });
    }
    let cutoff = (tol * lambda_max).max(0.0);
    let mut kraus = Vec::new();
    for j in (0..n).rev() {
        let lambda = eig.eigenvalues[j];
        if lambda <= cutoff {
            continue;
        }
        let s = lambda.sqrt();
        let col = eig.eigenvectors.column(j);
        kraus.push(ComplexMatrix::from_fn(d_out, d_in, |b, a| col[b * d_in + a] * s));
    }
    if kraus.is_empty() {
        kraus.push(ComplexMatrix::zeros(d_out, d_in));
    }
    Ok(kraus)
}

/// CPTP residuals of a raw Choi operator in `(output ⊗ input)` order.
pub fn cptp_report(choi: &ComplexMatrix, d_in: usize, d_out: usize, tol: f64) -> Result<CptpReport> {
    let marginal = partial_trace(choi, (d_out, d_in), Subsystem::Second)?;
    let tp_residual = frobenius(&(marginal - identity(d_in)));
    let min_choi_eig = herm_eig(choi)?.min();
    Ok(CptpReport {
        tp_residual,
        min_choi_eig,
        accepted: tp_residual <= tol && min_choi_eig >= -tol,
    })
}

pub fn is_cptp(channel: &QuantumChannel, tol: f64) -> CptpReport {
    cptp_report(&channel.choi, channel.d_in, channel.d_out, tol)
        .expect("channel Choi has consistent dimensions")
}

impl QuantumChannel {
    /// Builds a channel from Kraus operators, each `d_out × d_in`.
    pub fn from_kraus(d_in: usize, d_out: usize, kraus: Vec<ComplexMatrix>) -> Result<Self> {
        check_kraus_dims(d_in, d_out, &kraus)?;
        let sum = kraus
            .iter()
            .fold(ComplexMatrix::zeros(d_in, d_in), |acc, k| acc + k.adjoint() * k);
        let tp = frobenius(&(sum - identity(d_in)));
        if tp > TP_TOL {
            return Err(Error::invalid(format!(
                "Kraus operators are not trace preserving (residual {tp:e})"
            )));
        }
        let choi = kraus_to_choi(d_in, d_out, &kraus);
        Ok(QuantumChannel {
            d_in,
            d_out,
            kraus,
            choi,
        })
    }

    /// Builds a channel from its `(output ⊗ input)` Choi operator.
    pub fn from_choi(d_in: usize, d_out: usize, choi: ComplexMatrix, tol: f64) -> Result<Self> {
        let kraus = choi_to_kraus(&choi, d_in, d_out, tol)?;
        let mut channel = Self::from_kraus(d_in, d_out, kraus)?;
        if frobenius(&(&channel.choi - &choi)) <= 1e-9 {
            channel.choi = hermitian_part(&choi);
        }
        Ok(channel)
    }

    pub fn identity(d: usize) -> Self {
        Self::from_kraus(d, d, vec![identity(d)]).expect("identity is CPTP")
    }

    /// `ρ ↦ U ρ U†`.
    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        let (d_out, d_in) = u.shape();
        Self::from_kraus(d_in, d_out, vec![u])
    }

    /// `ρ ↦ Tr[ρ] ω` on a `d_in`-dimensional input.
    pub fn erase_to(d_in: usize, omega: &DensityMatrix) -> Self {
        let d_out = omega.dim();
        let mut kraus = Vec::new();
        let eig = herm_eig(omega.matrix()).expect("state is Hermitian");
        for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda <= 0.0 {
                continue;
            }
            let v = eig.eigenvectors.column(k);
            for i in 0..d_in {
                kraus.push(ComplexMatrix::from_fn(d_out, d_in, |b, a| {
                    if a == i {
                        v[b] * lambda.sqrt()
                    } else {
                        c64(0.0, 0.0)
                    }
                }));
            }
        }
        Self::from_kraus(d_in, d_out, kraus).expect("erasure channel is CPTP")
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// Choi operator in `(output ⊗ input)` order.
    pub fn choi(&self) -> &ComplexMatrix {
        &self.choi
    }

    /// Choi operator in `(input ⊗ output)` order.
    pub fn choi_input_first(&self) -> ComplexMatrix {
        swap_subsystems(&self.choi, (self.d_out, self.d_in)).expect("Choi dims consistent")
    }

    /// `Σ K X K†` for any `d_in × d_in` operator.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.nrows() != self.d_in || x.ncols() != self.d_in {
            return Err(Error::invalid(format!(
                "channel input is {0}x{0}, got {1}x{2}",
                self.d_in,
                x.nrows(),
                x.ncols()
            )));
        }
        Ok(self
            .kraus
            .iter()
            .fold(ComplexMatrix::zeros(self.d_out, self.d_out), |acc, k| acc + k * x * k.adjoint()))
    }

    pub fn apply_state(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::new(hermitian_part(&self.apply(rho.matrix())?))
    }

    /// Adjoint map `Σ K† Y K`, defined by `Tr[E(X) Y] = Tr[X E†(Y)]`.
    pub fn apply_adjoint(&self, y: &ComplexMatrix) -> Result<ComplexMatrix> {
        if y.nrows() != self.d_out || y.ncols() != self.d_out {
            return Err(Error::invalid(format!(
                "adjoint input is {0}x{0}, got {1}x{2}",
                self.d_out,
                y.nrows(),
                y.ncols()
            )));
        }
        Ok(self
            .kraus
            .iter()
            .fold(ComplexMatrix::zeros(self.d_in, self.d_in), |acc, k| acc + k.adjoint() * y * k))
    }
}

/// One collision of a thermalizing machine: `ρ ↦ Tr_env[V (ρ ⊗ ξ) V†]` with
/// `V = cos θ · 1 + i sin θ · SWAP`. The environment basis is the eigenbasis of `ξ`.
pub fn partial_swap_channel(theta: f64, xi: &DensityMatrix) -> Result<QuantumChannel> {
    if !theta.is_finite() {
        return Err(Error::invalid("partial swap angle must be finite"));
    }
    let d = xi.dim();
    let n = d * d;
    let (s, c) = theta.sin_cos();
    // V on system ⊗ environment.
    let v = ComplexMatrix::from_fn(n, n, |r, col| {
        let (rs, re) = (r / d, r % d);
        let (cs, ce) = (col / d, col % d);
        let mut z = c64(0.0, 0.0);
        if r == col {
            z += c64(c, 0.0);
        }
        if rs == ce && re == cs {
            z += c64(0.0, s);
        }
        z
    });
    let eig = herm_eig(xi.matrix())?;
    let basis = &eig.eigenvectors;
    let mut kraus = Vec::new();
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda <= 0.0 {
            continue;
        }
        let sqrt_l = lambda.sqrt();
        for j in 0..d {
            // (1 ⊗ ⟨e_j|) V (1 ⊗ |e_k⟩)
            let op = ComplexMatrix::from_fn(d, d, |out, inp| {
                let mut z = c64(0.0, 0.0);
                for e1 in 0..d {
                    for e2 in 0..d {
                        z += basis[(e1, j)].conj() * v[(out * d + e1, inp * d + e2)] * basis[(e2, k)];
                    }
                }
                z * sqrt_l
            });
            kraus.push(op);
        }
    }
    QuantumChannel::from_kraus(d, d, kraus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{diag_real, kron, trace};
    use crate::random::{random_channel, random_complex, random_density, random_kraus, seeded};
    use std::f64::consts::PI;

    fn swap_matrix(d: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(d * d, d * d, |r, c| {
            if r / d == c % d && r % d == c / d {
                c64(1.0, 0.0)
            } else {
                c64(0.0, 0.0)
            }
        })
    }

    #[test]
    fn identity_choi_is_unnormalized_max_entangled() {
        let ch = QuantumChannel::identity(2);
        let mut expected = ComplexMatrix::zeros(4, 4);
        for &(r, c) in &[(0, 0), (0, 3), (3, 0), (3, 3)] {
            expected[(r, c)] = c64(1.0, 0.0);
        }
        assert!(frobenius(&(ch.choi() - expected)) < 1e-15);
    }

    #[test]
    fn erasure_choi_is_omega_tensor_identity() {
        let omega = DensityMatrix::new(random_density(2, &mut seeded(3))).unwrap();
        let ch = QuantumChannel::erase_to(3, &omega);
        // Σ_ij E(|i⟩⟨j|) ⊗ |i⟩⟨j| = Σ_i ω ⊗ |i⟩⟨i|
        let expected = kron(omega.matrix(), &identity(3));
        assert!(frobenius(&(ch.choi() - expected)) < 1e-14);
    }

    #[test]
    fn choi_kraus_round_trip() {
        let mut rng = seeded(4);
        let ch = QuantumChannel::from_kraus(2, 2, random_kraus(2, 2, 2, &mut rng)).unwrap();
        let kraus = choi_to_kraus(ch.choi(), 2, 2, 1e-12).unwrap();
        assert_eq!(kraus.len(), 2);
        let back = kraus_to_choi(2, 2, &kraus);
        assert!(frobenius(&(back - ch.choi())) < 1e-9);
        // Descending eigenvalue order means descending Frobenius norms.
        assert!(kraus[0].norm() >= kraus[1].norm());
    }

    #[test]
    fn non_cp_choi_rejected() {
        let err = choi_to_kraus(&swap_matrix(2), 2, 2, 1e-12).unwrap_err();
        assert!(matches!(err, Error::NotCompletelyPositive { .. }));
    }

    #[test]
    fn transpose_map_report() {
        let report = cptp_report(&swap_matrix(2), 2, 2, 1e-9).unwrap();
        assert!((report.min_choi_eig + 1.0).abs() < 1e-12);
        assert!(report.tp_residual < 1e-14);
        assert!(!report.accepted);
    }

    #[test]
    fn identity_report_is_clean() {
        let r = is_cptp(&QuantumChannel::identity(2), 1e-12);
        assert!(r.tp_residual < 1e-14);
        assert!(r.min_choi_eig.abs() < 1e-14);
        assert!(r.accepted);
    }

    #[test]
    fn apply_and_adjoint_basics() {
        let mut rng = seeded(8);
        let rho = random_density(3, &mut rng);
        let id = QuantumChannel::identity(3);
        assert!(frobenius(&(id.apply(&rho).unwrap() - &rho)) < 1e-15);
        let ch = random_channel(3, 2, &mut rng);
        assert!(frobenius(&(ch.apply_adjoint(&identity(2)).unwrap() - identity(3))) < 1e-12);
        assert!(ch.apply(&identity(2)).is_err());
        assert!(ch.apply_adjoint(&identity(3)).is_err());
    }

    #[test]
    fn erasure_adjoint() {
        let mut rng = seeded(9);
        let omega = DensityMatrix::new(random_density(2, &mut rng)).unwrap();
        let ch = QuantumChannel::erase_to(2, &omega);
        let y = random_complex(2, 2, &mut rng);
        let expected = identity(2) * trace(&(omega.matrix() * &y));
        assert!(frobenius(&(ch.apply_adjoint(&y).unwrap() - expected)) < 1e-13);
    }

    #[test]
    fn duality() {
        let mut rng = seeded(10);
        let ch = random_channel(2, 3, &mut rng);
        for _ in 0..100 {
            let x = random_complex(2, 2, &mut rng);
            let y = random_complex(3, 3, &mut rng);
            let lhs = trace(&(ch.apply(&x).unwrap() * &y));
            let rhs = trace(&(&x * ch.apply_adjoint(&y).unwrap()));
            assert!((lhs - rhs).norm() < 1e-10);
        }
    }

    #[test]
    fn partial_swap_limits() {
        let xi = DensityMatrix::diagonal(&[0.95, 0.05]).unwrap();
        let rho = random_density(2, &mut seeded(20));
        let id = partial_swap_channel(0.0, &xi).unwrap();
        assert!(frobenius(&(id.apply(&rho).unwrap() - &rho)) < 1e-14);
        let full = partial_swap_channel(PI / 2.0, &xi).unwrap();
        assert!(frobenius(&(full.apply(&rho).unwrap() - xi.matrix())) < 1e-14);
    }

    #[test]
    fn partial_swap_diagonal_mixing() {
        // Diagonal ρ, ξ: the interference term is i·sc·[ξ, ρ]-like and vanishes.
        let theta = PI / 8.0;
        let xi = DensityMatrix::diagonal(&[0.95, 0.05]).unwrap();
        let rho = diag_real(&[0.3, 0.7]);
        let ch = partial_swap_channel(theta, &xi).unwrap();
        let (s, c) = theta.sin_cos();
        let expected = diag_real(&[c * c * 0.3 + s * s * 0.95, c * c * 0.7 + s * s * 0.05]);
        assert!(frobenius(&(ch.apply(&rho).unwrap() - expected)) < 1e-14);
    }

    #[test]
    fn partial_swap_matches_dilation() {
        // Oracle: explicit Tr_env[V (ρ ⊗ ξ) V†] in the computational basis.
        let mut rng = seeded(21);
        let xi = DensityMatrix::new(random_density(2, &mut rng)).unwrap();
        let rho = random_density(2, &mut rng);
        let theta = 0.7;
        let (s, c) = f64::sin_cos(theta);
        let v = identity(4) * c64(c, 0.0) + swap_matrix(2) * c64(0.0, s);
        let joint = &v * kron(&rho, xi.matrix()) * v.adjoint();
        let expected = partial_trace(&joint, (2, 2), Subsystem::First).unwrap();
        let ch = partial_swap_channel(theta, &xi).unwrap();
        assert!(frobenius(&(ch.apply(&rho).unwrap() - expected)) < 1e-13);
        assert!(is_cptp(&ch, 1e-12).accepted);
    }

    #[test]
    fn bad_kraus_rejected() {
        let k = vec![identity(2) * c64(2.0, 0.0)];
        assert!(QuantumChannel::from_kraus(2, 2, k).is_err());
        assert!(QuantumChannel::from_kraus(2, 3, vec![identity(2)]).is_err());
        assert!(QuantumChannel::from_kraus(2, 2, vec![]).is_err());
    }
}
