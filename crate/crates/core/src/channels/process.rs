//! Process operators: bipartite states standing in for the joint
//! input/output distribution of a forward or reverse process.

use nalgebra::DVector;

use super::{DensityMatrix, QuantumChannel};
use crate::error::{Error, Result};
use crate::matcore::{
    hermitian_part, identity, kron, min_eigenvalue, sqrtm, transpose_basis, Complex64,
    ComplexMatrix,
};

/// `|√γ⟩⟩ = Σ_ij ⟨i|√γ|j⟩ |i⟩|j⟩`, amplitude of `|i⟩|j⟩` at index `i·d + j`.
#[derive(Debug, Clone)]
pub struct PurificationVector {
    pub dim: usize,
    pub amplitudes: DVector<Complex64>,
}

impl PurificationVector {
    /// Rank-one projector on `A₁ ⊗ A₂`.
    pub fn projector(&self) -> ComplexMatrix {
        let v = ComplexMatrix::from_column_slice(self.amplitudes.len(), 1, self.amplitudes.as_slice());
        &v * v.adjoint()
    }
}

pub fn canonical_purification(gamma: &DensityMatrix) -> PurificationVector {
    let d = gamma.dim();
    let root = sqrtm(gamma.matrix()).expect("state is PSD");
    PurificationVector {
        dim: d * d,
        amplitudes: DVector::from_fn(d * d, |k, _| root[(k / d, k % d)]),
    }
}

fn check_input(channel: &QuantumChannel, rho: &ComplexMatrix) -> Result<()> {
    if rho.nrows() != channel.d_in() || rho.ncols() != channel.d_in() {
        return Err(Error::invalid(format!(
            "state is {}x{}, channel input dimension is {}",
            rho.nrows(),
            rho.ncols(),
            channel.d_in()
        )));
    }
    Ok(())
}

/// `E ⋆ ρ = (1_B ⊗ √ρᵀ) C_E (1_B ⊗ √ρᵀ)` on `B ⊗ A`.
pub fn star(channel: &QuantumChannel, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_input(channel, rho)?;
    let side = kron(&identity(channel.d_out()), &sqrtm(&transpose_basis(rho))?);
    Ok(hermitian_part(&(&side * channel.choi() * &side)))
}

/// `(E ⊗ I)(|√ρ⟩⟩⟨⟨√ρ|)`, the purification route to [`star`].
pub fn star_via_purification(channel: &QuantumChannel, rho: &DensityMatrix) -> Result<ComplexMatrix> {
    check_input(channel, rho.matrix())?;
    let proj = canonical_purification(rho).projector();
    let id = identity(channel.d_in());
    let n = channel.d_out() * channel.d_in();
    let out = channel.kraus().iter().fold(ComplexMatrix::zeros(n, n), |acc, k| {
        let lifted = kron(k, &id);
        acc + &lifted * &proj * lifted.adjoint()
    });
    Ok(hermitian_part(&out))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProcessRole {
    Forward,
    Reverse,
}

/// Bipartite state on `B ⊗ A` representing a process.
#[derive(Debug, Clone)]
pub struct ProcessOperator {
    pub d_b: usize,
    pub d_a: usize,
    pub matrix: ComplexMatrix,
    pub role: ProcessRole,
}

impl ProcessOperator {
    fn checked(d_b: usize, d_a: usize, matrix: ComplexMatrix, role: ProcessRole) -> Result<Self> {
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!("process operator has trace {tr}")));
        }
        let min = min_eigenvalue(&matrix)?;
        if min < -1e-10 {
            return Err(Error::invalid(format!(
                "process operator has negative eigenvalue {min:e}"
            )));
        }
        Ok(ProcessOperator {
            d_b,
            d_a,
            matrix,
            role,
        })
    }
}

/// `Q_fwd = E ⋆ γ`.
pub fn forward_process_operator(channel: &QuantumChannel, gamma: &DensityMatrix) -> Result<ProcessOperator> {
    let q = star(channel, gamma.matrix())?;
    ProcessOperator::checked(channel.d_out(), channel.d_in(), q, ProcessRole::Forward)
}

/// `Q_rev = (√τ ⊗ 1_A) C_Rᵀ (√τ ⊗ 1_A)` for an input-first Choi operator
/// `C_R` on `B ⊗ A` (`d_b = dim τ`).
pub fn reverse_process_from_choi(
    choi_input_first: &ComplexMatrix,
    tau: &ComplexMatrix,
    d_a: usize,
) -> Result<ComplexMatrix> {
    let d_b = tau.nrows();
    let n = d_b * d_a;
    if choi_input_first.nrows() != n || choi_input_first.ncols() != n {
        return Err(Error::invalid(format!(
            "reverse Choi operator is {}x{}, expected {n}x{n}",
            choi_input_first.nrows(),
            choi_input_first.ncols()
        )));
    }
    let side = kron(&sqrtm(tau)?, &identity(d_a));
    Ok(hermitian_part(&(&side * transpose_basis(choi_input_first) * &side)))
}

/// `Q_rev = (R ⋆ τ)ᵀ` for a reverse channel `R: B → A`, living on `B ⊗ A`.
pub fn reverse_process_operator(reverse: &QuantumChannel, tau: &DensityMatrix) -> Result<ProcessOperator> {
    if reverse.d_in() != tau.dim() {
        return Err(Error::invalid(format!(
            "reference state has dimension {}, reverse channel input is {}",
            tau.dim(),
            reverse.d_in()
        )));
    }
    let q = reverse_process_from_choi(&reverse.choi_input_first(), tau.matrix(), reverse.d_out())?;
    ProcessOperator::checked(reverse.d_in(), reverse.d_out(), q, ProcessRole::Reverse)
}
