//! Uhlmann fidelity, its derivative, and the stationarity conditions of the
//! fidelity-maximization program over reverse channels.
//!
//! With `Δ = σ^{-1/2} (√σ ρ √σ)^{1/2} σ^{-1/2}` one has `Δ σ Δ = ρ` and
//! `F(ρ, σ) = Tr[σ Δ] = Tr[ρ Δ⁻¹]`; the differential of the fidelity is
//! `dF = ½ Tr[Δ dσ] + ½ Tr[Δ⁻¹ dρ]`.

use crate::channels::{reverse_process_operator, QuantumChannel};
use crate::error::{Error, Result};
use crate::matcore::{
    check_square, frobenius, herm_eig, hermitian_part, identity, invsqrtm, kron, partial_trace,
    require_full_rank, sqrtm, sqrtm_clamped, ComplexMatrix, Subsystem,
};
use crate::retrodiction::{lagrange_multiplier, RetrodictionProblem};

fn check_same_shape(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<usize> {
    let n = check_square(rho, "rho")?;
    if check_square(sigma, "sigma")? != n {
        return Err(Error::invalid(format!(
            "fidelity arguments differ in dimension ({n} vs {})",
            sigma.nrows()
        )));
    }
    Ok(n)
}

fn check_psd(m: &ComplexMatrix, what: &str) -> Result<()> {
    let eig = herm_eig(m)?;
    if eig.min() < -1e-10 * eig.max().max(1.0) {
        return Err(Error::invalid(format!(
            "{what} is not positive semidefinite (eigenvalue {:e})",
            eig.min()
        )));
    }
    Ok(())
}

/// `F(ρ, σ) = Tr √(√σ ρ √σ)`.
///
/// Arguments must be PSD; they are not normalized.
pub fn fidelity(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    check_same_shape(rho, sigma)?;
    check_psd(rho, "rho")?;
    check_psd(sigma, "sigma")?;
    let root = sqrtm(sigma)?;
    let inner = herm_eig(&hermitian_part(&(&root * rho * &root)))?;
    Ok(inner.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).sum())
}

/// `Δ = σ^{-1/2} (√σ ρ √σ)^{1/2} σ^{-1/2}` for full-rank `ρ`, `σ`.
pub fn delta_operator(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_same_shape(rho, sigma)?;
    require_full_rank(rho, "rho")?;
    require_full_rank(sigma, "sigma")?;
    let root = sqrtm(sigma)?;
    let inv_root = invsqrtm(sigma)?;
    let middle = sqrtm_clamped(&hermitian_part(&(&root * rho * &root)))?;
    Ok(hermitian_part(&(&inv_root * middle * &inv_root)))
}

/// Gradient of `F` with respect to each argument.
#[derive(Debug, Clone)]
pub struct FidelityGradient {
    /// `½ Δ⁻¹`.
    pub wrt_rho: ComplexMatrix,
    /// `½ Δ`.
    pub wrt_sigma: ComplexMatrix,
    pub delta: ComplexMatrix,
}

pub fn fidelity_gradient(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<FidelityGradient> {
    let delta = delta_operator(rho, sigma)?;
    // Δ⁻¹ solves X ρ X = σ, so it is Δ with the arguments exchanged.
    let delta_inv = delta_operator(sigma, rho)?;
    Ok(FidelityGradient {
        wrt_rho: delta_inv.scale(0.5),
        wrt_sigma: delta.scale(0.5),
        delta,
    })
}

/// `½ Tr[Δ dσ] + ½ Tr[Δ⁻¹ dρ]`.
pub fn fidelity_directional_derivative(
    rho: &ComplexMatrix,
    sigma: &ComplexMatrix,
    d_rho: &ComplexMatrix,
    d_sigma: &ComplexMatrix,
) -> Result<f64> {
    let n = check_same_shape(rho, sigma)?;
    if d_rho.shape() != (n, n) || d_sigma.shape() != (n, n) {
        return Err(Error::invalid("direction has the wrong shape"));
    }
    let g = fidelity_gradient(rho, sigma)?;
    Ok((g.wrt_sigma * d_sigma).trace().re + (g.wrt_rho * d_rho).trace().re)
}

const MAX_HALVINGS: u32 = 40;

/// Central second difference of `ε ↦ F(ρ, σ + εH)` at zero.
///
/// `ε` is halved until both `σ ± εH` are PSD.
pub fn second_directional_difference(
    rho: &ComplexMatrix,
    sigma: &ComplexMatrix,
    direction: &ComplexMatrix,
    epsilon: f64,
) -> Result<f64> {
    let n = check_same_shape(rho, sigma)?;
    if direction.shape() != (n, n) {
        return Err(Error::invalid("direction has the wrong shape"));
    }
    if !(epsilon > 0.0) {
        return Err(Error::invalid("step must be positive"));
    }
    if frobenius(direction) == 0.0 {
        return Ok(0.0);
    }
    let h = hermitian_part(direction);
    let mut eps = epsilon;
    for _ in 0..=MAX_HALVINGS {
        let plus = sigma + h.scale(eps);
        let minus = sigma - h.scale(eps);
        if herm_eig(&plus)?.min() >= 0.0 && herm_eig(&minus)?.min() >= 0.0 {
            let f0 = fidelity(rho, sigma)?;
            let fp = fidelity(rho, &plus)?;
            let fm = fidelity(rho, &minus)?;
            return Ok((fp - 2.0 * f0 + fm) / (eps * eps));
        }
        eps *= 0.5;
    }
    Err(Error::PerturbationTooLarge {
        halvings: MAX_HALVINGS,
    })
}

/// Residuals of the Lagrangian stationarity conditions for a candidate reverse
/// channel.
#[derive(Debug, Clone)]
pub struct StationarityReport {
    /// `‖½ (√τ ⊗ 1) Δ (√τ ⊗ 1) + Λᵀ ⊗ 1‖_F`.
    pub grad_residual: f64,
    /// `‖Tr_A C_R − 1_B‖_F`.
    pub tp_residual: f64,
    pub lagrange_multiplier: ComplexMatrix,
}

/// Evaluates the stationarity conditions at `candidate: B → A`, with
/// `Δ = Q_rev^{-1/2} (√Q_rev Q_fwd √Q_rev)^{1/2} Q_rev^{-1/2}` and the
/// closed-form multiplier `Λ = −½ ((√τ E(γ) √τ)^{1/2})ᵀ`.
pub fn stationarity_report(
    problem: &RetrodictionProblem,
    candidate: &QuantumChannel,
) -> Result<StationarityReport> {
    let (d_a, d_b) = (problem.forward().d_in(), problem.forward().d_out());
    if candidate.d_in() != d_b || candidate.d_out() != d_a {
        return Err(Error::invalid(format!(
            "candidate maps {} -> {}, expected {d_b} -> {d_a}",
            candidate.d_in(),
            candidate.d_out()
        )));
    }
    let q_rev = reverse_process_operator(candidate, problem.reference())?.matrix;
    require_full_rank(&q_rev, "reverse process operator")?;
    let delta = delta_operator(problem.forward_process(), &q_rev)?;
    let lambda = lagrange_multiplier(problem)?;
    let side = kron(&sqrtm(problem.reference().matrix())?, &identity(d_a));
    let grad = (&side * &delta * &side).scale(0.5) + kron(&lambda.transpose(), &identity(d_a));
    let marginal = partial_trace(&candidate.choi_input_first(), (d_b, d_a), Subsystem::First)?;
    Ok(StationarityReport {
        grad_residual: frobenius(&grad),
        tp_residual: frobenius(&(marginal - identity(d_b))),
        lagrange_multiplier: lambda,
    })
}
