use crate::channels::{reverse_process_operator, DensityMatrix, QuantumChannel};
use crate::error::{Error, Result};
use crate::fidelity::fidelity;
use crate::matcore::{
    commutator, conjugate_basis, frobenius, hermitian_part, identity, invsqrtm, kron,
    require_full_rank, sqrtm, transpose_basis, ComplexMatrix,
};

/// Relative Frobenius tolerance for `[τ, E(γ)] = 0`.
pub const COMMUTATION_TOL: f64 = 1e-10;

pub const DEFAULT_EPSILON_SCHEDULE: [f64; 7] = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8];

/// Forward channel `E: A → B`, prior `γ` on `A` and reference output `τ` on `B`.
///
/// Construction checks that `γ`, `τ` and `E ⋆ γ` are all full rank.
#[derive(Debug, Clone)]
pub struct RetrodictionProblem {
    forward: QuantumChannel,
    prior: DensityMatrix,
    reference: DensityMatrix,
    output: ComplexMatrix,
    q_fwd: ComplexMatrix,
}

impl RetrodictionProblem {
    pub fn new(forward: QuantumChannel, prior: DensityMatrix, reference: DensityMatrix) -> Result<Self> {
        if prior.dim() != forward.d_in() {
            return Err(Error::invalid(format!(
                "prior has dimension {}, channel input is {}",
                prior.dim(),
                forward.d_in()
            )));
        }
        if reference.dim() != forward.d_out() {
            return Err(Error::invalid(format!(
                "reference output has dimension {}, channel output is {}",
                reference.dim(),
                forward.d_out()
            )));
        }
        require_full_rank(prior.matrix(), "prior")?;
        require_full_rank(reference.matrix(), "reference output")?;
        let q_fwd = crate::channels::star(&forward, prior.matrix())?;
        require_full_rank(&q_fwd, "forward process operator")?;
        let output = hermitian_part(&forward.apply(prior.matrix())?);
        Ok(RetrodictionProblem {
            forward,
            prior,
            reference,
            output,
            q_fwd,
        })
    }

    pub fn forward(&self) -> &QuantumChannel {
        &self.forward
    }

    pub fn prior(&self) -> &DensityMatrix {
        &self.prior
    }

    pub fn reference(&self) -> &DensityMatrix {
        &self.reference
    }

    /// `E(γ)`.
    pub fn output_state(&self) -> &ComplexMatrix {
        &self.output
    }

    /// `Q_fwd = E ⋆ γ` on `B ⊗ A`.
    pub fn forward_process(&self) -> &ComplexMatrix {
        &self.q_fwd
    }

    /// `‖[τ, E(γ)]‖_F`.
    pub fn commutator_norm(&self) -> f64 {
        frobenius(&commutator(self.reference.matrix(), &self.output))
    }

    pub fn is_commuting(&self) -> bool {
        self.commutator_norm() <= COMMUTATION_TOL * frobenius(&self.output)
    }

    /// `√τ E(γ) √τ`.
    fn sandwiched_output(&self) -> Result<ComplexMatrix> {
        let root = sqrtm(self.reference.matrix())?;
        Ok(hermitian_part(&(&root * &self.output * &root)))
    }
}

/// `D = √τ (√τ E(γ) √τ)^{-1/2}`.
pub fn d_operator(problem: &RetrodictionProblem) -> Result<ComplexMatrix> {
    let inner = problem.sandwiched_output()?;
    require_full_rank(&inner, "sandwiched output")?;
    Ok(sqrtm(problem.reference.matrix())? * invsqrtm(&inner)?)
}

/// `Λ = −½ ((√τ E(γ) √τ)^{1/2})ᵀ`, the trace-preservation multiplier.
pub fn lagrange_multiplier(problem: &RetrodictionProblem) -> Result<ComplexMatrix> {
    Ok(transpose_basis(&sqrtm(&problem.sandwiched_output()?)?).scale(-0.5))
}

/// Input-first Choi operator `(Dᵀ ⊗ √γ) C_Eᵀ (D* ⊗ √γ)` on `B ⊗ A`.
pub fn reverse_choi_closed_form(problem: &RetrodictionProblem, d: &ComplexMatrix) -> Result<ComplexMatrix> {
    let root_gamma = sqrtm(problem.prior.matrix())?;
    let left = kron(&transpose_basis(d), &root_gamma);
    let right = kron(&conjugate_basis(d), &root_gamma);
    Ok(hermitian_part(&(left * transpose_basis(problem.forward.choi()) * right)))
}

/// The fidelity-optimal reverse channel and its certificates.
#[derive(Debug, Clone)]
pub struct ReverseSolution {
    /// `R: B → A`.
    pub reverse: QuantumChannel,
    pub d_operator: ComplexMatrix,
    /// `F(Q_fwd, Q_rev)` attained by `reverse`.
    pub fidelity_value: f64,
    /// Whether `[τ, E(γ)] = 0` within [`COMMUTATION_TOL`].
    pub commuting: bool,
    pub lagrange_multiplier: ComplexMatrix,
}

/// `R(σ) = √γ E†(D σ D†) √γ`, built from Kraus operators `√γ K_k† D`.
pub fn optimal_reverse(problem: &RetrodictionProblem) -> Result<ReverseSolution> {
    let d = d_operator(problem)?;
    let root_gamma = sqrtm(problem.prior.matrix())?;
    let kraus = problem
        .forward
        .kraus()
        .iter()
        .map(|k| &root_gamma * k.adjoint() * &d)
        .collect();
    let reverse = QuantumChannel::from_kraus(problem.forward.d_out(), problem.forward.d_in(), kraus)?;
    let q_rev = reverse_process_operator(&reverse, &problem.reference)?;
    let fidelity_value = fidelity(&problem.q_fwd, &q_rev.matrix)?;
    Ok(ReverseSolution {
        reverse,
        d_operator: d,
        fidelity_value,
        commuting: problem.is_commuting(),
        lagrange_multiplier: lagrange_multiplier(problem)?,
    })
}

/// Petz transpose map `σ ↦ √γ E†(E(γ)^{-1/2} σ E(γ)^{-1/2}) √γ`.
pub fn petz_map(forward: &QuantumChannel, prior: &DensityMatrix) -> Result<QuantumChannel> {
    if prior.dim() != forward.d_in() {
        return Err(Error::invalid(format!(
            "prior has dimension {}, channel input is {}",
            prior.dim(),
            forward.d_in()
        )));
    }
    require_full_rank(prior.matrix(), "prior")?;
    let output = hermitian_part(&forward.apply(prior.matrix())?);
    require_full_rank(&output, "channel output")?;
    let inv_root_out = invsqrtm(&output)?;
    let root_gamma = sqrtm(prior.matrix())?;
    let kraus = forward
        .kraus()
        .iter()
        .map(|k| &root_gamma * k.adjoint() * &inv_root_out)
        .collect();
    QuantumChannel::from_kraus(forward.d_out(), forward.d_in(), kraus)
}

/// Retrodicted state `R(evidence)`.
pub fn jeffrey_update(solution: &ReverseSolution, evidence: &DensityMatrix) -> Result<DensityMatrix> {
    if evidence.dim() != solution.reverse.d_in() {
        return Err(Error::invalid(format!(
            "evidence has dimension {}, reverse channel input is {}",
            evidence.dim(),
            solution.reverse.d_in()
        )));
    }
    solution.reverse.apply_state(evidence)
}

/// Solution for one regularization strength.
#[derive(Debug, Clone)]
pub struct RegularizedSolution {
    pub epsilon: f64,
    pub solution: ReverseSolution,
}

/// Solves with `τ_ε = (1 − ε) τ + ε 1/d` for each `ε` in the schedule.
///
/// A singular `τ` that does not commute with `E(γ)` is rejected as
/// [`Error::Unsupported`]: no limiting solution is defined for it.
pub fn epsilon_regularized_reverse(
    forward: &QuantumChannel,
    prior: &DensityMatrix,
    reference: &DensityMatrix,
    schedule: &[f64],
) -> Result<Vec<RegularizedSolution>> {
    if reference.dim() != forward.d_out() || prior.dim() != forward.d_in() {
        return Err(Error::invalid("state dimensions do not match the channel"));
    }
    let output = hermitian_part(&forward.apply(prior.matrix())?);
    let commuting = frobenius(&commutator(reference.matrix(), &output)) <= COMMUTATION_TOL * frobenius(&output);
    let singular = require_full_rank(reference.matrix(), "reference output").is_err();
    if singular && !commuting {
        return Err(Error::Unsupported(
            "singular reference output that does not commute with E(γ)".into(),
        ));
    }
    let d = reference.dim();
    let uniform = identity(d).scale(1.0 / d as f64);
    schedule
        .iter()
        .map(|&eps| {
            if !(eps > 0.0 && eps <= 1.0) {
                return Err(Error::invalid(format!("regularization {eps} outside (0, 1]")));
            }
            let tau_eps = DensityMatrix::new(reference.matrix().scale(1.0 - eps) + uniform.scale(eps))?;
            let problem = RetrodictionProblem::new(forward.clone(), prior.clone(), tau_eps)?;
            Ok(RegularizedSolution {
                epsilon: eps,
                solution: optimal_reverse(&problem)?,
            })
        })
        .collect()
}
