//! Reverse channels: the fidelity-optimal closed form, the Petz transpose
//! map, Jeffrey-style updates, and the classical Bayes/Jeffrey limit.

mod classical;
mod reverse;

pub use classical::{
    bayes_reverse, classical_bayes, classical_jeffrey, classical_to_quantum_channel,
    diagonal_embedding, diagonal_extraction, ClassicalChannel, JointDistribution,
};
pub use reverse::{
    d_operator, epsilon_regularized_reverse, jeffrey_update, lagrange_multiplier,
    optimal_reverse, petz_map, reverse_choi_closed_form, RegularizedSolution,
    RetrodictionProblem, ReverseSolution, COMMUTATION_TOL, DEFAULT_EPSILON_SCHEDULE,
};
