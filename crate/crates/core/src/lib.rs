//! Fidelity-optimal quantum retrodiction.
//!
//! Given a forward channel `E: A → B`, a prior `γ` on `A` and a reference
//! state `τ` on `B`, the reverse channel `R: B → A` maximizing the fidelity
//! between the forward and reverse process operators has the closed form
//! `R(σ) = √γ E†(D σ D†) √γ` with `D = √τ (√τ E(γ) √τ)^{-1/2}`. This crate
//! computes it, the Petz transpose map it reduces to when `[τ, E(γ)] = 0`,
//! the fidelity calculus behind it, and an independent projected-gradient
//! optimizer over CPTP maps used to check it.

pub mod channels;
pub mod error;
pub mod experiments;
pub mod fidelity;
pub mod matcore;
pub mod optimizer;
pub mod random;
pub mod retrodiction;

pub use error::{Error, Result};
