//! Seeded property sweep behind `qbayes verify`.

use std::fmt;

use rand::Rng;

use crate::channels::{is_cptp, reverse_process_operator, DensityMatrix};
use crate::error::{Error, Result};
use crate::fidelity::{fidelity, fidelity_directional_derivative, second_directional_difference, stationarity_report};
use crate::matcore::{frobenius, hermitian_part, identity, riccati_residual, riccati_solve, verify_riccati_identity};
use crate::random::{
    random_channel, random_density, random_hermitian, random_pmf, random_positive_definite, seeded, TestRng,
};
use crate::retrodiction::{
    bayes_reverse, classical_to_quantum_channel, d_operator, diagonal_embedding, diagonal_extraction,
    optimal_reverse, petz_map, reverse_choi_closed_form, ClassicalChannel, RetrodictionProblem,
};

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyTally {
    pub name: &'static str,
    pub passed: usize,
    pub failed: usize,
    /// Largest measured value over all trials (`NaN` if every trial errored).
    pub worst: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifySummary {
    pub dim: usize,
    pub trials: usize,
    pub seed: u64,
    pub properties: Vec<PropertyTally>,
}

impl VerifySummary {
    pub fn all_passed(&self) -> bool {
        self.properties.iter().all(|p| p.failed == 0)
    }
}

impl fmt::Display for VerifySummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "verify dim={} trials={} seed={}", self.dim, self.trials, self.seed)?;
        for p in &self.properties {
            let status = if p.failed == 0 { "PASS" } else { "FAIL" };
            writeln!(
                f,
                "{status} {:<28} {:>5} passed {:>5} failed  worst {:>12.4e} (threshold {:.1e})",
                p.name, p.passed, p.failed, p.worst, p.threshold
            )?;
        }
        write!(f, "{}", if self.all_passed() { "all properties pass" } else { "FAILURES" })
    }
}

type Probe = fn(usize, &mut TestRng) -> Result<f64>;

/// Each probe returns a measurement that passes when strictly below the threshold.
const PROPERTIES: [(&str, f64, Probe); 13] = [
    ("reverse_cptp", 1e-9, reverse_cptp),
    ("kraus_choi_routes", 1e-9, kraus_choi_routes),
    ("d_identity", 1e-9, d_identity),
    ("stationarity", 1e-8, stationarity),
    ("perfect_fidelity", 1e-9, perfect_fidelity),
    ("perfect_process", 1e-8, perfect_process),
    ("petz_not_above_optimal", 1e-10, petz_not_above_optimal),
    ("riccati_residual", 1e-10, riccati),
    ("riccati_identity", 1e-9, riccati_identity),
    ("fidelity_gradient", 1e-6, fidelity_gradient),
    ("concavity", 0.0, concavity),
    ("classical_recovery", 1e-10, classical_recovery),
    ("commuting_tau_independence", 1e-9, tau_independence),
];

fn state(m: crate::matcore::ComplexMatrix) -> Result<DensityMatrix> {
    DensityMatrix::new(m)
}

fn random_problem(d: usize, rng: &mut TestRng) -> Result<RetrodictionProblem> {
    let e = random_channel(d, d, rng);
    let g = state(random_density(d, rng))?;
    let t = state(random_density(d, rng))?;
    RetrodictionProblem::new(e, g, t)
}

fn reverse_cptp(d: usize, rng: &mut TestRng) -> Result<f64> {
    let sol = optimal_reverse(&random_problem(d, rng)?)?;
    let rep = is_cptp(&sol.reverse, 1e-9);
    Ok(rep.tp_residual.max(-rep.min_choi_eig))
}

fn kraus_choi_routes(d: usize, rng: &mut TestRng) -> Result<f64> {
    let p = random_problem(d, rng)?;
    let sol = optimal_reverse(&p)?;
    let closed = reverse_choi_closed_form(&p, &sol.d_operator)?;
    Ok(frobenius(&(sol.reverse.choi_input_first() - closed)))
}

fn d_identity(d: usize, rng: &mut TestRng) -> Result<f64> {
    let p = random_problem(d, rng)?;
    let dd = d_operator(&p)?;
    Ok(frobenius(&(dd.adjoint() * p.output_state() * &dd - identity(d))))
}

fn stationarity(d: usize, rng: &mut TestRng) -> Result<f64> {
    let p = random_problem(d, rng)?;
    let rep = stationarity_report(&p, &optimal_reverse(&p)?.reverse)?;
    Ok(rep.grad_residual.max(rep.tp_residual))
}

fn perfect_problem(d: usize, rng: &mut TestRng) -> Result<RetrodictionProblem> {
    let e = random_channel(d, d, rng);
    let g = state(random_density(d, rng))?;
    let out = state(hermitian_part(&e.apply(g.matrix())?))?;
    RetrodictionProblem::new(e, g, out)
}

fn perfect_fidelity(d: usize, rng: &mut TestRng) -> Result<f64> {
    Ok((optimal_reverse(&perfect_problem(d, rng)?)?.fidelity_value - 1.0).abs())
}

fn perfect_process(d: usize, rng: &mut TestRng) -> Result<f64> {
    let p = perfect_problem(d, rng)?;
    let q_rev = reverse_process_operator(&optimal_reverse(&p)?.reverse, p.reference())?;
    Ok(frobenius(&(q_rev.matrix - p.forward_process())))
}

fn petz_not_above_optimal(d: usize, rng: &mut TestRng) -> Result<f64> {
    let p = random_problem(d, rng)?;
    let petz = petz_map(p.forward(), p.prior())?;
    let q_petz = reverse_process_operator(&petz, p.reference())?;
    Ok(fidelity(p.forward_process(), &q_petz.matrix)? - optimal_reverse(&p)?.fidelity_value)
}

fn riccati(d: usize, rng: &mut TestRng) -> Result<f64> {
    let a = random_positive_definite(d, rng);
    let b = random_positive_definite(d, rng);
    let x = riccati_solve(&a, &b)?;
    Ok(riccati_residual(&x, &a, &b) / frobenius(&a).max(1.0))
}

fn riccati_identity(d: usize, rng: &mut TestRng) -> Result<f64> {
    let a = random_positive_definite(d, rng);
    let b = random_positive_definite(d, rng);
    verify_riccati_identity(&a, &b)
}

fn fidelity_gradient(d: usize, rng: &mut TestRng) -> Result<f64> {
    let rho = random_density(d, rng);
    let sigma = random_density(d, rng);
    // Unit directions keep the truncation error of the difference comparable
    // across dimensions.
    let unit = |m: crate::matcore::ComplexMatrix| m.scale(1.0 / frobenius(&m));
    let dr = unit(random_hermitian(d, rng));
    let ds = unit(random_hermitian(d, rng));
    let h = 1e-5;
    let analytic = fidelity_directional_derivative(&rho, &sigma, &dr, &ds)?;
    let fp = fidelity(&(&rho + dr.scale(h)), &(&sigma + ds.scale(h)))?;
    let fm = fidelity(&(&rho - dr.scale(h)), &(&sigma - ds.scale(h)))?;
    Ok(((fp - fm) / (2.0 * h) - analytic).abs() / analytic.abs().max(1.0))
}

fn concavity(d: usize, rng: &mut TestRng) -> Result<f64> {
    let rho = random_density(d, rng);
    let sigma = random_density(d, rng);
    let h = random_hermitian(d, rng);
    second_directional_difference(&rho, &sigma, &h, 1e-3)
}

fn random_stochastic(n_out: usize, n_in: usize, rng: &mut TestRng) -> Result<ClassicalChannel> {
    let mut probs = nalgebra::DMatrix::zeros(n_out, n_in);
    for x in 0..n_in {
        probs.set_column(x, &nalgebra::DVector::from_vec(random_pmf(n_out, rng)));
    }
    ClassicalChannel::new(probs)
}

fn classical_recovery(d: usize, rng: &mut TestRng) -> Result<f64> {
    let n_out = rng.random_range(2..=d);
    let phi = random_stochastic(n_out, d, rng)?;
    let gamma = random_pmf(d, rng);
    let tau = random_pmf(n_out, rng);
    let sol = optimal_reverse(&diagonal_embedding(&phi, &gamma, &tau)?)?;
    let got = diagonal_extraction(&sol.reverse)?;
    Ok((got.probs() - bayes_reverse(&phi, &gamma)?.probs()).abs().max())
}

fn tau_independence(d: usize, rng: &mut TestRng) -> Result<f64> {
    let phi = random_stochastic(d, d, rng)?;
    let e = classical_to_quantum_channel(&phi);
    let g = DensityMatrix::diagonal(&random_pmf(d, rng))?;
    let petz = petz_map(&e, &g)?;
    let mut worst: f64 = 0.0;
    let mut chois = Vec::new();
    for _ in 0..2 {
        let tau = DensityMatrix::diagonal(&random_pmf(d, rng))?;
        let sol = optimal_reverse(&RetrodictionProblem::new(e.clone(), g.clone(), tau)?)?;
        worst = worst.max(frobenius(&(sol.reverse.choi() - petz.choi())));
        chois.push(sol.reverse.choi().clone());
    }
    Ok(worst.max(frobenius(&(&chois[0] - &chois[1]))))
}

/// Runs every property on `trials` seeded instances of dimension `dim`.
pub fn run_verify(dim: usize, trials: usize, seed: u64) -> Result<VerifySummary> {
    run_verify_scaled(dim, trials, seed, 1.0)
}

/// As [`run_verify`], with every threshold multiplied by `tolerance_scale`.
/// A scale of zero is the self-test: every property must then fail.
pub fn run_verify_scaled(dim: usize, trials: usize, seed: u64, tolerance_scale: f64) -> Result<VerifySummary> {
    if !(2..=8).contains(&dim) {
        return Err(Error::invalid(format!("dimension must lie in 2..=8, got {dim}")));
    }
    let mut properties = Vec::new();
    for (k, (name, threshold, probe)) in PROPERTIES.iter().enumerate() {
        let threshold = threshold * tolerance_scale;
        let mut rng = seeded(seed.wrapping_add(k as u64 * 0x9e37_79b9));
        let mut tally = PropertyTally {
            name,
            passed: 0,
            failed: 0,
            worst: f64::NAN,
            threshold,
        };
        for _ in 0..trials {
            match probe(dim, &mut rng) {
                Ok(v) if v < threshold => {
                    tally.passed += 1;
                    tally.worst = tally.worst.max(v);
                }
                Ok(v) => {
                    tally.failed += 1;
                    tally.worst = tally.worst.max(v);
                }
                Err(e) => {
                    log::warn!("{name}: {e}");
                    tally.failed += 1;
                }
            }
        }
        properties.push(tally);
    }
    Ok(VerifySummary {
        dim,
        trials,
        seed,
        properties,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_passes() {
        let s = run_verify(2, 5, 42).unwrap();
        assert!(s.all_passed(), "{s}");
        assert!(s.properties.iter().all(|p| p.passed == 5));
    }

    #[test]
    fn corrupted_tolerance_fails() {
        let s = run_verify_scaled(2, 2, 42, 0.0).unwrap();
        assert!(!s.all_passed());
        assert!(s.to_string().contains("FAIL"));
    }

    #[test]
    fn dimension_range() {
        assert!(run_verify(1, 1, 0).is_err());
        assert!(run_verify(9, 1, 0).is_err());
    }
}
