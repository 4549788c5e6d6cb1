//! Classical Bayes and Jeffrey updates, and the diagonal embedding that
//! carries them into the quantum setting.

use nalgebra::DMatrix;

use super::RetrodictionProblem;
use crate::channels::{DensityMatrix, QuantumChannel};
use crate::error::{Error, Result};
use crate::matcore::{c64, ComplexMatrix};

const STOCHASTIC_TOL: f64 = 1e-12;

fn check_pmf(p: &[f64], what: &str) -> Result<()> {
    if p.is_empty() {
        return Err(Error::invalid(format!("{what} is empty")));
    }
    if let Some(bad) = p.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(Error::invalid(format!("{what} has entry {bad}")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > STOCHASTIC_TOL {
        return Err(Error::invalid(format!("{what} sums to {total}")));
    }
    Ok(())
}

/// Column-stochastic table, `probs[(y, x)] = φ(y|x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalChannel {
    probs: DMatrix<f64>,
}

impl ClassicalChannel {
    pub fn new(probs: DMatrix<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::invalid("empty stochastic matrix"));
        }
        for (x, col) in probs.column_iter().enumerate() {
            if let Some(bad) = col.iter().find(|v| !v.is_finite() || **v < 0.0) {
                return Err(Error::invalid(format!("column {x} has entry {bad}")));
            }
            let total = col.sum();
            if (total - 1.0).abs() > STOCHASTIC_TOL {
                return Err(Error::invalid(format!("column {x} sums to {total}")));
            }
        }
        Ok(ClassicalChannel { probs })
    }

    /// Rows indexed by output `y`, columns by input `x`.
    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let n_out = rows.len();
        let n_in = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != n_in) {
            return Err(Error::invalid("ragged stochastic matrix"));
        }
        Self::new(DMatrix::from_fn(n_out, n_in, |y, x| rows[y][x]))
    }

    pub fn identity(n: usize) -> Self {
        ClassicalChannel {
            probs: DMatrix::identity(n, n),
        }
    }

    pub fn n_in(&self) -> usize {
        self.probs.ncols()
    }

    pub fn n_out(&self) -> usize {
        self.probs.nrows()
    }

    pub fn probs(&self) -> &DMatrix<f64> {
        &self.probs
    }

    /// `φ(y|x)`.
    pub fn prob(&self, y: usize, x: usize) -> f64 {
        self.probs[(y, x)]
    }

    /// Output pmf `Σ_x φ(y|x) p(x)`.
    pub fn apply(&self, p: &[f64]) -> Result<Vec<f64>> {
        if p.len() != self.n_in() {
            return Err(Error::invalid(format!(
                "pmf has {} entries, channel has {} inputs",
                p.len(),
                self.n_in()
            )));
        }
        Ok((0..self.n_out())
            .map(|y| (0..self.n_in()).map(|x| self.probs[(y, x)] * p[x]).sum())
            .collect())
    }
}

/// Joint pmf, `table[(x, y)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    table: DMatrix<f64>,
}

impl JointDistribution {
    pub fn new(table: DMatrix<f64>) -> Result<Self> {
        check_pmf(table.as_slice(), "joint distribution")?;
        Ok(JointDistribution { table })
    }

    /// `P_fwd(x, y) = φ(y|x) γ(x)`.
    pub fn forward(phi: &ClassicalChannel, gamma: &[f64]) -> Result<Self> {
        check_pmf(gamma, "prior")?;
        if gamma.len() != phi.n_in() {
            return Err(Error::invalid("prior length does not match channel inputs"));
        }
        Ok(JointDistribution {
            table: DMatrix::from_fn(phi.n_in(), phi.n_out(), |x, y| phi.prob(y, x) * gamma[x]),
        })
    }

    /// `P_rev(x, y) = φ̂(x|y) τ(y)`.
    pub fn reverse(phi_hat: &ClassicalChannel, tau: &[f64]) -> Result<Self> {
        check_pmf(tau, "evidence")?;
        if tau.len() != phi_hat.n_in() {
            return Err(Error::invalid("evidence length does not match reverse channel inputs"));
        }
        Ok(JointDistribution {
            table: DMatrix::from_fn(phi_hat.n_out(), phi_hat.n_in(), |x, y| phi_hat.prob(x, y) * tau[y]),
        })
    }

    pub fn table(&self) -> &DMatrix<f64> {
        &self.table
    }

    pub fn marginal_x(&self) -> Vec<f64> {
        self.table.row_iter().map(|r| r.sum()).collect()
    }

    pub fn marginal_y(&self) -> Vec<f64> {
        self.table.column_iter().map(|c| c.sum()).collect()
    }
}

/// Posterior `φ̂_γ(x|y0) = φ(y0|x) γ(x) / Σ_x' φ(y0|x') γ(x')`.
pub fn classical_bayes(phi: &ClassicalChannel, gamma: &[f64], y0: usize) -> Result<Vec<f64>> {
    check_pmf(gamma, "prior")?;
    if gamma.len() != phi.n_in() {
        return Err(Error::invalid("prior length does not match channel inputs"));
    }
    if y0 >= phi.n_out() {
        return Err(Error::invalid(format!("outcome {y0} out of range")));
    }
    let joint: Vec<f64> = (0..phi.n_in()).map(|x| phi.prob(y0, x) * gamma[x]).collect();
    let evidence: f64 = joint.iter().sum();
    if evidence <= 0.0 {
        return Err(Error::ZeroEvidence);
    }
    Ok(joint.into_iter().map(|v| v / evidence).collect())
}

/// Bayes inverse `φ̂_γ` as a channel from outcomes `y` to inputs `x`.
pub fn bayes_reverse(phi: &ClassicalChannel, gamma: &[f64]) -> Result<ClassicalChannel> {
    let mut probs = DMatrix::zeros(phi.n_in(), phi.n_out());
    for y in 0..phi.n_out() {
        let post = classical_bayes(phi, gamma, y)?;
        probs.set_column(y, &nalgebra::DVector::from_vec(post));
    }
    ClassicalChannel::new(probs)
}

/// `γ′(x) = Σ_y φ̂(x|y) τ(y)`.
pub fn classical_jeffrey(phi_hat: &ClassicalChannel, tau: &[f64]) -> Result<Vec<f64>> {
    check_pmf(tau, "evidence")?;
    phi_hat.apply(tau)
}

/// `ρ ↦ Σ_{y,x} φ(y|x) ⟨x|ρ|x⟩ |y⟩⟨y|`, with Kraus operators `√φ(y|x) |y⟩⟨x|`.
pub fn classical_to_quantum_channel(phi: &ClassicalChannel) -> QuantumChannel {
    let (n_out, n_in) = (phi.n_out(), phi.n_in());
    let mut kraus = Vec::new();
    for x in 0..n_in {
        for y in 0..n_out {
            let p = phi.prob(y, x);
            if p > 0.0 {
                let mut k = ComplexMatrix::zeros(n_out, n_in);
                k[(y, x)] = c64(p.sqrt(), 0.0);
                kraus.push(k);
            }
        }
    }
    QuantumChannel::from_kraus(n_in, n_out, kraus).expect("stochastic columns give a trace-preserving map")
}

fn smallest(p: &[f64]) -> f64 {
    p.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Diagonal quantum problem for `(φ, γ, τ)`. Every entry must be positive,
/// otherwise the forward process operator is singular.
pub fn diagonal_embedding(phi: &ClassicalChannel, gamma: &[f64], tau: &[f64]) -> Result<RetrodictionProblem> {
    check_pmf(gamma, "prior")?;
    check_pmf(tau, "evidence")?;
    if gamma.len() != phi.n_in() || tau.len() != phi.n_out() {
        return Err(Error::invalid("pmf lengths do not match the channel"));
    }
    for (what, p) in [("prior", gamma), ("evidence", tau), ("likelihood", phi.probs.as_slice())] {
        let min = smallest(p);
        if min <= 0.0 {
            return Err(Error::rank(what, min));
        }
    }
    RetrodictionProblem::new(
        classical_to_quantum_channel(phi),
        DensityMatrix::diagonal(gamma)?,
        DensityMatrix::diagonal(tau)?,
    )
}

/// Reads `φ̂(x|y) = ⟨x|R(|y⟩⟨y|)|x⟩`.
pub fn diagonal_extraction(reverse: &QuantumChannel) -> Result<ClassicalChannel> {
    let (n_in, n_out) = (reverse.d_in(), reverse.d_out());
    let mut probs = DMatrix::zeros(n_out, n_in);
    for y in 0..n_in {
        let mut e = ComplexMatrix::zeros(n_in, n_in);
        e[(y, y)] = c64(1.0, 0.0);
        let out = reverse.apply(&e)?;
        for x in 0..n_out {
            probs[(x, y)] = out[(x, x)].re;
        }
    }
    // Roundoff from the matrix functions is well above the stochastic tolerance.
    for (y, mut col) in probs.column_iter_mut().enumerate() {
        if col.iter().any(|v| *v < -1e-9) || (col.sum() - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!("column {y} of the extracted channel is not stochastic")));
        }
        col.apply(|v| *v = v.max(0.0));
        let total = col.sum();
        col /= total;
    }
    ClassicalChannel::new(probs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::retrodiction::{optimal_reverse, petz_map};
    use crate::random::{random_pmf, seeded};
    use rand::Rng;

    fn example() -> ClassicalChannel {
        ClassicalChannel::from_rows(&[&[0.9, 0.2], &[0.1, 0.8]]).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
    }

    fn random_stochastic<R: Rng>(n_out: usize, n_in: usize, rng: &mut R) -> ClassicalChannel {
        let mut probs = DMatrix::zeros(n_out, n_in);
        for x in 0..n_in {
            probs.set_column(x, &nalgebra::DVector::from_vec(random_pmf(n_out, rng)));
        }
        ClassicalChannel::new(probs).unwrap()
    }

    #[test]
    fn bayes_examples() {
        let post = classical_bayes(&example(), &[0.5, 0.5], 0).unwrap();
        assert!(close(&post, &[9.0 / 11.0, 2.0 / 11.0], 1e-15));
        let post = classical_bayes(&ClassicalChannel::identity(3), &[0.2, 0.3, 0.5], 1).unwrap();
        assert_eq!(post, vec![0.0, 1.0, 0.0]);
        let post = classical_bayes(&example(), &[0.0, 1.0], 0).unwrap();
        assert_eq!(post, vec![0.0, 1.0]);
    }

    #[test]
    fn zero_evidence() {
        let r = classical_bayes(&ClassicalChannel::identity(2), &[1.0, 0.0], 1);
        assert!(matches!(r, Err(Error::ZeroEvidence)));
    }

    #[test]
    fn rejects_non_stochastic() {
        assert!(ClassicalChannel::from_rows(&[&[0.9, 0.2], &[0.2, 0.8]]).is_err());
        assert!(ClassicalChannel::from_rows(&[&[1.1, 0.2], &[-0.1, 0.8]]).is_err());
        assert!(classical_bayes(&example(), &[0.5, 0.6], 0).is_err());
    }

    #[test]
    fn jeffrey_examples() {
        let hat = bayes_reverse(&example(), &[0.5, 0.5]).unwrap();
        let j = classical_jeffrey(&hat, &[1.0, 0.0]).unwrap();
        assert!(close(&j, &classical_bayes(&example(), &[0.5, 0.5], 0).unwrap(), 1e-15));

        let constant = ClassicalChannel::from_rows(&[&[0.3, 0.3], &[0.7, 0.7]]).unwrap();
        let a = classical_jeffrey(&constant, &[0.1, 0.9]).unwrap();
        let b = classical_jeffrey(&constant, &[0.6, 0.4]).unwrap();
        assert!(close(&a, &b, 1e-15));

        let mut rng = seeded(80);
        let hat = random_stochastic(3, 3, &mut rng);
        let tau = random_pmf(3, &mut rng);
        let got = classical_jeffrey(&hat, &tau).unwrap();
        let oracle = hat.probs() * nalgebra::DVector::from_vec(tau);
        assert!(close(&got, oracle.as_slice(), 1e-15));
    }

    #[test]
    fn joint_distributions() {
        let phi = example();
        let fwd = JointDistribution::forward(&phi, &[0.5, 0.5]).unwrap();
        assert!(close(&fwd.marginal_x(), &[0.5, 0.5], 1e-15));
        assert!(close(&fwd.marginal_y(), &[0.55, 0.45], 1e-15));
        // The Bayes inverse fed the predicted outcome pmf reproduces P_fwd.
        let hat = bayes_reverse(&phi, &[0.5, 0.5]).unwrap();
        let rev = JointDistribution::reverse(&hat, &[0.55, 0.45]).unwrap();
        assert!((fwd.table() - rev.table()).abs().max() < 1e-15);
        assert!(JointDistribution::new(DMatrix::from_element(2, 2, 0.3)).is_err());
    }

    #[test]
    fn embedding_round_trip() {
        let mut rng = seeded(81);
        for _ in 0..20 {
            let (n_in, n_out) = (rng.random_range(2..=3), rng.random_range(2..=3));
            let phi = random_stochastic(n_out, n_in, &mut rng);
            let gamma = random_pmf(n_in, &mut rng);
            let tau = random_pmf(n_out, &mut rng);
            let p = diagonal_embedding(&phi, &gamma, &tau).unwrap();
            let sol = optimal_reverse(&p).unwrap();
            let got = diagonal_extraction(&sol.reverse).unwrap();
            let expected = bayes_reverse(&phi, &gamma).unwrap();
            assert!((got.probs() - expected.probs()).abs().max() < 1e-10);
        }
    }

    #[test]
    fn embedding_examples() {
        // Doubly stochastic φ with uniform prior: φ̂ = φᵀ.
        let phi = ClassicalChannel::from_rows(&[&[0.7, 0.3], &[0.3, 0.7]]).unwrap();
        let p = diagonal_embedding(&phi, &[0.5, 0.5], &[0.5, 0.5]).unwrap();
        let got = diagonal_extraction(&optimal_reverse(&p).unwrap().reverse).unwrap();
        assert!((got.probs() - phi.probs().transpose()).abs().max() < 1e-12);

        let p = diagonal_embedding(&example(), &[0.5, 0.5], &[0.5, 0.5]).unwrap();
        let got = diagonal_extraction(&optimal_reverse(&p).unwrap().reverse).unwrap();
        assert!(close(&[got.prob(0, 0), got.prob(1, 0)], &[9.0 / 11.0, 2.0 / 11.0], 1e-10));
    }

    #[test]
    fn identity_likelihood() {
        let id = ClassicalChannel::identity(3);
        assert!(matches!(
            diagonal_embedding(&id, &[0.2, 0.3, 0.5], &[0.2, 0.3, 0.5]),
            Err(Error::RankDeficient { .. })
        ));
        let petz = petz_map(
            &classical_to_quantum_channel(&id),
            &DensityMatrix::diagonal(&[0.2, 0.3, 0.5]).unwrap(),
        )
        .unwrap();
        assert_eq!(diagonal_extraction(&petz).unwrap().probs().clone(), DMatrix::identity(3, 3));
    }

    #[test]
    fn quantum_channel_acts_classically() {
        let phi = example();
        let e = classical_to_quantum_channel(&phi);
        let out = e.apply(DensityMatrix::diagonal(&[0.3, 0.7]).unwrap().matrix()).unwrap();
        let expected = phi.apply(&[0.3, 0.7]).unwrap();
        for y in 0..2 {
            assert!((out[(y, y)].re - expected[y]).abs() < 1e-15);
        }
        assert!(out[(0, 1)].norm() < 1e-15);
    }
}
