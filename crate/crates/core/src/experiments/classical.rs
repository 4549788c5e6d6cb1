//! Classical Bayes/Jeffrey demo from CSV tables.
//!
//! The likelihood CSV has one row per outcome `y` and one column per input
//! `x`; prior and evidence are single rows or single columns. No headers.

use std::path::Path;

use nalgebra::DMatrix;

use crate::channels::DensityMatrix;
use crate::error::{Error, Result};
use crate::retrodiction::{
    bayes_reverse, classical_jeffrey, classical_to_quantum_channel, diagonal_embedding, diagonal_extraction,
    jeffrey_update, optimal_reverse, petz_map, ClassicalChannel,
};

/// Maximum disagreement tolerated between the classical and quantum routes.
pub const CLASSICAL_AGREEMENT_TOL: f64 = 1e-10;

fn read_table(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let row = record
            .iter()
            .map(|field| {
                field.parse::<f64>().map_err(|_| Error::ParseError {
                    line,
                    message: format!("`{field}` is not a number"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::invalid(format!("{} is empty", path.display())));
    }
    Ok(rows)
}

pub fn read_stochastic_csv(path: impl AsRef<Path>) -> Result<ClassicalChannel> {
    let rows = read_table(path.as_ref())?;
    let refs: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
    ClassicalChannel::from_rows(&refs)
}

pub fn read_pmf_csv(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let rows = read_table(path.as_ref())?;
    if rows.len() == 1 {
        Ok(rows.into_iter().next().unwrap_or_default())
    } else if rows.iter().all(|r| r.len() == 1) {
        Ok(rows.into_iter().map(|r| r[0]).collect())
    } else {
        Err(Error::invalid(format!("{} is not a single row or column", path.as_ref().display())))
    }
}

#[derive(Debug, Clone)]
pub struct ClassicalReport {
    /// `φ̂_γ(x|y)`; column `y` is the Bayes posterior for outcome `y`.
    pub posterior: ClassicalChannel,
    pub jeffrey: Vec<f64>,
    /// Largest difference between the classical formulas and their quantum
    /// diagonal counterparts.
    pub discrepancy: f64,
}

impl ClassicalReport {
    pub fn agrees(&self) -> bool {
        self.discrepancy < CLASSICAL_AGREEMENT_TOL
    }

    /// Columns `x, posterior_y0, …, jeffrey`.
    pub fn to_csv(&self) -> Result<String> {
        let hat = self.posterior.probs();
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["x".to_string()];
        header.extend((0..hat.ncols()).map(|y| format!("posterior_y{y}")));
        header.push("jeffrey".into());
        w.write_record(&header)?;
        for x in 0..hat.nrows() {
            let mut row = vec![x.to_string()];
            row.extend((0..hat.ncols()).map(|y| format!("{:.16e}", hat[(x, y)])));
            row.push(format!("{:.16e}", self.jeffrey[x]));
            w.write_record(&row)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("CSV output is ASCII"))
    }
}

fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).abs().max()
}

/// Posterior table and Jeffrey update, cross-checked against the Petz map of
/// the embedded channel and, when every entry is positive, against the
/// optimal reverse channel of the diagonal embedding.
pub fn compute_classical(phi: &ClassicalChannel, gamma: &[f64], tau: &[f64]) -> Result<ClassicalReport> {
    if tau.len() != phi.n_out() {
        return Err(Error::invalid(format!(
            "evidence has {} entries, likelihood has {} outcomes",
            tau.len(),
            phi.n_out()
        )));
    }
    let posterior = bayes_reverse(phi, gamma)?;
    let jeffrey = classical_jeffrey(&posterior, tau)?;

    let petz = petz_map(&classical_to_quantum_channel(phi), &DensityMatrix::diagonal(gamma)?)?;
    let mut discrepancy = max_abs_diff(diagonal_extraction(&petz)?.probs(), posterior.probs());

    let positive = gamma.iter().chain(tau).chain(phi.probs().iter()).all(|&v| v > 0.0);
    if positive {
        let problem = diagonal_embedding(phi, gamma, tau)?;
        let solution = optimal_reverse(&problem)?;
        let extracted = diagonal_extraction(&solution.reverse)?;
        discrepancy = discrepancy.max(max_abs_diff(extracted.probs(), posterior.probs()));
        let updated = jeffrey_update(&solution, problem.reference())?;
        for (x, j) in jeffrey.iter().enumerate() {
            discrepancy = discrepancy.max((updated.matrix()[(x, x)].re - j).abs());
        }
    } else {
        log::info!("zero entries present: checking the Petz route only");
    }
    Ok(ClassicalReport {
        posterior,
        jeffrey,
        discrepancy,
    })
}

pub fn run_classical(
    likelihood_csv: impl AsRef<Path>,
    prior_csv: impl AsRef<Path>,
    evidence_csv: impl AsRef<Path>,
) -> Result<ClassicalReport> {
    let phi = read_stochastic_csv(likelihood_csv)?;
    let gamma = read_pmf_csv(prior_csv)?;
    let tau = read_pmf_csv(evidence_csv)?;
    compute_classical(&phi, &gamma, &tau)
}
