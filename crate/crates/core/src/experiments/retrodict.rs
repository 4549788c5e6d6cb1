use std::fmt;
use std::path::Path;

use crate::channels::{
    is_cptp, read_qchan_file, reverse_process_operator, write_qchan_file, DensityMatrix, QchanForm,
    QuantumChannel,
};
use crate::error::Result;
use crate::fidelity::{fidelity, stationarity_report};
use crate::matcore::read_qmat_file;
use crate::retrodiction::{optimal_reverse, petz_map, RetrodictionProblem, ReverseSolution};

#[derive(Debug, Clone, PartialEq)]
pub struct RetrodictReport {
    pub d_in: usize,
    pub d_out: usize,
    pub fidelity: f64,
    pub petz_fidelity: f64,
    pub commuting: bool,
    pub commutator_norm: f64,
    pub min_choi_eig: f64,
    pub tp_residual: f64,
    pub grad_residual: f64,
    pub stationarity_tp_residual: f64,
}

impl fmt::Display for RetrodictReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "forward channel: {} -> {}", self.d_in, self.d_out)?;
        writeln!(f, "fidelity: {:.16e}", self.fidelity)?;
        writeln!(f, "petz fidelity: {:.16e}", self.petz_fidelity)?;
        writeln!(f, "commuting: {}", self.commuting)?;
        writeln!(f, "commutator norm: {:.6e}", self.commutator_norm)?;
        writeln!(f, "min choi eigenvalue: {:.6e}", self.min_choi_eig)?;
        writeln!(f, "tp residual: {:.6e}", self.tp_residual)?;
        writeln!(f, "stationarity grad residual: {:.6e}", self.grad_residual)?;
        writeln!(f, "stationarity tp residual: {:.6e}", self.stationarity_tp_residual)
    }
}

/// Solves one instance and collects its diagnostics.
pub fn retrodict(
    forward: QuantumChannel,
    gamma: DensityMatrix,
    tau: DensityMatrix,
) -> Result<(ReverseSolution, RetrodictReport)> {
    let problem = RetrodictionProblem::new(forward, gamma, tau)?;
    let solution = optimal_reverse(&problem)?;
    let petz = petz_map(problem.forward(), problem.prior())?;
    let q_petz = reverse_process_operator(&petz, problem.reference())?;
    let cptp = is_cptp(&solution.reverse, 1e-9);
    let stationarity = stationarity_report(&problem, &solution.reverse)?;
    let report = RetrodictReport {
        d_in: problem.forward().d_in(),
        d_out: problem.forward().d_out(),
        fidelity: solution.fidelity_value,
        petz_fidelity: fidelity(problem.forward_process(), &q_petz.matrix)?,
        commuting: solution.commuting,
        commutator_norm: problem.commutator_norm(),
        min_choi_eig: cptp.min_choi_eig,
        tp_residual: cptp.tp_residual,
        grad_residual: stationarity.grad_residual,
        stationarity_tp_residual: stationarity.tp_residual,
    };
    Ok((solution, report))
}

/// Reads a QCHAN channel and two QMAT states, writes the reverse channel in
/// Kraus form to `out_path` and, if given, the text report to `report_path`.
pub fn run_retrodict(
    channel_path: impl AsRef<Path>,
    gamma_path: impl AsRef<Path>,
    tau_path: impl AsRef<Path>,
    out_path: impl AsRef<Path>,
    report_path: Option<&Path>,
) -> Result<RetrodictReport> {
    let forward = read_qchan_file(channel_path)?;
    let gamma = DensityMatrix::new(read_qmat_file(gamma_path)?)?;
    let tau = DensityMatrix::new(read_qmat_file(tau_path)?)?;
    let (solution, report) = retrodict(forward, gamma, tau)?;
    write_qchan_file(out_path, &solution.reverse, QchanForm::Kraus)?;
    if let Some(path) = report_path {
        std::fs::write(path, report.to_string())?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{fig2_problem, fig2_row, Fig2Config};

    #[test]
    fn matches_fig2_row() {
        let config = Fig2Config::default();
        let problem = fig2_problem(&config, 0.3).unwrap();
        let (_, report) = retrodict(
            problem.forward().clone(),
            problem.prior().clone(),
            problem.reference().clone(),
        )
        .unwrap();
        let row = fig2_row(&config, 0.3).unwrap();
        assert!((report.fidelity - row.f_opt).abs() < 1e-12);
        assert!((report.petz_fidelity - row.f_petz).abs() < 1e-12);
        assert!(report.grad_residual < 1e-8 && report.stationarity_tp_residual < 1e-8);
        assert!(!report.commuting);
    }

    #[test]
    fn report_text() {
        let config = Fig2Config::default();
        let problem = fig2_problem(&config, 0.3).unwrap();
        let (_, report) = retrodict(
            problem.forward().clone(),
            problem.prior().clone(),
            problem.reference().clone(),
        )
        .unwrap();
        let text = report.to_string();
        assert!(text.starts_with("forward channel: 2 -> 2\nfidelity: "));
        assert!(text.contains("commuting: false"));
    }
}
