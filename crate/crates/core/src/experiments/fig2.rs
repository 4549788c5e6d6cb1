//! Partial-swap thermalization sweep over the prior `γ = diag(1 − p, p)`.

use std::path::Path;

use crate::channels::{partial_swap_channel, reverse_process_operator, DensityMatrix};
use crate::error::{Error, Result};
use crate::fidelity::fidelity;
use crate::matcore::{from_real_rows, ComplexMatrix};
use crate::optimizer::{maximize_fidelity, OptimizerConfig};
use crate::retrodiction::{optimal_reverse, petz_map, RetrodictionProblem};

/// Prior weight at which `E(γ) = 1/2` for the default `θ` and `ξ`.
pub const P_STAR: f64 = 1.85 - 0.9 * std::f64::consts::SQRT_2;

pub const FIG2_HEADER: [&str; 5] = ["p", "f_petz", "f_opt", "f_numeric", "commutator_norm"];

#[derive(Debug, Clone, PartialEq)]
pub struct Fig2Config {
    pub theta: f64,
    pub xi0: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub steps: usize,
    pub include_numeric: bool,
    pub seed: u64,
    /// Used for the `f_numeric` column; its seed is replaced by `seed`.
    pub optimizer: OptimizerConfig,
}

impl Default for Fig2Config {
    fn default() -> Self {
        Fig2Config {
            theta: std::f64::consts::PI / 8.0,
            xi0: 0.95,
            p_min: 0.001,
            p_max: 0.999,
            steps: 200,
            include_numeric: false,
            seed: 0,
            optimizer: OptimizerConfig::default(),
        }
    }
}

impl Fig2Config {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.p_min && self.p_min < self.p_max && self.p_max < 1.0) {
            return Err(Error::invalid(format!(
                "need 0 < p_min < p_max < 1, got [{}, {}]",
                self.p_min, self.p_max
            )));
        }
        if self.steps < 2 {
            return Err(Error::invalid("steps must be at least 2"));
        }
        if !(self.xi0 > 0.0 && self.xi0 < 1.0) {
            return Err(Error::invalid(format!("xi0 must lie in (0, 1), got {}", self.xi0)));
        }
        if !self.theta.is_finite() {
            return Err(Error::invalid("theta must be finite"));
        }
        if self.include_numeric {
            self.optimizer.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub p: f64,
    pub f_petz: f64,
    pub f_opt: f64,
    pub f_numeric: Option<f64>,
    /// `‖[τ, E(γ)]‖_F`.
    pub commutator_norm: f64,
}

pub fn hadamard() -> ComplexMatrix {
    from_real_rows(&[&[1.0, 1.0], &[1.0, -1.0]]).scale(std::f64::consts::FRAC_1_SQRT_2)
}

/// `E = partial swap(θ, ξ)`, `γ = diag(1 − p, p)`, `τ = HξH`.
pub fn fig2_problem(config: &Fig2Config, p: f64) -> Result<RetrodictionProblem> {
    let xi = DensityMatrix::diagonal(&[config.xi0, 1.0 - config.xi0])?;
    let forward = partial_swap_channel(config.theta, &xi)?;
    let h = hadamard();
    let tau = DensityMatrix::new(&h * xi.matrix() * &h)?;
    let gamma = DensityMatrix::diagonal(&[1.0 - p, p])?;
    RetrodictionProblem::new(forward, gamma, tau)
}

/// Uniform grid over `[p_min, p_max]` with [`P_STAR`] inserted when in range.
pub fn fig2_grid(config: &Fig2Config) -> Vec<f64> {
    let n = config.steps;
    let width = config.p_max - config.p_min;
    let mut grid: Vec<f64> = (0..n)
        .map(|k| config.p_min + width * k as f64 / (n - 1) as f64)
        .collect();
    if config.p_min <= P_STAR && P_STAR <= config.p_max && !grid.contains(&P_STAR) {
        grid.push(P_STAR);
        grid.sort_by(f64::total_cmp);
    }
    grid
}

pub fn fig2_row(config: &Fig2Config, p: f64) -> Result<SweepRow> {
    let problem = fig2_problem(config, p)?;
    let solution = optimal_reverse(&problem)?;
    let petz = petz_map(problem.forward(), problem.prior())?;
    let q_petz = reverse_process_operator(&petz, problem.reference())?;
    let f_petz = fidelity(problem.forward_process(), &q_petz.matrix)?;
    let f_numeric = if config.include_numeric {
        let opt = OptimizerConfig {
            seed: config.seed,
            ..config.optimizer.clone()
        };
        Some(maximize_fidelity(&problem, &opt)?.best_fidelity)
    } else {
        None
    };
    Ok(SweepRow {
        p,
        f_petz,
        f_opt: solution.fidelity_value,
        f_numeric,
        commutator_norm: problem.commutator_norm(),
    })
}

/// Evaluates every grid point in ascending `p`. Rank-deficient points are
/// skipped with a warning.
pub fn run_fig2(config: &Fig2Config) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let mut rows = Vec::new();
    for p in fig2_grid(config) {
        match fig2_row(config, p) {
            Ok(row) => rows.push(row),
            Err(Error::RankDeficient { what, min_eig }) => {
                log::warn!("skipping p = {p}: {what} is rank deficient (min eigenvalue {min_eig:e})");
            }
            Err(e) => return Err(e),
        }
    }
    Ok(rows)
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_rows<W: std::io::Write>(rows: &[SweepRow], sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(FIG2_HEADER)?;
    for r in rows {
        w.write_record([
            num(r.p),
            num(r.f_petz),
            num(r.f_opt),
            r.f_numeric.map(num).unwrap_or_default(),
            num(r.commutator_norm),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn format_fig2_csv(rows: &[SweepRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_rows(rows, &mut buf)?;
    Ok(String::from_utf8(buf).expect("CSV output is ASCII"))
}

pub fn write_fig2_csv(rows: &[SweepRow], path: impl AsRef<Path>) -> Result<()> {
    write_rows(rows, std::fs::File::create(path)?)
}
