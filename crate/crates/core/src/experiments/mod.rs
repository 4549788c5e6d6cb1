//! Drivers behind the command-line tool.

mod classical;
mod fig2;
mod retrodict;
mod verify;

pub use classical::{compute_classical, read_pmf_csv, read_stochastic_csv, run_classical, ClassicalReport, CLASSICAL_AGREEMENT_TOL};
pub use fig2::{
    fig2_grid, fig2_problem, fig2_row, format_fig2_csv, hadamard, run_fig2, write_fig2_csv, Fig2Config, SweepRow,
    FIG2_HEADER, P_STAR,
};
pub use retrodict::{retrodict, run_retrodict, RetrodictReport};
pub use verify::{run_verify, run_verify_scaled, PropertyTally, VerifySummary};
