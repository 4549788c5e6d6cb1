//! Quantum states and channels.
//!
//! Choi operators are stored uniformly in `(output ⊗ input)` order:
//! `C = Σ_ij E(|i⟩⟨j|) ⊗ |i⟩⟨j|`. The input-first ordering used for the
//! reverse process is produced with [`QuantumChannel::choi_input_first`].

mod channel;
mod process;
mod qchan;
mod state;

pub use channel::{
    choi_to_kraus, cptp_report, is_cptp, kraus_to_choi, partial_swap_channel, CptpReport,
    QuantumChannel, TP_TOL,
};
pub use process::{
    canonical_purification, forward_process_operator, reverse_process_from_choi,
    reverse_process_operator, star, star_via_purification, ProcessOperator, ProcessRole,
    PurificationVector,
};
pub use qchan::{format_qchan, parse_qchan, read_qchan_file, write_qchan_file, QchanForm};
pub use state::DensityMatrix;
