//! Concatenated Bell measurement for parity-encoded secrets.
//!
//! Level 0 is the photon-pair analyzer, level 1 combines the `p` pairs of a
//! block, level 2 combines the `n` blocks into a logical Bell outcome.

mod adversary;
mod estimate;
mod ft;
mod level1;
mod level2;

pub use adversary::{AdversaryModel, Strategy};
pub use estimate::{
    estimate_success, ft_transcripts, ghz_transcripts, BlockEntry, Estimate, Experiment,
    FtTranscript,
};
pub use ft::{
    enumerate_blocks, enumerate_ft, label_level_patterns, logical_correction, receiver_of_block,
    run_ft_teleportation, true_logical_label, FtClass, FtConfig, FtDistribution, FtRun, SimMode,
    CORRECT_FIDELITY,
};
pub use level1::{
    bsm_level1, classify_block, enumerate_block, majority_vote_sign, run_block, Level1Policy,
    Level1Record, Level1Result, PolicyPhase,
};
pub use level2::{bsm_level2, logical_symbol_correct, SymbolCorrected};
