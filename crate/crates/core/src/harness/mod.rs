//! Command-line driver, configuration, the synthetic fidelity pipeline and
//! report writers.

mod cli;
mod config;
mod pipeline;
mod report;

pub use cli::{execute, run_cli, Cli, Command};
pub use config::{CommonArgs, ExperimentKind, RunConfig, DEFAULT_CHANNEL_FIDELITY, DEFAULT_TRIALS};
pub use pipeline::{
    expected_output_under_ideal_bsm, experiment_inputs, ghz_code_space, synthetic_channel_fidelity,
    SyntheticNoisyState,
};
pub use report::{write_csv, write_json_lines, SweepRow};
