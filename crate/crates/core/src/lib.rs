//! Simulation of teleporting a quantum secret shared by several senders to
//! several receivers over GHZ channels, using distributed Bell-state
//! measurements, plus the loss-tolerant parity-encoded variant with a
//! concatenated Bell measurement.
//!
//! * [`qstate`]: dense pure states, density matrices, measurement, partial trace.
//! * [`encoding`]: GHZ and parity codes, Bell labels and their decompositions.
//! * [`bsm`]: linear-optics Bell analyzers with failure, loss and flip noise.
//! * [`protocol`]: the GHZ teleportation protocol, event taxonomy and leakage audit.
//! * [`cbm`]: parity-encoded teleportation with the concatenated Bell measurement.
//! * [`harness`]: configuration, sweeps, the fidelity pipeline and the CLI.

pub mod bsm;
pub mod cbm;
pub mod encoding;
pub mod error;
pub mod harness;
pub mod protocol;
pub mod qstate;
pub mod rational;
pub mod rng;

pub use error::{Error, Result};
