//! Monte-Carlo success rate of the parity protocol against photon loss, as CSV.

use secret_teleport::bsm::BsmNoise;
use secret_teleport::cbm::{estimate_success, Experiment, FtConfig};
use secret_teleport::encoding::{EncodingParams, SecretSpec};
use secret_teleport::harness::{write_csv, SweepRow};

fn main() -> secret_teleport::Result<()> {
    let mut rows = Vec::new();
    for n in 1..=3 {
        for eta in [0.0, 0.05, 0.1, 0.2] {
            let cfg = FtConfig::new(
                SecretSpec::balanced(),
                EncodingParams::parity_default(n, 3)?,
                2,
            )
            .with_noise(BsmNoise::new(1.0, eta, 0.0)?);
            let est = estimate_success(&Experiment::Ft(cfg.clone()), 20_000, 11)?;
            rows.push(SweepRow::new(&cfg, &est));
        }
    }
    write_csv(&rows, std::io::stdout())
}
