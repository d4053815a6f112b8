//! Exact success probability of the distributed Bell measurement, 1 - 2^-n.

use secret_teleport::bsm::BsmNoise;
use secret_teleport::encoding::SecretSpec;
use secret_teleport::protocol::{enumerate_teleportation, success_probability};

fn main() -> secret_teleport::Result<()> {
    let secret = SecretSpec::balanced();
    for n in 1..=6 {
        let branches = enumerate_teleportation(&secret, n, 1, &BsmNoise::noiseless())?;
        let (p, exact) = success_probability(&branches);
        let exact = exact.map(|r| r.to_string()).unwrap_or_else(|| "?".into());
        println!("n={n}: {exact} ({p:.6})");
    }
    Ok(())
}
