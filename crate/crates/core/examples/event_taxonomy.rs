//! Recorded event classes of the two-sender protocol at 50% failure detection.

use secret_teleport::bsm::BsmNoise;
use secret_teleport::encoding::SecretSpec;
use secret_teleport::protocol::{enumerate_teleportation, recorded_event_distribution};

fn main() -> secret_teleport::Result<()> {
    let noise = BsmNoise::new(0.5, 0.0, 0.0)?;
    let branches = enumerate_teleportation(&SecretSpec::balanced(), 2, 2, &noise)?;
    for (event, (p, exact)) in recorded_event_distribution(&branches) {
        match exact {
            Some(r) => println!("{event:>3}: {r}"),
            None => println!("{event:>3}: {p:.6}"),
        }
    }
    Ok(())
}
