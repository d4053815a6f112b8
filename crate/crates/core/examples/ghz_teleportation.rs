//! Samples the GHZ protocol for a random secret and prints a few transcripts.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use secret_teleport::bsm::BsmNoise;
use secret_teleport::encoding::SecretSpec;
use secret_teleport::protocol::{run_teleportation, Transcript};

fn main() -> secret_teleport::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let secret = SecretSpec::random(&mut rng);
    let noise = BsmNoise::noiseless();
    println!("secret: alpha={:.4} beta={:.4}", secret.alpha, secret.beta);
    for trial in 0..5 {
        let run = run_teleportation(&secret, 3, 2, &noise, &mut rng)?;
        let t = Transcript::new(2024, trial, &secret, 2, &noise, &run);
        println!("{}", t.to_json_line());
    }
    Ok(())
}
