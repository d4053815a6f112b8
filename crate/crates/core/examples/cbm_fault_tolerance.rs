//! Parity-encoded teleportation with a dishonest sender flipping its symbol.

use secret_teleport::bsm::BsmNoise;
use secret_teleport::cbm::{enumerate_ft, AdversaryModel, FtClass, FtConfig, SimMode, Strategy};
use secret_teleport::encoding::{EncodingParams, SecretSpec};

fn main() -> secret_teleport::Result<()> {
    let enc = EncodingParams::parity_default(3, 2)?;
    for adversary in [
        AdversaryModel::honest(),
        AdversaryModel::new(vec![2], Strategy::FlipSymbol),
        AdversaryModel::new(vec![2], Strategy::FlipSign),
    ] {
        let cfg = FtConfig::new(SecretSpec::balanced(), enc, 3)
            .with_noise(BsmNoise::new(1.0, 0.05, 0.0)?)
            .with_adversary(adversary.clone())
            .with_mode(SimMode::LabelLevel);
        let d = enumerate_ft(&cfg)?;
        print!("{adversary:>16}:");
        for c in FtClass::ALL {
            print!(" {c:?}={:.4}", d.probability(c));
        }
        println!();
    }
    Ok(())
}
