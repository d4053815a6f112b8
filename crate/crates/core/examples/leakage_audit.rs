//! What a single receiver learns after sender 1 announces its outcome.

use num_complex::Complex64;
use secret_teleport::bsm::BellOutcome;
use secret_teleport::encoding::{BellLabel, SecretSpec, Sign, Symbol};
use secret_teleport::protocol::{sub_party_reduced_state, PartyId, RunContext};

fn main() -> secret_teleport::Result<()> {
    let secret = SecretSpec::new(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8))?;
    let phi_minus = BellOutcome::Detected(BellLabel::photon(Symbol::Phi, Sign::Minus));
    let ctx = RunContext::new(secret, 2, 2).announce(1, phi_minus);
    for parties in [
        vec![PartyId::receiver(1)],
        vec![PartyId::sender(2), PartyId::receiver(2)],
    ] {
        let rho = sub_party_reduced_state(&ctx, &parties)?;
        let names: Vec<String> = parties.iter().map(|p| p.to_string()).collect();
        println!(
            "{}: max coherence {:.2e}, diagonal {:?}",
            names.join("+"),
            rho.max_coherence(),
            rho.diagonal()
                .iter()
                .map(|d| format!("{d:.3}"))
                .collect::<Vec<_>>()
        );
    }
    Ok(())
}
