//! Expands a logical parity-code Bell state into photon-pair Bell labels.

use secret_teleport::encoding::{
    decompose_logical_bell, logical_bell_state, BellLabel, EncodingParams, Level,
};

fn main() -> secret_teleport::Result<()> {
    let enc = EncodingParams::parity_default(2, 2)?;
    for label in BellLabel::all(Level::Logical) {
        let d = decompose_logical_bell(label, &enc)?;
        let f = d.reassemble()?.overlap(&logical_bell_state(label, &enc)?)?;
        println!(
            "{label}: {} terms, reassembly fidelity {f:.12}",
            d.terms.len()
        );
        for t in d.terms.iter().take(3) {
            let pairs: Vec<String> = t.pair_labels.iter().map(|l| l.to_string()).collect();
            println!("  {} x [{}]", t.weight, pairs.join(" "));
        }
    }
    Ok(())
}
