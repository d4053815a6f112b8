use secret_teleport::bsm::{BellOutcome, BsmNoise, BsmVariant};
use secret_teleport::cbm::{
    bsm_level1, bsm_level2, classify_block, enumerate_ft, estimate_success, AdversaryModel,
    Experiment, FtClass, FtConfig, Level1Policy, Level1Result, SimMode, Strategy,
};
use secret_teleport::encoding::{
    decompose_logical_bell, BellLabel, EncodingParams, Level, SecretSpec, Sign, Symbol,
};
use secret_teleport::protocol::LogicalBellOutcome;
use secret_teleport::rng::trial_rng;

#[test]
fn noiseless_blocks_never_report_a_wrong_label() {
    for p in 1..=3 {
        for q in 0..p {
            let enc = EncodingParams::parity(1, p, q).unwrap();
            let policy = Level1Policy::new(q);
            for label in BellLabel::all(Level::Logical) {
                for term in decompose_logical_bell(label, &enc).unwrap().terms {
                    for t in 0..20 {
                        let rec = bsm_level1(
                            &term.pair_labels,
                            &policy,
                            &BsmNoise::noiseless(),
                            &mut trial_rng(t, 0),
                        )
                        .unwrap();
                        match rec.result {
                            Level1Result::Success { symbol, sign } => {
                                assert_eq!((symbol, sign), (label.symbol, label.sign));
                            }
                            Level1Result::SignOnly(sign) => assert_eq!(sign, label.sign),
                            Level1Result::Failure => panic!("noiseless block failed"),
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn one_surviving_photon_per_block_still_fixes_the_sign() {
    let lost = (BsmVariant::Bplus, BellOutcome::LossDetected);
    let minus_report = (BsmVariant::Bplus, BellOutcome::FailureDetected);
    // sender 1: two pairs lost, one clean B+ report
    let b1 = classify_block(vec![
        (BsmVariant::Bplus, BellOutcome::LossDetected),
        lost,
        minus_report,
    ]);
    assert_eq!(b1.result, Level1Result::SignOnly(Sign::Minus));
    // sender 2: loss-free
    let d = |symbol, sign| BellOutcome::Detected(BellLabel::photon(symbol, sign));
    let b2 = classify_block(vec![
        (BsmVariant::Bpsi, d(Symbol::Psi, Sign::Plus)),
        (BsmVariant::Bplus, d(Symbol::Phi, Sign::Plus)),
        (BsmVariant::Bplus, d(Symbol::Psi, Sign::Plus)),
    ]);
    assert_eq!(
        b2.result,
        Level1Result::Success {
            symbol: Symbol::Phi,
            sign: Sign::Plus
        }
    );
    assert_eq!(
        bsm_level2(&[b1.result, b2.result]).unwrap(),
        LogicalBellOutcome::Identified {
            symbol: Symbol::Phi,
            sign: Sign::Minus
        }
    );
}

#[test]
fn exact_noiseless_runs_have_unit_fidelity() {
    let enc = EncodingParams::parity_default(2, 2).unwrap();
    let cfg = FtConfig::new(SecretSpec::balanced(), enc, 2).with_mode(SimMode::Exact);
    let d = enumerate_ft(&cfg).unwrap();
    assert!((d.min_fidelity.unwrap() - 1.0).abs() < 1e-10);
    assert!(d.probability(FtClass::Misidentified) < 1e-14);
}

#[test]
fn report_failure_coalition_blocks_everything() {
    let enc = EncodingParams::parity_default(3, 2).unwrap();
    let cfg = FtConfig::new(SecretSpec::balanced(), enc, 3)
        .with_adversary(AdversaryModel::new(vec![1], Strategy::ReportFailure));
    let d = enumerate_ft(&cfg).unwrap();
    assert!((d.probability(FtClass::Failure) - 1.0).abs() < 1e-12);
}

#[test]
fn success_is_monotone_in_loss_and_senders() {
    let trials = 100_000;
    let etas = [0.0, 0.05, 0.1];
    let mut grid = [[(0.0, 0.0); 3]; 3];
    for (i, n) in (1..=3).enumerate() {
        for (j, eta) in etas.iter().enumerate() {
            let cfg = FtConfig::new(
                SecretSpec::balanced(),
                EncodingParams::parity_default(n, 3).unwrap(),
                2,
            )
            .with_noise(BsmNoise::new(1.0, *eta, 0.0).unwrap());
            let est = estimate_success(&Experiment::Ft(cfg), trials, 500).unwrap();
            grid[i][j] = (est.success_rate(), est.stderr());
        }
    }
    let slack = |a: (f64, f64), b: (f64, f64)| 3.0 * (a.1 * a.1 + b.1 * b.1).sqrt();
    for i in 0..3 {
        for j in 0..3 {
            if j + 1 < 3 {
                let (a, b) = (grid[i][j], grid[i][j + 1]);
                assert!(
                    b.0 <= a.0 + slack(a, b),
                    "eta step at n={}: {grid:?}",
                    i + 1
                );
            }
            if i + 1 < 3 {
                let (a, b) = (grid[i][j], grid[i + 1][j]);
                assert!(
                    b.0 + slack(a, b) >= a.0,
                    "n step at eta={}: {grid:?}",
                    etas[j]
                );
            }
        }
    }
}
