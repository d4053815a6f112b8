//! Parity-encoded teleportation with the concatenated Bell measurement.
//!
//! Photon layout: secret `S` (`N = n·p` photons), then the channel `Φ⁺_L`
//! split into the senders' half `A` and the receivers' half `R`. Sender `j`
//! holds block `j` of `S` and of `A` and measures pairs `(S_jk, A_jk)`.
//! Receiver blocks are handed out round-robin to the `m` receivers. Photon
//! loss only affects the senders' photons.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::Serialize;

use super::adversary::AdversaryModel;
use super::level1::{
    bsm_level1, enumerate_block, run_block, Level1Policy, Level1Record, Level1Result,
};
use super::level2::{logical_symbol_correct, SymbolCorrected};
use crate::bsm::{measure_bell, BsmNoise, BsmVariant};
use crate::encoding::decompose_logical_bell;
use crate::encoding::{
    logical_bell_state, sample_pair_labels, shared_secret_state, BellLabel, EncodingParams, Level,
    Scheme, SecretSpec, Sign, Symbol,
};
use crate::error::{Error, Result};
use crate::protocol::run::{project_pairs_fully, PRUNE};
use crate::protocol::{LogicalBellOutcome, PauliCorrection};
use crate::qstate::{partial_trace, PauliOp, PureState};

/// Fidelity above which a sampled exact run counts as correctly identified.
pub const CORRECT_FIDELITY: f64 = 1.0 - 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SimMode {
    /// Dense amplitudes for the whole network (at most 20 photons).
    Exact,
    /// Photon-pair Bell labels drawn from the logical Bell decomposition.
    LabelLevel,
}

impl fmt::Display for SimMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SimMode::Exact => "exact",
            SimMode::LabelLevel => "label",
        })
    }
}

impl FromStr for SimMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(SimMode::Exact),
            "label" | "label-level" => Ok(SimMode::LabelLevel),
            other => Err(Error::InvalidParameter(format!("unknown mode {other:?}"))),
        }
    }
}

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum FtClass {
    /// Identified, and the identification is right.
    Success,
    /// Identified, but not the logical Bell state that was actually measured.
    Misidentified,
    Failure,
    Inconsistent,
}

impl FtClass {
    pub const ALL: [FtClass; 4] = [
        FtClass::Success,
        FtClass::Misidentified,
        FtClass::Failure,
        FtClass::Inconsistent,
    ];
}

#[derive(Debug, Clone)]
pub struct FtConfig {
    pub secret: SecretSpec,
    pub enc: EncodingParams,
    pub m: usize,
    pub noise: BsmNoise,
    pub adversary: AdversaryModel,
    pub mode: SimMode,
    pub fallback: BsmVariant,
}

impl FtConfig {
    pub fn new(secret: SecretSpec, enc: EncodingParams, m: usize) -> Self {
        FtConfig {
            secret,
            enc,
            m,
            noise: BsmNoise::noiseless(),
            adversary: AdversaryModel::honest(),
            mode: SimMode::LabelLevel,
            fallback: BsmVariant::Bplus,
        }
    }

    pub fn with_noise(mut self, noise: BsmNoise) -> Self {
        self.noise = noise;
        self
    }

    pub fn with_adversary(mut self, adversary: AdversaryModel) -> Self {
        self.adversary = adversary;
        self
    }

    pub fn with_mode(mut self, mode: SimMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn policy(&self) -> Level1Policy {
        Level1Policy::new(self.enc.q).with_fallback(self.fallback)
    }

    pub fn validate(&self) -> Result<()> {
        if self.enc.scheme != Scheme::Parity {
            return Err(Error::EncodingMismatch(
                "the concatenated measurement needs the parity scheme".into(),
            ));
        }
        if self.m == 0 {
            return Err(Error::InvalidParameter("m must be ≥ 1".into()));
        }
        self.adversary.validate(self.enc.n)?;
        if self.mode == SimMode::Exact {
            crate::qstate::check_budget(3 * self.enc.photons_per_qubit())?;
        }
        Ok(())
    }
}

/// 1-based receiver holding receiver block `block` (0-based).
pub fn receiver_of_block(block: usize, m: usize) -> usize {
    block % m + 1
}

/// Logical Pauli correction on the receivers' `N` photons. Logical `Z` is
/// `Z` on every photon of the first block; logical `X` is `X` on the first
/// photon of every block.
pub fn logical_correction(
    outcome: &LogicalBellOutcome,
    enc: &EncodingParams,
) -> Result<PauliCorrection> {
    let LogicalBellOutcome::Identified { symbol, sign } = outcome else {
        return Err(Error::NotIdentified);
    };
    let mut ops = Vec::new();
    if *symbol == Symbol::Psi {
        ops.extend((0..enc.n).map(|b| PauliOp::x(b * enc.p)));
    }
    if sign.is_minus() {
        ops.extend((0..enc.p).map(PauliOp::z));
    }
    Ok(PauliCorrection { ops })
}

/// Logical Bell label a photon-pair pattern belongs to, if any.
pub fn true_logical_label(pairs: &[BellLabel], enc: &EncodingParams) -> Option<BellLabel> {
    if pairs.len() != enc.photons_per_qubit() {
        return None;
    }
    let mut symbol = None;
    let mut minus = 0;
    for block in pairs.chunks(enc.p) {
        let sign = block[0].sign;
        if block.iter().any(|l| l.sign != sign) {
            return None;
        }
        minus += sign.is_minus() as usize;
        let s = Symbol::from_psi_parity(block.iter().filter(|l| l.symbol == Symbol::Psi).count());
        if *symbol.get_or_insert(s) != s {
            return None;
        }
    }
    Some(BellLabel::logical(symbol?, Sign::from_minus_count(minus)))
}

fn classify(
    outcome: &LogicalBellOutcome,
    truth: Option<BellLabel>,
    fidelity: Option<f64>,
) -> FtClass {
    match outcome {
        LogicalBellOutcome::ProtocolFailure => FtClass::Failure,
        LogicalBellOutcome::Inconsistent => FtClass::Inconsistent,
        LogicalBellOutcome::Identified { symbol, sign } => {
            let correct = match (truth, fidelity) {
                (Some(t), _) => t.symbol == *symbol && t.sign == *sign,
                (None, Some(f)) => f >= CORRECT_FIDELITY,
                (None, None) => false,
            };
            if correct {
                FtClass::Success
            } else {
                FtClass::Misidentified
            }
        }
    }
}

fn joint_state(cfg: &FtConfig) -> Result<PureState> {
    let channel = logical_bell_state(BellLabel::logical(Symbol::Phi, Sign::Plus), &cfg.enc)?;
    shared_secret_state(&cfg.secret, &cfg.enc)?.tensor(&channel)
}

fn corrected_fidelity(
    receivers: &PureState,
    outcome: &LogicalBellOutcome,
    cfg: &FtConfig,
    target: &PureState,
) -> Result<f64> {
    let c = logical_correction(outcome, &cfg.enc)?;
    receivers.apply_paulis(&c.ops)?.overlap(target)
}

/// One sampled run.
#[derive(Debug, Clone)]
pub struct FtRun {
    pub blocks: Vec<Level1Record>,
    pub announced: Vec<Level1Result>,
    pub decision: SymbolCorrected,
    /// Logical Bell state actually measured (label-level runs only).
    pub truth: Option<BellLabel>,
    pub class: FtClass,
    pub fidelity: Option<f64>,
}

/// Samples one run of the parity-encoded protocol.
pub fn run_ft_teleportation<R: Rng + ?Sized>(cfg: &FtConfig, rng: &mut R) -> Result<FtRun> {
    cfg.validate()?;
    let policy = cfg.policy();
    let (n, p) = (cfg.enc.n, cfg.enc.p);
    let big_n = cfg.enc.photons_per_qubit();
    let (blocks, truth, final_state) = match cfg.mode {
        SimMode::LabelLevel => {
            let truth = BellLabel::all(Level::Logical)[rng.random_range(0..4)];
            let pairs = sample_pair_labels(truth, &cfg.enc, rng);
            let blocks = pairs
                .chunks(p)
                .map(|b| bsm_level1(b, &policy, &cfg.noise, rng))
                .collect::<Result<Vec<_>>>()?;
            (blocks, Some(truth), None)
        }
        SimMode::Exact => {
            let mut state = joint_state(cfg)?;
            let mut alive: Vec<usize> = (0..3 * big_n).collect();
            let mut blocks = Vec::with_capacity(n);
            for j in 0..n {
                let rec = run_block(p, &policy, |k, variant| {
                    let x = j * p + k;
                    let a = alive.iter().position(|&y| y == x).expect("present");
                    let b = alive.iter().position(|&y| y == big_n + x).expect("present");
                    for photon in [a, b] {
                        if rng.random::<f64>() < cfg.noise.loss_rate {
                            state = state.with_lost(photon, true)?;
                        }
                    }
                    let (o, post) = measure_bell(&state, a, b, variant, &cfg.noise, rng)?;
                    if post.num_photons() < state.num_photons() {
                        alive.retain(|&y| y != x && y != big_n + x);
                    }
                    state = post;
                    Ok(o)
                })?;
                blocks.push(rec);
            }
            let receivers: Vec<usize> = (0..big_n)
                .map(|r| alive.iter().position(|&y| y == 2 * big_n + r).unwrap())
                .collect();
            (blocks, None, Some((state, receivers)))
        }
    };
    let honest: Vec<Level1Result> = blocks.iter().map(|b| b.result).collect();
    let announced = cfg.adversary.sample(&honest, rng);
    let decision = logical_symbol_correct(&announced)?;
    let fidelity = match (&final_state, decision.outcome.is_identified()) {
        (Some((state, receivers)), true) => {
            let c = logical_correction(&decision.outcome, &cfg.enc)?;
            let ops: Vec<PauliOp> = c
                .ops
                .iter()
                .map(|op| PauliOp::new(op.kind, receivers[op.target]))
                .collect();
            let rho = partial_trace(&state.apply_paulis(&ops)?, receivers)?;
            Some(rho.fidelity(&shared_secret_state(&cfg.secret, &cfg.enc)?)?)
        }
        _ => None,
    };
    let class = classify(&decision.outcome, truth, fidelity);
    Ok(FtRun {
        blocks,
        announced,
        decision,
        truth,
        class,
        fidelity,
    })
}

/// Photon-pair patterns of a uniformly random logical Bell state, each with
/// its probability.
pub fn label_level_patterns(enc: &EncodingParams) -> Result<Vec<(Vec<BellLabel>, f64)>> {
    let mut out = Vec::new();
    for label in BellLabel::all(Level::Logical) {
        for term in decompose_logical_bell(label, enc)?.terms {
            let w = *term.weight.numer() as f64 / *term.weight.denom() as f64;
            out.push((term.pair_labels, 0.25 * w));
        }
    }
    Ok(out)
}

/// Every combination of block records for a pair pattern, with probability.
pub fn enumerate_blocks(
    pairs: &[BellLabel],
    enc: &EncodingParams,
    policy: &Level1Policy,
    noise: &BsmNoise,
) -> Result<Vec<(Vec<Level1Record>, f64)>> {
    let mut out: Vec<(Vec<Level1Record>, f64)> = vec![(Vec::with_capacity(enc.n), 1.0)];
    for block in pairs.chunks(enc.p) {
        let options = enumerate_block(block, policy, noise)?;
        let mut next = Vec::with_capacity(out.len() * options.len());
        for (prefix, w) in &out {
            for (rec, p) in &options {
                if w * p < PRUNE {
                    continue;
                }
                let mut v = prefix.clone();
                v.push(rec.clone());
                next.push((v, w * p));
            }
        }
        out = next;
    }
    Ok(out)
}

/// Exact outcome distribution of the parity-encoded protocol.
#[derive(Debug, Clone)]
pub struct FtDistribution {
    pub classes: BTreeMap<FtClass, f64>,
    /// Expected fraction of honest block results that are SignOnly.
    pub signonly_block_rate: f64,
    /// Probability-weighted fidelity over identified outcomes (exact mode).
    pub mean_fidelity: Option<f64>,
    pub min_fidelity: Option<f64>,
}

impl FtDistribution {
    pub fn probability(&self, class: FtClass) -> f64 {
        self.classes.get(&class).copied().unwrap_or(0.0)
    }
}

/// Enumerates every branch of the protocol in the configured mode.
pub fn enumerate_ft(cfg: &FtConfig) -> Result<FtDistribution> {
    cfg.validate()?;
    let policy = cfg.policy();
    let patterns: Vec<(Vec<BellLabel>, f64, Option<PureState>)> = match cfg.mode {
        SimMode::LabelLevel => label_level_patterns(&cfg.enc)?
            .into_iter()
            .map(|(l, w)| (l, w, None))
            .collect(),
        SimMode::Exact => project_pairs_fully(joint_state(cfg)?, cfg.enc.photons_per_qubit())?
            .into_iter()
            .map(|(l, w, s)| (l, w, Some(s)))
            .collect(),
    };
    let target = shared_secret_state(&cfg.secret, &cfg.enc)?;
    let mut classes: BTreeMap<FtClass, f64> = FtClass::ALL.iter().map(|c| (*c, 0.0)).collect();
    let mut signonly = 0.0;
    let (mut fid_sum, mut fid_weight, mut fid_min) = (0.0, 0.0, f64::INFINITY);
    for (pairs, w_pattern, receivers) in patterns {
        let truth = true_logical_label(&pairs, &cfg.enc);
        let mut fid_cache: BTreeMap<LogicalBellOutcome, f64> = BTreeMap::new();
        for (records, w_blocks) in enumerate_blocks(&pairs, &cfg.enc, &policy, &cfg.noise)? {
            let honest: Vec<Level1Result> = records.iter().map(|r| r.result).collect();
            let so = honest
                .iter()
                .filter(|r| matches!(r, Level1Result::SignOnly(_)))
                .count();
            signonly += w_pattern * w_blocks * so as f64 / cfg.enc.n as f64;
            for (announced, w_adv) in cfg.adversary.announcements(&honest) {
                let w = w_pattern * w_blocks * w_adv;
                let decision = logical_symbol_correct(&announced)?;
                let fidelity = match (&receivers, decision.outcome.is_identified()) {
                    (Some(state), true) => {
                        let f = match fid_cache.get(&decision.outcome) {
                            Some(f) => *f,
                            None => {
                                let f = corrected_fidelity(state, &decision.outcome, cfg, &target)?;
                                fid_cache.insert(decision.outcome, f);
                                f
                            }
                        };
                        fid_sum += w * f;
                        fid_weight += w;
                        fid_min = fid_min.min(f);
                        Some(f)
                    }
                    _ => None,
                };
                let truth = if receivers.is_some() && fidelity.is_some() {
                    None
                } else {
                    truth
                };
                *classes
                    .entry(classify(&decision.outcome, truth, fidelity))
                    .or_default() += w;
            }
        }
    }
    let exact = cfg.mode == SimMode::Exact && fid_weight > 0.0;
    Ok(FtDistribution {
        classes,
        signonly_block_rate: signonly,
        mean_fidelity: exact.then(|| fid_sum / fid_weight),
        min_fidelity: exact.then_some(fid_min),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::trial_rng;
    use num_complex::Complex64;

    fn secret() -> SecretSpec {
        SecretSpec::new(Complex64::new(0.3, -0.4), Complex64::new(0.5, 0.7)).unwrap()
    }

    #[test]
    fn logical_paulis_act_on_the_code() {
        for (n, p) in [(1, 2), (2, 2), (2, 3), (3, 1)] {
            let enc = EncodingParams::parity_default(n, p).unwrap();
            let s = secret();
            let state = shared_secret_state(&s, &enc).unwrap();
            let flipped =
                shared_secret_state(&SecretSpec::new(s.beta, s.alpha).unwrap(), &enc).unwrap();
            let phased =
                shared_secret_state(&SecretSpec::new(s.alpha, -s.beta).unwrap(), &enc).unwrap();
            let x = logical_correction(
                &LogicalBellOutcome::Identified {
                    symbol: Symbol::Psi,
                    sign: Sign::Plus,
                },
                &enc,
            )
            .unwrap();
            let z = logical_correction(
                &LogicalBellOutcome::Identified {
                    symbol: Symbol::Phi,
                    sign: Sign::Minus,
                },
                &enc,
            )
            .unwrap();
            assert!(
                (state
                    .apply_paulis(&x.ops)
                    .unwrap()
                    .overlap(&flipped)
                    .unwrap()
                    - 1.0)
                    .abs()
                    < 1e-12
            );
            assert!(
                (state
                    .apply_paulis(&z.ops)
                    .unwrap()
                    .overlap(&phased)
                    .unwrap()
                    - 1.0)
                    .abs()
                    < 1e-12
            );
        }
    }

    #[test]
    fn noiseless_exact_runs_teleport_perfectly() {
        let enc = EncodingParams::parity_default(2, 2).unwrap();
        let cfg = FtConfig::new(secret(), enc, 2).with_mode(SimMode::Exact);
        let d = enumerate_ft(&cfg).unwrap();
        assert!((d.min_fidelity.unwrap() - 1.0).abs() < 1e-10);
        assert!(d.probability(FtClass::Misidentified) < 1e-12);
        let total: f64 = d.classes.values().sum();
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn truth_labels_match_decompositions() {
        let enc = EncodingParams::parity_default(2, 3).unwrap();
        for label in BellLabel::all(Level::Logical) {
            for t in decompose_logical_bell(label, &enc).unwrap().terms {
                assert_eq!(true_logical_label(&t.pair_labels, &enc), Some(label));
            }
        }
    }

    #[test]
    fn sampled_exact_runs_agree_with_truthless_classification() {
        let enc = EncodingParams::parity_default(1, 2).unwrap();
        let cfg = FtConfig::new(secret(), enc, 1)
            .with_mode(SimMode::Exact)
            .with_noise(BsmNoise::new(1.0, 0.2, 0.0).unwrap());
        for t in 0..100 {
            let run = run_ft_teleportation(&cfg, &mut trial_rng(9, t)).unwrap();
            assert_ne!(run.class, FtClass::Misidentified);
            if let Some(f) = run.fidelity {
                assert!((f - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn exact_mode_respects_the_photon_budget() {
        let enc = EncodingParams::parity_default(3, 3).unwrap();
        let cfg = FtConfig::new(secret(), enc, 1).with_mode(SimMode::Exact);
        assert!(matches!(
            enumerate_ft(&cfg),
            Err(Error::PhotonBudget { .. })
        ));
    }
}
