//! Block-level Bell measurement built from `p` photon-pair analyzers.
//!
//! Policy: run B_ψ on successive pairs until one succeeds, a loss shows up,
//! or `q` consecutive failures accumulate. A B_ψ success fixes the block sign,
//! and the remaining pairs use the matching B±; otherwise a fixed fallback
//! variant is used for the rest. With `q = 0` there is no B_ψ phase at all.

use std::fmt;

use rand::Rng;
use serde::{Serialize, Serializer};

use crate::bsm::{
    failure_subspace, outcome_distribution, sample_outcome, BellOutcome, BsmNoise, BsmVariant,
};
use crate::encoding::{BellLabel, Sign, Symbol};
use crate::error::{Error, Result};

/// Result of one block-level measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level1Result {
    /// Both the block symbol and the block sign are known.
    Success {
        symbol: Symbol,
        sign: Sign,
    },
    /// Only the block sign is known.
    SignOnly(Sign),
    Failure,
}

impl Level1Result {
    pub fn sign(&self) -> Option<Sign> {
        match self {
            Level1Result::Success { sign, .. } | Level1Result::SignOnly(sign) => Some(*sign),
            Level1Result::Failure => None,
        }
    }

    pub fn symbol(&self) -> Option<Symbol> {
        match self {
            Level1Result::Success { symbol, .. } => Some(*symbol),
            _ => None,
        }
    }
}

impl fmt::Display for Level1Result {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level1Result::Success { symbol, sign } => {
                write!(f, "{}", BellLabel::block(*symbol, *sign))
            }
            Level1Result::SignOnly(Sign::Plus) => f.write_str("sign+"),
            Level1Result::SignOnly(Sign::Minus) => f.write_str("sign-"),
            Level1Result::Failure => f.write_str("fail"),
        }
    }
}

impl Serialize for Level1Result {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Where the retry policy currently stands within a block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolicyPhase {
    /// Still trying B_ψ, with this many consecutive recognized failures.
    Psi { failures: usize },
    /// Remaining pairs all use this variant.
    Fixed(BsmVariant),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Level1Policy {
    /// Maximum number of B_ψ attempts.
    pub q: usize,
    /// Variant used after a loss or `q` failures.
    pub fallback: BsmVariant,
}

impl Level1Policy {
    pub fn new(q: usize) -> Self {
        Level1Policy {
            q,
            fallback: BsmVariant::Bplus,
        }
    }

    pub fn with_fallback(mut self, fallback: BsmVariant) -> Self {
        self.fallback = fallback;
        self
    }

    pub fn start(&self) -> PolicyPhase {
        if self.q == 0 {
            PolicyPhase::Fixed(self.fallback)
        } else {
            PolicyPhase::Psi { failures: 0 }
        }
    }

    pub fn variant(&self, phase: PolicyPhase) -> BsmVariant {
        match phase {
            PolicyPhase::Psi { .. } => BsmVariant::Bpsi,
            PolicyPhase::Fixed(v) => v,
        }
    }

    pub fn advance(&self, phase: PolicyPhase, outcome: BellOutcome) -> PolicyPhase {
        let PolicyPhase::Psi { failures } = phase else {
            return phase;
        };
        match outcome {
            BellOutcome::Detected(label) => PolicyPhase::Fixed(BsmVariant::for_sign(label.sign)),
            BellOutcome::FailureDetected if failures + 1 < self.q => PolicyPhase::Psi {
                failures: failures + 1,
            },
            _ => PolicyPhase::Fixed(self.fallback),
        }
    }
}

/// One block measurement with its raw level-0 record.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Level1Record {
    pub steps: Vec<(BsmVariant, BellOutcome)>,
    pub result: Level1Result,
    /// The sign votes were tied and `+` was chosen.
    pub tie: bool,
    /// B_ψ succeeded but every later B± lost a photon.
    pub flagged: bool,
}

/// Labels a report is compatible with; `None` when it says nothing.
fn compatible(variant: BsmVariant, outcome: BellOutcome) -> Option<Vec<BellLabel>> {
    match outcome {
        BellOutcome::Detected(l) => Some(vec![l]),
        BellOutcome::FailureDetected => Some(failure_subspace(variant).to_vec()),
        BellOutcome::FailureUndetected | BellOutcome::LossDetected => None,
    }
}

fn sign_vote(variant: BsmVariant, outcome: BellOutcome) -> Option<Sign> {
    let labels = compatible(variant, outcome)?;
    labels
        .iter()
        .all(|l| l.sign == labels[0].sign)
        .then_some(labels[0].sign)
}

fn pair_symbol(variant: BsmVariant, outcome: BellOutcome) -> Option<Symbol> {
    let labels = compatible(variant, outcome)?;
    labels
        .iter()
        .all(|l| l.symbol == labels[0].symbol)
        .then_some(labels[0].symbol)
}

/// Majority sign over the sign-bearing level-0 reports of one block.
///
/// Detected labels vote their own sign; a recognized B± failure votes the
/// opposite sign of its variant. Returns the sign and whether the vote tied
/// (ties go to `+`).
pub fn majority_vote_sign(steps: &[(BsmVariant, BellOutcome)]) -> Result<(Sign, bool)> {
    let votes: Vec<Sign> = steps
        .iter()
        .filter_map(|(v, o)| sign_vote(*v, *o))
        .collect();
    if votes.is_empty() {
        return Err(Error::NoSignVotes);
    }
    let minus = votes.iter().filter(|s| s.is_minus()).count();
    let plus = votes.len() - minus;
    Ok(match minus.cmp(&plus) {
        std::cmp::Ordering::Greater => (Sign::Minus, false),
        std::cmp::Ordering::Less => (Sign::Plus, false),
        std::cmp::Ordering::Equal => (Sign::Plus, true),
    })
}

/// Classifies a finished block record.
///
/// Success needs the symbol of every pair: the block symbol is `ψ` when the
/// number of `ψ` pairs is odd. Otherwise any sign vote gives SignOnly, and no
/// vote at all is a Failure.
pub fn classify_block(steps: Vec<(BsmVariant, BellOutcome)>) -> Level1Record {
    let flagged = steps
        .iter()
        .any(|(v, o)| *v == BsmVariant::Bpsi && o.is_detected())
        && steps
            .iter()
            .filter(|(v, _)| *v != BsmVariant::Bpsi)
            .all(|(_, o)| *o == BellOutcome::LossDetected);
    let (result, tie) = match majority_vote_sign(&steps) {
        Err(_) => (Level1Result::Failure, false),
        Ok((sign, tie)) => {
            let symbols: Option<Vec<Symbol>> =
                steps.iter().map(|(v, o)| pair_symbol(*v, *o)).collect();
            let result = match symbols {
                Some(s) => Level1Result::Success {
                    symbol: Symbol::from_psi_parity(
                        s.iter().filter(|x| **x == Symbol::Psi).count(),
                    ),
                    sign,
                },
                None => Level1Result::SignOnly(sign),
            };
            (result, tie)
        }
    };
    Level1Record {
        steps,
        result,
        tie,
        flagged,
    }
}

/// Drives the policy over `p` pairs, asking `measure` for each pair's report.
pub fn run_block<F>(p: usize, policy: &Level1Policy, mut measure: F) -> Result<Level1Record>
where
    F: FnMut(usize, BsmVariant) -> Result<BellOutcome>,
{
    if p == 0 || policy.q >= p {
        return Err(Error::InvalidParameter(format!(
            "block of p={p} pairs with q={}",
            policy.q
        )));
    }
    let mut phase = policy.start();
    let mut steps = Vec::with_capacity(p);
    for k in 0..p {
        let variant = policy.variant(phase);
        let outcome = measure(k, variant)?;
        steps.push((variant, outcome));
        phase = policy.advance(phase, outcome);
    }
    Ok(classify_block(steps))
}

/// Samples a block measurement on pairs known to be in `labels`.
pub fn bsm_level1<R: Rng + ?Sized>(
    labels: &[BellLabel],
    policy: &Level1Policy,
    noise: &BsmNoise,
    rng: &mut R,
) -> Result<Level1Record> {
    run_block(labels.len(), policy, |k, v| {
        Ok(sample_outcome(labels[k], v, noise, rng))
    })
}

/// Every block record reachable from pairs in `labels`, with its probability.
pub fn enumerate_block(
    labels: &[BellLabel],
    policy: &Level1Policy,
    noise: &BsmNoise,
) -> Result<Vec<(Level1Record, f64)>> {
    if labels.is_empty() || policy.q >= labels.len() {
        return Err(Error::InvalidParameter(format!(
            "block of p={} pairs with q={}",
            labels.len(),
            policy.q
        )));
    }
    let mut partial = vec![(policy.start(), Vec::new(), 1.0)];
    for label in labels {
        let mut next = Vec::with_capacity(partial.len() * 3);
        for (phase, steps, w) in &partial {
            let variant = policy.variant(*phase);
            for (o, p) in outcome_distribution(*label, variant, noise) {
                let mut s: Vec<(BsmVariant, BellOutcome)> = steps.clone();
                s.push((variant, o));
                next.push((policy.advance(*phase, o), s, w * p));
            }
        }
        partial = next;
    }
    Ok(partial
        .into_iter()
        .map(|(_, steps, w)| (classify_block(steps), w))
        .collect())
}
