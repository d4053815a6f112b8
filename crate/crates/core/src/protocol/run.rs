use std::collections::BTreeMap;

use rand::Rng;

use super::{classify_event, correction_for, infer_logical_outcome, EventClass};
use super::{LogicalBellOutcome, PauliCorrection};
use crate::bsm::{measure_bell, outcome_distribution, BellOutcome, BsmNoise, BsmVariant};
use crate::encoding::{
    network_channel, shared_secret_state, BellLabel, EncodingParams, SecretSpec,
};
use crate::error::{Error, Result};
use crate::qstate::{partial_trace, project_two_photon_all, DensityMatrix, PauliOp, PureState};
use crate::rational::{snap, Rational};

/// Analyzer every sender of the GHZ protocol uses.
pub const SENDER_VARIANT: BsmVariant = BsmVariant::Bminus;

/// Fine-grained Born weights below this are dropped during enumeration.
pub(crate) const PRUNE: f64 = 1e-14;

/// `α|H⟩^⊗m + β|V⟩^⊗m`, the state the receivers should end up holding.
pub fn receiver_target(secret: &SecretSpec, m: usize) -> Result<PureState> {
    shared_secret_state(secret, &EncodingParams::ghz(m)?)
}

fn joint_state(secret: &SecretSpec, n: usize, m: usize) -> Result<PureState> {
    let enc = EncodingParams::ghz(n)?;
    if m == 0 {
        return Err(Error::InvalidParameter("m must be ≥ 1".into()));
    }
    shared_secret_state(secret, &enc)?.tensor(&network_channel(&enc, m)?)
}

/// One sampled run.
#[derive(Debug, Clone)]
pub struct TeleportOutcome {
    pub outcomes: Vec<BellOutcome>,
    pub logical: LogicalBellOutcome,
    pub event: EventClass,
    pub correction: Option<PauliCorrection>,
    /// Receivers' reduced state, corrected when the outcome was identified.
    pub receiver_state: DensityMatrix,
    /// Fidelity with `α|H⟩^⊗m + β|V⟩^⊗m`, for identified outcomes.
    pub fidelity: Option<f64>,
}

/// Samples one run of the protocol.
///
/// Each sender photon is lost independently with probability `η` before the
/// sender's analyzer fires.
pub fn run_teleportation<R: Rng + ?Sized>(
    secret: &SecretSpec,
    n: usize,
    m: usize,
    noise: &BsmNoise,
    rng: &mut R,
) -> Result<TeleportOutcome> {
    let mut state = joint_state(secret, n, m)?;
    // original photon index for each current position
    let mut alive: Vec<usize> = (0..2 * n + m).collect();
    let mut outcomes = Vec::with_capacity(n);
    for i in 0..n {
        let a = alive
            .iter()
            .position(|&x| x == i)
            .expect("secret photon present");
        let b = alive
            .iter()
            .position(|&x| x == n + i)
            .expect("channel photon present");
        for k in [a, b] {
            if rng.random::<f64>() < noise.loss_rate {
                state = state.with_lost(k, true)?;
            }
        }
        let (outcome, post) = measure_bell(&state, a, b, SENDER_VARIANT, noise, rng)?;
        if post.num_photons() < state.num_photons() {
            alive.retain(|&x| x != i && x != n + i);
        }
        state = post;
        outcomes.push(outcome);
    }
    let logical = infer_logical_outcome(&outcomes, SENDER_VARIANT)?;
    let event = classify_event(&outcomes, SENDER_VARIANT)?;
    let receivers: Vec<usize> = (0..m)
        .map(|r| alive.iter().position(|&x| x == 2 * n + r).unwrap())
        .collect();
    let (correction, fidelity, receiver_state) = if logical.is_identified() {
        let c = correction_for(&logical, m)?;
        let ops: Vec<PauliOp> = c
            .ops
            .iter()
            .map(|op| PauliOp::new(op.kind, receivers[op.target]))
            .collect();
        let corrected = state.apply_paulis(&ops)?;
        let rho = partial_trace(&corrected, &receivers)?;
        let f = rho.fidelity(&receiver_target(secret, m)?)?;
        (Some(c), Some(f), rho)
    } else {
        (None, None, partial_trace(&state, &receivers)?)
    };
    Ok(TeleportOutcome {
        outcomes,
        logical,
        event,
        correction,
        receiver_state,
        fidelity,
    })
}

/// One announcement record of an exact enumeration, with everything that
/// produced it folded together.
#[derive(Debug, Clone)]
pub struct EnumeratedBranch {
    pub outcomes: Vec<BellOutcome>,
    pub probability: f64,
    /// `probability` as an exact rational when it snaps to one.
    pub exact: Option<Rational>,
    pub logical: LogicalBellOutcome,
    pub event: EventClass,
    pub correction: Option<PauliCorrection>,
    /// Receivers' state given the record, corrected when identified.
    pub receiver_state: DensityMatrix,
    pub fidelity: Option<f64>,
}

/// Projects pairs `(k, P + k)` of `state` onto the full photon Bell basis for
/// `k = 0..P`, where `P = num_pairs` and the first `2P` photons are the two
/// halves of the pairs. Returns every branch above the pruning threshold with
/// its pair labels, Born weight and the state of the remaining photons.
pub(crate) fn project_pairs_fully(
    state: PureState,
    num_pairs: usize,
) -> Result<Vec<(Vec<BellLabel>, f64, PureState)>> {
    let labels = BellLabel::photon_all();
    let kets: Vec<PureState> = labels.iter().map(|l| l.photon_ket()).collect();
    let mut branches = vec![(Vec::with_capacity(num_pairs), 1.0, state)];
    for k in 0..num_pairs {
        let mut next = Vec::with_capacity(branches.len() * 4);
        for (history, p, state) in &branches {
            for proj in project_two_photon_all(state, 0, num_pairs - k, &kets)? {
                let w = p * proj.probability;
                if w < PRUNE {
                    continue;
                }
                if let Some(post) = proj.state {
                    let mut h = history.clone();
                    h.push(labels[proj.outcome]);
                    next.push((h, w, post));
                }
            }
        }
        branches = next;
    }
    Ok(branches)
}

struct RecordAcc {
    probability: f64,
    logical: LogicalBellOutcome,
    event: EventClass,
    correction: Option<PauliCorrection>,
    rho: DensityMatrix,
}

/// Every announcement record with its exact probability.
///
/// Each sender's pair is projected on the full Bell basis; the analyzer's
/// classical behavior (failure recognition, loss, misreports) is then folded
/// in, and branches sharing a record are mixed. Records are returned in a
/// fixed order.
pub fn enumerate_teleportation(
    secret: &SecretSpec,
    n: usize,
    m: usize,
    noise: &BsmNoise,
) -> Result<Vec<EnumeratedBranch>> {
    let target = receiver_target(secret, m)?;
    let mut records: BTreeMap<Vec<BellOutcome>, RecordAcc> = BTreeMap::new();
    for (labels, p_fine, receivers) in project_pairs_fully(joint_state(secret, n, m)?, n)? {
        let mut combos: Vec<(Vec<BellOutcome>, f64)> = vec![(Vec::with_capacity(n), p_fine)];
        for label in &labels {
            let options = outcome_distribution(*label, SENDER_VARIANT, noise);
            combos = combos
                .iter()
                .flat_map(|(prefix, w)| {
                    options.iter().map(move |(o, p)| {
                        let mut v = prefix.clone();
                        v.push(*o);
                        (v, w * p)
                    })
                })
                .collect();
        }
        for (record, w) in combos {
            if !records.contains_key(&record) {
                let logical = infer_logical_outcome(&record, SENDER_VARIANT)?;
                let event = classify_event(&record, SENDER_VARIANT)?;
                let correction = if logical.is_identified() {
                    Some(correction_for(&logical, m)?)
                } else {
                    None
                };
                records.insert(
                    record.clone(),
                    RecordAcc {
                        probability: 0.0,
                        logical,
                        event,
                        correction,
                        rho: DensityMatrix::zeros(m),
                    },
                );
            }
            let acc = records.get_mut(&record).expect("inserted above");
            acc.probability += w;
            match &acc.correction {
                Some(c) => acc.rho.add_scaled_pure(w, &receivers.apply_paulis(&c.ops)?),
                None => acc.rho.add_scaled_pure(w, &receivers),
            }
        }
    }
    let mut out = Vec::with_capacity(records.len());
    for (outcomes, acc) in records {
        if acc.probability < PRUNE {
            continue;
        }
        let rho = acc.rho.scaled(1.0 / acc.probability);
        let fidelity = match acc.correction {
            Some(_) => Some(rho.fidelity(&target)?),
            None => None,
        };
        out.push(EnumeratedBranch {
            outcomes,
            probability: acc.probability,
            exact: snap(acc.probability),
            logical: acc.logical,
            event: acc.event,
            correction: acc.correction,
            receiver_state: rho,
            fidelity,
        });
    }
    Ok(out)
}

/// Total probability of identified records, as a float and, when every
/// record weight snaps, as an exact rational.
pub fn success_probability(branches: &[EnumeratedBranch]) -> (f64, Option<Rational>) {
    let ok: Vec<&EnumeratedBranch> = branches
        .iter()
        .filter(|b| b.logical.is_identified())
        .collect();
    let p: f64 = ok.iter().map(|b| b.probability).sum();
    let exact = ok
        .iter()
        .map(|b| b.exact)
        .sum::<Option<Rational>>()
        .filter(|&r| (crate::rational::to_f64(&r) - p).abs() < 1e-10)
        .or_else(|| snap(p));
    (p, exact)
}

/// Probability of each event class given that the run made it into the
/// record, exact where every contributing weight is.
pub fn recorded_event_distribution(
    branches: &[EnumeratedBranch],
) -> BTreeMap<EventClass, (f64, Option<Rational>)> {
    let recorded: Vec<&EnumeratedBranch> =
        branches.iter().filter(|b| b.event.is_recorded()).collect();
    let total: f64 = recorded.iter().map(|b| b.probability).sum();
    let total_exact: Option<Rational> = recorded.iter().map(|b| b.exact).sum();
    let mut acc: BTreeMap<EventClass, (f64, Option<Rational>)> = BTreeMap::new();
    for b in recorded {
        let e = acc
            .entry(b.event)
            .or_insert((0.0, Some(Rational::from_integer(0))));
        e.0 += b.probability;
        e.1 = e.1.zip(b.exact).map(|(x, y)| x + y);
    }
    for (p, exact) in acc.values_mut() {
        *p /= total;
        *exact = exact.zip(total_exact).and_then(|(x, t)| {
            let r = x / t;
            ((crate::rational::to_f64(&r) - *p).abs() < 1e-10).then_some(r)
        });
    }
    acc
}
