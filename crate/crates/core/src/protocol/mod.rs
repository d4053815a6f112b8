//! Teleportation of a GHZ-encoded shared secret from `n` senders to `m`
//! receivers.
//!
//! Photon layout of a run: secret photons `s₁…sₙ` (indices `0..n`), the
//! senders' channel photons `s′₁…s′ₙ` (`n..2n`), then receivers `r₁…rₘ`
//! (`2n..2n+m`). The channel is `GHZ(n+m)` over `s′` and `r`. Sender `i`
//! runs a B− analyzer on `(sᵢ, s′ᵢ)` and announces the result.

mod audit;
pub(crate) mod run;
mod transcript;

pub use audit::{sub_party_reduced_state, RunContext};
pub use run::{
    enumerate_teleportation, receiver_target, recorded_event_distribution, run_teleportation,
    success_probability, EnumeratedBranch, TeleportOutcome,
};
pub use transcript::Transcript;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

use crate::bsm::{failure_subspace, BellOutcome, BsmVariant};
use crate::encoding::{Sign, Symbol};
use crate::error::{Error, Result};
use crate::qstate::PauliOp;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Role {
    Sender,
    Receiver,
}

/// A party of the run; `index` is 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PartyId {
    pub role: Role,
    pub index: usize,
}

impl PartyId {
    pub fn sender(index: usize) -> Self {
        PartyId {
            role: Role::Sender,
            index,
        }
    }

    pub fn receiver(index: usize) -> Self {
        PartyId {
            role: Role::Receiver,
            index,
        }
    }
}

impl fmt::Display for PartyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = match self.role {
            Role::Sender => 's',
            Role::Receiver => 'r',
        };
        write!(f, "{r}{}", self.index)
    }
}

/// One entry of the classical channel.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Announcement {
    pub party: PartyId,
    pub outcome: BellOutcome,
    pub sequence: usize,
}

/// Result of combining the senders' announcements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LogicalBellOutcome {
    Identified {
        symbol: Symbol,
        sign: Sign,
    },
    ProtocolFailure,
    /// Announcements that no noiseless run can produce.
    Inconsistent,
}

impl LogicalBellOutcome {
    pub fn is_identified(&self) -> bool {
        matches!(self, LogicalBellOutcome::Identified { .. })
    }
}

impl fmt::Display for LogicalBellOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogicalBellOutcome::Identified { symbol, sign } => {
                let s = match symbol {
                    Symbol::Phi => "Phi",
                    Symbol::Psi => "Psi",
                };
                let g = if sign.is_minus() { '-' } else { '+' };
                write!(f, "{s}{g}_L")
            }
            LogicalBellOutcome::ProtocolFailure => f.write_str("failure"),
            LogicalBellOutcome::Inconsistent => f.write_str("inconsistent"),
        }
    }
}

impl Serialize for LogicalBellOutcome {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Pauli operators on receiver photons; targets index the receiver register
/// (`0` is `r₁`).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PauliCorrection {
    pub ops: Vec<PauliOp>,
}

impl fmt::Display for PauliCorrection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ops.is_empty() {
            return f.write_str("I");
        }
        let parts: Vec<String> = self.ops.iter().map(|o| o.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

/// Labels a single report is compatible with, or `None` when the report
/// carries no usable information.
fn compatible_labels(
    outcome: &BellOutcome,
    variant: BsmVariant,
) -> Option<Vec<crate::encoding::BellLabel>> {
    match outcome {
        BellOutcome::Detected(l) => Some(vec![*l]),
        BellOutcome::FailureDetected => Some(failure_subspace(variant).to_vec()),
        BellOutcome::FailureUndetected | BellOutcome::LossDetected => None,
    }
}

/// Combines per-sender reports into a logical Bell outcome.
///
/// Every pair of a logical `Φ` (`Ψ`) carries the symbol `φ` (`ψ`), and the
/// logical sign is the product of the pair signs. A recognized failure still
/// pins whatever its failure subspace has in common (the sign `+` for B−).
/// The result does not depend on the order of `outcomes`.
pub fn infer_logical_outcome(
    outcomes: &[BellOutcome],
    variant: BsmVariant,
) -> Result<LogicalBellOutcome> {
    if outcomes.is_empty() {
        return Err(Error::EmptyOutcomes);
    }
    let mut symbols = BTreeSet::new();
    let mut minus = 0usize;
    let mut sign_known = true;
    for o in outcomes {
        let Some(labels) = compatible_labels(o, variant) else {
            return Ok(LogicalBellOutcome::ProtocolFailure);
        };
        if labels.iter().all(|l| l.symbol == labels[0].symbol) {
            symbols.insert(labels[0].symbol);
        }
        if labels.iter().all(|l| l.sign == labels[0].sign) {
            minus += labels[0].sign.is_minus() as usize;
        } else {
            sign_known = false;
        }
    }
    if symbols.len() > 1 {
        return Ok(LogicalBellOutcome::Inconsistent);
    }
    match symbols.first() {
        Some(&symbol) if sign_known => Ok(LogicalBellOutcome::Identified {
            symbol,
            sign: Sign::from_minus_count(minus),
        }),
        _ => Ok(LogicalBellOutcome::ProtocolFailure),
    }
}

/// Receiver-side correction for an identified logical outcome.
///
/// A logical `Z` is a `Z` on `r₁`; a logical `X` is an `X` on every receiver.
pub fn correction_for(outcome: &LogicalBellOutcome, m: usize) -> Result<PauliCorrection> {
    let LogicalBellOutcome::Identified { symbol, sign } = outcome else {
        return Err(Error::NotIdentified);
    };
    if m == 0 {
        return Err(Error::InvalidParameter("m must be ≥ 1".into()));
    }
    let mut ops = Vec::new();
    if *symbol == Symbol::Psi {
        ops.extend((0..m).map(PauliOp::x));
    }
    if sign.is_minus() {
        ops.push(PauliOp::z(0));
    }
    Ok(PauliCorrection { ops })
}

/// Classification of a run by its announcements.
///
/// For two senders a recorded run is `SS`, `SF`, `FS` or `FF` by which senders
/// detected a Bell state and which saw a recognized failure, and `E` when the
/// record is inconsistent. Runs with an unrecognized failure or a loss never
/// make it into the record. With more senders, recorded consistent runs are
/// tallied by detection and failure counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EventClass {
    SS,
    SF,
    FS,
    FF,
    E,
    Unrecorded,
    Multi { detected: usize, failed: usize },
}

impl EventClass {
    pub fn is_recorded(&self) -> bool {
        *self != EventClass::Unrecorded
    }
}

impl fmt::Display for EventClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EventClass::SS => f.write_str("SS"),
            EventClass::SF => f.write_str("SF"),
            EventClass::FS => f.write_str("FS"),
            EventClass::FF => f.write_str("FF"),
            EventClass::E => f.write_str("E"),
            EventClass::Unrecorded => f.write_str("unrecorded"),
            EventClass::Multi { detected, failed } => write!(f, "S{detected}F{failed}"),
        }
    }
}

impl Serialize for EventClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub fn classify_event(outcomes: &[BellOutcome], variant: BsmVariant) -> Result<EventClass> {
    let logical = infer_logical_outcome(outcomes, variant)?;
    if outcomes.iter().any(|o| {
        matches!(
            o,
            BellOutcome::FailureUndetected | BellOutcome::LossDetected
        )
    }) {
        return Ok(EventClass::Unrecorded);
    }
    if logical == LogicalBellOutcome::Inconsistent {
        return Ok(EventClass::E);
    }
    let detected = outcomes.iter().filter(|o| o.is_detected()).count();
    let class = match outcomes {
        [a, b] => match (a.is_detected(), b.is_detected()) {
            (true, true) => EventClass::SS,
            (true, false) => EventClass::SF,
            (false, true) => EventClass::FS,
            (false, false) => EventClass::FF,
        },
        _ => EventClass::Multi {
            detected,
            failed: outcomes.len() - detected,
        },
    };
    Ok(class)
}
