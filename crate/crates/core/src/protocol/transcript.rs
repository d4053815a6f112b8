use serde::Serialize;

use super::run::TeleportOutcome;
use super::{Announcement, EventClass, LogicalBellOutcome, PartyId};
use crate::bsm::{BellOutcome, BsmNoise};
use crate::encoding::SecretSpec;

/// One run, as written to the line-delimited JSON log.
#[derive(Debug, Clone, Serialize)]
pub struct Transcript {
    pub seed: u64,
    pub trial: u64,
    pub n: usize,
    pub m: usize,
    pub alpha: [f64; 2],
    pub beta: [f64; 2],
    pub f: f64,
    pub eta: f64,
    pub epsilon: f64,
    pub outcomes: Vec<BellOutcome>,
    pub logical_outcome: LogicalBellOutcome,
    pub event_class: EventClass,
    pub correction: Option<String>,
    pub fidelity: Option<f64>,
}

impl Transcript {
    pub fn new(
        seed: u64,
        trial: u64,
        secret: &SecretSpec,
        m: usize,
        noise: &BsmNoise,
        run: &TeleportOutcome,
    ) -> Self {
        Transcript {
            seed,
            trial,
            n: run.outcomes.len(),
            m,
            alpha: [secret.alpha.re, secret.alpha.im],
            beta: [secret.beta.re, secret.beta.im],
            f: noise.failure_detection,
            eta: noise.loss_rate,
            epsilon: noise.flip_error_rate,
            outcomes: run.outcomes.clone(),
            logical_outcome: run.logical,
            event_class: run.event,
            correction: run.correction.as_ref().map(|c| c.to_string()),
            fidelity: run.fidelity,
        }
    }

    /// The classical channel of the run, in announcement order.
    pub fn announcements(&self) -> Vec<Announcement> {
        self.outcomes
            .iter()
            .enumerate()
            .map(|(k, o)| Announcement {
                party: PartyId::sender(k + 1),
                outcome: *o,
                sequence: k,
            })
            .collect()
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("transcripts serialize")
    }
}
