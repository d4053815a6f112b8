//! Monte-Carlo estimates over independent, reproducible trials.

use std::iter::Sum;
use std::ops::Add;

use rayon::prelude::*;
use serde::Serialize;

use super::adversary::AdversaryModel;
use super::ft::{run_ft_teleportation, FtClass, FtConfig, FtRun, SimMode};
use super::level1::{Level1Record, Level1Result};
use crate::bsm::BsmNoise;
use crate::encoding::SecretSpec;
use crate::error::Result;
use crate::protocol::{run_teleportation, LogicalBellOutcome, TeleportOutcome, Transcript};
use crate::rng::trial_rng;

/// What a batch of trials simulates.
#[derive(Debug, Clone)]
pub enum Experiment {
    Ghz {
        secret: SecretSpec,
        n: usize,
        m: usize,
        noise: BsmNoise,
    },
    Ft(FtConfig),
}

/// Outcome counts over a batch of trials.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Estimate {
    pub trials: u64,
    /// The logical Bell state was identified (rightly or not).
    pub identified: u64,
    /// Identified and correct.
    pub correct: u64,
    pub failure: u64,
    pub inconsistent: u64,
    pub signonly_blocks: u64,
    pub blocks: u64,
}

impl Add for Estimate {
    type Output = Estimate;

    fn add(self, o: Estimate) -> Estimate {
        Estimate {
            trials: self.trials + o.trials,
            identified: self.identified + o.identified,
            correct: self.correct + o.correct,
            failure: self.failure + o.failure,
            inconsistent: self.inconsistent + o.inconsistent,
            signonly_blocks: self.signonly_blocks + o.signonly_blocks,
            blocks: self.blocks + o.blocks,
        }
    }
}

impl Sum for Estimate {
    fn sum<I: Iterator<Item = Estimate>>(iter: I) -> Estimate {
        iter.fold(Estimate::default(), Add::add)
    }
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

impl Estimate {
    /// Fraction of trials that teleported the secret correctly.
    pub fn success_rate(&self) -> f64 {
        ratio(self.correct, self.trials)
    }

    pub fn identified_rate(&self) -> f64 {
        ratio(self.identified, self.trials)
    }

    pub fn failure_rate(&self) -> f64 {
        ratio(self.failure, self.trials)
    }

    pub fn inconsistent_rate(&self) -> f64 {
        ratio(self.inconsistent, self.trials)
    }

    pub fn signonly_rate(&self) -> f64 {
        ratio(self.signonly_blocks, self.blocks)
    }

    /// Binomial standard error of [`Estimate::success_rate`].
    pub fn stderr(&self) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        let p = self.success_rate();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    fn from_ghz(run: &TeleportOutcome) -> Self {
        let identified = run.logical.is_identified();
        Estimate {
            trials: 1,
            identified: identified as u64,
            correct: run
                .fidelity
                .is_some_and(|f| f >= super::ft::CORRECT_FIDELITY) as u64,
            failure: (run.logical == LogicalBellOutcome::ProtocolFailure) as u64,
            inconsistent: (run.logical == LogicalBellOutcome::Inconsistent) as u64,
            signonly_blocks: 0,
            blocks: 0,
        }
    }

    fn from_ft(run: &FtRun) -> Self {
        Estimate {
            trials: 1,
            identified: matches!(run.class, FtClass::Success | FtClass::Misidentified) as u64,
            correct: (run.class == FtClass::Success) as u64,
            failure: (run.class == FtClass::Failure) as u64,
            inconsistent: (run.class == FtClass::Inconsistent) as u64,
            signonly_blocks: run
                .blocks
                .iter()
                .filter(|b| matches!(b.result, Level1Result::SignOnly(_)))
                .count() as u64,
            blocks: run.blocks.len() as u64,
        }
    }
}

/// Runs `trials` independent trials; trial `i` draws from `trial_rng(seed, i)`,
/// so the result does not depend on the thread count.
pub fn estimate_success(exp: &Experiment, trials: u64, seed: u64) -> Result<Estimate> {
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            Ok(match exp {
                Experiment::Ghz {
                    secret,
                    n,
                    m,
                    noise,
                } => Estimate::from_ghz(&run_teleportation(secret, *n, *m, noise, &mut rng)?),
                Experiment::Ft(cfg) => Estimate::from_ft(&run_ft_teleportation(cfg, &mut rng)?),
            })
        })
        .try_reduce(Estimate::default, |a, b| Ok(a + b))
}

/// One GHZ-protocol trial per index, as transcripts.
pub fn ghz_transcripts(
    secret: &SecretSpec,
    n: usize,
    m: usize,
    noise: &BsmNoise,
    trials: u64,
    seed: u64,
) -> Result<Vec<Transcript>> {
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let run = run_teleportation(secret, n, m, noise, &mut trial_rng(seed, i))?;
            Ok(Transcript::new(seed, i, secret, m, noise, &run))
        })
        .collect()
}

/// Per-block entry of an [`FtTranscript`].
#[derive(Debug, Clone, Serialize)]
pub struct BlockEntry {
    pub sender: usize,
    pub steps: Vec<String>,
    pub result: Level1Result,
    pub announced: Level1Result,
    pub tie: bool,
    pub flagged: bool,
}

/// One parity-encoded run, as written to the line-delimited JSON log.
#[derive(Debug, Clone, Serialize)]
pub struct FtTranscript {
    pub seed: u64,
    pub trial: u64,
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub m: usize,
    pub alpha: [f64; 2],
    pub beta: [f64; 2],
    pub f: f64,
    pub eta: f64,
    pub epsilon: f64,
    pub adversary: AdversaryModel,
    pub mode: SimMode,
    pub blocks: Vec<BlockEntry>,
    pub logical_outcome: LogicalBellOutcome,
    pub overruled: usize,
    pub class: FtClass,
    pub fidelity: Option<f64>,
}

fn block_entry(sender: usize, rec: &Level1Record, announced: Level1Result) -> BlockEntry {
    BlockEntry {
        sender,
        steps: rec.steps.iter().map(|(v, o)| format!("{v}:{o}")).collect(),
        result: rec.result,
        announced,
        tie: rec.tie,
        flagged: rec.flagged,
    }
}

impl FtTranscript {
    pub fn new(seed: u64, trial: u64, cfg: &FtConfig, run: &FtRun) -> Self {
        FtTranscript {
            seed,
            trial,
            n: cfg.enc.n,
            p: cfg.enc.p,
            q: cfg.enc.q,
            m: cfg.m,
            alpha: [cfg.secret.alpha.re, cfg.secret.alpha.im],
            beta: [cfg.secret.beta.re, cfg.secret.beta.im],
            f: cfg.noise.failure_detection,
            eta: cfg.noise.loss_rate,
            epsilon: cfg.noise.flip_error_rate,
            adversary: cfg.adversary.clone(),
            mode: cfg.mode,
            blocks: run
                .blocks
                .iter()
                .zip(&run.announced)
                .enumerate()
                .map(|(j, (rec, a))| block_entry(j + 1, rec, *a))
                .collect(),
            logical_outcome: run.decision.outcome,
            overruled: run.decision.overruled,
            class: run.class,
            fidelity: run.fidelity,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("transcripts serialize")
    }
}

/// One parity-encoded trial per index, as transcripts.
pub fn ft_transcripts(cfg: &FtConfig, trials: u64, seed: u64) -> Result<Vec<FtTranscript>> {
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let run = run_ft_teleportation(cfg, &mut trial_rng(seed, i))?;
            Ok(FtTranscript::new(seed, i, cfg, &run))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::EncodingParams;

    #[test]
    fn estimates_are_reproducible() {
        let enc = EncodingParams::parity(2, 3, 1).unwrap();
        let exp = Experiment::Ft(
            FtConfig::new(SecretSpec::balanced(), enc, 2)
                .with_noise(BsmNoise::new(0.8, 0.05, 0.01).unwrap()),
        );
        let a = estimate_success(&exp, 500, 42).unwrap();
        let b = estimate_success(&exp, 500, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.trials, 500);
        assert_eq!(a.identified + a.failure + a.inconsistent, 500);
    }

    #[test]
    fn ghz_half_success_at_half_detection() {
        let exp = Experiment::Ghz {
            secret: SecretSpec::balanced(),
            n: 2,
            m: 1,
            noise: BsmNoise::new(0.5, 0.0, 0.0).unwrap(),
        };
        let e = estimate_success(&exp, 4000, 7).unwrap();
        assert!((e.success_rate() - 0.5).abs() < 4.0 * e.stderr() + 1e-9);
    }
}
