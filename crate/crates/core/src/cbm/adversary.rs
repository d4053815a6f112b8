use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Serialize, Serializer};

use super::level1::Level1Result;
use crate::error::{Error, Result};

/// How a dishonest sender rewrites its block-level announcement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    FlipSign,
    FlipSymbol,
    ReportFailure,
    /// One of the three above, uniformly at random.
    Random,
}

impl Strategy {
    const DETERMINISTIC: [Strategy; 3] = [
        Strategy::FlipSign,
        Strategy::FlipSymbol,
        Strategy::ReportFailure,
    ];

    fn apply_fixed(self, r: Level1Result) -> Level1Result {
        match (self, r) {
            (Strategy::ReportFailure, _) => Level1Result::Failure,
            (Strategy::FlipSign, Level1Result::Success { symbol, sign }) => Level1Result::Success {
                symbol,
                sign: sign.flip(),
            },
            (Strategy::FlipSign, Level1Result::SignOnly(s)) => Level1Result::SignOnly(s.flip()),
            (Strategy::FlipSymbol, Level1Result::Success { symbol, sign }) => {
                Level1Result::Success {
                    symbol: symbol.flip(),
                    sign,
                }
            }
            (_, other) => other,
        }
    }

    /// Possible rewrites of `r` with their probabilities.
    pub fn rewrites(self, r: Level1Result) -> Vec<(Level1Result, f64)> {
        match self {
            Strategy::Random => Self::DETERMINISTIC
                .iter()
                .map(|s| (s.apply_fixed(r), 1.0 / 3.0))
                .collect(),
            s => vec![(s.apply_fixed(r), 1.0)],
        }
    }

    pub fn sample<R: Rng + ?Sized>(self, r: Level1Result, rng: &mut R) -> Level1Result {
        match self {
            Strategy::Random => Self::DETERMINISTIC[rng.random_range(0..3)].apply_fixed(r),
            s => s.apply_fixed(r),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::FlipSign => "flip-sign",
            Strategy::FlipSymbol => "flip-symbol",
            Strategy::ReportFailure => "report-failure",
            Strategy::Random => "random",
        })
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "flip-sign" => Ok(Strategy::FlipSign),
            "flip-symbol" => Ok(Strategy::FlipSymbol),
            "report-failure" => Ok(Strategy::ReportFailure),
            "random" => Ok(Strategy::Random),
            other => Err(Error::InvalidParameter(format!(
                "unknown adversary strategy {other:?}"
            ))),
        }
    }
}

/// Dishonest senders (1-based) and what they do. Receivers are always honest.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AdversaryModel {
    pub dishonest: Vec<usize>,
    pub strategy: Option<Strategy>,
}

impl AdversaryModel {
    pub fn honest() -> Self {
        Self::default()
    }

    pub fn new(dishonest: Vec<usize>, strategy: Strategy) -> Self {
        AdversaryModel {
            dishonest,
            strategy: Some(strategy),
        }
    }

    pub fn is_honest(&self) -> bool {
        self.strategy.is_none() || self.dishonest.is_empty()
    }

    pub fn validate(&self, senders: usize) -> Result<()> {
        match self.dishonest.iter().find(|&&d| d == 0 || d > senders) {
            Some(d) => Err(Error::InvalidParameter(format!(
                "dishonest sender {d} is not one of the {senders} senders"
            ))),
            None => Ok(()),
        }
    }

    fn strategy_for(&self, sender: usize) -> Option<Strategy> {
        self.strategy.filter(|_| self.dishonest.contains(&sender))
    }

    /// Every announcement list the coalition can produce from `honest`,
    /// with probabilities.
    pub fn announcements(&self, honest: &[Level1Result]) -> Vec<(Vec<Level1Result>, f64)> {
        let mut out = vec![(Vec::with_capacity(honest.len()), 1.0)];
        for (k, r) in honest.iter().enumerate() {
            let options = match self.strategy_for(k + 1) {
                Some(s) => s.rewrites(*r),
                None => vec![(*r, 1.0)],
            };
            out = out
                .iter()
                .flat_map(|(prefix, w)| {
                    options.iter().map(move |(o, p)| {
                        let mut v: Vec<Level1Result> = prefix.clone();
                        v.push(*o);
                        (v, w * p)
                    })
                })
                .collect();
        }
        out
    }

    pub fn sample<R: Rng + ?Sized>(
        &self,
        honest: &[Level1Result],
        rng: &mut R,
    ) -> Vec<Level1Result> {
        honest
            .iter()
            .enumerate()
            .map(|(k, r)| match self.strategy_for(k + 1) {
                Some(s) => s.sample(*r, rng),
                None => *r,
            })
            .collect()
    }
}

impl fmt::Display for AdversaryModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.strategy {
            Some(s) if !self.dishonest.is_empty() => {
                let who: Vec<String> = self.dishonest.iter().map(|d| format!("s{d}")).collect();
                write!(f, "{s}:{}", who.join("+"))
            }
            _ => f.write_str("honest"),
        }
    }
}

impl Serialize for AdversaryModel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
