//! Two-photon Bell-state analyzers.
//!
//! A linear-optics analyzer resolves two of the four Bell states. The three
//! variants differ only in which two; everything else lands in a two-state
//! failure subspace. Failures are recognized with probability `f`, missing
//! photons are always recognized, and detected labels may be misreported
//! with probability `ε`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::encoding::{BellLabel, Level, Sign, Symbol};
use crate::error::{Error, Result};
use crate::qstate::{project_two_photon_all, PureState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BsmVariant {
    /// Resolves `ψ+` and `ψ−`.
    Bpsi,
    /// Resolves `φ+` and `ψ+`.
    Bplus,
    /// Resolves `φ−` and `ψ−`.
    Bminus,
}

impl BsmVariant {
    pub fn detected_set(self) -> [BellLabel; 2] {
        use Sign::*;
        use Symbol::*;
        match self {
            BsmVariant::Bpsi => [BellLabel::photon(Psi, Plus), BellLabel::photon(Psi, Minus)],
            BsmVariant::Bplus => [BellLabel::photon(Phi, Plus), BellLabel::photon(Psi, Plus)],
            BsmVariant::Bminus => [BellLabel::photon(Phi, Minus), BellLabel::photon(Psi, Minus)],
        }
    }

    pub fn detects(self, label: BellLabel) -> bool {
        self.detected_set().contains(&label.at_level(Level::Photon))
    }

    /// The sign-resolving variant matching `sign`.
    pub fn for_sign(sign: Sign) -> Self {
        match sign {
            Sign::Plus => BsmVariant::Bplus,
            Sign::Minus => BsmVariant::Bminus,
        }
    }
}

impl fmt::Display for BsmVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BsmVariant::Bpsi => "Bpsi",
            BsmVariant::Bplus => "B+",
            BsmVariant::Bminus => "B-",
        })
    }
}

/// The two photon-level labels a variant cannot resolve.
pub fn failure_subspace(variant: BsmVariant) -> [BellLabel; 2] {
    let detected = variant.detected_set();
    let mut out = BellLabel::photon_all()
        .into_iter()
        .filter(|l| !detected.contains(l));
    [out.next().unwrap(), out.next().unwrap()]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BellOutcome {
    Detected(BellLabel),
    FailureDetected,
    FailureUndetected,
    LossDetected,
}

impl BellOutcome {
    pub fn label(&self) -> Option<BellLabel> {
        match self {
            BellOutcome::Detected(l) => Some(*l),
            _ => None,
        }
    }

    pub fn is_detected(&self) -> bool {
        matches!(self, BellOutcome::Detected(_))
    }
}

impl fmt::Display for BellOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BellOutcome::Detected(l) => write!(f, "{}", l.at_level(Level::Photon)),
            BellOutcome::FailureDetected => f.write_str("fail"),
            BellOutcome::FailureUndetected => f.write_str("fail?"),
            BellOutcome::LossDetected => f.write_str("loss"),
        }
    }
}

impl FromStr for BellOutcome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        use Sign::*;
        use Symbol::*;
        let out = match s {
            "fail" => BellOutcome::FailureDetected,
            "fail?" => BellOutcome::FailureUndetected,
            "loss" => BellOutcome::LossDetected,
            "phi+" => BellOutcome::Detected(BellLabel::photon(Phi, Plus)),
            "phi-" => BellOutcome::Detected(BellLabel::photon(Phi, Minus)),
            "psi+" => BellOutcome::Detected(BellLabel::photon(Psi, Plus)),
            "psi-" => BellOutcome::Detected(BellLabel::photon(Psi, Minus)),
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown Bell outcome {other:?}"
                )))
            }
        };
        Ok(out)
    }
}

impl Serialize for BellOutcome {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BellOutcome {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Imperfections of a single analyzer use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BsmNoise {
    /// Probability that a failure is recognized as such.
    pub failure_detection: f64,
    /// Per-photon loss probability.
    pub loss_rate: f64,
    /// Probability that a detected label is misreported (half sign, half symbol).
    pub flip_error_rate: f64,
}

impl Default for BsmNoise {
    fn default() -> Self {
        Self::noiseless()
    }
}

impl BsmNoise {
    pub fn new(failure_detection: f64, loss_rate: f64, flip_error_rate: f64) -> Result<Self> {
        for (name, v) in [
            ("f", failure_detection),
            ("eta", loss_rate),
            ("epsilon", flip_error_rate),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter(format!(
                    "{name}={v} outside [0, 1]"
                )));
            }
        }
        Ok(BsmNoise {
            failure_detection,
            loss_rate,
            flip_error_rate,
        })
    }

    /// `f = 1`, `η = 0`, `ε = 0`.
    pub fn noiseless() -> Self {
        BsmNoise {
            failure_detection: 1.0,
            loss_rate: 0.0,
            flip_error_rate: 0.0,
        }
    }

    /// Probability that at least one photon of a pair is lost.
    pub fn pair_loss(&self) -> f64 {
        1.0 - (1.0 - self.loss_rate) * (1.0 - self.loss_rate)
    }
}

/// Classical report distribution when the pair is actually in `true_label`
/// and no photon is lost.
///
/// A detected label is reported faithfully with probability `1 − ε`, with
/// its sign flipped with `ε/2` and its symbol flipped with `ε/2`. A misreport
/// may name a label outside the variant's detected set.
pub fn report_distribution(
    true_label: BellLabel,
    variant: BsmVariant,
    noise: &BsmNoise,
) -> Vec<(BellOutcome, f64)> {
    let label = true_label.at_level(Level::Photon);
    let mut out = Vec::with_capacity(3);
    if variant.detects(label) {
        let eps = noise.flip_error_rate;
        out.push((BellOutcome::Detected(label), 1.0 - eps));
        if eps > 0.0 {
            out.push((BellOutcome::Detected(label.flip_sign()), eps / 2.0));
            out.push((BellOutcome::Detected(label.flip_symbol()), eps / 2.0));
        }
    } else {
        let f = noise.failure_detection;
        if f > 0.0 {
            out.push((BellOutcome::FailureDetected, f));
        }
        if f < 1.0 {
            out.push((BellOutcome::FailureUndetected, 1.0 - f));
        }
    }
    out
}

/// Full report distribution for a pair in `true_label`, including the chance
/// `1 − (1 − η)²` that one of its photons was lost.
pub fn outcome_distribution(
    true_label: BellLabel,
    variant: BsmVariant,
    noise: &BsmNoise,
) -> Vec<(BellOutcome, f64)> {
    let lost = noise.pair_loss();
    let mut out: Vec<(BellOutcome, f64)> = report_distribution(true_label, variant, noise)
        .into_iter()
        .map(|(o, p)| (o, p * (1.0 - lost)))
        .filter(|(_, p)| *p > 0.0)
        .collect();
    if lost > 0.0 {
        out.push((BellOutcome::LossDetected, lost));
    }
    out
}

fn sample_weighted<T: Copy, R: Rng + ?Sized>(items: &[(T, f64)], rng: &mut R) -> T {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (item, w) in items {
        acc += w;
        if u < acc {
            return *item;
        }
    }
    items.last().expect("nonempty distribution").0
}

/// Samples the report for a pair in a known Bell state (no loss).
pub fn sample_report<R: Rng + ?Sized>(
    true_label: BellLabel,
    variant: BsmVariant,
    noise: &BsmNoise,
    rng: &mut R,
) -> BellOutcome {
    sample_weighted(&report_distribution(true_label, variant, noise), rng)
}

/// Samples [`outcome_distribution`].
pub fn sample_outcome<R: Rng + ?Sized>(
    true_label: BellLabel,
    variant: BsmVariant,
    noise: &BsmNoise,
    rng: &mut R,
) -> BellOutcome {
    sample_weighted(&outcome_distribution(true_label, variant, noise), rng)
}

/// Runs `variant` on photons `(i, j)` of `state`.
///
/// A lost photon gives `LossDetected` and both photons are flagged lost. A
/// detected outcome removes the two photons from the returned state; a failure
/// leaves the Lüders-projected state with both photons flagged lost. Loss is
/// not drawn here; callers flag lost photons beforehand.
pub fn measure_bell<R: Rng + ?Sized>(
    state: &PureState,
    i: usize,
    j: usize,
    variant: BsmVariant,
    noise: &BsmNoise,
    rng: &mut R,
) -> Result<(BellOutcome, PureState)> {
    state.check_photon(i)?;
    state.check_photon(j)?;
    if i == j {
        return Err(Error::SamePhoton(i));
    }
    if state.is_lost(i) || state.is_lost(j) {
        let out = state.with_lost(i, true)?.with_lost(j, true)?;
        return Ok((BellOutcome::LossDetected, out));
    }
    let detected = variant.detected_set();
    let kets: Vec<PureState> = detected.iter().map(|l| l.photon_ket()).collect();
    let branches = project_two_photon_all(state, i, j, &kets)?;
    let weights: Vec<(usize, f64)> = branches
        .iter()
        .filter(|b| b.state.is_some())
        .map(|b| (b.outcome, b.probability))
        .collect();
    if weights.is_empty() {
        return Err(Error::ZeroState);
    }
    let pick = sample_weighted(&weights, rng);
    let branch = branches
        .into_iter()
        .find(|b| b.outcome == pick)
        .expect("sampled branch exists");
    let post = branch.state.expect("nonzero branch");
    let true_label = if pick < detected.len() {
        detected[pick]
    } else {
        // Any failure-subspace label yields the same failure report.
        failure_subspace(variant)[0]
    };
    Ok((sample_report(true_label, variant, noise, rng), post))
}
