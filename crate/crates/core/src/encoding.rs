//! GHZ and parity-state encodings, Bell labels at every level, and the
//! explicit expansion of logical and block Bell states into photon-pair Bell
//! states.
//!
//! Two photon orderings appear here. States are *stored* in block order: the
//! first logical qubit's `N` photons, then the second qubit's `N` photons
//! (`1, …, N, 1′, …, N′`). Decompositions are *expressed* in paired order
//! (`1, 1′, 2, 2′, …`); [`paired_to_stored`] is the explicit permutation
//! between the two.
//!
//! Photon-level Bell states are always in the H/V basis:
//! `φ± = |HH⟩ ± |VV⟩`, `ψ± = |HV⟩ ± |VH⟩` (normalized). With that convention a
//! parity block Bell state `φ±_(p)` expands into an even number of `ψ±` with
//! `φ±` on the other pairs, and `ψ±_(p)` into an odd number.

use std::fmt;

use num_complex::Complex64;
use num_rational::Ratio;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{diagonal_ket, PureState, ONE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Symbol {
    Phi,
    Psi,
}

impl Symbol {
    pub fn flip(self) -> Self {
        match self {
            Symbol::Phi => Symbol::Psi,
            Symbol::Psi => Symbol::Phi,
        }
    }

    /// `Phi` for an even count of ψ-type constituents, `Psi` for odd.
    pub fn from_psi_parity(count: usize) -> Self {
        if count.is_multiple_of(2) {
            Symbol::Phi
        } else {
            Symbol::Psi
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn is_minus(self) -> bool {
        self == Sign::Minus
    }

    /// `(−)^count`.
    pub fn from_minus_count(count: usize) -> Self {
        if count.is_multiple_of(2) {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    fn as_char(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Level {
    Photon,
    Block,
    Logical,
}

/// A Bell state named by symbol, sign and the level it lives at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BellLabel {
    pub symbol: Symbol,
    pub sign: Sign,
    pub level: Level,
}

impl BellLabel {
    pub const fn new(symbol: Symbol, sign: Sign, level: Level) -> Self {
        BellLabel {
            symbol,
            sign,
            level,
        }
    }

    pub const fn photon(symbol: Symbol, sign: Sign) -> Self {
        Self::new(symbol, sign, Level::Photon)
    }

    pub const fn block(symbol: Symbol, sign: Sign) -> Self {
        Self::new(symbol, sign, Level::Block)
    }

    pub const fn logical(symbol: Symbol, sign: Sign) -> Self {
        Self::new(symbol, sign, Level::Logical)
    }

    /// The four labels of a level, ordered `φ+, φ−, ψ+, ψ−`.
    pub fn all(level: Level) -> [BellLabel; 4] {
        [
            Self::new(Symbol::Phi, Sign::Plus, level),
            Self::new(Symbol::Phi, Sign::Minus, level),
            Self::new(Symbol::Psi, Sign::Plus, level),
            Self::new(Symbol::Psi, Sign::Minus, level),
        ]
    }

    pub fn photon_all() -> [BellLabel; 4] {
        Self::all(Level::Photon)
    }

    pub fn at_level(self, level: Level) -> Self {
        Self { level, ..self }
    }

    pub fn flip_sign(self) -> Self {
        Self {
            sign: self.sign.flip(),
            ..self
        }
    }

    pub fn flip_symbol(self) -> Self {
        Self {
            symbol: self.symbol.flip(),
            ..self
        }
    }

    /// Normalized two-photon Bell state in the H/V basis (level ignored).
    pub fn photon_ket(self) -> PureState {
        let s = Complex64::new(self.sign.as_f64(), 0.0);
        let terms = match self.symbol {
            Symbol::Phi => [("HH", ONE), ("VV", s)],
            Symbol::Psi => [("HV", ONE), ("VH", s)],
        };
        PureState::from_terms(&terms).expect("Bell kets are nonzero")
    }
}

impl fmt::Display for BellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (sym, suffix) = match (self.level, self.symbol) {
            (Level::Photon, Symbol::Phi) => ("phi", ""),
            (Level::Photon, Symbol::Psi) => ("psi", ""),
            (Level::Block, Symbol::Phi) => ("phi", "(p)"),
            (Level::Block, Symbol::Psi) => ("psi", "(p)"),
            (Level::Logical, Symbol::Phi) => ("Phi", "_L"),
            (Level::Logical, Symbol::Psi) => ("Psi", "_L"),
        };
        write!(f, "{sym}{}{suffix}", self.sign.as_char())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    Ghz,
    Parity,
}

/// Encoding of one logical qubit: `n` blocks of `p` photons, with the level-1
/// retry threshold `q` used by the concatenated Bell measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EncodingParams {
    pub scheme: Scheme,
    pub n: usize,
    pub p: usize,
    pub q: usize,
}

impl EncodingParams {
    pub fn ghz(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("GHZ encoding needs n ≥ 1".into()));
        }
        Ok(EncodingParams {
            scheme: Scheme::Ghz,
            n,
            p: 1,
            q: 0,
        })
    }

    pub fn parity(n: usize, p: usize, q: usize) -> Result<Self> {
        if n == 0 || p == 0 {
            return Err(Error::InvalidParameter(format!(
                "parity encoding needs n, p ≥ 1 (got n={n}, p={p})"
            )));
        }
        if q >= p {
            return Err(Error::InvalidParameter(format!(
                "retry threshold q={q} must satisfy q ≤ p−1 = {}",
                p - 1
            )));
        }
        Ok(EncodingParams {
            scheme: Scheme::Parity,
            n,
            p,
            q,
        })
    }

    /// Parity encoding with `q = p − 1`.
    pub fn parity_default(n: usize, p: usize) -> Result<Self> {
        Self::parity(n, p, p.saturating_sub(1))
    }

    /// `N = n·p`.
    pub fn photons_per_qubit(&self) -> usize {
        self.n * self.p
    }
}

/// Secret amplitudes `α|0_L⟩ + β|1_L⟩`, normalized on construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecretSpec {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl SecretSpec {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        if norm <= f64::MIN_POSITIVE || !norm.is_finite() {
            return Err(Error::InvalidParameter(
                "secret needs a nonzero, finite (α, β)".into(),
            ));
        }
        Ok(SecretSpec {
            alpha: alpha / norm,
            beta: beta / norm,
        })
    }

    pub fn from_parts(alpha_re: f64, alpha_im: f64, beta_re: f64, beta_im: f64) -> Result<Self> {
        Self::new(
            Complex64::new(alpha_re, alpha_im),
            Complex64::new(beta_re, beta_im),
        )
    }

    /// `α = β = 1/√2`.
    pub fn balanced() -> Self {
        Self::from_parts(1.0, 0.0, 1.0, 0.0).expect("nonzero")
    }

    /// Haar-uniform random secret.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let parts: [f64; 4] = std::array::from_fn(|_| StandardNormal.sample(rng));
            if let Ok(s) = Self::from_parts(parts[0], parts[1], parts[2], parts[3]) {
                return s;
            }
        }
    }
}

/// `(|H⟩^⊗N + |V⟩^⊗N)/√2`.
pub fn ghz_state(num_photons: usize) -> Result<PureState> {
    if num_photons == 0 {
        return Err(Error::InvalidParameter("GHZ state needs N ≥ 1".into()));
    }
    PureState::from_terms(&[
        ("H".repeat(num_photons), ONE),
        ("V".repeat(num_photons), ONE),
    ])
}

/// Normalized block ket `|±^(p)⟩ ∝ |+⟩^⊗p ± |−⟩^⊗p`.
///
/// For `p = 1` this is `|H⟩` or `|V⟩`, so a `(n, 1)` parity code coincides
/// with the `n`-photon GHZ code.
pub fn block_ket(sign: Sign, p: usize) -> Result<PureState> {
    if p == 0 {
        return Err(Error::InvalidParameter("block needs p ≥ 1".into()));
    }
    let plus = diagonal_ket(true);
    let minus = diagonal_ket(false);
    let mut all_plus = plus.clone();
    let mut all_minus = minus.clone();
    for _ in 1..p {
        all_plus = all_plus.tensor(&plus)?;
        all_minus = all_minus.tensor(&minus)?;
    }
    let s = sign.as_f64();
    let amps = all_plus
        .amplitudes()
        .iter()
        .zip(all_minus.amplitudes())
        .map(|(a, b)| a + b * s)
        .collect();
    PureState::from_amplitudes(p, amps)
}

/// Logical basis ket `|0_L⟩` (`one = false`) or `|1_L⟩`.
pub fn logical_basis_ket(one: bool, enc: &EncodingParams) -> Result<PureState> {
    match enc.scheme {
        Scheme::Ghz => PureState::basis(&if one { "V" } else { "H" }.repeat(enc.n)),
        Scheme::Parity => {
            let block = block_ket(if one { Sign::Minus } else { Sign::Plus }, enc.p)?;
            let mut out = block.clone();
            for _ in 1..enc.n {
                out = out.tensor(&block)?;
            }
            Ok(out)
        }
    }
}

fn superpose(a: &PureState, ca: Complex64, b: &PureState, cb: Complex64) -> Result<PureState> {
    let amps = a
        .amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| x * ca + y * cb)
        .collect();
    PureState::from_amplitudes(a.num_photons(), amps)
}

/// `α|0_L⟩ + β|1_L⟩` in the chosen encoding.
pub fn shared_secret_state(secret: &SecretSpec, enc: &EncodingParams) -> Result<PureState> {
    let zero = logical_basis_ket(false, enc)?;
    let one = logical_basis_ket(true, enc)?;
    superpose(&zero, secret.alpha, &one, secret.beta)
}

/// GHZ network channel over `n` sender photons followed by `m` receiver photons.
pub fn network_channel(enc: &EncodingParams, m: usize) -> Result<PureState> {
    if enc.scheme != Scheme::Ghz {
        return Err(Error::EncodingMismatch(
            "parity channels are built with logical_bell_state".into(),
        ));
    }
    if m == 0 {
        return Err(Error::InvalidParameter(
            "network needs m ≥ 1 receivers".into(),
        ));
    }
    ghz_state(enc.n + m)
}

fn bell_from_kets(label: BellLabel, zero: &PureState, one: &PureState) -> Result<PureState> {
    let s = Complex64::new(label.sign.as_f64(), 0.0);
    let (first, second) = match label.symbol {
        Symbol::Phi => (zero.tensor(zero)?, one.tensor(one)?),
        Symbol::Psi => (zero.tensor(one)?, one.tensor(zero)?),
    };
    superpose(&first, ONE, &second, s)
}

/// Bell state of `label` in stored (block) order.
///
/// * `Logical` labels give `2N` photons: `|0_L 0_L⟩ ± |1_L 1_L⟩` or `|0_L 1_L⟩ ± |1_L 0_L⟩`.
/// * `Block` labels give `2p` photons built from `|±^(p)⟩` (parity scheme only).
/// * `Photon` labels give the two-photon H/V Bell state.
pub fn logical_bell_state(label: BellLabel, enc: &EncodingParams) -> Result<PureState> {
    match label.level {
        Level::Photon => Ok(label.photon_ket()),
        Level::Block => {
            if enc.scheme != Scheme::Parity {
                return Err(Error::EncodingMismatch(
                    "block-level Bell states need the parity scheme".into(),
                ));
            }
            let zero = block_ket(Sign::Plus, enc.p)?;
            let one = block_ket(Sign::Minus, enc.p)?;
            bell_from_kets(label, &zero, &one)
        }
        Level::Logical => {
            let zero = logical_basis_ket(false, enc)?;
            let one = logical_basis_ket(true, enc)?;
            bell_from_kets(label, &zero, &one)
        }
    }
}

/// Permutation taking a paired-order state (`1, 1′, 2, 2′, …`) to stored order
/// (`1, …, N, 1′, …, N′`), in the convention of [`PureState::permute`].
pub fn paired_to_stored(photons_per_side: usize) -> Vec<usize> {
    let n = photons_per_side;
    (0..2 * n)
        .map(|x| if x < n { 2 * x } else { 2 * (x - n) + 1 })
        .collect()
}

/// Inverse of [`paired_to_stored`].
pub fn stored_to_paired(photons_per_side: usize) -> Vec<usize> {
    let n = photons_per_side;
    (0..2 * n)
        .map(|x| if x % 2 == 0 { x / 2 } else { n + x / 2 })
        .collect()
}

/// One product term of a Bell-state expansion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionTerm {
    /// Block-level label per block (photon-level for the GHZ scheme, where a
    /// block is one photon).
    pub block_labels: Vec<BellLabel>,
    /// Photon-pair label per pair `(k, k′)`, in pair order.
    pub pair_labels: Vec<BellLabel>,
    /// Probability weight; every term of an expansion carries the same weight.
    pub weight: Ratio<u64>,
}

/// Expansion of a Bell state into products of photon-pair Bell states.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub label: BellLabel,
    pub enc: EncodingParams,
    pub terms: Vec<DecompositionTerm>,
}

/// All length-`len` patterns whose count of `true` entries has the given parity.
fn parity_patterns(len: usize, odd: bool) -> Vec<Vec<bool>> {
    (0u64..1 << len)
        .filter(|mask| (mask.count_ones() % 2 == 1) == odd)
        .map(|mask| (0..len).map(|k| mask >> (len - 1 - k) & 1 == 1).collect())
        .collect()
}

/// Pair labels of one block Bell state: all pairs share its sign, and the
/// number of ψ pairs has the parity of its symbol.
fn block_pair_patterns(block: BellLabel, p: usize) -> Vec<Vec<BellLabel>> {
    parity_patterns(p, block.symbol == Symbol::Psi)
        .into_iter()
        .map(|psi| {
            psi.into_iter()
                .map(|is_psi| {
                    let symbol = if is_psi { Symbol::Psi } else { Symbol::Phi };
                    BellLabel::photon(symbol, block.sign)
                })
                .collect()
        })
        .collect()
}

/// Block labels of a logical Bell state: all blocks share its symbol, and the
/// number of minus-signed blocks has the parity of its sign.
fn logical_block_patterns(label: BellLabel, n: usize, level: Level) -> Vec<Vec<BellLabel>> {
    parity_patterns(n, label.sign == Sign::Minus)
        .into_iter()
        .map(|minus| {
            minus
                .into_iter()
                .map(|is_minus| {
                    let sign = if is_minus { Sign::Minus } else { Sign::Plus };
                    BellLabel::new(label.symbol, sign, level)
                })
                .collect()
        })
        .collect()
}

/// Expands a logical or block Bell state into photon-pair Bell products.
pub fn decompose_logical_bell(label: BellLabel, enc: &EncodingParams) -> Result<Decomposition> {
    let mut raw: Vec<(Vec<BellLabel>, Vec<BellLabel>)> = Vec::new();
    match (label.level, enc.scheme) {
        (Level::Photon, _) => raw.push((vec![label], vec![label])),
        (Level::Block, Scheme::Ghz) => {
            return Err(Error::EncodingMismatch(
                "block-level labels need the parity scheme".into(),
            ))
        }
        (Level::Block, Scheme::Parity) => {
            for pairs in block_pair_patterns(label, enc.p) {
                raw.push((vec![label], pairs));
            }
        }
        (Level::Logical, Scheme::Ghz) => {
            for pairs in logical_block_patterns(label, enc.n, Level::Photon) {
                raw.push((pairs.clone(), pairs));
            }
        }
        (Level::Logical, Scheme::Parity) => {
            for blocks in logical_block_patterns(label, enc.n, Level::Block) {
                let mut partial: Vec<Vec<BellLabel>> = vec![Vec::new()];
                for block in &blocks {
                    let options = block_pair_patterns(*block, enc.p);
                    partial = partial
                        .iter()
                        .flat_map(|prefix| {
                            options.iter().map(move |opt| {
                                let mut v = prefix.clone();
                                v.extend_from_slice(opt);
                                v
                            })
                        })
                        .collect();
                }
                for pairs in partial {
                    raw.push((blocks.clone(), pairs));
                }
            }
        }
    }
    let weight = Ratio::new(1, raw.len() as u64);
    Ok(Decomposition {
        label,
        enc: *enc,
        terms: raw
            .into_iter()
            .map(|(block_labels, pair_labels)| DecompositionTerm {
                block_labels,
                pair_labels,
                weight,
            })
            .collect(),
    })
}

impl Decomposition {
    /// Photons per side of the Bell pair this expansion covers.
    pub fn photons_per_side(&self) -> usize {
        match self.label.level {
            Level::Photon => 1,
            Level::Block => self.enc.p,
            Level::Logical => self.enc.photons_per_qubit(),
        }
    }

    /// Rebuilds the state in stored order from the product terms.
    pub fn reassemble(&self) -> Result<PureState> {
        let side = self.photons_per_side();
        let dim = 1usize << (2 * side);
        let mut acc = vec![Complex64::new(0.0, 0.0); dim];
        for term in &self.terms {
            let amp = (*term.weight.numer() as f64 / *term.weight.denom() as f64).sqrt();
            let mut product = term.pair_labels[0].photon_ket();
            for l in &term.pair_labels[1..] {
                product = product.tensor(&l.photon_ket())?;
            }
            for (a, b) in acc.iter_mut().zip(product.amplitudes()) {
                *a += b * amp;
            }
        }
        PureState::from_amplitudes(2 * side, acc)?.permute(&paired_to_stored(side))
    }

    /// Sum of term weights (exactly one for a complete expansion).
    pub fn total_weight(&self) -> Ratio<u64> {
        self.terms
            .iter()
            .fold(Ratio::new(0, 1), |acc, t| acc + t.weight)
    }
}

fn random_parity_pattern<R: Rng + ?Sized>(len: usize, odd: bool, rng: &mut R) -> Vec<bool> {
    let mut bits: Vec<bool> = (0..len).map(|_| rng.random::<bool>()).collect();
    let ones = bits.iter().filter(|b| **b).count();
    if (ones % 2 == 1) != odd {
        let last = len - 1;
        bits[last] = !bits[last];
    }
    bits
}

/// Draws one pair-label pattern uniformly from the expansion of a logical
/// Bell state, without materializing every term.
pub fn sample_pair_labels<R: Rng + ?Sized>(
    label: BellLabel,
    enc: &EncodingParams,
    rng: &mut R,
) -> Vec<BellLabel> {
    let minus = random_parity_pattern(enc.n, label.sign == Sign::Minus, rng);
    let mut pairs = Vec::with_capacity(enc.photons_per_qubit());
    for is_minus in minus {
        let sign = if is_minus { Sign::Minus } else { Sign::Plus };
        match enc.scheme {
            Scheme::Ghz => pairs.push(BellLabel::photon(label.symbol, sign)),
            Scheme::Parity => {
                let psi = random_parity_pattern(enc.p, label.symbol == Symbol::Psi, rng);
                pairs.extend(psi.into_iter().map(|is_psi| {
                    BellLabel::photon(if is_psi { Symbol::Psi } else { Symbol::Phi }, sign)
                }));
            }
        }
    }
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::NORM_TOL;

    const R2: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn ghz_examples() {
        let one = ghz_state(1).unwrap();
        assert!((one.amplitude("H").unwrap().re - R2).abs() < NORM_TOL);
        assert!((one.amplitude("V").unwrap().re - R2).abs() < NORM_TOL);
        let four = ghz_state(4).unwrap();
        for (k, a) in four.amplitudes().iter().enumerate() {
            let want = if k == 0 || k == 15 { R2 } else { 0.0 };
            assert!((a.re - want).abs() < NORM_TOL && a.im.abs() < NORM_TOL);
        }
        assert!((four.overlap(&ghz_state(4).unwrap()).unwrap() - 1.0).abs() < NORM_TOL);
        assert!(ghz_state(0).is_err());
    }

    #[test]
    fn secret_state_examples() {
        let enc = EncodingParams::ghz(2).unwrap();
        let a = shared_secret_state(&SecretSpec::balanced(), &enc).unwrap();
        assert!(a.approx_eq(&ghz_state(2).unwrap(), NORM_TOL));
        let c = shared_secret_state(&SecretSpec::from_parts(1.0, 0.0, 0.0, 0.0).unwrap(), &enc)
            .unwrap();
        assert!(c.approx_eq(&PureState::basis("HH").unwrap(), NORM_TOL));
    }

    #[test]
    fn single_photon_parity_code_is_the_polarization_basis() {
        // |+^(1)⟩ ∝ |+⟩ + |−⟩ ∝ |H⟩, so (1,1) parity equals α|H⟩ + β|V⟩.
        let secret = SecretSpec::from_parts(0.6, 0.0, 0.0, 0.8).unwrap();
        let parity =
            shared_secret_state(&secret, &EncodingParams::parity(1, 1, 0).unwrap()).unwrap();
        let ghz = shared_secret_state(&secret, &EncodingParams::ghz(1).unwrap()).unwrap();
        assert!(parity.approx_eq(&ghz, NORM_TOL));
        let parity3 =
            shared_secret_state(&secret, &EncodingParams::parity(3, 1, 0).unwrap()).unwrap();
        let ghz3 = shared_secret_state(&secret, &EncodingParams::ghz(3).unwrap()).unwrap();
        assert!(parity3.approx_eq(&ghz3, NORM_TOL));
    }

    #[test]
    fn channel_examples() {
        let c = network_channel(&EncodingParams::ghz(2).unwrap(), 2).unwrap();
        assert!(c.approx_eq(&ghz_state(4).unwrap(), NORM_TOL));
        let c = network_channel(&EncodingParams::ghz(1).unwrap(), 1).unwrap();
        assert!(c.approx_eq(&BellLabel::photon_all()[0].photon_ket(), NORM_TOL));
        let c = network_channel(&EncodingParams::ghz(3).unwrap(), 5).unwrap();
        assert_eq!(c.num_photons(), 8);
        assert!(network_channel(&EncodingParams::ghz(3).unwrap(), 0).is_err());
        assert!(network_channel(&EncodingParams::parity(2, 2, 1).unwrap(), 1).is_err());
    }

    #[test]
    fn logical_bell_examples() {
        let g1 = EncodingParams::ghz(1).unwrap();
        let phi = logical_bell_state(BellLabel::logical(Symbol::Phi, Sign::Plus), &g1).unwrap();
        assert!(phi.approx_eq(&BellLabel::photon_all()[0].photon_ket(), NORM_TOL));

        let g2 = EncodingParams::ghz(2).unwrap();
        let psi = logical_bell_state(BellLabel::logical(Symbol::Psi, Sign::Minus), &g2).unwrap();
        let want = PureState::from_terms(&[("HHVV", ONE), ("VVHH", -ONE)]).unwrap();
        assert!(psi.approx_eq(&want, NORM_TOL));

        let p2 = EncodingParams::parity(1, 2, 1).unwrap();
        let blk = logical_bell_state(BellLabel::block(Symbol::Phi, Sign::Plus), &p2).unwrap();
        let plus = block_ket(Sign::Plus, 2).unwrap();
        let minus = block_ket(Sign::Minus, 2).unwrap();
        let want = superpose(
            &plus.tensor(&plus).unwrap(),
            ONE,
            &minus.tensor(&minus).unwrap(),
            ONE,
        )
        .unwrap();
        assert!(blk.approx_eq(&want, NORM_TOL));

        assert!(logical_bell_state(BellLabel::block(Symbol::Phi, Sign::Plus), &g2).is_err());
    }

    #[test]
    fn ghz_two_block_decomposition() {
        let g2 = EncodingParams::ghz(2).unwrap();
        let d = decompose_logical_bell(BellLabel::logical(Symbol::Phi, Sign::Plus), &g2).unwrap();
        let pats: Vec<Vec<BellLabel>> = d.terms.iter().map(|t| t.pair_labels.clone()).collect();
        let pp = BellLabel::photon(Symbol::Phi, Sign::Plus);
        let mm = BellLabel::photon(Symbol::Phi, Sign::Minus);
        assert_eq!(pats, vec![vec![pp, pp], vec![mm, mm]]);
        assert_eq!(d.terms[0].weight, d.terms[1].weight);
    }

    #[test]
    fn ghz_three_block_minus_has_odd_minus_counts() {
        let g3 = EncodingParams::ghz(3).unwrap();
        let d = decompose_logical_bell(BellLabel::logical(Symbol::Phi, Sign::Minus), &g3).unwrap();
        assert_eq!(d.terms.len(), 4);
        let single_minus = d
            .terms
            .iter()
            .filter(|t| t.pair_labels.iter().filter(|l| l.sign.is_minus()).count() == 1)
            .count();
        let triple_minus = d
            .terms
            .iter()
            .filter(|t| t.pair_labels.iter().all(|l| l.sign.is_minus()))
            .count();
        assert_eq!((single_minus, triple_minus), (3, 1));
    }

    #[test]
    fn parity_block_psi_plus_has_odd_psi_plus() {
        let p2 = EncodingParams::parity(1, 2, 1).unwrap();
        let d = decompose_logical_bell(BellLabel::block(Symbol::Psi, Sign::Plus), &p2).unwrap();
        for t in &d.terms {
            let psi = t
                .pair_labels
                .iter()
                .filter(|l| l.symbol == Symbol::Psi)
                .count();
            assert_eq!(psi % 2, 1);
            assert!(t.pair_labels.iter().all(|l| l.sign == Sign::Plus));
        }
        let rebuilt = d.reassemble().unwrap();
        let direct = logical_bell_state(d.label, &p2).unwrap();
        assert!(rebuilt.approx_eq(&direct, 1e-12));
    }

    #[test]
    fn every_expansion_reassembles() {
        let mut encs: Vec<EncodingParams> =
            (1..=4).map(|n| EncodingParams::ghz(n).unwrap()).collect();
        for n in 1..=2 {
            for p in 1..=3 {
                encs.push(EncodingParams::parity_default(n, p).unwrap());
            }
        }
        for enc in &encs {
            let mut levels = vec![Level::Logical];
            if enc.scheme == Scheme::Parity {
                levels.push(Level::Block);
            }
            for level in levels {
                for label in BellLabel::all(level) {
                    let d = decompose_logical_bell(label, enc).unwrap();
                    assert_eq!(d.total_weight(), Ratio::new(1, 1));
                    let rebuilt = d.reassemble().unwrap();
                    let direct = logical_bell_state(label, enc).unwrap();
                    assert!(rebuilt.approx_eq(&direct, 1e-12), "{label} {enc:?}");
                }
            }
        }
    }

    #[test]
    fn orderings_are_inverse() {
        for n in 1..6 {
            let a = paired_to_stored(n);
            let b = stored_to_paired(n);
            for x in 0..2 * n {
                assert_eq!(a[b[x]], x);
            }
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(EncodingParams::ghz(0).is_err());
        assert!(EncodingParams::parity(2, 2, 2).is_err());
        assert!(EncodingParams::parity(0, 2, 0).is_err());
        assert_eq!(EncodingParams::parity_default(2, 3).unwrap().q, 2);
        assert!(SecretSpec::from_parts(0.0, 0.0, 0.0, 0.0).is_err());
    }
}
