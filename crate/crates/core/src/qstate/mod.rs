//! Dense linear-algebra engine for multi-photon polarization states.
//!
//! A [`PureState`] over `N` photons stores `2^N` amplitudes. Basis states are
//! bitstrings with `0 = H` and `1 = V`; photon 0 is the most significant bit,
//! so the Kronecker product `a ⊗ b` places `a`'s photons first.
//!
//! Every photon also carries a `lost` flag. A lost photon stays in the
//! amplitude vector (nothing physical happened to the other photons) but its
//! polarization can no longer be addressed; it disappears, dephasing what is
//! left, when a reduced [`DensityMatrix`] is requested.

mod density;
mod measure;
mod pauli;

pub use density::{fidelity, partial_trace, DensityMatrix, PartialTrace};
pub use measure::{project_two_photon, project_two_photon_all, Projection};
pub use pauli::{PauliKind, PauliOp};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default dense-state photon cap (2^20 amplitudes).
pub const MAX_PHOTONS: usize = 20;

/// Tolerance for constructive identities (norms, reassembly).
pub const NORM_TOL: f64 = 1e-12;

/// Tolerance for spectral and Hermiticity checks.
pub const SPECTRAL_TOL: f64 = 1e-10;

pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Normalized pure state of `N` polarization qubits with per-photon loss flags.
#[derive(Debug, Clone)]
pub struct PureState {
    amps: Vec<Complex64>,
    lost: Vec<bool>,
}

fn parse_bits(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .map(|c| match c {
            'H' | 'h' | '0' => Ok(0),
            'V' | 'v' | '1' => Ok(1),
            other => Err(Error::InvalidBit(other)),
        })
        .collect()
}

fn bits_to_index(bits: &[u8]) -> usize {
    bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize)
}

/// Bit position (from the least significant end) of `photon` in an `n`-photon index.
#[inline]
pub(crate) fn bit_pos(n: usize, photon: usize) -> usize {
    n - 1 - photon
}

#[inline]
pub(crate) fn insert_zero_bit(x: usize, pos: usize) -> usize {
    let low = x & ((1usize << pos) - 1);
    let high = x >> pos;
    (high << (pos + 1)) | low
}

pub(crate) fn check_budget(n: usize) -> Result<()> {
    if n > MAX_PHOTONS {
        return Err(Error::PhotonBudget {
            requested: n,
            cap: MAX_PHOTONS,
        });
    }
    Ok(())
}

impl PureState {
    /// Builds a normalized state from `(bitstring, amplitude)` terms.
    ///
    /// Repeated bitstrings add. Terms need not be normalized.
    pub fn from_terms<S: AsRef<str>>(terms: &[(S, Complex64)]) -> Result<Self> {
        let first = terms.first().ok_or(Error::ZeroState)?;
        let n = first.0.as_ref().chars().count();
        if n == 0 {
            return Err(Error::InvalidParameter("empty bitstring".into()));
        }
        check_budget(n)?;
        let mut amps = vec![ZERO; 1 << n];
        for (bits, amp) in terms {
            let parsed = parse_bits(bits.as_ref())?;
            if parsed.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: parsed.len(),
                });
            }
            amps[bits_to_index(&parsed)] += *amp;
        }
        Self::from_amplitudes(n, amps)
    }

    /// Computational basis ket, e.g. `"HVH"`.
    pub fn basis(bits: &str) -> Result<Self> {
        Self::from_terms(&[(bits, ONE)])
    }

    /// Normalizes `amps` (length `2^n`) into a state with no lost photons.
    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_budget(n)?;
        if amps.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                left: amps.len(),
                right: 1 << n,
            });
        }
        let mut state = PureState {
            amps,
            lost: vec![false; n],
        };
        state.normalize()?;
        Ok(state)
    }

    pub(crate) fn from_raw(amps: Vec<Complex64>, lost: Vec<bool>) -> Self {
        debug_assert_eq!(amps.len(), 1 << lost.len());
        PureState { amps, lost }
    }

    pub(crate) fn normalize(&mut self) -> Result<f64> {
        let norm_sqr = self.norm_sqr();
        if norm_sqr <= f64::MIN_POSITIVE {
            return Err(Error::ZeroState);
        }
        let inv = 1.0 / norm_sqr.sqrt();
        for a in &mut self.amps {
            *a *= inv;
        }
        Ok(norm_sqr)
    }

    pub fn num_photons(&self) -> usize {
        self.lost.len()
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Amplitude of a basis ket given as a bitstring.
    pub fn amplitude(&self, bits: &str) -> Result<Complex64> {
        let parsed = parse_bits(bits)?;
        if parsed.len() != self.num_photons() {
            return Err(Error::LengthMismatch {
                expected: self.num_photons(),
                got: parsed.len(),
            });
        }
        Ok(self.amps[bits_to_index(&parsed)])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_lost(&self, photon: usize) -> bool {
        self.lost.get(photon).copied().unwrap_or(false)
    }

    pub fn lost_flags(&self) -> &[bool] {
        &self.lost
    }

    /// Indices of photons whose polarization is still accessible.
    pub fn accessible_photons(&self) -> Vec<usize> {
        (0..self.num_photons()).filter(|&k| !self.lost[k]).collect()
    }

    pub(crate) fn check_photon(&self, photon: usize) -> Result<()> {
        if photon >= self.num_photons() {
            return Err(Error::PhotonOutOfRange {
                index: photon,
                photons: self.num_photons(),
            });
        }
        Ok(())
    }

    /// Returns a copy with `photon` flagged as lost (or recovered).
    pub fn with_lost(&self, photon: usize, lost: bool) -> Result<Self> {
        self.check_photon(photon)?;
        let mut out = self.clone();
        out.lost[photon] = lost;
        Ok(out)
    }

    /// Kronecker product; photon counts add and loss flags concatenate.
    pub fn tensor(&self, other: &PureState) -> Result<Self> {
        let n = self.num_photons() + other.num_photons();
        check_budget(n)?;
        let mut amps = Vec::with_capacity(1 << n);
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        let mut lost = self.lost.clone();
        lost.extend_from_slice(&other.lost);
        Ok(PureState { amps, lost })
    }

    /// Reorders photons: photon `k` of the result is photon `order[k]` of `self`.
    pub fn permute(&self, order: &[usize]) -> Result<Self> {
        let n = self.num_photons();
        if order.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: order.len(),
            });
        }
        let mut seen = vec![false; n];
        for &o in order {
            self.check_photon(o)?;
            if std::mem::replace(&mut seen[o], true) {
                return Err(Error::InvalidParameter(format!(
                    "photon {o} appears twice in permutation"
                )));
            }
        }
        let mut amps = vec![ZERO; self.dim()];
        for (old, a) in self.amps.iter().enumerate() {
            if *a == ZERO {
                continue;
            }
            let mut new = 0usize;
            for (k, &src) in order.iter().enumerate() {
                let bit = (old >> bit_pos(n, src)) & 1;
                new |= bit << bit_pos(n, k);
            }
            amps[new] = *a;
        }
        let lost = order.iter().map(|&o| self.lost[o]).collect();
        Ok(PureState { amps, lost })
    }

    /// Applies a single-photon Pauli operator.
    pub fn apply_pauli(&self, op: PauliOp) -> Result<Self> {
        self.check_photon(op.target)?;
        if self.lost[op.target] {
            return Err(Error::PhotonLost(op.target));
        }
        let mut out = self.clone();
        op.apply_in_place(&mut out.amps, self.num_photons());
        Ok(out)
    }

    /// Applies a sequence of Pauli operators in order.
    pub fn apply_paulis(&self, ops: &[PauliOp]) -> Result<Self> {
        let mut out = self.clone();
        for op in ops {
            out.check_photon(op.target)?;
            if out.lost[op.target] {
                return Err(Error::PhotonLost(op.target));
            }
            op.apply_in_place(&mut out.amps, self.num_photons());
        }
        Ok(out)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|⟨self|other⟩|²`.
    pub fn overlap(&self, other: &PureState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Multiplies every amplitude by a unit-modulus phase.
    pub fn with_global_phase(&self, phase: f64) -> Self {
        let factor = Complex64::from_polar(1.0, phase);
        PureState {
            amps: self.amps.iter().map(|a| a * factor).collect(),
            lost: self.lost.clone(),
        }
    }

    /// Elementwise comparison of amplitudes (no phase freedom).
    pub fn approx_eq(&self, other: &PureState, tol: f64) -> bool {
        self.dim() == other.dim()
            && self
                .amps
                .iter()
                .zip(&other.amps)
                .all(|(a, b)| (a - b).norm() <= tol)
    }

    /// Pure-state projector `|ψ⟩⟨ψ|` including lost photons.
    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }

    /// Reduced state of every photon that has not been lost.
    pub fn accessible_state(&self) -> Result<DensityMatrix> {
        partial_trace(self, &self.accessible_photons())
    }

    /// Removes two photons by contracting them against a two-photon bra.
    ///
    /// Returns the unnormalized remainder `(⟨bra|_{ij} ⊗ I)|ψ⟩`.
    pub(crate) fn contract_pair(&self, i: usize, j: usize, bra: &[Complex64; 4]) -> Vec<Complex64> {
        let n = self.num_photons();
        let (pi, pj) = (bit_pos(n, i), bit_pos(n, j));
        let (lo, hi) = if pi < pj { (pi, pj) } else { (pj, pi) };
        let rest_dim = 1usize << (n - 2);
        let mut out = vec![ZERO; rest_dim];
        for (r, slot) in out.iter_mut().enumerate() {
            let base = insert_zero_bit(insert_zero_bit(r, lo), hi);
            let mut acc = ZERO;
            for x in 0..2usize {
                for y in 0..2usize {
                    let coef = bra[(x << 1) | y];
                    if coef == ZERO {
                        continue;
                    }
                    let idx = base | (x << pi) | (y << pj);
                    acc += coef.conj() * self.amps[idx];
                }
            }
            *slot = acc;
        }
        out
    }

    pub(crate) fn lost_without(&self, i: usize, j: usize) -> Vec<bool> {
        self.lost
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != i && *k != j)
            .map(|(_, &l)| l)
            .collect()
    }
}

/// Parses a bitstring-labelled term list and normalizes it (`make_state`).
pub fn make_state<S: AsRef<str>>(terms: &[(S, Complex64)]) -> Result<PureState> {
    PureState::from_terms(terms)
}

/// `a ⊗ b`.
pub fn tensor(a: &PureState, b: &PureState) -> Result<PureState> {
    a.tensor(b)
}

/// Applies `op` to `state`, returning a new state.
pub fn apply_pauli(state: &PureState, op: PauliOp) -> Result<PureState> {
    state.apply_pauli(op)
}

/// Single-photon diagonal basis states `|±⟩ = (|H⟩ ± |V⟩)/√2`.
pub fn diagonal_ket(plus: bool) -> PureState {
    let s = if plus { 1.0 } else { -1.0 };
    PureState::from_terms(&[("H", ONE), ("V", Complex64::new(s, 0.0))]).expect("two nonzero terms")
}
