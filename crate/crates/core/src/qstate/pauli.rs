use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::bit_pos;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PauliKind {
    I,
    X,
    Z,
    /// The operator product `X·Z` (Z acts first).
    XZ,
}

/// Single-photon Pauli operator. `X|H⟩ = |V⟩`, `Z|V⟩ = −|V⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PauliOp {
    pub kind: PauliKind,
    pub target: usize,
}

impl PauliOp {
    pub fn new(kind: PauliKind, target: usize) -> Self {
        PauliOp { kind, target }
    }

    pub fn x(target: usize) -> Self {
        Self::new(PauliKind::X, target)
    }

    pub fn z(target: usize) -> Self {
        Self::new(PauliKind::Z, target)
    }

    pub(crate) fn apply_in_place(&self, amps: &mut [Complex64], n: usize) {
        let mask = 1usize << bit_pos(n, self.target);
        let flip_x = matches!(self.kind, PauliKind::X | PauliKind::XZ);
        let phase_z = matches!(self.kind, PauliKind::Z | PauliKind::XZ);
        if phase_z {
            for (idx, a) in amps.iter_mut().enumerate() {
                if idx & mask != 0 {
                    *a = -*a;
                }
            }
        }
        if flip_x {
            for idx in 0..amps.len() {
                if idx & mask == 0 {
                    amps.swap(idx, idx | mask);
                }
            }
        }
    }
}

impl std::fmt::Display for PauliOp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}@{}", self.kind, self.target)
    }
}
