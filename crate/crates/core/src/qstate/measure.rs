use num_complex::Complex64;
use rand::Rng;

use super::{bit_pos, insert_zero_bit, PureState, SPECTRAL_TOL, ZERO};
use crate::error::{Error, Result};

/// One branch of a two-photon projective measurement.
#[derive(Debug, Clone)]
pub struct Projection {
    /// Index into the projector list; `basis.len()` names the complement.
    pub outcome: usize,
    pub probability: f64,
    /// Renormalized post-measurement state, `None` for zero-probability branches.
    ///
    /// For a listed ket the two photons are removed. For the complement the
    /// photons stay in the vector (Lüders projection) and are flagged lost,
    /// since they have been absorbed by the detectors.
    pub state: Option<PureState>,
}

fn ket_coefficients(ket: &PureState) -> Result<[Complex64; 4]> {
    if ket.num_photons() != 2 {
        return Err(Error::DimensionMismatch {
            left: ket.dim(),
            right: 4,
        });
    }
    let a = ket.amplitudes();
    Ok([a[0], a[1], a[2], a[3]])
}

fn check_orthonormal(kets: &[[Complex64; 4]]) -> Result<()> {
    if kets.len() > 4 {
        return Err(Error::NonOrthonormal(f64::INFINITY));
    }
    let mut worst: f64 = 0.0;
    for (a, ka) in kets.iter().enumerate() {
        for (b, kb) in kets.iter().enumerate() {
            let g: Complex64 = ka.iter().zip(kb).map(|(x, y)| x.conj() * y).sum();
            let want = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((g - Complex64::new(want, 0.0)).norm());
        }
    }
    if worst > SPECTRAL_TOL {
        return Err(Error::NonOrthonormal(worst));
    }
    Ok(())
}

fn check_pair(state: &PureState, i: usize, j: usize) -> Result<()> {
    state.check_photon(i)?;
    state.check_photon(j)?;
    if i == j {
        return Err(Error::SamePhoton(i));
    }
    for k in [i, j] {
        if state.is_lost(k) {
            return Err(Error::PhotonLost(k));
        }
    }
    Ok(())
}

/// Every branch of projecting photons `(i, j)` onto `basis`, with Born weights.
///
/// If `basis` has fewer than four kets the complement subspace is appended as
/// outcome `basis.len()`.
pub fn project_two_photon_all(
    state: &PureState,
    i: usize,
    j: usize,
    basis: &[PureState],
) -> Result<Vec<Projection>> {
    check_pair(state, i, j)?;
    let kets = basis
        .iter()
        .map(ket_coefficients)
        .collect::<Result<Vec<_>>>()?;
    check_orthonormal(&kets)?;

    let n = state.num_photons();
    let lost_rest = state.lost_without(i, j);
    let total = state.norm_sqr();
    let mut out = Vec::with_capacity(kets.len() + 1);
    let mut removed: Vec<Vec<Complex64>> = Vec::with_capacity(kets.len());
    for (k, ket) in kets.iter().enumerate() {
        let rest = state.contract_pair(i, j, ket);
        let p: f64 = rest.iter().map(|a| a.norm_sqr()).sum::<f64>() / total;
        let post = if p > 0.0 {
            let mut s = PureState::from_raw(rest.clone(), lost_rest.clone());
            s.normalize().ok().map(|_| s)
        } else {
            None
        };
        out.push(Projection {
            outcome: k,
            probability: p,
            state: post,
        });
        removed.push(rest);
    }

    if kets.len() < 4 {
        // residual = ψ − Σ_k |b_k⟩ ⊗ (⟨b_k|ψ)
        let (pi, pj) = (bit_pos(n, i), bit_pos(n, j));
        let (lo, hi) = if pi < pj { (pi, pj) } else { (pj, pi) };
        let mut residual = state.amplitudes().to_vec();
        for (ket, rest) in kets.iter().zip(&removed) {
            for (r, c) in rest.iter().enumerate() {
                if *c == ZERO {
                    continue;
                }
                let base = insert_zero_bit(insert_zero_bit(r, lo), hi);
                for x in 0..2usize {
                    for y in 0..2usize {
                        residual[base | (x << pi) | (y << pj)] -= ket[(x << 1) | y] * c;
                    }
                }
            }
        }
        let p_rest = (1.0 - out.iter().map(|b| b.probability).sum::<f64>()).max(0.0);
        let mut lost = state.lost_flags().to_vec();
        lost[i] = true;
        lost[j] = true;
        let mut s = PureState::from_raw(residual, lost);
        let post = match s.normalize() {
            Ok(norm) if norm / total > 1e-28 => Some(s),
            _ => None,
        };
        out.push(Projection {
            outcome: kets.len(),
            probability: p_rest,
            state: post,
        });
    }
    Ok(out)
}

/// Samples one branch of [`project_two_photon_all`] using `rng`.
pub fn project_two_photon<R: Rng + ?Sized>(
    state: &PureState,
    i: usize,
    j: usize,
    basis: &[PureState],
    rng: &mut R,
) -> Result<Projection> {
    let branches = project_two_photon_all(state, i, j, basis)?;
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = None;
    for b in branches {
        if b.state.is_none() {
            continue;
        }
        acc += b.probability;
        if u < acc {
            return Ok(b);
        }
        last = Some(b);
    }
    last.ok_or(Error::ZeroState)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::{BellLabel, Sign, Symbol};
    use crate::qstate::{make_state, partial_trace, NORM_TOL, ONE};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bell_basis() -> Vec<PureState> {
        BellLabel::photon_all()
            .iter()
            .map(|l| l.photon_ket())
            .collect()
    }

    #[test]
    fn eigenstate_gives_certain_outcome() {
        let phi_plus = make_state(&[("HH", ONE), ("VV", ONE)]).unwrap();
        let branches = project_two_photon_all(&phi_plus, 0, 1, &bell_basis()).unwrap();
        assert_eq!(branches.len(), 4);
        let idx = BellLabel::photon_all()
            .iter()
            .position(|l| *l == BellLabel::photon(Symbol::Phi, Sign::Plus))
            .unwrap();
        assert!((branches[idx].probability - 1.0).abs() < 1e-12);
        let total: f64 = branches.iter().map(|b| b.probability).sum();
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn hv_splits_between_psi_states() {
        let hv = PureState::basis("HV").unwrap();
        let branches = project_two_photon_all(&hv, 0, 1, &bell_basis()).unwrap();
        for (label, b) in BellLabel::photon_all().iter().zip(&branches) {
            let want = if label.symbol == Symbol::Psi {
                0.5
            } else {
                0.0
            };
            assert!((b.probability - want).abs() < 1e-12, "{label}");
        }
    }

    #[test]
    fn complement_keeps_photons_flagged() {
        // (|HH⟩+|VV⟩)|H⟩ projected on {φ−, ψ−}: complement with certainty
        let s = make_state(&[("HHH", ONE), ("VVH", ONE)]).unwrap();
        let kets = [
            BellLabel::photon(Symbol::Phi, Sign::Minus).photon_ket(),
            BellLabel::photon(Symbol::Psi, Sign::Minus).photon_ket(),
        ];
        let branches = project_two_photon_all(&s, 0, 1, &kets).unwrap();
        assert_eq!(branches.len(), 3);
        assert!((branches[2].probability - 1.0).abs() < 1e-12);
        let post = branches[2].state.as_ref().unwrap();
        assert_eq!(post.lost_flags(), &[true, true, false]);
        assert!(post.approx_eq(&s, NORM_TOL));
        let rest = partial_trace(post, &[2]).unwrap();
        assert!((rest.entry(0, 0).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_projectors_and_pairs() {
        let s = PureState::basis("HV").unwrap();
        let bad = [
            PureState::basis("HH").unwrap(),
            PureState::basis("HH").unwrap(),
        ];
        assert!(matches!(
            project_two_photon_all(&s, 0, 1, &bad),
            Err(Error::NonOrthonormal(_))
        ));
        assert!(matches!(
            project_two_photon_all(&s, 1, 1, &bell_basis()),
            Err(Error::SamePhoton(1))
        ));
        let lost = s.with_lost(0, true).unwrap();
        assert!(matches!(
            project_two_photon_all(&lost, 0, 1, &bell_basis()),
            Err(Error::PhotonLost(0))
        ));
    }

    #[test]
    fn sampling_follows_born_rule() {
        let hv = PureState::basis("HV").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let basis = bell_basis();
        let mut counts = [0usize; 4];
        for _ in 0..4000 {
            counts[project_two_photon(&hv, 0, 1, &basis, &mut rng)
                .unwrap()
                .outcome] += 1;
        }
        assert_eq!(counts[0] + counts[1], 0);
        assert!((counts[2] as f64 / 4000.0 - 0.5).abs() < 0.05);
    }
}
