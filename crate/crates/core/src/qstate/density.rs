use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{bit_pos, check_budget, PureState, SPECTRAL_TOL, ZERO};
use crate::error::{Error, Result};

/// Hermitian, unit-trace, positive semidefinite operator on `N` photons.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    num_photons: usize,
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates and wraps `matrix` (dimension `2^num_photons`).
    pub fn new(num_photons: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        let rho = Self::new_unchecked(num_photons, matrix)?;
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn new_unchecked(num_photons: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        check_budget(num_photons)?;
        let dim = 1usize << num_photons;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                left: matrix.nrows(),
                right: dim,
            });
        }
        Ok(DensityMatrix {
            num_photons,
            matrix,
        })
    }

    pub fn from_pure(state: &PureState) -> Self {
        let v = nalgebra::DVector::from_column_slice(state.amplitudes());
        DensityMatrix {
            num_photons: state.num_photons(),
            matrix: &v * v.adjoint(),
        }
    }

    /// `I / 2^n`.
    pub fn maximally_mixed(num_photons: usize) -> Result<Self> {
        check_budget(num_photons)?;
        let dim = 1usize << num_photons;
        let scale = Complex64::new(1.0 / dim as f64, 0.0);
        Ok(DensityMatrix {
            num_photons,
            matrix: DMatrix::identity(dim, dim) * scale,
        })
    }

    /// Convex combination `Σ w_k ρ_k`; weights must be nonnegative and sum to 1.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let first = parts.first().ok_or(Error::EmptyOutcomes)?.1;
        let total: f64 = parts.iter().map(|(w, _)| *w).sum();
        if parts.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > SPECTRAL_TOL {
            return Err(Error::InvalidParameter(format!(
                "mixture weights must be nonnegative and sum to 1 (sum {total})"
            )));
        }
        let mut acc = DMatrix::zeros(first.dim(), first.dim());
        for (w, rho) in parts {
            if rho.num_photons != first.num_photons {
                return Err(Error::DimensionMismatch {
                    left: rho.dim(),
                    right: first.dim(),
                });
            }
            acc += &rho.matrix * Complex64::new(*w, 0.0);
        }
        Ok(DensityMatrix {
            num_photons: first.num_photons,
            matrix: acc,
        })
    }

    pub fn num_photons(&self) -> usize {
        self.num_photons
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[(row, col)]
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// `tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// Largest `|ρ_ij|` over `i ≠ j`.
    pub fn max_coherence(&self) -> f64 {
        let mut best: f64 = 0.0;
        for r in 0..self.dim() {
            for c in 0..self.dim() {
                if r != c {
                    best = best.max(self.matrix[(r, c)].norm());
                }
            }
        }
        best
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|k| self.matrix[(k, k)].re).collect()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (&self.matrix - self.matrix.adjoint())
            .iter()
            .all(|z| z.norm() <= tol)
    }

    /// Real eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .matrix
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Checks Hermiticity, unit trace and positivity within `1e-10`.
    pub fn validate(&self) -> Result<()> {
        if !self.is_hermitian(SPECTRAL_TOL) {
            return Err(Error::InvalidDensity("not Hermitian".into()));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > SPECTRAL_TOL || tr.im.abs() > SPECTRAL_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr}")));
        }
        if let Some(min) = self.eigenvalues().first() {
            if *min < -SPECTRAL_TOL {
                return Err(Error::InvalidDensity(format!(
                    "negative eigenvalue {min:e}"
                )));
            }
        }
        Ok(())
    }

    /// Spectral decomposition `ρ = Σ λ_k |v_k⟩⟨v_k|`, dropping `|λ_k| < cutoff`.
    ///
    /// Small negative eigenvalues are kept so that the decomposition stays exact.
    pub fn eigen_ensemble(&self, cutoff: f64) -> Vec<(f64, PureState)> {
        let eig = self.matrix.clone().symmetric_eigen();
        let mut out = Vec::new();
        for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda.abs() < cutoff {
                continue;
            }
            let col: Vec<Complex64> = eig.eigenvectors.column(k).iter().copied().collect();
            if let Ok(v) = PureState::from_amplitudes(self.num_photons, col) {
                out.push((lambda, v));
            }
        }
        out
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<Self> {
        check_budget(self.num_photons + other.num_photons)?;
        Ok(DensityMatrix {
            num_photons: self.num_photons + other.num_photons,
            matrix: self.matrix.kronecker(&other.matrix),
        })
    }

    /// `⟨target|ρ|target⟩`.
    pub fn fidelity(&self, target: &PureState) -> Result<f64> {
        if target.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: target.dim(),
            });
        }
        let t = target.amplitudes();
        let mut acc = ZERO;
        for r in 0..self.dim() {
            if t[r] == ZERO {
                continue;
            }
            let mut row = ZERO;
            for c in 0..self.dim() {
                row += self.matrix[(r, c)] * t[c];
            }
            acc += t[r].conj() * row;
        }
        if acc.im.abs() > SPECTRAL_TOL {
            return Err(Error::InvalidDensity(format!(
                "fidelity has imaginary part {:e}",
                acc.im
            )));
        }
        Ok(acc.re.clamp(0.0, 1.0))
    }

    /// Reduced state on `keep`; photon `k` of the result is photon `keep[k]`.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let n = self.num_photons;
        check_keep(keep, n)?;
        let rest: Vec<usize> = (0..n).filter(|p| !keep.contains(p)).collect();
        let split = |x: usize| -> (usize, usize) {
            let a = keep
                .iter()
                .fold(0, |acc, &p| (acc << 1) | ((x >> bit_pos(n, p)) & 1));
            let r = rest
                .iter()
                .fold(0, |acc, &p| (acc << 1) | ((x >> bit_pos(n, p)) & 1));
            (a, r)
        };
        let kd = 1usize << keep.len();
        let rd = 1usize << rest.len();
        // full index for each (kept, rest) pair
        let mut full = vec![0usize; kd * rd];
        for x in 0..self.dim() {
            let (a, r) = split(x);
            full[a * rd + r] = x;
        }
        let mut out = DMatrix::zeros(kd, kd);
        for a in 0..kd {
            for b in 0..kd {
                let mut acc = ZERO;
                for r in 0..rd {
                    acc += self.matrix[(full[a * rd + r], full[b * rd + r])];
                }
                out[(a, b)] = acc;
            }
        }
        Ok(DensityMatrix {
            num_photons: keep.len(),
            matrix: out,
        })
    }

    /// Elementwise distance `max |ρ_ij − σ_ij|`.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok((&self.matrix - &other.matrix)
            .iter()
            .fold(0.0, |m, z| m.max(z.norm())))
    }

    pub(crate) fn add_scaled_pure(&mut self, weight: f64, state: &PureState) {
        let a = state.amplitudes();
        let w = Complex64::new(weight, 0.0);
        for r in 0..self.dim() {
            if a[r] == ZERO {
                continue;
            }
            let ar = a[r] * w;
            for c in 0..self.dim() {
                self.matrix[(r, c)] += ar * a[c].conj();
            }
        }
    }

    pub(crate) fn zeros(num_photons: usize) -> Self {
        let dim = 1usize << num_photons;
        DensityMatrix {
            num_photons,
            matrix: DMatrix::zeros(dim, dim),
        }
    }

    pub(crate) fn scaled(mut self, factor: f64) -> Self {
        self.matrix *= Complex64::new(factor, 0.0);
        self
    }
}

fn check_keep(keep: &[usize], n: usize) -> Result<()> {
    if keep.is_empty() {
        return Err(Error::EmptyKeep);
    }
    let mut seen = vec![false; n];
    for &k in keep {
        if k >= n {
            return Err(Error::PhotonOutOfRange {
                index: k,
                photons: n,
            });
        }
        if std::mem::replace(&mut seen[k], true) {
            return Err(Error::InvalidParameter(format!("photon {k} kept twice")));
        }
    }
    Ok(())
}

/// Anything a reduced density matrix can be taken from.
pub trait PartialTrace {
    fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix>;
}

impl PartialTrace for DensityMatrix {
    fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        DensityMatrix::partial_trace(self, keep)
    }
}

impl PartialTrace for PureState {
    /// Kept photons must not be lost; lost photons are always traced out.
    fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let n = self.num_photons();
        check_keep(keep, n)?;
        if let Some(&l) = keep.iter().find(|&&k| self.is_lost(k)) {
            return Err(Error::PhotonLost(l));
        }
        let mut order = keep.to_vec();
        order.extend((0..n).filter(|p| !keep.contains(p)));
        let permuted = self.permute(&order)?;
        let a = permuted.amplitudes();
        let kd = 1usize << keep.len();
        let rd = 1usize << (n - keep.len());
        let mut out = DMatrix::zeros(kd, kd);
        for x in 0..kd {
            let row_x = &a[x * rd..(x + 1) * rd];
            for y in x..kd {
                let row_y = &a[y * rd..(y + 1) * rd];
                let v: Complex64 = row_x.iter().zip(row_y).map(|(p, q)| p * q.conj()).sum();
                out[(x, y)] = v;
                out[(y, x)] = v.conj();
            }
        }
        Ok(DensityMatrix {
            num_photons: keep.len(),
            matrix: out,
        })
    }
}

/// Reduced state of a pure or mixed state on the photons in `keep`.
pub fn partial_trace<T: PartialTrace + ?Sized>(state: &T, keep: &[usize]) -> Result<DensityMatrix> {
    state.partial_trace(keep)
}

/// `⟨target|ρ|target⟩`.
pub fn fidelity(rho: &DensityMatrix, target: &PureState) -> Result<f64> {
    rho.fidelity(target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{make_state, ONE};

    fn bell() -> PureState {
        make_state(&[("HH", ONE), ("VV", ONE)]).unwrap()
    }

    #[test]
    fn tracing_half_a_bell_pair_is_maximally_mixed() {
        let rho = partial_trace(&bell(), &[0]).unwrap();
        assert!((rho.entry(0, 0).re - 0.5).abs() < 1e-12);
        assert!((rho.entry(1, 1).re - 0.5).abs() < 1e-12);
        assert!(rho.max_coherence() < 1e-12);
        rho.validate().unwrap();
    }

    #[test]
    fn keeping_everything_gives_the_projector() {
        let s = make_state(&[("HHV", ONE), ("VHH", Complex64::new(0.3, -0.8))]).unwrap();
        let rho = partial_trace(&s, &[0, 1, 2]).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-12);
        assert!(rho.max_abs_diff(&s.to_density()).unwrap() < 1e-12);
    }

    #[test]
    fn density_and_pure_traces_agree() {
        let s = make_state(&[
            ("HHV", ONE),
            ("VHH", Complex64::new(0.3, -0.8)),
            ("VVV", Complex64::new(-0.2, 0.1)),
        ])
        .unwrap();
        for keep in [vec![0], vec![2, 0], vec![1, 2]] {
            let a = partial_trace(&s, &keep).unwrap();
            let b = partial_trace(&s.to_density(), &keep).unwrap();
            assert!(a.max_abs_diff(&b).unwrap() < 1e-12, "keep {keep:?}");
        }
    }

    #[test]
    fn partial_trace_errors() {
        assert!(matches!(partial_trace(&bell(), &[]), Err(Error::EmptyKeep)));
        let lost = bell().with_lost(1, true).unwrap();
        assert!(matches!(
            partial_trace(&lost, &[1]),
            Err(Error::PhotonLost(1))
        ));
        assert!(partial_trace(&lost, &[0]).is_ok());
    }

    #[test]
    fn fidelity_examples() {
        let mixed = DensityMatrix::maximally_mixed(1).unwrap();
        let h = PureState::basis("H").unwrap();
        assert!((fidelity(&mixed, &h).unwrap() - 0.5).abs() < 1e-12);
        let b = bell();
        assert!((fidelity(&b.to_density(), &b).unwrap() - 1.0).abs() < 1e-12);
        assert!(fidelity(&mixed, &b).is_err());
    }

    #[test]
    fn validate_rejects_bad_matrices() {
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 0)] = Complex64::new(1.5, 0.0);
        m[(1, 1)] = Complex64::new(-0.5, 0.0);
        assert!(DensityMatrix::new(1, m).is_err());
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 0)] = Complex64::new(0.5, 0.0);
        m[(1, 1)] = Complex64::new(0.5, 0.0);
        m[(0, 1)] = Complex64::new(0.1, 0.0);
        assert!(DensityMatrix::new(1, m).is_err());
    }

    #[test]
    fn eigen_ensemble_reassembles() {
        let a = bell().to_density();
        let b = DensityMatrix::maximally_mixed(2).unwrap();
        let rho = DensityMatrix::mixture(&[(0.7, &a), (0.3, &b)]).unwrap();
        let mut acc = DensityMatrix::zeros(2);
        for (w, v) in rho.eigen_ensemble(0.0) {
            acc.add_scaled_pure(w, &v);
        }
        assert!(acc.max_abs_diff(&rho).unwrap() < 1e-12);
    }
}
