//! Teleportation of mixed inputs through mixed channels with an ideal,
//! complete Bell measurement at every sender.

use num_complex::Complex64;

use crate::encoding::{ghz_state, SecretSpec, Sign};
use crate::error::{Error, Result};
use crate::protocol::run::project_pairs_fully;
use crate::protocol::{correction_for, LogicalBellOutcome};
use crate::qstate::{DensityMatrix, PureState};

/// Eigenvalues below this are dropped when splitting a density matrix into
/// pure components.
const EIGEN_CUTOFF: f64 = 1e-14;

/// Target state mixed with white noise: `ρ = (1−w)|t⟩⟨t| + w·I/d`.
///
/// With a `support`, the noise is the maximally mixed state on the span of
/// those (orthonormal) states instead of on the full space.
#[derive(Debug, Clone)]
pub struct SyntheticNoisyState {
    pub target: PureState,
    pub w: f64,
    pub support: Option<Vec<PureState>>,
}

impl SyntheticNoisyState {
    pub fn new(target: PureState, w: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::InvalidParameter(format!(
                "mixing weight {w} outside [0, 1]"
            )));
        }
        Ok(SyntheticNoisyState {
            target,
            w,
            support: None,
        })
    }

    /// White noise of weight `w` restricted to the span of `support`.
    pub fn within(target: PureState, w: f64, support: Vec<PureState>) -> Result<Self> {
        let mut s = Self::new(target, w)?;
        if support.is_empty() {
            return Err(Error::InvalidParameter("empty noise support".into()));
        }
        for (i, a) in support.iter().enumerate() {
            for (j, b) in support.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                if (a.inner(b)?.norm() - want).abs() > 1e-10 {
                    return Err(Error::NonOrthonormal((a.inner(b)?.norm() - want).abs()));
                }
            }
        }
        s.support = Some(support);
        Ok(s)
    }

    /// Mixing weight giving fidelity `fidelity` with the target under
    /// full-space noise.
    pub fn for_fidelity(target: PureState, fidelity: f64) -> Result<Self> {
        let d = target.dim() as f64;
        let w = (1.0 - fidelity) * d / (d - 1.0);
        Self::new(target, w)
    }

    fn noise_dim(&self) -> f64 {
        match &self.support {
            Some(s) => s.len() as f64,
            None => self.target.dim() as f64,
        }
    }

    /// `⟨t|ρ|t⟩`.
    pub fn fidelity(&self) -> Result<f64> {
        let overlap = match &self.support {
            Some(s) => s
                .iter()
                .map(|v| v.overlap(&self.target))
                .sum::<Result<f64>>()?,
            None => 1.0,
        };
        Ok(1.0 - self.w + self.w * overlap / self.noise_dim())
    }

    pub fn density(&self) -> Result<DensityMatrix> {
        let pure = DensityMatrix::from_pure(&self.target);
        let noise = match &self.support {
            None => DensityMatrix::maximally_mixed(self.target.num_photons())?,
            Some(s) => {
                let parts: Vec<DensityMatrix> = s.iter().map(DensityMatrix::from_pure).collect();
                let weighted: Vec<(f64, &DensityMatrix)> =
                    parts.iter().map(|d| (1.0 / s.len() as f64, d)).collect();
                DensityMatrix::mixture(&weighted)?
            }
        };
        DensityMatrix::mixture(&[(1.0 - self.w, &pure), (self.w, &noise)])
    }
}

/// The three two-photon inputs of the experiment: `|HH⟩+|VV⟩`,
/// `|HH⟩+i|VV⟩` and `|HH⟩`.
pub fn experiment_inputs() -> [(&'static str, SecretSpec); 3] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [
        (
            "a",
            SecretSpec::new(Complex64::new(h, 0.0), Complex64::new(h, 0.0)).unwrap(),
        ),
        (
            "b",
            SecretSpec::new(Complex64::new(h, 0.0), Complex64::new(0.0, h)).unwrap(),
        ),
        (
            "c",
            SecretSpec::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)).unwrap(),
        ),
    ]
}

/// `|H…H⟩` and `|V…V⟩` on `photons` photons, the span a GHZ-encoded qubit lives in.
pub fn ghz_code_space(photons: usize) -> Result<Vec<PureState>> {
    Ok(vec![
        PureState::basis(&"0".repeat(photons))?,
        PureState::basis(&"1".repeat(photons))?,
    ])
}

/// Receivers' average corrected state when the `n` senders hold `input_rho`
/// (photons `s₁…sₙ`) and the network holds `channel_rho` (photons
/// `s′₁…s′ₙ r₁…rₘ`), and each sender runs a complete Bell measurement on
/// `(sᵢ, s′ᵢ)`.
///
/// The logical symbol is read off the first sender and the logical sign is
/// the product of all pair signs; the usual GHZ correction follows. Every
/// outcome branch contributes with its Born weight, so the result has unit
/// trace and is affine in both arguments.
pub fn expected_output_under_ideal_bsm(
    input_rho: &DensityMatrix,
    channel_rho: &DensityMatrix,
    n: usize,
    m: usize,
) -> Result<DensityMatrix> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidParameter("n and m must be ≥ 1".into()));
    }
    if input_rho.num_photons() != n {
        return Err(Error::DimensionMismatch {
            left: input_rho.num_photons(),
            right: n,
        });
    }
    if channel_rho.num_photons() != n + m {
        return Err(Error::DimensionMismatch {
            left: channel_rho.num_photons(),
            right: n + m,
        });
    }
    crate::qstate::check_budget(2 * n + m)?;
    let inputs = input_rho.eigen_ensemble(EIGEN_CUTOFF);
    let channels = channel_rho.eigen_ensemble(EIGEN_CUTOFF);
    let mut out = DensityMatrix::zeros(m);
    for (wi, psi) in &inputs {
        for (wc, chi) in &channels {
            for (labels, p, receivers) in project_pairs_fully(psi.tensor(chi)?, n)? {
                let minus = labels.iter().filter(|l| l.sign == Sign::Minus).count();
                let logical = LogicalBellOutcome::Identified {
                    symbol: labels[0].symbol,
                    sign: Sign::from_minus_count(minus),
                };
                let c = correction_for(&logical, m)?;
                out.add_scaled_pure(wi * wc * p, &receivers.apply_paulis(&c.ops)?);
            }
        }
    }
    Ok(out)
}

/// Teleports `secret` through a noisy `GHZ(n+m)` channel of fidelity
/// `channel_fidelity` and returns the output's fidelity with the ideal input.
pub fn synthetic_channel_fidelity(
    secret: &SecretSpec,
    n: usize,
    m: usize,
    channel_fidelity: f64,
) -> Result<f64> {
    let channel = SyntheticNoisyState::for_fidelity(ghz_state(n + m)?, channel_fidelity)?;
    let input =
        crate::encoding::shared_secret_state(secret, &crate::encoding::EncodingParams::ghz(n)?)?;
    let out = expected_output_under_ideal_bsm(
        &DensityMatrix::from_pure(&input),
        &channel.density()?,
        n,
        m,
    )?;
    let target = crate::protocol::receiver_target(secret, m)?;
    out.fidelity(&target)
}
