use super::{PartyId, Role};
use crate::bsm::{BellOutcome, BsmVariant};
use crate::encoding::{network_channel, shared_secret_state, EncodingParams, SecretSpec};
use crate::error::{Error, Result};
use crate::qstate::{partial_trace, project_two_photon_all, DensityMatrix, PureState};

/// What an eavesdropping coalition conditions on: the run parameters and the
/// announcements made so far. Senders are 1-based as in [`PartyId`].
#[derive(Debug, Clone)]
pub struct RunContext {
    pub secret: SecretSpec,
    pub n: usize,
    pub m: usize,
    pub variant: BsmVariant,
    pub announced: Vec<(usize, BellOutcome)>,
}

impl RunContext {
    pub fn new(secret: SecretSpec, n: usize, m: usize) -> Self {
        RunContext {
            secret,
            n,
            m,
            variant: super::run::SENDER_VARIANT,
            announced: Vec::new(),
        }
    }

    pub fn announce(mut self, sender: usize, outcome: BellOutcome) -> Self {
        self.announced.push((sender, outcome));
        self
    }
}

/// Photons held by a party, in the run's layout.
fn photons_of(party: &PartyId, n: usize, m: usize) -> Result<Vec<usize>> {
    let bound = match party.role {
        Role::Sender => n,
        Role::Receiver => m,
    };
    if party.index == 0 || party.index > bound {
        return Err(Error::InvalidParameter(format!(
            "no party {party} in this run"
        )));
    }
    let k = party.index - 1;
    Ok(match party.role {
        Role::Sender => vec![k, n + k],
        Role::Receiver => vec![2 * n + k],
    })
}

/// State of the photons held by `parties`, conditioned on the announcements
/// in `ctx` and averaged over everything else, before any correction.
///
/// A `Detected` announcement conditions on that exact Bell state (any of the
/// four labels is accepted, so fine-grained branches can be audited). A
/// failure conditions on the analyzer's failure subspace. A loss carries no
/// information. Unannounced senders outside the coalition are traced out.
/// Photons are returned sender by sender (`sᵢ`, `s′ᵢ`), then receivers.
pub fn sub_party_reduced_state(ctx: &RunContext, parties: &[PartyId]) -> Result<DensityMatrix> {
    let (n, m) = (ctx.n, ctx.m);
    let enc = EncodingParams::ghz(n)?;
    let mut parties = parties.to_vec();
    parties.sort();
    parties.dedup();
    if parties.is_empty() {
        return Err(Error::EmptyKeep);
    }
    let mut keep_original = Vec::new();
    for p in &parties {
        keep_original.extend(photons_of(p, n, m)?);
    }
    if keep_original.len() == 2 * n + m {
        return Err(Error::SubsetCoversAll);
    }
    for (sender, _) in &ctx.announced {
        if parties.contains(&PartyId::sender(*sender)) {
            return Err(Error::InvalidParameter(format!(
                "s{sender} is in the coalition and cannot also be conditioned on"
            )));
        }
        photons_of(&PartyId::sender(*sender), n, m)?;
    }

    let mut state: PureState =
        shared_secret_state(&ctx.secret, &enc)?.tensor(&network_channel(&enc, m)?)?;
    let mut alive: Vec<usize> = (0..2 * n + m).collect();
    let pos = |alive: &[usize], x: usize| alive.iter().position(|&y| y == x).unwrap();
    for (sender, outcome) in &ctx.announced {
        let k = sender - 1;
        let (a, b) = (pos(&alive, k), pos(&alive, n + k));
        let conditioned = match outcome {
            BellOutcome::Detected(label) => {
                let proj = project_two_photon_all(&state, a, b, &[label.photon_ket()])?;
                alive.retain(|&x| x != k && x != n + k);
                proj.into_iter().next().and_then(|p| p.state)
            }
            BellOutcome::FailureDetected | BellOutcome::FailureUndetected => {
                let kets: Vec<PureState> = ctx
                    .variant
                    .detected_set()
                    .iter()
                    .map(|l| l.photon_ket())
                    .collect();
                project_two_photon_all(&state, a, b, &kets)?
                    .pop()
                    .and_then(|p| p.state)
            }
            BellOutcome::LossDetected => Some(state.with_lost(a, true)?.with_lost(b, true)?),
        };
        state = conditioned.ok_or(Error::ZeroProbability)?;
    }
    let keep: Vec<usize> = keep_original.iter().map(|&x| pos(&alive, x)).collect();
    partial_trace(&state, &keep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::{BellLabel, Sign, Symbol};
    use num_complex::Complex64;

    fn secret() -> SecretSpec {
        SecretSpec::new(Complex64::new(0.8, 0.0), Complex64::new(0.0, 0.6)).unwrap()
    }

    #[test]
    fn single_sender_sees_only_amplitudes() {
        for (label, support) in [
            (BellLabel::photon(Symbol::Phi, Sign::Minus), [0usize, 3]),
            (BellLabel::photon(Symbol::Psi, Sign::Minus), [1, 2]),
        ] {
            let ctx = RunContext::new(secret(), 2, 1).announce(2, BellOutcome::Detected(label));
            let rho = sub_party_reduced_state(&ctx, &[PartyId::sender(1)]).unwrap();
            assert!(rho.max_coherence() < 1e-12);
            let d = rho.diagonal();
            assert!((d[support[0]] - 0.64).abs() < 1e-10, "{d:?}");
            assert!((d[support[1]] - 0.36).abs() < 1e-10, "{d:?}");
        }
    }

    #[test]
    fn rejects_whole_network_and_double_roles() {
        let ctx = RunContext::new(secret(), 1, 1);
        assert!(matches!(
            sub_party_reduced_state(&ctx, &[PartyId::sender(1), PartyId::receiver(1)]),
            Err(Error::SubsetCoversAll)
        ));
        let ctx = ctx.announce(1, BellOutcome::FailureDetected);
        assert!(sub_party_reduced_state(&ctx, &[PartyId::sender(1)]).is_err());
        assert!(sub_party_reduced_state(&ctx, &[PartyId::receiver(2)]).is_err());
    }

    #[test]
    fn failure_conditioning_is_a_valid_state() {
        let ctx = RunContext::new(secret(), 2, 2)
            .announce(1, BellOutcome::FailureDetected)
            .announce(
                2,
                BellOutcome::Detected(BellLabel::photon(Symbol::Phi, Sign::Minus)),
            );
        let rho = sub_party_reduced_state(&ctx, &[PartyId::receiver(2)]).unwrap();
        rho.validate().unwrap();
        assert!(rho.max_coherence() < 1e-12);
    }
}
