use super::level1::Level1Result;
use crate::encoding::{Sign, Symbol};
use crate::error::{Error, Result};
use crate::protocol::LogicalBellOutcome;

fn logical_sign(results: &[Level1Result]) -> Option<Sign> {
    let mut minus = 0;
    for r in results {
        minus += r.sign()?.is_minus() as usize;
    }
    Some(Sign::from_minus_count(minus))
}

/// Logical outcome from the block results: the symbol of any Success, and
/// the sign `(−)^s` with `s` the number of minus-signed blocks. Needs at
/// least one Success and no Failure.
pub fn bsm_level2(results: &[Level1Result]) -> Result<LogicalBellOutcome> {
    if results.is_empty() {
        return Err(Error::EmptyOutcomes);
    }
    let Some(sign) = logical_sign(results) else {
        return Ok(LogicalBellOutcome::ProtocolFailure);
    };
    let mut symbols = results.iter().filter_map(|r| r.symbol());
    let Some(symbol) = symbols.next() else {
        return Ok(LogicalBellOutcome::ProtocolFailure);
    };
    if symbols.any(|s| s != symbol) {
        return Ok(LogicalBellOutcome::Inconsistent);
    }
    Ok(LogicalBellOutcome::Identified { symbol, sign })
}

/// Outcome of [`logical_symbol_correct`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymbolCorrected {
    pub outcome: LogicalBellOutcome,
    /// Successful blocks whose symbol lost the vote.
    pub overruled: usize,
}

/// Like [`bsm_level2`], but the logical symbol is the majority over the
/// successful blocks, so a minority of wrong symbols is outvoted. A tied
/// vote is `Inconsistent`.
pub fn logical_symbol_correct(results: &[Level1Result]) -> Result<SymbolCorrected> {
    if results.is_empty() {
        return Err(Error::EmptyOutcomes);
    }
    let failure = SymbolCorrected {
        outcome: LogicalBellOutcome::ProtocolFailure,
        overruled: 0,
    };
    let Some(sign) = logical_sign(results) else {
        return Ok(failure);
    };
    let psi = results
        .iter()
        .filter(|r| r.symbol() == Some(Symbol::Psi))
        .count();
    let phi = results
        .iter()
        .filter(|r| r.symbol() == Some(Symbol::Phi))
        .count();
    Ok(match phi.cmp(&psi) {
        _ if phi + psi == 0 => failure,
        std::cmp::Ordering::Equal => SymbolCorrected {
            outcome: LogicalBellOutcome::Inconsistent,
            overruled: 0,
        },
        std::cmp::Ordering::Greater => SymbolCorrected {
            outcome: LogicalBellOutcome::Identified {
                symbol: Symbol::Phi,
                sign,
            },
            overruled: psi,
        },
        std::cmp::Ordering::Less => SymbolCorrected {
            outcome: LogicalBellOutcome::Identified {
                symbol: Symbol::Psi,
                sign,
            },
            overruled: phi,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use Level1Result::*;
    use Sign::*;
    use Symbol::*;

    #[test]
    fn level2_examples() {
        assert_eq!(
            bsm_level2(&[
                Success {
                    symbol: Phi,
                    sign: Minus
                },
                SignOnly(Plus),
                SignOnly(Minus)
            ])
            .unwrap(),
            LogicalBellOutcome::Identified {
                symbol: Phi,
                sign: Plus
            }
        );
        assert_eq!(
            bsm_level2(&[SignOnly(Plus), SignOnly(Plus)]).unwrap(),
            LogicalBellOutcome::ProtocolFailure
        );
        assert_eq!(
            bsm_level2(&[
                Success {
                    symbol: Phi,
                    sign: Plus
                },
                Success {
                    symbol: Psi,
                    sign: Plus
                }
            ])
            .unwrap(),
            LogicalBellOutcome::Inconsistent
        );
        assert_eq!(
            bsm_level2(&[
                Success {
                    symbol: Phi,
                    sign: Plus
                },
                Failure
            ])
            .unwrap(),
            LogicalBellOutcome::ProtocolFailure
        );
        assert!(bsm_level2(&[]).is_err());
    }

    #[test]
    fn symbol_majority_examples() {
        let s = |symbol| Success { symbol, sign: Plus };
        let r = logical_symbol_correct(&[s(Phi), s(Phi), s(Psi)]).unwrap();
        assert_eq!(
            r.outcome,
            LogicalBellOutcome::Identified {
                symbol: Phi,
                sign: Plus
            }
        );
        assert_eq!(r.overruled, 1);
        let r = logical_symbol_correct(&[s(Phi), s(Psi)]).unwrap();
        assert_eq!(r.outcome, LogicalBellOutcome::Inconsistent);
        let r = logical_symbol_correct(&[SignOnly(Minus), s(Psi)]).unwrap();
        assert_eq!(
            r.outcome,
            LogicalBellOutcome::Identified {
                symbol: Psi,
                sign: Minus
            }
        );
    }
}
