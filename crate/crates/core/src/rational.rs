//! Recovering exact rationals from floating-point branch weights.
//!
//! Branch probabilities of the GHZ protocol are products of `1/2`, `1/4` and
//! the failure-detection efficiency, so with `f` rational they are rational
//! with small denominators. Summed Born weights carry rounding noise; these
//! helpers snap them back.

use num_rational::Ratio;

pub type Rational = Ratio<i64>;

/// Largest denominator accepted when snapping.
pub const MAX_DENOMINATOR: i64 = 1 << 16;

/// Accepted distance between a float and its snapped rational.
pub const SNAP_TOL: f64 = 1e-12;

/// Closest continued-fraction convergent of `x` within [`SNAP_TOL`], with
/// denominator at most [`MAX_DENOMINATOR`].
pub fn snap(x: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            return None;
        }
        let a = a as i64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > MAX_DENOMINATOR {
            return None;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (x - h1 as f64 / k1 as f64).abs() <= SNAP_TOL {
            return Some(Ratio::new(h1, k1));
        }
        let frac = r - a as f64;
        if frac <= 0.0 {
            return None;
        }
        r = 1.0 / frac;
    }
    None
}

pub fn to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snaps_simple_fractions() {
        assert_eq!(snap(0.75), Some(Ratio::new(3, 4)));
        assert_eq!(snap(4.0 / 9.0 + 1e-15), Some(Ratio::new(4, 9)));
        assert_eq!(snap(0.0), Some(Ratio::new(0, 1)));
        assert_eq!(snap(1.0), Some(Ratio::new(1, 1)));
        assert_eq!(snap(1.0 - 1.0 / 64.0), Some(Ratio::new(63, 64)));
    }

    #[test]
    fn rejects_irrationals() {
        assert_eq!(snap(std::f64::consts::PI), None);
        assert_eq!(snap(f64::NAN), None);
    }
}
