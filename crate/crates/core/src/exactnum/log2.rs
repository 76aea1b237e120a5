//! Certified base-2 logarithm and exponential bounds on exact rationals.
//!
//! `log2` is computed by binary digit extraction: square the mantissa, emit a
//! bit, halve when it crosses 2. Both interval endpoints share the bit
//! decisions, the lower mantissa rounds down and the upper rounds up, so an
//! emitted bit is a true bit of `log2(x)` and the residual is bracketed by
//! construction.

use super::{pow2, Rational};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Largest `k` with `2^k <= x`. Requires `x > 0`.
pub fn floor_log2(x: &Rational) -> i64 {
    assert!(x.is_positive(), "floor_log2 requires a positive argument");
    let a = x.numer().magnitude();
    let b = x.denom().magnitude();
    let mut k = a.bits() as i64 - b.bits() as i64;
    while !pow2_le(k, a, b) {
        k -= 1;
    }
    while pow2_le(k + 1, a, b) {
        k += 1;
    }
    k
}

/// `2^k <= a/b` on magnitudes.
fn pow2_le(k: i64, a: &BigUint, b: &BigUint) -> bool {
    if k >= 0 {
        *a >= (b << k as usize)
    } else {
        (a << (-k) as usize) >= *b
    }
}

/// `Some(k)` iff `x = 2^k` exactly.
pub(crate) fn exact_pow2_public(x: &Rational) -> Option<i64> {
    exact_pow2(x)
}

fn exact_pow2(x: &Rational) -> Option<i64> {
    let a = x.numer().magnitude();
    let b = x.denom().magnitude();
    // Reduced, so at most one of numerator/denominator is even; a power of
    // two has the other equal to 1.
    if b.is_one() && a.count_ones() == 1 {
        Some(a.bits() as i64 - 1)
    } else if a.is_one() && b.count_ones() == 1 {
        Some(1 - b.bits() as i64)
    } else {
        None
    }
}

const GUARD_BITS: u32 = 32;

/// Certified enclosure `[lo, hi]` of `log2(x)` with `lo <= log2(x) <= hi`,
/// extracted to `bits` fractional bits. Requires `x > 0`. Exact (a point)
/// when `x` is a power of two.
pub fn log2_bounds(x: &Rational, bits: u32) -> (Rational, Rational) {
    assert!(x.is_positive(), "log2_bounds requires a positive argument");
    if let Some(k) = exact_pow2(x) {
        let v = Rational::from_integer(BigInt::from(k));
        return (v.clone(), v);
    }
    if *x < Rational::one() {
        let (lo, hi) = log2_bounds(&x.recip(), bits);
        return (-hi, -lo);
    }
    let k = floor_log2(x);
    let y = x / pow2(k);
    debug_assert!(y >= Rational::one() && y < rat2());

    let b = (bits + GUARD_BITS) as usize;
    let scale: BigUint = BigUint::one() << b;
    let two_b1: BigUint = BigUint::one() << (b + 1);
    // Mantissas with implicit denominator 2^b; m_lo rounds down, m_hi up.
    let mut m_lo = (y.numer().magnitude() * &scale).div_floor(y.denom().magnitude());
    let mut m_hi = (y.numer().magnitude() * &scale).div_ceil(y.denom().magnitude());

    let mut acc = BigUint::zero();
    let mut steps: u32 = 0;
    for _ in 0..bits {
        m_lo = (&m_lo * &m_lo) >> b;
        m_hi = ((&m_hi * &m_hi) + (&scale - BigUint::one())) >> b;
        if m_lo >= two_b1 {
            acc = (acc << 1) + BigUint::one();
            m_lo >>= 1;
            m_hi = (m_hi + BigUint::one()) >> 1;
        } else if m_hi < two_b1 {
            acc <<= 1;
        } else {
            // The interval straddles 2; the digits emitted so far are still
            // true digits, stop with the residual bracketed by one ulp.
            break;
        }
        if m_lo < scale {
            // The true trajectory never drops below 1.
            m_lo = scale.clone();
        }
        steps += 1;
    }
    let base = Rational::from_integer(BigInt::from(k))
        + Rational::new(BigInt::from(acc), BigInt::one() << steps as usize);
    (base.clone(), base + pow2(-(steps as i64)))
}

fn rat2() -> Rational {
    Rational::from_integer(BigInt::from(2))
}

/// Certified enclosure of `2^x` for rational `x`, via iterated square roots
/// of 2 for the fractional part. Intended for moderate `|x|` (the integer
/// part is materialized exactly).
pub fn exp2_bounds(x: &Rational, bits: u32) -> (Rational, Rational) {
    let n = x.floor().to_integer();
    let f = x - Rational::from_integer(n.clone());
    debug_assert!(f >= Rational::zero() && f < Rational::one());
    let n_i64 = i64::try_from(&n).expect("exp2_bounds: integer part out of range");
    let int_part = pow2(n_i64);
    if f.is_zero() {
        return (int_part.clone(), int_part);
    }

    let b = (bits + GUARD_BITS) as usize;
    let scale: BigUint = BigUint::one() << b;
    // Chains r_i ~ 2^(2^-i) with directed rounding, i = 1..=bits.
    let mut acc_lo = scale.clone();
    let mut acc_hi = scale.clone();
    let mut r_lo: BigUint = &scale << 1;
    let mut r_hi: BigUint = &scale << 1;
    let mut frac = f.clone();
    for _ in 0..bits {
        r_lo = (&r_lo << b).sqrt();
        r_hi = (&r_hi << b).sqrt() + BigUint::one();
        frac = &frac + &frac;
        if frac >= Rational::one() {
            frac -= Rational::one();
            acc_lo = (&acc_lo * &r_lo) >> b;
            acc_hi = ((&acc_hi * &r_hi) + (&scale - BigUint::one())) >> b;
        }
    }
    // Truncation of the fractional expansion: multiply the upper bound by
    // (1 + 2^(1-bits)) >= 2^(2^-bits).
    acc_hi = &acc_hi + (&acc_hi >> (bits as usize - 1)) + BigUint::one();
    let den = Rational::from_integer(BigInt::from(scale));
    (
        &int_part * Rational::from_integer(BigInt::from(acc_lo)) / &den,
        int_part * Rational::from_integer(BigInt::from(acc_hi)) / den,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{rat, rat_int};

    #[test]
    fn floor_log2_basics() {
        assert_eq!(floor_log2(&rat_int(1)), 0);
        assert_eq!(floor_log2(&rat_int(2)), 1);
        assert_eq!(floor_log2(&rat_int(3)), 1);
        assert_eq!(floor_log2(&rat_int(1024)), 10);
        assert_eq!(floor_log2(&rat(1, 2)), -1);
        assert_eq!(floor_log2(&rat(3, 8)), -2);
    }

    #[test]
    fn log2_exact_powers() {
        assert_eq!(log2_bounds(&rat_int(8), 96), (rat_int(3), rat_int(3)));
        assert_eq!(log2_bounds(&rat(1, 4), 96), (rat_int(-2), rat_int(-2)));
        assert_eq!(log2_bounds(&rat_int(1), 96), (rat_int(0), rat_int(0)));
    }

    #[test]
    fn log2_42_at_20_bits() {
        let (lo, hi) = log2_bounds(&rat_int(42), 20);
        // log2(42) = 5.39231...
        assert!(lo <= hi);
        assert!(lo > rat(539, 100) && hi < rat(540, 100));
        assert!(&hi - &lo <= crate::exactnum::pow2(-18));
    }

    #[test]
    fn log2_bounds_bracket_value() {
        // 2^lo <= x <= 2^hi checked by exponent comparison at several points.
        for x in [rat_int(3), rat_int(84), rat(7, 5), rat(1807, 42), rat(1, 3)] {
            let (lo, hi) = log2_bounds(&x, 64);
            assert!(lo <= hi);
            let (elo_lo, _) = exp2_bounds(&lo, 80);
            let (_, ehi_hi) = exp2_bounds(&hi, 80);
            assert!(elo_lo <= x, "2^lo must not exceed x");
            assert!(ehi_hi >= x, "2^hi must not undercut x");
            assert!(&hi - &lo < crate::exactnum::pow2(-60));
        }
    }

    #[test]
    fn exp2_brackets() {
        let (lo, hi) = exp2_bounds(&rat(3, 2), 64);
        // 2^1.5 = 2.82842712...
        assert!(lo < hi);
        assert!(lo > rat(28284, 10001));
        assert!(hi < rat(28285, 10000));
        let (lo, hi) = exp2_bounds(&rat(-5, 2), 64);
        // 2^-2.5 = 0.17677...
        assert!(lo > rat(1767, 10000) && hi < rat(1768, 10000));
        assert_eq!(exp2_bounds(&rat_int(10), 32), (rat_int(1024), rat_int(1024)));
    }
}
