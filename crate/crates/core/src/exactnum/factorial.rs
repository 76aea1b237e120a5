//! Exact and certified-enclosure factorials.

use super::log2::log2_bounds;
use super::{Magnitude, Rational};
use num_bigint::BigInt;
use num_traits::One;

/// Exact factorials are refused beyond this by default; enclosures stay
/// available for any `n`.
pub const DEFAULT_FACTORIAL_CAP: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("factorial({n}) exceeds the exact-computation cap {cap}")]
pub struct FactorialError {
    pub n: u64,
    pub cap: u64,
}

/// Exact `n!` for `n` up to the cap.
pub fn factorial(n: u64, cap: u64) -> Result<BigInt, FactorialError> {
    if n > cap {
        return Err(FactorialError { n, cap });
    }
    Ok(product_range(1, n.max(1)))
}

/// Balanced product of `lo..=hi`; subdivision keeps operand sizes even.
fn product_range(lo: u64, hi: u64) -> BigInt {
    if lo > hi {
        return BigInt::one();
    }
    if hi - lo < 8 {
        let mut acc = BigInt::one();
        for k in lo..=hi {
            acc *= BigInt::from(k);
        }
        return acc;
    }
    let mid = lo + (hi - lo) / 2;
    product_range(lo, mid) * product_range(mid + 1, hi)
}

/// Sequential left-to-right product, used as an independent evaluation order
/// in cross-checks.
pub fn factorial_sequential(n: u64) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n.max(1) {
        acc *= BigInt::from(k);
    }
    acc
}

/// Certified enclosure of `n!`: exact (then lifted) when `n` is within the
/// cap, otherwise a sum of certified `log2 k` intervals.
pub fn factorial_mag(n: u64, cap: u64, bits: u32) -> Magnitude {
    if n <= cap {
        let exact = factorial(n, cap).expect("within cap");
        return Magnitude::from_bigint(&exact).expect("factorial is positive");
    }
    let mut lo = Rational::from_integer(BigInt::from(0));
    let mut hi = lo.clone();
    for k in 2..=n {
        let (l, h) = log2_bounds(&Rational::from_integer(BigInt::from(k)), bits);
        lo += l;
        hi += h;
    }
    // log2(n!) is in [lo, hi]: a level-1 body.
    Magnitude::from_interval(lo, hi, bits)
        .expect("positive log sum")
        .exp2(bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat_int;

    #[test]
    fn small_factorials() {
        assert_eq!(factorial(0, 10).unwrap(), BigInt::from(1));
        assert_eq!(factorial(1, 10).unwrap(), BigInt::from(1));
        assert_eq!(factorial(5, 10).unwrap(), BigInt::from(120));
        assert!(factorial(11, 10).is_err());
    }

    #[test]
    fn factorial_42_digit_count_and_evaluation_orders() {
        let balanced = factorial(42, DEFAULT_FACTORIAL_CAP).unwrap();
        let sequential = factorial_sequential(42);
        assert_eq!(balanced, sequential, "two evaluation orders must agree");
        assert_eq!(balanced.to_string().len(), 52);
    }

    #[test]
    fn factorial_mag_encloses_exact() {
        let m = factorial_mag(12, DEFAULT_FACTORIAL_CAP, 96);
        assert!(m.contains(&rat_int(479_001_600), 128));
        // Force the log-sum path with a tiny cap and check consistency.
        let via_logs = factorial_mag(12, 4, 96);
        assert!(via_logs.contains(&rat_int(479_001_600), 128));
    }
}
