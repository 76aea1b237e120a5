//! Arbitrary-precision rationals and certified "log-tower" magnitude arithmetic.
//!
//! [`Rational`] (an alias for [`num_rational::BigRational`]) is the universal
//! exact value type: always reduced, denominator always positive, arithmetic
//! exact. [`Magnitude`] extends the reachable range to numbers like
//! `84^(128·42^5)` by storing a certified interval around an iterated base-2
//! logarithm of the value; every operation rounds outward, so an enclosure is
//! never wrong, only possibly wide.

mod factorial;
mod log2;
mod magnitude;

pub use factorial::{factorial, factorial_mag, factorial_sequential, FactorialError, DEFAULT_FACTORIAL_CAP};
pub use log2::{exp2_bounds, floor_log2, log2_bounds};
pub use magnitude::{
    knuth_tower, CompareOutcome, Magnitude, MagnitudeError, DEFAULT_PRECISION_BITS,
};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision reduced fraction. Invariants (maintained by
/// `num_rational`): `gcd(|numerator|, denominator) = 1`, `denominator > 0`.
pub type Rational = num_rational::BigRational;

/// Shorthand constructor from machine integers. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// The integer `n` as a rational.
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Exact `2^k` for signed `k`.
pub fn pow2(k: i64) -> Rational {
    if k >= 0 {
        Rational::from_integer(BigInt::one() << k as usize)
    } else {
        Rational::new(BigInt::one(), BigInt::one() << (-k) as usize)
    }
}

/// Error from [`parse_rational`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal {0:?}: expected \"a\" or \"a/b\" with b > 0")]
pub struct ParseRationalError(pub String);

/// Parses `"a"` or `"a/b"` (no decimals). The result is reduced.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let bad = || ParseRationalError(s.to_string());
    let mut parts = s.splitn(2, '/');
    let num: BigInt = parts.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
    match parts.next() {
        None => Ok(Rational::from_integer(num)),
        Some(d) => {
            let den: BigInt = d.trim().parse().map_err(|_| bad())?;
            if den.is_zero() || den.is_negative() {
                return Err(bad());
            }
            Ok(Rational::new(num, den))
        }
    }
}

/// Renders a rational as `"a/b"`, or just `"a"` when the denominator is 1.
pub fn format_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}
