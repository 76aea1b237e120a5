//! Certified enclosures for positive reals far beyond positional range.
//!
//! A [`Magnitude`] stores a level `ℓ` and a rational interval `[lo, hi]`
//! meaning: applying `log2` to the value `ℓ` times lands inside `[lo, hi]`
//! (applied to the reciprocal when the `reciprocal` flag is set, which is how
//! numbers in `(0,1)` are stored). Every operation rounds outward, so the
//! enclosure always contains the exact result; width is the only casualty of
//! limited precision. `INCONCLUSIVE` comparisons signal the caller to retry
//! with more bits.

use super::log2::{exp2_bounds, floor_log2, log2_bounds};
use super::{pow2, Rational};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Default bit count for certified `log2` extraction.
pub const DEFAULT_PRECISION_BITS: u32 = 96;

/// Level-`ℓ` bodies whose upper endpoint exceeds this are re-expressed one
/// level up, keeping endpoint rationals small.
const PROMOTE_BITS: u64 = 64;

/// Outcome of a certified comparison. `Lt`/`Gt`/`Eq` are statements about
/// the exact underlying reals; `Inconclusive` means the enclosures overlap
/// at the current precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareOutcome {
    Lt,
    Gt,
    Eq,
    Inconclusive,
}

impl CompareOutcome {
    fn flip(self) -> Self {
        match self {
            CompareOutcome::Lt => CompareOutcome::Gt,
            CompareOutcome::Gt => CompareOutcome::Lt,
            other => other,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MagnitudeError {
    #[error("magnitude requires a strictly positive value")]
    NonPositive,
    #[error("power base must be certified >= 1")]
    BaseBelowOne,
    #[error("knuth tower requires p >= 2, n >= 1, r >= 1")]
    TowerDomain,
}

/// Certified enclosure of a positive real; see the module docs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Magnitude {
    reciprocal: bool,
    level: u32,
    lo: Rational,
    hi: Rational,
}

impl Magnitude {
    fn raw(reciprocal: bool, level: u32, lo: Rational, hi: Rational) -> Self {
        debug_assert!(lo <= hi, "magnitude body must be ordered");
        Magnitude { reciprocal, level, lo, hi }
    }

    /// The value 1.
    pub fn one() -> Self {
        Magnitude::raw(false, 0, Rational::one(), Rational::one())
    }

    /// Exact enclosure of a positive rational (point interval; values in
    /// `(0,1)` flip to the reciprocal form, exact powers of two and values
    /// beyond `2^64` get promoted to a higher level).
    pub fn from_rational(x: &Rational) -> Result<Self, MagnitudeError> {
        Self::from_rational_bits(x, DEFAULT_PRECISION_BITS)
    }

    pub fn from_rational_bits(x: &Rational, bits: u32) -> Result<Self, MagnitudeError> {
        if !x.is_positive() {
            return Err(MagnitudeError::NonPositive);
        }
        Ok(Magnitude::raw(false, 0, x.clone(), x.clone()).normalized(bits))
    }

    pub fn from_u64(n: u64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(n)))
            .expect("positive integer")
    }

    pub fn from_bigint(n: &BigInt) -> Result<Self, MagnitudeError> {
        Self::from_rational(&Rational::from_integer(n.clone()))
    }

    /// Enclosure from a positive rational interval.
    pub fn from_interval(lo: Rational, hi: Rational, bits: u32) -> Result<Self, MagnitudeError> {
        if !lo.is_positive() || lo > hi {
            return Err(MagnitudeError::NonPositive);
        }
        Ok(Magnitude::raw(false, 0, lo, hi).normalized(bits))
    }

    pub fn is_reciprocal(&self) -> bool {
        self.reciprocal
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn body(&self) -> (&Rational, &Rational) {
        (&self.lo, &self.hi)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// The reciprocal `1/x` (exact representational flip).
    pub fn recip(&self) -> Self {
        let mut out = self.clone();
        out.reciprocal = !out.reciprocal;
        out.normalized(DEFAULT_PRECISION_BITS)
    }

    /// The tower underlying a reciprocal value (identity for non-reciprocal).
    fn inner(&self) -> Self {
        Magnitude::raw(false, self.level, self.lo.clone(), self.hi.clone())
    }

    /// Re-expresses the value one level up: the body becomes a certified
    /// enclosure of `log2` of the old body. Requires a non-reciprocal value
    /// with a positive body lower end.
    pub fn lift_once(&self, bits: u32) -> Self {
        assert!(!self.reciprocal, "lift_once is defined on towers");
        let (lo, hi) = lift_body(&self.lo, &self.hi, bits);
        Magnitude::raw(false, self.level + 1, lo, hi)
    }

    fn normalized(mut self, bits: u32) -> Self {
        loop {
            // Values fully below 1 are stored via the reciprocal flag.
            if self.level == 0 && self.hi < Rational::one() {
                self.reciprocal = !self.reciprocal;
                let new_lo = self.hi.recip();
                let new_hi = self.lo.recip();
                self.lo = new_lo;
                self.hi = new_hi;
                continue;
            }
            // The reciprocal of exactly 1 is 1.
            if self.reciprocal && self.level == 0 && self.lo.is_one() && self.hi.is_one() {
                self.reciprocal = false;
                continue;
            }
            // Exact powers of two move up a level losslessly.
            if self.lo == self.hi {
                if let Some(e) = super::log2::exact_pow2_public(&self.lo) {
                    if e >= 2 {
                        self.lo = Rational::from_integer(BigInt::from(e));
                        self.hi = self.lo.clone();
                        self.level += 1;
                        continue;
                    }
                }
            }
            // Oversized bodies get re-expressed one level up.
            if self.lo >= Rational::from_integer(BigInt::from(2))
                && self.hi > pow2(PROMOTE_BITS as i64)
            {
                let (lo, hi) = lift_body(&self.lo, &self.hi, bits);
                self.lo = lo;
                self.hi = hi;
                self.level += 1;
                continue;
            }
            break;
        }
        self
    }

    /// Exact rational value interval, available when the body is level 0.
    fn value_interval(&self) -> Option<(Rational, Rational)> {
        if self.level != 0 {
            return None;
        }
        if self.reciprocal {
            Some((self.hi.recip(), self.lo.recip()))
        } else {
            Some((self.lo.clone(), self.hi.clone()))
        }
    }

    /// Sound enclosure of the product.
    pub fn mul(&self, other: &Self, bits: u32) -> Self {
        match (self.reciprocal, other.reciprocal) {
            (false, false) => mul_towers(self, other, bits),
            (true, true) => mul_towers(&self.inner(), &other.inner(), bits)
                .recip_raw()
                .normalized(bits),
            _ => {
                if let (Some((a1, a2)), Some((b1, b2))) =
                    (self.value_interval(), other.value_interval())
                {
                    return Magnitude::raw(false, 0, a1 * b1, a2 * b2).normalized(bits);
                }
                let (num, den) = if self.reciprocal {
                    (other, self)
                } else {
                    (self, other)
                };
                div_towers(num, &den.inner(), bits)
            }
        }
    }

    fn recip_raw(mut self) -> Self {
        self.reciprocal = !self.reciprocal;
        self
    }

    /// Sound enclosure of `self^exp`. Requires `self` certified `>= 1`.
    pub fn pow(&self, exp: &Self, bits: u32) -> Result<Self, MagnitudeError> {
        if self.reciprocal {
            return Err(MagnitudeError::BaseBelowOne);
        }
        if self.level == 0 {
            if self.lo.is_one() && self.hi.is_one() {
                return Ok(Magnitude::one());
            }
            if self.lo < Rational::one() {
                return Err(MagnitudeError::BaseBelowOne);
            }
        }
        // log2 of the result = exp * log2(base), all quantities >= 0.
        let log_base = log_term(self, bits);
        let product = match (&log_base, exp.value_interval()) {
            (LogTerm::Small(l1, l2), Some((e1, e2))) => {
                // Exact interval product in log space (everything >= 0).
                return Ok(wrap_log(
                    LogTerm::Small(l1 * &e1, l2 * &e2),
                    bits,
                ));
            }
            (LogTerm::Small(l1, l2), None) => {
                if l1.is_zero() && l2.is_zero() {
                    return Ok(Magnitude::one());
                }
                let factor =
                    Magnitude::raw(false, 0, l1.clone(), l2.clone()).normalized(bits);
                exp.mul(&factor, bits)
            }
            (LogTerm::Tower(lv, lo, hi), _) => {
                let lmag = Magnitude::raw(false, *lv, lo.clone(), hi.clone());
                exp.mul(&lmag, bits)
            }
        };
        Ok(exp2_of(&product, bits))
    }

    /// `self^e` for an exact positive rational exponent.
    pub fn pow_rational(&self, e: &Rational, bits: u32) -> Result<Self, MagnitudeError> {
        if !e.is_positive() {
            return Err(MagnitudeError::NonPositive);
        }
        let exp = Magnitude::raw(false, 0, e.clone(), e.clone()).normalized(bits);
        self.pow(&exp, bits)
    }

    /// Sound enclosure of `self + 1`; exact at level 0. Requires value >= 1.
    pub fn add_one(&self, bits: u32) -> Self {
        self.add_u64(1, bits)
    }

    /// Sound enclosure of the sum of two values. Exact when both are exact
    /// rational intervals; for towers the result is bracketed by
    /// `[max, 2·max]` with the doubling damped through the level stack.
    pub fn add(&self, other: &Self, bits: u32) -> Self {
        if let (Some((a1, a2)), Some((b1, b2))) =
            (self.value_interval(), other.value_interval())
        {
            return Magnitude::raw(false, 0, a1 + b1, a2 + b2).normalized(bits);
        }
        assert!(
            !self.reciprocal && !other.reciprocal,
            "tower addition is defined on values >= 1"
        );
        let (level, lo, hi) = add_towers(
            self.level,
            self.lo.clone(),
            self.hi.clone(),
            other.level,
            other.lo.clone(),
            other.hi.clone(),
            bits,
        );
        Magnitude::raw(false, level, lo, hi).normalized(bits)
    }

    /// Sound enclosure of `self * k`.
    pub fn mul_u64(&self, k: u64, bits: u32) -> Self {
        self.mul(&Magnitude::from_u64(k), bits)
    }

    /// Sound enclosure of `self + k` for `k >= 0`; requires value >= 1.
    pub fn add_u64(&self, k: u64, bits: u32) -> Self {
        assert!(!self.reciprocal, "add_u64 requires value >= 1");
        if k == 0 {
            return self.clone();
        }
        let d = Rational::from_integer(BigInt::from(k));
        if self.level == 0 {
            return Magnitude::raw(false, 0, &self.lo + &d, &self.hi + &d).normalized(bits);
        }
        let (level, lo, hi) = add_interval(self.level, &self.lo, &self.hi, &d, &d, bits);
        Magnitude::raw(false, level, lo, hi).normalized(bits)
    }

    /// Sound enclosure of `floor(self)`; exact at level 0. Requires value >= 1.
    pub fn floor_enclosure(&self, bits: u32) -> Self {
        assert!(!self.reciprocal, "floor_enclosure requires value >= 1");
        if self.level == 0 {
            let lo = self.lo.floor();
            let hi = self.hi.floor();
            let one = Rational::one();
            let lo = if lo < one { one.clone() } else { lo };
            let hi = if hi < one { one } else { hi };
            return Magnitude::raw(false, 0, lo, hi).normalized(bits);
        }
        // floor(x) in (x-1, x]
        let (level, lo, hi) = add_interval(
            self.level,
            &self.lo,
            &self.hi,
            &-Rational::one(),
            &Rational::zero(),
            bits,
        );
        Magnitude::raw(false, level, lo, hi).normalized(bits)
    }

    /// Certified three-way comparison at default precision.
    pub fn compare(&self, other: &Self) -> CompareOutcome {
        self.compare_bits(other, DEFAULT_PRECISION_BITS)
    }

    pub fn compare_bits(&self, other: &Self, bits: u32) -> CompareOutcome {
        match (self.reciprocal, other.reciprocal) {
            (false, false) => cmp_towers(
                self.level,
                (&self.lo, &self.hi),
                other.level,
                (&other.lo, &other.hi),
                bits,
            ),
            (true, true) => cmp_towers(
                other.level,
                (&other.lo, &other.hi),
                self.level,
                (&self.lo, &self.hi),
                bits,
            ),
            (true, false) => cmp_recip_vs_tower(self, other, bits),
            (false, true) => cmp_recip_vs_tower(other, self, bits).flip(),
        }
    }

    /// Consistency probe used by soundness tests: certifies that the
    /// enclosure is compatible with the exact rational `x` (i.e. the two
    /// certified enclosures of the iterated log intersect). A `false` result
    /// proves the enclosure wrong.
    pub fn contains(&self, x: &Rational, bits: u32) -> bool {
        if !x.is_positive() {
            return false;
        }
        let target = if self.reciprocal { x.recip() } else { x.clone() };
        let mut lo = target.clone();
        let mut hi = target;
        for _ in 0..self.level {
            if !lo.is_positive() {
                // The claimed body asserts deeper log iterates than the value
                // admits; with outward rounding this cannot certify.
                return false;
            }
            let (l, h) = lift_body(&lo, &hi, bits);
            lo = l;
            hi = h;
        }
        !(hi < self.lo || lo > self.hi)
    }

    /// `2^self` (value space); the dual of [`Magnitude::lift_once`].
    pub fn exp2(&self, bits: u32) -> Self {
        exp2_of(self, bits)
    }
}

impl std::fmt::Display for Magnitude {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{{reciprocal={}, level={}, lo={}, hi={}}}",
            self.reciprocal,
            self.level,
            super::format_rational(&self.lo),
            super::format_rational(&self.hi)
        )
    }
}

/// `(p↑)^n r`: the `n`-fold iterated exponential `p^(p^(...^r))`.
/// Requires `p >= 2`, `n >= 1`, `r >= 1`.
pub fn knuth_tower(p: u64, n: u32, r: &Rational, bits: u32) -> Result<Magnitude, MagnitudeError> {
    if p < 2 || n == 0 || *r < Rational::one() {
        return Err(MagnitudeError::TowerDomain);
    }
    if p == 2 {
        // log2 applied n times gives exactly r.
        return Ok(Magnitude::raw(false, n, r.clone(), r.clone()).normalized(bits));
    }
    let (lp_lo, lp_hi) = log2_bounds(&Rational::from_integer(BigInt::from(p)), bits);
    // x_1 = p^r
    let mut x = wrap_log(LogTerm::Small(r * &lp_lo, r * &lp_hi), bits);
    let logp = Magnitude::raw(false, 0, lp_lo, lp_hi).normalized(bits);
    for _ in 1..n {
        // x_{k+1} = p^{x_k}: log2 = x_k * log2(p)
        let log_next = x.mul(&logp, bits);
        x = exp2_of(&log_next, bits);
    }
    Ok(x)
}

// ---------------------------------------------------------------------------
// internals
// ---------------------------------------------------------------------------

/// Log-space representation of a non-reciprocal magnitude: either a signed
/// rational interval, or itself a tower (for doubly-huge values).
enum LogTerm {
    Small(Rational, Rational),
    Tower(u32, Rational, Rational),
}

fn log_term(x: &Magnitude, bits: u32) -> LogTerm {
    debug_assert!(!x.reciprocal);
    match x.level {
        0 => {
            let (l1, _) = log2_bounds(&x.lo, bits);
            let (_, l2) = log2_bounds(&x.hi, bits);
            LogTerm::Small(l1, l2)
        }
        1 => LogTerm::Small(x.lo.clone(), x.hi.clone()),
        l => LogTerm::Tower(l - 1, x.lo.clone(), x.hi.clone()),
    }
}

/// `2^t` as a magnitude.
fn wrap_log(t: LogTerm, bits: u32) -> Magnitude {
    match t {
        LogTerm::Small(l1, l2) => {
            if l1 >= Rational::one() {
                Magnitude::raw(false, 1, l1, l2).normalized(bits)
            } else if l2 <= Rational::from_integer(BigInt::from(PROMOTE_BITS)) {
                let (v1, _) = exp2_bounds(&l1, bits);
                let (_, v2) = exp2_bounds(&l2, bits);
                Magnitude::raw(false, 0, v1, v2).normalized(bits)
            } else {
                // Degenerate span (below 2 up to astronomically large):
                // widen the lower end to keep a valid representation.
                Magnitude::raw(false, 1, Rational::zero().max(l1), l2).normalized(bits)
            }
        }
        LogTerm::Tower(l, lo, hi) => Magnitude::raw(false, l + 1, lo, hi).normalized(bits),
    }
}

/// `2^x` for a positive magnitude `x`.
fn exp2_of(x: &Magnitude, bits: u32) -> Magnitude {
    if x.reciprocal {
        // x in (0, 1]; 2^x in (1, 2].
        if let Some((v1, v2)) = x.value_interval() {
            let (r1, _) = exp2_bounds(&v1, bits);
            let (_, r2) = exp2_bounds(&v2, bits);
            return Magnitude::raw(false, 0, r1, r2).normalized(bits);
        }
        return Magnitude::raw(false, 0, Rational::one(), Rational::from_integer(BigInt::from(2)))
            .normalized(bits);
    }
    match x.level {
        0 => wrap_log(LogTerm::Small(x.lo.clone(), x.hi.clone()), bits),
        l => wrap_log(LogTerm::Tower(l, x.lo.clone(), x.hi.clone()), bits),
    }
}

fn lift_body(lo: &Rational, hi: &Rational, bits: u32) -> (Rational, Rational) {
    let (l, _) = log2_bounds(lo, bits);
    let (_, h) = log2_bounds(hi, bits);
    (l, h)
}

fn mul_towers(a: &Magnitude, b: &Magnitude, bits: u32) -> Magnitude {
    debug_assert!(!a.reciprocal && !b.reciprocal);
    if a.level == 0 && b.level == 0 {
        return Magnitude::raw(false, 0, &a.lo * &b.lo, &a.hi * &b.hi).normalized(bits);
    }
    let sum = log_add(log_term(a, bits), log_term(b, bits), bits);
    wrap_log(sum, bits)
}

/// `a / b` for towers; sound but only as tight as the dominance structure
/// allows.
fn div_towers(a: &Magnitude, b: &Magnitude, bits: u32) -> Magnitude {
    debug_assert!(!a.reciprocal && !b.reciprocal);
    if a.level == 0 && b.level == 0 {
        return Magnitude::raw(false, 0, &a.lo / &b.hi, &a.hi / &b.lo).normalized(bits);
    }
    match (log_term(a, bits), log_term(b, bits)) {
        (LogTerm::Small(a1, a2), LogTerm::Small(b1, b2)) => {
            wrap_log(LogTerm::Small(a1 - b2, a2 - b1), bits)
        }
        (LogTerm::Tower(l, lo, hi), LogTerm::Small(b1, b2)) => {
            let (level, lo, hi) = add_interval(l, &lo, &hi, &-b2, &-b1, bits);
            wrap_log(LogTerm::Tower(level, lo, hi), bits)
        }
        (LogTerm::Small(a1, a2), LogTerm::Tower(l, lo, hi)) => {
            let (level, lo, hi) = add_interval(l, &lo, &hi, &-a2, &-a1, bits);
            wrap_log(LogTerm::Tower(level, lo, hi), bits).recip_raw().normalized(bits)
        }
        (LogTerm::Tower(la, alo, ahi), LogTerm::Tower(lb, blo, bhi)) => {
            let ma = materialize(la, &alo, &ahi, bits);
            let mb = materialize(lb, &blo, &bhi, bits);
            match (ma, mb) {
                (Some((x1, x2)), Some((y1, y2))) => {
                    wrap_log(LogTerm::Small(x1 - y2, x2 - y1), bits)
                }
                _ => panic!(
                    "division of two doubly-huge magnitudes of comparable size is unsupported"
                ),
            }
        }
    }
}

fn log_add(u: LogTerm, v: LogTerm, bits: u32) -> LogTerm {
    match (u, v) {
        (LogTerm::Small(a1, a2), LogTerm::Small(b1, b2)) => LogTerm::Small(a1 + b1, a2 + b2),
        (LogTerm::Tower(l, lo, hi), LogTerm::Small(d1, d2))
        | (LogTerm::Small(d1, d2), LogTerm::Tower(l, lo, hi)) => {
            let (level, lo, hi) = add_interval(l, &lo, &hi, &d1, &d2, bits);
            LogTerm::Tower(level, lo, hi)
        }
        (LogTerm::Tower(la, alo, ahi), LogTerm::Tower(lb, blo, bhi)) => {
            let (level, lo, hi) = add_towers(la, alo, ahi, lb, blo, bhi, bits);
            LogTerm::Tower(level, lo, hi)
        }
    }
}

/// Enclosure of `X + Y` for two towers. When one side is certified at least
/// `2^G` times smaller the upper end grows only by `~2^-G`; otherwise the
/// sum is bracketed by `[max, 2·max]`.
fn add_towers(
    la: u32,
    alo: Rational,
    ahi: Rational,
    lb: u32,
    blo: Rational,
    bhi: Rational,
    bits: u32,
) -> (u32, Rational, Rational) {
    let target = la.max(lb);
    let (la, alo, ahi) = lift_to(la, alo, ahi, target, bits);
    let (lb, blo, bhi) = lift_to(lb, blo, bhi, target, bits);
    assert_eq!(
        la, lb,
        "tower addition requires operands of comparable depth"
    );
    let level = la;
    // The dominant side is the one with the larger upper end; `X + Y <=
    // big·(1 + small/big)` with `small/big <= 2^(small_hi-view - big_lo-view)`.
    let (big, small) = if ahi >= bhi {
        ((&alo, &ahi), (&blo, &bhi))
    } else {
        ((&blo, &bhi), (&alo, &ahi))
    };
    let lo = if alo >= blo { alo.clone() } else { blo.clone() };
    let hi_max = big.1.clone();
    let gap: Option<i64> = if level == 1 {
        // Bodies are the log2 views themselves.
        let d = (big.0 - small.1).floor().to_integer();
        d.to_i64().filter(|v| *v >= 1)
    } else {
        let e = chain_lower_exponent(level - 1, big.0);
        match chain_upper_exponent(level - 1, small.1) {
            // views differ by >= 2^e - 2^u >= 2^(e-1)
            Some(u) if e >= u + 1 => Some(if e - 1 >= 11 { 1000 } else { 1i64 << (e - 1) }),
            _ => None,
        }
    };
    match gap {
        Some(g) => {
            // log2(1 + 2^-g) <= 1.5·2^-g <= 2^(1-g); damping through deeper
            // levels only shrinks the shift.
            let slack = pow2((1 - g).max(-999));
            (level, lo, hi_max + slack)
        }
        None => add_interval_upper_doubling(level, &lo, &hi_max, bits),
    }
}

/// An exponent `u` (when representable) with tower value `<= 2^u`.
fn chain_upper_exponent(level: u32, hi: &Rational) -> Option<i64> {
    const CAP: i64 = 2_000_000;
    let mut u = hi.ceil().to_integer().to_i64()?;
    if u < 1 {
        u = 1;
    }
    for _ in 1..level {
        if u > 40 {
            return None;
        }
        u = 1i64 << u;
        if u > CAP {
            return None;
        }
    }
    Some(u)
}

fn lift_to(
    mut level: u32,
    mut lo: Rational,
    mut hi: Rational,
    target: u32,
    bits: u32,
) -> (u32, Rational, Rational) {
    while level < target && lo > Rational::one() {
        let (l, h) = lift_body(&lo, &hi, bits);
        lo = l;
        hi = h;
        level += 1;
    }
    (level, lo, hi)
}

/// Enclosure of `V + δ` for a level-`l >= 1` tower `V` and `δ ∈ [d1, d2]`.
fn add_interval(
    level: u32,
    lo: &Rational,
    hi: &Rational,
    d1: &Rational,
    d2: &Rational,
    bits: u32,
) -> (u32, Rational, Rational) {
    debug_assert!(level >= 1 && d1 <= d2);
    if d1.is_zero() && d2.is_zero() {
        return (level, lo.clone(), hi.clone());
    }
    if let Some((v1, v2)) = materialize(level, lo, hi, bits) {
        let a1 = v1 + d1;
        let a2 = v2 + d2;
        assert!(a1.is_positive(), "shifted value must stay positive");
        let (mut l1, mut l2) = (a1, a2);
        for _ in 0..level {
            let (x, y) = lift_body(&l1, &l2, bits);
            l1 = x;
            l2 = y;
        }
        return (level, l1, l2);
    }
    // Slack path: V >= 2^e is huge, so |log2(V+δ) - log2 V| <= 1.5|δ|/2^e,
    // and the effect on deeper log iterates only shrinks.
    let s = d2.abs().max(d1.abs());
    if s.is_zero() {
        return (level, lo.clone(), hi.clone());
    }
    let e = chain_lower_exponent(level, lo);
    let sb = floor_log2(&s);
    let slack_exp = sb + 2 - e;
    let slack = pow2(slack_exp.max(-999));
    let down = if d1.is_negative() { slack.clone() } else { Rational::zero() };
    let up = if d2.is_positive() { slack } else { Rational::zero() };
    (level, lo - down, hi + up)
}

/// Enclosure of a value in `[V, 2V]` for a level-`l >= 1` tower `V`.
fn add_interval_upper_doubling(
    level: u32,
    lo: &Rational,
    hi: &Rational,
    bits: u32,
) -> (u32, Rational, Rational) {
    if level == 1 {
        return (1, lo.clone(), hi + Rational::one());
    }
    if let Some((v1, v2)) = materialize(level, lo, hi, bits) {
        let a2 = &v2 + &v2;
        let (mut l1, mut l2) = (v1, a2);
        for _ in 0..level {
            let (x, y) = lift_body(&l1, &l2, bits);
            l1 = x;
            l2 = y;
        }
        return (level, l1, l2);
    }
    // Doubling shifts the level-1 view by +1; every further log damps the
    // shift, so the level-2 view (and the top body) moves by at most
    // log2(1 + 1/L1) <= 2^(1-e) where the level-1 view is >= 2^e.
    let e = chain_lower_exponent(level - 1, lo);
    let slack = pow2((1 - e).max(-999));
    (level, lo.clone(), hi + slack)
}

/// Exact-ish rational value interval for a level-`l` body, when every
/// intermediate exponent stays small. `None` when the value is too large.
fn materialize(level: u32, lo: &Rational, hi: &Rational, bits: u32) -> Option<(Rational, Rational)> {
    let cap = Rational::from_integer(BigInt::from(300));
    let mut x1 = lo.clone();
    let mut x2 = hi.clone();
    for _ in 0..level {
        if x2 > cap {
            return None;
        }
        let (a, _) = exp2_bounds(&x1, bits);
        let (_, b) = exp2_bounds(&x2, bits);
        x1 = a;
        x2 = b;
    }
    Some((x1, x2))
}

/// An exponent `e` (capped) with tower value `>= 2^e`, for slack bounds.
fn chain_lower_exponent(level: u32, lo: &Rational) -> i64 {
    const CAP: i64 = 2_000_000;
    let mut e = lo.floor().to_integer().to_i64().unwrap_or(CAP).clamp(0, CAP);
    for _ in 1..level {
        if e >= 40 {
            return CAP;
        }
        e = (1i64 << e).min(CAP);
    }
    e
}

fn cmp_towers(
    a_level: u32,
    a_body: (&Rational, &Rational),
    b_level: u32,
    b_body: (&Rational, &Rational),
    bits: u32,
) -> CompareOutcome {
    let (mut al, mut alo, mut ahi) = (a_level, a_body.0.clone(), a_body.1.clone());
    let (mut bl, mut blo, mut bhi) = (b_level, b_body.0.clone(), b_body.1.clone());
    loop {
        if al == bl {
            break;
        }
        if al < bl {
            if alo > Rational::one() {
                let (l, h) = lift_body(&alo, &ahi, bits);
                alo = l;
                ahi = h;
                al += 1;
            } else {
                break;
            }
        } else if blo > Rational::one() {
            let (l, h) = lift_body(&blo, &bhi, bits);
            blo = l;
            bhi = h;
            bl += 1;
        } else {
            break;
        }
    }
    if al == bl {
        if ahi < blo {
            return CompareOutcome::Lt;
        }
        if alo > bhi {
            return CompareOutcome::Gt;
        }
        if alo == ahi && blo == bhi && alo == blo {
            return CompareOutcome::Eq;
        }
        return CompareOutcome::Inconclusive;
    }
    // One side is stuck below level parity; the other is a deeper tower.
    if al < bl {
        stuck_compare((&alo, &ahi), bl - al, (&blo, &bhi))
    } else {
        stuck_compare((&blo, &bhi), al - bl, (&alo, &ahi)).flip()
    }
}

/// Compares a (stuck) shallow enclosure `a` against a tower `k >= 1` levels
/// deeper with body `b`, both viewed at `a`'s level. Descending a tower body
/// one level multiplies the bound exponent through `2^(.)`, so the probes
/// work on capped machine exponents.
fn stuck_compare(
    a: (&Rational, &Rational),
    k: u32,
    b: (&Rational, &Rational),
) -> CompareOutcome {
    const HUGE: i128 = i128::MAX / 4;
    let a_hi_exp = if a.1.is_positive() { floor_log2(a.1) as i128 } else { -1 };

    // Lower probe: after k descents the deep side's view is >= 2^e.
    let mut e: i128 = b
        .0
        .floor()
        .to_integer()
        .to_i64()
        .map(|v| v as i128)
        .unwrap_or(HUGE);
    for _ in 1..k {
        if e > 62 {
            e = HUGE;
            break;
        }
        if e < 0 {
            e = 0;
        }
        e = 1i128 << e;
    }
    if e > a_hi_exp {
        return CompareOutcome::Lt;
    }

    // Upper probe: view <= 2^u when the exponent chain stays representable.
    let mut u: i128 = match b.1.ceil().to_integer().to_i64() {
        Some(v) => v as i128,
        None => return CompareOutcome::Inconclusive,
    };
    let mut bounded = true;
    for _ in 1..k {
        if u > 62 {
            bounded = false;
            break;
        }
        if u < 1 {
            u = 1;
        }
        u = 1i128 << u;
    }
    if bounded && u <= 4096 && &pow2(u as i64) < a.0 {
        return CompareOutcome::Gt;
    }
    CompareOutcome::Inconclusive
}

fn cmp_recip_vs_tower(r: &Magnitude, t: &Magnitude, bits: u32) -> CompareOutcome {
    debug_assert!(r.reciprocal && !t.reciprocal);
    if let Some((r1, r2)) = r.value_interval() {
        return cmp_towers(0, (&r1, &r2), t.level, (&t.lo, &t.hi), bits);
    }
    // r's tower has level >= 1, so r <= 1/2 after normalization.
    if t.level >= 1 {
        // t >= 2^(body lower) >= 2 > 1/2 >= r.
        if t.lo >= Rational::one() {
            return CompareOutcome::Lt;
        }
        return CompareOutcome::Inconclusive;
    }
    // t is a level-0 interval; bound r above by 2^-E.
    let e = chain_lower_exponent(r.level, &r.lo);
    let r_hi = pow2(-e.min(4096));
    if t.lo > r_hi {
        return CompareOutcome::Lt;
    }
    CompareOutcome::Inconclusive
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{rat, rat_int};

    fn mag(n: i64) -> Magnitude {
        Magnitude::from_rational(&rat_int(n)).unwrap()
    }

    #[test]
    fn normal_form_examples() {
        // 8 lifts to level 1 with exact body [3,3].
        let m = mag(8);
        assert_eq!(m.level(), 1);
        assert_eq!(m.body(), (&rat_int(3), &rat_int(3)));
        // 1/2 is the reciprocal of a level-0 body [2,2].
        let h = Magnitude::from_rational(&rat(1, 2)).unwrap();
        assert!(h.is_reciprocal());
        assert_eq!(h.level(), 0);
        assert_eq!(h.body(), (&rat_int(2), &rat_int(2)));
        // 42 stays exact at level 0; its lifted view brackets log2(42).
        let f = mag(42);
        assert_eq!(f.level(), 0);
        let lifted = f.lift_once(20);
        assert_eq!(lifted.level(), 1);
        let (lo, hi) = lifted.body();
        assert!(*lo > rat(539, 100) && *hi < rat(540, 100));
    }

    #[test]
    fn normalization_is_idempotent() {
        for v in [1, 2, 3, 8, 16, 42, 65536, 1 << 20] {
            let a = mag(v);
            let b = a.clone().normalized(DEFAULT_PRECISION_BITS);
            assert_eq!(a, b);
        }
        let r = Magnitude::from_rational(&rat(1, 1024)).unwrap();
        assert_eq!(r, r.clone().normalized(DEFAULT_PRECISION_BITS));
    }

    #[test]
    fn mul_small_exact() {
        let four = mag(2).mul(&mag(2), 96);
        assert_eq!(four.compare(&mag(4)), CompareOutcome::Eq);
        // x * 1 = x
        let x = mag(42);
        assert_eq!(x.mul(&Magnitude::one(), 96), x);
    }

    #[test]
    fn pow_examples() {
        // 2^(2^20): level 2, body [20, 20] exactly.
        let e = mag(1 << 20);
        let p = mag(2).pow(&e, 96).unwrap();
        assert_eq!(p.level(), 2);
        assert_eq!(p.body(), (&rat_int(20), &rat_int(20)));

        // 84^(128*42^5): level 1, body = exponent * log2(84) bounds.
        let exp = 128u64 * 42u64.pow(5);
        let m = mag(84).pow(&Magnitude::from_u64(exp), 96).unwrap();
        assert_eq!(m.level(), 1);
        let (lo, hi) = m.body();
        let e_rat = Rational::from_integer(BigInt::from(exp));
        let (llo, lhi) = log2_bounds(&rat_int(84), 96);
        assert!(*lo >= &e_rat * llo && *hi <= e_rat * lhi);

        // base 2, exponent 2^(2^48): level 3.
        let big = mag(2).pow(&mag(2).pow(&mag(1 << 48), 96).unwrap(), 96).unwrap();
        assert_eq!(big.level(), 3);
    }

    #[test]
    fn knuth_tower_small_cases() {
        // (2↑)^1 3 = 8
        let t = knuth_tower(2, 1, &rat_int(3), 96).unwrap();
        assert_eq!(t.compare(&mag(8)), CompareOutcome::Eq);
        // (2↑)^3 1 = 16
        let t = knuth_tower(2, 3, &rat_int(1), 96).unwrap();
        assert_eq!(t.compare(&mag(16)), CompareOutcome::Eq);
        // (2↑)^3 2 vs itself
        let a = knuth_tower(2, 3, &rat_int(2), 96).unwrap();
        let b = knuth_tower(2, 3, &rat_int(2), 96).unwrap();
        assert_eq!(a.compare(&b), CompareOutcome::Eq);
        // (3↑)^2 1 = 27: enclosure must contain it
        let t = knuth_tower(3, 2, &rat_int(1), 96).unwrap();
        assert!(t.contains(&rat_int(27), 128));
    }

    #[test]
    fn compare_big_examples() {
        // 2^(2^20) vs 10^300000 -> GT
        let a = mag(2).pow(&mag(1 << 20), 96).unwrap();
        let b = mag(10).pow(&mag(300_000), 96).unwrap();
        assert_eq!(a.compare(&b), CompareOutcome::Gt);
        assert_eq!(b.compare(&a), CompareOutcome::Lt);
    }

    #[test]
    fn add_one_examples() {
        // level 0: exact
        let m = mag(7).add_one(96);
        assert_eq!(m.compare(&mag(8)), CompareOutcome::Eq);
        // huge level-1 value: a + 1 < 2a
        let huge = mag(84).pow(&Magnitude::from_u64(1 << 40), 96).unwrap();
        let plus = huge.add_one(96);
        let double = huge.mul(&mag(2), 96);
        assert_eq!(plus.compare(&double), CompareOutcome::Lt);
        assert!(matches!(
            huge.compare(&plus),
            CompareOutcome::Lt | CompareOutcome::Inconclusive
        ));
        // small tower: 2^3 + 1 = 9 handled via materialization
        let nine = mag(8).add_one(96);
        assert!(nine.contains(&rat_int(9), 128));
        assert_eq!(nine.compare(&mag(10)), CompareOutcome::Lt);
        assert_eq!(nine.compare(&mag(8)), CompareOutcome::Gt);
    }

    #[test]
    fn recip_ordering() {
        let a = Magnitude::from_rational(&rat(1, 3)).unwrap();
        let b = Magnitude::from_rational(&rat(1, 2)).unwrap();
        assert_eq!(a.compare(&b), CompareOutcome::Lt);
        let huge = mag(2).pow(&mag(1 << 20), 96).unwrap();
        let tiny = huge.recip();
        assert_eq!(tiny.compare(&b), CompareOutcome::Lt);
        assert_eq!(b.compare(&tiny), CompareOutcome::Gt);
        assert_eq!(tiny.compare(&huge), CompareOutcome::Lt);
    }

    #[test]
    fn floor_enclosure_brackets() {
        let m = Magnitude::from_rational(&rat(7, 2)).unwrap();
        let f = m.floor_enclosure(96);
        assert!(f.contains(&rat_int(3), 128));
        let huge = mag(84).pow(&Magnitude::from_u64(1 << 40), 96).unwrap();
        let f = huge.floor_enclosure(96);
        assert_eq!(f.compare(&huge.mul(&mag(2), 96)), CompareOutcome::Lt);
    }

    #[test]
    fn precision_monotonicity() {
        let a = mag(84).pow(&Magnitude::from_u64(12345), 64).unwrap();
        let b = mag(85).pow(&Magnitude::from_u64(12345), 64).unwrap();
        let low = a.compare_bits(&b, 32);
        let high = a.compare_bits(&b, 160);
        if low != CompareOutcome::Inconclusive {
            assert_eq!(low, high);
        } else {
            assert_eq!(high, CompareOutcome::Lt);
        }
    }
}
