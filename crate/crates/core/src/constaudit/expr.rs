//! Expression trees for named constants, with two evaluation routes: an
//! exact prime-exponent normal form (factorials expanded by Legendre's
//! formula) and a certified magnitude enclosure.

use crate::exactnum::{factorial, factorial_mag, Magnitude, Rational, DEFAULT_FACTORIAL_CAP};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstExpr {
    Int(BigInt),
    Factorial(u64),
    /// `base ^ exponent` with an exact integer exponent `>= 0`.
    Pow(Box<ConstExpr>, BigInt),
    Mul(Vec<ConstExpr>),
    Recip(Box<ConstExpr>),
}

impl ConstExpr {
    pub fn int(v: i64) -> Self {
        ConstExpr::Int(BigInt::from(v))
    }

    pub fn pow(base: ConstExpr, exp: impl Into<BigInt>) -> Self {
        ConstExpr::Pow(Box::new(base), exp.into())
    }

    pub fn mul(factors: Vec<ConstExpr>) -> Self {
        ConstExpr::Mul(factors)
    }

    pub fn recip(inner: ConstExpr) -> Self {
        ConstExpr::Recip(Box::new(inner))
    }

    /// Prime-exponent normal form `{prime -> exponent}` (exponents signed
    /// via `Recip`); `None` when an integer leaf resists the trial-division
    /// budget.
    pub fn prime_map(&self) -> Option<PrimeMap> {
        match self {
            ConstExpr::Int(v) => PrimeMap::factor(v),
            ConstExpr::Factorial(n) => Some(PrimeMap::factorial(*n)),
            ConstExpr::Pow(base, e) => Some(base.prime_map()?.scale(e)),
            ConstExpr::Mul(fs) => {
                let mut acc = PrimeMap::one();
                for f in fs {
                    acc = acc.mul(&f.prime_map()?);
                }
                Some(acc)
            }
            ConstExpr::Recip(inner) => Some(inner.prime_map()?.invert()),
        }
    }

    /// Certified enclosure of the value.
    pub fn magnitude(&self, bits: u32) -> Magnitude {
        match self {
            ConstExpr::Int(v) => Magnitude::from_bigint(v).expect("positive constant"),
            ConstExpr::Factorial(n) => factorial_mag(*n, DEFAULT_FACTORIAL_CAP, bits),
            ConstExpr::Pow(base, e) => {
                if e.is_zero() {
                    return Magnitude::one();
                }
                let exp = Magnitude::from_bigint(e).expect("positive exponent");
                base.magnitude(bits).pow(&exp, bits).expect("base >= 1")
            }
            ConstExpr::Mul(fs) => fs
                .iter()
                .map(|f| f.magnitude(bits))
                .reduce(|a, b| a.mul(&b, bits))
                .unwrap_or_else(Magnitude::one),
            ConstExpr::Recip(inner) => inner.magnitude(bits).recip(),
        }
    }

    /// Exact rational value when the expression stays within the bit budget.
    pub fn exact_value(&self, budget_bits: u64) -> Option<Rational> {
        match self {
            ConstExpr::Int(v) => Some(Rational::from_integer(v.clone())),
            ConstExpr::Factorial(n) => {
                let f = factorial(*n, DEFAULT_FACTORIAL_CAP).ok()?;
                (f.bits() <= budget_bits).then(|| Rational::from_integer(f))
            }
            ConstExpr::Pow(base, e) => {
                let b = base.exact_value(budget_bits)?;
                let e = e.to_u64()?;
                let nbits = b.numer().bits().max(b.denom().bits()).max(1);
                if nbits.saturating_mul(e) > budget_bits {
                    return None;
                }
                Some(rational_pow(&b, e))
            }
            ConstExpr::Mul(fs) => {
                let mut acc = Rational::one();
                for f in fs {
                    acc *= f.exact_value(budget_bits)?;
                    if acc.numer().bits().max(acc.denom().bits()) > budget_bits {
                        return None;
                    }
                }
                Some(acc)
            }
            ConstExpr::Recip(inner) => {
                let v = inner.exact_value(budget_bits)?;
                (!v.is_zero()).then(|| v.recip())
            }
        }
    }

    /// Renders in the manifest grammar (integers, `n!`, `b^e`, `*`, `/`,
    /// parentheses).
    pub fn render(&self) -> String {
        match self {
            ConstExpr::Int(v) => v.to_string(),
            ConstExpr::Factorial(n) => format!("{n}!"),
            ConstExpr::Pow(base, e) => match base.as_ref() {
                ConstExpr::Int(v) => format!("{v}^{e}"),
                other => format!("({})^{e}", other.render()),
            },
            ConstExpr::Mul(fs) => fs
                .iter()
                .map(|f| match f {
                    ConstExpr::Mul(_) => format!("({})", f.render()),
                    ConstExpr::Recip(inner) => format!("1/({})", inner.render()),
                    _ => f.render(),
                })
                .collect::<Vec<_>>()
                .join(" * "),
            ConstExpr::Recip(inner) => format!("1/({})", inner.render()),
        }
    }
}

fn rational_pow(b: &Rational, e: u64) -> Rational {
    let mut acc = Rational::one();
    let mut base = b.clone();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &base;
        }
        base = &base * &base;
        e >>= 1;
    }
    acc
}

/// Signed prime-exponent map: the value `∏ p^e_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeMap(pub BTreeMap<u64, BigInt>);

const TRIAL_DIVISION_LIMIT: u64 = 1_000_000;

impl PrimeMap {
    pub fn one() -> Self {
        PrimeMap(BTreeMap::new())
    }

    pub fn factor(v: &BigInt) -> Option<Self> {
        if !v.is_positive() {
            return None;
        }
        let mut n = v.to_u64()?;
        let mut map = BTreeMap::new();
        let mut d = 2u64;
        while d.saturating_mul(d) <= n {
            if d > TRIAL_DIVISION_LIMIT {
                return None;
            }
            while n % d == 0 {
                *map.entry(d).or_insert_with(BigInt::zero) += 1;
                n /= d;
            }
            d += 1;
        }
        if n > 1 {
            *map.entry(n).or_insert_with(BigInt::zero) += 1;
        }
        Some(PrimeMap(map))
    }

    /// Legendre's formula: the exponent of `p` in `n!` is `Σ_i ⌊n/p^i⌋`.
    pub fn factorial(n: u64) -> Self {
        let mut map = BTreeMap::new();
        for p in primes_up_to(n) {
            let mut e = BigInt::zero();
            let mut q = n / p;
            while q > 0 {
                e += BigInt::from(q);
                q /= p;
            }
            map.insert(p, e);
        }
        PrimeMap(map)
    }

    pub fn scale(mut self, e: &BigInt) -> Self {
        for v in self.0.values_mut() {
            *v *= e;
        }
        self.normalized()
    }

    pub fn mul(mut self, other: &Self) -> Self {
        for (p, e) in &other.0 {
            *self.0.entry(*p).or_insert_with(BigInt::zero) += e;
        }
        self.normalized()
    }

    pub fn invert(mut self) -> Self {
        for v in self.0.values_mut() {
            *v = -v.clone();
        }
        self
    }

    fn normalized(mut self) -> Self {
        self.0.retain(|_, e| !e.is_zero());
        self
    }

    /// Certified ordering of the represented values when the ratio's
    /// exponents all share a sign; `None` for mixed signs.
    pub fn try_compare(&self, other: &Self) -> Option<std::cmp::Ordering> {
        let ratio = self.clone().mul(&other.clone().invert());
        if ratio.0.is_empty() {
            return Some(std::cmp::Ordering::Equal);
        }
        if ratio.0.values().all(|e| e.is_positive()) {
            return Some(std::cmp::Ordering::Greater);
        }
        if ratio.0.values().all(|e| e.is_negative()) {
            return Some(std::cmp::Ordering::Less);
        }
        None
    }

    /// Reconstructs the exact rational when small enough.
    pub fn exact_value(&self, budget_bits: u64) -> Option<Rational> {
        let mut acc = Rational::one();
        for (p, e) in &self.0 {
            let mag = e.magnitude().to_u64()?;
            let piece = rational_pow(&Rational::from_integer(BigInt::from(*p)), mag);
            let piece = if e.is_negative() { piece.recip() } else { piece };
            acc *= piece;
            if acc.numer().bits().max(acc.denom().bits()) > budget_bits {
                return None;
            }
        }
        Some(acc)
    }
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(i, &is_p)| is_p.then_some(i as u64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{rat, rat_int, CompareOutcome};

    #[test]
    fn factor_small() {
        let m = PrimeMap::factor(&BigInt::from(84)).unwrap();
        let expect: Vec<(u64, i64)> = vec![(2, 2), (3, 1), (7, 1)];
        let got: Vec<(u64, i64)> =
            m.0.iter().map(|(p, e)| (*p, e.to_i64().unwrap())).collect();
        assert_eq!(got, expect);
        assert_eq!(
            PrimeMap::factor(&BigInt::from(66)).unwrap().0.keys().copied().collect::<Vec<_>>(),
            vec![2, 3, 11]
        );
    }

    #[test]
    fn legendre_matches_direct_factorization() {
        for n in [5u64, 10, 42] {
            let via_legendre = PrimeMap::factorial(n);
            let exact = factorial(n, DEFAULT_FACTORIAL_CAP).unwrap();
            let rebuilt = via_legendre.exact_value(1 << 20).unwrap();
            assert_eq!(rebuilt, Rational::from_integer(exact));
        }
    }

    #[test]
    fn expr_two_routes_agree_on_surrogates() {
        // A down-scaled sibling of the real constants: exponents small
        // enough for exact evaluation.
        let e = ConstExpr::mul(vec![
            ConstExpr::int(192),
            ConstExpr::Factorial(10),
            ConstExpr::pow(ConstExpr::int(84), 7),
        ]);
        let via_map = e.prime_map().unwrap().exact_value(1 << 20).unwrap();
        let direct = e.exact_value(1 << 20).unwrap();
        assert_eq!(via_map, direct);
        assert!(e.magnitude(96).contains(&direct, 128));

        let r = ConstExpr::recip(ConstExpr::pow(ConstExpr::int(6), 5));
        assert_eq!(r.exact_value(1 << 20).unwrap(), rat(1, 7776));
        assert_eq!(
            r.prime_map().unwrap().exact_value(1 << 20).unwrap(),
            rat(1, 7776)
        );
    }

    #[test]
    fn prime_map_ordering() {
        let a = ConstExpr::mul(vec![
            ConstExpr::int(96),
            ConstExpr::Factorial(42),
            ConstExpr::pow(ConstExpr::int(84), 100),
        ]);
        let b = ConstExpr::mul(vec![
            ConstExpr::int(192),
            ConstExpr::Factorial(42),
            ConstExpr::pow(ConstExpr::int(84), 100),
        ]);
        assert_eq!(
            a.prime_map().unwrap().try_compare(&b.prime_map().unwrap()),
            Some(std::cmp::Ordering::Less)
        );
        assert_eq!(
            a.prime_map().unwrap().try_compare(&a.prime_map().unwrap()),
            Some(std::cmp::Ordering::Equal)
        );
        // mixed signs: factorial primes vs big powers of 84
        let c = ConstExpr::Factorial(50);
        assert_eq!(
            c.prime_map().unwrap().try_compare(&b.prime_map().unwrap()),
            None
        );
    }

    #[test]
    fn magnitude_enclosure_consistent() {
        let e = ConstExpr::pow(ConstExpr::int(2), 100);
        let m = e.magnitude(96);
        let exact = e.exact_value(1 << 20).unwrap();
        assert!(m.contains(&exact, 128));
        assert_eq!(
            m.compare(&Magnitude::from_rational(&rat_int(2)).unwrap()),
            CompareOutcome::Gt
        );
    }
}
