//! Exact algebra of the hyperstandard sets `Φ_p`.
//!
//! `Φ_p = { 1 - k/(pn) : n >= 1, 0 <= k <= p } ∩ [0,1]`. Φ_1 is the standard
//! set `{0, 1/2, 2/3, 3/4, ...} ∪ {1}`. Representations `(n, k)` of a value
//! are not unique; the canonical witness stored here has minimal `n` (which
//! then forces `k`).

use crate::exactnum::{format_rational, Rational};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An element `1 - k/(pn)` of `Φ_p` with its canonical witness pair.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HyperElem {
    p: u64,
    n: u64,
    k: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PhiError {
    #[error("{value} is not an element of Φ_{p}")]
    NotAMember { p: u64, value: String },
    #[error("sum {sum} of Φ_{p} elements falls outside [0,1], the closure hypothesis")]
    SumOutOfRange { p: u64, sum: String },
}

impl HyperElem {
    /// Canonical element for the witness `(n, k)`: the same value
    /// re-expressed with minimal `n`.
    pub fn new(p: u64, n: u64, k: u64) -> Result<Self, PhiError> {
        assert!(p >= 1 && n >= 1, "HyperElem requires p >= 1, n >= 1");
        if BigInt::from(k) > BigInt::from(p) * BigInt::from(n) || k > p {
            return Err(PhiError::NotAMember {
                p,
                value: format!("1 - {k}/({p}*{n})"),
            });
        }
        let value = Self { p, n, k }.value();
        membership(p, &value).ok_or(PhiError::NotAMember {
            p,
            value: format_rational(&value),
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Canonical witness pair `(n, k)`.
    pub fn witness(&self) -> (u64, u64) {
        (self.n, self.k)
    }

    /// The value `1 - k/(pn)` as an exact rational in `[0, 1]`.
    pub fn value(&self) -> Rational {
        Rational::one() - self.deficit()
    }

    /// The deficit `1 - value = k/(pn)`.
    pub fn deficit(&self) -> Rational {
        Rational::new(
            BigInt::from(self.k),
            BigInt::from(self.p) * BigInt::from(self.n),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.k == self.p * self.n
    }

    pub fn is_one(&self) -> bool {
        self.k == 0
    }
}

/// Decides `x ∈ Φ_p ∩ [0,1]` and returns the canonical witness.
///
/// With `t := 1 - x = a/d` reduced, `pn·t` integral forces `d | pn`, so the
/// minimal admissible `n` is `d / gcd(d, p)`; `k` grows with `n`, hence if
/// the minimal `n` already pushes `k` past `p` no representation exists.
pub fn membership(p: u64, x: &Rational) -> Option<HyperElem> {
    if x.is_negative() || *x > Rational::one() {
        return None;
    }
    let t = Rational::one() - x;
    if t.is_zero() {
        return Some(HyperElem { p, n: 1, k: 0 });
    }
    let a = t.numer();
    let d = t.denom();
    let g = d.gcd(&BigInt::from(p));
    let n = d / &g;
    let k = a * (BigInt::from(p) / g);
    if k <= BigInt::from(p) {
        Some(HyperElem {
            p,
            n: n.to_u64().expect("canonical n fits u64 for in-range inputs"),
            k: k.to_u64().unwrap(),
        })
    } else {
        None
    }
}

/// The minimal nonzero element of `Φ_p`: `1/2` for `p = 1`, else `1/p`.
pub fn min_nonzero_element(p: u64) -> HyperElem {
    if p == 1 {
        HyperElem { p, n: 2, k: 1 }
    } else {
        HyperElem { p, n: 1, k: p - 1 }
    }
}

/// Exact sum of elements, certified to stay in `Φ_p` when it lands in `[0,1]`.
pub fn sum_in_phi(p: u64, elems: &[HyperElem]) -> Result<HyperElem, PhiError> {
    let sum: Rational = elems.iter().map(|e| e.value()).sum();
    if sum.is_negative() || sum > Rational::one() {
        return Err(PhiError::SumOutOfRange {
            p,
            sum: format_rational(&sum),
        });
    }
    membership(p, &sum).ok_or(PhiError::NotAMember {
        p,
        value: format_rational(&sum),
    })
}

/// The closure map `γ ↦ (n - 1 + γ)/n`; with `γ = 1 - k/(pl)` the image is
/// `1 - k/(p·nl)`, witnessed by `(nl, k)` before canonicalization.
pub fn adjunct(p: u64, gamma: &HyperElem, n: u64) -> HyperElem {
    assert!(n >= 1);
    assert_eq!(gamma.p, p);
    let value = (Rational::from_integer(BigInt::from(n - 1)) + gamma.value())
        / Rational::from_integer(BigInt::from(n));
    membership(p, &value).expect("Φ_p is closed under the adjunction map")
}

/// A nonzero deficit `j/(pn) ∈ (0,1)`, stored canonically (minimal `n`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Deficit {
    j: u64,
    n: u64,
    p: u64,
}

impl Deficit {
    pub fn value(&self) -> Rational {
        Rational::new(
            BigInt::from(self.j),
            BigInt::from(self.p) * BigInt::from(self.n),
        )
    }

    pub fn witness(&self) -> (u64, u64) {
        (self.j, self.n)
    }

    /// The element `1 - j/(pn)` this deficit belongs to.
    pub fn element(&self) -> HyperElem {
        membership(self.p, &(Rational::one() - self.value())).expect("deficit of a member")
    }
}

/// Canonical deficit for a value in `(0,1)` that is a deficit of `Φ_p`.
pub fn deficit_from_value(p: u64, v: &Rational) -> Option<Deficit> {
    if !v.is_positive() || *v >= Rational::one() {
        return None;
    }
    let elem = membership(p, &(Rational::one() - v))?;
    let (n, k) = elem.witness();
    Some(Deficit { j: k, n, p })
}

/// All distinct deficit values `j/(pn) < upper` with `n <= max_n`, strictly
/// decreasing.
pub fn enumerate_deficits(p: u64, upper: &Rational, max_n: u64) -> Vec<Deficit> {
    let mut values = std::collections::BTreeSet::new();
    for n in 1..=max_n {
        for j in 1..=p {
            let v = Rational::new(BigInt::from(j), BigInt::from(p) * BigInt::from(n));
            if v < *upper && v < Rational::one() {
                values.insert(v);
            }
        }
    }
    values
        .into_iter()
        .rev()
        .map(|v| deficit_from_value(p, &v).expect("enumerated value is a deficit"))
        .collect()
}

/// The `N`-complement coefficient rule `N·b⁺ >= ⌊(N+1)·{b}⌋ + N·⌊b⌋`,
/// evaluated exactly.
pub fn complement_coeff_check(n_comp: u64, b: &Rational, b_plus: &Rational) -> bool {
    assert!(!b.is_negative() && !b_plus.is_negative());
    let n = Rational::from_integer(BigInt::from(n_comp));
    let b_floor = b.floor();
    let frac = b - &b_floor;
    let rhs = ((&n + Rational::one()) * frac).floor() + n.clone() * b_floor;
    n * b_plus >= rhs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{rat, rat_int};

    #[test]
    fn membership_examples() {
        let e = membership(1, &rat(41, 42)).unwrap();
        assert_eq!(e.witness(), (42, 1));
        let z = membership(2, &rat_int(0)).unwrap();
        assert_eq!(z.witness(), (1, 2));
        assert!(z.is_zero());
        assert!(membership(2, &rat(1, 4)).is_none());
        assert!(membership(3, &rat(5, 4)).is_none());
        assert!(membership(3, &rat(-1, 2)).is_none());
    }

    #[test]
    fn membership_agrees_with_bounded_scan() {
        // Decision procedure vs the defining search over n <= denom(1-x).
        for p in 1..=5u64 {
            for num in 0..=24i64 {
                let x = rat(num, 24);
                let fast = membership(p, &x).map(|e| e.witness());
                let mut slow = None;
                let t = rat_int(1) - &x;
                let d = t.denom().to_u64().unwrap();
                for n in 1..=d.max(1) {
                    let k = &t * rat_int((p * n) as i64);
                    if k.is_integer() && k <= rat_int(p as i64) && !k.is_negative() {
                        slow = Some((n, k.to_integer().to_u64().unwrap()));
                        break;
                    }
                }
                assert_eq!(fast, slow, "p={p} x={x}");
            }
        }
    }

    #[test]
    fn canonical_witness_has_minimal_n() {
        // 1/2 in Φ_2 admits (1,1) and (2,2); canonical is (1,1).
        let e = membership(2, &rat(1, 2)).unwrap();
        assert_eq!(e.witness(), (1, 1));
        let via_new = HyperElem::new(2, 2, 2).unwrap();
        assert_eq!(via_new.witness(), (1, 1));
        assert_eq!(e, via_new);
    }

    #[test]
    fn sum_examples() {
        let h = HyperElem::new(1, 2, 1).unwrap();
        let s = sum_in_phi(1, &[h.clone(), h.clone()]).unwrap();
        assert_eq!(s.witness(), (1, 0));
        assert!(s.is_one());

        let third = membership(3, &rat(1, 3)).unwrap();
        let s = sum_in_phi(3, &[third.clone(), third]).unwrap();
        assert_eq!(s.value(), rat(2, 3));
        assert_eq!(s.witness(), (1, 1));

        let e23 = membership(1, &rat(2, 3)).unwrap();
        let err = sum_in_phi(1, &[h, e23]).unwrap_err();
        assert!(matches!(err, PhiError::SumOutOfRange { .. }));
    }

    #[test]
    fn adjunct_examples() {
        let half = membership(1, &rat(1, 2)).unwrap();
        let a = adjunct(1, &half, 3);
        assert_eq!(a.value(), rat(5, 6));
        assert_eq!(a.witness(), (6, 1));

        let one = membership(2, &rat_int(1)).unwrap();
        assert!(adjunct(2, &one, 7).is_one());

        let half2 = membership(2, &rat(1, 2)).unwrap();
        let a = adjunct(2, &half2, 2);
        assert_eq!(a.value(), rat(3, 4));
        assert_eq!(a.witness(), (2, 1));
    }

    #[test]
    fn deficit_enumeration_examples() {
        let d = enumerate_deficits(2, &rat_int(1), 3);
        let values: Vec<_> = d.iter().map(|x| x.value()).collect();
        assert_eq!(values, vec![rat(1, 2), rat(1, 3), rat(1, 4), rat(1, 6)]);

        let d = enumerate_deficits(1, &rat(1, 2), 4);
        let values: Vec<_> = d.iter().map(|x| x.value()).collect();
        assert_eq!(values, vec![rat(1, 3), rat(1, 4)]);

        assert!(enumerate_deficits(5, &rat(1, 1000), 3).is_empty());
    }

    #[test]
    fn complement_rule_examples() {
        assert!(complement_coeff_check(2, &rat(1, 3), &rat(1, 2)));
        assert!(!complement_coeff_check(2, &rat(1, 3), &rat(1, 3)));
        assert!(complement_coeff_check(1, &rat_int(1), &rat_int(1)));
    }

    #[test]
    fn min_nonzero_is_correct_by_enumeration() {
        for p in 1..=8u64 {
            let claimed = min_nonzero_element(p).value();
            for n in 1..=40u64 {
                for k in 0..=p {
                    if let Ok(e) = HyperElem::new(p, n, k) {
                        if !e.is_zero() {
                            assert!(e.value() >= claimed);
                        }
                    }
                }
            }
            assert_eq!(claimed, if p == 1 { rat(1, 2) } else { rat(1, p as i64) });
        }
    }
}
