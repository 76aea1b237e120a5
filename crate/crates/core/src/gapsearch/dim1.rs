//! Dimension-1 threshold gaps and the small arithmetic checks around them.
//!
//! On the projective line every threshold identity in scope is a finite
//! rational equation: `γ + t·d = 1` for local thresholds, `Σγ_i + t·s = 2`
//! for the global ones. The reports carry the witnessing coefficients so the
//! identities can be replayed exactly.

use super::search::{min_sum_exceeding, GapCertificate, SearchCaps};
use crate::exactnum::{format_rational, rat, Rational};
use crate::hyperstd::{membership, min_nonzero_element, HyperElem};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dim1Kind {
    Lct,
    Glct,
    Mld,
}

/// Witness coefficients for a dimension-1 gap: the `Φ_p` part, the boundary
/// value `t`, and the multiplicity it applies to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dim1Witness {
    pub gammas: Vec<HyperElem>,
    pub t: Rational,
    pub multiplicity: u64,
}

impl Dim1Witness {
    /// `Σγ + t·mult`, the left side of the defining identity.
    pub fn identity_sum(&self) -> Rational {
        self.gammas.iter().map(|g| g.value()).sum::<Rational>()
            + &self.t * Rational::from_integer(BigInt::from(self.multiplicity))
    }

    /// All coefficients of the witness configuration, `t` included.
    pub fn coefficients(&self) -> Vec<Rational> {
        let mut out: Vec<Rational> = self.gammas.iter().map(|g| g.value()).collect();
        for _ in 0..self.multiplicity {
            out.push(self.t.clone());
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dim1GapReport {
    pub kind: Dim1Kind,
    pub p: u64,
    pub gap: Rational,
    pub witness: Dim1Witness,
    /// The ε₁ certificate backing the witness, when the gap came from one.
    pub certificate: Option<GapCertificate>,
}

impl Dim1GapReport {
    /// The identity target: 1 for local thresholds, 2 for global ones.
    pub fn identity_target(&self) -> Rational {
        match self.kind {
            Dim1Kind::Lct => Rational::one(),
            _ => rat(2, 1),
        }
    }

    pub fn verify(&self) -> bool {
        self.witness.identity_sum() == self.identity_target()
            && self.witness.t == Rational::one() - &self.gap
    }
}

/// `δ_lct(1, p)`: one minus the supremum of thresholds t < 1 realizable as
/// `t = (1-γ)/m` with `γ ∈ Φ_p`, `m ∈ ℕ⁺`.
///
/// For `m = 1` the supremum over nonzero `γ` is the largest deficit
/// (`1 - min nonzero element`); for `m >= 2` the value is at most `1/2`,
/// attained by `γ = 0, m = 2`. The result is `min{1/p, 1/2}`.
pub fn lct_gap_dim1(p: u64) -> Dim1GapReport {
    assert!(p >= 1);
    let min_elem = min_nonzero_element(p);
    let t_m1 = Rational::one() - min_elem.value();
    let t_m2 = rat(1, 2);
    let zero = membership(p, &Rational::zero()).expect("0 ∈ Φ_p");
    // prefer the m = 1 witness on ties
    let witness = if t_m1 >= t_m2 {
        Dim1Witness { gammas: vec![min_elem], t: t_m1.clone(), multiplicity: 1 }
    } else {
        Dim1Witness { gammas: vec![zero], t: t_m2.clone(), multiplicity: 2 }
    };
    let sup = t_m1.max(t_m2);
    let report = Dim1GapReport {
        kind: Dim1Kind::Lct,
        p,
        gap: Rational::one() - sup,
        witness,
        certificate: None,
    };
    debug_assert!(report.verify());
    report
}

/// Brute-force cross-check for [`lct_gap_dim1`]: maximum of `(1-γ)/m < 1`
/// over a window of `(n, k, m)`.
pub fn lct_sup_brute_force(p: u64, window: u64) -> Rational {
    let mut best = Rational::zero();
    for n in 1..=window {
        for k in 0..=p {
            let gamma = Rational::one()
                - Rational::new(BigInt::from(k), BigInt::from(p) * BigInt::from(n));
            if gamma.is_negative() {
                continue;
            }
            for m in 1..=window {
                let t = (Rational::one() - &gamma) / Rational::from_integer(BigInt::from(m));
                if t < Rational::one() && t > best {
                    best = t;
                }
            }
        }
    }
    best
}

/// `δ_glct(1, p)` as a maximization: the largest `t < 1` with
/// `Σγ_i + t·s = 2`, `γ_i ∈ Φ_p`, `s ∈ ℕ⁺`. Branches:
/// `s = 1` gives `t = 1 - ε₁(p,1)`; `s = 2` gives `t <= 1 - min_elem/2`;
/// `s >= 3` gives `t <= 2/3`. The `s = 1` branch always wins and the gap is
/// `min{1/6, 1/(p(p+1))}`.
pub fn glct_max_dim1(p: u64) -> Dim1GapReport {
    glct_max_dim1_with_caps(p, &SearchCaps::default())
}

pub fn glct_max_dim1_with_caps(p: u64, caps: &SearchCaps) -> Dim1GapReport {
    assert!(p >= 1);
    let cert = min_sum_exceeding(p, 1, caps);
    let t1 = Rational::one() - &cert.value;

    let min_elem = min_nonzero_element(p);
    let t2 = Rational::one() - min_elem.value() / rat(2, 1);
    let t3 = rat(2, 3);
    assert!(
        t1 >= t2 && t1 > t3,
        "the s = 1 branch dominates for every p"
    );

    let witness = Dim1Witness {
        gammas: cert.witness.clone(),
        t: t1,
        multiplicity: 1,
    };
    let report = Dim1GapReport {
        kind: Dim1Kind::Glct,
        p,
        gap: cert.value.clone(),
        witness,
        certificate: Some(cert),
    };
    debug_assert!(report.verify());
    report
}

/// `δ_mld(1, p)`: numerically equal to the glct gap, reported with the
/// three-coefficient boundary family summing to 2 with all coefficients
/// strictly below 1.
pub fn mld_gap_dim1(p: u64) -> Dim1GapReport {
    assert!(p >= 1);
    let (gammas, t) = if p == 1 {
        // 1/2 + 2/3 + 5/6 = 2
        (
            vec![
                membership(1, &rat(1, 2)).unwrap(),
                membership(1, &rat(2, 3)).unwrap(),
            ],
            rat(5, 6),
        )
    } else {
        // p/(p+1) + 1/p + (p(p+1)-1)/(p(p+1)) = 2
        let pp1 = BigInt::from(p) * BigInt::from(p + 1);
        (
            vec![
                membership(p, &Rational::new(BigInt::from(p), BigInt::from(p + 1))).unwrap(),
                membership(p, &Rational::new(BigInt::one(), BigInt::from(p))).unwrap(),
            ],
            Rational::one() - Rational::new(BigInt::one(), pp1),
        )
    };
    let witness = Dim1Witness { gammas, t: t.clone(), multiplicity: 1 };
    assert!(witness.coefficients().iter().all(|c| *c < Rational::one()));
    let report = Dim1GapReport {
        kind: Dim1Kind::Mld,
        p,
        gap: Rational::one() - t,
        witness,
        certificate: None,
    };
    debug_assert!(report.verify());
    report
}

/// Outcome of the two-equation solvability decision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Eq2Outcome {
    Sat {
        gammas: Vec<HyperElem>,
        bs: Vec<Rational>,
    },
    Unsat,
}

/// Decides whether `2 = Σγ_i + Σ_{j=1}^m b_j` is solvable with
/// `γ_i ∈ Φ_p \ {0}`, `b_j ∈ (1-δ, 1)`, `m >= 1`.
///
/// For `δ < 1/3`, `m >= 3` is impossible; `m = 1` is solvable iff
/// `ε₁(p,1) < δ` and `m = 2` iff the minimal nonzero element is `< 2δ`.
/// For `δ >= 1/3` the `m = 1` branch already fires because
/// `ε₁(p,1) <= 1/6 < 1/3 <= δ`.
pub fn equation_two_solver(p: u64, delta: &Rational) -> Eq2Outcome {
    assert!(
        delta.is_positive() && *delta < Rational::one(),
        "δ must lie in (0, 1)"
    );
    let caps = SearchCaps::default();
    let cert = min_sum_exceeding(p, 1, &caps);
    if &cert.value < delta {
        let b = Rational::one() - &cert.value;
        let outcome = Eq2Outcome::Sat {
            gammas: cert.witness,
            bs: vec![b],
        };
        debug_assert!(eq2_checks(p, delta, &outcome));
        return outcome;
    }
    let min_elem = min_nonzero_element(p);
    if min_elem.value() < rat(2, 1) * delta {
        let b = Rational::one() - min_elem.value() / rat(2, 1);
        let outcome = Eq2Outcome::Sat {
            gammas: vec![min_elem],
            bs: vec![b.clone(), b],
        };
        debug_assert!(eq2_checks(p, delta, &outcome));
        return outcome;
    }
    // Here δ <= ε₁(p,1) <= 1/6 < 1/3, so m >= 3 is impossible and both
    // m = 1 and m = 2 were refuted above.
    assert!(delta < &rat(1, 3));
    Eq2Outcome::Unsat
}

fn eq2_checks(p: u64, delta: &Rational, outcome: &Eq2Outcome) -> bool {
    match outcome {
        Eq2Outcome::Unsat => true,
        Eq2Outcome::Sat { gammas, bs } => {
            let total: Rational = gammas.iter().map(|g| g.value()).sum::<Rational>()
                + bs.iter().sum::<Rational>();
            total == rat(2, 1)
                && !bs.is_empty()
                && bs.iter().all(|b| {
                    *b < Rational::one() && *b > Rational::one() - delta
                })
                && gammas.iter().all(|g| !g.is_zero() && g.p() == p)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("coefficient {value} is outside Φ_{p} ∩ ([0, 1 - 1/(p(p+1))] ∪ {{1}})")]
pub struct CurveIndexError {
    pub p: u64,
    pub value: String,
}

/// Minimal `I` with `p·I·b` integral, for `b ∈ Φ_p` with
/// `b <= 1 - 1/(p(p+1))` or `b = 1`; always `I <= p(p+1)`.
pub fn curve_complement_index(p: u64, b: &Rational) -> Result<u64, CurveIndexError> {
    let err = || CurveIndexError { p, value: format_rational(b) };
    let elem = membership(p, b).ok_or_else(err)?;
    let cutoff = Rational::one()
        - Rational::new(BigInt::one(), BigInt::from(p) * BigInt::from(p + 1));
    if !(elem.is_one() || *b <= cutoff) {
        return Err(err());
    }
    // p·I·b integral <=> denom(b) | p·I, so minimal I = denom(b)/gcd(denom(b), p)
    let d = b.denom();
    let g = num_integer::Integer::gcd(d, &BigInt::from(p));
    let i = (d / g)
        .to_string()
        .parse::<u64>()
        .expect("index fits u64 in range");
    debug_assert!(
        (Rational::from_integer(BigInt::from(p) * BigInt::from(i)) * b).is_integer()
    );
    assert!(
        i <= p * (p + 1),
        "the coefficient range guarantees I <= p(p+1)"
    );
    Ok(i)
}

/// True iff the coefficients sum exactly to the target and each lies in
/// `(0, 1]`.
pub fn cy_witness_check(target: &Rational, coeffs: &[Rational]) -> bool {
    let sum: Rational = coeffs.iter().sum();
    sum == *target
        && coeffs
            .iter()
            .all(|c| c.is_positive() && *c <= Rational::one())
}
