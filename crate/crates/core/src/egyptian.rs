//! Sylvester numbers and optimal Egyptian-fraction under-approximation.
//!
//! The search engine here works directly on unit fractions and is kept
//! independent of the `Φ_p` branch-and-bound in [`crate::gapsearch`]; the two
//! serve as oracles for one another where their domains coincide.

use crate::exactnum::{Magnitude, Rational, DEFAULT_PRECISION_BITS};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact Sylvester values are computed up to this index by default (the
/// digit count doubles per step; 20 is ~100k digits). The `2^(2^n)` bound
/// is available for any index.
pub const DEFAULT_SYLVESTER_CAP: u32 = 20;

/// The `n`-th Sylvester number: exact value when within the cap, plus the
/// certified upper bound `2^(2^n)`.
#[derive(Debug, Clone)]
pub struct SylvesterEntry {
    pub index: u32,
    pub exact: Option<BigUint>,
    pub bound: Magnitude,
}

/// `S_1 = 2`, `S_n = S_{n-1}^2 - S_{n-1} + 1`.
pub fn sylvester(n: u32) -> SylvesterEntry {
    sylvester_with_cap(n, DEFAULT_SYLVESTER_CAP)
}

pub fn sylvester_with_cap(n: u32, cap: u32) -> SylvesterEntry {
    assert!(n >= 1, "Sylvester numbers are indexed from 1");
    let exact = (n <= cap).then(|| {
        let mut s = BigUint::from(2u32);
        for _ in 1..n {
            s = &s * &s - s + BigUint::one();
        }
        s
    });
    // S_n <= 2^(2^n): a level-2 point body [n, n].
    let bound = Magnitude::from_u64(2)
        .pow(
            &Magnitude::from_u64(2)
                .pow(&Magnitude::from_u64(n as u64), DEFAULT_PRECISION_BITS)
                .expect("base 2"),
            DEFAULT_PRECISION_BITS,
        )
        .expect("base 2");
    SylvesterEntry { index: n, exact, bound }
}

/// Exact `S_n - 1` as a rational denominator helper; requires `n <= cap`.
pub fn sylvester_minus_one(n: u32, cap: u32) -> Option<Rational> {
    let e = sylvester_with_cap(n, cap).exact?;
    Some(Rational::from_integer(BigInt::from(e) - BigInt::one()))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("curtiss_min_gap({n}) exceeds the search budget (n <= {budget})")]
pub struct BudgetError {
    pub n: u32,
    pub budget: u32,
}

/// Result of a unit-fraction optimization: the optimal sum and the sorted
/// multiset of denominators achieving it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitSumResult {
    pub best: Rational,
    pub witness: Vec<u64>,
}

/// Maximal `Σ_{i=1}^k 1/m_i < r` with `m_i >= 2`, by pruned exhaustive
/// search (complete: at every node the next admissible denominator range is
/// finite once an incumbent exists, and the greedy first child establishes
/// one immediately).
pub fn max_unit_sum_under(r: &Rational, k: u32, max_den_hint: Option<u64>) -> UnitSumResult {
    assert!(r.is_positive(), "target must be positive");
    assert!(k >= 1, "at least one fraction");
    let mut best: Option<(Rational, Vec<u64>)> = None;
    if let Some(hint) = max_den_hint {
        if let Some(seed) = greedy_seed(r, k, hint) {
            let sum = unit_sum(&seed);
            best = Some((sum, seed));
        }
    }
    let mut stack = Vec::new();
    explore_units(&Rational::zero(), r, k, 2, &mut stack, &mut best);
    let (best_sum, witness) = best.expect("k tiny fractions always fit under r");
    UnitSumResult { best: best_sum, witness }
}

fn unit_sum(dens: &[u64]) -> Rational {
    dens.iter()
        .map(|&m| Rational::new(BigInt::one(), BigInt::from(m)))
        .sum()
}

/// Greedy Sylvester-style filler used only to seed the incumbent.
fn greedy_seed(r: &Rational, k: u32, max_den: u64) -> Option<Vec<u64>> {
    let mut remaining = r.clone();
    let mut out = Vec::new();
    let mut min_den = 2u64;
    for _ in 0..k {
        // smallest m >= min_den with 1/m < remaining
        let m = (Rational::one() / &remaining)
            .floor()
            .to_integer()
            .to_u64()?
            .checked_add(1)?
            .max(min_den);
        if m > max_den {
            return None;
        }
        out.push(m);
        remaining -= Rational::new(BigInt::one(), BigInt::from(m));
        min_den = m;
        if !remaining.is_positive() {
            return None;
        }
    }
    Some(out)
}

/// Depth-first exact search. `stack` holds the chosen denominators in
/// nondecreasing order, `already` their sum; each node keeps the total
/// strictly below `already + headroom`. Denominators are tried smallest
/// first (largest fraction), so the greedy descent installs an incumbent
/// immediately and the optimistic-bound cutoff then terminates every level.
fn explore_units(
    already: &Rational,
    headroom: &Rational,
    slots: u32,
    min_den: u64,
    stack: &mut Vec<u64>,
    best: &mut Option<(Rational, Vec<u64>)>,
) {
    debug_assert!(headroom.is_positive());
    // First admissible denominator: 1/m < headroom and m >= min_den.
    let first = {
        let recip_floor = (Rational::one() / headroom).floor().to_integer();
        let m0 = recip_floor.to_u64().unwrap_or(u64::MAX - 1) + 1;
        m0.max(min_den)
    };
    let mut m = first;
    loop {
        let frac = Rational::new(BigInt::one(), BigInt::from(m));
        // Optimistic bound: all remaining slots at 1/m. Equality is kept so
        // that ties surface for the deterministic lexicographic tie-break.
        let optimistic = &frac * Rational::from_integer(BigInt::from(slots));
        if let Some((best_sum, _)) = best.as_ref() {
            if &(already + &optimistic) < best_sum {
                return;
            }
        }
        stack.push(m);
        let with_m = already + &frac;
        if slots == 1 {
            update_best(best, &with_m, stack);
        } else {
            let new_headroom = headroom - &frac;
            if new_headroom.is_positive() {
                explore_units(&with_m, &new_headroom, slots - 1, m, stack, best);
            }
        }
        stack.pop();
        m = match m.checked_add(1) {
            Some(v) => v,
            None => return,
        };
    }
}

fn update_best(best: &mut Option<(Rational, Vec<u64>)>, sum: &Rational, witness: &[u64]) {
    match best {
        None => *best = Some((sum.clone(), witness.to_vec())),
        Some((b, w)) => {
            if sum > b || (sum == b && witness < &w[..]) {
                *best = Some((sum.clone(), witness.to_vec()));
            }
        }
    }
}

/// Result of the `n`-fraction closest-under-1 problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurtissResult {
    pub gap: Rational,
    pub witness: Vec<u64>,
}

/// Brute-force minimum of `1 - Σ_{i=1}^n 1/m_i` over `(0,1)`, with the
/// optimal multiset of denominators. The optimum is `1/(S_{n+1}-1)` with the
/// Sylvester witness; this function proves it per instance by search.
pub fn curtiss_min_gap(n: u32) -> Result<CurtissResult, BudgetError> {
    curtiss_min_gap_with_budget(n, 5)
}

pub fn curtiss_min_gap_with_budget(n: u32, budget: u32) -> Result<CurtissResult, BudgetError> {
    if n == 0 || n > budget {
        return Err(BudgetError { n, budget });
    }
    let one = Rational::one();
    let result = max_unit_sum_under(&one, n, Some(1 << 24));
    Ok(CurtissResult {
        gap: one - result.best,
        witness: result.witness,
    })
}

/// `ε₁(p, q)` over the unit-fraction reformulation, valid for `p ∈ {1, 2}`
/// where the nonzero deficits of `Φ_p` are exactly the unit fractions
/// `1/m, m >= 2`. This is the independent oracle for the generic
/// branch-and-bound in [`crate::gapsearch`].
pub fn epsilon1_unit_fraction_oracle(p: u64, q: u64) -> Rational {
    assert!(p == 1 || p == 2, "unit-fraction reduction needs p in {{1, 2}}");
    let r_max = if p == 1 { q + 1 } else { q * (p - 1) + p };
    let mut best: Option<Rational> = None;
    for r in 1..=r_max {
        let target = Rational::from_integer(BigInt::from(r));
        let found = max_unit_sum_under(&target, (q + r) as u32, Some(1 << 24));
        let gap = target - found.best;
        if best.as_ref().map(|b| &gap < b).unwrap_or(true) {
            best = Some(gap);
        }
    }
    best.expect("r = 1 always yields a candidate")
}

/// Certified check `S_n <= 2^(2^n)` via the magnitude bound; exact values
/// additionally satisfy it by construction.
pub fn sylvester_bound_holds(entry: &SylvesterEntry) -> bool {
    match &entry.exact {
        Some(v) => {
            let m = Magnitude::from_bigint(&BigInt::from(v.clone())).expect("positive");
            !matches!(
                m.compare(&entry.bound),
                crate::exactnum::CompareOutcome::Gt
            )
        }
        None => true,
    }
}

/// Convenience: `1/(S_{n+1} - 1)` when exactly representable.
pub fn curtiss_floor(n: u32, cap: u32) -> Option<Rational> {
    sylvester_minus_one(n + 1, cap).map(|d| Rational::one() / d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    #[test]
    fn sylvester_small_values() {
        let expected: [u64; 6] = [2, 3, 7, 43, 1807, 3_263_443];
        for (i, want) in expected.iter().enumerate() {
            let e = sylvester(i as u32 + 1);
            assert_eq!(e.exact.unwrap(), BigUint::from(*want));
        }
    }

    #[test]
    fn sylvester_identities() {
        // product-plus-one identity and recurrence agree for all computed n
        let mut product = BigUint::one();
        for n in 1..=8u32 {
            let s = sylvester(n).exact.unwrap();
            if n >= 2 {
                assert_eq!(s, &product + BigUint::one(), "S_{n} = prod + 1");
            }
            product *= &s;
        }
        // explicit instance: 2*3*7*43 + 1 = 1807
        assert_eq!(2u64 * 3 * 7 * 43 + 1, 1807);
    }

    #[test]
    fn sylvester_double_exponential_bound() {
        for n in 1..=20u32 {
            assert!(sylvester_bound_holds(&sylvester(n)), "S_{n} <= 2^(2^{n})");
        }
    }

    #[test]
    fn curtiss_small_cases() {
        let c = curtiss_min_gap(1).unwrap();
        assert_eq!((c.gap, c.witness), (rat(1, 2), vec![2]));
        let c = curtiss_min_gap(2).unwrap();
        assert_eq!((c.gap, c.witness), (rat(1, 6), vec![2, 3]));
        let c = curtiss_min_gap(3).unwrap();
        assert_eq!((c.gap, c.witness), (rat(1, 42), vec![2, 3, 7]));
        assert!(curtiss_min_gap(9).is_err());
    }

    #[test]
    fn curtiss_matches_sylvester_floor() {
        for n in 1..=4u32 {
            let c = curtiss_min_gap(n).unwrap();
            assert_eq!(c.gap, curtiss_floor(n, DEFAULT_SYLVESTER_CAP).unwrap());
            // witness is the Sylvester sequence itself
            let expect: Vec<u64> = (1..=n).map(|i| {
                sylvester(i).exact.unwrap().to_u64().unwrap()
            }).collect();
            assert_eq!(c.witness, expect);
        }
    }

    #[test]
    fn max_unit_sum_examples() {
        let r = max_unit_sum_under(&Rational::one(), 3, None);
        assert_eq!(r.best, rat(41, 42));
        assert_eq!(r.witness, vec![2, 3, 7]);

        let r = max_unit_sum_under(&rat(1, 2), 2, None);
        assert_eq!(r.best, rat(10, 21));
        assert_eq!(r.witness, vec![3, 7]);

        let r = max_unit_sum_under(&rat(2, 1), 5, None);
        assert_eq!(r.best, rat(83, 42));
        assert_eq!(r.witness, vec![2, 2, 2, 3, 7]);
    }

    #[test]
    fn max_under_equals_curtiss_complement() {
        for k in 1..=4u32 {
            let m = max_unit_sum_under(&Rational::one(), k, None);
            let c = curtiss_min_gap(k).unwrap();
            assert_eq!(m.best, Rational::one() - c.gap);
        }
    }
}
