//! The certified bound pipeline `M_ε → α → β → l → υ`.
//!
//! `β(p) = α(p, α(p, α(p, α(p, 2))))` cannot be evaluated exactly (its inner
//! `ε₁` searches sit at astronomically large targets), but it admits
//! certified lower bounds: `α(p, ·)` is nondecreasing in `ε` and
//! `ε₂(p, q) > 1/S_{(pq+1)p+2} >= 1/2^(2^((pq+1)p+2))`, so a lower bound on
//! one stage pushes through to the next. Every stage records a trace line;
//! direction bookkeeping is carried in the types and checked on composition.

use crate::exactnum::{
    format_rational, knuth_tower, rat, CompareOutcome, Magnitude, Rational,
    DEFAULT_PRECISION_BITS,
};
use crate::gapsearch::{epsilon2, CertStatus, Eps2, GapCertificate, SearchCaps};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    M,
    Alpha,
    Beta,
    Ell,
    Upsilon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Lower,
    Upper,
    Exact,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundValue {
    Rational(Rational),
    Mag(Magnitude),
}

impl BoundValue {
    pub fn describe(&self) -> String {
        match self {
            BoundValue::Rational(r) => format_rational(r),
            BoundValue::Mag(m) => m.to_string(),
        }
    }
}

/// A certified directed bound on a named quantity, with the derivation steps
/// that produced it. The trace alone suffices to replay the computation.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub quantity: Quantity,
    pub p: u64,
    pub direction: Direction,
    pub value: BoundValue,
    pub trace: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BoundError {
    #[error("M_ε requires ε in (0, 2]")]
    EpsilonDomain,
    #[error("the Sylvester estimate path requires p >= 2")]
    NeedsPAtLeastTwo,
    #[error("magnitude operation failed: {0}")]
    Magnitude(#[from] crate::exactnum::MagnitudeError),
}

/// `M_ε = ⌊2/ε⌋^⌊128/ε⁵⌋ · (⌊2/ε⌋ + 2)`, exact when the power fits the
/// bit budget, otherwise a certified enclosure.
#[derive(Debug, Clone, PartialEq)]
pub enum MEps {
    Exact(BigInt),
    Mag(Magnitude),
}

impl MEps {
    pub fn as_magnitude(&self) -> Magnitude {
        match self {
            MEps::Exact(v) => Magnitude::from_bigint(v).expect("M is positive"),
            MEps::Mag(m) => m.clone(),
        }
    }
}

const EXACT_POWER_BIT_BUDGET: u64 = 1 << 20;

pub fn m_of_epsilon(eps: &Rational) -> Result<MEps, BoundError> {
    if !eps.is_positive() || *eps > rat(2, 1) {
        return Err(BoundError::EpsilonDomain);
    }
    let base = (rat(2, 1) / eps).floor().to_integer();
    let exp = (Rational::from_integer(BigInt::from(128))
        / (eps * eps * eps * eps * eps))
        .floor()
        .to_integer();
    let base_bits = base.bits();
    let exp_u64 = exp.to_u64();
    match exp_u64 {
        Some(e) if base_bits.saturating_mul(e) <= EXACT_POWER_BIT_BUDGET => {
            let pow = num_traits::pow::pow(base.clone(), e as usize);
            Ok(MEps::Exact(pow * (base + BigInt::from(2))))
        }
        _ => {
            let bits = DEFAULT_PRECISION_BITS;
            let b = Magnitude::from_bigint(&base)?;
            let e = Magnitude::from_bigint(&exp)?;
            let m = b.pow(&e, bits)?.mul(
                &Magnitude::from_bigint(&(base + BigInt::from(2)))?,
                bits,
            );
            Ok(MEps::Mag(m))
        }
    }
}

/// Upper enclosure of `M_ε'` valid for every `ε' >= ε_lb` (`M` is
/// anti-monotone in `ε`), computed floor-free as
/// `t^(4t⁵)·(t+2)` with `t = 2/ε_lb`.
fn m_upper_from_eps_lower(eps_lb: &EpsLower, bits: u32) -> Result<Magnitude, BoundError> {
    let t = match &eps_lb.value {
        BoundValue::Rational(r) => {
            Magnitude::from_rational(&(rat(2, 1) / r))?
        }
        BoundValue::Mag(m) => m.recip().mul_u64(2, bits),
    };
    let t5 = t.pow_rational(&rat(5, 1), bits)?;
    let e = t5.mul_u64(4, bits);
    let m = t.pow(&e, bits)?.mul(&t.add_u64(2, bits), bits);
    Ok(m)
}

/// A certified statement `α-stage value >= (value)`, the glue between
/// pipeline stages.
#[derive(Debug, Clone, PartialEq)]
struct EpsLower {
    value: BoundValue,
    exact: bool,
}

/// The first pipeline stage: `α(p, 2) = ε₂(p, M₂)` with `M₂ = 3` evaluated
/// from the definition.
#[derive(Debug, Clone, PartialEq)]
pub enum AlphaFirst {
    Exact {
        value: Rational,
        certificate: GapCertificate,
    },
    Lower(Magnitude),
}

pub const DEFAULT_ALPHA_EXACT_BUDGET: u64 = 3;

/// `α(p, 2)`: exact via a proven search for `p` within the budget, else a
/// certified Sylvester lower bound (which needs `p >= 2`).
pub fn alpha_exact_first(p: u64, budget: u64) -> Result<AlphaFirst, BoundError> {
    let m2 = m_of_epsilon(&rat(2, 1))?;
    let q = match &m2 {
        MEps::Exact(v) => v.to_u64().expect("M_2 = 3"),
        MEps::Mag(_) => unreachable!("M_2 is tiny"),
    };
    debug_assert_eq!(q, 3, "M_2 = 1^4 * 3");
    if p <= budget {
        let (e2, cert) = epsilon2(p, q, &SearchCaps::default());
        if let (Eps2::Exact(value), CertStatus::Proven) = (&e2, &cert.status) {
            return Ok(AlphaFirst::Exact {
                value: value.clone(),
                certificate: cert,
            });
        }
    }
    if p < 2 {
        return Err(BoundError::NeedsPAtLeastTwo);
    }
    // ε₂(p, 3) > 1/S_{(3p+1)p+2} >= 1/2^(2^((3p+1)p+2))
    let idx = (3 * p + 1) * p + 2;
    let bound = double_exp_reciprocal(&Magnitude::from_u64(idx), DEFAULT_PRECISION_BITS);
    Ok(AlphaFirst::Lower(bound))
}

/// `1 / 2^(2^idx)` as a magnitude.
fn double_exp_reciprocal(idx: &Magnitude, bits: u32) -> Magnitude {
    idx.exp2(bits).exp2(bits).recip()
}

/// Certified lower bound on `α(p, ε)` valid for every `ε >= ε_lb`:
/// by monotonicity `α(p, ε) >= α(p, ε_lb) = ε₂(p, M_{ε_lb})`, and the
/// Sylvester estimate bounds the latter below by `1/2^(2^((pM+1)p+2))` at
/// the upper enclosure `M` of `M_{ε_lb}`. Requires `p >= 2`.
pub fn alpha_lower(p: u64, eps_lb: &BoundValue, bits: u32) -> Result<Magnitude, BoundError> {
    if p < 2 {
        return Err(BoundError::NeedsPAtLeastTwo);
    }
    let eps = EpsLower { value: eps_lb.clone(), exact: false };
    let m_up = m_upper_from_eps_lower(&eps, bits)?;
    let idx = m_up
        .mul_u64(p, bits)
        .add_one(bits)
        .mul_u64(p, bits)
        .add_u64(2, bits);
    Ok(double_exp_reciprocal(&idx, bits))
}

/// Outcome triple of the β-stage certifications against the closed tower
/// forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BetaChecks {
    /// `β(p) > 1/((2↑)^14 · 12p²)`
    pub exceeds_tower14: CompareOutcome,
    /// `β(p) > 1/((2↑)^17 · p)`
    pub exceeds_tower17: CompareOutcome,
    /// consistency: the certified lower bound sits below `min{1/6, 1/(p(p+1))}`
    pub below_min_upper: CompareOutcome,
}

impl BetaChecks {
    pub fn all_certified(&self) -> bool {
        self.exceeds_tower14 == CompareOutcome::Gt
            && self.exceeds_tower17 == CompareOutcome::Gt
            && self.below_min_upper == CompareOutcome::Lt
    }
}

/// Certified lower bound for `β(p) = α(p, α(p, α(p, α(p, 2))))`, `p >= 2`:
/// one exact-or-estimated stage then three estimate stages, each sound by
/// the monotonicity of `α` in `ε`.
pub fn beta_lower(p: u64) -> Result<(BoundReport, BetaChecks), BoundError> {
    beta_lower_with(p, DEFAULT_ALPHA_EXACT_BUDGET, DEFAULT_PRECISION_BITS)
}

pub fn beta_lower_with(
    p: u64,
    budget: u64,
    bits: u32,
) -> Result<(BoundReport, BetaChecks), BoundError> {
    if p < 2 {
        return Err(BoundError::NeedsPAtLeastTwo);
    }
    let mut trace = Vec::new();
    let first = alpha_exact_first(p, budget)?;
    let mut current: BoundValue = match &first {
        AlphaFirst::Exact { value, certificate } => {
            trace.push(format!(
                "stage 1: alpha({p}, 2) = eps2({p}, 3) = {} exactly (proven search, witness {:?})",
                format_rational(value),
                certificate.witness_pairs(),
            ));
            BoundValue::Rational(value.clone())
        }
        AlphaFirst::Lower(m) => {
            trace.push(format!(
                "stage 1: alpha({p}, 2) >= 1/2^(2^(({}p+1)p+2)) = {} via the Sylvester estimate",
                3, m
            ));
            BoundValue::Mag(m.clone())
        }
    };
    for stage in 2..=4 {
        let next = alpha_lower(p, &current, bits)?;
        trace.push(format!(
            "stage {stage}: alpha({p}, e) >= {next} for every e >= previous bound \
             (M upper enclosure + Sylvester estimate)"
        ));
        current = BoundValue::Mag(next);
    }
    let beta_mag = match &current {
        BoundValue::Mag(m) => m.clone(),
        BoundValue::Rational(r) => Magnitude::from_rational(r)?,
    };

    let twelve_p2 = Rational::from_integer(BigInt::from(12u64 * p * p));
    let t14 = knuth_tower(2, 14, &twelve_p2, bits)?.recip();
    let t17 = knuth_tower(2, 17, &Rational::from_integer(BigInt::from(p)), bits)?.recip();
    let upper = rat(1, 6).min(Rational::new(
        BigInt::one(),
        BigInt::from(p) * BigInt::from(p + 1),
    ));
    let checks = BetaChecks {
        exceeds_tower14: beta_mag.compare_bits(&t14, bits),
        exceeds_tower17: beta_mag.compare_bits(&t17, bits),
        below_min_upper: beta_mag
            .compare_bits(&Magnitude::from_rational(&upper)?, bits),
    };
    trace.push(format!(
        "checks: >1/((2^^)14 12p^2): {:?}; >1/((2^^)17 p): {:?}; <=min(1/6,1/(p(p+1))): {:?}",
        checks.exceeds_tower14, checks.exceeds_tower17, checks.below_min_upper
    ));
    let report = BoundReport {
        quantity: Quantity::Beta,
        p,
        direction: Direction::Lower,
        value: BoundValue::Mag(beta_mag),
        trace,
    };
    Ok((report, checks))
}

/// Upper bound for `l(p) = ⌈p/β(p)⌉`: a lower bound on `β` gives
/// `l(p) <= p/β_lb + 1`; certified against `l(p) < (2↑)^17 p`.
pub fn l_upper(p: u64) -> Result<(BoundReport, CompareOutcome), BoundError> {
    l_upper_with(p, DEFAULT_ALPHA_EXACT_BUDGET, DEFAULT_PRECISION_BITS)
}

pub fn l_upper_with(
    p: u64,
    budget: u64,
    bits: u32,
) -> Result<(BoundReport, CompareOutcome), BoundError> {
    let (beta_report, _) = beta_lower_with(p, budget, bits)?;
    let beta_mag = match &beta_report.value {
        BoundValue::Mag(m) => m.clone(),
        BoundValue::Rational(r) => Magnitude::from_rational(r)?,
    };
    let l_up = beta_mag.recip().mul_u64(p, bits).add_one(bits);
    let t17 = knuth_tower(2, 17, &Rational::from_integer(BigInt::from(p)), bits)?;
    let outcome = l_up.compare_bits(&t17, bits);
    let mut trace = beta_report.trace;
    trace.push(format!(
        "l({p}) = ceil(p/beta) <= p/beta_lb + 1 = {l_up}; < (2^^)17 p: {outcome:?}"
    ));
    Ok((
        BoundReport {
            quantity: Quantity::Ell,
            p,
            direction: Direction::Upper,
            value: BoundValue::Mag(l_up),
            trace,
        },
        outcome,
    ))
}

/// Lower bound for `υ(p) = 1/(l·(2l)^(128l⁵+4l))`: anti-monotone in `l`, so
/// an upper bound on `l` plugs in; certified against `υ(p) > 1/((2↑)^19 p)`.
pub fn upsilon_lower(p: u64) -> Result<(BoundReport, CompareOutcome), BoundError> {
    upsilon_lower_with(p, DEFAULT_ALPHA_EXACT_BUDGET, DEFAULT_PRECISION_BITS)
}

pub fn upsilon_lower_with(
    p: u64,
    budget: u64,
    bits: u32,
) -> Result<(BoundReport, CompareOutcome), BoundError> {
    let (l_report, _) = l_upper_with(p, budget, bits)?;
    let l_up = match &l_report.value {
        BoundValue::Mag(m) => m.clone(),
        BoundValue::Rational(r) => Magnitude::from_rational(r)?,
    };
    let exponent = l_up
        .pow_rational(&rat(5, 1), bits)?
        .mul_u64(128, bits)
        .add(&l_up.mul_u64(4, bits), bits);
    let denom = l_up
        .mul(&l_up.mul_u64(2, bits).pow(&exponent, bits)?, bits);
    let upsilon_lb = denom.recip();
    let t19 = knuth_tower(2, 19, &Rational::from_integer(BigInt::from(p)), bits)?.recip();
    let outcome = upsilon_lb.compare_bits(&t19, bits);
    let mut trace = l_report.trace;
    trace.push(format!(
        "upsilon({p}) >= 1/(l_up*(2 l_up)^(128 l_up^5 + 4 l_up)) = {upsilon_lb}; \
         > 1/((2^^)19 p): {outcome:?}"
    ));
    Ok((
        BoundReport {
            quantity: Quantity::Upsilon,
            p,
            direction: Direction::Lower,
            value: BoundValue::Mag(upsilon_lb),
            trace,
        },
        outcome,
    ))
}

/// One instance check of the α-estimation statement at a concrete `q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EstimationCheck {
    /// `q >= 2^(2^(12p²))` certified; the instance is skipped otherwise.
    pub hypothesis_certified: bool,
    /// `M_{1/q} <= (2q)^(128q⁵)(2q+2) < q^(q⁶)`
    pub m_below_q_tower: Option<CompareOutcome>,
    /// `α(p, 1/q) > 1/((2↑)⁴ q)`
    pub alpha_exceeds: Option<CompareOutcome>,
}

impl EstimationCheck {
    pub fn certified(&self) -> bool {
        self.hypothesis_certified
            && self.m_below_q_tower == Some(CompareOutcome::Lt)
            && self.alpha_exceeds == Some(CompareOutcome::Gt)
    }
}

/// Certifies, for each supplied `q`, the two inequalities behind the
/// α-estimation statement (instance checks, not the universally quantified
/// claim). Requires `p >= 2`.
pub fn estimation_lemma_audit(
    p: u64,
    qs: &[Magnitude],
    bits: u32,
) -> Result<Vec<EstimationCheck>, BoundError> {
    if p < 2 {
        return Err(BoundError::NeedsPAtLeastTwo);
    }
    let hyp_floor = knuth_tower(
        2,
        2,
        &Rational::from_integer(BigInt::from(12 * p * p)),
        bits,
    )?;
    let mut out = Vec::new();
    for q in qs {
        let hyp = matches!(
            q.compare_bits(&hyp_floor, bits),
            CompareOutcome::Gt | CompareOutcome::Eq
        );
        if !hyp {
            out.push(EstimationCheck {
                hypothesis_certified: false,
                m_below_q_tower: None,
                alpha_exceeds: None,
            });
            continue;
        }
        // M_{1/q} <= (2q)^(128 q^5) (2q + 2) - the floor-free form.
        let two_q = q.mul_u64(2, bits);
        let e = q.pow_rational(&rat(5, 1), bits)?.mul_u64(128, bits);
        let m_up = two_q.pow(&e, bits)?.mul(&two_q.add_u64(2, bits), bits);
        let q_tower = q.pow(&q.pow_rational(&rat(6, 1), bits)?, bits)?;
        let m_check = m_up.compare_bits(&q_tower, bits);

        // alpha(p, 1/q) >= 1/2^(2^((p*M+1)p+2)) at the M upper enclosure.
        let alpha_lb = alpha_lower(p, &BoundValue::Mag(q.recip()), bits)?;
        // (2↑)^4 q = four exp2 wraps of q.
        let tower4_q = q.exp2(bits).exp2(bits).exp2(bits).exp2(bits);
        let a_check = alpha_lb.compare_bits(&tower4_q.recip(), bits);
        out.push(EstimationCheck {
            hypothesis_certified: true,
            m_below_q_tower: Some(m_check),
            alpha_exceeds: Some(a_check),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat_int;

    #[test]
    fn m_of_epsilon_examples() {
        // ε = 2: floor(2/2)^floor(128/32) * (1 + 2) = 3
        match m_of_epsilon(&rat(2, 1)).unwrap() {
            MEps::Exact(v) => assert_eq!(v, BigInt::from(3)),
            other => panic!("expected exact, got {other:?}"),
        }
        // ε = 1: 2^128 * 4
        match m_of_epsilon(&rat_int(1)).unwrap() {
            MEps::Exact(v) => {
                assert_eq!(v, num_traits::pow::pow(BigInt::from(2), 128) * 4)
            }
            other => panic!("expected exact, got {other:?}"),
        }
        // ε = 1/2: 4^4096 * 6
        match m_of_epsilon(&rat(1, 2)).unwrap() {
            MEps::Exact(v) => {
                assert_eq!(v, num_traits::pow::pow(BigInt::from(4), 4096) * 6)
            }
            other => panic!("expected exact, got {other:?}"),
        }
        assert!(m_of_epsilon(&rat_int(0)).is_err());
        assert!(m_of_epsilon(&rat_int(3)).is_err());
        assert!(m_of_epsilon(&rat(-1, 2)).is_err());
    }

    #[test]
    fn m_of_epsilon_is_anti_monotone_on_samples() {
        let samples = [rat(2, 1), rat(3, 2), rat_int(1), rat(2, 3), rat(1, 2)];
        let mut prev: Option<BigInt> = None;
        for eps in &samples {
            let m = match m_of_epsilon(eps).unwrap() {
                MEps::Exact(v) => v,
                MEps::Mag(_) => panic!("samples stay exact"),
            };
            if let Some(p) = prev {
                assert!(m >= p, "M grows as ε shrinks");
            }
            prev = Some(m);
        }
    }

    #[test]
    fn alpha_first_exact_values() {
        match alpha_exact_first(1, 3).unwrap() {
            AlphaFirst::Exact { value, .. } => assert_eq!(value, rat(1, 5419)),
            other => panic!("expected exact, got {other:?}"),
        }
        match alpha_exact_first(2, 3).unwrap() {
            AlphaFirst::Exact { value, certificate } => {
                // frozen only after the independent unit-fraction oracle run
                // agreed with the branch-and-bound (see gapsearch tests)
                assert_eq!(value, rat(1, 5419));
                assert_eq!(certificate.value, rat(1, 1806));
            }
            other => panic!("expected exact, got {other:?}"),
        }
    }

    #[test]
    fn alpha_first_consistent_with_sylvester_floor() {
        // alpha(p,2) >= 1/S_{(3p+1)p+2} for p where both sides are available
        use crate::egyptian::sylvester_minus_one;
        for p in [1u64, 2] {
            let v = match alpha_exact_first(p, 3).unwrap() {
                AlphaFirst::Exact { value, .. } => value,
                _ => panic!(),
            };
            let idx = ((3 * p + 1) * p + 2) as u32;
            let s = sylvester_minus_one(idx, 20).unwrap() + Rational::one();
            assert!(v > Rational::one() / s);
        }
    }

    #[test]
    fn alpha_lower_sits_below_exact() {
        // soundness: the estimated bound never exceeds the exact value
        let exact = match alpha_exact_first(2, 3).unwrap() {
            AlphaFirst::Exact { value, .. } => value,
            _ => panic!(),
        };
        let lb = alpha_lower(2, &BoundValue::Rational(rat(2, 1)), 96).unwrap();
        let exact_mag = Magnitude::from_rational(&exact).unwrap();
        assert_eq!(lb.compare(&exact_mag), CompareOutcome::Lt);
        assert!(alpha_lower(1, &BoundValue::Rational(rat(2, 1)), 96).is_err());
    }

    #[test]
    fn beta_pipeline_certifies_for_p2() {
        let (report, checks) = beta_lower(2).unwrap();
        assert!(checks.all_certified(), "checks: {checks:?}");
        assert_eq!(report.direction, Direction::Lower);
        assert!(report.trace.len() >= 5);
    }

    #[test]
    fn l_and_upsilon_certify_for_p2() {
        let (_, l_cmp) = l_upper(2).unwrap();
        assert_eq!(l_cmp, CompareOutcome::Lt);
        let (_, u_cmp) = upsilon_lower(2).unwrap();
        assert_eq!(u_cmp, CompareOutcome::Gt);
    }

    #[test]
    fn ceiling_identity_probe() {
        // if β were exactly 1/6, l would be exactly 6p
        for p in 2..=5u64 {
            let l = (Rational::from_integer(BigInt::from(p)) / rat(1, 6))
                .ceil()
                .to_integer();
            assert_eq!(l, BigInt::from(6 * p));
        }
    }

    #[test]
    fn estimation_audit_examples() {
        // q = 2^(2^48) meets the hypothesis for p = 2 (2^(2^48) = floor)
        let q1 = Magnitude::from_u64(2)
            .pow(
                &Magnitude::from_u64(2).pow(&Magnitude::from_u64(48), 96).unwrap(),
                96,
            )
            .unwrap();
        // q = (2↑)^3 48
        let q2 = knuth_tower(2, 3, &rat_int(48), 96).unwrap();
        // a q below the hypothesis threshold is skipped
        let q3 = Magnitude::from_u64(1 << 20);
        let checks = estimation_lemma_audit(2, &[q1, q2, q3], 96).unwrap();
        assert!(checks[0].certified(), "{:?}", checks[0]);
        assert!(checks[1].certified(), "{:?}", checks[1]);
        assert!(!checks[2].hypothesis_certified);
        assert!(checks[2].m_below_q_tower.is_none());
    }

    #[test]
    fn reports_replay_identically() {
        let (a, _) = beta_lower(3).unwrap();
        let (b, _) = beta_lower(3).unwrap();
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
    }
}
