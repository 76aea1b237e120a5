//! Registry of named constants with exact prime-exponent normal forms,
//! certified enclosures, and the identity/ordering/window audits over them.

mod audits;
mod expr;
mod parser;
mod registry;

pub use audits::{
    index_gap_identity_negative_control, surface_index_bound, v0_window_negative_control,
    verify_index_gap_identity, verify_orderings, verify_threefold_delta_chain,
    verify_v0_window, verify_volume_floor_decomposition, AuditResult, Method,
    SurfaceIndexDomainError, Verdict,
};
pub use expr::{primes_up_to, ConstExpr, PrimeMap};
pub use parser::{parse_expression, ManifestParseError};
pub use registry::{lookup, parse_manifest, registry, ConstantDef, MANIFEST};

use crate::exactnum::{Magnitude, Rational, DEFAULT_PRECISION_BITS};

/// Both representations of a registered constant: the prime-exponent normal
/// form when the leaves factor, the certified enclosure always, and the
/// exact value when small.
#[derive(Debug, Clone)]
pub struct ConstantEval {
    pub id: String,
    pub expression: String,
    pub prime_map: Option<PrimeMap>,
    pub magnitude: Magnitude,
    pub exact: Option<Rational>,
}

/// Evaluates a registered constant; `None` for unknown ids.
pub fn eval_constant(id: &str) -> Option<ConstantEval> {
    let def = lookup(id)?;
    Some(ConstantEval {
        id: def.id.to_string(),
        expression: def.expr.render(),
        prime_map: def.expr.prime_map(),
        magnitude: def.expr.magnitude(DEFAULT_PRECISION_BITS),
        exact: def.expr.exact_value(1 << 16),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat_int;
    use num_bigint::BigInt;
    use num_traits::ToPrimitive;

    #[test]
    fn eval_constant_examples() {
        let c = eval_constant("surface-cy-index").unwrap();
        assert_eq!(c.exact, Some(rat_int(66)));

        let c = eval_constant("fano3-complement-bound").unwrap();
        assert!(c.exact.is_none(), "too large for exact evaluation");
        let map = c.prime_map.unwrap();
        // 84 = 2^2·3·7, so the 84-power contributes 2e to the exponent of 2
        let e = BigInt::from(128u64) * BigInt::from(42u64).pow(5);
        assert!(map.0[&2] > &e + &e, "2-exponent dominated by 84^e");
        assert_eq!(map.0[&7].clone() - &e, {
            // Legendre count of 7 in 42! plus nothing else
            BigInt::from(42 / 7 + 42 / 49)
        });

        let c = eval_constant("surface-vol-floor").unwrap();
        assert!(c.magnitude.is_reciprocal());
        assert!(c.prime_map.unwrap().0.values().all(|e| e.to_i64().map(|v| v < 0).unwrap_or(true)));

        assert!(eval_constant("unknown").is_none());
    }
}
