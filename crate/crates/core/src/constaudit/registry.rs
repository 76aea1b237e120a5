//! The registry of named constants and its checked-in manifest.

use super::expr::ConstExpr;
use super::parser::{parse_expression, ManifestParseError};
use num_bigint::BigInt;

/// The checked-in manifest; the completeness test enumerates the registry
/// against it.
pub const MANIFEST: &str = include_str!("../../data/constants.manifest");

#[derive(Debug, Clone)]
pub struct ConstantDef {
    pub id: &'static str,
    pub statement: &'static str,
    pub expr: ConstExpr,
}

/// `mult * 42^5 + add`, the exponent shape shared by the tower constants.
fn exp42(mult: u64, add: u64) -> BigInt {
    BigInt::from(mult) * BigInt::from(42u64).pow(5) + BigInt::from(add)
}

fn pow84(mult: u64, add: u64) -> ConstExpr {
    ConstExpr::Pow(Box::new(ConstExpr::int(84)), exp42(mult, add))
}

/// Every constant named in the headline statements and the bound chains.
pub fn registry() -> Vec<ConstantDef> {
    let mut defs = vec![
        ConstantDef {
            id: "fano3-complement-bound",
            statement: "threefold non-exceptional complement bound",
            expr: ConstExpr::mul(vec![
                ConstExpr::int(192),
                ConstExpr::Factorial(42),
                pow84(128, 0),
            ]),
        },
        ConstantDef {
            id: "surface-complement-bound",
            statement: "surface standard-coefficient complement bound",
            expr: ConstExpr::mul(vec![
                ConstExpr::int(96),
                ConstExpr::Factorial(42),
                pow84(128, 0),
            ]),
        },
        ConstantDef {
            id: "threshold-gap-index",
            statement: "threshold 1-gap constant",
            expr: ConstExpr::mul(vec![ConstExpr::int(2), pow84(256, 338)]),
        },
        ConstantDef {
            id: "surface-vol-index",
            statement: "surface volume floor index",
            expr: ConstExpr::mul(vec![ConstExpr::int(42), pow84(128, 168)]),
        },
        ConstantDef {
            id: "surface-vol-floor",
            statement: "surface volume lower bound",
            expr: ConstExpr::recip(ConstExpr::mul(vec![
                ConstExpr::int(42),
                pow84(128, 168),
            ])),
        },
        ConstantDef {
            id: "cy-volume-cap",
            statement: "exceptional threefold volume cap",
            expr: ConstExpr::mul(vec![ConstExpr::int(3200), pow84(1024, 1352)]),
        },
        ConstantDef {
            id: "log-pair-vol-floor",
            statement: "ample log-pair volume lower bound",
            expr: ConstExpr::recip(pow84(384, 507)),
        },
        ConstantDef {
            id: "surface-cy-index",
            statement: "surface Calabi-Yau index",
            expr: ConstExpr::int(66),
        },
        ConstantDef {
            id: "slc-surface-index-bound",
            statement: "slc surface trivial-complement index bound",
            expr: ConstExpr::mul(vec![ConstExpr::int(6), ConstExpr::Factorial(7920)]),
        },
        ConstantDef {
            id: "surface-kod1-complement-bound",
            statement: "surface Kodaira-one complement bound",
            expr: ConstExpr::mul(vec![ConstExpr::int(36), ConstExpr::Factorial(42)]),
        },
        ConstantDef {
            id: "threefold-kod1-complement-bound",
            statement: "threefold Kodaira-one complement bound",
            expr: ConstExpr::mul(vec![ConstExpr::int(72), ConstExpr::Factorial(42)]),
        },
    ];
    for n in [1i64, 2, 3, 4, 6] {
        let id: &'static str = match n {
            1 => "curve-complement-menu-1",
            2 => "curve-complement-menu-2",
            3 => "curve-complement-menu-3",
            4 => "curve-complement-menu-4",
            _ => "curve-complement-menu-6",
        };
        defs.push(ConstantDef {
            id,
            statement: "curve complement menu",
            expr: ConstExpr::int(n),
        });
    }
    defs
}

pub fn lookup(id: &str) -> Option<ConstantDef> {
    registry().into_iter().find(|d| d.id == id)
}

/// Parsed manifest rows `(id, statement, expression)`.
pub fn parse_manifest() -> Result<Vec<(String, String, ConstExpr)>, ManifestParseError> {
    let mut out = Vec::new();
    for line in MANIFEST.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.splitn(3, '|');
        let id = parts.next().unwrap_or("").trim().to_string();
        let statement = parts.next().unwrap_or("").trim().to_string();
        let expr_src = parts.next().unwrap_or("").trim();
        out.push((id, statement, parse_expression(expr_src)?));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_matches_manifest() {
        let reg = registry();
        let rows = parse_manifest().unwrap();
        assert_eq!(reg.len(), rows.len(), "manifest and registry must agree");
        for def in &reg {
            let row = rows
                .iter()
                .find(|(id, _, _)| id == def.id)
                .unwrap_or_else(|| panic!("{} missing from manifest", def.id));
            // exponents are written symbolically in code and literally in the
            // manifest; normal forms must coincide exactly
            assert_eq!(
                def.expr.prime_map().unwrap(),
                row.2.prime_map().unwrap(),
                "normal forms differ for {}",
                def.id
            );
            assert_eq!(def.statement, row.1, "statement label for {}", def.id);
        }
    }

    #[test]
    fn surrogate_coherence_for_all_entries() {
        // Down-scaled surrogate: exponents reduced, factorials capped; both
        // evaluation routes must then agree exactly.
        for def in registry() {
            let surrogate = downscale(&def.expr);
            let direct = surrogate.exact_value(1 << 22).unwrap();
            let via_map = surrogate
                .prime_map()
                .unwrap()
                .exact_value(1 << 22)
                .unwrap();
            assert_eq!(direct, via_map, "surrogate mismatch for {}", def.id);
            assert!(
                surrogate.magnitude(96).contains(&direct, 160),
                "enclosure misses surrogate for {}",
                def.id
            );
        }
    }

    fn downscale(e: &ConstExpr) -> ConstExpr {
        match e {
            ConstExpr::Int(v) => ConstExpr::Int(v.clone()),
            ConstExpr::Factorial(n) => ConstExpr::Factorial((*n).min(9)),
            ConstExpr::Pow(b, exp) => {
                let small = exp % BigInt::from(7) + BigInt::from(1);
                ConstExpr::Pow(Box::new(downscale(b)), small)
            }
            ConstExpr::Mul(fs) => ConstExpr::Mul(fs.iter().map(downscale).collect()),
            ConstExpr::Recip(inner) => ConstExpr::recip(downscale(inner)),
        }
    }

    #[test]
    fn lookup_finds_known_ids() {
        assert!(lookup("surface-cy-index").is_some());
        assert!(lookup("no-such-constant").is_none());
    }
}
