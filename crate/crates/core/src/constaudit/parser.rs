//! Parser for the registry manifest's expression grammar:
//! integers, `n!`, `b^e`, `*`, `/`, parentheses.

use super::expr::ConstExpr;
use num_bigint::BigInt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("manifest parse error at offset {at}: {message}")]
pub struct ManifestParseError {
    pub at: usize,
    pub message: String,
}

pub fn parse_expression(input: &str) -> Result<ConstExpr, ManifestParseError> {
    let mut p = Parser { input: input.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.input.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    input: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, message: &str) -> ManifestParseError {
        ManifestParseError { at: self.pos, message: message.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.input.len() && self.input[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.input.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<ConstExpr, ManifestParseError> {
        let mut factors = vec![self.term()?];
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    factors.push(self.term()?);
                }
                Some(b'/') => {
                    self.pos += 1;
                    factors.push(ConstExpr::recip(self.term()?));
                }
                _ => break,
            }
        }
        if factors.len() == 1 {
            Ok(factors.pop().unwrap())
        } else {
            Ok(ConstExpr::Mul(factors))
        }
    }

    fn term(&mut self) -> Result<ConstExpr, ManifestParseError> {
        let mut base = self.atom()?;
        loop {
            match self.peek() {
                Some(b'!') => {
                    self.pos += 1;
                    let n = match &base {
                        ConstExpr::Int(v) => v
                            .to_string()
                            .parse::<u64>()
                            .map_err(|_| self.err("factorial of a non-small integer"))?,
                        _ => return Err(self.err("factorial applies to integer literals")),
                    };
                    base = ConstExpr::Factorial(n);
                }
                Some(b'^') => {
                    self.pos += 1;
                    let e = self.integer()?;
                    base = ConstExpr::Pow(Box::new(base), e);
                }
                _ => break,
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ConstExpr, ManifestParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => Ok(ConstExpr::Int(self.integer()?)),
            _ => Err(self.err("expected integer or '('")),
        }
    }

    fn integer(&mut self) -> Result<BigInt, ManifestParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.input.len() && self.input[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected integer"));
        }
        std::str::from_utf8(&self.input[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.err("invalid integer"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_grammar() {
        let e = parse_expression("192 * 42! * 84^16728477696").unwrap();
        assert_eq!(
            e,
            ConstExpr::Mul(vec![
                ConstExpr::int(192),
                ConstExpr::Factorial(42),
                ConstExpr::pow(ConstExpr::int(84), 16728477696u64 as i64),
            ])
        );
        let e = parse_expression("1/(42 * 84^168)").unwrap();
        assert!(matches!(e, ConstExpr::Mul(_)));
        assert!(parse_expression("2^").is_err());
        assert!(parse_expression("(2").is_err());
        assert!(parse_expression("2 + 3").is_err());
    }

    #[test]
    fn render_round_trips() {
        for s in [
            "192 * 42! * 84^16728477696",
            "66",
            "6 * 7920!",
            "1/(84^50185433595)",
        ] {
            let e = parse_expression(s).unwrap();
            let back = parse_expression(&e.render()).unwrap();
            assert_eq!(e.prime_map(), back.prime_map());
        }
    }
}
