//! Recursive-descent parser for the expression grammar documented in the module root.

use super::Expr;
use crate::error::{Error, Result};
use crate::scalar::Func;
use crate::Rat;
use num_bigint::BigInt;

/// Parses `text` against a fixed set of allowed variable names. Any other
/// identifier is an "unknown identifier" error; unknown function names and
/// malformed exponents are rejected with byte positions.
pub fn parse(text: &str, allowed_vars: &[&str]) -> Result<Expr> {
    let mut p = Parser {
        bytes: text.as_bytes(),
        pos: 0,
        vars: allowed_vars,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    vars: &'a [&'a str],
}

impl<'a> Parser<'a> {
    fn err(&self, message: &str) -> Error {
        Error::Parse {
            position: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = Expr::Add(Box::new(acc), Box::new(self.term()?));
            } else if self.eat(b'-') {
                acc = Expr::Sub(Box::new(acc), Box::new(self.term()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.factor()?;
        loop {
            if self.eat(b'*') {
                acc = Expr::Mul(Box::new(acc), Box::new(self.factor()?));
            } else if self.eat(b'/') {
                let rhs = self.factor()?;
                // constant/constant folds to an exact rational literal
                acc = match (&acc, &rhs) {
                    (Expr::Const(a), Expr::Const(b)) if !b.is_zero_val() => {
                        Expr::Const(a.clone() / b.clone())
                    }
                    _ => Expr::Div(Box::new(acc), Box::new(rhs)),
                };
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            Ok(Expr::Neg(Box::new(self.factor()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let mut base = self.atom()?;
        while self.eat(b'^') {
            let neg = self.eat(b'-');
            let n = self.integer_literal()?;
            let n: i32 = n
                .try_into()
                .map_err(|_| self.err("exponent out of range"))?;
            base = Expr::Pow(Box::new(base), if neg { -n } else { n });
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer_literal()?;
                Ok(Expr::Const(Rat::from_integer(n)))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let name = self.identifier();
                if self.peek() == Some(b'(') {
                    let f = Func::from_name(&name)
                        .ok_or_else(|| self.err(&format!("unknown function `{name}`")))?;
                    self.pos += 1;
                    let arg = self.expr()?;
                    self.expect(b')')?;
                    Ok(Expr::Call(f, Box::new(arg)))
                } else if self.vars.contains(&name.as_str()) {
                    Ok(Expr::Var(name))
                } else {
                    Err(self.err(&format!("unknown identifier `{name}`")))
                }
            }
            Some(b'.') => Err(self.err("decimal literals are not supported; write p/q")),
            Some(c) => Err(self.err(&format!("unexpected character `{}`", c as char))),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn identifier(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.bytes.len()
            && (self.bytes[self.pos].is_ascii_alphanumeric())
        {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.bytes[start..self.pos]).into_owned()
    }

    fn integer_literal(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        let s = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        s.parse::<BigInt>().map_err(|_| self.err("bad integer"))
    }
}

trait IsZeroVal {
    fn is_zero_val(&self) -> bool;
}

impl IsZeroVal for Rat {
    fn is_zero_val(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;
    use std::collections::HashMap;

    #[test]
    fn parses_spec_shapes() {
        let vars = ["x", "y", "p", "x2"];
        assert!(parse("x2^2", &vars).is_ok());
        assert!(parse("6*y^2 + x", &vars).is_ok());
        assert!(parse("p^2/y", &vars).is_ok());
        assert!(parse("exp(y)", &vars).is_ok());
    }

    #[test]
    fn rational_literal_folds() {
        let e = parse("3*x + 1/2", &["x"]).unwrap();
        let mut env = HashMap::new();
        env.insert("x".to_string(), rat(0, 1));
        assert_eq!(e.eval(&env).unwrap(), rat(1, 2));
    }

    #[test]
    fn unknown_identifier_is_an_error() {
        let err = parse("3*u + 1/2", &["x", "y"]).unwrap_err();
        match err {
            crate::Error::Parse { message, .. } => assert!(message.contains("unknown identifier")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_function_is_an_error() {
        assert!(parse("tan(x)", &["x"]).is_err());
    }

    #[test]
    fn precedence_and_unary_minus() {
        let e = parse("-2^2", &[]).unwrap();
        let env: HashMap<String, crate::Rat> = HashMap::new();
        assert_eq!(e.eval(&env).unwrap(), rat(-4, 1));
        let e = parse("2 - 3 - 4", &[]).unwrap();
        assert_eq!(e.eval(&env).unwrap(), rat(-5, 1));
        let e = parse("2^3^2", &[]).unwrap();
        assert_eq!(e.eval(&env).unwrap(), rat(64, 1));
        let e = parse("x^-2", &["x"]).unwrap();
        let mut env2 = HashMap::new();
        env2.insert("x".to_string(), rat(2, 1));
        assert_eq!(e.eval(&env2).unwrap(), rat(1, 4));
    }

    #[test]
    fn decimal_rejected() {
        assert!(parse("0.5*x", &["x"]).is_err());
    }
}
