//! Recursive-descent parser for the infix grammar
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' exponent)?
//! exponent:= ['-'|'+'] int | '(' ['-'|'+'] int ')'
//! primary := number | 'i' | ident | func '(' expr ')' | '(' expr ')'
//! ```
//!
//! Decimal literals (`0.25`, `1e-3`) are read exactly as rationals.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Pow;

use super::{Expr, ExprError, Func, Number, Symbol};

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ExprError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected `{}`", c as char))
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut terms = vec![self.term()?];
        loop {
            if self.eat(b'+') {
                terms.push(self.term()?);
            } else if self.eat(b'-') {
                terms.push(-self.term()?);
            } else {
                return Ok(Expr::sum(terms));
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut factors = vec![self.unary()?];
        loop {
            if self.eat(b'*') {
                factors.push(self.unary()?);
            } else if self.eat(b'/') {
                factors.push(self.unary()?.recip());
            } else {
                return Ok(Expr::product(factors));
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.eat(b'-') {
            Ok(-self.unary()?)
        } else if self.eat(b'+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.primary()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let paren = self.eat(b'(');
        let negative = if self.eat(b'-') {
            true
        } else {
            self.eat(b'+');
            false
        };
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        let Ok(mut n) = digits.parse::<i32>() else {
            return self.err("expected an integer exponent");
        };
        if negative {
            n = -n;
        }
        if paren {
            self.expect(b')')?;
        }
        Ok(base.pow(n))
    }

    fn number(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        let digits = |p: &mut Parser| {
            let s = p.pos;
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            std::str::from_utf8(&p.src[s..p.pos]).unwrap().to_string()
        };
        let int_part = digits(self);
        let mut frac = String::new();
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            frac = digits(self);
        }
        let mut exponent: i32 = 0;
        if matches!(self.src.get(self.pos), Some(b'e') | Some(b'E')) {
            let save = self.pos;
            self.pos += 1;
            let sign = match self.src.get(self.pos) {
                Some(b'-') => {
                    self.pos += 1;
                    -1
                }
                Some(b'+') => {
                    self.pos += 1;
                    1
                }
                _ => 1,
            };
            let e = digits(self);
            match e.parse::<i32>() {
                Ok(v) => exponent = sign * v,
                Err(_) => self.pos = save,
            }
        }
        if int_part.is_empty() && frac.is_empty() {
            self.pos = start;
            return self.err("expected a number");
        }
        let mantissa: BigInt = format!("{int_part}{frac}").parse().unwrap_or_default();
        let scale = exponent - frac.len() as i32;
        let ten = BigInt::from(10);
        let value = if scale >= 0 {
            BigRational::from_integer(mantissa * Pow::pow(&ten, scale as u32))
        } else {
            BigRational::new(mantissa, Pow::pow(&ten, (-scale) as u32))
        };
        Ok(Expr::constant(Number::real(value)))
    }

    fn primary(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                if name == "i" {
                    return Ok(Expr::i());
                }
                if let Some(f) = Func::from_name(name) {
                    self.expect(b'(')?;
                    let arg = self.expr()?;
                    self.expect(b')')?;
                    return Ok(Expr::func(f, arg));
                }
                Symbol::new(name).map(|s| Expr::symbol(&s))
            }
            Some(c) => self.err(format!("unexpected `{}`", c as char)),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parse without simplifying.
pub(crate) fn parse_raw(src: &str) -> Result<Expr, ExprError> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(e)
}

/// Parse and bring to canonical form.
pub fn parse(src: &str) -> Result<Expr, ExprError> {
    parse_raw(src).map(|e| e.simplify())
}

impl FromStr for Expr {
    type Err = ExprError;
    fn from_str(s: &str) -> Result<Expr, ExprError> {
        parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_grammar() {
        let e = parse("-sinh(a*z0)*i + cosh(a*z0)/(a*z1)").unwrap();
        let (a, z0, z1) = (Expr::sym("a"), Expr::sym("z0"), Expr::sym("z1"));
        let expected = -((&a * &z0).sinh() * Expr::i()) + (&a * &z0).cosh() / (&a * &z1);
        assert_eq!(e, expected.simplify());
        assert_eq!(parse("x^-2").unwrap(), Expr::sym("x").pow(-2));
        assert_eq!(parse("x^(-2)").unwrap(), Expr::sym("x").pow(-2));
        assert_eq!(parse("-x^2").unwrap(), (-Expr::sym("x").pow(2)).simplify());
    }

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse("0.25").unwrap(), Expr::rational(1, 4));
        assert_eq!(parse("1e-3").unwrap(), Expr::rational(1, 1000));
        assert_eq!(parse("2.5E2").unwrap(), Expr::int(250));
    }

    #[test]
    fn rejects_malformed_input() {
        for bad in ["", "1 +", "sinh x", "x^y", "(x", "x)", "2x", "@"] {
            assert!(parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn round_trip_examples() {
        let samples = [
            "i*cosh(a*z0)/(a*z1)",
            "(1/2 + 3*i)*x - 7*y^3/5",
            "exp(-a*z0 + i*w*z1)*tanh(xi/2)",
            "1/(1 + x)^2 - 1/(2*x + 2*y)",
        ];
        for s in samples {
            let e = parse(s).unwrap();
            assert_eq!(parse(&e.to_string()).unwrap(), e, "{s} -> {e}");
        }
    }
}
