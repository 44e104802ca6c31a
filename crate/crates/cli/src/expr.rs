//! A small expression language over truncated series in `v`.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' exponent)?
//! exponent:= integer | '(' rational ')'
//! primary := rational | 'v' | '(' expr ')' | name '(' args ')'
//! ```
//!
//! Functions: `poch(a, n)` = `(a)_n`, `poch(a, n, s)` = `(a v^s)_n`,
//! `pinf(a)` = `(a)_∞`, `pinf(a, s)` = `(a v^s)_∞`, `euler()` = `(v)_∞`,
//! `exp(f)`, `log(f)`. Pochhammer arguments must be constants.

use anyhow::{anyhow, bail, Result};
use num::{One, Zero};
use qtcorr_core::qseries::{pochhammer_fin_shifted, pochhammer_inf_shifted};
use qtcorr_core::rational::parse_rational;
use qtcorr_core::{Rational, VSeries};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        if ch.is_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            out.push(Tok::Num(chars[start..i].iter().collect()));
        } else if ch.is_ascii_alphabetic() || ch == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^(),".contains(ch) {
            out.push(Tok::Op(ch));
            i += 1;
        } else {
            bail!("unexpected character '{ch}' in series expression");
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [Tok],
    pos: usize,
    order: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, op: char) -> Result<()> {
        if self.eat(op) {
            Ok(())
        } else {
            bail!("expected '{op}' at token {}", self.pos + 1)
        }
    }

    fn expr(&mut self) -> Result<VSeries> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<VSeries> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.unary()?;
            } else if self.eat('/') {
                acc = acc.div(&self.unary()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<VSeries> {
        if self.eat('-') {
            Ok(-self.unary()?)
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<VSeries> {
        let base = self.primary()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let exponent = if self.eat('(') {
            let e = self.constant_expr()?;
            self.expect(')')?;
            e
        } else {
            let negative = self.eat('-');
            let e = self.integer()?;
            if negative {
                -e
            } else {
                e
            }
        };
        if exponent.is_integer() {
            let n = exponent.to_integer().try_into().map_err(|_| anyhow!("exponent too large"))?;
            Ok(base.pow_int(n)?)
        } else {
            Ok(base.pow_rational(&exponent)?)
        }
    }

    fn integer(&mut self) -> Result<Rational> {
        match self.peek().cloned() {
            Some(Tok::Num(s)) => {
                self.pos += 1;
                Ok(parse_rational(&s)?)
            }
            _ => bail!("expected an integer at token {}", self.pos + 1),
        }
    }

    fn constant_expr(&mut self) -> Result<Rational> {
        let s = self.expr()?;
        constant_of(&s)
    }

    fn primary(&mut self) -> Result<VSeries> {
        match self.peek().cloned() {
            Some(Tok::Num(_)) => {
                let n = self.integer()?;
                Ok(VSeries::constant(n, self.order))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if name == "v" {
                    return Ok(VSeries::v(self.order));
                }
                self.expect('(')?;
                let mut args = Vec::new();
                if !self.eat(')') {
                    loop {
                        args.push(self.expr()?);
                        if self.eat(')') {
                            break;
                        }
                        self.expect(',')?;
                    }
                }
                self.call(&name, args)
            }
            _ => bail!("unexpected end of expression or token at {}", self.pos + 1),
        }
    }

    fn call(&self, name: &str, args: Vec<VSeries>) -> Result<VSeries> {
        let n = self.order;
        let index = |s: &VSeries| -> Result<usize> {
            let c = constant_of(s)?;
            if !c.is_integer() || c < Rational::zero() {
                bail!("{name}: expected a nonnegative integer argument, got {c}");
            }
            c.to_integer().try_into().map_err(|_| anyhow!("{name}: argument too large"))
        };
        match (name, args.as_slice()) {
            ("poch", [a, k]) => Ok(pochhammer_fin_shifted(&constant_of(a)?, 0, index(k)?, n)),
            ("poch", [a, k, s]) => Ok(pochhammer_fin_shifted(&constant_of(a)?, index(s)?, index(k)?, n)),
            ("pinf", [a]) => Ok(pochhammer_inf_shifted(&constant_of(a)?, 0, n)),
            ("pinf", [a, s]) => Ok(pochhammer_inf_shifted(&constant_of(a)?, index(s)?, n)),
            ("euler", []) => Ok(pochhammer_inf_shifted(&Rational::one(), 1, n)),
            ("exp", [f]) => Ok(f.exp()?),
            ("log", [f]) => Ok(f.log()?),
            _ => bail!("unknown function {name} with {} argument(s)", args.len()),
        }
    }
}

fn constant_of(s: &VSeries) -> Result<Rational> {
    if s.coeffs().iter().skip(1).any(|c| !c.is_zero()) {
        bail!("expected a constant, got the series {s}");
    }
    Ok(s.coeff(0).clone())
}

/// Evaluates `src` modulo `v^{order+1}`.
pub fn evaluate(src: &str, order: usize) -> Result<VSeries> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks: &toks, pos: 0, order };
    let out = p.expr()?;
    if p.pos != toks.len() {
        bail!("trailing input after token {}", p.pos);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use qtcorr_core::rational::{int, rat};

    #[test]
    fn arithmetic() {
        let s = evaluate("1/(1-v)", 4).unwrap();
        assert_eq!(s.coeffs(), &[int(1), int(1), int(1), int(1), int(1)]);
        let s = evaluate("(1 + v)^2 - 2*v", 3).unwrap();
        assert_eq!(s.coeffs(), &[int(1), int(0), int(1), int(0)]);
        let s = evaluate("(1-v)^(1/2) * (1-v)^(1/2)", 5).unwrap();
        assert_eq!(s, evaluate("1 - v", 5).unwrap());
    }

    #[test]
    fn pochhammer_functions() {
        // (1/2; v)_2 = (1 - 1/2)(1 - v/2)
        assert_eq!(evaluate("poch(1/2, 2)", 3).unwrap().coeffs(), &[rat(1, 2), rat(-1, 4), int(0), int(0)]);
        assert_eq!(evaluate("euler()", 6).unwrap(), evaluate("pinf(1, 1)", 6).unwrap());
        // q-binomial theorem with a = 0: 1/(t)_∞ at t = 1/2 has constant term 2
        assert_eq!(*evaluate("1/pinf(1/2)", 4).unwrap().coeff(0), int(2));
        assert_eq!(evaluate("exp(log(1 + v))", 6).unwrap(), evaluate("1 + v", 6).unwrap());
    }

    #[test]
    fn errors() {
        assert!(evaluate("poch(v, 2)", 3).is_err());
        assert!(evaluate("1 +", 3).is_err());
        assert!(evaluate("foo(1)", 3).is_err());
        assert!(evaluate("1 $ 2", 3).is_err());
        assert!(evaluate("1/v", 3).is_err());
    }
}
