//! Parser for the transfer-function text grammar.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' ['-'] integer)?
//! atom   := number | ident | 's' | '(' expr ')' | 'exp' '(' expr ')'
//! ```
//!
//! Any expression is evaluated in the field of rational functions of `s`
//! with parameter-polynomial coefficients. `exp(-d*s)` with constant `d >= 0`
//! introduces a pure delay. The printers in `spoly`/`tf` emit text this
//! parser accepts.

use super::param_poly::ParamPoly;
use super::rational::{self, Rational};
use super::spoly::SPoly;
use super::tf::TransferFunction;
use super::AlgebraError;
use num_traits::{Signed, Zero};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Op(char),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, AlgebraError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            // exponent part: e / E followed by optional sign and digits
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let lit = &text[start..i];
            let v = rational::parse(lit).map_err(|_| AlgebraError::Parse {
                pos: start,
                msg: format!("invalid number `{lit}`"),
            })?;
            out.push((start, Tok::Num(v)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(text[start..i].to_string())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else {
            return Err(AlgebraError::Parse {
                pos: i,
                msg: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn err(&self, msg: impl Into<String>) -> AlgebraError {
        AlgebraError::Parse {
            pos: self.offset(),
            msg: msg.into(),
        }
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, op: char) -> Result<(), AlgebraError> {
        if self.eat(op) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{op}`")))
        }
    }

    fn expr(&mut self) -> Result<TransferFunction, AlgebraError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                let rhs = self.term()?;
                acc = add_aligned(&acc, &rhs)?;
            } else if self.eat('-') {
                let rhs = self.term()?;
                acc = add_aligned(&acc, &rhs.neg())?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<TransferFunction, AlgebraError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                let rhs = self.unary()?;
                acc = acc.mul(&rhs);
            } else if self.eat('/') {
                let at = self.offset();
                let rhs = self.unary()?;
                acc = div_simple(&acc, &rhs).map_err(|e| match e {
                    AlgebraError::DivisionByZeroTF => AlgebraError::Parse {
                        pos: at,
                        msg: "division by zero".into(),
                    },
                    other => other,
                })?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<TransferFunction, AlgebraError> {
        if self.eat('-') {
            return Ok(self.unary()?.neg());
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<TransferFunction, AlgebraError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let neg = self.eat('-');
        let e = match self.peek() {
            Some(Tok::Num(r)) if r.is_integer() && !r.is_negative() => r.to_integer(),
            _ => return Err(self.err("exponent must be a non-negative integer literal")),
        };
        self.pos += 1;
        let e: u32 = e
            .try_into()
            .ok()
            .filter(|e| *e <= 1000)
            .ok_or_else(|| self.err("exponent too large"))?;
        let mut acc = TransferFunction::one();
        for _ in 0..e {
            acc = acc.mul(&base);
        }
        if neg {
            acc = div_simple(&TransferFunction::one(), &acc).map_err(|_| self.err("zero to a negative power"))?;
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<TransferFunction, AlgebraError> {
        let at = self.offset();
        match self.peek().cloned() {
            Some(Tok::Num(r)) => {
                self.pos += 1;
                Ok(TransferFunction::constant(ParamPoly::constant(r)))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if name == "s" {
                    return TransferFunction::new(SPoly::s(), SPoly::one());
                }
                if name == "exp" && self.peek() == Some(&Tok::Op('(')) {
                    self.pos += 1;
                    let arg = self.expr()?;
                    self.expect(')')?;
                    return delay_factor(&arg).ok_or(AlgebraError::Parse {
                        pos: at,
                        msg: "exp() argument must be -d*s with constant d >= 0".into(),
                    });
                }
                Ok(TransferFunction::constant(ParamPoly::var(&name)))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            _ => Err(self.err("expected a number, identifier or `(`")),
        }
    }
}

fn div_simple(a: &TransferFunction, b: &TransferFunction) -> Result<TransferFunction, AlgebraError> {
    // Division by a plain rational constant scales the numerator instead of
    // growing the denominator, so `1/3*s` parses back to `(1/3) s / 1`.
    if b.delay() == 0.0 && b.den().is_one() {
        if let Some(c) = b.num().coeffs().first().and_then(ParamPoly::as_constant) {
            if b.num().degree() == Some(0) && !c.is_zero() {
                return TransferFunction::with_delay(
                    a.num().scale_rational(&(Rational::from_integer(1.into()) / c)),
                    a.den().clone(),
                    a.delay(),
                );
            }
        }
    }
    a.div(b)
}

/// Addition that reuses a shared denominator instead of squaring it.
fn add_aligned(a: &TransferFunction, b: &TransferFunction) -> Result<TransferFunction, AlgebraError> {
    if a.delay() == b.delay() && a.den() == b.den() {
        return TransferFunction::with_delay(a.num() + b.num(), a.den().clone(), a.delay());
    }
    if a.is_zero() && a.delay() == 0.0 {
        return Ok(b.clone());
    }
    a.add(b)
}

fn delay_factor(arg: &TransferFunction) -> Option<TransferFunction> {
    if arg.delay() != 0.0 {
        return None;
    }
    let den = arg.den().as_constant_rational()?;
    let num = arg.num();
    if num.degree().is_some_and(|d| d > 1) || !num.coeff(0).is_zero() {
        return None;
    }
    let slope = num.coeff(1).as_constant()? / den;
    if slope.is_positive() {
        return None;
    }
    let delay = rational::to_f64(&(-slope));
    TransferFunction::one().add_delay(delay).ok()
}

impl SPoly {
    fn as_constant_rational(&self) -> Option<Rational> {
        match self.degree() {
            Some(0) => self.coeff(0).as_constant(),
            _ => None,
        }
    }
}

/// Parses a transfer function (or any rational expression in `s`).
pub fn parse_tf(text: &str) -> Result<TransferFunction, AlgebraError> {
    let toks = tokenize(text)?;
    if toks.is_empty() {
        return Err(AlgebraError::Parse {
            pos: 0,
            msg: "empty expression".into(),
        });
    }
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
    };
    let tf = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(tf)
}

/// Parses a polynomial in `s`; rejects anything with a non-constant
/// denominator or a delay.
pub fn parse_spoly(text: &str) -> Result<SPoly, AlgebraError> {
    let tf = parse_tf(text)?;
    let not_poly = || AlgebraError::Parse {
        pos: 0,
        msg: format!("`{text}` is not a polynomial in s"),
    };
    if tf.delay() != 0.0 {
        return Err(not_poly());
    }
    let c = tf.den().as_constant_rational().ok_or_else(not_poly)?;
    Ok(tf.num().scale_rational(&(Rational::from_integer(1.into()) / c)))
}

/// Parses a parameter polynomial such as `0.25*K1 + 0.1088*K2`.
pub fn parse_param_poly(text: &str) -> Result<ParamPoly, AlgebraError> {
    let p = parse_spoly(text)?;
    match p.degree() {
        None => Ok(ParamPoly::zero()),
        Some(0) => Ok(p.coeff(0)),
        _ => Err(AlgebraError::Parse {
            pos: 0,
            msg: format!("`{text}` depends on s"),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::frac;

    #[test]
    fn parses_grammar_example() {
        let p = parse_spoly("(a*K1 + b)*s^2 + c*s + d").unwrap();
        assert_eq!(p.degree(), Some(2));
        assert_eq!(p.coeff(2).to_string(), "K1*a + b");
        assert_eq!(p.to_string(), "(K1*a + b)*s^2 + c*s + d");
    }

    #[test]
    fn parses_transfer_functions() {
        let t = parse_tf("1/(s*(s+1))").unwrap();
        assert_eq!(t.to_string(), "1/(s^2 + s)");
        let t = parse_tf("K1/(s + K1)").unwrap();
        assert_eq!(t.variables().len(), 1);
        let t = parse_tf("exp(-0.5*s)/(s+1)").unwrap();
        assert_eq!(t.delay(), 0.5);
        let t = parse_tf("1/3*s").unwrap();
        assert_eq!(t.num().coeff(1).as_constant().unwrap(), frac(1, 3));
        assert!(t.den().is_one());
        let t = parse_tf("s^-1").unwrap();
        assert!(t.equals(&TransferFunction::integrator()));
    }

    #[test]
    fn errors_carry_positions() {
        match parse_tf("1/(s + )") {
            Err(AlgebraError::Parse { pos, .. }) => assert_eq!(pos, 7),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_tf("1/0").is_err());
        assert!(parse_tf("exp(2*s)").is_err());
        assert!(parse_tf("s $ 1").is_err());
        assert!(parse_tf("").is_err());
        assert!(parse_spoly("1/s").is_err());
    }

    #[test]
    fn printed_forms_reparse() {
        for text in [
            "1/(s + 1)",
            "-(0.25*K1*s + 0.1088*K1)/(s^4 + 3.456*s^3 + (0.25*K2 + 3.207)*s^2 - s + 1/3)",
            "exp(-2*s)*(s - 1)/(s^2 + 4)",
            "-R2/R1",
            "2/(3*s)",
        ] {
            let t = parse_tf(text).unwrap();
            let again = parse_tf(&t.to_string()).unwrap();
            assert!(t.equals(&again), "{text} -> {t} -> {again}");
            assert_eq!(t.to_string(), again.to_string());
        }
    }
}
