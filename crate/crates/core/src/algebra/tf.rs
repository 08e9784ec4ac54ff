use std::collections::BTreeSet;
use std::fmt;

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::binding::Binding;
use super::param_poly::{Monomial, ParamPoly};
use super::rational::Rational;
use super::spoly::{horner, SPoly};
use super::AlgebraError;

/// `e^(-delay*s) * num(s) / den(s)`.
///
/// Never reduced automatically; compare with [`TransferFunction::equals`],
/// which cross-multiplies.
#[derive(Clone, Debug, PartialEq)]
pub struct TransferFunction {
    num: SPoly,
    den: SPoly,
    delay: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TfOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl TransferFunction {
    pub fn new(num: SPoly, den: SPoly) -> Result<Self, AlgebraError> {
        Self::with_delay(num, den, 0.0)
    }

    pub fn with_delay(num: SPoly, den: SPoly, delay: f64) -> Result<Self, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::ZeroDenominator);
        }
        #[allow(clippy::neg_cmp_op_on_partial_ord)] // also rejects NaN
        if !(delay >= 0.0) || !delay.is_finite() {
            return Err(AlgebraError::NegativeDelay(delay));
        }
        Ok(TransferFunction { num, den, delay })
    }

    pub fn constant(c: ParamPoly) -> Self {
        TransferFunction {
            num: SPoly::constant(c),
            den: SPoly::one(),
            delay: 0.0,
        }
    }

    pub fn one() -> Self {
        Self::constant(ParamPoly::one())
    }

    pub fn zero() -> Self {
        Self::constant(ParamPoly::zero())
    }

    /// `1/s`
    pub fn integrator() -> Self {
        TransferFunction {
            num: SPoly::one(),
            den: SPoly::s(),
            delay: 0.0,
        }
    }

    pub fn num(&self) -> &SPoly {
        &self.num
    }

    pub fn den(&self) -> &SPoly {
        &self.den
    }

    pub fn delay(&self) -> f64 {
        self.delay
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn variables(&self) -> BTreeSet<String> {
        let mut v = self.num.variables();
        v.extend(self.den.variables());
        v
    }

    pub fn is_numeric(&self) -> bool {
        self.num.is_numeric() && self.den.is_numeric()
    }

    pub fn arith(&self, op: TfOp, other: &TransferFunction) -> Result<TransferFunction, AlgebraError> {
        match op {
            TfOp::Add => self.add(other),
            TfOp::Sub => self.add(&other.neg()),
            TfOp::Mul => Ok(self.mul(other)),
            TfOp::Div => self.div(other),
        }
    }

    pub fn add(&self, other: &TransferFunction) -> Result<TransferFunction, AlgebraError> {
        if self.delay != other.delay {
            return Err(AlgebraError::DelayMismatch(self.delay, other.delay));
        }
        Ok(TransferFunction {
            num: &(&self.num * &other.den) + &(&other.num * &self.den),
            den: &self.den * &other.den,
            delay: self.delay,
        })
    }

    pub fn sub(&self, other: &TransferFunction) -> Result<TransferFunction, AlgebraError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &TransferFunction) -> TransferFunction {
        TransferFunction {
            num: &self.num * &other.num,
            den: &self.den * &other.den,
            delay: self.delay + other.delay,
        }
    }

    pub fn div(&self, other: &TransferFunction) -> Result<TransferFunction, AlgebraError> {
        if other.num.is_zero() {
            return Err(AlgebraError::DivisionByZeroTF);
        }
        let delay = self.delay - other.delay;
        if delay < 0.0 {
            return Err(AlgebraError::NegativeDelay(delay));
        }
        Ok(TransferFunction {
            num: &self.num * &other.den,
            den: &self.den * &other.num,
            delay,
        })
    }

    pub fn neg(&self) -> TransferFunction {
        TransferFunction {
            num: -&self.num,
            den: self.den.clone(),
            delay: self.delay,
        }
    }

    pub fn scale(&self, c: &ParamPoly) -> TransferFunction {
        TransferFunction {
            num: self.num.scale(c),
            den: self.den.clone(),
            delay: self.delay,
        }
    }

    pub fn add_delay(&self, extra: f64) -> Result<TransferFunction, AlgebraError> {
        TransferFunction::with_delay(self.num.clone(), self.den.clone(), self.delay + extra)
    }

    /// Exact equality: equal delays and `a.num * b.den == b.num * a.den`.
    pub fn equals(&self, other: &TransferFunction) -> bool {
        self.delay == other.delay && &self.num * &other.den == &other.num * &self.den
    }

    /// Closed loop `G / (1 + G H)` for delay-free `G` and `H`.
    pub fn feedback(&self, h: &TransferFunction) -> Result<TransferFunction, AlgebraError> {
        if self.delay != 0.0 || h.delay != 0.0 {
            return Err(AlgebraError::DelayedFeedback);
        }
        let den = &(&self.den * &h.den) + &(&self.num * &h.num);
        if den.is_zero() {
            return Err(AlgebraError::DegenerateLoop);
        }
        Ok(TransferFunction {
            num: &self.num * &h.den,
            den,
            delay: 0.0,
        })
    }

    /// Complex value at `s`; all parameters must be bound.
    pub fn eval(&self, binding: &Binding, s: Complex64) -> Result<Complex64, AlgebraError> {
        self.bind(binding)?.eval(s)
    }

    /// Double-precision coefficients under `binding`, for repeated
    /// evaluation.
    pub fn bind(&self, binding: &Binding) -> Result<NumericTf, AlgebraError> {
        Ok(NumericTf {
            num: self.num.eval_coeffs(binding)?,
            den: self.den.eval_coeffs(binding)?,
            delay: self.delay,
        })
    }

    /// Substitutes the bound parameters exactly, keeping the others symbolic.
    pub fn substitute(&self, binding: &Binding) -> Result<TransferFunction, AlgebraError> {
        let den = self.den.substitute(binding)?;
        if den.is_zero() {
            return Err(AlgebraError::ZeroDenominator);
        }
        Ok(TransferFunction {
            num: self.num.substitute(binding)?,
            den,
            delay: self.delay,
        })
    }

    /// Divides numerator and denominator by their common content: the
    /// rational gcd of all coefficients, the common parameter monomial and
    /// any common `s^k`. The denominator's leading term is made positive;
    /// purely numeric transfer functions also get a monic denominator.
    pub fn remove_content(&self) -> TransferFunction {
        let all: Vec<&ParamPoly> = self.num.coeffs().iter().chain(self.den.coeffs()).collect();
        let Some((content, mono)) = common_content(&all) else {
            return self.clone();
        };
        let mut num = self.num.clone();
        let mut den = self.den.clone();
        if !mono.is_one() {
            let div = |p: &SPoly| p.map_coeffs(|_, c| c.div_monomial(&mono).expect("common monomial divides"));
            num = div(&num);
            den = div(&den);
        }
        if !content.is_one() && !content.is_zero() {
            let inv = Rational::one() / content;
            num = num.scale_rational(&inv);
            den = den.scale_rational(&inv);
        }
        if den.leading().is_some_and(ParamPoly::leading_negative) {
            num = -num;
            den = -den;
        }
        let out = TransferFunction {
            num,
            den,
            delay: self.delay,
        }
        .strip_common_s();
        if out.is_numeric() {
            out.monic()
        } else {
            out
        }
    }

    fn strip_common_s(&self) -> TransferFunction {
        let lowest = |p: &SPoly| p.coeffs().iter().position(|c| !c.is_zero());
        let k = match (lowest(&self.num), lowest(&self.den)) {
            (Some(a), Some(b)) => a.min(b),
            _ => 0,
        };
        if k == 0 {
            return self.clone();
        }
        let drop = |p: &SPoly| SPoly::new(p.coeffs()[k.min(p.coeffs().len())..].to_vec());
        TransferFunction {
            num: drop(&self.num),
            den: drop(&self.den),
            delay: self.delay,
        }
    }

    fn monic(&self) -> TransferFunction {
        let Some(lead) = self.den.leading().and_then(ParamPoly::as_constant) else {
            return self.clone();
        };
        if lead.is_one() || lead.is_zero() {
            return self.clone();
        }
        let inv = Rational::one() / lead;
        TransferFunction {
            num: self.num.scale_rational(&inv),
            den: self.den.scale_rational(&inv),
            delay: self.delay,
        }
    }

    /// Cancels `factor` from numerator and denominator when it divides both
    /// exactly.
    pub fn cancel_factor(&self, factor: &SPoly) -> Option<TransferFunction> {
        if factor.is_zero() || factor.is_one() {
            return None;
        }
        let num = self.num.div_exact(factor)?;
        let den = self.den.div_exact(factor)?;
        Some(TransferFunction {
            num,
            den,
            delay: self.delay,
        })
    }
}

/// Content shared by every nonzero coefficient: numeric gcd and monomial gcd.
fn common_content(all: &[&ParamPoly]) -> Option<(Rational, Monomial)> {
    all.iter()
        .filter(|c| !c.is_zero())
        .map(|c| c.content())
        .reduce(|(ar, am), (r, m)| {
            let n = num_integer::Integer::gcd(ar.numer(), r.numer());
            let d = num_integer::Integer::lcm(ar.denom(), r.denom());
            (Rational::new(n, d), am.gcd(&m))
        })
}

impl fmt::Display for TransferFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.delay != 0.0 {
            write!(f, "exp(-{}*s)*", self.delay)?;
        }
        let num = self.num.to_string();
        let num_compound = self.num.coeffs().iter().filter(|c| !c.is_zero()).count() > 1
            || self.num.coeffs().iter().any(ParamPoly::needs_parens);
        if self.den.is_one() {
            if self.delay != 0.0 && num_compound {
                return write!(f, "({num})");
            }
            return f.write_str(&num);
        }
        if num_compound {
            write!(f, "({num})")?;
        } else {
            f.write_str(&num)?;
        }
        let den = self.den.to_string();
        if is_atom(&den) {
            write!(f, "/{den}")
        } else {
            write!(f, "/({den})")
        }
    }
}

fn is_atom(text: &str) -> bool {
    text.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A transfer function with every parameter bound to a double.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericTf {
    pub num: Vec<f64>,
    pub den: Vec<f64>,
    pub delay: f64,
}

impl NumericTf {
    /// Value at `s`. A denominator below `1e-14` of its term-wise magnitude
    /// counts as a pole.
    pub fn eval(&self, s: Complex64) -> Result<Complex64, AlgebraError> {
        let d = horner(&self.den, s);
        let r = s.norm();
        let scale: f64 = self.den.iter().rev().fold(0.0, |acc, c| acc * r + c.abs());
        if d.norm() <= 1e-14 * scale || d.norm() == 0.0 {
            return Err(AlgebraError::PoleEvaluation { re: s.re, im: s.im });
        }
        let mut v = horner(&self.num, s) / d;
        if self.delay != 0.0 {
            v *= (-self.delay * s).exp();
        }
        Ok(v)
    }
}
