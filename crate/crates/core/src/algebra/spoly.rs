//! Univariate polynomials in the Laplace variable `s` whose coefficients are
//! parameter polynomials.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::binding::Binding;
use super::param_poly::ParamPoly;
use super::rational::{self, Rational};
use super::AlgebraError;

/// `coeffs[k]` is the coefficient of `s^k`. Trailing zero coefficients are
/// trimmed, so the zero polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct SPoly {
    coeffs: Vec<ParamPoly>,
}

impl SPoly {
    pub fn new(coeffs: Vec<ParamPoly>) -> Self {
        let mut p = SPoly { coeffs };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        SPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(ParamPoly::one())
    }

    pub fn constant(c: ParamPoly) -> Self {
        Self::new(vec![c])
    }

    /// `s`
    pub fn s() -> Self {
        Self::monomial(ParamPoly::one(), 1)
    }

    /// `c * s^k`
    pub fn monomial(c: ParamPoly, k: usize) -> Self {
        let mut coeffs = vec![ParamPoly::zero(); k];
        coeffs.push(c);
        Self::new(coeffs)
    }

    pub fn from_rationals<I: IntoIterator<Item = Rational>>(coeffs: I) -> Self {
        Self::new(coeffs.into_iter().map(ParamPoly::constant).collect())
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| ParamPoly::int(c)).collect())
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(ParamPoly::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[ParamPoly] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<ParamPoly> {
        self.coeffs
    }

    pub fn coeff(&self, k: usize) -> ParamPoly {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&ParamPoly> {
        self.coeffs.last()
    }

    pub fn variables(&self) -> BTreeSet<String> {
        self.coeffs.iter().flat_map(ParamPoly::variables).collect()
    }

    /// True when every coefficient is a rational constant.
    pub fn is_numeric(&self) -> bool {
        self.coeffs.iter().all(ParamPoly::is_constant)
    }

    pub fn map_coeffs(&self, f: impl Fn(usize, &ParamPoly) -> ParamPoly) -> SPoly {
        SPoly::new(self.coeffs.iter().enumerate().map(|(k, c)| f(k, c)).collect())
    }

    pub fn scale(&self, c: &ParamPoly) -> SPoly {
        self.map_coeffs(|_, a| a * c)
    }

    pub fn scale_rational(&self, c: &Rational) -> SPoly {
        self.map_coeffs(|_, a| a.scale(c))
    }

    /// Multiplies by `s^k`.
    pub fn shift_up(&self, k: usize) -> SPoly {
        if self.is_zero() {
            return SPoly::zero();
        }
        let mut coeffs = vec![ParamPoly::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        SPoly { coeffs }
    }

    pub fn pow(&self, e: u32) -> SPoly {
        let mut acc = SPoly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// `p(s + a)` by Taylor shift.
    pub fn translate(&self, a: &Rational) -> SPoly {
        let n = self.coeffs.len();
        let mut out = vec![ParamPoly::zero(); n];
        for (k, c) in self.coeffs.iter().enumerate() {
            // (s + a)^k = sum_i C(k,i) a^(k-i) s^i
            for (i, slot) in out.iter_mut().enumerate().take(k + 1) {
                let w =
                    Rational::from_integer(rational::binomial(k as u32, i as u32)) * num_traits::pow(a.clone(), k - i);
                *slot = &*slot + &c.scale(&w);
            }
        }
        SPoly::new(out)
    }

    /// `p(c * s)`.
    pub fn dilate(&self, c: &Rational) -> SPoly {
        let mut w = Rational::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            out.push(a.scale(&w));
            w *= c;
        }
        SPoly::new(out)
    }

    /// Splits `p(s + j*b)` into real and imaginary polynomials.
    pub fn split_imag_shift(&self, b: &Rational) -> (SPoly, SPoly) {
        let n = self.coeffs.len();
        let mut re = vec![ParamPoly::zero(); n];
        let mut im = vec![ParamPoly::zero(); n];
        for (k, c) in self.coeffs.iter().enumerate() {
            // (s + jb)^k = sum_i C(k,i) s^(k-i) (jb)^i
            for i in 0..=k {
                let w = Rational::from_integer(rational::binomial(k as u32, i as u32)) * num_traits::pow(b.clone(), i);
                let term = c.scale(&w);
                let slot = k - i;
                match i % 4 {
                    0 => re[slot] = &re[slot] + &term,
                    1 => im[slot] = &im[slot] + &term,
                    2 => re[slot] = &re[slot] - &term,
                    _ => im[slot] = &im[slot] - &term,
                }
            }
        }
        (SPoly::new(re), SPoly::new(im))
    }

    pub fn derivative(&self) -> SPoly {
        SPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.scale(&rational::int(k as i64)))
                .collect(),
        )
    }

    /// Exact quotient by another polynomial, `None` on a nonzero remainder.
    pub fn div_exact(&self, divisor: &SPoly) -> Option<SPoly> {
        let dd = divisor.degree()?;
        let lead = divisor.leading()?;
        let mut rem = self.clone();
        let Some(rd) = rem.degree() else {
            return Some(SPoly::zero());
        };
        if rd < dd {
            return None;
        }
        let mut quot = vec![ParamPoly::zero(); rd - dd + 1];
        while let Some(rd) = rem.degree() {
            if rd < dd {
                return None;
            }
            let q = rem.coeffs[rd].div_exact(lead)?;
            let t = SPoly::monomial(q.clone(), rd - dd);
            rem = &rem - &(&t * divisor);
            quot[rd - dd] = q;
            if rem.degree() == Some(rd) {
                return None;
            }
        }
        Some(SPoly::new(quot))
    }

    /// Binds every parameter and returns double coefficients.
    pub fn eval_coeffs(&self, binding: &Binding) -> Result<Vec<f64>, AlgebraError> {
        self.coeffs.iter().map(|c| c.eval_f64(binding)).collect()
    }

    pub fn eval_coeffs_exact(&self, binding: &Binding) -> Result<Vec<Rational>, AlgebraError> {
        self.coeffs.iter().map(|c| c.eval_exact(binding)).collect()
    }

    pub fn substitute(&self, binding: &Binding) -> Result<SPoly, AlgebraError> {
        Ok(SPoly::new(
            self.coeffs
                .iter()
                .map(|c| c.substitute(binding))
                .collect::<Result<_, _>>()?,
        ))
    }

    pub fn eval(&self, binding: &Binding, s: Complex64) -> Result<Complex64, AlgebraError> {
        Ok(horner(&self.eval_coeffs(binding)?, s))
    }
}

/// Evaluates `sum c[k] s^k`.
pub fn horner(coeffs: &[f64], s: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::zero(), |acc, &c| acc * s + c)
}

impl fmt::Display for SPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if k == 0 {
                let text = c.to_string();
                if first {
                    f.write_str(&text)?;
                } else if let Some(rest) = text.strip_prefix('-') {
                    write!(f, " - {rest}")?;
                } else {
                    write!(f, " + {text}")?;
                }
                first = false;
                continue;
            }
            let power = if k == 1 { "s".to_string() } else { format!("s^{k}") };
            let body = if c.needs_parens() {
                if !first {
                    f.write_str(" + ")?;
                }
                format!("({c})*{power}")
            } else {
                let neg = c.leading_negative();
                let mag = if neg { -c } else { c.clone() };
                match (first, neg) {
                    (true, true) => f.write_str("-")?,
                    (false, true) => f.write_str(" - ")?,
                    (false, false) => f.write_str(" + ")?,
                    (true, false) => {}
                }
                if mag.is_one() {
                    power
                } else {
                    format!("{mag}*{power}")
                }
            };
            f.write_str(&body)?;
            first = false;
        }
        Ok(())
    }
}

impl<'a> Add<&'a SPoly> for &'a SPoly {
    type Output = SPoly;
    fn add(self, rhs: &SPoly) -> SPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        SPoly::new((0..n).map(|k| &self.coeff(k) + &rhs.coeff(k)).collect())
    }
}

impl<'a> Sub<&'a SPoly> for &'a SPoly {
    type Output = SPoly;
    fn sub(self, rhs: &SPoly) -> SPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        SPoly::new((0..n).map(|k| &self.coeff(k) - &rhs.coeff(k)).collect())
    }
}

impl<'a> Mul<&'a SPoly> for &'a SPoly {
    type Output = SPoly;
    fn mul(self, rhs: &SPoly) -> SPoly {
        if self.is_zero() || rhs.is_zero() {
            return SPoly::zero();
        }
        let mut out = vec![ParamPoly::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        SPoly::new(out)
    }
}

impl Neg for &SPoly {
    type Output = SPoly;
    fn neg(self) -> SPoly {
        SPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr for SPoly {
            type Output = SPoly;
            fn $f(self, rhs: SPoly) -> SPoly {
                (&self).$f(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for SPoly {
    type Output = SPoly;
    fn neg(self) -> SPoly {
        -&self
    }
}

impl From<ParamPoly> for SPoly {
    fn from(c: ParamPoly) -> Self {
        SPoly::constant(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::int;

    fn p(name: &str) -> ParamPoly {
        ParamPoly::var(name)
    }

    #[test]
    fn add_cancels_constants() {
        let a = SPoly::from_ints(&[1, 1]);
        let b = SPoly::from_ints(&[-1, 1]);
        assert_eq!(&a + &b, SPoly::from_ints(&[0, 2]));
        assert_eq!((&a - &a).degree(), None);
    }

    #[test]
    fn binomial_square() {
        let a = SPoly::from_ints(&[1, 1]);
        assert_eq!(&a * &a, SPoly::from_ints(&[1, 2, 1]));
    }

    #[test]
    fn symbolic_product_of_time_constants() {
        let t1 = &p("R1") * &p("C1");
        let t2 = &p("R2") * &p("C2");
        let a = SPoly::new(vec![ParamPoly::one(), t1.clone()]);
        let b = SPoly::new(vec![ParamPoly::one(), t2.clone()]);
        let prod = &a * &b;
        assert_eq!(prod.coeffs(), &[ParamPoly::one(), &t1 + &t2, &t1 * &t2]);
        assert_eq!(prod.degree(), Some(2));
    }

    #[test]
    fn display_grammar() {
        let coeff = &p("K1").scale(&rational::frac(1, 4)) + &ParamPoly::int(3);
        let poly = SPoly::new(vec![ParamPoly::int(-5), ParamPoly::int(-1), coeff, ParamPoly::one()]);
        assert_eq!(poly.to_string(), "s^3 + (0.25*K1 + 3)*s^2 - s - 5");
        assert_eq!(SPoly::from_ints(&[1, 1]).to_string(), "s + 1");
        assert_eq!(SPoly::from_ints(&[0, -2]).to_string(), "-2*s");
        assert_eq!(SPoly::zero().to_string(), "0");
    }

    #[test]
    fn translate_dilate_and_imag_shift() {
        // (s+1)^2 shifted by -1 is s^2
        let sq = SPoly::from_ints(&[1, 2, 1]);
        assert_eq!(sq.translate(&int(-1)), SPoly::from_ints(&[0, 0, 1]));
        assert_eq!(sq.dilate(&int(2)), SPoly::from_ints(&[1, 4, 4]));
        // s^2 + 1 at s + 2j: s^2 + 4js - 4 + 1
        let (re, im) = SPoly::from_ints(&[1, 0, 1]).split_imag_shift(&int(2));
        assert_eq!(re, SPoly::from_ints(&[-3, 0, 1]));
        assert_eq!(im, SPoly::from_ints(&[0, 4]));
    }

    #[test]
    fn exact_division() {
        let a = SPoly::new(vec![p("a"), ParamPoly::one()]);
        let b = SPoly::new(vec![ParamPoly::int(2), p("b")]);
        let prod = &a * &b;
        assert_eq!(prod.div_exact(&a).unwrap(), b);
        assert_eq!(prod.div_exact(&b).unwrap(), a);
        assert!(a.div_exact(&b).is_none());
        assert!(SPoly::from_ints(&[1, 0, 1])
            .div_exact(&SPoly::from_ints(&[1, 1]))
            .is_none());
    }

    #[test]
    fn complex_evaluation() {
        let v = SPoly::from_ints(&[1, 1])
            .eval(&Binding::default(), Complex64::new(0.0, 1.0))
            .unwrap();
        assert_eq!(v, Complex64::new(1.0, 1.0));
    }
}
