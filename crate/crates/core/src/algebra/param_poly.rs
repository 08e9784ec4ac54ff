//! Multivariate polynomials over named parameters with exact rational
//! coefficients.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::binding::Binding;
use super::rational::{self, Rational};
use super::AlgebraError;

/// A power product of parameters, e.g. `K1^2*R2`.
///
/// Factors are sorted by name and carry non-zero exponents. Ordering is
/// graded-lexicographic: total degree first, then exponents compared
/// variable by variable in name order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(String, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(name: &str) -> Self {
        Monomial(vec![(name.to_string(), 1)])
    }

    pub fn from_factors<I, S>(factors: I) -> Self
    where
        I: IntoIterator<Item = (S, u32)>,
        S: Into<String>,
    {
        let mut map: BTreeMap<String, u32> = BTreeMap::new();
        for (name, e) in factors {
            *map.entry(name.into()).or_default() += e;
        }
        Monomial(map.into_iter().filter(|(_, e)| *e > 0).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn factors(&self) -> &[(String, u32)] {
        &self.0
    }

    pub fn exponent(&self, name: &str) -> u32 {
        self.0.iter().find(|(n, _)| n == name).map_or(0, |(_, e)| *e)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// `self / other` when `other` divides `self`.
    fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for (name, e) in &self.0 {
            if j < other.0.len() && other.0[j].0 < *name {
                return None;
            }
            if j < other.0.len() && other.0[j].0 == *name {
                let f = other.0[j].1;
                j += 1;
                match e.cmp(&f) {
                    Ordering::Less => return None,
                    Ordering::Equal => continue,
                    Ordering::Greater => out.push((name.clone(), e - f)),
                }
            } else {
                out.push((name.clone(), *e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .filter_map(|(n, e)| {
                    let f = other.exponent(n);
                    (f > 0).then(|| (n.clone(), (*e).min(f)))
                })
                .collect(),
        )
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.0.get(i), other.0.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((a, ea)), Some((b, eb))) => match a.cmp(b) {
                    // `a` precedes `b`, so `other` has exponent 0 in `a`.
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => {
                        match ea.cmp(eb) {
                            Ordering::Equal => {}
                            ord => return ord,
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (name, e)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{name}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Sparse polynomial in named parameters. The zero polynomial has no terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ParamPoly {
    terms: BTreeMap<Monomial, Rational>,
}

impl ParamPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::term(c, Monomial::one())
    }

    pub fn int(v: i64) -> Self {
        Self::constant(rational::int(v))
    }

    pub fn var(name: &str) -> Self {
        Self::term(Rational::one(), Monomial::var(name))
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        ParamPoly { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(terms: I) -> Self {
        let mut p = ParamPoly::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    /// `Some(c)` when the polynomial is a (possibly zero) constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn variables(&self) -> BTreeSet<String> {
        self.terms
            .keys()
            .flat_map(|m| m.factors().iter().map(|(n, _)| n.clone()))
            .collect()
    }

    pub fn scale(&self, c: &Rational) -> ParamPoly {
        if c.is_zero() {
            return ParamPoly::zero();
        }
        ParamPoly {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> ParamPoly {
        let mut acc = ParamPoly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Exact quotient `self / divisor`, or `None` when the division leaves a
    /// remainder.
    pub fn div_exact(&self, divisor: &ParamPoly) -> Option<ParamPoly> {
        let (lm, lc) = divisor.leading()?;
        if let Some(c) = divisor.as_constant() {
            return Some(self.scale(&(Rational::one() / c)));
        }
        let mut rem = self.clone();
        let mut quot = ParamPoly::zero();
        while let Some((rm, rc)) = rem.leading() {
            let m = rm.div(lm)?;
            let c = rc / lc;
            let t = ParamPoly::term(c, m);
            rem = &rem - &(&t * divisor);
            quot = &quot + &t;
        }
        Some(quot)
    }

    /// Numeric content (gcd of numerators over lcm of denominators, made
    /// positive) and the monomial gcd of all terms.
    pub fn content(&self) -> (Rational, Monomial) {
        let mut it = self.terms.iter();
        let Some((m0, c0)) = it.next() else {
            return (Rational::one(), Monomial::one());
        };
        let mut num = c0.numer().abs();
        let mut den = c0.denom().clone();
        let mut mono = m0.clone();
        for (m, c) in it {
            num = num_integer::Integer::gcd(&num, c.numer());
            den = num_integer::Integer::lcm(&den, c.denom());
            mono = mono.gcd(m);
        }
        (Rational::new(num, den), mono)
    }

    pub fn div_monomial(&self, m: &Monomial) -> Option<ParamPoly> {
        let mut out = BTreeMap::new();
        for (t, c) in &self.terms {
            out.insert(t.div(m)?, c.clone());
        }
        Some(ParamPoly { terms: out })
    }

    /// Evaluates with doubles; every variable must be bound.
    pub fn eval_f64(&self, binding: &Binding) -> Result<f64, AlgebraError> {
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut t = rational::to_f64(c);
            for (name, e) in m.factors() {
                t *= binding.get_f64(name)?.powi(*e as i32);
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Evaluates exactly. Approximate bindings are converted with their exact
    /// binary value.
    pub fn eval_exact(&self, binding: &Binding) -> Result<Rational, AlgebraError> {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (name, e) in m.factors() {
                t *= num_traits::pow(binding.get_exact(name)?, *e as usize);
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Substitutes the bound variables exactly and leaves the rest symbolic.
    pub fn substitute(&self, binding: &Binding) -> Result<ParamPoly, AlgebraError> {
        let mut out = ParamPoly::zero();
        for (m, c) in &self.terms {
            let mut coef = c.clone();
            let mut rest = Vec::new();
            for (name, e) in m.factors() {
                if binding.contains(name) {
                    coef *= num_traits::pow(binding.get_exact(name)?, *e as usize);
                } else {
                    rest.push((name.clone(), *e));
                }
            }
            out.add_term(Monomial::from_factors(rest), coef);
        }
        Ok(out)
    }

    /// True when the top-level rendering has more than one summand.
    pub(crate) fn needs_parens(&self) -> bool {
        self.terms.len() > 1
    }

    /// Sign of the leading printed term, used by the printers.
    pub(crate) fn leading_negative(&self) -> bool {
        self.leading().is_some_and(|(_, c)| c.is_negative())
    }
}

impl fmt::Display for ParamPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if m.is_one() {
                f.write_str(&rational::format(&mag))?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", rational::format(&mag))?;
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a ParamPoly> for &'a ParamPoly {
    type Output = ParamPoly;
    fn add(self, rhs: &ParamPoly) -> ParamPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a ParamPoly> for &'a ParamPoly {
    type Output = ParamPoly;
    fn sub(self, rhs: &ParamPoly) -> ParamPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a ParamPoly> for &'a ParamPoly {
    type Output = ParamPoly;
    fn mul(self, rhs: &ParamPoly) -> ParamPoly {
        let mut out = ParamPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &ParamPoly {
    type Output = ParamPoly;
    fn neg(self) -> ParamPoly {
        ParamPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr for ParamPoly {
            type Output = ParamPoly;
            fn $f(self, rhs: ParamPoly) -> ParamPoly {
                (&self).$f(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for ParamPoly {
    type Output = ParamPoly;
    fn neg(self) -> ParamPoly {
        -&self
    }
}

impl From<Rational> for ParamPoly {
    fn from(c: Rational) -> Self {
        ParamPoly::constant(c)
    }
}

impl From<i64> for ParamPoly {
    fn from(v: i64) -> Self {
        ParamPoly::int(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::frac;

    fn k(n: &str) -> ParamPoly {
        ParamPoly::var(n)
    }

    #[test]
    fn grlex_order() {
        let k1 = Monomial::var("K1");
        let k2 = Monomial::var("K2");
        let k1k2 = Monomial::from_factors([("K1", 1), ("K2", 1)]);
        let k2sq = Monomial::from_factors([("K2", 2)]);
        assert!(k1 > k2);
        assert!(k1k2 > k1);
        assert!(k1k2 > k2sq);
        assert!(Monomial::one() < k2);
        assert_eq!(Monomial::from_factors([("K1", 1), ("K1", 1)]).degree(), 2);
    }

    #[test]
    fn arithmetic_and_display() {
        let p = &(&k("K1").scale(&frac(1, 4)) + &k("K2").scale(&frac(1088, 10000)))
            + &ParamPoly::constant(frac(6106, 10000));
        assert_eq!(p.to_string(), "0.25*K1 + 0.1088*K2 + 0.6106");
        let sq = &(&k("a") + &ParamPoly::one()) * &(&k("a") - &ParamPoly::one());
        assert_eq!(sq.to_string(), "a^2 - 1");
        assert!((&p - &p).is_zero());
        assert_eq!((-&k("x")).to_string(), "-x");
    }

    #[test]
    fn exact_division() {
        let a = &k("a") + &ParamPoly::one();
        let b = &k("b") - &k("a");
        let prod = &a * &b;
        assert_eq!(prod.div_exact(&a).unwrap(), b);
        assert_eq!(prod.div_exact(&b).unwrap(), a);
        assert!(a.div_exact(&b).is_none());
        assert_eq!(k("a").div_exact(&ParamPoly::int(2)).unwrap(), k("a").scale(&frac(1, 2)));
    }

    #[test]
    fn content_and_constants() {
        let p = &k("R1").scale(&frac(2, 3)) * &k("C1");
        let q = &p + &k("R1").scale(&frac(4, 9));
        let (c, m) = q.content();
        assert_eq!(c, frac(2, 9));
        assert_eq!(m, Monomial::var("R1"));
        assert_eq!(ParamPoly::zero().as_constant(), Some(Rational::zero()));
        assert!(k("x").as_constant().is_none());
    }
}
