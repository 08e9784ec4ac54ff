//! Routh-Hurwitz test in exact arithmetic.
//!
//! A zero pivot is replaced by a symbolic `eps`, so later entries are
//! rational functions of `eps` and their signs are read as `eps -> 0+`. An
//! all-zero row is replaced by the derivative of the auxiliary polynomial
//! formed from the row above it.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::Serialize;

use super::MarginError;
use crate::algebra::{Binding, Rational, SPoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Stable,
    Marginal,
    Unstable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RouthResult {
    pub verdict: Verdict,
    /// Sign changes down the first column.
    pub sign_changes: usize,
    /// A zero pivot was replaced by `eps`.
    pub used_epsilon: bool,
    /// An all-zero row was replaced by an auxiliary derivative.
    pub used_auxiliary: bool,
}

/// `num(eps) / den(eps)`, coefficients indexed by power of `eps`.
#[derive(Clone, Debug, PartialEq)]
struct EpsFrac {
    num: Vec<Rational>,
    den: Vec<Rational>,
}

fn trim(mut v: Vec<Rational>) -> Vec<Rational> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn poly_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    trim(out)
}

/// Sign of the lowest-order coefficient: the sign as `eps -> 0+`.
fn limit_sign(p: &[Rational]) -> i32 {
    match p.iter().find(|c| !c.is_zero()) {
        Some(c) if c.is_positive() => 1,
        Some(_) => -1,
        None => 0,
    }
}

impl EpsFrac {
    fn constant(c: Rational) -> Self {
        EpsFrac {
            num: trim(vec![c]),
            den: vec![Rational::from_integer(1.into())],
        }
    }

    fn eps() -> Self {
        EpsFrac {
            num: vec![Rational::zero(), Rational::from_integer(1.into())],
            den: vec![Rational::from_integer(1.into())],
        }
    }

    fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    fn sign(&self) -> i32 {
        limit_sign(&self.num) * limit_sign(&self.den)
    }

    fn scale(&self, c: &Rational) -> Self {
        EpsFrac {
            num: trim(self.num.iter().map(|x| x * c).collect()),
            den: self.den.clone(),
        }
    }

    /// `(a d - b c) / a` for the 2x2 Routh cross product, reduced by the
    /// common power of `eps`.
    fn routh(a: &EpsFrac, b: &EpsFrac, c: &EpsFrac, d: &EpsFrac) -> EpsFrac {
        // a d - b c over a common denominator, then divided by a
        let ad = poly_mul(&a.num, &d.num);
        let ad_den = poly_mul(&a.den, &d.den);
        let bc = poly_mul(&b.num, &c.num);
        let bc_den = poly_mul(&b.den, &c.den);
        let diff = poly_sub(&poly_mul(&ad, &bc_den), &poly_mul(&bc, &ad_den));
        let den = poly_mul(&ad_den, &bc_den);
        let num = poly_mul(&diff, &a.den);
        let den = poly_mul(&den, &a.num);
        reduce(num, den)
    }
}

/// Removes a common `eps^k` and a common rational scale.
fn reduce(num: Vec<Rational>, den: Vec<Rational>) -> EpsFrac {
    if num.is_empty() {
        return EpsFrac::constant(Rational::zero());
    }
    let lowest = |p: &[Rational]| p.iter().position(|c| !c.is_zero()).unwrap_or(0);
    let k = lowest(&num).min(lowest(&den));
    let (num, den) = (num[k..].to_vec(), den[k..].to_vec());
    let lead = den.iter().find(|c| !c.is_zero()).expect("denominator is nonzero").abs();
    EpsFrac {
        num: num.iter().map(|c| c / &lead).collect(),
        den: den.iter().map(|c| c / &lead).collect(),
    }
}

/// Stability of the roots of `den` under `binding`.
pub fn routh_stability(den: &SPoly, binding: &Binding) -> Result<RouthResult, MarginError> {
    let coeffs = den.eval_coeffs_exact(binding)?;
    routh_exact(&coeffs)
}

/// Routh array of `sum c_k s^k`.
pub fn routh_exact(coeffs: &[Rational]) -> Result<RouthResult, MarginError> {
    let c = coeffs;
    let Some(n) = c.len().checked_sub(1) else {
        return Err(MarginError::ZeroLeadingCoefficient);
    };
    if c[n].is_zero() {
        return Err(MarginError::ZeroLeadingCoefficient);
    }
    let width = n / 2 + 1;
    let row_from = |start: usize| -> Vec<EpsFrac> {
        (0..width)
            .map(|j| {
                let power = n as isize - start as isize - 2 * j as isize;
                EpsFrac::constant(if power >= 0 {
                    c[power as usize].clone()
                } else {
                    Rational::zero()
                })
            })
            .collect()
    };
    let mut rows = vec![row_from(0)];
    if n >= 1 {
        rows.push(row_from(1));
    }
    let (mut used_epsilon, mut used_auxiliary) = (false, false);
    let zero = EpsFrac::constant(Rational::zero());
    for i in 1..=n {
        if rows[i].iter().all(EpsFrac::is_zero) {
            // auxiliary polynomial of the row above has order n - i + 1
            let order = (n + 1 - i) as i64;
            let above = rows[i - 1].clone();
            rows[i] = above
                .iter()
                .enumerate()
                .map(|(j, e)| e.scale(&Rational::from_integer((order - 2 * j as i64).max(0).into())))
                .collect();
            used_auxiliary = true;
        }
        if rows[i][0].is_zero() {
            rows[i][0] = EpsFrac::eps();
            used_epsilon = true;
        }
        if i == n {
            break;
        }
        let (up, cur) = (&rows[i - 1], &rows[i]);
        let next: Vec<EpsFrac> = (0..width)
            .map(|j| {
                let b = up.get(j + 1).unwrap_or(&zero);
                let d = cur.get(j + 1).unwrap_or(&zero);
                EpsFrac::routh(&cur[0], &up[0], d, b)
            })
            .collect();
        rows.push(next);
    }
    let signs: Vec<i32> = rows.iter().map(|r| r[0].sign()).collect();
    let sign_changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
    let verdict = if sign_changes > 0 {
        Verdict::Unstable
    } else if used_epsilon || used_auxiliary {
        Verdict::Marginal
    } else {
        Verdict::Stable
    };
    Ok(RouthResult {
        verdict,
        sign_changes,
        used_epsilon,
        used_auxiliary,
    })
}
