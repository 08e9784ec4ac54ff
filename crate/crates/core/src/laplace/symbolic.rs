//! Rule-based symbolic Laplace transform.

use num_traits::{One, Zero};

use super::expr::TimeExpr;
use super::LaplaceError;
use crate::algebra::rational::{self, Rational};
use crate::algebra::{ParamPoly, SPoly, TransferFunction};

/// `F(s)` together with the abscissa it is claimed valid above.
///
/// `roc` is the bound propagated by the rules, not necessarily the tight
/// abscissa; it is `-inf` for the zero signal.
#[derive(Clone, Debug, PartialEq)]
pub struct LaplaceResult {
    pub tf: TransferFunction,
    pub roc: f64,
}

/// `f(0), f'(0), ..., f^(k-1)(0)` for one derivative node.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct InitialValues(pub Vec<Rational>);

#[derive(Clone, Debug, PartialEq, Default)]
pub enum InitPolicy {
    /// All initial values are zero.
    #[default]
    Zero,
    /// One entry per `Deriv` node, in depth-first pre-order.
    Explicit(Vec<InitialValues>),
}

impl InitPolicy {
    /// Initial values read off the signal itself, making the differentiation
    /// rule exact for continuous signals.
    pub fn from_signal(f: &TimeExpr) -> InitPolicy {
        InitPolicy::Explicit(
            f.derivative_nodes()
                .into_iter()
                .map(|(k, g)| {
                    let g = g.expand_derivatives();
                    let mut vals = Vec::with_capacity(k as usize);
                    let mut cur = g;
                    for _ in 0..k {
                        vals.push(cur.value_at_zero());
                        cur = cur.derivative();
                    }
                    InitialValues(vals)
                })
                .collect(),
        )
    }
}

struct Ctx<'a> {
    policy: &'a InitPolicy,
    next_deriv: usize,
}

pub fn laplace_symbolic(f: &TimeExpr, policy: &InitPolicy) -> Result<LaplaceResult, LaplaceError> {
    f.validate()?;
    let mut ctx = Ctx { policy, next_deriv: 0 };
    let out = transform(f, &mut ctx)?;
    if let InitPolicy::Explicit(list) = policy {
        if ctx.next_deriv != list.len() {
            return Err(LaplaceError::InitialValuesMismatch(format!(
                "{} derivative node(s) but {} initial-value list(s)",
                ctx.next_deriv,
                list.len()
            )));
        }
    }
    Ok(LaplaceResult {
        tf: out.tf.remove_content(),
        roc: out.roc,
    })
}

fn zero() -> LaplaceResult {
    LaplaceResult {
        tf: TransferFunction::zero(),
        roc: f64::NEG_INFINITY,
    }
}

fn rat_tf(num: SPoly, den: SPoly, roc: f64) -> LaplaceResult {
    LaplaceResult {
        tf: TransferFunction::new(num, den).expect("rule denominators are nonzero"),
        roc,
    }
}

fn c(r: Rational) -> ParamPoly {
    ParamPoly::constant(r)
}

fn with_delay(num: SPoly, den: SPoly, delay: f64, roc: f64) -> LaplaceResult {
    LaplaceResult {
        tf: TransferFunction::with_delay(num, den, delay).expect("rule denominators are nonzero"),
        roc,
    }
}

fn require_delay_free(r: &LaplaceResult, rule: &str) -> Result<(), LaplaceError> {
    if r.tf.delay() != 0.0 {
        return Err(LaplaceError::NonRationalResult(format!(
            "{rule} of a time-shifted signal has no rational transform"
        )));
    }
    Ok(())
}

fn add(a: LaplaceResult, b: LaplaceResult) -> Result<LaplaceResult, LaplaceError> {
    if a.tf.is_zero() {
        return Ok(b);
    }
    if b.tf.is_zero() {
        return Ok(a);
    }
    if a.tf.delay() != b.tf.delay() {
        return Err(LaplaceError::NonRationalResult(format!(
            "sum of signals shifted by {} and {}",
            a.tf.delay(),
            b.tf.delay()
        )));
    }
    let roc = a.roc.max(b.roc);
    if a.tf.den() == b.tf.den() {
        return Ok(with_delay(
            a.tf.num() + b.tf.num(),
            a.tf.den().clone(),
            a.tf.delay(),
            roc,
        ));
    }
    Ok(LaplaceResult {
        tf: a.tf.add(&b.tf)?,
        roc,
    })
}

fn transform(f: &TimeExpr, ctx: &mut Ctx<'_>) -> Result<LaplaceResult, LaplaceError> {
    use TimeExpr::*;
    Ok(match f {
        Const(v) if v.is_zero() => zero(),
        // c / s
        Const(v) => rat_tf(SPoly::constant(c(v.clone())), SPoly::s(), 0.0),
        // n! / s^(n+1)
        Power(n) => rat_tf(
            SPoly::constant(c(rational::factorial(*n))),
            SPoly::monomial(ParamPoly::one(), *n as usize + 1),
            0.0,
        ),
        // 1 / (s - a)
        Exp(a) => rat_tf(
            SPoly::one(),
            SPoly::new(vec![c(-a.clone()), ParamPoly::one()]),
            rational::to_f64(a),
        ),
        Sin(w) if w.is_zero() => zero(),
        // w / (s^2 + w^2)
        Sin(w) => rat_tf(
            SPoly::constant(c(w.clone())),
            SPoly::new(vec![c(w * w), ParamPoly::zero(), ParamPoly::one()]),
            0.0,
        ),
        // s / (s^2 + w^2)
        Cos(w) => rat_tf(
            SPoly::s(),
            SPoly::new(vec![c(w * w), ParamPoly::zero(), ParamPoly::one()]),
            0.0,
        ),
        Scale(k, g) => {
            let inner = transform(g, ctx)?;
            if k.is_zero() || inner.tf.is_zero() {
                return Ok(zero());
            }
            LaplaceResult {
                tf: inner.tf.scale(&c(k.clone())),
                roc: inner.roc,
            }
        }
        Add(g, h) => {
            let a = transform(g, ctx)?;
            let b = transform(h, ctx)?;
            add(a, b)?
        }
        // F(s - a)
        ExpMul(a, g) => {
            let inner = transform(g, ctx)?;
            if inner.tf.is_zero() {
                return Ok(zero());
            }
            require_delay_free(&inner, "exponential weighting")?;
            let shift = -a.clone();
            rat_tf(
                inner.tf.num().translate(&shift),
                inner.tf.den().translate(&shift),
                inner.roc + rational::to_f64(a),
            )
        }
        // e^(-a s) F(s)
        ShiftRight(a, g) => {
            let inner = transform(g, ctx)?;
            if inner.tf.is_zero() {
                return Ok(zero());
            }
            LaplaceResult {
                tf: inner.tf.add_delay(rational::to_f64(a))?,
                roc: inner.roc,
            }
        }
        // (1/c) F(s/c); a delay d becomes d/c
        TimeScale(k, g) => {
            let inner = transform(g, ctx)?;
            if inner.tf.is_zero() {
                return Ok(zero());
            }
            let inv = Rational::one() / k;
            with_delay(
                inner.tf.num().dilate(&inv).scale_rational(&inv),
                inner.tf.den().dilate(&inv),
                inner.tf.delay() / rational::to_f64(k),
                inner.roc * rational::to_f64(k),
            )
        }
        // (F(s - jb) + F(s + jb)) / 2 = (Nr Dr + Ni Di) / (Dr^2 + Di^2)
        ModCos(b, g) => {
            let inner = transform(g, ctx)?;
            if inner.tf.is_zero() {
                return Ok(zero());
            }
            require_delay_free(&inner, "cosine modulation")?;
            let (nr, ni) = inner.tf.num().split_imag_shift(b);
            let (dr, di) = inner.tf.den().split_imag_shift(b);
            rat_tf(&(&nr * &dr) + &(&ni * &di), &(&dr * &dr) + &(&di * &di), inner.roc)
        }
        // (F(s - jb) - F(s + jb)) / 2j = (Nr Di - Ni Dr) / (Dr^2 + Di^2)
        ModSin(b, g) => {
            let inner = transform(g, ctx)?;
            if inner.tf.is_zero() || b.is_zero() {
                return Ok(zero());
            }
            require_delay_free(&inner, "sine modulation")?;
            let (nr, ni) = inner.tf.num().split_imag_shift(b);
            let (dr, di) = inner.tf.den().split_imag_shift(b);
            let num = &(&nr * &di) - &(&ni * &dr);
            if num.is_zero() {
                return Ok(zero());
            }
            rat_tf(num, &(&dr * &dr) + &(&di * &di), inner.roc)
        }
        // s^k F(s) - sum_{i<k} s^(k-1-i) f^(i)(0)
        Deriv(k, g) => {
            let slot = ctx.next_deriv;
            ctx.next_deriv += 1;
            let inner = transform(g, ctx)?;
            let k = *k as usize;
            let correction = match ctx.policy {
                InitPolicy::Zero => SPoly::zero(),
                InitPolicy::Explicit(list) => {
                    let iv = list.get(slot).ok_or_else(|| {
                        LaplaceError::InitialValuesMismatch(format!("no initial values for derivative node {slot}"))
                    })?;
                    if iv.0.len() != k {
                        return Err(LaplaceError::InitialValuesMismatch(format!(
                            "derivative node {slot} has order {k} but {} initial value(s)",
                            iv.0.len()
                        )));
                    }
                    SPoly::new((0..k).map(|j| c(iv.0[k - 1 - j].clone())).collect())
                }
            };
            if !correction.is_zero() && inner.tf.delay() != 0.0 {
                return Err(LaplaceError::NonRationalResult(
                    "initial-value correction of a time-shifted signal".into(),
                ));
            }
            let num = &inner.tf.num().shift_up(k) - &(&correction * inner.tf.den());
            if num.is_zero() {
                return Ok(zero());
            }
            with_delay(num, inner.tf.den().clone(), inner.tf.delay(), inner.roc)
        }
        // F(s) / s
        Integ(g) => {
            let inner = transform(g, ctx)?;
            if inner.tf.is_zero() {
                return Ok(zero());
            }
            with_delay(
                inner.tf.num().clone(),
                inner.tf.den().shift_up(1),
                inner.tf.delay(),
                inner.roc.max(0.0),
            )
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_tf, Binding};
    use num_complex::Complex64;

    fn lap(s: &str) -> LaplaceResult {
        laplace_symbolic(&s.parse().unwrap(), &InitPolicy::Zero).unwrap()
    }

    fn is(s: &str, tf: &str, roc: f64) {
        let r = lap(s);
        assert!(r.tf.equals(&parse_tf(tf).unwrap()), "{s}: got {}, want {tf}", r.tf);
        assert_eq!(r.roc, roc, "{s}");
    }

    #[test]
    fn base_cases() {
        is("(const 1)", "1/s", 0.0);
        is("(exp 3)", "1/(s - 3)", 3.0);
        is("(pow 3)", "6/s^4", 0.0);
        is("(sin 2)", "2/(s^2 + 4)", 0.0);
        is("(cos 2)", "s/(s^2 + 4)", 0.0);
        let z = lap("(const 0)");
        assert!(z.tf.is_zero());
        assert_eq!(z.tf.den(), &SPoly::one());
        assert_eq!(z.roc, f64::NEG_INFINITY);
    }

    #[test]
    fn property_rules() {
        is("(expmul -1 (sin 2))", "2/((s + 1)^2 + 4)", -1.0);
        is("(shift 1 (const 1))", "exp(-1*s)/s", 0.0);
        is("(tscale 2 (exp 1))", "1/(s - 2)", 2.0);
        is("(tscale 2 (shift 1 (const 1)))", "exp(-0.5*s)/s", 0.0);
        is("(modcos 2 (const 1))", "s/(s^2 + 4)", 0.0);
        is("(modsin 3 (const 1))", "3/(s^2 + 9)", 0.0);
        is("(modcos 1 (exp -1))", "(s + 1)/((s + 1)^2 + 1)", -1.0);
        is("(modsin 2 (pow 1))", "4*s/(s^2 + 4)^2", 0.0);
        is("(integ (exp 2))", "1/(s*(s - 2))", 2.0);
        is("(integ (exp -2))", "1/(s*(s + 2))", 0.0);
        is("(deriv 1 (integ (cos 1)))", "s/(s^2 + 1)", 0.0);
        is(
            "(add (scale 3 (exp -1)) (modcos 2 (pow 1)))",
            "3/(s + 1) + (s^2 - 4)/(s^2 + 4)^2",
            0.0,
        );
    }

    #[test]
    fn derivative_rules() {
        // zero initial conditions: s^2 F
        is("(deriv 2 (exp 1))", "s^2/(s - 1)", 1.0);
        let f: TimeExpr = "(deriv 2 (exp 1))".parse().unwrap();
        // true initial values f(0) = 1, f'(0) = 1 give L{e^t} back
        let exact = laplace_symbolic(&f, &InitPolicy::from_signal(&f)).unwrap();
        assert!(exact.tf.equals(&parse_tf("1/(s - 1)").unwrap()));
        let wrong = InitPolicy::Explicit(vec![InitialValues(vec![Rational::one()])]);
        assert!(matches!(
            laplace_symbolic(&f, &wrong),
            Err(LaplaceError::InitialValuesMismatch(_))
        ));
        assert!(matches!(
            laplace_symbolic(&f, &InitPolicy::Explicit(vec![])),
            Err(LaplaceError::InitialValuesMismatch(_))
        ));
    }

    #[test]
    fn rejects_non_rational_compositions() {
        for s in [
            "(modcos 1 (shift 1 (const 1)))",
            "(modsin 1 (shift 1 (const 1)))",
            "(expmul 1 (shift 1 (const 1)))",
            "(add (const 1) (shift 1 (const 1)))",
        ] {
            assert!(
                matches!(
                    laplace_symbolic(&s.parse().unwrap(), &InitPolicy::Zero),
                    Err(LaplaceError::NonRationalResult(_))
                ),
                "{s}"
            );
        }
    }

    #[test]
    fn shifted_step_value() {
        let r = lap("(shift 1 (const 1))");
        let v = r.tf.eval(&Binding::default(), Complex64::new(1.0, 0.0)).unwrap();
        assert!((v.re - (-1f64).exp()).abs() < 1e-15);
        assert!((v.re - 0.36788).abs() < 1e-5);
    }
}
