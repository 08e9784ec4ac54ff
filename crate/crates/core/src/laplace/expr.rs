//! Time-domain signal expressions and their s-expression syntax.
//!
//! ```text
//! (const c) (pow n) (exp a) (sin w) (cos w)
//! (scale c f) (add f g ...) (expmul a f) (shift a f) (tscale c f)
//! (modcos b f) (modsin b f) (deriv k f) (integ f)
//! ```
//! A bare number is shorthand for `(const c)`. Numbers accept the same
//! literal forms as the algebra grammar (`3`, `-0.5`, `1/3`, `2e-3`).

use std::fmt;

use num_traits::{Signed, ToPrimitive, Zero};

use super::LaplaceError;
use crate::algebra::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq)]
pub enum TimeExpr {
    Const(Rational),
    /// `t^n`
    Power(u32),
    /// `e^(a t)`
    Exp(Rational),
    /// `sin(w t)`
    Sin(Rational),
    /// `cos(w t)`
    Cos(Rational),
    Scale(Rational, Box<TimeExpr>),
    Add(Box<TimeExpr>, Box<TimeExpr>),
    /// `e^(a t) f(t)`
    ExpMul(Rational, Box<TimeExpr>),
    /// `f(t - a) u(t - a)`, `a > 0`
    ShiftRight(Rational, Box<TimeExpr>),
    /// `f(c t)`, `c > 0`
    TimeScale(Rational, Box<TimeExpr>),
    /// `cos(b t) f(t)`
    ModCos(Rational, Box<TimeExpr>),
    /// `sin(b t) f(t)`
    ModSin(Rational, Box<TimeExpr>),
    /// k-th time derivative, `k >= 1`
    Deriv(u32, Box<TimeExpr>),
    /// `integral_0^t f`
    Integ(Box<TimeExpr>),
}

use TimeExpr::*;

impl TimeExpr {
    pub fn constant(c: Rational) -> Self {
        Const(c)
    }

    pub fn scale(c: Rational, f: TimeExpr) -> Self {
        Scale(c, Box::new(f))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(f: TimeExpr, g: TimeExpr) -> Self {
        Add(Box::new(f), Box::new(g))
    }

    pub fn exp_mul(a: Rational, f: TimeExpr) -> Self {
        ExpMul(a, Box::new(f))
    }

    pub fn shift(a: Rational, f: TimeExpr) -> Result<Self, LaplaceError> {
        if !a.is_positive() {
            return Err(LaplaceError::InvalidExpr(format!(
                "shift amount must be positive, got {a}"
            )));
        }
        Ok(ShiftRight(a, Box::new(f)))
    }

    pub fn time_scale(c: Rational, f: TimeExpr) -> Result<Self, LaplaceError> {
        if !c.is_positive() {
            return Err(LaplaceError::InvalidExpr(format!(
                "time scale must be positive, got {c}"
            )));
        }
        Ok(TimeScale(c, Box::new(f)))
    }

    pub fn mod_cos(b: Rational, f: TimeExpr) -> Self {
        ModCos(b, Box::new(f))
    }

    pub fn mod_sin(b: Rational, f: TimeExpr) -> Self {
        ModSin(b, Box::new(f))
    }

    pub fn deriv(k: u32, f: TimeExpr) -> Result<Self, LaplaceError> {
        if k == 0 {
            return Err(LaplaceError::InvalidExpr("derivative order must be at least 1".into()));
        }
        Ok(Deriv(k, Box::new(f)))
    }

    pub fn integ(f: TimeExpr) -> Self {
        Integ(Box::new(f))
    }

    /// Checks the structural invariants of a hand-built tree.
    pub fn validate(&self) -> Result<(), LaplaceError> {
        match self {
            Const(_) | Power(_) | Exp(_) | Sin(_) | Cos(_) => Ok(()),
            ShiftRight(a, f) => {
                if !a.is_positive() {
                    return Err(LaplaceError::InvalidExpr(format!(
                        "shift amount must be positive, got {a}"
                    )));
                }
                f.validate()
            }
            TimeScale(c, f) => {
                if !c.is_positive() {
                    return Err(LaplaceError::InvalidExpr(format!(
                        "time scale must be positive, got {c}"
                    )));
                }
                f.validate()
            }
            Deriv(k, f) => {
                if *k == 0 {
                    return Err(LaplaceError::InvalidExpr("derivative order must be at least 1".into()));
                }
                f.validate()
            }
            Add(f, g) => {
                f.validate()?;
                g.validate()
            }
            Scale(_, f) | ExpMul(_, f) | ModCos(_, f) | ModSin(_, f) | Integ(f) => f.validate(),
        }
    }

    /// Pointwise time derivative. Jumps of shifted signals (a Dirac term
    /// when `f(0) != 0`) are not represented.
    pub fn derivative(&self) -> TimeExpr {
        let zero = || Const(Rational::zero());
        match self {
            Const(_) => zero(),
            Power(0) => zero(),
            Power(n) => TimeExpr::scale(rational::int(*n as i64), Power(n - 1)),
            Exp(a) => TimeExpr::scale(a.clone(), Exp(a.clone())),
            Sin(w) => TimeExpr::scale(w.clone(), Cos(w.clone())),
            Cos(w) => TimeExpr::scale(-w.clone(), Sin(w.clone())),
            Scale(c, f) => TimeExpr::scale(c.clone(), f.derivative()),
            Add(f, g) => TimeExpr::add(f.derivative(), g.derivative()),
            ExpMul(a, f) => TimeExpr::add(
                TimeExpr::scale(a.clone(), self.clone()),
                TimeExpr::exp_mul(a.clone(), f.derivative()),
            ),
            ShiftRight(a, f) => ShiftRight(a.clone(), Box::new(f.derivative())),
            TimeScale(c, f) => TimeExpr::scale(c.clone(), TimeScale(c.clone(), Box::new(f.derivative()))),
            ModCos(b, f) => TimeExpr::add(
                TimeExpr::scale(-b.clone(), ModSin(b.clone(), f.clone())),
                ModCos(b.clone(), Box::new(f.derivative())),
            ),
            ModSin(b, f) => TimeExpr::add(
                TimeExpr::scale(b.clone(), ModCos(b.clone(), f.clone())),
                ModSin(b.clone(), Box::new(f.derivative())),
            ),
            Deriv(k, f) => f.nth_derivative(k + 1),
            Integ(f) => f.expand_derivatives(),
        }
    }

    pub fn nth_derivative(&self, k: u32) -> TimeExpr {
        let mut out = self.expand_derivatives();
        for _ in 0..k {
            out = out.derivative();
        }
        out
    }

    /// Replaces every `Deriv` node by its explicit derivative tree.
    pub fn expand_derivatives(&self) -> TimeExpr {
        match self {
            Const(_) | Power(_) | Exp(_) | Sin(_) | Cos(_) => self.clone(),
            Scale(c, f) => Scale(c.clone(), Box::new(f.expand_derivatives())),
            Add(f, g) => TimeExpr::add(f.expand_derivatives(), g.expand_derivatives()),
            ExpMul(a, f) => ExpMul(a.clone(), Box::new(f.expand_derivatives())),
            ShiftRight(a, f) => ShiftRight(a.clone(), Box::new(f.expand_derivatives())),
            TimeScale(c, f) => TimeScale(c.clone(), Box::new(f.expand_derivatives())),
            ModCos(b, f) => ModCos(b.clone(), Box::new(f.expand_derivatives())),
            ModSin(b, f) => ModSin(b.clone(), Box::new(f.expand_derivatives())),
            Deriv(k, f) => f.nth_derivative(*k),
            Integ(f) => Integ(Box::new(f.expand_derivatives())),
        }
    }

    /// Exact value at `t = 0` (right limit).
    pub fn value_at_zero(&self) -> Rational {
        match self {
            Const(c) => c.clone(),
            Power(0) | Exp(_) | Cos(_) => rational::int(1),
            Power(_) | Sin(_) | ShiftRight(..) | Integ(_) | ModSin(..) => Rational::zero(),
            Scale(c, f) => c * f.value_at_zero(),
            Add(f, g) => f.value_at_zero() + g.value_at_zero(),
            ExpMul(_, f) | TimeScale(_, f) | ModCos(_, f) => f.value_at_zero(),
            Deriv(k, f) => f.nth_derivative(*k).value_at_zero(),
        }
    }

    /// Evaluates the signal at `t >= 0`. Integrals are computed numerically.
    pub fn eval(&self, t: f64) -> f64 {
        let r = rational::to_f64;
        match self {
            Const(c) => r(c),
            Power(n) => t.powi(*n as i32),
            Exp(a) => (r(a) * t).exp(),
            Sin(w) => (r(w) * t).sin(),
            Cos(w) => (r(w) * t).cos(),
            Scale(c, f) => r(c) * f.eval(t),
            Add(f, g) => f.eval(t) + g.eval(t),
            ExpMul(a, f) => (r(a) * t).exp() * f.eval(t),
            ShiftRight(a, f) => {
                let a = r(a);
                if t < a {
                    0.0
                } else {
                    f.eval(t - a)
                }
            }
            TimeScale(c, f) => f.eval(r(c) * t),
            ModCos(b, f) => (r(b) * t).cos() * f.eval(t),
            ModSin(b, f) => (r(b) * t).sin() * f.eval(t),
            Deriv(k, f) => f.nth_derivative(*k).eval(t),
            Integ(f) => super::quad::integrate_signal(f, t),
        }
    }

    /// Points in `(0, inf)` where the signal may jump or kink.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.collect_breakpoints(0.0, 1.0, &mut out);
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    // A breakpoint `p` of a subexpression evaluated at `(t - offset) * rate`
    // sits at `t = p / rate + offset`.
    fn collect_breakpoints(&self, offset: f64, rate: f64, out: &mut Vec<f64>) {
        let r = rational::to_f64;
        match self {
            Const(_) | Power(_) | Exp(_) | Sin(_) | Cos(_) => {}
            ShiftRight(a, f) => {
                let at = offset + r(a) / rate;
                out.push(at);
                f.collect_breakpoints(at, rate, out);
            }
            TimeScale(c, f) => f.collect_breakpoints(offset, rate * r(c), out),
            Add(f, g) => {
                f.collect_breakpoints(offset, rate, out);
                g.collect_breakpoints(offset, rate, out);
            }
            Scale(_, f) | ExpMul(_, f) | ModCos(_, f) | ModSin(_, f) | Deriv(_, f) | Integ(f) => {
                f.collect_breakpoints(offset, rate, out)
            }
        }
    }

    /// Largest angular frequency appearing anywhere, after time scaling.
    pub fn max_frequency(&self) -> f64 {
        let r = |x: &Rational| rational::to_f64(x).abs();
        match self {
            Const(_) | Power(_) | Exp(_) => 0.0,
            Sin(w) | Cos(w) => r(w),
            TimeScale(c, f) => r(c) * f.max_frequency(),
            Add(f, g) => f.max_frequency().max(g.max_frequency()),
            ModCos(b, f) | ModSin(b, f) => r(b) + f.max_frequency(),
            Scale(_, f) | ExpMul(_, f) | ShiftRight(_, f) | Deriv(_, f) | Integ(f) => f.max_frequency(),
        }
    }

    /// `Deriv` nodes in depth-first pre-order.
    pub fn derivative_nodes(&self) -> Vec<(u32, &TimeExpr)> {
        let mut out = Vec::new();
        self.walk_derivs(&mut out);
        out
    }

    fn walk_derivs<'a>(&'a self, out: &mut Vec<(u32, &'a TimeExpr)>) {
        match self {
            Const(_) | Power(_) | Exp(_) | Sin(_) | Cos(_) => {}
            Deriv(k, f) => {
                out.push((*k, f));
                f.walk_derivs(out);
            }
            Add(f, g) => {
                f.walk_derivs(out);
                g.walk_derivs(out);
            }
            Scale(_, f)
            | ExpMul(_, f)
            | ShiftRight(_, f)
            | TimeScale(_, f)
            | ModCos(_, f)
            | ModSin(_, f)
            | Integ(f) => f.walk_derivs(out),
        }
    }
}

impl fmt::Display for TimeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = rational::format;
        match self {
            Const(c) => write!(f, "(const {})", n(c)),
            Power(k) => write!(f, "(pow {k})"),
            Exp(a) => write!(f, "(exp {})", n(a)),
            Sin(w) => write!(f, "(sin {})", n(w)),
            Cos(w) => write!(f, "(cos {})", n(w)),
            Scale(c, g) => write!(f, "(scale {} {g})", n(c)),
            Add(a, b) => write!(f, "(add {a} {b})"),
            ExpMul(a, g) => write!(f, "(expmul {} {g})", n(a)),
            ShiftRight(a, g) => write!(f, "(shift {} {g})", n(a)),
            TimeScale(c, g) => write!(f, "(tscale {} {g})", n(c)),
            ModCos(b, g) => write!(f, "(modcos {} {g})", n(b)),
            ModSin(b, g) => write!(f, "(modsin {} {g})", n(b)),
            Deriv(k, g) => write!(f, "(deriv {k} {g})"),
            Integ(g) => write!(f, "(integ {g})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Sexp {
    Atom(String, usize),
    List(Vec<Sexp>, usize),
}

fn read_sexp(text: &str) -> Result<Sexp, LaplaceError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut pos = 0;
    let out = read_one(&chars, &mut pos, text.len())?;
    skip_ws(&chars, &mut pos);
    if pos < chars.len() {
        return Err(syntax(chars[pos].0, "unexpected trailing input"));
    }
    Ok(out)
}

fn syntax(pos: usize, msg: &str) -> LaplaceError {
    LaplaceError::Syntax {
        pos,
        msg: msg.to_string(),
    }
}

fn skip_ws(chars: &[(usize, char)], pos: &mut usize) {
    while *pos < chars.len() && chars[*pos].1.is_whitespace() {
        *pos += 1;
    }
}

fn read_one(chars: &[(usize, char)], pos: &mut usize, end: usize) -> Result<Sexp, LaplaceError> {
    skip_ws(chars, pos);
    let Some(&(at, c)) = chars.get(*pos) else {
        return Err(syntax(end, "unexpected end of input"));
    };
    match c {
        '(' => {
            *pos += 1;
            let mut items = Vec::new();
            loop {
                skip_ws(chars, pos);
                match chars.get(*pos) {
                    None => return Err(syntax(end, "missing `)`")),
                    Some((_, ')')) => {
                        *pos += 1;
                        return Ok(Sexp::List(items, at));
                    }
                    _ => items.push(read_one(chars, pos, end)?),
                }
            }
        }
        ')' => Err(syntax(at, "unexpected `)`")),
        _ => {
            let start = *pos;
            while *pos < chars.len() && !chars[*pos].1.is_whitespace() && !"()".contains(chars[*pos].1) {
                *pos += 1;
            }
            let s: String = chars[start..*pos].iter().map(|(_, c)| c).collect();
            Ok(Sexp::Atom(s, at))
        }
    }
}

fn number(s: &Sexp) -> Result<Rational, LaplaceError> {
    match s {
        Sexp::Atom(a, pos) => rational::parse(a).map_err(|_| syntax(*pos, &format!("expected a number, got `{a}`"))),
        Sexp::List(_, pos) => Err(syntax(*pos, "expected a number")),
    }
}

fn natural(s: &Sexp) -> Result<u32, LaplaceError> {
    let r = number(s)?;
    let pos = match s {
        Sexp::Atom(_, p) | Sexp::List(_, p) => *p,
    };
    if !r.is_integer() || r.is_negative() {
        return Err(syntax(pos, "expected a non-negative integer"));
    }
    r.to_integer().to_u32().ok_or_else(|| syntax(pos, "integer too large"))
}

fn to_expr(s: &Sexp) -> Result<TimeExpr, LaplaceError> {
    let (items, pos) = match s {
        Sexp::Atom(..) => return Ok(Const(number(s)?)),
        Sexp::List(items, pos) => (items, *pos),
    };
    let Some(Sexp::Atom(head, _)) = items.first() else {
        return Err(syntax(pos, "expected an operator name"));
    };
    let args = &items[1..];
    let arity = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(syntax(
                pos,
                &format!("`{head}` takes {n} argument(s), got {}", args.len()),
            ))
        }
    };
    let sub = |i: usize| to_expr(&args[i]).map(Box::new);
    let located = |e: LaplaceError| match e {
        LaplaceError::InvalidExpr(msg) => syntax(pos, &msg),
        other => other,
    };
    Ok(match head.as_str() {
        "const" => {
            arity(1)?;
            Const(number(&args[0])?)
        }
        "pow" => {
            arity(1)?;
            Power(natural(&args[0])?)
        }
        "exp" => {
            arity(1)?;
            Exp(number(&args[0])?)
        }
        "sin" => {
            arity(1)?;
            Sin(number(&args[0])?)
        }
        "cos" => {
            arity(1)?;
            Cos(number(&args[0])?)
        }
        "scale" => {
            arity(2)?;
            Scale(number(&args[0])?, sub(1)?)
        }
        "add" => {
            if args.len() < 2 {
                return Err(syntax(pos, "`add` takes at least 2 arguments"));
            }
            let mut acc = to_expr(&args[0])?;
            for a in &args[1..] {
                acc = TimeExpr::add(acc, to_expr(a)?);
            }
            acc
        }
        "expmul" => {
            arity(2)?;
            ExpMul(number(&args[0])?, sub(1)?)
        }
        "shift" => {
            arity(2)?;
            TimeExpr::shift(number(&args[0])?, to_expr(&args[1])?).map_err(located)?
        }
        "tscale" => {
            arity(2)?;
            TimeExpr::time_scale(number(&args[0])?, to_expr(&args[1])?).map_err(located)?
        }
        "modcos" => {
            arity(2)?;
            ModCos(number(&args[0])?, sub(1)?)
        }
        "modsin" => {
            arity(2)?;
            ModSin(number(&args[0])?, sub(1)?)
        }
        "deriv" => {
            arity(2)?;
            TimeExpr::deriv(natural(&args[0])?, to_expr(&args[1])?).map_err(located)?
        }
        "integ" => {
            arity(1)?;
            Integ(sub(0)?)
        }
        other => return Err(syntax(pos, &format!("unknown operator `{other}`"))),
    })
}

impl std::str::FromStr for TimeExpr {
    type Err = LaplaceError;
    fn from_str(s: &str) -> Result<Self, LaplaceError> {
        to_expr(&read_sexp(s)?)
    }
}
