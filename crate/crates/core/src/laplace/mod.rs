//! Laplace transforms of a closed language of time signals.
//!
//! [`laplace_symbolic`] applies the transform rules exactly and tracks the
//! region of convergence. [`laplace_numeric`] evaluates the defining
//! integral by quadrature, truncated using an [`ExpOrderWitness`], and is the
//! independent check on the symbolic rules.

mod expr;
mod quad;
mod symbolic;
mod witness;

use num_complex::Complex64;
use thiserror::Error;

use crate::algebra::AlgebraError;

pub use expr::TimeExpr;
pub use symbolic::{laplace_symbolic, InitPolicy, InitialValues, LaplaceResult};
pub use witness::{exp_order_witness, ExpOrderWitness, EPSILON_RATE};

/// Smallest allowed gap between `Re s` and the witness rate in
/// [`laplace_numeric`].
pub const CONVERGENCE_MARGIN: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LaplaceError {
    #[error("SyntaxError at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("InvalidExpr: {0}")]
    InvalidExpr(String),
    #[error("NonRationalResult: {0}")]
    NonRationalResult(String),
    #[error("InitialValuesMismatch: {0}")]
    InitialValuesMismatch(String),
    #[error("ConvergenceMargin: Re s = {re} is not above the growth rate {rate} by {margin}")]
    ConvergenceMargin { re: f64, rate: f64, margin: f64 },
    #[error("ToleranceNotMet: quadrature stalled after {panels} panels")]
    ToleranceNotMet { panels: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

impl LaplaceError {
    pub fn name(&self) -> &'static str {
        match self {
            LaplaceError::Syntax { .. } => "SyntaxError",
            LaplaceError::InvalidExpr(_) => "InvalidExpr",
            LaplaceError::NonRationalResult(_) => "NonRationalResult",
            LaplaceError::InitialValuesMismatch(_) => "InitialValuesMismatch",
            LaplaceError::ConvergenceMargin { .. } => "ConvergenceMargin",
            LaplaceError::ToleranceNotMet { .. } => "ToleranceNotMet",
            LaplaceError::Algebra(e) => e.name(),
        }
    }
}

/// `integral_0^inf f(t) e^(-s t) dt` to absolute accuracy `tol`.
///
/// The integral is cut at `T` where the witness bounds the tail by `tol/2`;
/// the remaining `tol/2` goes to adaptive Simpson on panels that resolve the
/// oscillation of both `f` and `e^(-s t)`.
pub fn laplace_numeric(f: &TimeExpr, s: Complex64, tol: f64) -> Result<Complex64, LaplaceError> {
    f.validate()?;
    let w = exp_order_witness(f);
    let gap = s.re - w.a;
    if gap <= CONVERGENCE_MARGIN {
        return Err(LaplaceError::ConvergenceMargin {
            re: s.re,
            rate: w.a,
            margin: CONVERGENCE_MARGIN,
        });
    }
    // M e^(-gap T) / gap = tol / 2
    let horizon = ((2.0 * w.m / (tol * gap)).ln() / gap).max(1.0);
    let g = f.expand_derivatives();
    let width = 0.5f64.min(1.0 / (1.0 + s.im.abs() + g.max_frequency()));
    let edges = quad::panel_edges(0.0, horizon, width, &g.breakpoints());
    let integrand = |t: f64| g.eval(t) * (-s * t).exp();
    let (value, _) = quad::integrate_panels(&integrand, &edges, tol / 2.0)
        .map_err(|e| LaplaceError::ToleranceNotMet { panels: e.panels })?;
    if !value.is_finite() {
        return Err(LaplaceError::ToleranceNotMet { panels: 0 });
    }
    Ok(value)
}

/// Whether the transform integral provably converges at `s`, with the
/// witness that decides it.
///
/// Every signal in the language is piecewise smooth, so only the growth
/// condition `Re s > a` is checked.
pub fn laplace_exists_check(f: &TimeExpr, s: Complex64) -> (bool, ExpOrderWitness) {
    let w = exp_order_witness(f);
    (s.re > w.a, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Binding;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn expr(s: &str) -> TimeExpr {
        s.parse().unwrap()
    }

    #[test]
    fn numeric_closed_forms() {
        let v = laplace_numeric(&expr("(exp -1)"), c(1.0, 0.0), 1e-8).unwrap();
        assert!((v - c(0.5, 0.0)).norm() <= 1e-8);
        let v = laplace_numeric(&expr("(sin 2)"), c(2.0, 0.0), 1e-6).unwrap();
        assert!((v - c(0.25, 0.0)).norm() <= 1e-6);
        let v = laplace_numeric(&expr("(const 1)"), c(2.0, 0.0), 1e-8).unwrap();
        assert!((v - c(0.5, 0.0)).norm() <= 1e-6);
        let v = laplace_numeric(&expr("(exp 3)"), c(5.0, 0.0), 1e-8).unwrap();
        assert!((v - c(0.5, 0.0)).norm() <= 1e-6);
        let v = laplace_numeric(&expr("(shift 1 (const 1))"), c(1.0, 0.0), 1e-8).unwrap();
        assert!((v.re - (-1f64).exp()).abs() <= 1e-7);
    }

    #[test]
    fn numeric_below_abscissa() {
        assert!(matches!(
            laplace_numeric(&expr("(exp 2)"), c(1.0, 0.0), 1e-6),
            Err(LaplaceError::ConvergenceMargin { .. })
        ));
        assert!(matches!(
            laplace_numeric(&expr("(exp 2)"), c(2.05, 0.0), 1e-6),
            Err(LaplaceError::ConvergenceMargin { .. })
        ));
    }

    #[test]
    fn numeric_matches_symbolic_off_axis() {
        for (f, s) in [
            ("(modcos 3 (exp -1))", c(0.5, 2.0)),
            ("(integ (sin 1))", c(1.0, -1.5)),
            ("(tscale 2 (shift 1 (pow 1)))", c(1.0, 0.5)),
        ] {
            let f = expr(f);
            let sym = laplace_symbolic(&f, &InitPolicy::Zero).unwrap();
            let want = sym.tf.eval(&Binding::default(), s).unwrap();
            let got = laplace_numeric(&f, s, 1e-8).unwrap();
            assert!(
                (got - want).norm() <= 1e-6 * (1.0 + want.norm()),
                "{f}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn existence_is_strict() {
        let (ok, w) = laplace_exists_check(&expr("(exp 2)"), c(3.0, 1.0));
        assert!(ok);
        assert_eq!(w, ExpOrderWitness { m: 1.0, a: 2.0 });
        assert!(!laplace_exists_check(&expr("(exp 2)"), c(2.0, 0.0)).0);
        assert!(laplace_exists_check(&expr("(const 1)"), c(0.5, 0.0)).0);
    }
}
