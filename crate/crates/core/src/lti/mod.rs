//! Single-input single-output systems given by the n-order ODE
//!
//! ```text
//! sum_{k<=n} alpha_k y^(k)(t) = sum_{k<=m} beta_k x^(k)(t)
//! ```
//!
//! Under zero initial conditions this is the transfer function
//! `(sum beta_k s^k) / (sum alpha_k s^k)`. The simulator starts from the zero
//! state so that the same assumption holds in the time domain.

mod oracle;
mod sim;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::json::{param_poly_from_json, param_poly_to_json, CoeffJson};
use crate::algebra::{parse_param_poly, AlgebraError, Binding, ParamPoly, SPoly, TransferFunction};

pub use oracle::{oracle_check_tf, OracleConfig, OracleReport, OracleSample};
pub use sim::{poles, simulate, state_space, Input, StateSpace, TimeSeries};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LtiError {
    #[error("ZeroDenominatorPoly: every output-side coefficient is zero")]
    ZeroDenominatorPoly,
    #[error("OrderMismatch: input order {m} exceeds output order {n}")]
    OrderMismatch { m: usize, n: usize },
    #[error("SingularLeadingCoefficient: leading output coefficient is zero under the binding")]
    SingularLeadingCoefficient,
    #[error("InvalidTimeGrid: {0}")]
    InvalidTimeGrid(String),
    #[error("SampleBelowAbscissa: Re s = {re} must exceed max(0, {abscissa})")]
    SampleBelowAbscissa { re: f64, abscissa: f64 },
    #[error("EigenvalueFailure: pole computation did not converge")]
    EigenvalueFailure,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

impl LtiError {
    pub fn name(&self) -> &'static str {
        match self {
            LtiError::ZeroDenominatorPoly => "ZeroDenominatorPoly",
            LtiError::OrderMismatch { .. } => "OrderMismatch",
            LtiError::SingularLeadingCoefficient => "SingularLeadingCoefficient",
            LtiError::InvalidTimeGrid(_) => "InvalidTimeGrid",
            LtiError::SampleBelowAbscissa { .. } => "SampleBelowAbscissa",
            LtiError::EigenvalueFailure => "EigenvalueFailure",
            LtiError::Algebra(e) => e.name(),
        }
    }
}

/// ODE coefficients; index `k` holds the coefficient of the k-th derivative.
///
/// Trailing zeros of `alpha` are dropped, so `alpha.len() - 1` is the order;
/// `beta` is kept as given.
#[derive(Clone, Debug, PartialEq)]
pub struct OdeSystem {
    alpha: Vec<ParamPoly>,
    beta: Vec<ParamPoly>,
}

impl OdeSystem {
    pub fn new(alpha: Vec<ParamPoly>, beta: Vec<ParamPoly>) -> Result<Self, LtiError> {
        let alpha = SPoly::new(alpha).into_coeffs();
        if alpha.is_empty() {
            return Err(LtiError::ZeroDenominatorPoly);
        }
        let n = alpha.len() - 1;
        if let Some(m) = SPoly::new(beta.clone()).degree().filter(|&m| m > n) {
            return Err(LtiError::OrderMismatch { m, n });
        }
        Ok(OdeSystem { alpha, beta })
    }

    /// Like [`OdeSystem::new`] but without the `m <= n` check, for behavioral
    /// descriptions such as an ideal differentiator. Such systems have a
    /// transfer function but no state-space realization.
    pub fn improper(alpha: Vec<ParamPoly>, beta: Vec<ParamPoly>) -> Result<Self, LtiError> {
        let alpha = SPoly::new(alpha).into_coeffs();
        if alpha.is_empty() {
            return Err(LtiError::ZeroDenominatorPoly);
        }
        Ok(OdeSystem { alpha, beta })
    }

    /// Whether the input order does not exceed the output order.
    pub fn is_proper(&self) -> bool {
        SPoly::new(self.beta.clone()).degree().is_none_or(|m| m <= self.order())
    }

    pub fn from_ints(alpha: &[i64], beta: &[i64]) -> Result<Self, LtiError> {
        let lift = |v: &[i64]| v.iter().map(|&c| ParamPoly::int(c)).collect();
        OdeSystem::new(lift(alpha), lift(beta))
    }

    pub fn alpha(&self) -> &[ParamPoly] {
        &self.alpha
    }

    pub fn beta(&self) -> &[ParamPoly] {
        &self.beta
    }

    pub fn order(&self) -> usize {
        self.alpha.len() - 1
    }

    pub fn to_json(&self) -> serde_json::Value {
        let j = OdeJson {
            alpha: self
                .alpha
                .iter()
                .map(|p| CoeffInput::Terms(param_poly_to_json(p)))
                .collect(),
            beta: self
                .beta
                .iter()
                .map(|p| CoeffInput::Terms(param_poly_to_json(p)))
                .collect(),
        };
        serde_json::to_value(j).expect("schema types serialize")
    }

    /// Reads `{"alpha": [...], "beta": [...]}`. Each coefficient is a term
    /// list, a number, or a polynomial string such as `"0.25*K1 + 3"`.
    pub fn from_json_str(text: &str) -> Result<Self, LtiError> {
        let j: OdeJson = serde_json::from_str(text).map_err(|e| AlgebraError::Json(e.to_string()))?;
        let read = |v: &[CoeffInput]| v.iter().map(CoeffInput::to_poly).collect::<Result<Vec<_>, _>>();
        OdeSystem::new(read(&j.alpha)?, read(&j.beta)?)
    }
}

#[derive(Serialize, Deserialize)]
struct OdeJson {
    alpha: Vec<CoeffInput>,
    beta: Vec<CoeffInput>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CoeffInput {
    Terms(CoeffJson),
    Number(f64),
    Text(String),
}

impl CoeffInput {
    fn to_poly(&self) -> Result<ParamPoly, AlgebraError> {
        match self {
            CoeffInput::Terms(t) => param_poly_from_json(t),
            CoeffInput::Number(x) => {
                // shortest round-trip decimal, read back exactly
                parse_param_poly(&format!("{x:?}"))
            }
            CoeffInput::Text(s) => parse_param_poly(s),
        }
    }
}

/// `(sum beta_k s^k) / (sum alpha_k s^k)` with no delay.
pub fn transfer_function(sys: &OdeSystem) -> TransferFunction {
    TransferFunction::new(SPoly::new(sys.beta.clone()), SPoly::new(sys.alpha.clone()))
        .expect("alpha is nonzero by construction")
}

/// `H(j w)` for the system under `binding`.
pub fn frequency_response_sys(sys: &OdeSystem, binding: &Binding, w: f64) -> Result<Complex64, LtiError> {
    Ok(transfer_function(sys).eval(binding, Complex64::new(0.0, w))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_tf;

    #[test]
    fn first_order_tf() {
        let sys = OdeSystem::from_ints(&[1, 1], &[1]).unwrap();
        assert_eq!(transfer_function(&sys).to_string(), "1/(s + 1)");
        let h = frequency_response_sys(&sys, &Binding::default(), 1.0).unwrap();
        assert!((h.norm() - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((h.arg().to_degrees() + 45.0).abs() < 1e-12);
        assert_eq!(
            frequency_response_sys(&sys, &Binding::default(), 0.0).unwrap(),
            Complex64::new(1.0, 0.0)
        );
    }

    #[test]
    fn integrator_pole() {
        let sys = OdeSystem::from_ints(&[0, 1], &[1]).unwrap();
        assert!(matches!(
            frequency_response_sys(&sys, &Binding::default(), 0.0),
            Err(LtiError::Algebra(AlgebraError::PoleEvaluation { .. }))
        ));
    }

    #[test]
    fn invariants() {
        assert_eq!(OdeSystem::from_ints(&[0, 0], &[1]), Err(LtiError::ZeroDenominatorPoly));
        assert_eq!(
            OdeSystem::from_ints(&[1, 1], &[1, 2, 3]),
            Err(LtiError::OrderMismatch { m: 2, n: 1 })
        );
        // trailing zeros do not count toward the order
        assert_eq!(OdeSystem::from_ints(&[1, 1, 0], &[1]).unwrap().order(), 1);
    }

    #[test]
    fn json_forms() {
        let sys =
            OdeSystem::from_json_str(r#"{"alpha": [0.0416, "0.25*K1 + 1", [{"coef": "1"}]], "beta": ["K1"]}"#).unwrap();
        let tf = transfer_function(&sys);
        assert!(tf.equals(&parse_tf("K1/(s^2 + (0.25*K1 + 1)*s + 0.0416)").unwrap()));
        let back = OdeSystem::from_json_str(&sys.to_json().to_string()).unwrap();
        assert_eq!(back, sys);
        assert!(OdeSystem::from_json_str(r#"{"alpha": [{}], "beta": []}"#).is_err());
    }
}
