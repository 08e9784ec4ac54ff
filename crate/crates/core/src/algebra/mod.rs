//! Exact arithmetic: rationals, parameter polynomials, polynomials in `s`
//! and rational transfer functions.

mod binding;
pub mod json;
mod param_poly;
pub mod rational;
mod spoly;
pub mod text;
mod tf;

use thiserror::Error;

pub use binding::{Binding, BindingMode, BoundValue};
pub use param_poly::{Monomial, ParamPoly};
pub use rational::Rational;
pub use spoly::{horner, SPoly};
pub use text::{parse_param_poly, parse_spoly, parse_tf};
pub use tf::{NumericTf, TfOp, TransferFunction};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("DivisionByZeroTF: divisor transfer function is identically zero")]
    DivisionByZeroTF,
    #[error("NegativeDelay: operation would produce delay {0}")]
    NegativeDelay(f64),
    #[error("DelayMismatch: cannot add transfer functions with delays {0} and {1}")]
    DelayMismatch(f64, f64),
    #[error("PoleEvaluation: denominator vanishes at s = {re} + {im}j")]
    PoleEvaluation { re: f64, im: f64 },
    #[error("UnboundParameter: no value for `{0}`")]
    UnboundParameter(String),
    #[error("DegenerateLoop: closed-loop denominator is identically zero")]
    DegenerateLoop,
    #[error("DelayedFeedback: feedback requires delay-free operands")]
    DelayedFeedback,
    #[error("ZeroDenominator: denominator polynomial is identically zero")]
    ZeroDenominator,
    #[error("InexactBinding: exact binding cannot hold a double for `{0}`")]
    InexactBinding(String),
    #[error("NonFiniteBinding: value for `{0}` is not finite")]
    NonFiniteBinding(String),
    #[error("SyntaxError at offset {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("JsonError: {0}")]
    Json(String),
}

impl AlgebraError {
    pub fn name(&self) -> &'static str {
        match self {
            AlgebraError::DivisionByZeroTF => "DivisionByZeroTF",
            AlgebraError::NegativeDelay(_) => "NegativeDelay",
            AlgebraError::DelayMismatch(..) => "DelayMismatch",
            AlgebraError::PoleEvaluation { .. } => "PoleEvaluation",
            AlgebraError::UnboundParameter(_) => "UnboundParameter",
            AlgebraError::DegenerateLoop => "DegenerateLoop",
            AlgebraError::DelayedFeedback => "DelayedFeedback",
            AlgebraError::ZeroDenominator => "ZeroDenominator",
            AlgebraError::InexactBinding(_) => "InexactBinding",
            AlgebraError::NonFiniteBinding(_) => "NonFiniteBinding",
            AlgebraError::Parse { .. } => "SyntaxError",
            AlgebraError::Json(_) => "JsonError",
        }
    }
}
