//! JSON schema for coefficients and transfer functions.
//!
//! A coefficient is a list of terms `{"coef": "p/q", "mono": {"K1": 1}}`;
//! a polynomial in `s` is a list of coefficients indexed by power; a transfer
//! function is `{"num": [...], "den": [...], "delay": 0.0}`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::param_poly::{Monomial, ParamPoly};
use super::rational;
use super::spoly::SPoly;
use super::tf::TransferFunction;
use super::AlgebraError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub coef: String,
    #[serde(default)]
    pub mono: BTreeMap<String, u32>,
}

pub type CoeffJson = Vec<TermJson>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TfJson {
    pub num: Vec<CoeffJson>,
    pub den: Vec<CoeffJson>,
    #[serde(default)]
    pub delay: f64,
}

pub fn param_poly_to_json(p: &ParamPoly) -> CoeffJson {
    p.terms()
        .rev()
        .map(|(m, c)| TermJson {
            coef: rational::format_fraction(c),
            mono: m.factors().iter().cloned().collect(),
        })
        .collect()
}

pub fn param_poly_from_json(c: &CoeffJson) -> Result<ParamPoly, AlgebraError> {
    let mut terms = Vec::with_capacity(c.len());
    for t in c {
        let coef = rational::parse(&t.coef).map_err(|_| AlgebraError::Json(format!("bad coefficient `{}`", t.coef)))?;
        if let Some(bad) = t.mono.keys().find(|k| !valid_ident(k)) {
            return Err(AlgebraError::Json(format!("bad parameter name `{bad}`")));
        }
        terms.push((
            Monomial::from_factors(t.mono.iter().map(|(k, e)| (k.clone(), *e))),
            coef,
        ));
    }
    Ok(ParamPoly::from_terms(terms))
}

fn valid_ident(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && name != "s"
        && name != "exp"
}

pub fn spoly_to_json(p: &SPoly) -> Vec<CoeffJson> {
    p.coeffs().iter().map(param_poly_to_json).collect()
}

pub fn spoly_from_json(v: &[CoeffJson]) -> Result<SPoly, AlgebraError> {
    Ok(SPoly::new(
        v.iter().map(param_poly_from_json).collect::<Result<_, _>>()?,
    ))
}

impl From<&TransferFunction> for TfJson {
    fn from(tf: &TransferFunction) -> Self {
        TfJson {
            num: spoly_to_json(tf.num()),
            den: spoly_to_json(tf.den()),
            delay: tf.delay(),
        }
    }
}

impl TryFrom<&TfJson> for TransferFunction {
    type Error = AlgebraError;
    fn try_from(j: &TfJson) -> Result<Self, AlgebraError> {
        TransferFunction::with_delay(spoly_from_json(&j.num)?, spoly_from_json(&j.den)?, j.delay)
    }
}

pub fn tf_to_json(tf: &TransferFunction) -> serde_json::Value {
    serde_json::to_value(TfJson::from(tf)).expect("schema types serialize")
}

pub fn tf_from_json_str(text: &str) -> Result<TransferFunction, AlgebraError> {
    let j: TfJson = serde_json::from_str(text).map_err(|e| AlgebraError::Json(e.to_string()))?;
    TransferFunction::try_from(&j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::text::parse_tf;

    #[test]
    fn schema_shape() {
        let tf = parse_tf("0.25*K1/(s + 1)").unwrap();
        let v = tf_to_json(&tf);
        assert_eq!(
            v,
            serde_json::json!({
                "num": [[{"coef": "1/4", "mono": {"K1": 1}}]],
                "den": [[{"coef": "1", "mono": {}}], [{"coef": "1", "mono": {}}]],
                "delay": 0.0
            })
        );
        let back = tf_from_json_str(&v.to_string()).unwrap();
        assert_eq!(back, tf);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(tf_from_json_str(r#"{"num": [], "den": []}"#).is_err());
        assert!(tf_from_json_str(r#"{"num": [[{"coef": "x"}]], "den": [[{"coef": "1"}]]}"#).is_err());
        assert!(tf_from_json_str(r#"{"num": [[{"coef": "1", "mono": {"s": 1}}]], "den": [[{"coef": "1"}]]}"#).is_err());
        assert!(tf_from_json_str(r#"{"num": [[{"coef": "0.5"}]], "den": [[{"coef": "1"}]], "delay": -1}"#).is_err());
    }
}
