use std::collections::BTreeMap;

use super::rational::{self, Rational};
use super::AlgebraError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BindingMode {
    /// Only exact rational values are accepted.
    Exact,
    #[default]
    Approximate,
}

#[derive(Clone, Debug, PartialEq)]
pub enum BoundValue {
    Exact(Rational),
    Approx(f64),
}

/// Values for the free parameters of a symbolic object.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Binding {
    mode: BindingMode,
    values: BTreeMap<String, BoundValue>,
}

impl Binding {
    pub fn new(mode: BindingMode) -> Self {
        Binding {
            mode,
            values: BTreeMap::new(),
        }
    }

    pub fn exact() -> Self {
        Self::new(BindingMode::Exact)
    }

    pub fn approximate() -> Self {
        Self::new(BindingMode::Approximate)
    }

    pub fn mode(&self) -> BindingMode {
        self.mode
    }

    pub fn set_exact(&mut self, name: impl Into<String>, value: Rational) -> &mut Self {
        self.values.insert(name.into(), BoundValue::Exact(value));
        self
    }

    pub fn set_approx(&mut self, name: impl Into<String>, value: f64) -> Result<&mut Self, AlgebraError> {
        let name = name.into();
        if self.mode == BindingMode::Exact {
            return Err(AlgebraError::InexactBinding(name));
        }
        if !value.is_finite() {
            return Err(AlgebraError::NonFiniteBinding(name));
        }
        self.values.insert(name, BoundValue::Approx(value));
        Ok(self)
    }

    pub fn with_exact(mut self, name: impl Into<String>, value: Rational) -> Self {
        self.set_exact(name, value);
        self
    }

    pub fn with_approx(mut self, name: impl Into<String>, value: f64) -> Result<Self, AlgebraError> {
        self.set_approx(name, value)?;
        Ok(self)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.values.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }

    pub fn get_f64(&self, name: &str) -> Result<f64, AlgebraError> {
        match self.values.get(name) {
            Some(BoundValue::Exact(r)) => Ok(rational::to_f64(r)),
            Some(BoundValue::Approx(v)) => Ok(*v),
            None => Err(AlgebraError::UnboundParameter(name.to_string())),
        }
    }

    pub fn get_exact(&self, name: &str) -> Result<Rational, AlgebraError> {
        match self.values.get(name) {
            Some(BoundValue::Exact(r)) => Ok(r.clone()),
            Some(BoundValue::Approx(v)) => {
                rational::from_f64(*v).ok_or_else(|| AlgebraError::NonFiniteBinding(name.to_string()))
            }
            None => Err(AlgebraError::UnboundParameter(name.to_string())),
        }
    }

    /// Names from `required` that have no value.
    pub fn missing<'a, I: IntoIterator<Item = &'a String>>(&self, required: I) -> Vec<String> {
        required.into_iter().filter(|n| !self.contains(n)).cloned().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::frac;

    #[test]
    fn exact_mode_rejects_doubles() {
        let mut b = Binding::exact();
        b.set_exact("K1", frac(1, 2));
        assert!(matches!(b.set_approx("K2", 0.5), Err(AlgebraError::InexactBinding(_))));
        assert_eq!(b.get_f64("K1").unwrap(), 0.5);
        assert!(matches!(b.get_f64("K2"), Err(AlgebraError::UnboundParameter(n)) if n == "K2"));
    }

    #[test]
    fn approx_values_convert_exactly() {
        let b = Binding::approximate().with_approx("x", 0.25).unwrap();
        assert_eq!(b.get_exact("x").unwrap(), frac(1, 4));
        assert!(Binding::approximate().with_approx("y", f64::NAN).is_err());
    }
}
