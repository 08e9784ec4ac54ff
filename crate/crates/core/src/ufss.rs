//! Pitch control of an unmanned free-swimming submersible.
//!
//! The pitch angle `theta` follows the commanded angle `theta_e` through
//!
//! ```text
//! theta'''' + 3.456 theta''' + (0.25 K2 + 3.207) theta''
//!   + (0.25 K1 + 0.1088 K2 + 0.6106) theta' + (0.1088 K1 + 0.0416) theta
//!   = 0.25 K1 theta_e' + 0.1088 K1 theta_e
//! ```
//!
//! where `K1` is the pitch gain and `K2` the pitch-rate sensor gain.

use crate::algebra::rational;
use crate::algebra::{ParamPoly, Rational, SPoly, TransferFunction};
use crate::lti::OdeSystem;

/// Gains, each a number or a parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct UfssParams {
    pub k1: ParamPoly,
    pub k2: ParamPoly,
}

impl Default for UfssParams {
    /// Symbolic `K1` and `K2`.
    fn default() -> Self {
        UfssParams {
            k1: ParamPoly::var("K1"),
            k2: ParamPoly::var("K2"),
        }
    }
}

impl UfssParams {
    pub fn numeric(k1: Rational, k2: Rational) -> Self {
        UfssParams {
            k1: ParamPoly::constant(k1),
            k2: ParamPoly::constant(k2),
        }
    }
}

fn dec(text: &str) -> Rational {
    rational::parse(text).expect("decimal literal")
}

/// `a*x + b*y + c` with decimal literals read exactly.
fn affine(terms: &[(&str, &ParamPoly)], c: &str) -> ParamPoly {
    terms
        .iter()
        .fold(ParamPoly::constant(dec(c)), |acc, (k, p)| &acc + &p.scale(&dec(k)))
}

pub fn ufss_pitch_ode(p: &UfssParams) -> OdeSystem {
    let (k1, k2) = (&p.k1, &p.k2);
    let alpha = vec![
        affine(&[("0.1088", k1)], "0.0416"),
        affine(&[("0.25", k1), ("0.1088", k2)], "0.6106"),
        affine(&[("0.25", k2)], "3.207"),
        ParamPoly::constant(dec("3.456")),
        ParamPoly::one(),
    ];
    let beta = vec![k1.scale(&dec("0.1088")), k1.scale(&dec("0.25"))];
    OdeSystem::new(alpha, beta).expect("leading coefficient is 1 and m < n")
}

/// `theta(s) / theta_e(s)`, assembled directly from the closed form.
pub fn ufss_pitch_tf(p: &UfssParams) -> TransferFunction {
    let (k1, k2) = (&p.k1, &p.k2);
    let num = SPoly::new(vec![k1.scale(&dec("0.1088")), k1.scale(&dec("0.25"))]);
    let den = SPoly::new(vec![
        affine(&[("0.1088", k1)], "0.0416"),
        affine(&[("0.25", k1), ("0.1088", k2)], "0.6106"),
        affine(&[("0.25", k2)], "3.207"),
        ParamPoly::constant(dec("3.456")),
        ParamPoly::one(),
    ]);
    TransferFunction::new(num, den).expect("monic denominator")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_param_poly, Binding};
    use crate::lti::transfer_function;
    use num_complex::Complex64;

    #[test]
    fn symbolic_coefficients() {
        let sys = ufss_pitch_ode(&UfssParams::default());
        assert_eq!(sys.alpha().len(), 5);
        assert_eq!(sys.beta().len(), 2);
        assert_eq!(sys.alpha()[0], parse_param_poly("0.1088*K1 + 0.0416").unwrap());
        assert_eq!(sys.alpha()[0].to_string(), "0.1088*K1 + 0.0416");
        assert_eq!(sys.alpha()[1].to_string(), "0.25*K1 + 0.1088*K2 + 0.6106");
        let tf = ufss_pitch_tf(&UfssParams::default());
        assert!(tf.equals(&transfer_function(&sys)));
        assert_eq!(tf.num().to_string(), "0.25*K1*s + 0.1088*K1");
    }

    #[test]
    fn zero_gains() {
        let sys = ufss_pitch_ode(&UfssParams::numeric(rational::int(0), rational::int(0)));
        let want: Vec<ParamPoly> = ["0.0416", "0.6106", "3.207", "3.456", "1"]
            .iter()
            .map(|c| ParamPoly::constant(dec(c)))
            .collect();
        assert_eq!(sys.alpha(), want.as_slice());
        assert_eq!(sys.beta(), &[ParamPoly::zero(), ParamPoly::zero()]);
    }

    #[test]
    fn unit_gains() {
        let p = UfssParams::numeric(rational::int(1), rational::int(1));
        let tf = ufss_pitch_tf(&p);
        assert_eq!(tf.den().coeff(0).as_constant(), Some(rational::frac(1504, 10000)));
        let s = Complex64::new(1.0, 0.0);
        let direct = (0.25 + 0.1088) / (1.0 + 3.456 + 3.457 + 0.9694 + 0.1504);
        assert!((tf.eval(&Binding::default(), s).unwrap().re - direct).abs() < 1e-12);
    }
}
