//! Exponential-order witnesses: constants `(M, a)` with `|f(t)| <= M e^(a t)`
//! for all `t >= 0`.

use num_traits::Zero;

use super::expr::TimeExpr;
use crate::algebra::rational;

/// Slack used where a growth rate has to be made strictly positive
/// (polynomials and integrals of bounded signals).
pub const EPSILON_RATE: f64 = 0.25;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpOrderWitness {
    pub m: f64,
    pub a: f64,
}

impl ExpOrderWitness {
    /// `M e^(a t)`
    pub fn bound(&self, t: f64) -> f64 {
        self.m * (self.a * t).exp()
    }
}

pub fn exp_order_witness(f: &TimeExpr) -> ExpOrderWitness {
    use TimeExpr::*;
    let w = |m: f64, a: f64| ExpOrderWitness { m, a };
    let r = rational::to_f64;
    match f {
        Const(c) => w(if c.is_zero() { 1.0 } else { r(c).abs() }, 0.0),
        Power(0) => w(1.0, 0.0),
        // max_t t^n e^(-eps t) = (n / (e eps))^n
        Power(n) => {
            let n = *n as f64;
            w((n / (std::f64::consts::E * EPSILON_RATE)).powf(n), EPSILON_RATE)
        }
        Exp(a) => w(1.0, r(a)),
        Sin(_) | Cos(_) => w(1.0, 0.0),
        Scale(c, g) => {
            let inner = exp_order_witness(g);
            let c = r(c).abs();
            w(if c == 0.0 { inner.m } else { inner.m * c }, inner.a)
        }
        Add(g, h) => {
            let (x, y) = (exp_order_witness(g), exp_order_witness(h));
            w(x.m + y.m, x.a.max(y.a))
        }
        ExpMul(b, g) => {
            let inner = exp_order_witness(g);
            w(inner.m, inner.a + r(b))
        }
        ShiftRight(d, g) => {
            let inner = exp_order_witness(g);
            w(inner.m * (-inner.a * r(d)).exp(), inner.a)
        }
        TimeScale(c, g) => {
            let inner = exp_order_witness(g);
            w(inner.m, inner.a * r(c))
        }
        ModCos(_, g) | ModSin(_, g) => exp_order_witness(g),
        Deriv(k, g) => exp_order_witness(&g.nth_derivative(*k)),
        Integ(g) => {
            let inner = exp_order_witness(g);
            if inner.a > 0.0 {
                w(inner.m / inner.a, inner.a)
            } else if inner.a < 0.0 {
                w(inner.m / -inner.a, 0.0)
            } else {
                // M t <= M / (e eps) * e^(eps t)
                w(inner.m / (std::f64::consts::E * EPSILON_RATE), EPSILON_RATE)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn witness(s: &str) -> ExpOrderWitness {
        exp_order_witness(&s.parse().unwrap())
    }

    #[test]
    fn leaves_and_sums() {
        assert_eq!(witness("(exp 3)"), ExpOrderWitness { m: 1.0, a: 3.0 });
        assert_eq!(witness("(cos 5)"), ExpOrderWitness { m: 1.0, a: 0.0 });
        assert_eq!(witness("(add (exp 1) (exp 2))"), ExpOrderWitness { m: 2.0, a: 2.0 });
    }

    #[test]
    fn sound_on_samples() {
        for s in [
            "(pow 3)",
            "(pow 7)",
            "(shift 2 (exp -1))",
            "(integ (pow 2))",
            "(integ (cos 3))",
            "(integ (exp -2))",
            "(deriv 2 (expmul 1 (sin 3)))",
            "(tscale 3 (add (pow 2) (exp 1/2)))",
            "(scale -4 (modsin 2 (pow 1)))",
        ] {
            let f: TimeExpr = s.parse().unwrap();
            let w = exp_order_witness(&f);
            assert!(w.m > 0.0);
            for i in 0..=500 {
                let t = i as f64 * 0.1;
                assert!(f.eval(t).abs() <= w.bound(t) * (1.0 + 1e-9) + 1e-12, "{s} at t={t}");
            }
        }
    }
}
