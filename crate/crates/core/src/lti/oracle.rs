//! Transfer-function check by simulation: `Y(s)/X(s)` from quadrature over
//! a simulated step response, compared against the claimed `H(s)`.

use num_complex::Complex64;
use serde::Serialize;

use super::sim::{poles, simulate, Input, TimeSeries};
use super::{LtiError, OdeSystem};
use crate::algebra::{Binding, TransferFunction};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleConfig {
    pub dt: f64,
    /// Simulation length; `None` picks one from the slowest decay of
    /// `y(t) e^(-s t)` over the samples.
    pub horizon: Option<f64>,
    /// Largest relative error that still counts as agreement.
    pub tolerance: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            dt: 2e-3,
            horizon: None,
            tolerance: 1e-2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleSample {
    pub s: [f64; 2],
    pub expected: [f64; 2],
    pub measured: [f64; 2],
    pub rel_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub samples: Vec<OracleSample>,
    pub max_rel_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

const MIN_HORIZON: f64 = 40.0;
const MAX_HORIZON: f64 = 1000.0;
/// Decay exponent reached at the end of the horizon.
const DECAY_TARGET: f64 = 36.0;

pub fn oracle_check_tf(
    sys: &OdeSystem,
    tf: &TransferFunction,
    binding: &Binding,
    s_samples: &[Complex64],
    config: &OracleConfig,
) -> Result<OracleReport, LtiError> {
    let abscissa = poles(sys, binding)?
        .iter()
        .map(|p| p.re)
        .fold(f64::NEG_INFINITY, f64::max);
    let floor = abscissa.max(0.0);
    for s in s_samples {
        #[allow(clippy::neg_cmp_op_on_partial_ord)] // also rejects NaN
        if !(s.re > floor) {
            return Err(LtiError::SampleBelowAbscissa { re: s.re, abscissa });
        }
    }
    let slowest = s_samples.iter().map(|s| s.re - floor).fold(f64::INFINITY, f64::min);
    let horizon = config
        .horizon
        .unwrap_or_else(|| (DECAY_TARGET / slowest).clamp(MIN_HORIZON, MAX_HORIZON));
    let y = simulate(sys, binding, &Input::Step, config.dt, horizon)?;
    let x = TimeSeries {
        dt: y.dt,
        samples: vec![1.0; y.samples.len()],
    };
    let mut samples = Vec::with_capacity(s_samples.len());
    for &s in s_samples {
        let expected = tf.eval(binding, s)?;
        let measured = sampled_laplace(&y, s) / sampled_laplace(&x, s);
        let diff = (measured - expected).norm();
        // the simulation is the reference
        let rel_error = if measured.norm() > 0.0 {
            diff / measured.norm()
        } else {
            diff
        };
        samples.push(OracleSample {
            s: [s.re, s.im],
            expected: [expected.re, expected.im],
            measured: [measured.re, measured.im],
            rel_error,
        });
    }
    let max_rel_error = samples.iter().map(|r| r.rel_error).fold(0.0, f64::max);
    Ok(OracleReport {
        samples,
        max_rel_error,
        tolerance: config.tolerance,
        passed: max_rel_error <= config.tolerance,
    })
}

/// Composite Simpson over the grid, plus the tail of the last sample held
/// constant: `integral_T^inf y_T e^(-s t) dt = y_T e^(-s T) / s`.
fn sampled_laplace(y: &TimeSeries, s: Complex64) -> Complex64 {
    let n = y.samples.len() - 1;
    let h = y.dt;
    let g = |k: usize| y.samples[k] * (-s * (k as f64 * h)).exp();
    // Simpson needs an even count; a trailing odd interval uses the 3/8 rule.
    let simpson_end = if n.is_multiple_of(2) { n } else { n.saturating_sub(3) };
    let mut acc = Complex64::new(0.0, 0.0);
    if simpson_end >= 2 {
        acc += g(0) + g(simpson_end);
        for k in 1..simpson_end {
            acc += g(k) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        acc *= h / 3.0;
    }
    if n % 2 == 1 {
        if n >= 3 {
            let k = simpson_end;
            acc += (g(k) + 3.0 * g(k + 1) + 3.0 * g(k + 2) + g(k + 3)) * (3.0 * h / 8.0);
        } else {
            acc += (g(0) + g(1)) * (h / 2.0);
        }
    }
    let t_end = n as f64 * h;
    acc + y.samples[n] * (-s * t_end).exp() / s
}
