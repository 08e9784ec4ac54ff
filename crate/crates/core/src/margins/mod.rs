//! Frequency-domain stability measures of an open loop `G H`.
//!
//! The gain margin keeps the sign convention of its definition as a
//! magnitude, `20 log10 |G H(j w_pc)|`, which is negative for a stable loop;
//! the usual positive margin is reported next to it as
//! `gm_db_conventional`.

mod bode;
mod routh;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{AlgebraError, Binding, TransferFunction};
use crate::exec::Execution;

pub use bode::{bode_sweep, find_crossovers, BodeSweep, Crossovers, FreqPoint, SweepRange};
pub use routh::{routh_exact, routh_stability, RouthResult, Verdict};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MarginError {
    #[error("InvalidRange: {0}")]
    InvalidRange(String),
    #[error("NoGainCrossover: |GH| does not cross 0 dB in the sweep range")]
    NoGainCrossover,
    #[error("NoPhaseCrossover: the phase of GH does not cross -180 degrees in the sweep range")]
    NoPhaseCrossover,
    #[error("ZeroLeadingCoefficient: the polynomial vanishes or its leading coefficient is zero")]
    ZeroLeadingCoefficient,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

impl MarginError {
    pub fn name(&self) -> &'static str {
        match self {
            MarginError::InvalidRange(_) => "InvalidRange",
            MarginError::NoGainCrossover => "NoGainCrossover",
            MarginError::NoPhaseCrossover => "NoPhaseCrossover",
            MarginError::ZeroLeadingCoefficient => "ZeroLeadingCoefficient",
            MarginError::Algebra(e) => e.name(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MarginReport {
    pub gain_crossovers: Vec<f64>,
    pub phase_crossovers: Vec<f64>,
    /// Smallest phase margin over the gain crossovers.
    pub pm_deg: Option<f64>,
    pub wgc: Option<f64>,
    /// `20 log10 |GH|` at the phase crossover where `|GH|` is largest.
    pub gm_db_signed: Option<f64>,
    /// `-gm_db_signed`
    pub gm_db_conventional: Option<f64>,
    pub wpc: Option<f64>,
    /// Routh verdict on `den(G H) + num(G H)`; absent for delayed loops.
    pub stable_closed_loop: Option<Verdict>,
    pub frequencies_dropped: Vec<f64>,
}

fn open_loop_value(l: &TransferFunction, binding: &Binding, w: f64) -> Result<Complex64, MarginError> {
    Ok(l.eval(binding, Complex64::new(0.0, w))?)
}

/// `180 + arg GH(j w)` with the principal argument in `(-180, 180]`.
fn phase_margin_at(v: Complex64) -> f64 {
    let mut arg = v.arg().to_degrees();
    if arg <= -180.0 {
        arg += 360.0;
    }
    180.0 + arg
}

fn worst_phase_margin(
    l: &TransferFunction,
    binding: &Binding,
    gain: &[f64],
) -> Result<Option<(f64, f64)>, MarginError> {
    let mut best: Option<(f64, f64)> = None;
    for &w in gain {
        let pm = phase_margin_at(open_loop_value(l, binding, w)?);
        if best.is_none_or(|(b, _)| pm < b) {
            best = Some((pm, w));
        }
    }
    Ok(best)
}

fn worst_gain_margin(
    l: &TransferFunction,
    binding: &Binding,
    phase: &[f64],
) -> Result<Option<(f64, f64)>, MarginError> {
    let mut best: Option<(f64, f64)> = None;
    for &w in phase {
        let db = 20.0 * open_loop_value(l, binding, w)?.norm().log10();
        if best.is_none_or(|(b, _)| db > b) {
            best = Some((db, w));
        }
    }
    Ok(best)
}

fn crossovers_of(
    l: &TransferFunction,
    binding: &Binding,
    range: &SweepRange,
    exec: Execution,
) -> Result<(BodeSweep, Crossovers), MarginError> {
    let sweep = bode_sweep(l, binding, range, exec)?;
    let c = find_crossovers(l, binding, &sweep)?;
    Ok((sweep, c))
}

/// Phase margin in degrees and the gain crossover it is taken at.
pub fn phase_margin(
    g: &TransferFunction,
    h: &TransferFunction,
    binding: &Binding,
    range: &SweepRange,
    exec: Execution,
) -> Result<(f64, f64), MarginError> {
    let l = g.mul(h);
    let (_, c) = crossovers_of(&l, binding, range, exec)?;
    worst_phase_margin(&l, binding, &c.gain)?.ok_or(MarginError::NoGainCrossover)
}

/// `20 log10 |GH(j w_pc)|` and the phase crossover it is taken at.
pub fn gain_margin_db(
    g: &TransferFunction,
    h: &TransferFunction,
    binding: &Binding,
    range: &SweepRange,
    exec: Execution,
) -> Result<(f64, f64), MarginError> {
    let l = g.mul(h);
    let (_, c) = crossovers_of(&l, binding, range, exec)?;
    worst_gain_margin(&l, binding, &c.phase)?.ok_or(MarginError::NoPhaseCrossover)
}

pub fn margin_report(
    g: &TransferFunction,
    h: &TransferFunction,
    binding: &Binding,
    range: &SweepRange,
    exec: Execution,
) -> Result<MarginReport, MarginError> {
    let l = g.mul(h);
    let (sweep, c) = crossovers_of(&l, binding, range, exec)?;
    let pm = worst_phase_margin(&l, binding, &c.gain)?;
    let gm = worst_gain_margin(&l, binding, &c.phase)?;
    let stable_closed_loop = match g.feedback(h) {
        Ok(closed) => Some(routh_stability(closed.den(), binding)?.verdict),
        Err(AlgebraError::DelayedFeedback) => None,
        Err(e) => return Err(e.into()),
    };
    Ok(MarginReport {
        gain_crossovers: c.gain,
        phase_crossovers: c.phase,
        pm_deg: pm.map(|p| p.0),
        wgc: pm.map(|p| p.1),
        gm_db_signed: gm.map(|g| g.0),
        gm_db_conventional: gm.map(|g| -g.0),
        wpc: gm.map(|g| g.1),
        stable_closed_loop,
        frequencies_dropped: sweep.dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_tf;

    fn one() -> TransferFunction {
        TransferFunction::one()
    }

    fn g(s: &str) -> TransferFunction {
        parse_tf(s).unwrap()
    }

    fn run<T>(f: impl Fn(&TransferFunction, &TransferFunction, &Binding, &SweepRange, Execution) -> T, tf: &str) -> T {
        f(
            &g(tf),
            &one(),
            &Binding::default(),
            &SweepRange::default(),
            Execution::default(),
        )
    }

    #[test]
    fn phase_margins() {
        let (pm, w) = run(phase_margin, "1/(s*(s + 1))").unwrap();
        assert!((pm - 51.83).abs() < 0.1);
        assert!((w - 0.78615).abs() < 1e-3);
        let (pm, w) = run(phase_margin, "1/s").unwrap();
        assert!((pm - 90.0).abs() < 0.01);
        assert!((w - 1.0).abs() < 1e-9);
        let r = SweepRange::new(0.01, 100.0, 200).unwrap();
        assert_eq!(
            phase_margin(&g("1/(s + 1)"), &one(), &Binding::default(), &r, Execution::default()),
            Err(MarginError::NoGainCrossover)
        );
    }

    #[test]
    fn gain_margins() {
        let (gm, w) = run(gain_margin_db, "1/(s*(s + 1)*(s + 2))").unwrap();
        assert!((gm + 15.563).abs() < 0.01);
        assert!((w - 2f64.sqrt()).abs() < 1e-3);
        let (gm, _) = run(gain_margin_db, "6/(s*(s + 1)*(s + 2))").unwrap();
        assert!(gm.abs() < 0.01);
        assert_eq!(run(gain_margin_db, "1/(s + 1)"), Err(MarginError::NoPhaseCrossover));
    }

    #[test]
    fn report_lists_both_conventions() {
        let r = run(margin_report, "1/(s*(s + 1)*(s + 2))").unwrap();
        assert_eq!(r.gm_db_conventional, r.gm_db_signed.map(|v| -v));
        assert_eq!(r.stable_closed_loop, Some(Verdict::Stable));
        let json = serde_json::to_value(&r).unwrap();
        for key in ["pm_deg", "gm_db_signed", "gm_db_conventional"] {
            assert!(json.get(key).is_some(), "{key}");
        }
        let unstable = run(margin_report, "10/(s*(s + 1)*(s + 2))").unwrap();
        assert_eq!(unstable.stable_closed_loop, Some(Verdict::Unstable));
        assert!(unstable.gm_db_signed.unwrap() > 0.0);
    }

    #[test]
    fn crossovers_meet_their_levels() {
        let l = g("20*(s + 0.5)/(s*(s + 1)*(s + 2)*(s + 4))");
        let b = Binding::default();
        let sweep = bode_sweep(&l, &b, &SweepRange::default(), Execution::default()).unwrap();
        let c = find_crossovers(&l, &b, &sweep).unwrap();
        assert!(!c.gain.is_empty() && !c.phase.is_empty());
        for w in c.gain {
            assert!((l.eval(&b, Complex64::new(0.0, w)).unwrap().norm() - 1.0).abs() <= 1e-6);
        }
        for w in c.phase {
            let v = l.eval(&b, Complex64::new(0.0, w)).unwrap();
            assert!((v.arg().to_degrees().abs() - 180.0).abs() <= 1e-4);
        }
    }
}
