//! Frequency sweeps and crossover refinement.

use num_complex::Complex64;

use super::MarginError;
use crate::algebra::{AlgebraError, Binding, NumericTf, TransferFunction};
use crate::exec::Execution;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FreqPoint {
    /// rad/s
    pub w: f64,
    pub value: Complex64,
    pub mag_db: f64,
    /// Unwrapped: continuous along the sweep.
    pub phase_deg: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRange {
    pub wmin: f64,
    pub wmax: f64,
    /// Points per decade.
    pub ppd: usize,
}

impl Default for SweepRange {
    fn default() -> Self {
        SweepRange {
            wmin: 1e-3,
            wmax: 1e3,
            ppd: 200,
        }
    }
}

impl SweepRange {
    pub fn new(wmin: f64, wmax: f64, ppd: usize) -> Result<Self, MarginError> {
        let r = SweepRange { wmin, wmax, ppd };
        r.validate()?;
        Ok(r)
    }

    fn validate(&self) -> Result<(), MarginError> {
        if !(self.wmin > 0.0 && self.wmax > self.wmin && self.wmax.is_finite()) {
            return Err(MarginError::InvalidRange(format!(
                "need 0 < wmin < wmax, got [{}, {}]",
                self.wmin, self.wmax
            )));
        }
        if self.ppd < 10 {
            return Err(MarginError::InvalidRange(format!(
                "need at least 10 points per decade, got {}",
                self.ppd
            )));
        }
        Ok(())
    }

    /// Log-spaced frequencies from `wmin` to `wmax` inclusive.
    pub fn frequencies(&self) -> Vec<f64> {
        let decades = (self.wmax / self.wmin).log10();
        let steps = (decades * self.ppd as f64).ceil().max(1.0) as usize;
        (0..=steps)
            .map(|i| {
                if i == steps {
                    self.wmax
                } else {
                    self.wmin * 10f64.powf(decades * i as f64 / steps as f64)
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BodeSweep {
    pub points: Vec<FreqPoint>,
    /// Frequencies skipped because they land on a pole.
    pub dropped: Vec<f64>,
}

impl BodeSweep {
    /// `w,re,im,mag_db,phase_deg` with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("w,re,im,mag_db,phase_deg\n");
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                p.w, p.value.re, p.value.im, p.mag_db, p.phase_deg
            ));
        }
        out
    }
}

pub(crate) fn bind_all(tf: &TransferFunction, binding: &Binding) -> Result<NumericTf, MarginError> {
    let vars = tf.variables();
    if let Some(name) = binding.missing(&vars).into_iter().next() {
        return Err(AlgebraError::UnboundParameter(name).into());
    }
    Ok(tf.bind(binding)?)
}

/// `v` shifted by a multiple of 360 to lie nearest `reference`.
fn nearest_branch(v: f64, reference: f64) -> f64 {
    v + 360.0 * ((reference - v) / 360.0).round()
}

fn point(w: f64, value: Complex64) -> FreqPoint {
    FreqPoint {
        w,
        value,
        mag_db: 20.0 * value.norm().log10(),
        phase_deg: value.arg().to_degrees(),
    }
}

pub fn bode_sweep(
    tf: &TransferFunction,
    binding: &Binding,
    range: &SweepRange,
    exec: Execution,
) -> Result<BodeSweep, MarginError> {
    range.validate()?;
    let bound = bind_all(tf, binding)?;
    let ws = range.frequencies();
    let values = exec.map(&ws, |&w| bound.eval(Complex64::new(0.0, w)));
    let mut points: Vec<FreqPoint> = Vec::with_capacity(ws.len());
    let mut dropped = Vec::new();
    for (w, v) in ws.into_iter().zip(values) {
        match v {
            Ok(v) => {
                let mut p = point(w, v);
                if let Some(prev) = points.last() {
                    p.phase_deg = nearest_branch(p.phase_deg, prev.phase_deg);
                }
                points.push(p);
            }
            Err(AlgebraError::PoleEvaluation { .. }) => dropped.push(w),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(BodeSweep { points, dropped })
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Crossovers {
    /// `|GH| = 1`
    pub gain: Vec<f64>,
    /// Unwrapped phase `= -180` degrees.
    pub phase: Vec<f64>,
}

const BISECTION_LIMIT: usize = 200;
const BISECTION_RTOL: f64 = 1e-13;

/// Root of `f` in `[lo, hi]` where `f(lo)` and `f(hi)` have opposite signs,
/// bisecting in `log w`.
fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> Option<f64>) -> Option<f64> {
    let mut flo = f(lo)?;
    for _ in 0..BISECTION_LIMIT {
        if (hi - lo) <= BISECTION_RTOL * lo {
            break;
        }
        let mid = (lo * hi).sqrt();
        let fm = f(mid)?;
        if fm == 0.0 {
            return Some(mid);
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some((lo * hi).sqrt())
}

/// Crossovers between adjacent sweep points, refined on the continuous
/// response of `tf`.
pub fn find_crossovers(tf: &TransferFunction, binding: &Binding, sweep: &BodeSweep) -> Result<Crossovers, MarginError> {
    let bound = bind_all(tf, binding)?;
    let at = |w: f64| bound.eval(Complex64::new(0.0, w)).ok();
    let mut out = Crossovers::default();
    let pts = &sweep.points;
    let level = |p: &FreqPoint| (p.mag_db, p.phase_deg + 180.0);
    for (i, p) in pts.iter().enumerate() {
        let (g, ph) = level(p);
        if g == 0.0 {
            out.gain.push(p.w);
        }
        if ph == 0.0 {
            out.phase.push(p.w);
        }
        let Some(q) = pts.get(i + 1) else { break };
        let (g2, ph2) = level(q);
        if g * g2 < 0.0 {
            if let Some(w) = bisect(p.w, q.w, |w| at(w).map(|v| 20.0 * v.norm().log10())) {
                out.gain.push(w);
            }
        }
        if ph * ph2 < 0.0 {
            // Unwrap against the straight line between the two endpoints.
            let unwrapped = |w: f64| {
                let t = (w / p.w).ln() / (q.w / p.w).ln();
                let guess = p.phase_deg + t * (q.phase_deg - p.phase_deg);
                at(w).map(|v| nearest_branch(v.arg().to_degrees(), guess) + 180.0)
            };
            if let Some(w) = bisect(p.w, q.w, unwrapped) {
                out.phase.push(w);
            }
        }
    }
    Ok(out)
}
