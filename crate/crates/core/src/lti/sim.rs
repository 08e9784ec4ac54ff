//! Controllable canonical realization and fixed-step RK4 simulation.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{LtiError, OdeSystem};
use crate::algebra::{Binding, SPoly};

const EIGEN_MAX_ITER: usize = 10_000;

/// `x' = A x + B u`, `y = C x + D u`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateSpace {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub c: DVector<f64>,
    pub d: f64,
}

impl StateSpace {
    pub fn order(&self) -> usize {
        self.b.len()
    }

    /// `C (sI - A)^-1 B + D`; `None` when `s` is an eigenvalue of `A`.
    pub fn eval(&self, s: Complex64) -> Option<Complex64> {
        let n = self.order();
        if n == 0 {
            return Some(Complex64::new(self.d, 0.0));
        }
        let m = DMatrix::<Complex64>::from_fn(n, n, |i, j| {
            let diag = if i == j { s } else { Complex64::new(0.0, 0.0) };
            diag - self.a[(i, j)]
        });
        let b = self.b.map(|v| Complex64::new(v, 0.0));
        let x = m.lu().solve(&b)?;
        Some(self.c.iter().zip(x.iter()).map(|(c, x)| *c * x).sum::<Complex64>() + self.d)
    }

    fn deriv(&self, x: &DVector<f64>, u: f64) -> DVector<f64> {
        &self.a * x + &self.b * u
    }

    fn output(&self, x: &DVector<f64>, u: f64) -> f64 {
        self.c.dot(x) + self.d * u
    }
}

/// Realization with the companion matrix of `alpha / alpha_n`.
pub fn state_space(sys: &OdeSystem, binding: &Binding) -> Result<StateSpace, LtiError> {
    let alpha = sys
        .alpha()
        .iter()
        .map(|p| p.eval_f64(binding))
        .collect::<Result<Vec<_>, _>>()?;
    let beta = sys
        .beta()
        .iter()
        .map(|p| p.eval_f64(binding))
        .collect::<Result<Vec<_>, _>>()?;
    let n = sys.order();
    if !sys.is_proper() {
        let m = SPoly::new(sys.beta().to_vec()).degree().unwrap_or(0);
        return Err(LtiError::OrderMismatch { m, n });
    }
    let lead = alpha[n];
    if lead == 0.0 {
        return Err(LtiError::SingularLeadingCoefficient);
    }
    let a_norm: Vec<f64> = alpha.iter().map(|v| v / lead).collect();
    let mut b_norm: Vec<f64> = beta.iter().map(|v| v / lead).collect();
    b_norm.resize(n + 1, 0.0);
    let d = b_norm[n];
    let a = DMatrix::from_fn(n, n, |i, j| {
        if i + 1 == n {
            -a_norm[j]
        } else if j == i + 1 {
            1.0
        } else {
            0.0
        }
    });
    let mut b = DVector::zeros(n);
    if n > 0 {
        b[n - 1] = 1.0;
    }
    let c = DVector::from_fn(n, |k, _| b_norm[k] - d * a_norm[k]);
    Ok(StateSpace { a, b, c, d })
}

/// Roots of `sum alpha_k s^k` under `binding`, as companion eigenvalues.
pub fn poles(sys: &OdeSystem, binding: &Binding) -> Result<Vec<Complex64>, LtiError> {
    let ss = state_space(sys, binding)?;
    if ss.order() == 0 {
        return Ok(Vec::new());
    }
    let schur =
        nalgebra::linalg::Schur::try_new(ss.a, f64::EPSILON, EIGEN_MAX_ITER).ok_or(LtiError::EigenvalueFailure)?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

#[derive(Clone, Debug, PartialEq)]
pub enum Input {
    /// Unit step at `t = 0`.
    Step,
    /// Pulse of height `1/dt` on the first step.
    Impulse,
    /// `sin(w t)`.
    Sine(f64),
    /// Values on the simulation grid, linearly interpolated between samples
    /// and held after the last one.
    Samples(Vec<f64>),
}

impl Input {
    /// Input at the start, midpoint and end of step `k`.
    fn stages(&self, k: usize, dt: f64) -> [f64; 3] {
        let t0 = k as f64 * dt;
        match self {
            Input::Step => [1.0; 3],
            Input::Impulse if k == 0 => [1.0 / dt; 3],
            Input::Impulse => [0.0; 3],
            Input::Sine(w) => [(w * t0).sin(), (w * (t0 + 0.5 * dt)).sin(), (w * (t0 + dt)).sin()],
            Input::Samples(v) => {
                let at = |i: usize| v.get(i).or(v.last()).copied().unwrap_or(0.0);
                let (u0, u1) = (at(k), at(k + 1));
                [u0, 0.5 * (u0 + u1), u1]
            }
        }
    }
}

/// Uniformly sampled signal starting at `t = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries {
    pub dt: f64,
    pub samples: Vec<f64>,
}

impl TimeSeries {
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.samples.len()).map(move |k| k as f64 * self.dt)
    }

    pub fn last(&self) -> f64 {
        *self.samples.last().expect("time series is non-empty")
    }

    /// Sample nearest to time `t`.
    pub fn at(&self, t: f64) -> f64 {
        let k = ((t / self.dt).round().max(0.0) as usize).min(self.samples.len() - 1);
        self.samples[k]
    }

    /// Two-column `t,y` CSV with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,y\n");
        for (t, y) in self.times().zip(&self.samples) {
            out.push_str(&format!("{t},{y}\n"));
        }
        out
    }
}

/// Response from the zero state, sampled at `0, dt, ..., T`.
pub fn simulate(
    sys: &OdeSystem,
    binding: &Binding,
    input: &Input,
    dt: f64,
    horizon: f64,
) -> Result<TimeSeries, LtiError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(LtiError::InvalidTimeGrid(format!("step {dt} must be positive")));
    }
    if !(horizon >= dt && horizon.is_finite()) {
        return Err(LtiError::InvalidTimeGrid(format!(
            "horizon {horizon} is shorter than the step {dt}"
        )));
    }
    let ss = state_space(sys, binding)?;
    let steps = (horizon / dt).round() as usize;
    let mut x = DVector::zeros(ss.order());
    let mut samples = Vec::with_capacity(steps + 1);
    for k in 0..steps {
        let [u0, um, u1] = input.stages(k, dt);
        samples.push(ss.output(&x, u0));
        let k1 = ss.deriv(&x, u0);
        let k2 = ss.deriv(&(&x + &k1 * (0.5 * dt)), um);
        let k3 = ss.deriv(&(&x + &k2 * (0.5 * dt)), um);
        let k4 = ss.deriv(&(&x + &k3 * dt), u1);
        x += (k1 + (k2 + k3) * 2.0 + k4) * (dt / 6.0);
    }
    let u_end = input.stages(steps, dt)[0];
    samples.push(ss.output(&x, u_end));
    Ok(TimeSeries { dt, samples })
}
