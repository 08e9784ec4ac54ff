//! Adaptive Simpson quadrature.

use num_complex::Complex64;

use super::expr::TimeExpr;

/// Hard cap on accepted panels per integral.
pub const PANEL_CAP: usize = 1 << 20;
const MAX_DEPTH: u32 = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stalled {
    pub panels: usize,
}

struct Simpson<'a, F> {
    f: &'a F,
    /// Absolute error allowed per unit length.
    density: f64,
    panels: usize,
}

impl<F: Fn(f64) -> Complex64> Simpson<'_, F> {
    #[allow(clippy::too_many_arguments)]
    fn refine(
        &mut self,
        a: f64,
        b: f64,
        fa: Complex64,
        fm: Complex64,
        fb: Complex64,
        whole: Complex64,
        depth: u32,
    ) -> Result<Complex64, Stalled> {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = ((self.f)(lm), (self.f)(rm));
        let h = b - a;
        let left = h / 12.0 * (fa + 4.0 * flm + fm);
        let right = h / 12.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        let scale = h * (fa.norm() + 4.0 * fm.norm() + fb.norm()) / 6.0;
        let allowed = (15.0 * self.density * h).max(1e-15 * scale);
        if delta.norm() <= allowed {
            self.panels += 2;
            if self.panels > PANEL_CAP {
                return Err(Stalled { panels: self.panels });
            }
            return Ok(left + right + delta / 15.0);
        }
        if depth >= MAX_DEPTH {
            return Err(Stalled { panels: self.panels });
        }
        let l = self.refine(a, m, fa, flm, fm, left, depth + 1)?;
        let r = self.refine(m, b, fm, frm, fb, right, depth + 1)?;
        Ok(l + r)
    }
}

/// Integrates `f` over consecutive panels `[edges[i], edges[i+1]]` with a
/// total absolute error target `tol`.
pub fn integrate_panels<F>(f: &F, edges: &[f64], tol: f64) -> Result<(Complex64, usize), Stalled>
where
    F: Fn(f64) -> Complex64,
{
    let (Some(&lo), Some(&hi)) = (edges.first(), edges.last()) else {
        return Ok((Complex64::new(0.0, 0.0), 0));
    };
    let length = hi - lo;
    if length <= 0.0 {
        return Ok((Complex64::new(0.0, 0.0), 0));
    }
    let mut q = Simpson {
        f,
        density: tol / length,
        panels: 0,
    };
    let mut total = Complex64::new(0.0, 0.0);
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        // Evaluate just inside a jump so each panel sees one smooth piece.
        let nudge = (b - a) * 1e-13;
        let fa = f(a + nudge);
        let fb = f(b - nudge);
        let fm = f(0.5 * (a + b));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        total += q.refine(a, b, fa, fm, fb, whole, 0)?;
    }
    Ok((total, q.panels))
}

/// Panel edges on `[lo, hi]` no wider than `width`, always including the
/// given breakpoints.
pub fn panel_edges(lo: f64, hi: f64, width: f64, breakpoints: &[f64]) -> Vec<f64> {
    let mut cuts: Vec<f64> = breakpoints.iter().copied().filter(|&p| p > lo && p < hi).collect();
    cuts.push(lo);
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut edges = vec![lo];
    for w in cuts.windows(2) {
        let n = ((w[1] - w[0]) / width).ceil().max(1.0) as usize;
        for i in 1..=n {
            edges.push(w[0] + (w[1] - w[0]) * i as f64 / n as f64);
        }
    }
    edges
}

/// `integral_0^t f(tau) dtau`, used to evaluate `Integ` nodes.
pub(crate) fn integrate_signal(f: &TimeExpr, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let inner = f.expand_derivatives();
    let width = 1.0 / (1.0 + inner.max_frequency());
    let edges = panel_edges(0.0, t, width, &inner.breakpoints());
    let g = |tau: f64| Complex64::new(inner.eval(tau), 0.0);
    let scale = 1.0 + t;
    match integrate_panels(&g, &edges, 1e-12 * scale) {
        Ok((v, _)) => v.re,
        Err(_) => f64::NAN,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let f = |t: f64| Complex64::new(t * t * t, 0.0);
        let (v, _) = integrate_panels(&f, &[0.0, 2.0], 1e-12).unwrap();
        assert!((v.re - 4.0).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_complex_integrand() {
        let f = |t: f64| Complex64::new(0.0, -5.0 * t).exp();
        let edges = panel_edges(0.0, 3.0, 0.1, &[]);
        let (v, _) = integrate_panels(&f, &edges, 1e-10).unwrap();
        let exact = (Complex64::new(1.0, 0.0) - Complex64::new(0.0, -15.0).exp()) / Complex64::new(0.0, 5.0);
        assert!((v - exact).norm() < 1e-9);
    }

    #[test]
    fn jump_at_breakpoint() {
        let f = |t: f64| Complex64::new(if t < 1.0 { 0.0 } else { 1.0 }, 0.0);
        let edges = panel_edges(0.0, 2.5, 1.0, &[1.0]);
        assert!(edges.contains(&1.0));
        let (v, _) = integrate_panels(&f, &edges, 1e-10).unwrap();
        assert!((v.re - 1.5).abs() < 1e-9);
    }

    #[test]
    fn non_integrable_stalls() {
        let f = |t: f64| Complex64::new(1.0 / t, 0.0);
        assert!(integrate_panels(&f, &[0.0, 1.0], 1e-12).is_err());
    }
}
