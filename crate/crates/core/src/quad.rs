//! One-dimensional quadrature: adaptive Simpson and composite Simpson.

use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 60;
/// Hard cap on integrand evaluations for a single adaptive call.
const MAX_EVALS: usize = 20_000_000;

struct Adaptive<'a, F> {
    f: &'a F,
    evals: usize,
}

impl<F: Fn(f64) -> f64> Adaptive<'_, F> {
    #[allow(clippy::too_many_arguments)]
    fn step(
        &mut self,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = (self.f)(lm);
        let frm = (self.f)(rm);
        self.evals += 2;
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tol || delta.abs() <= 64.0 * f64::EPSILON * (left.abs() + right.abs()) {
            return Ok(left + right + delta / 15.0);
        }
        if depth == 0 || self.evals > MAX_EVALS {
            return Err(Error::Quadrature(format!(
                "no convergence on [{a}, {b}] (residual {delta:e})"
            )));
        }
        Ok(self.step(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
            + self.step(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
    }
}

/// Adaptive Simpson with Richardson correction to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut state = Adaptive { f: &f, evals: 3 };
    state.step(a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

/// Adaptive Simpson over consecutive panels `[knots[i], knots[i+1]]`, the
/// tolerance split in proportion to panel width.
pub fn adaptive_simpson_panels<F: Fn(f64) -> f64>(f: F, knots: &[f64], tol: f64) -> Result<f64> {
    let span = knots.last().copied().unwrap_or(0.0) - knots.first().copied().unwrap_or(0.0);
    if span <= 0.0 {
        return Ok(0.0);
    }
    knots
        .windows(2)
        .map(|w| adaptive_simpson(&f, w[0], w[1], tol * (w[1] - w[0]) / span))
        .sum()
}

/// Composite Simpson on `[a, b]` with an even number of steps no wider than
/// `max_step`.
pub fn composite_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, max_step: f64) -> f64 {
    let len = b - a;
    if len <= 0.0 {
        return 0.0;
    }
    let mut n = (len / max_step).ceil() as usize;
    n = n.max(2);
    if n % 2 == 1 {
        n += 1;
    }
    let h = len / n as f64;
    let mut odd = 0.0;
    let mut even = 0.0;
    for i in 1..n {
        let v = f(a + i as f64 * h);
        if i % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    h / 3.0 * (f(a) + 4.0 * odd + 2.0 * even + f(b))
}
