//! Capacity of the Poisson feedback channel with a binary intensity alphabet.
//!
//! The capacity is the directed information rate maximized over
//! `p = P{X = λ₁}`. The rate is not known to be unimodal in `p`, so the search
//! scans a coarse grid before refining the best bracket by golden section.
//! For `λ₂ ≫ λ₁` the capacity grows without bound (the limit is
//! `lim_{p↓0} H(p)/p`); only finite orderings are checked numerically.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pmf::FinitePmf;
use crate::poisson::{di_rate_analytic, mean_y_quadrature};

pub const DEFAULT_TOL: f64 = 1e-6;
const GRID_STEP: f64 = 1e-2;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityPoint {
    pub lambda1: f64,
    pub lambda2: f64,
    /// Optimal `P{X = λ₁}`.
    pub p_star: f64,
    /// Maximal rate in nats per second.
    pub rate_star: f64,
    /// Set when the rate is identically zero in `p`, so `p_star` is arbitrary.
    pub degenerate_flat: bool,
}

fn check_lambdas(lambda1: f64, lambda2: f64) -> Result<()> {
    for l in [lambda1, lambda2] {
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::Domain(format!("intensities must be positive, got {l}")));
        }
    }
    Ok(())
}

/// Directed information rate of the binary input law `P{X = λ₁} = p`.
pub fn binary_rate(p: f64, lambda1: f64, lambda2: f64) -> Result<f64> {
    check_lambdas(lambda1, lambda2)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("p = {p} outside [0, 1]")));
    }
    if p == 0.0 || p == 1.0 || lambda1 == lambda2 {
        return Ok(0.0);
    }
    di_rate_analytic(&FinitePmf::binary(lambda1, lambda2, p)?)
}

/// Rate at each `p` of a Fig.-1 style sweep, in input order.
pub fn rate_sweep(lambda1: f64, lambda2: f64, ps: &[f64]) -> Result<Vec<f64>> {
    ps.par_iter().map(|&p| binary_rate(p, lambda1, lambda2)).collect()
}

/// Maximizes [`binary_rate`] over `p` to a bracket narrower than `tol`.
pub fn optimize_binary(lambda1: f64, lambda2: f64, tol: f64) -> Result<CapacityPoint> {
    check_lambdas(lambda1, lambda2)?;
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    if lambda1 == lambda2 {
        return Ok(CapacityPoint { lambda1, lambda2, p_star: 0.5, rate_star: 0.0, degenerate_flat: true });
    }
    let f = |p: f64| binary_rate(p, lambda1, lambda2);
    let steps = (1.0 / GRID_STEP).round() as usize;
    let grid: Vec<f64> = (0..=steps).map(|i| i as f64 / steps as f64).collect();
    let values: Vec<f64> = grid.iter().map(|&p| f(p)).collect::<Result<_>>()?;
    let best = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("non-empty grid");
    if values[best] <= 0.0 {
        return Ok(CapacityPoint { lambda1, lambda2, p_star: 0.5, rate_star: 0.0, degenerate_flat: true });
    }

    let mut a = grid[best.saturating_sub(1)];
    let mut b = grid[(best + 1).min(steps)];
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    let (mut p_star, mut rate_star) = if fc >= fd { (c, fc) } else { (d, fd) };
    if values[best] > rate_star {
        p_star = grid[best];
        rate_star = values[best];
    }
    Ok(CapacityPoint { lambda1, lambda2, p_star, rate_star, degenerate_flat: false })
}

/// Capacity for each `λ₂` with `λ₁` fixed. `λ₂ = 0` yields rate 0 with all
/// mass on `λ₁`: the channel would freeze once `λ₂` is used.
pub fn capacity_curve(lambda1: f64, lambda2_values: &[f64]) -> Result<Vec<CapacityPoint>> {
    lambda2_values
        .par_iter()
        .map(|&l2| {
            if l2 == 0.0 {
                check_lambdas(lambda1, 1.0)?;
                Ok(CapacityPoint { lambda1, lambda2: 0.0, p_star: 1.0, rate_star: 0.0, degenerate_flat: true })
            } else {
                optimize_binary(lambda1, l2, DEFAULT_TOL)
            }
        })
        .collect()
}

/// `|E[Y] − E[1/X]|` with `E[Y]` by quadrature over `f_Y`.
pub fn unit_cost_identity_check(pmf: &FinitePmf) -> Result<f64> {
    Ok((mean_y_quadrature(pmf)? - pmf.expect(|x| 1.0 / x)).abs())
}
