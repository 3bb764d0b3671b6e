//! Probability mass functions on a finite real support.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinitePmf {
    support: Vec<f64>,
    probs: Vec<f64>,
}

impl FinitePmf {
    pub fn new(support: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if support.is_empty() || support.len() != probs.len() {
            return Err(Error::InvalidPmf(format!(
                "support has {} points but {} probabilities were given",
                support.len(),
                probs.len()
            )));
        }
        if support.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidPmf("support points must be finite".into()));
        }
        if probs.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidPmf("probabilities must be nonnegative".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidPmf(format!("probabilities sum to {total}")));
        }
        let mut sorted = support.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidPmf("support points must be distinct".into()));
        }
        Ok(Self { support, probs })
    }

    /// Like [`FinitePmf::new`] but additionally requires every support point to
    /// be strictly positive, as intensities of the Poisson channel must be.
    pub fn positive(support: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        let pmf = Self::new(support, probs)?;
        if let Some(bad) = pmf.support.iter().find(|&&s| !(s > 0.0)) {
            return Err(Error::InvalidPmf(format!(
                "support point {bad} is not a positive intensity"
            )));
        }
        Ok(pmf)
    }

    pub fn point_mass(x: f64) -> Result<Self> {
        Self::new(vec![x], vec![1.0])
    }

    /// Two-point law with `P{X = a} = p`. Collapses to a point mass when the
    /// two atoms coincide or when `p` is 0 or 1.
    pub fn binary(a: f64, b: f64, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidPmf(format!("p = {p} outside [0, 1]")));
        }
        if a == b || p == 1.0 {
            Self::point_mass(a)
        } else if p == 0.0 {
            Self::point_mass(b)
        } else {
            Self::new(vec![a, b], vec![p, 1.0 - p])
        }
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Atoms carrying positive probability.
    pub fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.support
            .iter()
            .copied()
            .zip(self.probs.iter().copied())
            .filter(|&(_, p)| p > 0.0)
    }

    /// True when a single atom carries all the mass.
    pub fn is_degenerate(&self) -> bool {
        self.atoms().count() == 1
    }

    pub fn min_support(&self) -> f64 {
        self.atoms().map(|(x, _)| x).fold(f64::INFINITY, f64::min)
    }

    pub fn max_support(&self) -> f64 {
        self.atoms().map(|(x, _)| x).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn expect<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.atoms().map(|(x, p)| p * f(x)).sum()
    }

    pub fn mean(&self) -> f64 {
        self.expect(|x| x)
    }

    /// Same probabilities on the support scaled by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.support.iter().map(|x| x * c).collect(), self.probs.clone())
    }

    /// Draws one support point by inversion.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        self.quantile(u)
    }

    /// Smallest support point whose cumulative mass exceeds `u`.
    pub fn quantile(&self, u: f64) -> f64 {
        let mut acc = 0.0;
        let mut last = self.support[0];
        for (x, p) in self.atoms() {
            acc += p;
            last = x;
            if u < acc {
                return x;
            }
        }
        last
    }

    pub fn total_variation(&self, other: &FinitePmf) -> f64 {
        let mut tv = 0.0;
        for (x, p) in self.support.iter().zip(&self.probs) {
            let q = other.prob_of(*x);
            tv += (p - q).abs();
        }
        for (x, q) in other.support.iter().zip(&other.probs) {
            if !self.support.contains(x) {
                tv += q;
            }
        }
        0.5 * tv
    }

    pub fn prob_of(&self, x: f64) -> f64 {
        self.support
            .iter()
            .position(|&s| s == x)
            .map_or(0.0, |i| self.probs[i])
    }
}
