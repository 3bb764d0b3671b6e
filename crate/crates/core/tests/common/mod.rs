//! Oracles shared by the integration tests. None of these route through the
//! library's quadrature, filters or entropy code.

#![allow(dead_code)]

use std::collections::HashMap;
use std::io::Write;

use ctdi::partition_di::JointSequencePmf;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Prints one acceptance line straight to stderr (bypassing the test
/// harness capture) and fails the test when `pass` is false.
pub fn report(id: &str, title: &str, pass: bool, detail: impl AsRef<str>) {
    let line = format!(
        "\n[{}] criterion {id}: {title} | {}\n",
        if pass { "PASS" } else { "FAIL" },
        detail.as_ref()
    );
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(pass, "{}", line.trim());
}

/// Mean and standard error.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

/// Exponential-mixture density `f_Y(y) = Σ p x e^{-x y}`.
fn mixture_density(atoms: &[(f64, f64)], y: f64) -> f64 {
    atoms.iter().map(|&(x, p)| p * x * (-x * y).exp()).sum()
}

fn draw_atom(atoms: &[(f64, f64)], u: f64) -> f64 {
    let mut acc = 0.0;
    for &(x, p) in atoms {
        acc += p;
        if u < acc {
            return x;
        }
    }
    atoms.last().unwrap().0
}

/// Runs `per_sample(x, y)` on `n` draws of `X ~ atoms`, `Y | X ~ Exp(X)`,
/// returning the mean and standard error. Chunks run in parallel with
/// their own seeds and are reduced in order.
fn exp_channel_mc<F>(atoms: &[(f64, f64)], n: usize, seed: u64, per_sample: F) -> (f64, f64)
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    const CHUNKS: usize = 64;
    let per_chunk = n / CHUNKS;
    let sums: Vec<(f64, f64)> = (0..CHUNKS)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(1_000_003).wrapping_add(c as u64));
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..per_chunk {
                let x = draw_atom(atoms, rng.random::<f64>());
                let y = -(1.0 - rng.random::<f64>()).ln() / x;
                let v = per_sample(x, y);
                s += v;
                s2 += v * v;
            }
            (s, s2)
        })
        .collect();
    let total = (per_chunk * CHUNKS) as f64;
    let s: f64 = sums.iter().map(|p| p.0).sum();
    let s2: f64 = sums.iter().map(|p| p.1).sum();
    let mean = s / total;
    let var = (s2 / total - mean * mean) * total / (total - 1.0);
    (mean, (var / total).sqrt())
}

/// Plug-in Monte Carlo estimate of `I(X; Y)` for `Y | X ~ Exp(X)`:
/// the sample mean of `ln f(Y|X) − ln f_Y(Y)`.
pub fn plug_in_mi(atoms: &[(f64, f64)], n: usize, seed: u64) -> (f64, f64) {
    exp_channel_mc(atoms, n, seed, |x, y| (x.ln() - x * y) - mixture_density(atoms, y).ln())
}

/// Monte Carlo estimate of the differential entropy `h(Y)`.
pub fn mc_entropy_y(atoms: &[(f64, f64)], n: usize, seed: u64) -> (f64, f64) {
    exp_channel_mc(atoms, n, seed, |_, y| -mixture_density(atoms, y).ln())
}

pub fn inv_mean(atoms: &[(f64, f64)]) -> f64 {
    atoms.iter().map(|&(x, p)| p / x).sum()
}

/// `I(X^n; Y^n)` by direct summation of `p ln(p / (p_x p_y))`.
pub fn brute_force_mi(joint: &JointSequencePmf) -> f64 {
    let n = joint.n();
    let mut px: HashMap<Vec<usize>, f64> = HashMap::new();
    let mut py: HashMap<Vec<usize>, f64> = HashMap::new();
    let mut cells = Vec::new();
    joint.for_each_state(|d, p| {
        let (x, y) = d.split_at(n);
        *px.entry(x.to_vec()).or_default() += p;
        *py.entry(y.to_vec()).or_default() += p;
        cells.push((x.to_vec(), y.to_vec(), p));
    });
    cells
        .iter()
        .filter(|c| c.2 > 0.0)
        .map(|(x, y, p)| p * (p / (px[x] * py[y])).ln())
        .sum()
}

/// `KL(N(0, s_p) || N(0, s_q))` for the constant-signal output `Y_T`, with
/// `s = v·T² + T`.
pub fn gaussian_output_kl(horizon: f64, var_p: f64, var_q: f64) -> f64 {
    let sp = var_p * horizon * horizon + horizon;
    let sq = var_q * horizon * horizon + horizon;
    0.5 * (sp / sq - 1.0 - (sp / sq).ln())
}
