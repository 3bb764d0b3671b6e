//! Exact directed information between finite-alphabet sequences.
//!
//! A [`JointSequencePmf`] holds the full joint law of `(X^n, Y^n)` as a flat
//! array in row-major order over the coordinates `(x_1, ..., x_n, y_1, ...,
//! y_n)`, `x_1` most significant. Every information quantity is reduced to
//! entropies of coordinate marginals computed by exhaustive enumeration, so
//! results are exact up to floating point. Values are in nats.
//!
//! Grouping consecutive indices into blocks turns the sequence pair into a
//! pair of super-symbol sequences. This is how piecewise-constant processes
//! sampled on a time partition reduce to the discrete case, and how the
//! partition-refinement behaviour of directed information is checked.

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_STATE_CAP: usize = 1_000_000;
const SUM_TOL: f64 = 1e-12;
/// Probabilities below this floor are treated as exact zeros inside logs.
const PROB_FLOOR: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawJoint", into = "RawJoint")]
pub struct JointSequencePmf {
    n: usize,
    x_sizes: Vec<usize>,
    y_sizes: Vec<usize>,
    probs: Vec<f64>,
}

/// On-disk JSON layout.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawJoint {
    n: usize,
    x_alphabet_sizes: Vec<usize>,
    y_alphabet_sizes: Vec<usize>,
    probs: Vec<f64>,
}

impl TryFrom<RawJoint> for JointSequencePmf {
    type Error = Error;

    fn try_from(raw: RawJoint) -> Result<Self> {
        if raw.x_alphabet_sizes.len() != raw.n {
            return Err(Error::InvalidJoint(format!(
                "n = {} but {} x alphabet sizes",
                raw.n,
                raw.x_alphabet_sizes.len()
            )));
        }
        JointSequencePmf::new(raw.x_alphabet_sizes, raw.y_alphabet_sizes, raw.probs)
    }
}

impl From<JointSequencePmf> for RawJoint {
    fn from(j: JointSequencePmf) -> Self {
        RawJoint {
            n: j.n,
            x_alphabet_sizes: j.x_sizes,
            y_alphabet_sizes: j.y_sizes,
            probs: j.probs,
        }
    }
}

fn state_count(sizes: impl Iterator<Item = usize>, cap: usize) -> Result<usize> {
    let mut total: u128 = 1;
    for s in sizes {
        total = total.saturating_mul(s as u128);
    }
    if total > cap as u128 {
        return Err(Error::EnumerationCap { states: total, cap });
    }
    Ok(total as usize)
}

impl JointSequencePmf {
    pub fn new(x_sizes: Vec<usize>, y_sizes: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        Self::with_cap(x_sizes, y_sizes, probs, DEFAULT_STATE_CAP)
    }

    pub fn with_cap(
        x_sizes: Vec<usize>,
        y_sizes: Vec<usize>,
        probs: Vec<f64>,
        cap: usize,
    ) -> Result<Self> {
        let n = x_sizes.len();
        if n == 0 || y_sizes.len() != n {
            return Err(Error::InvalidJoint(format!(
                "x and y need the same positive length, got {} and {}",
                n,
                y_sizes.len()
            )));
        }
        if x_sizes.iter().chain(&y_sizes).any(|&s| s == 0) {
            return Err(Error::InvalidJoint("alphabet sizes must be positive".into()));
        }
        // 2n coordinates are addressed by a 64-bit mask
        if 2 * n > 64 {
            return Err(Error::InvalidJoint(format!("n = {n} is too long")));
        }
        let states = state_count(x_sizes.iter().chain(&y_sizes).copied(), cap)?;
        if probs.len() != states {
            return Err(Error::InvalidJoint(format!(
                "expected {states} probabilities, got {}",
                probs.len()
            )));
        }
        if probs.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidJoint("probabilities must be nonnegative".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidJoint(format!("probabilities sum to {total}")));
        }
        Ok(Self { n, x_sizes, y_sizes, probs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_alphabet_sizes(&self) -> &[usize] {
        &self.x_sizes
    }

    pub fn y_alphabet_sizes(&self) -> &[usize] {
        &self.y_sizes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn states(&self) -> usize {
        self.probs.len()
    }

    fn radix(&self) -> Vec<usize> {
        self.x_sizes.iter().chain(&self.y_sizes).copied().collect()
    }

    /// Flat index of the state `(x^n, y^n)`.
    pub fn index_of(&self, x: &[usize], y: &[usize]) -> Result<usize> {
        if x.len() != self.n || y.len() != self.n {
            return Err(Error::InvalidJoint("sequence length mismatch".into()));
        }
        let mut idx = 0;
        for (&d, &s) in x.iter().chain(y).zip(self.radix().iter()) {
            if d >= s {
                return Err(Error::InvalidJoint(format!("symbol {d} outside alphabet of size {s}")));
            }
            idx = idx * s + d;
        }
        Ok(idx)
    }

    pub fn prob(&self, x: &[usize], y: &[usize]) -> Result<f64> {
        Ok(self.probs[self.index_of(x, y)?])
    }

    /// Calls `f(digits, p)` for every state in index order.
    pub fn for_each_state<F: FnMut(&[usize], f64)>(&self, mut f: F) {
        let radix = self.radix();
        let mut digits = vec![0usize; radix.len()];
        for &p in &self.probs {
            f(&digits, p);
            for c in (0..radix.len()).rev() {
                digits[c] += 1;
                if digits[c] < radix[c] {
                    break;
                }
                digits[c] = 0;
            }
        }
    }

    /// Marginal law of the coordinates in `mask` (bit `c` selects coordinate
    /// `c`; `x_i` is coordinate `i`, `y_i` is coordinate `n + i`).
    fn marginal(&self, mask: u64) -> Vec<f64> {
        let radix = self.radix();
        let mut strides = vec![0usize; radix.len()];
        let mut size = 1usize;
        for c in (0..radix.len()).rev() {
            if mask >> c & 1 == 1 {
                strides[c] = size;
                size *= radix[c];
            }
        }
        let mut out = vec![0.0; size];
        self.for_each_state(|digits, p| {
            let m: usize = digits.iter().zip(&strides).map(|(d, s)| d * s).sum();
            out[m] += p;
        });
        out
    }

    /// Law of the first `m` index pairs.
    pub fn prefix(&self, m: usize) -> Result<JointSequencePmf> {
        if m == 0 || m > self.n {
            return Err(Error::InvalidJoint(format!("prefix length {m} not in 1..={}", self.n)));
        }
        let mut mask = 0u64;
        for i in 0..m {
            mask |= 1 << i | 1 << (self.n + i);
        }
        // marginal() orders coordinates like the parent, which is (x^m, y^m)
        let probs = self.marginal(mask);
        JointSequencePmf::new(
            self.x_sizes[..m].to_vec(),
            self.y_sizes[..m].to_vec(),
            probs,
        )
    }

    fn x_mask(&self, range: std::ops::Range<usize>) -> u64 {
        range.fold(0, |m, i| m | 1 << i)
    }

    fn y_mask(&self, range: std::ops::Range<usize>) -> u64 {
        range.fold(0, |m, i| m | 1 << (self.n + i))
    }
}

fn entropy(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p >= PROB_FLOOR)
        .map(|&p| -p * p.ln())
        .sum()
}

/// Memoized marginal entropies of one joint law.
struct Entropies<'a> {
    joint: &'a JointSequencePmf,
    cache: HashMap<u64, f64>,
}

impl<'a> Entropies<'a> {
    fn new(joint: &'a JointSequencePmf) -> Self {
        Self { joint, cache: HashMap::new() }
    }

    fn h(&mut self, mask: u64) -> f64 {
        if mask == 0 {
            return 0.0;
        }
        let joint = self.joint;
        *self
            .cache
            .entry(mask)
            .or_insert_with(|| entropy(&joint.marginal(mask)))
    }

    /// `I(A; B | C)` for disjoint coordinate masks.
    fn cmi(&mut self, a: u64, b: u64, c: u64) -> f64 {
        if a == 0 || b == 0 {
            return 0.0;
        }
        self.h(a | c) + self.h(b | c) - self.h(a | b | c) - self.h(c)
    }
}

/// `I(X^n; Y^n)`.
pub fn mutual_information(joint: &JointSequencePmf) -> f64 {
    let n = joint.n;
    let mut e = Entropies::new(joint);
    e.cmi(joint.x_mask(0..n), joint.y_mask(0..n), 0)
}

/// `I(X^n -> Y^n) = sum_i I(X^i; Y_i | Y^{i-1})`.
pub fn directed_info(joint: &JointSequencePmf) -> f64 {
    grouped_directed_info(joint, &Grouping::singletons(joint.n))
        .expect("singleton grouping always matches")
}

/// `sum_i I(Y^{i-1}; X_i | X^{i-1})`, the directed information from the
/// one-step-delayed output back to the input.
pub fn reverse_directed_info(joint: &JointSequencePmf) -> f64 {
    let mut e = Entropies::new(joint);
    (0..joint.n)
        .map(|i| e.cmi(joint.y_mask(0..i), joint.x_mask(i..i + 1), joint.x_mask(0..i)))
        .sum()
}

/// `directed + reverse - mutual`; zero up to rounding for every joint law.
pub fn conservation_residual(joint: &JointSequencePmf) -> f64 {
    directed_info(joint) + reverse_directed_info(joint) - mutual_information(joint)
}

/// Partition of `{0..n}` into consecutive nonempty blocks, stored as the
/// exclusive end index of each block.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Grouping {
    ends: Vec<usize>,
}

impl Grouping {
    pub fn new(n: usize, ends: Vec<usize>) -> Result<Self> {
        if n == 0 || ends.last() != Some(&n) {
            return Err(Error::InvalidJoint(format!("grouping must end at {n}")));
        }
        let mut prev = 0;
        for &e in &ends {
            if e <= prev {
                return Err(Error::InvalidJoint("blocks must be consecutive and nonempty".into()));
            }
            prev = e;
        }
        Ok(Self { ends })
    }

    /// Grouping whose interior cuts are `cuts` (positions in `1..n`).
    pub fn from_cuts(n: usize, cuts: &[usize]) -> Result<Self> {
        let mut ends: Vec<usize> = cuts.to_vec();
        ends.sort_unstable();
        ends.dedup();
        if ends.iter().any(|&c| c == 0 || c >= n) {
            return Err(Error::InvalidJoint(format!("cuts must lie in 1..{n}")));
        }
        ends.push(n);
        Self::new(n, ends)
    }

    pub fn singletons(n: usize) -> Self {
        Self { ends: (1..=n).collect() }
    }

    pub fn one_block(n: usize) -> Self {
        Self { ends: vec![n] }
    }

    pub fn n(&self) -> usize {
        *self.ends.last().expect("non-empty")
    }

    pub fn blocks(&self) -> impl Iterator<Item = std::ops::Range<usize>> + '_ {
        std::iter::once(0)
            .chain(self.ends.iter().copied())
            .zip(self.ends.iter().copied())
            .map(|(a, b)| a..b)
    }

    pub fn block_count(&self) -> usize {
        self.ends.len()
    }

    /// Interior cut positions.
    pub fn cuts(&self) -> &[usize] {
        &self.ends[..self.ends.len() - 1]
    }

    /// True when every cut of `coarse` is also a cut of `self`.
    pub fn refines(&self, coarse: &Grouping) -> bool {
        self.n() == coarse.n() && coarse.cuts().iter().all(|c| self.cuts().contains(c))
    }
}

/// Directed information between the block super-symbol sequences:
/// `sum_j I(X^{B_1..B_j}; Y_{B_j} | Y^{B_1..B_{j-1}})`.
pub fn grouped_directed_info(joint: &JointSequencePmf, grouping: &Grouping) -> Result<f64> {
    if grouping.n() != joint.n {
        return Err(Error::InvalidJoint(format!(
            "grouping covers {} indices but the joint has n = {}",
            grouping.n(),
            joint.n
        )));
    }
    let mut e = Entropies::new(joint);
    Ok(grouping
        .blocks()
        .map(|b| e.cmi(joint.x_mask(0..b.end), joint.y_mask(b.clone()), joint.y_mask(0..b.start)))
        .sum())
}

/// Normalized empirical frequencies of the observed `(x^n, y^n)` pairs.
pub fn empirical_joint(
    samples: &[(Vec<usize>, Vec<usize>)],
    x_sizes: &[usize],
    y_sizes: &[usize],
) -> Result<JointSequencePmf> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let states = state_count(x_sizes.iter().chain(y_sizes).copied(), DEFAULT_STATE_CAP)?;
    // a zero-probability template validates the layout and gives index_of
    let mut template_probs = vec![0.0; states];
    template_probs[0] = 1.0;
    let template = JointSequencePmf::new(x_sizes.to_vec(), y_sizes.to_vec(), template_probs)?;
    let mut counts = vec![0u64; states];
    for (x, y) in samples {
        counts[template.index_of(x, y)?] += 1;
    }
    let total = samples.len() as f64;
    JointSequencePmf::new(
        x_sizes.to_vec(),
        y_sizes.to_vec(),
        counts.into_iter().map(|c| c as f64 / total).collect(),
    )
}

/// Random joint law with iid Exp(1) weights; each cell is zeroed with
/// probability `sparsity`.
pub fn random_joint<R: Rng + ?Sized>(
    rng: &mut R,
    x_sizes: &[usize],
    y_sizes: &[usize],
    sparsity: f64,
) -> Result<JointSequencePmf> {
    let states = state_count(x_sizes.iter().chain(y_sizes).copied(), DEFAULT_STATE_CAP)?;
    loop {
        let mut w: Vec<f64> = (0..states)
            .map(|_| {
                if rng.random::<f64>() < sparsity {
                    0.0
                } else {
                    -(1.0 - rng.random::<f64>()).ln()
                }
            })
            .collect();
        let total: f64 = w.iter().sum();
        if total > 0.0 {
            w.iter_mut().for_each(|p| *p /= total);
            return JointSequencePmf::new(x_sizes.to_vec(), y_sizes.to_vec(), w);
        }
    }
}

/// Random joint law without feedback: an arbitrary input law `p(x^n)` passed
/// through a causal channel `prod_i p(y_i | x^i, y^{i-1})`.
pub fn random_feedback_free_joint<R: Rng + ?Sized>(
    rng: &mut R,
    x_sizes: &[usize],
    y_sizes: &[usize],
) -> Result<JointSequencePmf> {
    let n = x_sizes.len();
    let input = random_joint(rng, x_sizes, &vec![1; n], 0.0)?;
    // channel kernels keyed by (i, x^i, y^{i-1})
    let mut kernels: HashMap<(usize, Vec<usize>, Vec<usize>), Vec<f64>> = HashMap::new();
    let states = state_count(x_sizes.iter().chain(y_sizes).copied(), DEFAULT_STATE_CAP)?;
    let mut probs = vec![0.0; states];
    let mut template_probs = vec![0.0; states];
    template_probs[0] = 1.0;
    let template = JointSequencePmf::new(x_sizes.to_vec(), y_sizes.to_vec(), template_probs)?;
    template.for_each_state(|digits, _| {
        let (x, y) = digits.split_at(n);
        let px = input.probs[input.index_of(x, &vec![0; n]).expect("valid")];
        let mut p = px;
        for i in 0..n {
            let key = (i, x[..=i].to_vec(), y[..i].to_vec());
            let kernel = kernels.entry(key).or_insert_with(|| {
                let w: Vec<f64> = (0..y_sizes[i]).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
                let s: f64 = w.iter().sum();
                w.into_iter().map(|v| v / s).collect()
            });
            p *= kernel[y[i]];
        }
        probs[template.index_of(x, y).expect("valid")] = p;
    });
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    JointSequencePmf::new(x_sizes.to_vec(), y_sizes.to_vec(), probs)
}

/// Random chain of `len` nested groupings starting at the one-block grouping,
/// each obtained from its predecessor by adding one random cut. Requires
/// `len <= n`.
pub fn random_refinement_chain<R: Rng + ?Sized>(rng: &mut R, n: usize, len: usize) -> Result<Vec<Grouping>> {
    if len == 0 || len > n {
        return Err(Error::InvalidJoint(format!("cannot build a chain of {len} groupings for n = {n}")));
    }
    let mut free: Vec<usize> = (1..n).collect();
    let mut cuts = Vec::new();
    let mut chain = vec![Grouping::one_block(n)];
    while chain.len() < len {
        let c = free.swap_remove(rng.random_range(0..free.len()));
        cuts.push(c);
        chain.push(Grouping::from_cuts(n, &cuts)?);
    }
    Ok(chain)
}
