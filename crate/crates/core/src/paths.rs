//! Sampled trajectories, point-process event times and time partitions.
//!
//! A [`SamplePath`] stores values on the uniform grid `t0 + k·dt`, sample `k`
//! standing for the interval `[t0 + k·dt, t0 + (k+1)·dt)`. Partitions are
//! expressed in time measured from the start of the path and are snapped to
//! the grid when a path is chopped.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used when comparing breakpoints for equality.
const BREAKPOINT_EPS: f64 = 1e-12;

/// Real-valued trajectory on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePath {
    t0: f64,
    dt: f64,
    values: Vec<f64>,
}

impl SamplePath {
    pub fn new(t0: f64, dt: f64, values: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidPath(format!("dt must be positive, got {dt}")));
        }
        if !t0.is_finite() {
            return Err(Error::InvalidPath(format!("t0 must be finite, got {t0}")));
        }
        if values.is_empty() {
            return Err(Error::InvalidPath("a path needs at least one sample".into()));
        }
        Ok(Self { t0, dt, values })
    }

    /// Builds a path and checks that `len·dt` matches `horizon` within one step.
    pub fn with_horizon(t0: f64, dt: f64, values: Vec<f64>, horizon: f64) -> Result<Self> {
        let path = Self::new(t0, dt, values)?;
        if (path.duration() - horizon).abs() > dt {
            return Err(Error::InvalidPath(format!(
                "{} samples of dt={} do not cover horizon {}",
                path.len(),
                dt,
                horizon
            )));
        }
        Ok(path)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.values.len() as f64 * self.dt
    }

    /// Time stamp of sample `k`.
    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    /// True when both paths live on the same grid.
    pub fn same_grid(&self, other: &SamplePath) -> bool {
        self.len() == other.len()
            && (self.dt - other.dt).abs() <= BREAKPOINT_EPS * self.dt
            && (self.t0 - other.t0).abs() <= BREAKPOINT_EPS * self.dt.max(self.t0.abs())
    }

    /// Sums blocks of `factor` consecutive samples. Used to move increment
    /// paths onto a coarser grid with step `factor·dt`.
    pub fn aggregate_increments(&self, factor: usize) -> Result<SamplePath> {
        if factor == 0 || !self.len().is_multiple_of(factor) {
            return Err(Error::InvalidPath(format!(
                "cannot aggregate {} samples in blocks of {}",
                self.len(),
                factor
            )));
        }
        let values = self
            .values
            .chunks(factor)
            .map(|c| c.iter().sum())
            .collect();
        SamplePath::new(self.t0, self.dt * factor as f64, values)
    }

    /// Splits the path along `partition`. Breakpoints are snapped to the
    /// nearest grid point; segment `i` covers `[t_{i-1}, t_i)`.
    pub fn chop(&self, partition: &TimePartition) -> Result<Vec<SamplePath>> {
        let idx = self.snap(partition)?;
        Ok(idx
            .windows(2)
            .map(|w| SamplePath {
                t0: self.time(w[0]),
                dt: self.dt,
                values: self.values[w[0]..w[1]].to_vec(),
            })
            .collect())
    }

    /// Grid indices of the partition breakpoints.
    pub fn snap(&self, partition: &TimePartition) -> Result<Vec<usize>> {
        let n = self.len();
        let duration = self.duration();
        let mut out = Vec::with_capacity(partition.breakpoints().len());
        for &b in partition.breakpoints() {
            if b < -0.5 * self.dt || b > duration + 0.5 * self.dt {
                return Err(Error::InvalidPartition(format!(
                    "breakpoint {b} lies outside [0, {duration}]"
                )));
            }
            let k = (b / self.dt).round();
            if (b - k * self.dt).abs() > 0.5 * self.dt * (1.0 + BREAKPOINT_EPS) {
                return Err(Error::InvalidPartition(format!(
                    "breakpoint {b} is more than dt/2 from the grid"
                )));
            }
            let k = k as usize;
            if let Some(&prev) = out.last() {
                if k <= prev {
                    return Err(Error::InvalidPartition(format!(
                        "breakpoint {b} collapses onto grid index {prev}"
                    )));
                }
            }
            out.push(k);
        }
        if out.last() != Some(&n) {
            return Err(Error::InvalidPartition(format!(
                "partition ends at {} but the path spans {} samples",
                partition.horizon(),
                n
            )));
        }
        Ok(out)
    }
}

/// Concatenates consecutive segments back into a single path.
pub fn concat(segments: &[SamplePath]) -> Result<SamplePath> {
    let first = segments
        .first()
        .ok_or_else(|| Error::InvalidPath("nothing to concatenate".into()))?;
    let mut values = Vec::with_capacity(segments.iter().map(SamplePath::len).sum());
    for (i, seg) in segments.iter().enumerate() {
        if (seg.dt - first.dt).abs() > BREAKPOINT_EPS * first.dt {
            return Err(Error::GridMismatch(format!("segment {i} has dt {}", seg.dt)));
        }
        values.extend_from_slice(&seg.values);
    }
    SamplePath::new(first.t0, first.dt, values)
}

/// Strictly increasing epochs of a point process on `[0, horizon)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventTimes {
    horizon: f64,
    epochs: Vec<f64>,
}

impl EventTimes {
    pub fn new(horizon: f64, epochs: Vec<f64>) -> Result<Self> {
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::InvalidPath(format!("horizon must be positive, got {horizon}")));
        }
        if let Some(bad) = epochs.iter().find(|&&e| !(0.0..horizon).contains(&e)) {
            return Err(Error::InvalidPath(format!(
                "epoch {bad} outside [0, {horizon})"
            )));
        }
        if epochs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidPath("epochs must be strictly increasing".into()));
        }
        Ok(Self { horizon, epochs })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn epochs(&self) -> &[f64] {
        &self.epochs
    }

    pub fn len(&self) -> usize {
        self.epochs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.epochs.is_empty()
    }

    /// Most recent epoch at or before `t`, if any.
    pub fn last_before(&self, t: f64) -> Option<f64> {
        let k = self.epochs.partition_point(|&e| e <= t);
        k.checked_sub(1).map(|i| self.epochs[i])
    }
}

/// Finite ordered breakpoints `0 = t_0 < t_1 < ... < t_n = T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimePartition {
    breakpoints: Vec<f64>,
}

impl TimePartition {
    pub fn new(breakpoints: Vec<f64>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::InvalidPartition(
                "need at least the endpoints 0 and T".into(),
            ));
        }
        if breakpoints[0] != 0.0 {
            return Err(Error::InvalidPartition(format!(
                "first breakpoint must be 0, got {}",
                breakpoints[0]
            )));
        }
        if breakpoints.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidPartition("breakpoints must be finite".into()));
        }
        if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidPartition(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        Ok(Self { breakpoints })
    }

    /// `n` equal subintervals of `[0, horizon]`.
    pub fn uniform(horizon: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidPartition("need at least one subinterval".into()));
        }
        let mut b: Vec<f64> = (0..n).map(|i| horizon * i as f64 / n as f64).collect();
        b.push(horizon);
        Self::new(b)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn horizon(&self) -> f64 {
        *self.breakpoints.last().expect("validated non-empty")
    }

    /// Number of subintervals.
    pub fn intervals(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn mesh(&self) -> f64 {
        self.breakpoints
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    /// Adds the points of `extra` to the partition.
    pub fn refine(&self, extra: &[f64]) -> Result<TimePartition> {
        let horizon = self.horizon();
        if let Some(bad) = extra.iter().find(|&&e| !(e > 0.0 && e < horizon)) {
            return Err(Error::InvalidPartition(format!(
                "refinement point {bad} outside (0, {horizon})"
            )));
        }
        let eps = BREAKPOINT_EPS * horizon;
        let mut all: Vec<f64> = self.breakpoints.iter().chain(extra).copied().collect();
        all.sort_by(f64::total_cmp);
        all.dedup_by(|b, a| (*b - *a).abs() <= eps);
        // dedup keeps the first of each run, so T may have been replaced
        *all.last_mut().expect("non-empty") = horizon;
        TimePartition::new(all)
    }

    fn contains(&self, t: f64) -> bool {
        let eps = BREAKPOINT_EPS * self.horizon();
        let k = self.breakpoints.partition_point(|&b| b < t - eps);
        self.breakpoints
            .get(k)
            .is_some_and(|&b| (b - t).abs() <= eps)
    }
}

/// True iff every breakpoint of `coarse` is also a breakpoint of `fine`.
pub fn is_refinement(fine: &TimePartition, coarse: &TimePartition) -> bool {
    coarse.breakpoints.iter().all(|&b| fine.contains(b))
}
