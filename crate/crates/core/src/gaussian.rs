//! AWGN channel with feedback, `dY_t = X_t dt + dB_t`.
//!
//! Paths are simulated by Euler–Maruyama on a uniform grid and stored as
//! increments `ΔY_k = X_k dt + sqrt(dt) N_k`. The input at step `k` may depend
//! on a latent variable `U` drawn once per path and on the output observed up
//! to `k·dt − Δ`, i.e. on the increments with index `< k − Δ/dt`.
//!
//! Directed information is estimated through the causal-MMSE identity
//! `I(X → Y) = ½ ∫ E[(X_t − E[X_t | Y_0^t])²] dt`, with the conditional mean
//! supplied by one of the filters below.

use std::io::{self, Write};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::{estimate, DiEstimate, McConfig};
use crate::paths::SamplePath;
use crate::pmf::FinitePmf;
use crate::report::fmt_sig;
use crate::rng::RngSpec;

pub const DEFAULT_POWER_BOUND: f64 = 1e3;

/// Law of the latent variable `U`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LatentPrior {
    /// `U ~ N(0, variance)`.
    Gaussian { variance: f64 },
    Finite(FinitePmf),
}

impl LatentPrior {
    pub fn standard_gaussian() -> Self {
        LatentPrior::Gaussian { variance: 1.0 }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            LatentPrior::Gaussian { variance } => {
                let z: f64 = rng.sample(StandardNormal);
                variance.sqrt() * z
            }
            LatentPrior::Finite(pmf) => pmf.sample(rng),
        }
    }
}

/// Rule producing `X_t` from the latent `U` and the delayed output `Y_{t−Δ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SignalPolicy {
    /// `X_t = 0`.
    Zero,
    /// `X_t = U`, a constant signal.
    Latent,
    /// `X_t = U + gain·tanh(Y_{t−Δ})`.
    LatentWithFeedback { gain: f64 },
    /// `X_t = Y_{t−Δ}` (and 0 before `Δ`): the input echoes the output.
    DelayedEcho,
}

impl SignalPolicy {
    pub fn uses_feedback(&self) -> bool {
        matches!(self, SignalPolicy::LatentWithFeedback { .. } | SignalPolicy::DelayedEcho)
    }

    pub fn uses_latent(&self) -> bool {
        matches!(self, SignalPolicy::Latent | SignalPolicy::LatentWithFeedback { .. })
    }

    #[inline]
    fn eval(&self, latent: f64, y_delayed: f64) -> f64 {
        match *self {
            SignalPolicy::Zero => 0.0,
            SignalPolicy::Latent => latent,
            SignalPolicy::LatentWithFeedback { gain } => latent + gain * y_delayed.tanh(),
            SignalPolicy::DelayedEcho => y_delayed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianFeedbackModel {
    horizon: f64,
    dt: f64,
    policy: SignalPolicy,
    delay_steps: Option<usize>,
    prior: LatentPrior,
    power_bound: f64,
}

impl GaussianFeedbackModel {
    /// `delay = None` means no feedback. Feedback policies need a delay of at
    /// least one grid step; the delay is rounded to a whole number of steps.
    pub fn new(
        horizon: f64,
        dt: f64,
        policy: SignalPolicy,
        delay: Option<f64>,
        prior: LatentPrior,
    ) -> Result<Self> {
        if !(horizon >= 0.0) || !horizon.is_finite() {
            return Err(Error::InvalidModel(format!("horizon must be >= 0, got {horizon}")));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidModel(format!("dt must be > 0, got {dt}")));
        }
        let steps = (horizon / dt).round();
        if (steps * dt - horizon).abs() > 1e-9 * horizon.max(dt) {
            return Err(Error::InvalidModel(format!(
                "horizon {horizon} is not a whole number of steps dt = {dt}"
            )));
        }
        if let LatentPrior::Gaussian { variance } = prior {
            if !(variance > 0.0) || !variance.is_finite() {
                return Err(Error::InvalidModel(format!("prior variance must be > 0, got {variance}")));
            }
        }
        let delay_steps = match delay {
            None => None,
            Some(d) => {
                let k = (d / dt).round();
                if !(d >= dt * (1.0 - 1e-9)) || k < 1.0 {
                    return Err(Error::InvalidModel(format!(
                        "feedback delay {d} is shorter than dt = {dt}"
                    )));
                }
                Some(k as usize)
            }
        };
        if policy.uses_feedback() && delay_steps.is_none() {
            return Err(Error::InvalidModel(
                "a feedback policy needs a finite delay".into(),
            ));
        }
        Ok(Self { horizon, dt, policy, delay_steps, prior, power_bound: DEFAULT_POWER_BOUND })
    }

    /// `X_t ≡ A` with `A ~ N(0, 1)`, no feedback, `dt = 10⁻³·T`.
    pub fn constant_signal(horizon: f64) -> Result<Self> {
        Self::constant_signal_with_dt(horizon, 1e-3 * horizon.max(f64::MIN_POSITIVE))
    }

    pub fn constant_signal_with_dt(horizon: f64, dt: f64) -> Result<Self> {
        Self::new(horizon, dt, SignalPolicy::Latent, None, LatentPrior::standard_gaussian())
    }

    /// `X_{t+ε} = Y_t`, zero before `ε`.
    pub fn delayed_echo(horizon: f64, dt: f64, epsilon: f64) -> Result<Self> {
        Self::new(
            horizon,
            dt,
            SignalPolicy::DelayedEcho,
            Some(epsilon),
            LatentPrior::Finite(FinitePmf::point_mass(0.0)?),
        )
    }

    pub fn with_power_bound(mut self, bound: f64) -> Self {
        self.power_bound = bound;
        self
    }

    pub fn with_prior(&self, prior: LatentPrior) -> Result<Self> {
        let delay = self.delay_steps.map(|k| k as f64 * self.dt);
        Ok(Self::new(self.horizon, self.dt, self.policy, delay, prior)?.with_power_bound(self.power_bound))
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }

    pub fn policy(&self) -> SignalPolicy {
        self.policy
    }

    pub fn prior(&self) -> &LatentPrior {
        &self.prior
    }

    pub fn delay_steps(&self) -> Option<usize> {
        self.delay_steps
    }

    /// Signal at step `k` given the latent value and the cumulative output
    /// `cum[j] = Y_{j·dt}` for `j <= k`.
    #[inline]
    fn signal_at(&self, k: usize, latent: f64, cum: &[f64]) -> f64 {
        let y_delayed = match self.delay_steps {
            Some(d) if k >= d => cum[k - d],
            _ => 0.0,
        };
        self.policy.eval(latent, y_delayed)
    }
}

/// One simulated path.
#[derive(Debug, Clone, PartialEq)]
pub struct AwgnPath {
    pub latent: f64,
    pub x: SamplePath,
    pub yinc: SamplePath,
}

/// Euler–Maruyama simulation. Draws the latent first, then one standard
/// normal per step.
pub fn simulate_awgn<R: Rng + ?Sized>(model: &GaussianFeedbackModel, rng: &mut R) -> Result<AwgnPath> {
    let n = model.steps();
    if n == 0 {
        return Err(Error::InvalidModel("zero-length horizon has nothing to simulate".into()));
    }
    let dt = model.dt;
    let sqrt_dt = dt.sqrt();
    let latent = model.prior.sample(rng);
    let mut x = Vec::with_capacity(n);
    let mut yinc = Vec::with_capacity(n);
    let mut cum = Vec::with_capacity(n + 1);
    cum.push(0.0);
    for k in 0..n {
        let xk = model.signal_at(k, latent, &cum);
        if !(xk.abs() <= model.power_bound) {
            return Err(Error::Domain(format!(
                "signal {xk} at step {k} exceeds the power bound {}",
                model.power_bound
            )));
        }
        let z: f64 = rng.sample(StandardNormal);
        let dy = xk * dt + sqrt_dt * z;
        x.push(xk);
        yinc.push(dy);
        cum.push(cum[k] + dy);
    }
    Ok(AwgnPath {
        latent,
        x: SamplePath::new(0.0, dt, x)?,
        yinc: SamplePath::new(0.0, dt, yinc)?,
    })
}

/// Posterior means `E[X_t | Y_0^t]` on the observation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterPath {
    pub mean: SamplePath,
    pub variance: Option<SamplePath>,
}

/// Running sums `cum[k] = Σ_{j<k} ΔY_j`, length `n + 1`.
fn cumulative(yinc: &SamplePath) -> Vec<f64> {
    let mut cum = Vec::with_capacity(yinc.len() + 1);
    cum.push(0.0);
    let mut acc = 0.0;
    for &dy in yinc.values() {
        acc += dy;
        cum.push(acc);
    }
    cum
}

/// Conjugate filter for a constant signal `X_t ≡ A`, `A ~ N(0, v)`:
/// `E[A | Y_0^t] = v·Y_t / (1 + v·t)` with variance `v / (1 + v·t)`.
pub fn conjugate_filter(yinc: &SamplePath, prior_variance: f64) -> Result<FilterPath> {
    if !(prior_variance > 0.0) {
        return Err(Error::Domain(format!("prior variance must be > 0, got {prior_variance}")));
    }
    let dt = yinc.dt();
    let cum = cumulative(yinc);
    let (mean, var): (Vec<f64>, Vec<f64>) = (0..yinc.len())
        .map(|k| {
            let t = k as f64 * dt;
            let denom = 1.0 + prior_variance * t;
            (prior_variance * cum[k] / denom, prior_variance / denom)
        })
        .unzip();
    Ok(FilterPath {
        mean: SamplePath::new(yinc.t0(), dt, mean)?,
        variance: Some(SamplePath::new(yinc.t0(), dt, var)?),
    })
}

/// Exact filter for the constant signal with a standard normal amplitude:
/// `E[A | Y_0^t] = Y_t / (1 + t)`, variance `1 / (1 + t)`.
pub fn exact_filter_constant_signal(yinc: &SamplePath) -> FilterPath {
    conjugate_filter(yinc, 1.0).expect("unit variance is valid")
}

/// Filter for policies whose output is a function of the delayed output
/// alone: the estimate re-evaluates the policy on the observed past, so it
/// reproduces `X_t` exactly.
pub fn replay_filter(model: &GaussianFeedbackModel, yinc: &SamplePath) -> Result<FilterPath> {
    if model.policy.uses_latent() {
        return Err(Error::InvalidModel(
            "replay filtering needs a policy that ignores the latent variable".into(),
        ));
    }
    let cum = cumulative(yinc);
    let mean = (0..yinc.len()).map(|k| model.signal_at(k, 0.0, &cum)).collect();
    Ok(FilterPath { mean: SamplePath::new(yinc.t0(), yinc.dt(), mean)?, variance: None })
}

/// Systematic resampling: indices of `n` draws from normalized `weights`
/// using the single uniform `u ∈ [0, 1)`.
fn systematic_indices(weights: &[f64], n: usize, u: f64) -> Vec<usize> {
    let total: f64 = weights.iter().sum();
    let mut out = Vec::with_capacity(n);
    let mut acc = weights[0] / total;
    let mut i = 0;
    for j in 0..n {
        let target = (j as f64 + u) / n as f64;
        while target > acc && i + 1 < weights.len() {
            i += 1;
            acc += weights[i] / total;
        }
        out.push(i);
    }
    out
}

/// Bootstrap particle filter over latent hypotheses.
///
/// Each particle carries a latent value; its signal follows from the policy
/// and the observed output. Log-weights grow by `x·ΔY − x²·dt/2` per step and
/// particles are resampled systematically when the effective sample size
/// drops below `n/2`. The estimate at step `k` uses observations before `k`.
pub fn particle_filter<R: Rng + ?Sized>(
    model: &GaussianFeedbackModel,
    yinc: &SamplePath,
    n_particles: usize,
    rng: &mut R,
) -> Result<FilterPath> {
    let LatentPrior::Finite(prior) = &model.prior else {
        return Err(Error::InvalidModel("particle filter needs a finite-support prior".into()));
    };
    if n_particles < 100 {
        return Err(Error::Domain(format!("need at least 100 particles, got {n_particles}")));
    }
    let dt = yinc.dt();
    let cum = cumulative(yinc);
    let atoms: Vec<f64> = prior.support().to_vec();
    let idx = systematic_indices(prior.probs(), n_particles, rng.random());
    let mut latents: Vec<f64> = idx.iter().map(|&i| atoms[i]).collect();
    let mut logw = vec![0.0f64; n_particles];
    let mut w = vec![0.0f64; n_particles];
    let mut xs = vec![0.0f64; n_particles];
    let mut mean = Vec::with_capacity(yinc.len());
    let mut var = Vec::with_capacity(yinc.len());

    for (k, &dy) in yinc.values().iter().enumerate() {
        let max = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            return Err(Error::WeightUnderflow {
                step: k,
                detail: format!("maximum log-weight is {max}"),
            });
        }
        let mut total = 0.0;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n_particles {
            w[i] = (logw[i] - max).exp();
            total += w[i];
            xs[i] = model.signal_at(k, latents[i], &cum);
            lo = lo.min(xs[i]);
            hi = hi.max(xs[i]);
        }
        if lo == hi {
            mean.push(lo);
            var.push(0.0);
        } else {
            let m = xs.iter().zip(&w).map(|(x, w)| x * w).sum::<f64>() / total;
            let v = xs.iter().zip(&w).map(|(x, w)| w * (x - m).powi(2)).sum::<f64>() / total;
            mean.push(m);
            var.push(v);
        }
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for i in 0..n_particles {
            logw[i] += xs[i] * dy - 0.5 * xs[i] * xs[i] * dt - max;
            let wi = logw[i].exp();
            sum += wi;
            sum_sq += wi * wi;
        }
        if !(sum > 0.0) || !sum.is_finite() {
            return Err(Error::WeightUnderflow {
                step: k,
                detail: format!("weight sum {sum} after observing ΔY = {dy}"),
            });
        }
        let ess = sum * sum / sum_sq;
        if ess < 0.5 * n_particles as f64 {
            let wts: Vec<f64> = logw.iter().map(|l| l.exp()).collect();
            let pick = systematic_indices(&wts, n_particles, rng.random());
            latents = pick.iter().map(|&i| latents[i]).collect();
            logw.iter_mut().for_each(|l| *l = 0.0);
        }
    }
    Ok(FilterPath {
        mean: SamplePath::new(yinc.t0(), dt, mean)?,
        variance: Some(SamplePath::new(yinc.t0(), dt, var)?),
    })
}

/// `½ Σ_k (X_k − X̂_k)² dt`, the rectangle-rule causal squared-error integral.
pub fn causal_mmse_integral(x: &SamplePath, filter: &FilterPath) -> Result<f64> {
    if !x.same_grid(&filter.mean) {
        return Err(Error::GridMismatch(format!(
            "signal has {} samples of dt={}, filter has {} of dt={}",
            x.len(),
            x.dt(),
            filter.mean.len(),
            filter.mean.dt()
        )));
    }
    let sq: f64 = x
        .values()
        .iter()
        .zip(filter.mean.values())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(0.5 * sq * x.dt())
}

/// How `E[X_t | Y_0^t]` is computed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FilterStrategy {
    /// Conjugate Gaussian filter; needs the constant-signal policy with a
    /// Gaussian prior.
    Conjugate,
    Particle { n_particles: usize },
    /// See [`replay_filter`].
    Replay,
}

/// Runs the selected filter on one observation path.
pub fn run_filter<R: Rng + ?Sized>(
    model: &GaussianFeedbackModel,
    strategy: FilterStrategy,
    yinc: &SamplePath,
    rng: &mut R,
) -> Result<FilterPath> {
    match strategy {
        FilterStrategy::Conjugate => match (&model.prior, model.policy) {
            (LatentPrior::Gaussian { variance }, SignalPolicy::Latent) => conjugate_filter(yinc, *variance),
            _ => Err(Error::InvalidModel(
                "conjugate filtering needs a constant signal with a Gaussian prior".into(),
            )),
        },
        FilterStrategy::Particle { n_particles } => particle_filter(model, yinc, n_particles, rng),
        FilterStrategy::Replay => replay_filter(model, yinc),
    }
}

/// Monte Carlo mean of the causal squared-error integral, i.e. the directed
/// information `I(X_0^T → Y_0^T)` in nats.
pub fn directed_info_gaussian_mc(
    model: &GaussianFeedbackModel,
    strategy: FilterStrategy,
    mc: McConfig,
    rng: RngSpec,
) -> Result<DiEstimate> {
    if model.steps() == 0 {
        return Ok(DiEstimate::exact(0.0, rng.master_seed));
    }
    estimate(mc, rng, |_, stream| {
        let path = simulate_awgn(model, stream)?;
        let filter = run_filter(model, strategy, &path.yinc, stream)?;
        causal_mmse_integral(&path.x, &filter)
    })
}

/// `½ ln(1 + T)`, the directed information of the constant signal
/// `X_t ≡ A ~ N(0, 1)` observed over `[0, T)`.
pub fn closed_form_di_constant_signal(horizon: f64) -> Result<f64> {
    if !(horizon >= 0.0) {
        return Err(Error::Domain(format!("horizon must be >= 0, got {horizon}")));
    }
    Ok(0.5 * horizon.ln_1p())
}

/// Monte Carlo estimate of `D(P_Y || Q_Y)` via the mismatched-filter identity
/// `½ E_P ∫ [(X − E_Q[X|Y])² − (X − E_P[X|Y])²] dt`. Paths are drawn under
/// `model`; the mismatched filter assumes `prior_q` for the latent.
pub fn mismatched_relent_gaussian(
    model: &GaussianFeedbackModel,
    prior_q: LatentPrior,
    strategy: FilterStrategy,
    mc: McConfig,
    rng: RngSpec,
) -> Result<DiEstimate> {
    if model.steps() == 0 {
        return Ok(DiEstimate::exact(0.0, rng.master_seed));
    }
    let model_q = model.with_prior(prior_q)?;
    estimate(mc, rng, |_, stream| {
        let path = simulate_awgn(model, stream)?;
        let fp = run_filter(model, strategy, &path.yinc, stream)?;
        let fq = run_filter(&model_q, strategy, &path.yinc, stream)?;
        let x = path.x.values();
        let dt = path.x.dt();
        let diff: f64 = x
            .iter()
            .zip(fq.mean.values().iter().zip(fp.mean.values()))
            .map(|(x, (q, p))| (x - q).powi(2) - (x - p).powi(2))
            .sum();
        Ok(0.5 * diff * dt)
    })
}

/// Closed-form `D(P_Y || Q_Y)` for the constant signal with `A ~ N(0, v_p)`
/// under `P` and `A ~ N(0, v_q)` under `Q`. The output path depends on `A`
/// only through `Y_T`, so the divergence equals that of the two centred
/// normal laws of `Y_T` with variances `v·T² + T`.
pub fn constant_signal_output_kl(horizon: f64, var_p: f64, var_q: f64) -> f64 {
    if horizon == 0.0 {
        return 0.0;
    }
    let sp = var_p * horizon * horizon + horizon;
    let sq = var_q * horizon * horizon + horizon;
    let r = sp / sq;
    0.5 * (r - 1.0 - r.ln())
}

/// Writes `time,x,y_increment,x_hat` rows.
pub fn write_path_csv<W: Write>(mut w: W, path: &AwgnPath, filter: &FilterPath) -> io::Result<()> {
    writeln!(w, "time,x,y_increment,x_hat")?;
    for k in 0..path.x.len() {
        writeln!(
            w,
            "{},{},{},{}",
            fmt_sig(path.x.time(k)),
            fmt_sig(path.x.values()[k]),
            fmt_sig(path.yinc.values()[k]),
            fmt_sig(filter.mean.values()[k])
        )?;
    }
    Ok(())
}
