//! Poisson channel with feedback through the output events.
//!
//! At every output event the input intensity is redrawn from `p_X`,
//! independently of the past, and stays fixed until the next event. The
//! inter-event times are therefore iid copies of `Y` with `Y | X = x ~ Exp(x)`
//! and the causal estimate of the intensity depends only on the time `s`
//! elapsed since the last event: `E[X_t | Y_0^t] = g(s) = E[X | Y >= s]`.
//!
//! The directed information rate is `I(X;Y) / E[1/X]`. [`di_rate_analytic`]
//! evaluates it with `h(Y)` by quadrature; [`di_rate_mc`] estimates it as the
//! time-averaged Poisson loss of the renewal filter on simulated paths.

use std::io::{self, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::estimate::{estimate, DiEstimate, McConfig};
use crate::loss::poisson_loss_unchecked;
use crate::paths::EventTimes;
use crate::pmf::FinitePmf;
use crate::quad::adaptive_simpson_panels;
use crate::report::fmt_sig;
use crate::rng::RngSpec;

/// Quadrature upper limit in units of `1 / min(support)`.
const T_MAX_SCALE: f64 = 50.0;
/// Absolute error target for `h(Y)`.
const ENTROPY_TOL: f64 = 1e-8;
/// Tolerance handed to the adaptive integrator.
const QUAD_TOL: f64 = 1e-13;
const MAX_TAIL_EXTENSIONS: usize = 8;
/// Burn-in length in units of `1 / min(support)`.
const BURN_IN_SCALE: f64 = 10.0;
/// Simpson step for segment integrals in units of `1 / min(support)`.
const SEGMENT_STEP_SCALE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoissonFeedbackModel {
    pmf: FinitePmf,
    horizon: f64,
}

impl PoissonFeedbackModel {
    pub fn new(pmf: FinitePmf, horizon: f64) -> Result<Self> {
        if let Some(bad) = pmf.support().iter().find(|&&x| !(x > 0.0)) {
            return Err(Error::InvalidModel(format!(
                "intensity {bad} is not positive; the channel would stop"
            )));
        }
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::InvalidModel(format!("horizon must be > 0, got {horizon}")));
        }
        Ok(Self { pmf, horizon })
    }

    pub fn pmf(&self) -> &FinitePmf {
        &self.pmf
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// `10 / min(support)` seconds.
    pub fn burn_in(&self) -> f64 {
        BURN_IN_SCALE / self.pmf.min_support()
    }
}

/// Output events with the intensity chosen at each of them. The first event
/// sits at time 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelTrajectory {
    events: EventTimes,
    intensities: Vec<f64>,
}

impl ChannelTrajectory {
    pub fn new(events: EventTimes, intensities: Vec<f64>) -> Result<Self> {
        if events.len() != intensities.len() || events.is_empty() {
            return Err(Error::InvalidPath(format!(
                "{} events but {} intensities",
                events.len(),
                intensities.len()
            )));
        }
        Ok(Self { events, intensities })
    }

    pub fn events(&self) -> &EventTimes {
        &self.events
    }

    pub fn intensities(&self) -> &[f64] {
        &self.intensities
    }

    pub fn horizon(&self) -> f64 {
        self.events.horizon()
    }

    /// `(start, end, intensity)` for every constant piece of the input.
    pub fn segments(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let e = self.events.epochs();
        let horizon = self.horizon();
        (0..e.len()).map(move |i| {
            let end = e.get(i + 1).copied().unwrap_or(horizon);
            (e[i], end, self.intensities[i])
        })
    }

    /// `(start, intensity)` pairs, one per event.
    pub fn intensity_segments(&self) -> Vec<(f64, f64)> {
        self.events.epochs().iter().copied().zip(self.intensities.iter().copied()).collect()
    }

    /// Intensity in force at time `t`.
    pub fn intensity_at(&self, t: f64) -> f64 {
        let k = self.events.epochs().partition_point(|&e| e <= t);
        self.intensities[k.saturating_sub(1)]
    }

    /// Time elapsed since the most recent event at or before `t`.
    pub fn time_since_last_event(&self, t: f64) -> f64 {
        t - self.events.last_before(t).unwrap_or(0.0)
    }

    /// Fraction of `[start, end)` spent at intensity `x`.
    pub fn time_fraction_at(&self, x: f64, start: f64, end: f64) -> f64 {
        let mut total = 0.0;
        for (a, b, v) in self.segments() {
            if v == x {
                total += (b.min(end) - a.max(start)).max(0.0);
            }
        }
        total / (end - start)
    }
}

/// Simulates the channel on `[0, T)`: an event at 0, then for each event a
/// fresh intensity from `p_X` and an `Exp(intensity)` wait to the next one.
pub fn simulate_channel<R: Rng + ?Sized>(model: &PoissonFeedbackModel, rng: &mut R) -> Result<ChannelTrajectory> {
    simulate_until(&model.pmf, model.horizon, rng)
}

fn simulate_until<R: Rng + ?Sized>(pmf: &FinitePmf, horizon: f64, rng: &mut R) -> Result<ChannelTrajectory> {
    let mut epochs = Vec::new();
    let mut intensities = Vec::new();
    let mut t = 0.0;
    while t < horizon {
        let x = pmf.sample(rng);
        epochs.push(t);
        intensities.push(x);
        let u: f64 = rng.random();
        t += -(1.0 - u).ln() / x;
    }
    ChannelTrajectory::new(EventTimes::new(horizon, epochs)?, intensities)
}

/// Renewal filter `g(s) = E[X | Y >= s] = Σ x e^{−sx} p(x) / Σ e^{−sx} p(x)`.
///
/// Exponents are shifted by the smallest atom, so the ratio stays finite for
/// every finite `s`.
pub fn g_of_t(pmf: &FinitePmf, t: f64) -> f64 {
    RenewalFilter::new(pmf).g(t)
}

/// Precomputed atoms of `p_X` for fast evaluation of `g`.
#[derive(Debug, Clone)]
struct RenewalFilter {
    xmin: f64,
    /// `(x − xmin, x, p)` for every atom.
    atoms: Vec<(f64, f64, f64)>,
    degenerate: bool,
}

impl RenewalFilter {
    fn new(pmf: &FinitePmf) -> Self {
        let xmin = pmf.min_support();
        Self {
            xmin,
            atoms: pmf.atoms().map(|(x, p)| (x - xmin, x, p)).collect(),
            degenerate: pmf.is_degenerate(),
        }
    }

    #[inline]
    fn g(&self, s: f64) -> f64 {
        if self.degenerate {
            return self.xmin;
        }
        let mut num = 0.0;
        let mut den = 0.0;
        for &(shift, x, p) in &self.atoms {
            let w = p * (-s * shift).exp();
            num += x * w;
            den += w;
        }
        num / den
    }
}

/// Law of the input at a typical time: `q(x) = (p(x)/x) / E[1/X]`.
pub fn stationary_intensity_pmf(pmf: &FinitePmf) -> Result<FinitePmf> {
    let inv_mean = pmf.expect(|x| 1.0 / x);
    let probs: Vec<f64> = pmf
        .support()
        .iter()
        .zip(pmf.probs())
        .map(|(x, p)| p / x / inv_mean)
        .collect();
    let total: f64 = probs.iter().sum();
    FinitePmf::new(pmf.support().to_vec(), probs.iter().map(|p| p / total).collect())
}

/// Density of the time since the last event seen from a typical time:
/// `f_τ(t) = Σ_x e^{−tx} p(x) / E[1/X]`.
pub fn tau_density(pmf: &FinitePmf, t: f64) -> f64 {
    if t < 0.0 {
        return 0.0;
    }
    pmf.expect(|x| (-t * x).exp()) / pmf.expect(|x| 1.0 / x)
}

/// CDF of [`tau_density`].
pub fn tau_cdf(pmf: &FinitePmf, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    pmf.expect(|x| -(-t * x).exp_m1() / x) / pmf.expect(|x| 1.0 / x)
}

/// Inter-event density `f_Y(y) = Σ_x p(x) x e^{−xy}`.
pub fn y_density(pmf: &FinitePmf, y: f64) -> f64 {
    if y < 0.0 {
        return 0.0;
    }
    pmf.expect(|x| x * (-x * y).exp())
}

/// `ln f_Y(y)` by log-sum-exp.
fn ln_y_density(atoms: &[(f64, f64)], y: f64) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for &(lw, x) in atoms {
        best = best.max(lw - x * y);
    }
    let s: f64 = atoms.iter().map(|&(lw, x)| (lw - x * y - best).exp()).sum();
    best + s.ln()
}

/// `(ln(p·x), x)` for every atom.
fn log_weights(pmf: &FinitePmf) -> Vec<(f64, f64)> {
    pmf.atoms().map(|(x, p)| ((p * x).ln(), x)).collect()
}

/// Integration knots on `[0, t_max]` at geometric multiples of the shortest
/// time scale `1 / max(support)`.
fn knots(pmf: &FinitePmf, t_max: f64) -> Vec<f64> {
    let mut k = vec![0.0];
    let mut t = 0.25 / pmf.max_support();
    while t < t_max {
        k.push(t);
        t *= 2.0;
    }
    k.push(t_max);
    k
}

/// `∫_t^∞ f_Y` and `∫_t^∞ y f_Y` in closed form.
fn tail_moments(pmf: &FinitePmf, t: f64) -> (f64, f64) {
    (
        pmf.expect(|x| (-x * t).exp()),
        pmf.expect(|x| (-x * t).exp() * (t + 1.0 / x)),
    )
}

/// Differential entropy of `Y` for a pmf whose smallest atom is 1.
fn entropy_normalized(pmf: &FinitePmf) -> Result<f64> {
    let lw = log_weights(pmf);
    let xmin = pmf.min_support();
    let p_min = pmf.atoms().find(|&(x, _)| x == xmin).map(|(_, p)| p).unwrap_or(1.0);
    let mut t_max = T_MAX_SCALE / xmin;
    for _ in 0..MAX_TAIL_EXTENSIONS {
        // for y >= t_max: 0 <= −f ln f <= f·(c + xmin·y), with f >= p_min·xmin·e^{−xmin·y}
        let (m0, m1) = tail_moments(pmf, t_max);
        let c = -(p_min * xmin).ln();
        let bound = c.max(0.0) * m0 + xmin * m1;
        if bound <= ENTROPY_TOL {
            let body = adaptive_simpson_panels(
                |y| {
                    let l = ln_y_density(&lw, y);
                    -l.exp() * l
                },
                &knots(pmf, t_max),
                QUAD_TOL,
            )?;
            return Ok(body + 0.5 * bound);
        }
        t_max *= 2.0;
    }
    Err(Error::Quadrature(format!(
        "entropy tail bound stays above {ENTROPY_TOL} up to t = {t_max}"
    )))
}

/// Differential entropy `h(Y) = −∫ f_Y ln f_Y` in nats.
///
/// The pmf is first rescaled so its smallest atom is 1, which makes the
/// quadrature grid scale free; `h` shifts by `−ln(min support)`.
pub fn h_y(pmf: &FinitePmf) -> Result<f64> {
    check_positive(pmf)?;
    let s = pmf.min_support();
    Ok(entropy_normalized(&pmf.scaled(1.0 / s)?)? - s.ln())
}

/// `h(Y | X) = Σ p(x) (1 − ln x) = 1 − E[ln X]`.
pub fn h_y_given_x(pmf: &FinitePmf) -> f64 {
    pmf.expect(|x| 1.0 - x.ln())
}

/// `I(X; Y) = h(Y) − h(Y|X)` for `Y | X = x ~ Exp(x)`. Scale invariant.
pub fn mutual_info_exp_channel(pmf: &FinitePmf) -> Result<f64> {
    check_positive(pmf)?;
    if pmf.is_degenerate() {
        return Ok(0.0);
    }
    let norm = pmf.scaled(1.0 / pmf.min_support())?;
    Ok(entropy_normalized(&norm)? - h_y_given_x(&norm))
}

/// Directed information rate `(h(Y) − 1 + E[ln X]) / E[1/X]` in nats per
/// second.
pub fn di_rate_analytic(pmf: &FinitePmf) -> Result<f64> {
    Ok(mutual_info_exp_channel(pmf)? / pmf.expect(|x| 1.0 / x))
}

/// `E[Y]` by quadrature of `y f_Y(y)` with the exact exponential tail.
pub fn mean_y_quadrature(pmf: &FinitePmf) -> Result<f64> {
    check_positive(pmf)?;
    let t_max = T_MAX_SCALE / pmf.min_support();
    let body = adaptive_simpson_panels(|y| y * y_density(pmf, y), &knots(pmf, t_max), QUAD_TOL)?;
    Ok(body + tail_moments(pmf, t_max).1)
}

fn check_positive(pmf: &FinitePmf) -> Result<()> {
    match pmf.support().iter().find(|&&x| !(x > 0.0)) {
        Some(bad) => Err(Error::InvalidPmf(format!("intensity {bad} is not positive"))),
        None => Ok(()),
    }
}

/// Time integrals of the renewal filter over a window of one trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RenewalIntegrals {
    /// `∫ ℓ(X_t, g(t − L_t)) dt`.
    pub loss: f64,
    /// `∫ g ln g (t − L_t) dt`.
    pub g_log_g: f64,
    /// `∫ X_t ln X_t dt`.
    pub x_log_x: f64,
    pub duration: f64,
}

/// Integrates the filter quantities over `[start, end)` segment by segment
/// with composite Simpson, step `<= 10⁻³ / min(support)`.
pub fn renewal_integrals(traj: &ChannelTrajectory, pmf: &FinitePmf, start: f64, end: f64) -> RenewalIntegrals {
    let filter = RenewalFilter::new(pmf);
    let h_max = SEGMENT_STEP_SCALE / pmf.min_support();
    let mut out = RenewalIntegrals { duration: end - start, ..Default::default() };
    for (a, b, x) in traj.segments() {
        let lo = a.max(start);
        let hi = b.min(end);
        if hi <= lo {
            continue;
        }
        let (s0, s1) = (lo - a, hi - a);
        let xlx = x * x.ln();
        let (loss, glg) = simpson2(s0, s1, h_max, |s| {
            let g = filter.g(s);
            let lg = g.ln();
            (xlx - x * lg - x + g, g * lg)
        });
        out.loss += loss;
        out.g_log_g += glg;
        out.x_log_x += xlx * (s1 - s0);
    }
    out
}

/// Composite Simpson for a pair of integrands sharing evaluations.
#[inline]
fn simpson2<F: Fn(f64) -> (f64, f64)>(a: f64, b: f64, max_step: f64, f: F) -> (f64, f64) {
    let len = b - a;
    let mut n = ((len / max_step).ceil() as usize).max(2);
    n += n % 2;
    let h = len / n as f64;
    let (fa0, fa1) = f(a);
    let (fb0, fb1) = f(b);
    let (mut s0, mut s1) = (fa0 + fb0, fa1 + fb1);
    for i in 1..n {
        let (v0, v1) = f(a + i as f64 * h);
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s0 += w * v0;
        s1 += w * v1;
    }
    (s0 * h / 3.0, s1 * h / 3.0)
}

/// Monte Carlo directed information rate: per replica, simulate past the
/// burn-in, then average `ℓ(X_t, g(t − L_t))` over the next `T` seconds.
pub fn di_rate_mc(model: &PoissonFeedbackModel, mc: McConfig, rng: RngSpec) -> Result<DiEstimate> {
    let burn = model.burn_in();
    let end = burn + model.horizon;
    estimate(mc, rng, |_, stream| {
        let traj = simulate_until(&model.pmf, end, stream)?;
        Ok(renewal_integrals(&traj, &model.pmf, burn, end).loss / model.horizon)
    })
}

/// Simulates one trajectory covering burn-in plus horizon and returns it with
/// the start of the measurement window.
pub fn simulate_with_burn_in<R: Rng + ?Sized>(model: &PoissonFeedbackModel, rng: &mut R) -> Result<(ChannelTrajectory, f64)> {
    let burn = model.burn_in();
    Ok((simulate_until(&model.pmf, burn + model.horizon, rng)?, burn))
}

/// Monte Carlo estimate of `D(P_Y || Q_Y)` on `[0, T)` from the
/// mismatched-filter identity `E_P ∫ [ℓ(X, g_Q) − ℓ(X, g_P)] dt`.
pub fn mismatched_relent_poisson(
    p: &FinitePmf,
    q: &FinitePmf,
    horizon: f64,
    mc: McConfig,
    rng: RngSpec,
) -> Result<DiEstimate> {
    let model = PoissonFeedbackModel::new(p.clone(), horizon)?;
    check_positive(q)?;
    let fp = RenewalFilter::new(p);
    let fq = RenewalFilter::new(q);
    let h_max = SEGMENT_STEP_SCALE / p.min_support().min(q.min_support());
    estimate(mc, rng, |_, stream| {
        let traj = simulate_channel(&model, stream)?;
        let mut total = 0.0;
        for (a, b, x) in traj.segments() {
            let (v, _) = simpson2(0.0, b - a, h_max, |s| {
                (poisson_loss_unchecked(x, fq.g(s)) - poisson_loss_unchecked(x, fp.g(s)), 0.0)
            });
            total += v;
        }
        Ok(total)
    })
}

/// Result of a χ² goodness-of-fit test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// χ² test of observed times-since-last-event against [`tau_density`] using
/// `bins` equiprobable cells.
pub fn tau_goodness_of_fit(pmf: &FinitePmf, samples: &[f64], bins: usize) -> Result<ChiSquareTest> {
    if bins < 2 || samples.len() < 5 * bins {
        return Err(Error::Domain(format!(
            "need at least 2 bins and 5 samples per bin, got {bins} bins for {} samples",
            samples.len()
        )));
    }
    let edges: Vec<f64> = (1..bins).map(|k| tau_quantile(pmf, k as f64 / bins as f64)).collect();
    let mut counts = vec![0usize; bins];
    for &s in samples {
        counts[edges.partition_point(|&e| e <= s)] += 1;
    }
    let expected = samples.len() as f64 / bins as f64;
    let statistic = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let dof = bins - 1;
    let chi = ChiSquared::new(dof as f64).map_err(|e| Error::Domain(e.to_string()))?;
    Ok(ChiSquareTest { statistic, dof, p_value: 1.0 - chi.cdf(statistic) })
}

/// Inverse of [`tau_cdf`] by bisection.
pub fn tau_quantile(pmf: &FinitePmf, u: f64) -> f64 {
    let mut lo = 0.0;
    let mut hi = 1.0 / pmf.min_support();
    while tau_cdf(pmf, hi) < u {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if tau_cdf(pmf, mid) < u {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Writes `event_index,event_time,intensity_after_event` rows.
pub fn write_trajectory_csv<W: Write>(mut w: W, traj: &ChannelTrajectory) -> io::Result<()> {
    writeln!(w, "event_index,event_time,intensity_after_event")?;
    for (i, (t, x)) in traj.intensity_segments().into_iter().enumerate() {
        writeln!(w, "{},{},{}", i, fmt_sig(t), fmt_sig(x))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn binary(p: f64) -> FinitePmf {
        FinitePmf::binary(1.0, 2.0, p).unwrap()
    }

    #[test]
    fn g_examples() {
        let pmf = binary(0.5);
        assert!((g_of_t(&pmf, 0.0) - 1.5).abs() < 1e-15);
        assert_eq!(g_of_t(&FinitePmf::point_mass(3.0).unwrap(), 7.0), 3.0);
        assert!((g_of_t(&pmf, 1e6) - 1.0).abs() < 1e-15);
        assert!(g_of_t(&pmf, 1e300).is_finite());
        // direct formula at t = 1
        let direct = (0.5 * (-1f64).exp() + 2.0 * 0.5 * (-2f64).exp()) / (0.5 * (-1f64).exp() + 0.5 * (-2f64).exp());
        assert!((g_of_t(&pmf, 1.0) - direct).abs() < 1e-15);
    }

    #[test]
    fn stationary_pmf_examples() {
        let q = stationary_intensity_pmf(&binary(0.5)).unwrap();
        assert!((q.probs()[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((q.probs()[1] - 1.0 / 3.0).abs() < 1e-15);
        let pm = FinitePmf::point_mass(2.5).unwrap();
        assert_eq!(stationary_intensity_pmf(&pm).unwrap(), pm);
        let p = FinitePmf::new(vec![0.5, 1.0, 3.0], vec![0.2, 0.3, 0.5]).unwrap();
        let q = stationary_intensity_pmf(&p).unwrap();
        let lhs = q.expect(|x| x * x.ln());
        let rhs = p.expect(f64::ln) / p.expect(|x| 1.0 / x);
        assert!((lhs - rhs).abs() < 1e-14);
    }

    #[test]
    fn tau_density_examples() {
        let pmf = binary(0.5);
        assert!((tau_density(&pmf, 0.0) - 4.0 / 3.0).abs() < 1e-15);
        let pm = FinitePmf::point_mass(2.0).unwrap();
        assert!((tau_density(&pm, 0.7) - 2.0 * (-1.4f64).exp()).abs() < 1e-15);
        let total = crate::quad::adaptive_simpson(|t| tau_density(&pmf, t), 0.0, 60.0, 1e-12).unwrap()
            + pmf.expect(|x| (-60.0 * x).exp() / x) / pmf.expect(|x| 1.0 / x);
        assert!((total - 1.0).abs() < 1e-8);
        assert!((tau_cdf(&pmf, tau_quantile(&pmf, 0.3)) - 0.3).abs() < 1e-12);
    }

    #[test]
    fn entropy_of_exponential() {
        let one = FinitePmf::point_mass(1.0).unwrap();
        assert!((h_y(&one).unwrap() - 1.0).abs() < 1e-8);
        for lambda in [0.3, 2.0, 17.0] {
            let pm = FinitePmf::point_mass(lambda).unwrap();
            assert!((h_y(&pm).unwrap() - (1.0 - lambda.ln())).abs() < 1e-8);
        }
    }

    #[test]
    fn y_density_integrates_to_one() {
        let pmf = FinitePmf::new(vec![0.5, 4.0], vec![0.3, 0.7]).unwrap();
        let v = crate::quad::adaptive_simpson(|y| y_density(&pmf, y), 0.0, 100.0, 1e-12).unwrap();
        assert!((v - 1.0).abs() < 1e-9);
        assert_eq!(y_density(&pmf, -1.0), 0.0);
    }

    #[test]
    fn h_y_given_x_identity() {
        let pmf = FinitePmf::new(vec![0.5, 4.0], vec![0.3, 0.7]).unwrap();
        let direct: f64 = pmf.support().iter().zip(pmf.probs()).map(|(x, p)| p * (1.0 - x.ln())).sum();
        assert_eq!(h_y_given_x(&pmf), direct);
        assert!((h_y_given_x(&pmf) - (1.0 - pmf.expect(f64::ln))).abs() < 1e-15);
    }

    #[test]
    fn rate_is_zero_for_point_mass() {
        assert_eq!(di_rate_analytic(&FinitePmf::point_mass(2.0).unwrap()).unwrap(), 0.0);
        assert_eq!(di_rate_analytic(&binary(0.0)).unwrap(), 0.0);
        assert!(di_rate_analytic(&FinitePmf::new(vec![0.0, 1.0], vec![0.5, 0.5]).unwrap()).is_err());
    }

    #[test]
    fn rate_is_scale_covariant() {
        let pmf = FinitePmf::new(vec![1.0, 3.0], vec![0.4, 0.6]).unwrap();
        let r = di_rate_analytic(&pmf).unwrap();
        let r3 = di_rate_analytic(&pmf.scaled(3.0).unwrap()).unwrap();
        assert!((r3 - 3.0 * r).abs() < 1e-12 * r3);
    }

    #[test]
    fn mean_y_matches_inverse_mean() {
        let pmf = binary(0.5);
        assert!((mean_y_quadrature(&pmf).unwrap() - 0.75).abs() < 1e-8);
    }

    #[test]
    fn point_mass_channel_is_homogeneous_poisson() {
        let m = PoissonFeedbackModel::new(FinitePmf::point_mass(1.0).unwrap(), 1e4).unwrap();
        let traj = simulate_channel(&m, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let count = traj.events().len() as f64 - 1.0;
        assert!((count - 1e4).abs() < 3.0 * 100.0, "count {count}");
        assert_eq!(traj.events().epochs()[0], 0.0);
    }

    #[test]
    fn simulation_replays() {
        let m = PoissonFeedbackModel::new(binary(0.5), 100.0).unwrap();
        let a = simulate_channel(&m, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        let b = simulate_channel(&m, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_intensity_is_rejected() {
        let pmf = FinitePmf::new(vec![0.0, 1.0], vec![0.5, 0.5]).unwrap();
        assert!(PoissonFeedbackModel::new(pmf, 1.0).is_err());
    }

    #[test]
    fn point_mass_mc_rate_is_exactly_zero() {
        let m = PoissonFeedbackModel::new(FinitePmf::point_mass(1.5).unwrap(), 100.0).unwrap();
        let e = di_rate_mc(&m, McConfig::new(4), RngSpec::new(3)).unwrap();
        assert_eq!(e.value, 0.0);
    }

    #[test]
    fn matched_filter_relent_is_exactly_zero() {
        let p = binary(0.5);
        let e = mismatched_relent_poisson(&p, &p, 50.0, McConfig::new(4), RngSpec::new(3)).unwrap();
        assert_eq!(e.value, 0.0);
    }

    #[test]
    fn segments_and_lookup() {
        let traj = ChannelTrajectory::new(EventTimes::new(3.0, vec![0.0, 1.0, 2.5]).unwrap(), vec![1.0, 2.0, 1.0]).unwrap();
        assert_eq!(traj.intensity_at(1.2), 2.0);
        assert!((traj.time_since_last_event(2.0) - 1.0).abs() < 1e-15);
        assert!((traj.time_fraction_at(1.0, 0.0, 3.0) - 1.5 / 3.0).abs() < 1e-15);
        let segs: Vec<_> = traj.segments().collect();
        assert_eq!(segs[2], (2.5, 3.0, 1.0));
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &traj).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "event_index,event_time,intensity_after_event\n0,0,1\n1,1,2\n2,2.5,1\n"
        );
    }

    #[test]
    fn renewal_integrals_on_a_fixed_path() {
        // one segment at x = 2 of length 1, point-mass filter: no loss
        let pm = FinitePmf::point_mass(2.0).unwrap();
        let traj = ChannelTrajectory::new(EventTimes::new(1.0, vec![0.0]).unwrap(), vec![2.0]).unwrap();
        let r = renewal_integrals(&traj, &pm, 0.0, 1.0);
        assert_eq!(r.loss, 0.0);
        assert!((r.g_log_g - 2.0 * 2f64.ln()).abs() < 1e-12);
        // binary filter on the same path against a direct adaptive integral
        let pmf = binary(0.5);
        let r = renewal_integrals(&traj, &pmf, 0.25, 1.0);
        let direct = crate::quad::adaptive_simpson(
            |s| crate::loss::poisson_loss(2.0, g_of_t(&pmf, s)).unwrap(),
            0.25,
            1.0,
            1e-13,
        )
        .unwrap();
        assert!((r.loss - direct).abs() < 1e-12);
    }
}
