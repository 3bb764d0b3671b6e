mod common;

use common::{inv_mean, mc_entropy_y, mean_stderr};
use ctdi::poisson::{
    di_rate_mc, h_y, mismatched_relent_poisson, renewal_integrals, simulate_with_burn_in, PoissonFeedbackModel,
};
use ctdi::{FinitePmf, McConfig, RngSpec};
use rand::Rng;

const ATOMS: [(f64, f64); 2] = [(1.0, 0.5), (2.0, 0.5)];

fn uniform_12() -> FinitePmf {
    FinitePmf::binary(1.0, 2.0, 0.5).unwrap()
}

/// `E[X | Y ≥ s]` written out for the test atoms.
fn g_oracle(s: f64) -> f64 {
    let num: f64 = ATOMS.iter().map(|&(x, p)| p * x * (-x * s).exp()).sum();
    let den: f64 = ATOMS.iter().map(|&(x, p)| p * (-x * s).exp()).sum();
    num / den
}

#[test]
fn binned_conditional_mean_matches_the_renewal_filter() {
    let model = PoissonFeedbackModel::new(uniform_12(), 20.0).unwrap();
    let spec = RngSpec::new(21);
    let edges = [0.0, 0.25, 0.5, 1.0, 2.0, 4.0];
    let mut xs: Vec<Vec<f64>> = vec![Vec::new(); edges.len()];
    let mut gs: Vec<Vec<f64>> = vec![Vec::new(); edges.len()];
    // one inspection per independent trajectory keeps samples independent
    for r in 0..40_000 {
        let mut rng = spec.stream(r);
        let (traj, burn) = simulate_with_burn_in(&model, &mut rng).unwrap();
        let t = burn + 20.0 * rng.random::<f64>();
        let s = traj.time_since_last_event(t);
        let bin = edges.partition_point(|&e| e <= s) - 1;
        xs[bin].push(traj.intensity_at(t));
        gs[bin].push(g_oracle(s));
    }
    for (bin, (x, g)) in xs.iter().zip(&gs).enumerate() {
        if x.len() < 200 {
            continue;
        }
        let (mx, se) = mean_stderr(x);
        let mg = g.iter().sum::<f64>() / g.len() as f64;
        assert!((mx - mg).abs() <= 4.0 * se, "bin {bin}: empirical {mx} ± {se}, filter {mg}");
    }
}

#[test]
fn entropy_matches_monte_carlo() {
    let (h_mc, se) = mc_entropy_y(&ATOMS, 10_000_000, 22);
    let h = h_y(&uniform_12()).unwrap();
    assert!((h - h_mc).abs() < 1e-3, "quadrature {h}, MC {h_mc} ± {se}");
}

#[test]
fn time_average_of_g_log_g() {
    let pmf = uniform_12();
    let model = PoissonFeedbackModel::new(pmf.clone(), 1e4).unwrap();
    let spec = RngSpec::new(23);
    let vals: Vec<f64> = (0..4)
        .map(|r| {
            let (traj, burn) = simulate_with_burn_in(&model, &mut spec.stream(r)).unwrap();
            let ints = renewal_integrals(&traj, &pmf, burn, burn + 1e4);
            ints.g_log_g / ints.duration
        })
        .collect();
    let (m, se) = mean_stderr(&vals);
    let (h_mc, _) = mc_entropy_y(&ATOMS, 10_000_000, 24);
    let target = (1.0 - h_mc) / inv_mean(&ATOMS);
    assert!((m - target).abs() <= (0.01 * target.abs()).max(3.0 * se), "{m} ± {se} vs {target}");
}

#[test]
fn mismatch_is_positive_and_reproducible_across_seeds() {
    let p = uniform_12();
    let q = FinitePmf::binary(1.0, 2.0, 0.9).unwrap();
    let a = mismatched_relent_poisson(&p, &q, 50.0, McConfig::new(400), RngSpec::new(25)).unwrap();
    let b = mismatched_relent_poisson(&p, &q, 50.0, McConfig::new(400), RngSpec::new(26)).unwrap();
    assert!(a.value > 3.0 * a.stderr && b.value > 3.0 * b.stderr, "{a:?} {b:?}");
    let joint = (a.stderr.powi(2) + b.stderr.powi(2)).sqrt();
    assert!((a.value - b.value).abs() <= 3.0 * joint, "{a:?} {b:?}");
}

#[test]
fn point_mass_rate_is_exactly_zero() {
    let model = PoissonFeedbackModel::new(FinitePmf::point_mass(1.5).unwrap(), 100.0).unwrap();
    let est = di_rate_mc(&model, McConfig::new(4), RngSpec::new(27)).unwrap();
    assert_eq!(est.value, 0.0);
}

#[test]
fn zero_intensity_is_rejected() {
    assert!(PoissonFeedbackModel::new(FinitePmf::binary(0.0, 2.0, 0.5).unwrap(), 10.0).is_err());
}
