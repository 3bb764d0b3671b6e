//! Acceptance suite. Each test prints one `[PASS]`/`[FAIL]` line to stderr;
//! run with `cargo test -p ctdi --test acceptance -- --nocapture`.

mod common;

use common::{brute_force_mi, gaussian_output_kl, inv_mean, mean_stderr, plug_in_mi, report};
use ctdi::capacity::{capacity_curve, optimize_binary, unit_cost_identity_check, DEFAULT_TOL};
use ctdi::gaussian::{
    directed_info_gaussian_mc, mismatched_relent_gaussian, FilterStrategy, GaussianFeedbackModel, LatentPrior,
};
use ctdi::partition_di::{
    conservation_residual, directed_info, grouped_directed_info, random_joint, random_refinement_chain,
    reverse_directed_info, Grouping,
};
use ctdi::poisson::{
    di_rate_analytic, di_rate_mc, mismatched_relent_poisson, simulate_with_burn_in, tau_goodness_of_fit,
    PoissonFeedbackModel,
};
use ctdi::{FinitePmf, McConfig, RngSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn c1_gaussian_closed_form() {
    let mut worst = Vec::new();
    let mut pass = true;
    for (i, (t, paper)) in [(0.5, 0.202733), (1.0, 0.346574), (2.0, 0.549306)].into_iter().enumerate() {
        let oracle = 0.5 * f64::ln(1.0 + t);
        assert!((oracle - paper).abs() < 5e-7);
        let model = GaussianFeedbackModel::constant_signal_with_dt(t, 1e-3).unwrap();
        let est = directed_info_gaussian_mc(&model, FilterStrategy::Conjugate, McConfig::new(100_000), RngSpec::new(100 + i as u64))
            .unwrap();
        let tol = (0.01 * oracle).max(3.0 * est.stderr);
        let err = (est.value - oracle).abs();
        pass &= err <= tol;
        worst.push(format!("T={t}: {:.6}±{:.6} vs {oracle:.6}", est.value, est.stderr));
    }
    report("1", "Gaussian DI matches ½ln(1+T)", pass, worst.join("; "));
}

#[test]
fn c2_delayed_echo_is_exactly_zero() {
    let dt = 1e-3;
    let model = GaussianFeedbackModel::delayed_echo(1.0, dt, 10.0 * dt).unwrap();
    let est = directed_info_gaussian_mc(&model, FilterStrategy::Replay, McConfig::new(1000), RngSpec::new(2)).unwrap();
    let pass = est.value == 0.0 && est.stderr == 0.0;
    report("2", "delayed echo DI is exactly 0", pass, format!("estimate {:e}, stderr {:e}", est.value, est.stderr));
}

#[test]
fn c3_poisson_rate_identity() {
    let mut oracle_ok = true;
    let mut mc_ok = true;
    let mut worst_oracle: f64 = 0.0;
    let mut lines = Vec::new();
    for k in 1..=9 {
        let p = k as f64 / 10.0;
        let pmf = FinitePmf::binary(1.0, 2.0, p).unwrap();
        let analytic = di_rate_analytic(&pmf).unwrap();

        let atoms = [(1.0, p), (2.0, 1.0 - p)];
        let (mi, _) = plug_in_mi(&atoms, 10_000_000, 30 + k);
        let oracle = mi / inv_mean(&atoms);
        worst_oracle = worst_oracle.max((analytic - oracle).abs());
        oracle_ok &= (analytic - oracle).abs() <= 1e-3;

        let model = PoissonFeedbackModel::new(pmf, 1e4).unwrap();
        let est = di_rate_mc(&model, McConfig::new(8), RngSpec::new(300 + k)).unwrap();
        let tol = (0.02 * analytic).max(3.0 * est.stderr);
        mc_ok &= (est.value - analytic).abs() <= tol;
        lines.push(format!("p={p}: {analytic:.5}/{:.5}±{:.5}", est.value, est.stderr));
    }
    report(
        "3a",
        "analytic rate matches 10⁷-sample plug-in oracle within 1e-3",
        oracle_ok,
        format!("max |analytic − oracle| = {worst_oracle:.2e}"),
    );
    report("3b", "MC rate over T=1e4 matches analytic rate", mc_ok, lines.join("; "));
}

#[test]
fn c4_capacity_curve_shape() {
    let l2 = [0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0];
    let curve = capacity_curve(1.0, &l2).unwrap();
    let rates: Vec<f64> = curve.iter().map(|c| c.rate_star).collect();
    let zeros = rates[0] == 0.0 && rates[3] == 0.0;
    let increasing = rates[4..].windows(2).all(|w| w[1] > w[0]);
    let nonneg = rates.iter().all(|&r| r >= 0.0);
    report(
        "4",
        "capacity curve zero at λ₂∈{0⁺,1}, increasing on {2,4,8,16}",
        zeros && increasing && nonneg,
        format!("rate_star = {rates:.5?}"),
    );
}

#[test]
fn c5_conservation_law() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let n = rng.random_range(1..=3);
        let xs: Vec<usize> = (0..n).map(|_| rng.random_range(1..=3)).collect();
        let ys: Vec<usize> = (0..n).map(|_| rng.random_range(1..=3)).collect();
        let sparsity = if rng.random_bool(0.5) { 0.4 } else { 0.0 };
        let joint = random_joint(&mut rng, &xs, &ys, sparsity).unwrap();
        // MI from direct summation, not from the engine's entropy cache
        let r = directed_info(&joint) + reverse_directed_info(&joint) - brute_force_mi(&joint);
        worst = worst.max(r.abs()).max(conservation_residual(&joint).abs());
    }
    report("5", "DI + reverse DI = MI on 1000 random joints", worst < 1e-9, format!("max residual {worst:.2e}"));
}

#[test]
fn c6_refinement_monotonicity() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut max_increase, mut max_gap) = (f64::NEG_INFINITY, 0.0f64);
    let mut sandwich = true;
    for _ in 0..200 {
        let n = rng.random_range(4..=5);
        let joint = random_joint(&mut rng, &vec![2; n], &vec![2; n], 0.0).unwrap();
        let chain = random_refinement_chain(&mut rng, n, 4).unwrap();
        let values: Vec<f64> = chain.iter().map(|g| grouped_directed_info(&joint, g).unwrap()).collect();
        for w in values.windows(2) {
            max_increase = max_increase.max(w[1] - w[0]);
        }
        let single = grouped_directed_info(&joint, &Grouping::singletons(n)).unwrap();
        let block = grouped_directed_info(&joint, &Grouping::one_block(n)).unwrap();
        let mi = brute_force_mi(&joint);
        max_gap = max_gap.max((block - mi).abs());
        sandwich &= single <= block + 1e-12 && single <= values[3] + 1e-12;
    }
    let pass = max_increase <= 1e-12 && max_gap < 1e-9 && sandwich;
    report(
        "6",
        "grouped DI nonincreasing under refinement; singletons ≤ one block = MI",
        pass,
        format!("max step increase {max_increase:.2e}, max |one-block − MI| {max_gap:.2e}"),
    );
}

#[test]
fn c7_occupancy_and_tau_density() {
    let pmf = FinitePmf::binary(1.0, 2.0, 0.5).unwrap();
    let model = PoissonFeedbackModel::new(pmf.clone(), 1e4).unwrap();
    let mut rng = RngSpec::new(7).stream(0);
    let (traj, burn) = simulate_with_burn_in(&model, &mut rng).unwrap();

    // batch means over 50 windows of 200 s
    let batches = 50;
    let width = 1e4 / batches as f64;
    let fractions: Vec<f64> = (0..batches)
        .map(|b| {
            let a = burn + b as f64 * width;
            traj.time_fraction_at(1.0, a, a + width)
        })
        .collect();
    let (frac, se) = mean_stderr(&fractions);
    let occ_ok = (frac - 2.0 / 3.0).abs() <= 3.0 * se;
    report("7a", "time fraction at intensity 1 equals 2/3", occ_ok, format!("{frac:.5} ± {se:.5}"));

    let samples: Vec<f64> = (0..1000)
        .map(|_| traj.time_since_last_event(burn + 1e4 * rng.random::<f64>()))
        .collect();
    let chi = tau_goodness_of_fit(&pmf, &samples, 20).unwrap();
    report(
        "7b",
        "time since last event fits f_τ (χ², 1% level)",
        chi.p_value > 0.01,
        format!("χ² = {:.2} on {} dof, p = {:.3}", chi.statistic, chi.dof, chi.p_value),
    );
}

#[test]
fn c8_mismatch_nonnegativity() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut gauss_ok = true;
    let mut gauss_min = f64::INFINITY;
    let mut kl_dev: f64 = 0.0;
    for i in 0..20 {
        let vp = 4f64.powf(rng.random_range(-1.0..1.0));
        let vq = 4f64.powf(rng.random_range(-1.0..1.0));
        let model = GaussianFeedbackModel::constant_signal_with_dt(1.0, 1e-2)
            .unwrap()
            .with_prior(LatentPrior::Gaussian { variance: vp })
            .unwrap();
        let est = mismatched_relent_gaussian(
            &model,
            LatentPrior::Gaussian { variance: vq },
            FilterStrategy::Conjugate,
            McConfig::new(4000),
            RngSpec::new(800 + i),
        )
        .unwrap();
        gauss_ok &= est.value >= -3.0 * est.stderr;
        gauss_min = gauss_min.min(est.value / est.stderr.max(f64::MIN_POSITIVE));
        kl_dev = kl_dev.max((est.value - gaussian_output_kl(1.0, vp, vq)).abs() / est.stderr.max(1e-12));
    }
    let same = mismatched_relent_gaussian(
        &GaussianFeedbackModel::constant_signal_with_dt(1.0, 1e-2).unwrap(),
        LatentPrior::standard_gaussian(),
        FilterStrategy::Conjugate,
        McConfig::new(1000),
        RngSpec::new(899),
    )
    .unwrap();
    gauss_ok &= same.value.abs() <= 3.0 * same.stderr;

    let mut poi_ok = true;
    let mut poi_min = f64::INFINITY;
    for i in 0..20 {
        let random_pmf = |rng: &mut ChaCha8Rng| {
            let a = rng.random_range(0.5..4.0);
            let b = rng.random_range(0.5..4.0);
            FinitePmf::binary(a, b, rng.random_range(0.1..0.9)).unwrap()
        };
        let p = random_pmf(&mut rng);
        let q = random_pmf(&mut rng);
        let est = mismatched_relent_poisson(&p, &q, 20.0, McConfig::new(200), RngSpec::new(850 + i)).unwrap();
        poi_ok &= est.value >= -3.0 * est.stderr;
        poi_min = poi_min.min(est.value / est.stderr.max(f64::MIN_POSITIVE));
    }
    let p = FinitePmf::binary(1.0, 2.0, 0.5).unwrap();
    let same_p = mismatched_relent_poisson(&p, &p, 20.0, McConfig::new(200), RngSpec::new(898)).unwrap();
    poi_ok &= same_p.value.abs() <= 3.0 * same_p.stderr;

    report(
        "8a",
        "Gaussian mismatch estimate ≥ −3σ on 20 pairs, 0 when Q = P",
        gauss_ok,
        format!(
            "min value/σ {gauss_min:.2}, Q=P gives {:e}; max |est − KL|/σ {kl_dev:.2}",
            same.value
        ),
    );
    report(
        "8b",
        "Poisson mismatch estimate ≥ −3σ on 20 pairs, 0 when Q = P",
        poi_ok,
        format!("min value/σ {poi_min:.2}, Q=P gives {:e}", same_p.value),
    );
}

#[test]
fn c9_scale_law() {
    let base = optimize_binary(1.0, 2.0, DEFAULT_TOL).unwrap();
    let mut pass = true;
    let mut lines = Vec::new();
    for c in [0.5, 2.0] {
        let s = optimize_binary(c, 2.0 * c, DEFAULT_TOL).unwrap();
        let rel = (s.rate_star - c * base.rate_star).abs() / (c * base.rate_star);
        let dp = (s.p_star - base.p_star).abs();
        pass &= rel <= 1e-6 && dp <= DEFAULT_TOL;
        lines.push(format!("c={c}: rate rel err {rel:.1e}, |Δp*| {dp:.1e}"));
    }
    report("9", "scaling λ by c scales rate_star by c, keeps p_star", pass, lines.join("; "));
}

#[test]
fn unit_cost_shadow() {
    let pmfs = [
        FinitePmf::point_mass(2.0).unwrap(),
        FinitePmf::binary(1.0, 2.0, 0.5).unwrap(),
        FinitePmf::new(vec![0.5, 1.5, 6.0], vec![0.2, 0.3, 0.5]).unwrap(),
        {
            let c = optimize_binary(1.0, 16.0, DEFAULT_TOL).unwrap();
            FinitePmf::binary(1.0, 16.0, c.p_star).unwrap()
        },
    ];
    let worst = pmfs.iter().map(|p| unit_cost_identity_check(p).unwrap()).fold(0.0, f64::max);
    report("shadow", "capacity-per-unit-cost residual |E[Y] − E[1/X]| < 1e-8", worst < 1e-8, format!("max residual {worst:.2e}"));
}
