use rand::Rng;
use serde_json::json;

use super::config::{ExperimentConfig, KeySpec};
use super::{Outcome, UsageError};
use crate::capacity::{capacity_curve, rate_sweep};
use crate::estimate::{DiEstimate, McConfig};
use crate::gaussian::{
    closed_form_di_constant_signal, conjugate_filter, directed_info_gaussian_mc, simulate_awgn, write_path_csv,
    FilterStrategy, GaussianFeedbackModel,
};
use crate::partition_di::{
    conservation_residual, directed_info, grouped_directed_info, mutual_information, random_joint,
    random_refinement_chain, Grouping,
};
use crate::pmf::FinitePmf;
use crate::poisson::{di_rate_mc, simulate_with_burn_in, write_trajectory_csv, PoissonFeedbackModel};
use crate::report::{fmt_sig, write_csv};
use crate::rng::RngSpec;

pub(crate) const GAUSSIAN_KEYS: &[KeySpec] = &[
    ("T", "0.5,1,2"),
    ("dt", "auto"),
    ("replicas", "10000"),
    ("seed", "0"),
    ("rel_tol", "0.01"),
    ("k_sigma", "3"),
    ("dump_path", "false"),
];

pub(crate) const POISSON_RATE_KEYS: &[KeySpec] = &[
    ("lambda1", "1"),
    ("lambda2", "2"),
    (
        "p",
        "0,0.05,0.1,0.15,0.2,0.25,0.3,0.35,0.4,0.45,0.5,0.55,0.6,0.65,0.7,0.75,0.8,0.85,0.9,0.95,1",
    ),
    ("horizon", "10000"),
    ("replicas", "8"),
    ("seed", "0"),
    ("rel_tol", "0.02"),
    ("k_sigma", "3"),
    ("mc", "true"),
    ("dump_trajectory", "false"),
];

pub(crate) const CAPACITY_KEYS: &[KeySpec] = &[("lambda1", "1"), ("lambda2", "0,0.25,0.5,1,2,4,8,16")];

pub(crate) const DISCRETE_KEYS: &[KeySpec] = &[
    ("replicas", "1000"),
    ("max_n", "3"),
    ("max_alphabet", "3"),
    ("chain_models", "200"),
    ("chain_n", "4,5"),
    ("chain_alphabet", "2"),
    ("chain_len", "4"),
    ("seed", "0"),
    ("tol", "1e-9"),
];

fn csv_bytes(header: &[&str], rows: &[Vec<f64>]) -> Vec<u8> {
    let mut buf = Vec::new();
    write_csv(&mut buf, header, rows).expect("writing to memory");
    buf
}

fn within(est: &DiEstimate, target: f64, rel: f64, k: f64) -> bool {
    (est.value - target).abs() <= (rel * target.abs()).max(k * est.stderr)
}

pub(crate) fn gaussian_duncan(cfg: &ExperimentConfig) -> Result<Outcome, UsageError> {
    let horizons: Vec<f64> = cfg.list("T")?;
    // `auto` resolves to 10⁻³·T per horizon
    let dt: Option<f64> = match cfg.get::<String>("dt")?.as_str() {
        "auto" => None,
        _ => Some(cfg.get("dt")?),
    };
    let mc = McConfig::new(cfg.get("replicas")?);
    let seed: u64 = cfg.get("seed")?;
    let rel: f64 = cfg.get("rel_tol")?;
    let k: f64 = cfg.get("k_sigma")?;
    if horizons.is_empty() {
        return Err(UsageError("`T` must list at least one horizon".into()));
    }
    let root = RngSpec::new(seed);
    let mut rows = Vec::new();
    let mut out = Outcome { files: Vec::new(), passed: true, summary: Vec::new(), failures: Vec::new() };
    for (i, &t) in horizons.iter().enumerate() {
        let closed = closed_form_di_constant_signal(t)?;
        let rng = root.derive(i as u64);
        let est = if t == 0.0 {
            DiEstimate::exact(0.0, seed)
        } else {
            let model = match dt {
                Some(dt) => GaussianFeedbackModel::constant_signal_with_dt(t, dt)?,
                None => GaussianFeedbackModel::constant_signal(t)?,
            };
            if cfg.get("dump_path")? {
                let path = simulate_awgn(&model, &mut rng.stream(0))?;
                let filter = conjugate_filter(&path.yinc, 1.0)?;
                let mut buf = Vec::new();
                write_path_csv(&mut buf, &path, &filter).expect("writing to memory");
                out.files.push((format!("path_T{}.csv", fmt_sig(t)), buf));
            }
            directed_info_gaussian_mc(&model, FilterStrategy::Conjugate, mc, rng)?
        };
        let err = (est.value - closed).abs();
        out.summary.push(format!(
            "T={} mc_di={} stderr={} closed_form={} abs_error={}",
            fmt_sig(t),
            fmt_sig(est.value),
            fmt_sig(est.stderr),
            fmt_sig(closed),
            fmt_sig(err)
        ));
        if !within(&est, closed, rel, k) {
            out.passed = false;
            out.failures.push(format!("T={}: |{} - {}| exceeds max({rel}·closed, {k}·stderr)", fmt_sig(t), est.value, closed));
        }
        rows.push(vec![t, est.value, est.stderr, closed, err]);
    }
    out.files.insert(0, ("gaussian_duncan.csv".into(), csv_bytes(&["T", "mc_di", "stderr", "closed_form", "abs_error"], &rows)));
    Ok(out)
}

pub(crate) fn poisson_rate(cfg: &ExperimentConfig) -> Result<Outcome, UsageError> {
    let l1: f64 = cfg.get("lambda1")?;
    let l2: f64 = cfg.get("lambda2")?;
    let ps: Vec<f64> = cfg.list("p")?;
    let horizon: f64 = cfg.get("horizon")?;
    let mc = McConfig::new(cfg.get("replicas")?);
    let seed: u64 = cfg.get("seed")?;
    let rel: f64 = cfg.get("rel_tol")?;
    let k: f64 = cfg.get("k_sigma")?;
    if ps.is_empty() {
        return Err(UsageError("`p` must list at least one probability".into()));
    }
    let analytic = rate_sweep(l1, l2, &ps)?;
    let mut out = Outcome { files: Vec::new(), passed: true, summary: Vec::new(), failures: Vec::new() };
    let fig1: Vec<Vec<f64>> = ps.iter().zip(&analytic).map(|(&p, &r)| vec![p, r]).collect();
    out.files.push(("fig1.csv".into(), csv_bytes(&["p", "rate"], &fig1)));

    // the discrete argmax of a grid spanning [0, 1] must be interior
    let has_ends = ps.contains(&0.0) && ps.contains(&1.0);
    if has_ends && l1 != l2 && ps.len() >= 3 {
        let (best, _) = ps
            .iter()
            .zip(&analytic)
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty grid");
        if *best == 0.0 || *best == 1.0 {
            out.passed = false;
            out.failures.push(format!("rate maximum at the grid endpoint p = {best}"));
        }
    }

    if cfg.get("mc")? {
        let root = RngSpec::new(seed);
        let mut rows = Vec::new();
        for (i, (&p, &a)) in ps.iter().zip(&analytic).enumerate() {
            let model = PoissonFeedbackModel::new(FinitePmf::binary(l1, l2, p)?, horizon)?;
            let rng = root.derive(i as u64);
            if i == 0 && cfg.get("dump_trajectory")? {
                let (traj, _) = simulate_with_burn_in(&model, &mut rng.stream(0))?;
                let mut buf = Vec::new();
                write_trajectory_csv(&mut buf, &traj).expect("writing to memory");
                out.files.push(("trajectory.csv".into(), buf));
            }
            let est = di_rate_mc(&model, mc, rng)?;
            out.summary.push(format!(
                "p={} analytic={} mc={} stderr={}",
                fmt_sig(p),
                fmt_sig(a),
                fmt_sig(est.value),
                fmt_sig(est.stderr)
            ));
            if !within(&est, a, rel, k) {
                out.passed = false;
                out.failures.push(format!("p={}: mc {} vs analytic {} (stderr {})", fmt_sig(p), est.value, a, est.stderr));
            }
            rows.push(vec![p, a, est.value, est.stderr]);
        }
        out.files.insert(0, ("poisson_rate.csv".into(), csv_bytes(&["p", "analytic", "mc", "stderr"], &rows)));
    } else {
        for (p, a) in ps.iter().zip(&analytic) {
            out.summary.push(format!("p={} analytic={}", fmt_sig(*p), fmt_sig(*a)));
        }
    }
    Ok(out)
}

pub(crate) fn poisson_capacity(cfg: &ExperimentConfig) -> Result<Outcome, UsageError> {
    let l1: f64 = cfg.get("lambda1")?;
    let l2s: Vec<f64> = cfg.list("lambda2")?;
    if l2s.iter().any(|&l| l < 0.0) {
        return Err(UsageError("`lambda2` values must be >= 0".into()));
    }
    let curve = capacity_curve(l1, &l2s)?;
    let mut out = Outcome { files: Vec::new(), passed: true, summary: Vec::new(), failures: Vec::new() };
    let rows: Vec<Vec<f64>> = curve.iter().map(|c| vec![c.lambda2, c.p_star, c.rate_star]).collect();
    out.files.push(("capacity.csv".into(), csv_bytes(&["lambda2", "p_star", "rate_star"], &rows)));
    for c in &curve {
        out.summary.push(format!("lambda2={} p_star={} rate_star={}", fmt_sig(c.lambda2), fmt_sig(c.p_star), fmt_sig(c.rate_star)));
        if (c.lambda2 == 0.0 || c.lambda2 == l1) && c.rate_star != 0.0 {
            out.passed = false;
            out.failures.push(format!("rate at lambda2 = {} is {}, expected 0", c.lambda2, c.rate_star));
        }
        if c.rate_star < 0.0 {
            out.passed = false;
            out.failures.push(format!("negative rate {} at lambda2 = {}", c.rate_star, c.lambda2));
        }
    }
    let mut tail: Vec<_> = curve.iter().filter(|c| c.lambda2 >= 2.0 * l1).collect();
    tail.sort_by(|a, b| a.lambda2.total_cmp(&b.lambda2));
    for w in tail.windows(2) {
        if w[1].lambda2 > w[0].lambda2 && w[1].rate_star <= w[0].rate_star {
            out.passed = false;
            out.failures.push(format!(
                "rate does not increase from lambda2 = {} to {}",
                w[0].lambda2, w[1].lambda2
            ));
        }
    }
    Ok(out)
}

pub(crate) fn di_discrete(cfg: &ExperimentConfig) -> Result<Outcome, UsageError> {
    let instances: usize = cfg.get("replicas")?;
    let max_n: usize = cfg.get("max_n")?;
    let max_alph: usize = cfg.get("max_alphabet")?;
    let chain_models: usize = cfg.get("chain_models")?;
    let chain_ns: Vec<usize> = cfg.list("chain_n")?;
    let chain_alph: usize = cfg.get("chain_alphabet")?;
    let chain_len: usize = cfg.get("chain_len")?;
    let seed: u64 = cfg.get("seed")?;
    let tol: f64 = cfg.get("tol")?;
    if max_n == 0 || max_alph == 0 || chain_alph == 0 || (chain_models > 0 && chain_ns.is_empty()) {
        return Err(UsageError("sizes must be positive".into()));
    }
    if let Some(&n) = chain_ns.iter().find(|&&n| chain_len == 0 || chain_len > n) {
        return Err(UsageError(format!("chain_len = {chain_len} does not fit n = {n}")));
    }

    let root = RngSpec::new(seed);
    let mut violation: Option<serde_json::Value> = None;
    let mut flag = |v: serde_json::Value| {
        if violation.is_none() {
            violation = Some(v);
        }
    };

    let mut rng = root.stream(0);
    let (mut max_residual, mut min_di, mut max_excess) = (0.0f64, f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..instances {
        let n = rng.random_range(1..=max_n);
        let xs: Vec<usize> = (0..n).map(|_| rng.random_range(1..=max_alph)).collect();
        let ys: Vec<usize> = (0..n).map(|_| rng.random_range(1..=max_alph)).collect();
        let sparsity = if rng.random_bool(0.5) { 0.5 } else { 0.0 };
        let joint = random_joint(&mut rng, &xs, &ys, sparsity)?;
        let residual = conservation_residual(&joint).abs();
        let (di, mi) = (directed_info(&joint), mutual_information(&joint));
        max_residual = max_residual.max(residual);
        min_di = min_di.min(di);
        max_excess = max_excess.max(di - mi);
        if residual >= tol {
            flag(json!({ "check": "conservation", "instance": i, "residual": residual, "joint": joint }));
        }
        if di < -tol || di > mi + tol {
            flag(json!({ "check": "sandwich", "instance": i, "di": di, "mi": mi, "joint": joint }));
        }
    }

    let mut rng = root.stream(1);
    let (mut max_increase, mut max_block_gap) = (f64::NEG_INFINITY, 0.0f64);
    for i in 0..chain_models {
        let n = chain_ns[rng.random_range(0..chain_ns.len())];
        let joint = random_joint(&mut rng, &vec![chain_alph; n], &vec![chain_alph; n], 0.0)?;
        let mut chain = random_refinement_chain(&mut rng, n, chain_len)?;
        chain.push(Grouping::singletons(n));
        let values: Vec<f64> = chain.iter().map(|g| grouped_directed_info(&joint, g)).collect::<crate::Result<_>>()?;
        let mi = mutual_information(&joint);
        let gap = (values[0] - mi).abs();
        max_block_gap = max_block_gap.max(gap);
        let worst = values.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
        max_increase = max_increase.max(worst);
        if worst > tol || gap > tol {
            let cuts: Vec<&[usize]> = chain.iter().map(Grouping::cuts).collect();
            flag(json!({
                "check": "refinement",
                "instance": i,
                "chain_cuts": cuts,
                "grouped_di": values,
                "mi": mi,
                "joint": joint,
            }));
        }
    }

    let passed = violation.is_none();
    let report = json!({
        "conservation": { "instances": instances, "max_residual": max_residual },
        "sandwich": { "min_di": min_di, "max_di_minus_mi": max_excess },
        "refinement": {
            "models": chain_models,
            "chain_len": chain_len,
            "max_increase": max_increase,
            "max_one_block_mi_gap": max_block_gap,
        },
        "tol": tol,
        "passed": passed,
        "first_violation": violation,
    });
    let mut out = Outcome {
        files: vec![("di_discrete_report.json".into(), serde_json::to_vec_pretty(&report).expect("report serializes"))],
        passed,
        summary: vec![
            format!("conservation: {instances} instances, max residual {}", fmt_sig(max_residual)),
            format!("sandwich: min DI {}, max DI - MI {}", fmt_sig(min_di), fmt_sig(max_excess)),
            format!(
                "refinement: {chain_models} models, max increase {}, max |one-block - MI| {}",
                fmt_sig(max_increase),
                fmt_sig(max_block_gap)
            ),
        ],
        failures: Vec::new(),
    };
    if let Some(v) = &report["first_violation"].as_object() {
        out.failures.push(format!("first violating instance: {}", serde_json::to_string(v).expect("serializes")));
    }
    Ok(out)
}
