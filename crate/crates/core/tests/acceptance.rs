//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured numbers (visible under `--nocapture`).
//!
//! Criteria 1-2 are exact arithmetic, 3-5 are stochastic behavior bands over
//! large replicate counts with pinned master seeds, and 6 is a bundle of
//! structural properties.

use std::f64::consts::{E, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fortify_core::de_optimizer::{de_minimize, latin_hypercube, DEConfig};
use fortify_core::fortification::{bump_phi, fortify};
use fortify_core::multirun_analysis::{independent_prediction, multirun_table};
use fortify_core::replicate_harness::{
    bump_hit_probability, required_runs, run_replicates, sigma_fail, SuccessCriterion,
};
use fortify_core::test_functions::{branin_hoo, branin_registry, BraninParams, ObjectiveFunction};

const OPTIMUM_VALUE: f64 = 0.397887;
const VALUE_TOL: f64 = 1e-5;
const PHI_PEAK_TOL: f64 = 1e-12;
const FORTIFIED_CENTER_TOL: f64 = 1e-4;
const SIGMA_FAIL_TOL: f64 = 0.01;
const PREDICTION_TOL: f64 = 1e-3;
const P_SINGLE_TOL: f64 = 1e-6;
const P_NONE_TOL: f64 = 2e-3;

const REPLICATES: usize = 1000;
const MULTIRUN_REPLICATES: usize = 100_800;
const WORKERS: usize = 8;

fn plain_summary(pop: usize, max_iter: usize, polish: bool, master_seed: u64) -> f64 {
    let (_, optima) = branin_registry();
    let target = optima.iter().map(|o| o.value).fold(f64::INFINITY, f64::min);
    let summary = run_replicates(
        || branin_registry().0,
        &optima,
        &DEConfig::new(pop, max_iter, polish, 0),
        &SuccessCriterion::new(target),
        REPLICATES,
        master_seed,
        WORKERS,
    )
    .unwrap();
    summary.failure_percent
}

fn fortified_summary(
    label: usize,
    pop: usize,
    max_iter: usize,
    polish: bool,
    n: usize,
    master_seed: u64,
) -> fortify_core::replicate_harness::ReplicateSummary {
    let (base, optima) = branin_registry();
    let (fortified, new_optima) = fortify(base, &optima, label, 1.0, 10.0).unwrap();
    run_replicates(
        || {
            let (base, optima) = branin_registry();
            fortify(base, &optima, label, 1.0, 10.0)
                .unwrap()
                .0
                .into_objective()
        },
        &new_optima,
        &DEConfig::new(pop, max_iter, polish, 0),
        &SuccessCriterion::new(fortified.fortified_optimum_value()),
        n,
        master_seed,
        WORKERS,
    )
    .unwrap()
}

#[test]
fn criterion_1_exact_arithmetic() {
    let params = BraninParams::default();
    for loc in [[-PI, 12.275], [PI, 2.275], [9.42478, 2.475]] {
        let v = branin_hoo(loc, &params);
        assert!(
            (v - OPTIMUM_VALUE).abs() < VALUE_TOL,
            "branin at {loc:?} = {v}"
        );
    }

    assert!((bump_phi(0.0, 1.0) - 1.0 / E).abs() < PHI_PEAK_TOL);

    let (base, optima) = branin_registry();
    let (fortified, _) = fortify(base, &optima, 1, 1.0, 10.0).unwrap();
    let mut objective = fortified.into_objective();
    let center_value = objective.evaluate(&[-PI, 12.275]);
    let expected = OPTIMUM_VALUE - 10.0 / E;
    assert!(
        (center_value - expected).abs() < FORTIFIED_CENTER_TOL,
        "fortified center = {center_value}, expected {expected}"
    );

    assert!((sigma_fail(2.0 / 3.0, 30) - 1.72).abs() < SIGMA_FAIL_TOL);
    assert_eq!(required_runs(0.75, 0.01), 1055);
    assert!((independent_prediction(2.0 / 3.0, 3) - 0.296).abs() < PREDICTION_TOL);

    let (_, registry_optima) = branin_registry();
    let domain = branin_registry().0.domain().clone();
    let _ = registry_optima;
    let (p_single, _) = bump_hit_probability(1, 1.0, &domain).unwrap();
    assert!((p_single - PI / 225.0).abs() < P_SINGLE_TOL);
    let (_, p_none) = bump_hit_probability(165, 1.0, &domain).unwrap();
    assert!((p_none - 0.098).abs() < P_NONE_TOL, "p_none(165) = {p_none}");

    println!(
        "acceptance criterion 1 (exact arithmetic): PASS \
         [center={center_value:.6}, sigma={:.4}, p_none(165)={p_none:.4}]",
        sigma_fail(2.0 / 3.0, 30)
    );
}

#[test]
fn criterion_2_budget_accounting() {
    let cases = [(10usize, 20usize, 420u64), (10, 10, 220), (5, 5, 60), (2, 2, 12)];
    for (pop, max_iter, expected) in cases {
        let (mut objective, _) = branin_registry();
        let record = de_minimize(&mut objective, &DEConfig::new(pop, max_iter, false, 7)).unwrap();
        assert_eq!(
            record.de_evals,
            (pop * 2 * (max_iter + 1)) as u64,
            "formula mismatch at pop={pop}, max_iter={max_iter}"
        );
        assert_eq!(record.de_evals, expected);
        assert_eq!(objective.eval_count(), expected, "counter disagrees");
    }
    println!("acceptance criterion 2 (budget accounting): PASS [420, 220, 60, 12]");
}

#[test]
fn criterion_3_plain_branin_bands() {
    let mut report = Vec::new();

    for (pop, max_iter) in [(10usize, 10usize), (5, 5), (2, 2)] {
        let fail = plain_summary(pop, max_iter, true, 31_000 + pop as u64);
        assert!(
            fail <= 2.0,
            "polished ({pop},{max_iter}) failure {fail}% exceeds 2%"
        );
        report.push(format!("qn({pop},{max_iter})={fail:.1}%"));
    }

    let fail_tiny = plain_summary(2, 2, false, 32_000);
    assert!(fail_tiny >= 95.0, "raw (2,2) failure {fail_tiny}% below 95%");
    report.push(format!("de(2,2)={fail_tiny:.1}%"));

    let fail_long = plain_summary(10, 20, false, 33_000);
    assert!(fail_long <= 3.0, "raw (10,20) failure {fail_long}% exceeds 3%");
    report.push(format!("de(10,20)={fail_long:.1}%"));

    println!(
        "acceptance criterion 3 (plain behavior bands): PASS [{}]",
        report.join(", ")
    );
}

#[test]
fn criterion_4_fortified_difficulty_ordering() {
    let cheap = fortified_summary(1, 2, 2, true, REPLICATES, 41_000);
    assert!(
        (60.0..=80.0).contains(&cheap.failure_percent),
        "fortified (2,2) failure {}% outside 60-80",
        cheap.failure_percent
    );

    // Rising-population ladder at comparable or growing budgets.
    let ladder = [(20usize, 10usize), (40, 5), (80, 5), (330, 2)];
    let mut failures = Vec::new();
    for (i, (pop, max_iter)) in ladder.iter().enumerate() {
        let s = fortified_summary(1, *pop, *max_iter, true, REPLICATES, 42_000 + i as u64);
        failures.push(s.failure_percent);
    }
    for pair in failures.windows(2) {
        assert!(
            pair[1] < pair[0],
            "failure did not strictly decrease along the ladder: {failures:?}"
        );
    }

    println!(
        "acceptance criterion 4 (fortified ordering): PASS [cheap={:.1}%, ladder={:?}]",
        cheap.failure_percent, failures
    );
}

#[test]
fn criterion_5_multirun_independence() {
    const GAP_LIMIT: f64 = 1.5; // percentage points
    const OPT1_M10_LIMIT: f64 = 6.0;
    const EVAL_LINEARITY: f64 = 1.0;

    let m_values: Vec<usize> = (1..=10).collect();
    let mut report = Vec::new();
    for label in [1usize, 2, 3] {
        let summary = fortified_summary(label, 2, 2, true, MULTIRUN_REPLICATES, 52_000 + label as u64);
        let rows = multirun_table(&summary.outcome_bits, summary.mean_total_evals, &m_values)
            .unwrap();
        for row in &rows {
            let gap = (row.observed_failure_percent - row.predicted_failure_percent).abs();
            assert!(
                gap <= GAP_LIMIT,
                "optimum {label}, m={}: observed {:.2}% vs predicted {:.2}%",
                row.m,
                row.observed_failure_percent,
                row.predicted_failure_percent
            );
            let linear = row.m as f64 * summary.mean_total_evals;
            assert!(
                (row.evals_per_group - linear).abs() <= EVAL_LINEARITY,
                "evals per group not linear at m={}",
                row.m
            );
        }
        if label == 1 {
            let m10 = rows.last().unwrap();
            assert!(
                m10.observed_failure_percent <= OPT1_M10_LIMIT,
                "optimum 1 at m=10: {:.2}%",
                m10.observed_failure_percent
            );
        }
        report.push(format!(
            "opt{label}: p={:.1}%, m10 obs={:.2}% pred={:.2}%",
            rows[0].observed_failure_percent,
            rows[9].observed_failure_percent,
            rows[9].predicted_failure_percent
        ));
    }

    println!(
        "acceptance criterion 5 (multi-run independence): PASS [{}]",
        report.join("; ")
    );
}

#[test]
fn criterion_6_property_suites() {
    // Compact support: bit-identical to the base outside radius 1/eps.
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    let (_, optima) = branin_registry();
    for _ in 0..2000 {
        let eps = rng.random_range(0.25..3.0);
        let (base, _) = branin_registry();
        let (fortified, _) = fortify(base, &optima, 1, eps, 10.0).unwrap();
        let mut obj = fortified.into_objective();
        let (mut plain, _) = branin_registry();
        let x = [rng.random_range(-5.0..10.0), rng.random_range(0.0..15.0)];
        let r = fortify_core::test_functions::euclidean_distance(&x, &optima[0].location);
        if r >= 1.0 / eps {
            assert_eq!(obj.evaluate(&x), plain.evaluate(&x), "support leak at {x:?}");
        }
    }

    // Monotone aggravation on 1e5 random points.
    let (base, _) = branin_registry();
    let (fortified, _) = fortify(base, &optima, 2, 1.0, 10.0).unwrap();
    let mut obj = fortified.into_objective();
    let (mut plain, _) = branin_registry();
    for _ in 0..100_000 {
        let x = [rng.random_range(-5.0..10.0), rng.random_range(0.0..15.0)];
        assert!(obj.evaluate(&x) <= plain.evaluate(&x));
    }

    // Stationarity of every registered optimum and of the fortified center.
    let central_norm = |f: &mut ObjectiveFunction, at: &[f64]| -> f64 {
        let h = 1e-6;
        let mut sq = 0.0;
        for i in 0..at.len() {
            let mut hi = at.to_vec();
            let mut lo = at.to_vec();
            hi[i] += h;
            lo[i] -= h;
            let g = (f.evaluate(&hi) - f.evaluate(&lo)) / (2.0 * h);
            sq += g * g;
        }
        sq.sqrt()
    };
    let (mut plain, _) = branin_registry();
    for o in &optima {
        let norm = central_norm(&mut plain, &o.location);
        assert!(norm < 1e-3, "optimum {} gradient norm {norm}", o.label);
    }
    let (base, _) = branin_registry();
    let (fortified, _) = fortify(base, &optima, 1, 1.0, 10.0).unwrap();
    let mut obj = fortified.into_objective();
    let norm = central_norm(&mut obj, &optima[0].location);
    assert!(norm < 1e-3, "fortified center gradient norm {norm}");

    // Grid oracle: the fortified global minimum sits at the bump center.
    let (base, _) = branin_registry();
    let (fortified, _) = fortify(base, &optima, 3, 1.0, 10.0).unwrap();
    let mut obj = fortified.into_objective();
    let domain = obj.domain().clone();
    let n = 301;
    let mut best = (f64::INFINITY, [0.0f64, 0.0]);
    for i in 0..n {
        let x1 = domain.lower()[0] + 15.0 * i as f64 / (n - 1) as f64;
        for j in 0..n {
            let x2 = domain.lower()[1] + 15.0 * j as f64 / (n - 1) as f64;
            let v = obj.evaluate(&[x1, x2]);
            if v < best.0 {
                best = (v, [x1, x2]);
            }
        }
    }
    let dist = fortify_core::test_functions::euclidean_distance(&best.1, &optima[2].location);
    assert!(dist < 0.1, "grid minimum {dist} away from the bump center");

    // Latin hypercube stratification exactness.
    let mut rng = ChaCha8Rng::seed_from_u64(66);
    for n in [1usize, 2, 7, 33, 128] {
        let points = latin_hypercube(n, &domain, &mut rng);
        for j in 0..2 {
            let lo = domain.lower()[j];
            let w = (domain.upper()[j] - lo) / n as f64;
            let mut seen = vec![false; n];
            for p in &points {
                let s = (((p[j] - lo) / w).floor() as usize).min(n - 1);
                assert!(!seen[s], "n={n}: axis {j} stratum {s} occupied twice");
                seen[s] = true;
            }
        }
    }

    // Bit-identical replicate reruns with 1, 4 and 8 workers.
    let (base, optima2) = branin_registry();
    let (fortified, new_optima) = fortify(base, &optima2, 1, 1.0, 10.0).unwrap();
    let criterion = SuccessCriterion::new(fortified.fortified_optimum_value());
    let factory = || {
        let (base, optima) = branin_registry();
        fortify(base, &optima, 1, 1.0, 10.0)
            .unwrap()
            .0
            .into_objective()
    };
    let config = DEConfig::new(2, 2, true, 0);
    let reference =
        run_replicates(factory, &new_optima, &config, &criterion, 200, 6_600, 1).unwrap();
    for workers in [4usize, 8] {
        let repeat =
            run_replicates(factory, &new_optima, &config, &criterion, 200, 6_600, workers)
                .unwrap();
        assert_eq!(reference, repeat, "summary changed with {workers} workers");
    }

    println!("acceptance criterion 6 (property suites): PASS");
}
