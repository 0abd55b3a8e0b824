//! Replicate optimization runs: success/failure classification against a
//! target optimum, failure-probability statistics, and the population
//! bump-hit probability.

use rayon::prelude::*;

use crate::de_optimizer::{de_minimize, DEConfig, RunRecord};
use crate::error::{Error, Result};
use crate::test_functions::{euclidean_distance, BoxDomain, KnownOptimum, ObjectiveFunction};

/// What counts as a successful run.
#[derive(Debug, Clone, PartialEq)]
pub struct SuccessCriterion {
    /// A run succeeds when `best_f - target_value <= value_tolerance`.
    pub value_tolerance: f64,
    /// A run is attributed to an optimum when its best point lies within
    /// this Euclidean distance of it.
    pub near_radius: f64,
    /// The true global minimum of the function under test.
    pub target_value: f64,
}

impl SuccessCriterion {
    pub fn new(target_value: f64) -> Self {
        Self {
            value_tolerance: 0.01,
            near_radius: 1.0,
            target_value,
        }
    }
}

/// Aggregate over `n` replicate runs.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateSummary {
    pub n_runs: usize,
    pub n_failures: usize,
    pub failure_percent: f64,
    /// Percentage of runs landing within `near_radius` of each registered
    /// optimum, indexed like the optima list.
    pub per_optimum_percent: Vec<f64>,
    pub mean_total_evals: f64,
    pub mean_de_evals: f64,
    pub mean_polish_evals: f64,
    /// Per-run failure flags in run-index order (`true` = failure), kept for
    /// multi-run grouping analysis.
    pub outcome_bits: Vec<bool>,
}

impl ReplicateSummary {
    /// Renders the outcomes as one compact text line, `'1'` for a success
    /// and `'0'` for a failure, preserving run order.
    pub fn outcome_line(&self) -> String {
        outcomes_to_line(&self.outcome_bits)
    }
}

/// Encodes failure flags as '0' (failure) / '1' (success) characters.
pub fn outcomes_to_line(outcome_bits: &[bool]) -> String {
    outcome_bits
        .iter()
        .map(|failed| if *failed { '0' } else { '1' })
        .collect()
}

/// Parses an outcome line written by [`outcomes_to_line`].
pub fn outcomes_from_line(line: &str) -> Result<Vec<bool>> {
    line.trim()
        .chars()
        .map(|c| match c {
            '0' => Ok(true),
            '1' => Ok(false),
            other => Err(Error::InvalidArgument(format!(
                "outcome lines hold only '0' and '1', found {other:?}"
            ))),
        })
        .collect()
}

/// Classifies one run: success iff the best value is within tolerance of the
/// target, plus the label of the nearest optimum when one lies within the
/// near radius (ties broken by lowest label).
pub fn classify_run(
    record: &RunRecord,
    optima: &[KnownOptimum],
    criterion: &SuccessCriterion,
) -> (bool, Option<usize>) {
    debug_assert!(!optima.is_empty());
    let success = record.best_f - criterion.target_value <= criterion.value_tolerance;
    let mut nearest: Option<(usize, f64)> = None;
    for o in optima {
        let d = euclidean_distance(&record.best_x, &o.location);
        let closer = match nearest {
            Some((_, best_d)) => d < best_d,
            None => true,
        };
        if closer {
            nearest = Some((o.label, d));
        }
    }
    let nearest_label = nearest
        .filter(|(_, d)| *d <= criterion.near_radius)
        .map(|(label, _)| label);
    (success, nearest_label)
}

/// Derives the per-run seed from the master seed and the run index.
///
/// This is the splitmix64 output stream: state `master_seed` advanced
/// `index + 1` times, so replications are portable to any implementation of
/// the published mix.
pub fn run_seed(master_seed: u64, run_index: u64) -> u64 {
    splitmix64(master_seed.wrapping_add((run_index + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs `n` independent replicates of `config` against fresh objectives from
/// `factory` and aggregates the outcomes.
///
/// Each run gets its own objective instance (fresh counter) and a seed
/// derived from `(master_seed, run_index)`, so the summary is identical for
/// any `workers` count; runs are aggregated in index order.
pub fn run_replicates<F>(
    factory: F,
    optima: &[KnownOptimum],
    config: &DEConfig,
    criterion: &SuccessCriterion,
    n: usize,
    master_seed: u64,
    workers: usize,
) -> Result<ReplicateSummary>
where
    F: Fn() -> ObjectiveFunction + Sync,
{
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one run".into()));
    }
    // Fail fast on configs that would fail inside the workers.
    config.validate(factory().domain().dim())?;

    let run_one = |i: usize| -> RunRecord {
        let mut objective = factory();
        let run_config = DEConfig {
            seed: run_seed(master_seed, i as u64),
            ..config.clone()
        };
        de_minimize(&mut objective, &run_config).expect("config validated above")
    };

    let records: Vec<RunRecord> = if workers <= 1 {
        (0..n).map(run_one).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("worker pool: {e}")))?;
        pool.install(|| (0..n).into_par_iter().map(run_one).collect())
    };

    let mut n_failures = 0usize;
    let mut near_counts = vec![0usize; optima.len()];
    let mut outcome_bits = Vec::with_capacity(n);
    let (mut sum_total, mut sum_de, mut sum_polish) = (0.0f64, 0.0f64, 0.0f64);
    for record in &records {
        let (success, nearest_label) = classify_run(record, optima, criterion);
        if !success {
            n_failures += 1;
        }
        outcome_bits.push(!success);
        if let Some(label) = nearest_label {
            let idx = optima
                .iter()
                .position(|o| o.label == label)
                .expect("label came from the optima list");
            near_counts[idx] += 1;
        }
        sum_total += record.total_evals as f64;
        sum_de += record.de_evals as f64;
        sum_polish += record.polish_evals as f64;
    }

    Ok(ReplicateSummary {
        n_runs: n,
        n_failures,
        failure_percent: 100.0 * n_failures as f64 / n as f64,
        per_optimum_percent: near_counts
            .iter()
            .map(|c| 100.0 * *c as f64 / n as f64)
            .collect(),
        mean_total_evals: sum_total / n as f64,
        mean_de_evals: sum_de / n as f64,
        mean_polish_evals: sum_polish / n as f64,
        outcome_bits,
    })
}

/// Failure-count standard deviation `p * sqrt(p n (1 - p))`.
///
/// This is the exact formula used by the accuracy analysis that sizes the
/// replicate counts; see [`binomial_count_sigma`] for the textbook binomial
/// statistic when an independent sanity check is wanted.
pub fn sigma_fail(p: f64, n: usize) -> f64 {
    debug_assert!((0.0..=1.0).contains(&p) && n >= 1);
    p * (p * n as f64 * (1.0 - p)).sqrt()
}

/// Standard binomial count standard deviation `sqrt(n p (1 - p))`.
pub fn binomial_count_sigma(p: f64, n: usize) -> f64 {
    (n as f64 * p * (1.0 - p)).sqrt()
}

/// Number of runs needed so the failure-percentage estimate reaches the given
/// accuracy: `ceil(p^3 (1-p) / accuracy^2)`.
pub fn required_runs(p: f64, accuracy: f64) -> u64 {
    assert!(p > 0.0 && p < 1.0, "p must lie strictly inside (0, 1)");
    assert!(accuracy > 0.0, "accuracy must be positive");
    let raw = p.powi(3) * (1.0 - p) / (accuracy * accuracy);
    // Guard against floating-point dust just above an integer.
    let nearest = raw.round();
    if (raw - nearest).abs() < 1e-9 {
        nearest as u64
    } else {
        raw.ceil() as u64
    }
}

/// Probability that a single uniformly placed point lands inside a bump of
/// support radius `1/epsilon`, and that none of `population_count` points
/// does.
///
/// The support ball must fit inside the domain; the dimension comes from the
/// domain itself, and `population_count` is the actual number of individuals
/// (the population multiplier times the dimension, for the DE harness).
pub fn bump_hit_probability(
    population_count: usize,
    epsilon: f64,
    domain: &BoxDomain,
) -> Result<(f64, f64)> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be > 0, got {epsilon}"
        )));
    }
    if population_count == 0 {
        return Err(Error::InvalidArgument("population count must be positive".into()));
    }
    let radius = 1.0 / epsilon;
    for i in 0..domain.dim() {
        let side = domain.upper()[i] - domain.lower()[i];
        if 2.0 * radius > side {
            return Err(Error::OutOfDomain(format!(
                "support ball of radius {radius} cannot fit inside a side of length {side}"
            )));
        }
    }
    let p_single = ball_volume(domain.dim(), radius) / domain.volume();
    let p_none = (1.0 - p_single).powi(population_count as i32);
    Ok((p_single, p_none))
}

/// Volume of the d-dimensional Euclidean ball of the given radius.
fn ball_volume(d: usize, radius: f64) -> f64 {
    // V_d = (2 pi r^2 / d) V_{d-2}, with V_0 = 1 and V_1 = 2r.
    let even = d.is_multiple_of(2);
    let mut v = if even { 1.0 } else { 2.0 * radius };
    let mut k = if even { 2 } else { 3 };
    while k <= d {
        v *= 2.0 * std::f64::consts::PI * radius * radius / k as f64;
        k += 2;
    }
    v
}
