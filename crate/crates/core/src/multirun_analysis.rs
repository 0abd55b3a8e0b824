//! The multiple-short-runs strategy: group replicate outcomes into batches
//! of `m`, measure how often every run in a batch fails, and compare against
//! the `p^m` prediction that holds when runs are independent.

use crate::error::{Error, Result};

/// Grouped-failure statistics for one group size `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiRunSummary {
    pub m: usize,
    pub n_groups: usize,
    /// Percentage of groups whose `m` runs all failed.
    pub observed_failure_percent: f64,
    /// `100 * p^m` with `p` the single-run failure fraction from the same
    /// outcome list.
    pub predicted_failure_percent: f64,
    /// `m` times the mean single-run evaluation count.
    pub evals_per_group: f64,
}

/// Failure probability of `m` independent runs, `p^m`.
pub fn independent_prediction(p: f64, m: usize) -> f64 {
    debug_assert!((0.0..=1.0).contains(&p) && m >= 1);
    p.powi(m as i32)
}

/// Partitions `outcomes` (`true` = failure) in order into consecutive
/// disjoint groups of `m`, dropping any remainder, and returns the number of
/// groups together with the fraction that are all-failure.
pub fn group_failures(outcomes: &[bool], m: usize) -> Result<(usize, f64)> {
    if m == 0 {
        return Err(Error::InvalidArgument("group size must be positive".into()));
    }
    if m > outcomes.len() {
        return Err(Error::GroupTooLarge {
            m,
            len: outcomes.len(),
        });
    }
    let n_groups = outcomes.len() / m;
    let all_fail = outcomes[..n_groups * m]
        .chunks_exact(m)
        .filter(|group| group.iter().all(|failed| *failed))
        .count();
    Ok((n_groups, all_fail as f64 / n_groups as f64))
}

/// One [`MultiRunSummary`] per requested `m`.
///
/// The prediction row uses the single-run failure fraction observed in
/// `outcomes` itself, and the evaluation estimate is `m * mean_evals`
/// exactly.
pub fn multirun_table(
    outcomes: &[bool],
    mean_evals: f64,
    m_values: &[usize],
) -> Result<Vec<MultiRunSummary>> {
    let failures = outcomes.iter().filter(|failed| **failed).count();
    let p_single = failures as f64 / outcomes.len().max(1) as f64;
    m_values
        .iter()
        .map(|&m| {
            let (n_groups, fraction) = group_failures(outcomes, m)?;
            Ok(MultiRunSummary {
                m,
                n_groups,
                observed_failure_percent: 100.0 * fraction,
                predicted_failure_percent: 100.0 * independent_prediction(p_single, m),
                evals_per_group: m as f64 * mean_evals,
            })
        })
        .collect()
}
