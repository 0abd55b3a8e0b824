//! Subcommand implementations: benchmark tables, grouped-runs analysis and
//! slice exports. Everything returns rendered documents so the binary only
//! handles argument parsing and file IO.

use anyhow::{anyhow, bail, Context, Result};

use fortify_core::de_optimizer::DEConfig;
use fortify_core::fortification::{fortify, slice_1d};
use fortify_core::multirun_analysis::multirun_table;
use fortify_core::replicate_harness::{
    outcomes_from_line, run_replicates, ReplicateSummary, SuccessCriterion,
};
use fortify_core::test_functions::{registry_by_name, registry_names, KnownOptimum, ObjectiveFunction};

use crate::manifest::{BumpOptions, ExperimentManifest};
use crate::report::{fmt1, fmt6, OutputFormat, TableDocument};

/// A rendered document plus any outcome-bit lines for persistence.
#[derive(Debug, Clone)]
pub struct CommandOutput {
    pub document: String,
    /// One '0'/'1' line per executed experiment, in emission order.
    pub outcome_lines: Vec<String>,
}

/// Row of a benchmark table: which algorithm at which budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableRowSpec {
    pub polish: bool,
    pub pop: usize,
    pub max_iter: usize,
}

impl TableRowSpec {
    pub fn algorithm_name(&self) -> &'static str {
        if self.polish {
            "de/bfgs"
        } else {
            "de"
        }
    }

    /// Parses `"de,10,20"` or `"de/bfgs,2,2"` (alias `debfgs`).
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            bail!("row {text:?} must be algorithm,pop,max_iter");
        }
        let polish = match parts[0].to_ascii_lowercase().as_str() {
            "de" => false,
            "de/bfgs" | "debfgs" => true,
            other => bail!("unknown algorithm {other:?}; use de or de/bfgs"),
        };
        Ok(Self {
            polish,
            pop: parts[1].parse().with_context(|| format!("pop in {text:?}"))?,
            max_iter: parts[2]
                .parse()
                .with_context(|| format!("max_iter in {text:?}"))?,
        })
    }
}

/// The benchmark ladder used when no rows are given and no bump is set.
pub fn default_plain_rows() -> Vec<TableRowSpec> {
    [
        (false, 10, 20),
        (false, 10, 10),
        (true, 10, 10),
        (false, 5, 5),
        (true, 5, 5),
        (false, 2, 2),
        (true, 2, 2),
    ]
    .map(|(polish, pop, max_iter)| TableRowSpec { polish, pop, max_iter })
    .to_vec()
}

/// The denser ladder used by default for fortified runs, walking the
/// population up at comparable or growing budgets.
pub fn default_fortified_rows() -> Vec<TableRowSpec> {
    [
        (false, 10, 20),
        (false, 20, 10),
        (true, 20, 10),
        (false, 40, 5),
        (true, 40, 5),
        (false, 50, 4),
        (true, 50, 4),
        (false, 80, 5),
        (true, 80, 5),
        (true, 100, 4),
        (true, 125, 3),
        (true, 165, 2),
        (true, 330, 2),
    ]
    .map(|(polish, pop, max_iter)| TableRowSpec { polish, pop, max_iter })
    .to_vec()
}

/// The function under test together with its optima and success criterion,
/// after any requested fortification.
struct Experiment {
    function: String,
    bump: Option<BumpOptions>,
    optima: Vec<KnownOptimum>,
    criterion: SuccessCriterion,
}

impl Experiment {
    fn resolve(function: &str, bump: Option<&BumpOptions>) -> Result<Self> {
        let (base, optima) = registry_by_name(function).ok_or_else(|| {
            anyhow!(
                "unknown function {function:?}; available: {}",
                registry_names().join(", ")
            )
        })?;
        let (optima, target_value) = match bump {
            Some(b) => {
                let (fortified, new_optima) =
                    fortify(base, &optima, b.target_label, b.epsilon, b.amplitude)?;
                (new_optima, fortified.fortified_optimum_value())
            }
            None => {
                let target = optima.iter().map(|o| o.value).fold(f64::INFINITY, f64::min);
                (optima, target)
            }
        };
        Ok(Self {
            function: function.to_string(),
            bump: bump.cloned(),
            optima,
            criterion: SuccessCriterion::new(target_value),
        })
    }

    /// A factory building a fresh counting objective per run.
    fn factory(&self) -> impl Fn() -> ObjectiveFunction + Sync + '_ {
        let function = self.function.clone();
        let bump = self.bump.clone();
        move || {
            let (base, optima) = registry_by_name(&function).expect("resolved above");
            match &bump {
                Some(b) => fortify(base, &optima, b.target_label, b.epsilon, b.amplitude)
                    .expect("resolved above")
                    .0
                    .into_objective(),
                None => base,
            }
        }
    }

    fn run(
        &self,
        config: &DEConfig,
        n_runs: usize,
        master_seed: u64,
        workers: usize,
    ) -> fortify_core::Result<ReplicateSummary> {
        run_replicates(
            self.factory(),
            &self.optima,
            config,
            &self.criterion,
            n_runs,
            master_seed,
            workers,
        )
    }
}

#[derive(Debug, Clone)]
pub struct TableOptions {
    pub function: String,
    pub bump: Option<BumpOptions>,
    /// An empty row set yields a header-only table.
    pub rows: Vec<TableRowSpec>,
    pub n_runs: usize,
    pub master_seed: u64,
    pub workers: usize,
    pub format: OutputFormat,
}

/// Benchmark table: one replicate experiment per row, reporting failure
/// percentage, mean evaluation counts and per-optimum attribution.
pub fn cmd_table(options: &TableOptions) -> Result<CommandOutput> {
    let experiment = Experiment::resolve(&options.function, options.bump.as_ref())?;
    let rows = &options.rows;

    let manifest = ExperimentManifest::new("table", &options.function)
        .with_bump(options.bump.as_ref())
        .with_detail(
            "rows",
            rows.iter()
                .map(|r| format!("{},{},{}", r.algorithm_name(), r.pop, r.max_iter))
                .collect::<Vec<_>>()
                .join(";"),
        )
        .with_runs(options.n_runs)
        .with_seed(options.master_seed)
        .with_criterion(&experiment.criterion);

    let mut doc = TableDocument {
        comments: manifest.lines(),
        header: table_header(&experiment.optima),
        rows: Vec::new(),
    };
    let mut outcome_lines = Vec::new();

    for row in rows {
        let config = DEConfig::new(row.pop, row.max_iter, row.polish, 0);
        match experiment.run(&config, options.n_runs, options.master_seed, options.workers) {
            Ok(summary) => {
                let mut cells = vec![
                    row.algorithm_name().to_string(),
                    row.pop.to_string(),
                    row.max_iter.to_string(),
                    fmt1(summary.failure_percent),
                    fmt1(summary.mean_total_evals),
                ];
                cells.extend(summary.per_optimum_percent.iter().map(|p| fmt1(*p)));
                doc.rows.push(cells);
                outcome_lines.push(summary.outcome_line());
            }
            Err(err) => {
                // Report the bad row and keep going with the rest.
                doc.comments.push(format!(
                    "row error: {},{},{}: {err}",
                    row.algorithm_name(),
                    row.pop,
                    row.max_iter
                ));
            }
        }
    }

    Ok(CommandOutput {
        document: doc.render(options.format),
        outcome_lines,
    })
}

fn table_header(optima: &[KnownOptimum]) -> Vec<String> {
    let mut header = vec![
        "algorithm".to_string(),
        "pop".to_string(),
        "max_iter".to_string(),
        "percent_failures".to_string(),
        "avg_evals".to_string(),
    ];
    header.extend(optima.iter().map(|o| format!("near_opt_{}", o.label)));
    header
}

#[derive(Debug, Clone)]
pub struct MultirunOptions {
    pub function: String,
    pub bump: Option<BumpOptions>,
    pub pop: usize,
    pub max_iter: usize,
    pub polish: bool,
    pub n_runs: usize,
    pub m_max: usize,
    pub master_seed: u64,
    pub workers: usize,
    pub format: OutputFormat,
}

/// Grouped-runs analysis: observed group failure rate per group size m,
/// the independent prediction, and the evaluation cost estimate.
pub fn cmd_multirun(options: &MultirunOptions) -> Result<CommandOutput> {
    if options.m_max < 1 {
        bail!("m-max must be at least 1");
    }
    if options.n_runs < options.m_max {
        bail!(
            "{} runs cannot form a group of {}",
            options.n_runs,
            options.m_max
        );
    }
    let experiment = Experiment::resolve(&options.function, options.bump.as_ref())?;
    let config = DEConfig::new(options.pop, options.max_iter, options.polish, 0);

    let manifest = ExperimentManifest::new("multirun", &options.function)
        .with_bump(options.bump.as_ref())
        .with_de_config(&config)
        .with_detail("m_max", options.m_max)
        .with_runs(options.n_runs)
        .with_seed(options.master_seed)
        .with_criterion(&experiment.criterion);

    let summary = experiment.run(&config, options.n_runs, options.master_seed, options.workers)?;
    let doc = grouped_document(
        manifest.lines(),
        &summary.outcome_bits,
        summary.mean_total_evals,
        options.m_max,
        options.n_runs,
    )?;
    Ok(CommandOutput {
        document: doc.render(options.format),
        outcome_lines: vec![summary.outcome_line()],
    })
}

/// Offline variant of [`cmd_multirun`] over a persisted outcome line.
pub fn cmd_multirun_offline(
    line: &str,
    mean_evals: f64,
    m_max: usize,
    format: OutputFormat,
) -> Result<CommandOutput> {
    let outcomes = outcomes_from_line(line)?;
    if outcomes.is_empty() {
        bail!("outcome line is empty");
    }
    if m_max < 1 || m_max > outcomes.len() {
        bail!("m-max must be in 1..={}", outcomes.len());
    }
    let manifest = vec![
        format!("manifest: artifact=fortify {}", env!("CARGO_PKG_VERSION")),
        "manifest: command=multirun (offline outcome line)".to_string(),
        format!("manifest: runs={}", outcomes.len()),
        format!("manifest: mean_evals={mean_evals}"),
    ];
    let doc = grouped_document(manifest, &outcomes, mean_evals, m_max, outcomes.len())?;
    Ok(CommandOutput {
        document: doc.render(format),
        outcome_lines: Vec::new(),
    })
}

fn grouped_document(
    mut comments: Vec<String>,
    outcomes: &[bool],
    mean_evals: f64,
    m_max: usize,
    n_runs: usize,
) -> Result<TableDocument> {
    let leftovers: Vec<usize> = (1..=m_max).filter(|m| !n_runs.is_multiple_of(*m)).collect();
    if !leftovers.is_empty() {
        comments.push(format!(
            "note: {n_runs} runs are not divisible by m in {leftovers:?}; trailing runs dropped"
        ));
    }

    let m_values: Vec<usize> = (1..=m_max).collect();
    let rows = multirun_table(outcomes, mean_evals, &m_values)?;

    let mut header = vec!["m".to_string()];
    header.extend(m_values.iter().map(|m| m.to_string()));
    let mut observed = vec!["percent_failures".to_string()];
    let mut predicted = vec!["percent_expected_if_independent".to_string()];
    let mut evals = vec!["evals_per_group".to_string()];
    for row in &rows {
        observed.push(fmt1(row.observed_failure_percent));
        predicted.push(fmt1(row.predicted_failure_percent));
        evals.push(fmt1(row.evals_per_group));
    }

    Ok(TableDocument {
        comments,
        header,
        rows: vec![observed, predicted, evals],
    })
}

#[derive(Debug, Clone)]
pub struct SliceOptions {
    pub function: String,
    /// Optimum at which requested bumps are centered.
    pub bump_target: usize,
    /// One fortified column per width parameter; empty means base only.
    pub epsilons: Vec<f64>,
    pub amplitude: f64,
    pub fixed_dim: usize,
    pub fixed_value: f64,
    pub n_points: usize,
    pub format: OutputFormat,
}

/// Slice export: the base function and one fortified column per epsilon,
/// sampled along the free axis at the fixed coordinate.
pub fn cmd_slice(options: &SliceOptions) -> Result<CommandOutput> {
    let (base, optima) = registry_by_name(&options.function).ok_or_else(|| {
        anyhow!(
            "unknown function {:?}; available: {}",
            options.function,
            registry_names().join(", ")
        )
    })?;
    if options.fixed_dim >= 2 {
        bail!("fixed-dim must be 0 or 1");
    }
    let free_dim = 1 - options.fixed_dim;
    let domain = base.domain().clone();
    let sweep = (domain.lower()[free_dim], domain.upper()[free_dim]);

    let mut manifest = ExperimentManifest::new("slice", &options.function)
        .with_detail("fixed_dim", options.fixed_dim)
        .with_detail("fixed_value", options.fixed_value)
        .with_detail("points", options.n_points);
    manifest = if options.epsilons.is_empty() {
        manifest.with_bump(None)
    } else {
        manifest.with_bump_text(format!(
            "optimum {} epsilons {} amplitude {}",
            options.bump_target,
            options
                .epsilons
                .iter()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
                .join(";"),
            options.amplitude
        ))
    };

    let mut base_obj = base;
    let base_samples = slice_1d(
        &mut base_obj,
        options.fixed_dim,
        options.fixed_value,
        sweep,
        options.n_points,
    )?;

    let mut columns: Vec<Vec<f64>> = Vec::new();
    for eps in &options.epsilons {
        let (fresh_base, _) =
            registry_by_name(&options.function).expect("function resolved above");
        let (fortified, _) = fortify(
            fresh_base,
            &optima,
            options.bump_target,
            *eps,
            options.amplitude,
        )?;
        let mut obj = fortified.into_objective();
        let samples = slice_1d(
            &mut obj,
            options.fixed_dim,
            options.fixed_value,
            sweep,
            options.n_points,
        )?;
        columns.push(samples.iter().map(|(_, v)| *v).collect());
    }

    let header = if options.epsilons.is_empty() {
        vec!["coordinate".to_string(), "value".to_string()]
    } else {
        let mut h = vec!["coordinate".to_string(), "base".to_string()];
        h.extend(options.epsilons.iter().map(|e| format!("eps_{e}")));
        h
    };

    let rows = base_samples
        .iter()
        .enumerate()
        .map(|(i, (coordinate, base_value))| {
            let mut cells = vec![fmt6(*coordinate), fmt6(*base_value)];
            cells.extend(columns.iter().map(|col| fmt6(col[i])));
            cells
        })
        .collect();

    Ok(CommandOutput {
        document: TableDocument {
            comments: manifest.lines(),
            header,
            rows,
        }
        .render(options.format),
        outcome_lines: Vec::new(),
    })
}
