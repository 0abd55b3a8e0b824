//! `fortify`: benchmark fortified test functions and report the results.

use std::f64::consts::PI;
use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use fortify_cli::commands::{
    cmd_multirun, cmd_multirun_offline, cmd_slice, cmd_table, default_fortified_rows,
    default_plain_rows, CommandOutput, MultirunOptions, SliceOptions, TableOptions, TableRowSpec,
};
use fortify_cli::manifest::BumpOptions;
use fortify_cli::report::OutputFormat;

/// Every run is reproducible: this seed is used whenever --seed is absent.
const DEFAULT_SEED: u64 = 42;

#[derive(Parser)]
#[command(
    name = "fortify",
    version,
    about = "Benchmark plain and fortified test functions with replicate DE runs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replicate benchmark table over (algorithm, pop, max_iter) rows
    Table(TableArgs),
    /// Grouped multiple-short-runs analysis for group sizes 1..=m-max
    Multirun(MultirunArgs),
    /// 1-D slice of the base and fortified functions, for replotting
    Slice(SliceArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Test function to benchmark
    #[arg(long, default_value = "branin")]
    function: String,

    /// Master seed for the replicate experiments
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,

    /// Worker threads for replicate execution (0 = all cores); results do
    /// not depend on this
    #[arg(long, default_value_t = 0)]
    workers: usize,

    /// Output format
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,

    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct BumpArgs {
    /// Fortify by subtracting a bump at this optimum label
    #[arg(long)]
    bump_optimum: Option<usize>,

    /// Bump width parameter (support radius is 1/epsilon)
    #[arg(long, default_value_t = 1.0)]
    epsilon: f64,

    /// Bump amplitude (peak depth is amplitude/e)
    #[arg(long, default_value_t = 10.0)]
    amplitude: f64,
}

impl BumpArgs {
    fn to_options(&self) -> Option<BumpOptions> {
        self.bump_optimum.map(|target_label| BumpOptions {
            target_label,
            epsilon: self.epsilon,
            amplitude: self.amplitude,
        })
    }
}

#[derive(Args)]
struct TableArgs {
    #[command(flatten)]
    common: CommonArgs,

    #[command(flatten)]
    bump: BumpArgs,

    /// Table row as algorithm,pop,max_iter (repeatable); algorithm is `de`
    /// or `de/bfgs`. Defaults to a built-in ladder for the chosen setup.
    #[arg(long = "row")]
    rows: Vec<String>,

    /// Single-row shorthand: population multiplier (with --max-iter)
    #[arg(long, requires = "max_iter")]
    pop: Option<usize>,

    /// Single-row shorthand: DE generations (with --pop)
    #[arg(long, requires = "pop")]
    max_iter: Option<usize>,

    /// Polish the single-row shorthand with the quasi-Newton phase
    #[arg(long, overrides_with = "no_polish")]
    polish: bool,

    #[arg(long = "no-polish", hide = true)]
    no_polish: bool,

    /// Replicate runs per row
    #[arg(long, default_value_t = 1000)]
    runs: usize,

    /// Append one '0'/'1' outcome line per row to this file
    #[arg(long)]
    bits_out: Option<PathBuf>,
}

#[derive(Args)]
struct MultirunArgs {
    #[command(flatten)]
    common: CommonArgs,

    #[command(flatten)]
    bump: BumpArgs,

    /// Population multiplier
    #[arg(long, default_value_t = 2)]
    pop: usize,

    /// DE generations
    #[arg(long, default_value_t = 2)]
    max_iter: usize,

    /// Run the quasi-Newton polish after DE (default on; use --no-polish to
    /// disable)
    #[arg(long, overrides_with = "no_polish")]
    polish: bool,

    #[arg(long = "no-polish")]
    no_polish: bool,

    /// Total replicate runs; pick something divisible by every group size
    #[arg(long, default_value_t = 100_800)]
    runs: usize,

    /// Largest group size m
    #[arg(long, default_value_t = 10)]
    m_max: usize,

    /// Write the '0'/'1' outcome line to this file
    #[arg(long)]
    bits_out: Option<PathBuf>,

    /// Analyze a persisted outcome line instead of running experiments
    #[arg(long, conflicts_with_all = ["bits_out", "runs"])]
    bits_in: Option<PathBuf>,

    /// Mean evaluations per run for the --bits-in cost row
    #[arg(long, default_value_t = 0.0)]
    mean_evals: f64,
}

#[derive(Args)]
struct SliceArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Optimum label at which the sliced bumps are centered
    #[arg(long, default_value_t = 1)]
    bump_optimum: usize,

    /// Width parameter for a fortified column (repeatable; none = base only)
    #[arg(long = "epsilon")]
    epsilons: Vec<f64>,

    /// Bump amplitude
    #[arg(long, default_value_t = 10.0)]
    amplitude: f64,

    /// Dimension held fixed (0 or 1)
    #[arg(long, default_value_t = 0)]
    fixed_dim: usize,

    /// Coordinate of the fixed dimension; defaults to -pi, through the
    /// first optimum
    #[arg(long, default_value_t = -PI, allow_hyphen_values = true)]
    fixed_value: f64,

    /// Sample count along the free dimension
    #[arg(long, default_value_t = 151)]
    points: usize,
}

fn resolve_workers(workers: usize) -> usize {
    if workers == 0 {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    } else {
        workers
    }
}

fn deliver(output: CommandOutput, out: Option<&PathBuf>, bits_out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, &output.document)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{}", output.document),
    }
    if let Some(path) = bits_out {
        let mut text = output.outcome_lines.join("\n");
        text.push('\n');
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Table(args) => {
            let mut rows = Vec::new();
            for text in &args.rows {
                rows.push(TableRowSpec::parse(text)?);
            }
            if let (Some(pop), Some(max_iter)) = (args.pop, args.max_iter) {
                rows.push(TableRowSpec {
                    polish: args.polish && !args.no_polish,
                    pop,
                    max_iter,
                });
            }
            if rows.is_empty() {
                // No rows requested: run the built-in benchmark ladder.
                rows = if args.bump.bump_optimum.is_some() {
                    default_fortified_rows()
                } else {
                    default_plain_rows()
                };
            }
            let output = cmd_table(&TableOptions {
                function: args.common.function.clone(),
                bump: args.bump.to_options(),
                rows,
                n_runs: args.runs,
                master_seed: args.common.seed,
                workers: resolve_workers(args.common.workers),
                format: args.common.format.into(),
            })?;
            deliver(output, args.common.out.as_ref(), args.bits_out.as_ref())
        }
        Command::Multirun(args) => {
            let output = if let Some(path) = &args.bits_in {
                let line = fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                let line = line
                    .lines()
                    .next()
                    .ok_or_else(|| anyhow::anyhow!("{} is empty", path.display()))?;
                cmd_multirun_offline(line, args.mean_evals, args.m_max, args.common.format.into())?
            } else {
                if args.runs == 0 {
                    bail!("need at least one run");
                }
                cmd_multirun(&MultirunOptions {
                    function: args.common.function.clone(),
                    bump: args.bump.to_options(),
                    pop: args.pop,
                    max_iter: args.max_iter,
                    polish: !args.no_polish,
                    n_runs: args.runs,
                    m_max: args.m_max,
                    master_seed: args.common.seed,
                    workers: resolve_workers(args.common.workers),
                    format: args.common.format.into(),
                })?
            };
            deliver(output, args.common.out.as_ref(), args.bits_out.as_ref())
        }
        Command::Slice(args) => {
            let output = cmd_slice(&SliceOptions {
                function: args.common.function.clone(),
                bump_target: args.bump_optimum,
                epsilons: args.epsilons.clone(),
                amplitude: args.amplitude,
                fixed_dim: args.fixed_dim,
                fixed_value: args.fixed_value,
                n_points: args.points,
                format: args.common.format.into(),
            })?;
            deliver(output, args.common.out.as_ref(), None)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Md,
}

impl From<FormatArg> for OutputFormat {
    fn from(value: FormatArg) -> Self {
        match value {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Md => OutputFormat::Md,
        }
    }
}
