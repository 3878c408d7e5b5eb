//! Command-line interface.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 invalid model, 3 resource
//! limit exceeded.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::bench::{emit_report, run_benchmark, to_csv, BenchConfig, ReportFormat};
use crate::error::{Error, Result};
use crate::factor::VarId;
use crate::format::{parse_model, parse_uai, print_model, ModelFile, Validation};
use crate::graph::{run_elimination_with, CostLedger, FactorGraph, Mode, TotalsConvention};
use crate::search::{find_order, AnnealParams, CostModel, Objective, Policy};
use crate::symmetry::{detect_symmetries, SymmetryPartition};

#[derive(Debug, Parser)]
#[command(
    name = "symve",
    version,
    about = "Variable elimination with local-symmetry compact encodings"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,

    /// How `partition` handles potentials.
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Dense)]
    mode: ModeArg,

    /// Cost model optimized by order search.
    #[arg(long, global = true, value_enum, default_value_t = CostArg::Dense)]
    cost: CostArg,

    /// `paper` sums all steps but the last, `full` sums every step.
    #[arg(long, global = true, value_enum, default_value_t = TotalsArg::Full)]
    totals: TotalsArg,

    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads for `bench` (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Re-detect symmetries of input and intermediate factors in compact mode.
    #[arg(long, global = true)]
    redetect: bool,

    /// Trust declared symmetries instead of checking them against tables.
    #[arg(long = "no-validate", global = true)]
    no_validate: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute the partition function and print the cost ledger.
    Partition {
        model: PathBuf,
        /// Explicit elimination order (comma-separated ids).
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<VarId>>,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Find an elimination order and print its total cost.
    Order {
        model: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Print the maximal symmetry groups of every factor.
    Detect { model: PathBuf },
    /// Dense versus compact cumulative costs on random symmetric models.
    Bench {
        /// CSV output path (standard output if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// SVG chart output path.
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "50,55,60,65")]
        rv_counts: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        factors: usize,
        #[arg(long, default_value_t = 5)]
        arity_min: usize,
        #[arg(long, default_value_t = 10)]
        arity_max: usize,
        #[arg(long, default_value_t = 10)]
        runs: usize,
        #[arg(long, default_value_t = 2)]
        cardinality: usize,
    },
    /// Convert another model format to FGSYM.
    Convert {
        #[arg(long, value_enum)]
        from: SourceFormat,
        input: PathBuf,
        /// Output path (standard output if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, clap::Args)]
struct SearchArgs {
    #[arg(long, value_enum, default_value_t = PolicyArg::Greedy)]
    policy: PolicyArg,
    /// Orders scored by `anneal`.
    #[arg(long, default_value_t = 2000)]
    budget: usize,
    /// Largest variable count accepted by `exhaustive`.
    #[arg(long, default_value_t = crate::search::DEFAULT_EXHAUSTIVE_LIMIT)]
    limit: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Dense,
    Compact,
    CostOnly,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CostArg {
    Dense,
    Compact,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TotalsArg {
    Paper,
    Full,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PolicyArg {
    Greedy,
    MinDegree,
    Random,
    Anneal,
    Exhaustive,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SourceFormat {
    Uai,
}

impl Cli {
    fn totals(&self) -> TotalsConvention {
        match self.totals {
            TotalsArg::Paper => TotalsConvention::Paper,
            TotalsArg::Full => TotalsConvention::Full,
        }
    }

    fn objective(&self) -> Objective {
        let model = match self.cost {
            CostArg::Dense => CostModel::Dense,
            CostArg::Compact => CostModel::Compact,
        };
        Objective::new(model, self.totals())
    }

    fn policy(&self, args: &SearchArgs) -> Policy {
        match args.policy {
            PolicyArg::Greedy => Policy::GreedyMinSize,
            PolicyArg::MinDegree => Policy::MinDegree,
            PolicyArg::Random => Policy::Random { seed: self.seed },
            PolicyArg::Anneal => Policy::Anneal(AnnealParams::new(self.seed, args.budget)),
            PolicyArg::Exhaustive => Policy::Exhaustive { limit: args.limit },
        }
    }

    fn load(&self, path: &Path) -> Result<ModelFile> {
        let text =
            fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let validation = if self.no_validate {
            Validation::Fast
        } else {
            Validation::Strict
        };
        parse_model(&text, validation)
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::TooLarge { .. } | Error::Overflow(_) => 3,
        Error::Io(_) | Error::InvalidConfig(_) | Error::NotAPermutation(_) => 1,
        _ => 2,
    }
}

fn join(ids: &[VarId]) -> String {
    ids.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

fn groups(p: &SymmetryPartition) -> String {
    if p.is_trivial() {
        return "none".into();
    }
    p.groups()
        .iter()
        .map(|g| format!("{{{}}}", join(g)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn write_ledger(
    out: &mut dyn Write,
    ledger: &CostLedger,
    totals: TotalsConvention,
) -> std::io::Result<()> {
    writeln!(out, "order: {}", join(&ledger.order))?;
    writeln!(out, "step variable scope dense compact")?;
    for (i, s) in ledger.steps.iter().enumerate() {
        writeln!(
            out,
            "{} {} {{{}}} {} {}",
            i + 1,
            s.variable,
            join(&s.new_scope),
            s.dense_cost,
            s.compact_cost
        )?;
    }
    writeln!(
        out,
        "dense total ({}): {}",
        totals.name(),
        ledger.dense.get(totals)
    )?;
    writeln!(
        out,
        "compact total ({}): {}",
        totals.name(),
        ledger.compact.get(totals)
    )
}

fn partition(
    cli: &Cli,
    model: &Path,
    order: Option<&[VarId]>,
    search: &SearchArgs,
    out: &mut dyn Write,
) -> Result<()> {
    let mut graph: FactorGraph = cli.load(model)?.graph;
    let mode = match cli.mode {
        ModeArg::Dense => Mode::Dense,
        ModeArg::Compact => Mode::Compact,
        ModeArg::CostOnly => Mode::CostOnly,
    };
    let redetect = cli.redetect && mode == Mode::Compact;
    if redetect {
        graph = graph.with_detected_symmetries();
    }
    let order = match order {
        Some(o) => o.to_vec(),
        None => find_order(&graph, cli.policy(search), cli.objective())?.0,
    };
    let (z, ledger) = run_elimination_with(&graph, &order, mode, redetect)?;
    match z {
        Some(z) => writeln!(out, "Z = {z}")?,
        None => writeln!(out, "Z = n/a (cost-only)")?,
    }
    write_ledger(out, &ledger, cli.totals())?;
    Ok(())
}

fn order(cli: &Cli, model: &Path, search: &SearchArgs, out: &mut dyn Write) -> Result<()> {
    let graph = cli.load(model)?.graph;
    let objective = cli.objective();
    let (order, ledger) = find_order(&graph, cli.policy(search), objective)?;
    writeln!(out, "policy: {:?}", search.policy)?;
    writeln!(out, "cost: {:?}", objective.model)?;
    writeln!(out, "totals: {}", objective.totals.name())?;
    writeln!(out, "order: {}", join(&order))?;
    writeln!(out, "total: {}", objective.score(&ledger))?;
    writeln!(out, "dense total: {}", ledger.dense.get(objective.totals))?;
    writeln!(
        out,
        "compact total: {}",
        ledger.compact.get(objective.totals)
    )?;
    Ok(())
}

fn detect(cli: &Cli, model: &Path, out: &mut dyn Write) -> Result<()> {
    let m = cli.load(model)?;
    for (i, f) in m.graph.factors().iter().enumerate() {
        let dense = f.to_dense().ok_or(Error::NotMaterialized(i))?;
        let detected = detect_symmetries(&dense);
        let shape = crate::graph::FactorShape::new(dense.scope().to_vec(), detected.clone())?;
        let declared = m.declared[i].as_ref().map_or("none".to_string(), groups);
        writeln!(
            out,
            "factor {i}: scope {{{}}} declared {declared} detected {} dense {} compact {}",
            join(&dense.scope_ids()),
            groups(&detected),
            shape.dense_size()?,
            shape.compact_size()?
        )?;
    }
    Ok(())
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Partition {
            model,
            order,
            search,
        } => partition(cli, model, order.as_deref(), search, out),
        Command::Order { model, search } => order(cli, model, search, out),
        Command::Detect { model } => detect(cli, model, out),
        Command::Bench {
            out: csv_path,
            svg,
            rv_counts,
            factors,
            arity_min,
            arity_max,
            runs,
            cardinality,
        } => {
            let cfg = BenchConfig {
                rv_counts: rv_counts.clone(),
                num_factors: *factors,
                arity: (*arity_min, *arity_max),
                runs_per_setting: *runs,
                cardinality: *cardinality,
                seed: cli.seed,
                totals: cli.totals(),
            };
            let result = run_benchmark(&cfg, cli.jobs)?;
            match csv_path {
                Some(p) => emit_report(&result, ReportFormat::Csv, p)?,
                None => out.write_all(to_csv(&result).as_bytes())?,
            }
            if let Some(p) = svg {
                emit_report(&result, ReportFormat::Svg, p)?;
            }
            Ok(())
        }
        Command::Convert {
            from,
            input,
            out: path,
        } => {
            let text = fs::read_to_string(input)
                .map_err(|e| Error::Io(format!("{}: {e}", input.display())))?;
            let graph = match from {
                SourceFormat::Uai => parse_uai(&text)?,
            };
            let fgsym = print_model(&graph)?;
            match path {
                Some(p) => fs::write(p, fgsym)?,
                None => out.write_all(fgsym.as_bytes())?,
            }
            Ok(())
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
