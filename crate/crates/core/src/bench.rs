//! Random symmetric models and the dense-versus-compact cost experiment.
//!
//! Each run draws a factor graph whose factors are fully symmetric, picks the
//! greedy order and records, step by step, the dense and the compact size of
//! every intermediate product. Only scopes and partitions are propagated, so
//! models with dozens of variables stay cheap.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::seq::index;
use rand::Rng as _;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::factor::{DenseFactor, VarId, Variable};
use crate::graph::{Cost, Factor, FactorGraph, TotalsConvention};
use crate::rng::{self, Rng};
use crate::search::greedy_order;
use crate::symmetry::{compact_domain_size, encode_unchecked, CompactFactor, SymmetryPartition};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub rv_counts: Vec<usize>,
    pub num_factors: usize,
    /// Inclusive range of factor arities.
    pub arity: (usize, usize),
    pub runs_per_setting: usize,
    pub cardinality: usize,
    pub seed: u64,
    pub totals: TotalsConvention,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            rv_counts: vec![50, 55, 60, 65],
            num_factors: 10,
            arity: (5, 10),
            runs_per_setting: 10,
            cardinality: 2,
            seed: 0,
            totals: TotalsConvention::Full,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.arity;
        if self.rv_counts.is_empty() {
            return Err(Error::InvalidConfig(
                "at least one variable count is required".into(),
            ));
        }
        if lo == 0 || lo > hi {
            return Err(Error::InvalidConfig(format!(
                "invalid arity range {lo}..={hi}"
            )));
        }
        if self.num_factors == 0 || self.runs_per_setting == 0 || self.cardinality == 0 {
            return Err(Error::InvalidConfig(
                "factor count, runs and cardinality must be >= 1".into(),
            ));
        }
        if let Some(&n) = self.rv_counts.iter().find(|&&n| n < hi) {
            return Err(Error::InvalidConfig(format!(
                "maximum arity {hi} exceeds variable count {n}"
            )));
        }
        Ok(())
    }
}

/// Draws `count` distinct potentials from [0.1, 1.0].
fn distinct_potentials(rng: &mut Rng, count: usize) -> Vec<f64> {
    loop {
        let values: Vec<f64> = (0..count).map(|_| rng.random_range(0.1..=1.0)).collect();
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).all(|w| w[0] != w[1]) {
            return values;
        }
    }
}

fn random_scope(rng: &mut Rng, n: usize, arity: (usize, usize)) -> Vec<VarId> {
    let k = rng.random_range(arity.0..=arity.1);
    let mut scope = index::sample(rng, n, k).into_vec();
    scope.sort_unstable();
    scope
}

fn check_generator_args(n: usize, arity: (usize, usize), cardinality: usize) -> Result<()> {
    if arity.0 == 0 || arity.0 > arity.1 || arity.1 > n || cardinality == 0 {
        return Err(Error::InvalidConfig(format!(
            "cannot draw arity {}..={} scopes of cardinality {cardinality} from {n} variables",
            arity.0, arity.1
        )));
    }
    Ok(())
}

/// Random graph over variables `0..n` with `k` fully symmetric factors.
/// Every histogram of a factor gets its own potential, so no factor is
/// symmetric in more ways than declared.
pub fn generate_random_fg(
    n: usize,
    k: usize,
    arity: (usize, usize),
    cardinality: usize,
    seed: u64,
) -> Result<FactorGraph> {
    check_generator_args(n, arity, cardinality)?;
    let mut rng = rng::stream(seed, rng::ROLE_GENERATOR);
    let variables: Vec<Variable> = (0..n)
        .map(|id| Variable::new(id, cardinality))
        .collect::<Result<_>>()?;
    let mut factors = Vec::with_capacity(k);
    for _ in 0..k {
        let scope = random_scope(&mut rng, n, arity);
        let size = compact_domain_size(scope.len(), cardinality)?;
        let size = usize::try_from(size).map_err(|_| Error::Overflow("compact table size"))?;
        let values = distinct_potentials(&mut rng, size);
        let c = CompactFactor::from_layout(vec![], vec![(scope, cardinality)], values)?;
        factors.push(Factor::Compact(c));
    }
    FactorGraph::new(variables, factors)
}

/// Parameters for graphs that mix symmetric and asymmetric factors.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedGraphConfig {
    pub num_vars: usize,
    pub num_factors: usize,
    pub arity: (usize, usize),
    pub cardinality: usize,
    /// Probability that a factor gets random interchangeable groups.
    pub symmetric_fraction: f64,
}

/// Random partition of `scope` into up to two groups plus free variables.
pub fn random_partition(rng: &mut Rng, scope: &[VarId]) -> SymmetryPartition {
    let mut groups = vec![Vec::new(), Vec::new()];
    for &v in scope {
        match rng.random_range(0..4) {
            0 => {}
            1 => groups[0].push(v),
            _ => groups[1].push(v),
        }
    }
    SymmetryPartition::new(groups).expect("labels give disjoint groups")
}

/// Random factor over `scope` whose groups in `partition` are interchangeable.
pub fn random_symmetric_factor(
    rng: &mut Rng,
    scope: &[Variable],
    partition: &SymmetryPartition,
) -> Result<CompactFactor> {
    let mut c = CompactFactor::constant(scope, partition, 0.0)?;
    let values = distinct_potentials(rng, c.table().len());
    c = CompactFactor::from_layout(
        c.free().to_vec(),
        c.groups()
            .iter()
            .map(|g| (g.vars().to_vec(), g.cardinality()))
            .collect(),
        values,
    )?;
    Ok(c)
}

/// Random dense factor over `scope`.
pub fn random_dense_factor(rng: &mut Rng, scope: &[Variable]) -> Result<DenseFactor> {
    let size: usize = scope.iter().map(Variable::cardinality).product();
    DenseFactor::new(scope.to_vec(), distinct_potentials(rng, size))
}

/// Random graph mixing asymmetric dense factors and factors with random
/// symmetry groups (stored compactly).
pub fn generate_mixed_fg(cfg: &MixedGraphConfig, seed: u64) -> Result<FactorGraph> {
    check_generator_args(cfg.num_vars, cfg.arity, cfg.cardinality)?;
    let mut rng = rng::stream(seed, rng::ROLE_GENERATOR);
    let variables: Vec<Variable> = (0..cfg.num_vars)
        .map(|id| Variable::new(id, cfg.cardinality))
        .collect::<Result<_>>()?;
    let mut factors = Vec::with_capacity(cfg.num_factors);
    for _ in 0..cfg.num_factors {
        let ids = random_scope(&mut rng, cfg.num_vars, cfg.arity);
        let scope: Vec<Variable> = ids.iter().map(|&id| variables[id]).collect();
        if rng.random_bool(cfg.symmetric_fraction) {
            let partition = random_partition(&mut rng, &ids);
            factors.push(Factor::Compact(random_symmetric_factor(
                &mut rng, &scope, &partition,
            )?));
        } else {
            factors.push(Factor::from(random_dense_factor(&mut rng, &scope)?));
        }
    }
    FactorGraph::new(variables, factors)
}

/// Materializes every factor of `graph` densely.
pub fn to_dense_graph(graph: &FactorGraph) -> Result<FactorGraph> {
    let factors = graph
        .factors()
        .iter()
        .enumerate()
        .map(|(i, f)| {
            f.to_dense()
                .map(Factor::from)
                .ok_or(Error::NotMaterialized(i))
        })
        .collect::<Result<_>>()?;
    FactorGraph::new(graph.variables().copied().collect(), factors)
}

/// Re-encodes dense factors with a trivial partition as compact factors.
pub fn to_compact_graph(graph: &FactorGraph) -> Result<FactorGraph> {
    let factors = graph
        .factors()
        .iter()
        .enumerate()
        .map(|(i, f)| match f {
            Factor::Dense(d, p) => Ok(Factor::Compact(encode_unchecked(d, p)?)),
            Factor::Compact(_) => Ok(f.clone()),
            Factor::Shape(_) => Err(Error::NotMaterialized(i)),
        })
        .collect::<Result<_>>()?;
    FactorGraph::new(graph.variables().copied().collect(), factors)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchRecord {
    pub setting: usize,
    pub setting_rvs: usize,
    pub run: usize,
    pub seed: u64,
    pub order_policy: &'static str,
    pub totals: TotalsConvention,
    pub order: Vec<VarId>,
    pub dense_total: Cost,
    pub compact_total: Cost,
    /// (dense, compact) size of every step, in elimination order.
    pub steps: Vec<(Cost, Cost)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BenchResult {
    pub records: Vec<BenchRecord>,
}

fn run_one(cfg: &BenchConfig, setting: usize, run: usize) -> Result<BenchRecord> {
    let n = cfg.rv_counts[setting];
    let seed = rng::run_seed(cfg.seed, setting, run);
    let graph = generate_random_fg(n, cfg.num_factors, cfg.arity, cfg.cardinality, seed)?;
    let (order, ledger) = greedy_order(&graph)?;
    Ok(BenchRecord {
        setting,
        setting_rvs: n,
        run,
        seed,
        order_policy: "greedy",
        totals: cfg.totals,
        order,
        dense_total: ledger.dense.get(cfg.totals),
        compact_total: ledger.compact.get(cfg.totals),
        steps: ledger
            .steps
            .iter()
            .map(|s| (s.dense_cost, s.compact_cost))
            .collect(),
    })
}

/// Runs every (setting, run) pair on `jobs` threads (all cores if `None`).
pub fn run_benchmark(cfg: &BenchConfig, jobs: Option<usize>) -> Result<BenchResult> {
    cfg.validate()?;
    let tasks: Vec<(usize, usize)> = (0..cfg.rv_counts.len())
        .flat_map(|s| (0..cfg.runs_per_setting).map(move |r| (s, r)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let mut records = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(s, r)| run_one(cfg, s, r))
            .collect::<Result<Vec<_>>>()
    })?;
    records.sort_by_key(|r| (r.setting, r.run));
    Ok(BenchResult { records })
}

pub const CSV_HEADER: &str =
    "setting_rvs,run,seed,order_policy,totals_convention,dense_total,compact_total,steps";

pub fn to_csv(result: &BenchResult) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in &result.records {
        let steps: Vec<String> = r.steps.iter().map(|(d, c)| format!("{d}:{c}")).collect();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.setting_rvs,
            r.run,
            r.seed,
            r.order_policy,
            r.totals.name(),
            r.dense_total,
            r.compact_total,
            steps.join(";")
        );
    }
    out
}

const PANEL_WIDTH: f64 = 320.0;
const PANEL_HEIGHT: f64 = 260.0;
const MARGIN: f64 = 40.0;

/// Line chart of per-run totals, one panel per setting: solid for dense,
/// dashed for compact, log-scaled y axis.
pub fn to_svg(result: &BenchResult) -> String {
    let mut settings: Vec<(usize, usize)> = result
        .records
        .iter()
        .map(|r| (r.setting, r.setting_rvs))
        .collect();
    settings.dedup();

    let width = PANEL_WIDTH * settings.len().max(1) as f64;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{PANEL_HEIGHT:.0}" viewBox="0 0 {width:.0} {PANEL_HEIGHT:.0}">"#
    );
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    for (p, &(setting, rvs)) in settings.iter().enumerate() {
        let records: Vec<&BenchRecord> = result
            .records
            .iter()
            .filter(|r| r.setting == setting)
            .collect();
        let logs = |f: fn(&BenchRecord) -> Cost| -> Vec<f64> {
            records
                .iter()
                .map(|r| (f(r).max(1) as f64).log10())
                .collect()
        };
        let dense = logs(|r| r.dense_total);
        let compact = logs(|r| r.compact_total);
        let lo = dense
            .iter()
            .chain(&compact)
            .copied()
            .fold(f64::INFINITY, f64::min)
            .floor();
        let hi = dense
            .iter()
            .chain(&compact)
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
            .ceil();
        let hi = if hi <= lo { lo + 1.0 } else { hi };

        let x0 = p as f64 * PANEL_WIDTH + MARGIN;
        let plot_w = PANEL_WIDTH - 1.5 * MARGIN;
        let plot_h = PANEL_HEIGHT - 2.0 * MARGIN;
        let x = |i: usize| x0 + plot_w * i as f64 / (records.len().max(2) - 1) as f64;
        let y = |v: f64| MARGIN + plot_h * (hi - v) / (hi - lo);
        let points = |vals: &[f64]| {
            vals.iter()
                .enumerate()
                .map(|(i, &v)| format!("{:.2},{:.2}", x(i), y(v)))
                .collect::<Vec<_>>()
                .join(" ")
        };

        let _ = writeln!(
            out,
            r#"<g data-setting="{rvs}"><text x="{:.2}" y="{:.2}" font-size="13" font-family="sans-serif">{rvs} variables</text>"#,
            x0,
            MARGIN - 12.0
        );
        let _ = writeln!(
            out,
            r##"<rect x="{x0:.2}" y="{MARGIN:.2}" width="{plot_w:.2}" height="{plot_h:.2}" fill="none" stroke="#999"/>"##
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="10" font-family="sans-serif" text-anchor="end">1e{hi:.0}</text>"#,
            x0 - 3.0,
            MARGIN + 4.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="10" font-family="sans-serif" text-anchor="end">1e{lo:.0}</text>"#,
            x0 - 3.0,
            MARGIN + plot_h
        );
        let _ = writeln!(
            out,
            r#"<polyline class="dense" data-setting="{rvs}" fill="none" stroke="black" stroke-width="1.5" points="{}"/>"#,
            points(&dense)
        );
        let _ = writeln!(
            out,
            r#"<polyline class="compact" data-setting="{rvs}" fill="none" stroke="black" stroke-width="1.5" stroke-dasharray="6 4" points="{}"/>"#,
            points(&compact)
        );
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Svg,
}

pub fn emit_report(result: &BenchResult, format: ReportFormat, path: &Path) -> Result<()> {
    let text = match format {
        ReportFormat::Csv => to_csv(result),
        ReportFormat::Svg => to_svg(result),
    };
    fs::write(path, text)?;
    Ok(())
}
