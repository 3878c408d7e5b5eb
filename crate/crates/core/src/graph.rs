//! Factor graphs, the elimination transition and its cost accounting.
//!
//! Eliminating a variable `X` multiplies the factors that mention `X`, sums
//! `X` out of the product and puts the result back. The step is charged the
//! size of the product before the sum-out, once as a dense table (the product
//! of the cardinalities) and once as a compact table under the symmetries that
//! are guaranteed to survive the multiplication.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::factor::{multiply, sum_out, union_scope, Assignment, DenseFactor, VarId, Variable};
use crate::symmetry::{
    check_symmetric, compact_domain_size, compact_lookup, compact_multiply, compact_sum_out,
    decode, detect_symmetries, encode, encode_unchecked, propagate_multiply, propagate_sum_out,
    CompactFactor, SymmetryPartition,
};

/// Sizes are counted in table entries; `u128` keeps dense sizes of large
/// intermediates exact.
pub type Cost = u128;

/// Scope and symmetry partition of a factor, without potentials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorShape {
    scope: Vec<Variable>,
    partition: SymmetryPartition,
}

impl FactorShape {
    pub fn new(mut scope: Vec<Variable>, partition: SymmetryPartition) -> Result<Self> {
        scope.sort_by_key(Variable::id);
        if scope.windows(2).any(|w| w[0].id() == w[1].id()) {
            return Err(Error::InvalidFactor(
                "variable appears twice in scope".into(),
            ));
        }
        partition.validate(&scope)?;
        Ok(FactorShape { scope, partition })
    }

    pub fn scope(&self) -> &[Variable] {
        &self.scope
    }

    pub fn partition(&self) -> &SymmetryPartition {
        &self.partition
    }

    pub fn dense_size(&self) -> Result<Cost> {
        self.scope.iter().try_fold(1 as Cost, |acc, v| {
            acc.checked_mul(v.cardinality() as Cost)
                .ok_or(Error::Overflow("dense size"))
        })
    }

    /// Free cardinalities times one histogram domain per group.
    pub fn compact_size(&self) -> Result<Cost> {
        let mut size: Cost = 1;
        for v in &self.scope {
            if self.partition.group_of(v.id()).is_none() {
                size = size
                    .checked_mul(v.cardinality() as Cost)
                    .ok_or(Error::Overflow("compact size"))?;
            }
        }
        for g in self.partition.groups() {
            let card = self
                .scope
                .iter()
                .find(|v| v.id() == g[0])
                .map(Variable::cardinality)
                .expect("validated partition");
            size = size
                .checked_mul(compact_domain_size(g.len(), card)?)
                .ok_or(Error::Overflow("compact size"))?;
        }
        Ok(size)
    }

    pub fn multiply(&self, other: &FactorShape) -> Result<FactorShape> {
        let scope = union_scope(&self.scope, &other.scope)?;
        let partition =
            propagate_multiply(&self.scope, &self.partition, &other.scope, &other.partition);
        Ok(FactorShape { scope, partition })
    }

    pub fn sum_out(&self, var: VarId) -> Result<FactorShape> {
        if !self.scope.iter().any(|v| v.id() == var) {
            return Err(Error::UnknownVariable(var));
        }
        Ok(FactorShape {
            scope: self
                .scope
                .iter()
                .filter(|v| v.id() != var)
                .copied()
                .collect(),
            partition: propagate_sum_out(&self.partition, var),
        })
    }

    fn scalar() -> Self {
        FactorShape {
            scope: Vec::new(),
            partition: SymmetryPartition::trivial(),
        }
    }
}

/// A factor node: a dense table, a compact table, or only its shape.
#[derive(Debug, Clone, PartialEq)]
pub enum Factor {
    /// Dense table with the symmetries known to hold in it.
    Dense(DenseFactor, SymmetryPartition),
    Compact(CompactFactor),
    Shape(FactorShape),
}

impl Factor {
    /// Dense factor with declared symmetries, checked against the table.
    pub fn dense_with_symmetries(f: DenseFactor, partition: SymmetryPartition) -> Result<Self> {
        check_symmetric(&f, &partition)?;
        Ok(Factor::Dense(f, partition))
    }

    pub fn scope(&self) -> Vec<Variable> {
        match self {
            Factor::Dense(f, _) => f.scope().to_vec(),
            Factor::Compact(c) => c.scope(),
            Factor::Shape(s) => s.scope.clone(),
        }
    }

    pub fn mentions(&self, id: VarId) -> bool {
        self.scope().iter().any(|v| v.id() == id)
    }

    pub fn is_scalar(&self) -> bool {
        self.scope().is_empty()
    }

    /// Symmetries known to hold.
    pub fn partition(&self) -> SymmetryPartition {
        match self {
            Factor::Dense(_, p) => p.clone(),
            Factor::Compact(c) => c.partition(),
            Factor::Shape(s) => s.partition.clone(),
        }
    }

    pub fn shape(&self) -> FactorShape {
        FactorShape {
            scope: self.scope(),
            partition: self.partition(),
        }
    }

    pub fn is_materialized(&self) -> bool {
        !matches!(self, Factor::Shape(_))
    }

    /// Potential at `a`; `None` for a shape-only factor.
    pub fn value(&self, a: &Assignment) -> Option<Result<f64>> {
        match self {
            Factor::Dense(f, _) => Some(f.value(a)),
            Factor::Compact(c) => Some(compact_lookup(c, a)),
            Factor::Shape(_) => None,
        }
    }

    pub fn to_dense(&self) -> Option<DenseFactor> {
        match self {
            Factor::Dense(f, _) => Some(f.clone()),
            Factor::Compact(c) => Some(decode(c)),
            Factor::Shape(_) => None,
        }
    }

    /// Compact form under the known symmetries.
    pub fn to_compact(&self) -> Option<CompactFactor> {
        match self {
            Factor::Dense(f, p) => Some(encode_unchecked(f, p).expect("partition was validated")),
            Factor::Compact(c) => Some(c.clone()),
            Factor::Shape(_) => None,
        }
    }
}

impl From<DenseFactor> for Factor {
    fn from(f: DenseFactor) -> Self {
        Factor::Dense(f, SymmetryPartition::trivial())
    }
}

impl From<CompactFactor> for Factor {
    fn from(c: CompactFactor) -> Self {
        Factor::Compact(c)
    }
}

impl From<FactorShape> for Factor {
    fn from(s: FactorShape) -> Self {
        Factor::Shape(s)
    }
}

/// Bipartite graph of variables and factors. Edges are implied by scopes.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorGraph {
    variables: BTreeMap<VarId, Variable>,
    eliminated: BTreeSet<VarId>,
    factors: Vec<Factor>,
}

impl FactorGraph {
    pub fn new(variables: Vec<Variable>, factors: Vec<Factor>) -> Result<Self> {
        let mut vars = BTreeMap::new();
        for v in variables {
            if vars.insert(v.id(), v).is_some() {
                return Err(Error::InvalidFactor(format!(
                    "duplicate variable id {}",
                    v.id()
                )));
            }
        }
        for (i, f) in factors.iter().enumerate() {
            for v in f.scope() {
                match vars.get(&v.id()) {
                    None => {
                        return Err(Error::Validation {
                            factor: i,
                            reason: format!("variable {} is not declared", v.id()),
                        })
                    }
                    Some(w) if w.cardinality() != v.cardinality() => {
                        return Err(Error::Validation {
                            factor: i,
                            reason: format!(
                                "variable {} has cardinality {} but the factor uses {}",
                                v.id(),
                                w.cardinality(),
                                v.cardinality()
                            ),
                        })
                    }
                    Some(_) => {}
                }
            }
        }
        Ok(FactorGraph {
            variables: vars,
            eliminated: BTreeSet::new(),
            factors,
        })
    }

    /// Live (not yet eliminated) variables, ascending by id.
    pub fn variables(&self) -> impl Iterator<Item = &Variable> {
        self.variables.values()
    }

    pub fn variable_ids(&self) -> Vec<VarId> {
        self.variables.keys().copied().collect()
    }

    pub fn variable(&self, id: VarId) -> Option<&Variable> {
        self.variables.get(&id)
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn eliminated(&self) -> &BTreeSet<VarId> {
        &self.eliminated
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    /// The same graph with every factor reduced to its shape.
    pub fn structure(&self) -> FactorGraph {
        FactorGraph {
            variables: self.variables.clone(),
            eliminated: self.eliminated.clone(),
            factors: self
                .factors
                .iter()
                .map(|f| Factor::Shape(f.shape()))
                .collect(),
        }
    }

    /// Replaces every materialized factor by its compact encoding under the
    /// detected (maximal) symmetries.
    pub fn with_detected_symmetries(&self) -> FactorGraph {
        let factors = self
            .factors
            .iter()
            .map(|f| match f.to_dense() {
                Some(d) => {
                    let p = detect_symmetries(&d);
                    Factor::Compact(encode(&d, &p).expect("detected groups are symmetric"))
                }
                None => f.clone(),
            })
            .collect();
        FactorGraph {
            factors,
            ..self.clone()
        }
    }

    fn check_live(&self, id: VarId) -> Result<&Variable> {
        if self.eliminated.contains(&id) {
            return Err(Error::AlreadyEliminated(id));
        }
        self.variables.get(&id).ok_or(Error::UnknownVariable(id))
    }

    /// Indices of non-scalar factors mentioning `id`.
    pub fn touching(&self, id: VarId) -> Vec<usize> {
        self.factors
            .iter()
            .enumerate()
            .filter(|(_, f)| f.mentions(id))
            .map(|(i, _)| i)
            .collect()
    }

    /// Shape of the product of all factors mentioning `id` (just `id` itself
    /// when it is isolated).
    pub fn product_shape(&self, id: VarId) -> Result<FactorShape> {
        let var = *self.check_live(id)?;
        let touched = self.touching(id);
        if touched.is_empty() {
            return Ok(FactorShape {
                scope: vec![var],
                partition: SymmetryPartition::trivial(),
            });
        }
        let mut acc = self.factors[touched[0]].shape();
        for &i in &touched[1..] {
            acc = acc.multiply(&self.factors[i].shape())?;
        }
        Ok(acc)
    }
}

/// How an elimination handles potentials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Multiply and sum dense tables.
    Dense,
    /// Multiply and sum compact tables.
    Compact,
    /// Propagate scopes and partitions only.
    CostOnly,
}

/// Which steps the total of an order includes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum TotalsConvention {
    /// Every step but the last.
    Paper,
    /// Every step.
    #[default]
    Full,
}

impl TotalsConvention {
    pub fn name(&self) -> &'static str {
        match self {
            TotalsConvention::Paper => "paper",
            TotalsConvention::Full => "full",
        }
    }

    /// Total of a cost sequence under this convention.
    pub fn total(&self, costs: impl IntoIterator<Item = Cost>) -> Cost {
        let costs: Vec<Cost> = costs.into_iter().collect();
        let n = match self {
            TotalsConvention::Paper => costs.len().saturating_sub(1),
            TotalsConvention::Full => costs.len(),
        };
        costs[..n].iter().sum()
    }
}

/// One elimination: the variable, the factors multiplied, the product scope
/// and its two sizes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EliminationStep {
    pub variable: VarId,
    /// Indices (in the graph before the step) of the factors multiplied.
    pub touched: Vec<usize>,
    /// Scope of the product, including the eliminated variable.
    pub new_scope: Vec<VarId>,
    pub dense_cost: Cost,
    pub compact_cost: Cost,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Totals {
    pub paper: Cost,
    pub full: Cost,
}

impl Totals {
    pub fn get(&self, convention: TotalsConvention) -> Cost {
        match convention {
            TotalsConvention::Paper => self.paper,
            TotalsConvention::Full => self.full,
        }
    }

    fn of(costs: &[Cost]) -> Totals {
        Totals {
            paper: TotalsConvention::Paper.total(costs.iter().copied()),
            full: TotalsConvention::Full.total(costs.iter().copied()),
        }
    }
}

/// Steps of an elimination run with cumulative dense and compact totals.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CostLedger {
    pub order: Vec<VarId>,
    pub steps: Vec<EliminationStep>,
    pub dense: Totals,
    pub compact: Totals,
}

impl CostLedger {
    pub fn new(steps: Vec<EliminationStep>) -> Self {
        let dense: Vec<Cost> = steps.iter().map(|s| s.dense_cost).collect();
        let compact: Vec<Cost> = steps.iter().map(|s| s.compact_cost).collect();
        CostLedger {
            order: steps.iter().map(|s| s.variable).collect(),
            dense: Totals::of(&dense),
            compact: Totals::of(&compact),
            steps,
        }
    }

    /// Total under a cost model: compact sizes if `compact`, dense otherwise.
    pub fn total(&self, compact: bool, convention: TotalsConvention) -> Cost {
        if compact {
            self.compact.get(convention)
        } else {
            self.dense.get(convention)
        }
    }
}

/// Dense and compact size of the product created when eliminating `id`.
pub fn step_costs(graph: &FactorGraph, id: VarId) -> Result<(Cost, Cost)> {
    let shape = graph.product_shape(id)?;
    Ok((shape.dense_size()?, shape.compact_size()?))
}

/// Eliminates `id` without re-detecting symmetries.
pub fn eliminate(
    graph: &FactorGraph,
    id: VarId,
    mode: Mode,
) -> Result<(FactorGraph, EliminationStep)> {
    eliminate_with(graph, id, mode, false)
}

/// Eliminates `id`. With `redetect` in compact mode, the new factor's
/// symmetries are re-detected from its table instead of only propagated.
pub fn eliminate_with(
    graph: &FactorGraph,
    id: VarId,
    mode: Mode,
    redetect: bool,
) -> Result<(FactorGraph, EliminationStep)> {
    let var = *graph.check_live(id)?;
    let product = graph.product_shape(id)?;
    let touched = graph.touching(id);
    let step = EliminationStep {
        variable: id,
        touched: touched.clone(),
        new_scope: product.scope.iter().map(Variable::id).collect(),
        dense_cost: product.dense_size()?,
        compact_cost: product.compact_size()?,
    };

    let materialized = |i: usize| -> Result<&Factor> {
        let f = &graph.factors[i];
        if f.is_materialized() {
            Ok(f)
        } else {
            Err(Error::NotMaterialized(i))
        }
    };

    let card = var.cardinality() as f64;
    let new_factor = match mode {
        Mode::CostOnly => Factor::Shape(if touched.is_empty() {
            FactorShape::scalar()
        } else {
            product.sum_out(id)?
        }),
        Mode::Dense => {
            if touched.is_empty() {
                Factor::from(DenseFactor::scalar(card))
            } else {
                let mut acc = materialized(touched[0])?.to_dense().expect("materialized");
                for &i in &touched[1..] {
                    acc = multiply(&acc, &materialized(i)?.to_dense().expect("materialized"))?;
                }
                let partition = product.sum_out(id)?.partition;
                Factor::Dense(sum_out(&acc, &[id])?, partition)
            }
        }
        Mode::Compact => {
            if touched.is_empty() {
                Factor::Compact(CompactFactor::scalar(card))
            } else {
                let mut acc = materialized(touched[0])?
                    .to_compact()
                    .expect("materialized");
                for &i in &touched[1..] {
                    acc = compact_multiply(
                        &acc,
                        &materialized(i)?.to_compact().expect("materialized"),
                    )?;
                }
                let mut reduced = compact_sum_out(&acc, id)?;
                if redetect {
                    let dense = decode(&reduced);
                    reduced = encode(&dense, &detect_symmetries(&dense))?;
                }
                Factor::Compact(reduced)
            }
        }
    };

    let mut factors: Vec<Factor> = graph
        .factors
        .iter()
        .enumerate()
        .filter(|(i, _)| !touched.contains(i))
        .map(|(_, f)| f.clone())
        .collect();
    factors.push(new_factor);
    let mut variables = graph.variables.clone();
    variables.remove(&id);
    let mut eliminated = graph.eliminated.clone();
    eliminated.insert(id);
    Ok((
        FactorGraph {
            variables,
            eliminated,
            factors,
        },
        step,
    ))
}

/// Checks that `order` lists every live variable exactly once.
pub fn check_permutation(graph: &FactorGraph, order: &[VarId]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for &id in order {
        if !graph.variables.contains_key(&id) {
            return Err(Error::NotAPermutation(format!(
                "{id} is not a live variable"
            )));
        }
        if !seen.insert(id) {
            return Err(Error::NotAPermutation(format!("{id} appears twice")));
        }
    }
    if seen.len() != graph.variables.len() {
        return Err(Error::NotAPermutation(format!(
            "{} of {} variables listed",
            seen.len(),
            graph.variables.len()
        )));
    }
    Ok(())
}

/// Eliminates every variable in `order`. Returns the partition function in
/// dense and compact modes, `None` in cost-only mode.
pub fn run_elimination(
    graph: &FactorGraph,
    order: &[VarId],
    mode: Mode,
) -> Result<(Option<f64>, CostLedger)> {
    run_elimination_with(graph, order, mode, false)
}

pub fn run_elimination_with(
    graph: &FactorGraph,
    order: &[VarId],
    mode: Mode,
    redetect: bool,
) -> Result<(Option<f64>, CostLedger)> {
    check_permutation(graph, order)?;
    let mut current = graph.clone();
    let mut steps = Vec::with_capacity(order.len());
    for &id in order {
        let (next, step) = eliminate_with(&current, id, mode, redetect)?;
        current = next;
        steps.push(step);
    }
    let ledger = CostLedger::new(steps);
    if mode == Mode::CostOnly {
        return Ok((None, ledger));
    }
    let empty = Assignment::empty();
    let mut z = 1.0;
    for (i, f) in current.factors.iter().enumerate() {
        z *= f.value(&empty).ok_or(Error::NotMaterialized(i))??;
    }
    Ok((Some(z), ledger))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetry::encode;

    fn b(ids: &[VarId]) -> Vec<Variable> {
        ids.iter().map(|&i| Variable::boolean(i)).collect()
    }

    fn triangle() -> FactorGraph {
        let f = |s: &[VarId], t: Vec<f64>| Factor::from(DenseFactor::new(b(s), t).unwrap());
        FactorGraph::new(
            b(&[1, 2, 3]),
            vec![
                f(&[1, 2], vec![1., 2., 3., 4.]),
                f(&[1, 3], vec![2., 1., 1., 2.]),
                f(&[2, 3], vec![1., 1., 3., 1.]),
            ],
        )
        .unwrap()
    }

    fn triple_graph() -> FactorGraph {
        let d = DenseFactor::new(b(&[1, 2, 3]), vec![1., 2., 2., 3., 2., 3., 3., 4.]).unwrap();
        let c = encode(&d, &SymmetryPartition::full(d.scope())).unwrap();
        FactorGraph::new(b(&[1, 2, 3]), vec![Factor::Compact(c)]).unwrap()
    }

    #[test]
    fn triangle_first_step() {
        let (g, step) = eliminate(&triangle(), 1, Mode::Dense).unwrap();
        assert_eq!(step.touched, vec![0, 1]);
        assert_eq!(step.new_scope, vec![1, 2, 3]);
        assert_eq!(step.dense_cost, 8);
        assert_eq!(step.compact_cost, 8);
        assert_eq!(g.factors().len(), 2);
        assert_eq!(g.variable_ids(), vec![2, 3]);
        assert_eq!(
            eliminate(&g, 1, Mode::Dense).unwrap_err(),
            Error::AlreadyEliminated(1)
        );
        assert_eq!(
            eliminate(&g, 7, Mode::Dense).unwrap_err(),
            Error::UnknownVariable(7)
        );
    }

    #[test]
    fn single_factor_leaves_scalar() {
        let v = Variable::new(0, 3).unwrap();
        let g = FactorGraph::new(
            vec![v],
            vec![Factor::from(
                DenseFactor::new(vec![v], vec![1., 2., 4.]).unwrap(),
            )],
        )
        .unwrap();
        let (g, step) = eliminate(&g, 0, Mode::Dense).unwrap();
        assert_eq!(step.dense_cost, 3);
        assert_eq!(g.num_variables(), 0);
        assert!(g.factors().iter().all(Factor::is_scalar));
        assert_eq!(g.factors()[0].to_dense().unwrap().table(), &[7.]);
    }

    #[test]
    fn triple_any_order() {
        let g = triple_graph();
        for order in [
            [1, 2, 3],
            [1, 3, 2],
            [2, 1, 3],
            [2, 3, 1],
            [3, 1, 2],
            [3, 2, 1],
        ] {
            for mode in [Mode::Dense, Mode::Compact] {
                let (z, ledger) = run_elimination(&g, &order, mode).unwrap();
                assert_eq!(z, Some(20.0));
                let dense: Vec<Cost> = ledger.steps.iter().map(|s| s.dense_cost).collect();
                let compact: Vec<Cost> = ledger.steps.iter().map(|s| s.compact_cost).collect();
                assert_eq!(dense, vec![8, 4, 2]);
                assert_eq!(compact, vec![4, 3, 2]);
                assert_eq!(
                    ledger.dense,
                    Totals {
                        paper: 12,
                        full: 14
                    }
                );
                assert_eq!(ledger.compact, Totals { paper: 7, full: 9 });
            }
        }
    }

    #[test]
    fn isolated_variable_counts_its_domain() {
        let v = Variable::new(5, 4).unwrap();
        let g = FactorGraph::new(vec![v], vec![]).unwrap();
        let (z, ledger) = run_elimination(&g, &[5], Mode::Dense).unwrap();
        assert_eq!(z, Some(4.0));
        assert_eq!(ledger.steps[0].dense_cost, 4);
        let (z, _) = run_elimination(&g, &[5], Mode::Compact).unwrap();
        assert_eq!(z, Some(4.0));
    }

    #[test]
    fn empty_graph_has_unit_partition() {
        let g = FactorGraph::new(vec![], vec![]).unwrap();
        let (z, ledger) = run_elimination(&g, &[], Mode::Dense).unwrap();
        assert_eq!(z, Some(1.0));
        assert_eq!(ledger.dense, Totals::default());
    }

    #[test]
    fn scalar_factors_fold_into_z() {
        let g = FactorGraph::new(
            b(&[0]),
            vec![
                Factor::from(DenseFactor::scalar(3.0)),
                Factor::from(DenseFactor::new(b(&[0]), vec![1., 1.]).unwrap()),
            ],
        )
        .unwrap();
        let (_, step) = eliminate(&g, 0, Mode::Dense).unwrap();
        assert_eq!(step.touched, vec![1]);
        assert_eq!(run_elimination(&g, &[0], Mode::Dense).unwrap().0, Some(6.0));
    }

    #[test]
    fn symmetric_step_costs() {
        let scope = b(&(0..10).collect::<Vec<_>>());
        let c = CompactFactor::constant(&scope, &SymmetryPartition::full(&scope), 1.0).unwrap();
        let g = FactorGraph::new(scope, vec![Factor::Compact(c)]).unwrap();
        for id in 0..10 {
            assert_eq!(step_costs(&g, id).unwrap(), (1024, 11));
        }
        assert_eq!(step_costs(&triangle(), 2).unwrap(), (8, 8));
    }

    #[test]
    fn cost_only_matches_compact_costs() {
        let g = triple_graph();
        let (z, cost_only) = run_elimination(&g, &[2, 1, 3], Mode::CostOnly).unwrap();
        assert_eq!(z, None);
        let (_, compact) = run_elimination(&g, &[2, 1, 3], Mode::Compact).unwrap();
        assert_eq!(cost_only, compact);
    }

    #[test]
    fn order_validation() {
        let g = triangle();
        assert!(matches!(
            run_elimination(&g, &[1, 2], Mode::Dense),
            Err(Error::NotAPermutation(_))
        ));
        assert!(matches!(
            run_elimination(&g, &[1, 2, 2], Mode::Dense),
            Err(Error::NotAPermutation(_))
        ));
        assert!(matches!(
            run_elimination(&g, &[1, 2, 4], Mode::Dense),
            Err(Error::NotAPermutation(_))
        ));
    }

    #[test]
    fn shape_only_graph_cannot_produce_z() {
        let g = triangle().structure();
        assert_eq!(
            run_elimination(&g, &[1, 2, 3], Mode::Dense).unwrap_err(),
            Error::NotMaterialized(0)
        );
    }

    #[test]
    fn totals_conventions() {
        assert_eq!(TotalsConvention::Paper.total([4, 4, 4, 2]), 12);
        assert_eq!(TotalsConvention::Full.total([4, 4, 4, 2]), 14);
        assert_eq!(TotalsConvention::Paper.total([]), 0);
    }

    #[test]
    fn graph_validation() {
        let f = Factor::from(DenseFactor::new(b(&[0, 1]), vec![1.; 4]).unwrap());
        assert!(matches!(
            FactorGraph::new(b(&[0]), vec![f.clone()]),
            Err(Error::Validation { factor: 0, .. })
        ));
        let wide = vec![Variable::boolean(0), Variable::new(1, 3).unwrap()];
        assert!(matches!(
            FactorGraph::new(wide, vec![f]),
            Err(Error::Validation { factor: 0, .. })
        ));
        assert!(FactorGraph::new(b(&[0, 0]), vec![]).is_err());
    }
}
