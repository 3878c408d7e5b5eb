//! Elimination orders as a sequential decision problem.
//!
//! A [`SearchState`] is a factor graph reduced to scopes and symmetry
//! partitions. An action is a live variable; the transition eliminates it and
//! the immediate cost is the size of the product it creates, measured either
//! densely or compactly. Policies pick actions step by step ([`StepPolicy`])
//! or search whole orders (exhaustive search, annealing).

use rand::{Rng as _, RngCore};

use crate::error::{Error, Result};
use crate::factor::VarId;
use crate::graph::{
    eliminate, run_elimination, Cost, CostLedger, FactorGraph, Mode, TotalsConvention,
};
use crate::rng::{self, Rng};

/// Which table size an elimination step is charged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum CostModel {
    #[default]
    Dense,
    Compact,
}

impl CostModel {
    pub fn pick(&self, dense: Cost, compact: Cost) -> Cost {
        match self {
            CostModel::Dense => dense,
            CostModel::Compact => compact,
        }
    }
}

/// Cost model plus the totals convention that turns step costs into a score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Objective {
    pub model: CostModel,
    pub totals: TotalsConvention,
}

impl Objective {
    pub fn new(model: CostModel, totals: TotalsConvention) -> Self {
        Objective { model, totals }
    }

    pub fn score(&self, ledger: &CostLedger) -> Cost {
        ledger.total(self.model == CostModel::Compact, self.totals)
    }
}

#[derive(Debug, Clone)]
pub struct SearchState {
    graph: FactorGraph,
    eliminated: Vec<VarId>,
    step_costs: Vec<(Cost, Cost)>,
    dense: Cost,
    compact: Cost,
}

impl SearchState {
    pub fn new(graph: &FactorGraph) -> Self {
        SearchState {
            graph: graph.structure(),
            eliminated: Vec::new(),
            step_costs: Vec::new(),
            dense: 0,
            compact: 0,
        }
    }

    pub fn graph(&self) -> &FactorGraph {
        &self.graph
    }

    pub fn actions(&self) -> Vec<VarId> {
        self.graph.variable_ids()
    }

    pub fn is_terminal(&self) -> bool {
        self.graph.num_variables() == 0
    }

    pub fn eliminated(&self) -> &[VarId] {
        &self.eliminated
    }

    /// Accumulated (dense, compact) cost over all steps taken.
    pub fn accumulated(&self) -> (Cost, Cost) {
        (self.dense, self.compact)
    }

    pub fn step_costs(&self) -> &[(Cost, Cost)] {
        &self.step_costs
    }

    /// Score of the steps taken so far.
    pub fn total(&self, objective: Objective) -> Cost {
        objective.totals.total(
            self.step_costs
                .iter()
                .map(|&(d, c)| objective.model.pick(d, c)),
        )
    }

    /// Eliminates `id`, returning the successor and the immediate cost under
    /// `model`.
    pub fn step(&self, id: VarId, model: CostModel) -> Result<(SearchState, Cost)> {
        let (graph, step) = eliminate(&self.graph, id, Mode::CostOnly)?;
        let mut eliminated = self.eliminated.clone();
        eliminated.push(id);
        let mut step_costs = self.step_costs.clone();
        step_costs.push((step.dense_cost, step.compact_cost));
        let next = SearchState {
            graph,
            eliminated,
            step_costs,
            dense: self.dense + step.dense_cost,
            compact: self.compact + step.compact_cost,
        };
        Ok((next, model.pick(step.dense_cost, step.compact_cost)))
    }
}

/// Transition and immediate cost of eliminating `id` in `state`.
pub fn env_step(state: &SearchState, id: VarId, model: CostModel) -> Result<(SearchState, Cost)> {
    state.step(id, model)
}

/// Episode wrapper with a cost model fixed at construction.
#[derive(Debug, Clone)]
pub struct Environment {
    model: CostModel,
    initial: SearchState,
    state: SearchState,
}

impl Environment {
    pub fn new(graph: &FactorGraph, model: CostModel) -> Self {
        let initial = SearchState::new(graph);
        Environment {
            model,
            state: initial.clone(),
            initial,
        }
    }

    pub fn reset(&mut self) -> &SearchState {
        self.state = self.initial.clone();
        &self.state
    }

    pub fn state(&self) -> &SearchState {
        &self.state
    }

    pub fn model(&self) -> CostModel {
        self.model
    }

    pub fn done(&self) -> bool {
        self.state.is_terminal()
    }

    pub fn step(&mut self, id: VarId) -> Result<Cost> {
        let (next, cost) = self.state.step(id, self.model)?;
        self.state = next;
        Ok(cost)
    }

    pub fn total(&self, totals: TotalsConvention) -> Cost {
        self.state.total(Objective::new(self.model, totals))
    }
}

/// Chooses the next variable to eliminate. Called only on non-terminal
/// states. A learned agent plugs in here.
pub trait StepPolicy {
    fn choose(&mut self, state: &SearchState) -> Result<VarId>;
}

fn argmin_by_key(
    state: &SearchState,
    mut key: impl FnMut(VarId) -> Result<usize>,
) -> Result<VarId> {
    let mut best: Option<(usize, VarId)> = None;
    // actions come ascending, so strict < keeps the smallest id on ties
    for id in state.actions() {
        let k = key(id)?;
        if best.is_none_or(|(bk, _)| k < bk) {
            best = Some((k, id));
        }
    }
    best.map(|(_, id)| id)
        .ok_or_else(|| Error::InvalidConfig("no variable left to eliminate".into()))
}

/// Eliminates the variable whose product has the fewest variables.
#[derive(Debug, Clone, Copy, Default)]
pub struct GreedyMinSize;

impl StepPolicy for GreedyMinSize {
    fn choose(&mut self, state: &SearchState) -> Result<VarId> {
        argmin_by_key(state, |id| Ok(state.graph.product_shape(id)?.scope().len()))
    }
}

/// Eliminates the variable that appears in the fewest factors.
#[derive(Debug, Clone, Copy, Default)]
pub struct MinDegree;

impl StepPolicy for MinDegree {
    fn choose(&mut self, state: &SearchState) -> Result<VarId> {
        argmin_by_key(state, |id| Ok(state.graph.touching(id).len()))
    }
}

/// Uniformly random live variable.
#[derive(Debug, Clone)]
pub struct RandomPolicy {
    rng: Rng,
}

impl RandomPolicy {
    pub fn new(seed: u64) -> Self {
        RandomPolicy {
            rng: rng::stream(seed, rng::ROLE_RANDOM_ORDER),
        }
    }
}

impl StepPolicy for RandomPolicy {
    fn choose(&mut self, state: &SearchState) -> Result<VarId> {
        let actions = state.actions();
        if actions.is_empty() {
            return Err(Error::InvalidConfig("no variable left to eliminate".into()));
        }
        let i = (self.rng.next_u64() % actions.len() as u64) as usize;
        Ok(actions[i])
    }
}

/// Runs `policy` to the end of the episode.
pub fn rollout(
    graph: &FactorGraph,
    policy: &mut dyn StepPolicy,
) -> Result<(Vec<VarId>, CostLedger)> {
    let mut state = SearchState::new(graph);
    while !state.is_terminal() {
        let id = policy.choose(&state)?;
        state = state.step(id, CostModel::Dense)?.0;
    }
    let order = state.eliminated.clone();
    let (_, ledger) = run_elimination(&graph.structure(), &order, Mode::CostOnly)?;
    Ok((order, ledger))
}

/// Greedy order by smallest product scope, ties to the smallest id. The
/// ledger carries both dense and compact costs.
pub fn greedy_order(graph: &FactorGraph) -> Result<(Vec<VarId>, CostLedger)> {
    rollout(graph, &mut GreedyMinSize)
}

pub fn min_degree_order(graph: &FactorGraph) -> Result<(Vec<VarId>, CostLedger)> {
    rollout(graph, &mut MinDegree)
}

pub fn random_order(graph: &FactorGraph, seed: u64) -> Result<(Vec<VarId>, CostLedger)> {
    rollout(graph, &mut RandomPolicy::new(seed))
}

/// Default cap on the number of variables for [`exhaustive_optimal`].
pub const DEFAULT_EXHAUSTIVE_LIMIT: usize = 10;

/// Minimum-cost order by depth-first branch and bound over all orders.
/// Among optimal orders the lexicographically smallest is returned.
pub fn exhaustive_optimal(graph: &FactorGraph, objective: Objective) -> Result<(Vec<VarId>, Cost)> {
    exhaustive_optimal_with_limit(graph, objective, DEFAULT_EXHAUSTIVE_LIMIT)
}

pub fn exhaustive_optimal_with_limit(
    graph: &FactorGraph,
    objective: Objective,
    limit: usize,
) -> Result<(Vec<VarId>, Cost)> {
    let n = graph.num_variables();
    if n > limit {
        return Err(Error::TooLarge {
            size: n as u128,
            limit: limit as u128,
        });
    }
    // The greedy score bounds the optimum from above; it only prunes until
    // the first complete order is found.
    let (_, greedy) = greedy_order(graph)?;
    let mut search = BranchAndBound {
        objective,
        bound: objective.score(&greedy),
        best: None,
    };
    search.descend(&SearchState::new(graph))?;
    let (order, total) = search.best.expect("the greedy bound is always attainable");
    Ok((order, total))
}

struct BranchAndBound {
    objective: Objective,
    bound: Cost,
    best: Option<(Vec<VarId>, Cost)>,
}

impl BranchAndBound {
    fn prune(&self, partial: Cost) -> bool {
        match self.best {
            Some((_, best)) => partial >= best,
            None => partial > self.bound,
        }
    }

    fn descend(&mut self, state: &SearchState) -> Result<()> {
        if state.is_terminal() {
            let total = state.total(self.objective);
            let better = match self.best {
                Some((_, best)) => total < best,
                None => total <= self.bound,
            };
            if better {
                self.best = Some((state.eliminated.clone(), total));
            }
            return Ok(());
        }
        for id in state.actions() {
            let (next, _) = state.step(id, self.objective.model)?;
            // partial sums of a non-terminal state never exceed the final
            // score under either convention
            if !next.is_terminal()
                && self
                    .prune(next.total(Objective::new(self.objective.model, TotalsConvention::Full)))
            {
                continue;
            }
            self.descend(&next)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealParams {
    pub seed: u64,
    /// Number of orders scored, including the greedy starting order.
    pub budget: usize,
    pub start_temperature: f64,
    pub end_temperature: f64,
}

impl AnnealParams {
    pub fn new(seed: u64, budget: usize) -> Self {
        AnnealParams {
            seed,
            budget,
            start_temperature: 1.0,
            end_temperature: 0.01,
        }
    }
}

/// Simulated annealing over orders, starting from the greedy order. A move
/// swaps two adjacent positions; energies are `ln(1 + score)` so that the
/// temperature schedule does not depend on the magnitude of the costs.
/// Temperatures fall geometrically from start to end over the budget.
pub fn anneal_order(
    graph: &FactorGraph,
    objective: Objective,
    params: AnnealParams,
) -> Result<(Vec<VarId>, CostLedger)> {
    if params.budget == 0 {
        return Err(Error::InvalidConfig("annealing budget must be >= 1".into()));
    }
    let structure = graph.structure();
    let score = |order: &[VarId]| -> Result<(Cost, CostLedger)> {
        let (_, ledger) = run_elimination(&structure, order, Mode::CostOnly)?;
        Ok((objective.score(&ledger), ledger))
    };
    let energy = |cost: Cost| (1.0 + cost as f64).ln();

    let (start, start_ledger) = greedy_order(graph)?;
    let mut current = start.clone();
    let mut current_cost = objective.score(&start_ledger);
    let mut best = (start, current_cost, start_ledger);
    if current.len() < 2 {
        return Ok((best.0, best.2));
    }

    let mut rng = rng::stream(params.seed, rng::ROLE_ANNEAL);
    let moves = params.budget - 1;
    let ratio = params.end_temperature / params.start_temperature;
    for k in 0..moves {
        let t =
            params.start_temperature * ratio.powf(k as f64 / moves.max(2).saturating_sub(1) as f64);
        let i = rng.random_range(0..current.len() - 1);
        let mut candidate = current.clone();
        candidate.swap(i, i + 1);
        let (cost, ledger) = score(&candidate)?;
        let delta = energy(cost) - energy(current_cost);
        let accept = delta <= 0.0 || rng.random::<f64>() < (-delta / t).exp();
        if accept {
            current = candidate;
            current_cost = cost;
            if cost < best.1 {
                best = (current.clone(), cost, ledger);
            }
        }
    }
    Ok((best.0, best.2))
}

/// Order-finding strategies available from the command line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Policy {
    GreedyMinSize,
    MinDegree,
    Random { seed: u64 },
    Anneal(AnnealParams),
    Exhaustive { limit: usize },
}

/// Order chosen by `policy` together with its cost ledger.
pub fn find_order(
    graph: &FactorGraph,
    policy: Policy,
    objective: Objective,
) -> Result<(Vec<VarId>, CostLedger)> {
    match policy {
        Policy::GreedyMinSize => greedy_order(graph),
        Policy::MinDegree => min_degree_order(graph),
        Policy::Random { seed } => random_order(graph, seed),
        Policy::Anneal(params) => anneal_order(graph, objective, params),
        Policy::Exhaustive { limit } => {
            let (order, _) = exhaustive_optimal_with_limit(graph, objective, limit)?;
            let (_, ledger) = run_elimination(&graph.structure(), &order, Mode::CostOnly)?;
            Ok((order, ledger))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factor::{DenseFactor, Variable};
    use crate::graph::Factor;
    use crate::symmetry::{CompactFactor, SymmetryPartition};

    fn b(ids: &[VarId]) -> Vec<Variable> {
        ids.iter().map(|&i| Variable::boolean(i)).collect()
    }

    fn graph(n: usize, scopes: &[&[VarId]]) -> FactorGraph {
        let factors = scopes
            .iter()
            .map(|s| Factor::from(DenseFactor::constant(b(s), 1.0).unwrap()))
            .collect();
        FactorGraph::new(b(&(0..n).collect::<Vec<_>>()), factors).unwrap()
    }

    fn chain() -> FactorGraph {
        graph(4, &[&[0, 1], &[1, 2], &[2, 3]])
    }

    fn full() -> Objective {
        Objective::new(CostModel::Dense, TotalsConvention::Full)
    }

    #[test]
    fn greedy_on_chain() {
        let (order, ledger) = greedy_order(&chain()).unwrap();
        assert_eq!(order[0], 0);
        assert_eq!(order, vec![0, 1, 2, 3]);
        assert_eq!(ledger.dense.full, 14);
        assert_eq!(
            exhaustive_optimal(&chain(), full()).unwrap(),
            (vec![0, 1, 2, 3], 14)
        );
    }

    #[test]
    fn greedy_tie_break_on_triangle() {
        let g = graph(3, &[&[0, 1], &[0, 2], &[1, 2]]);
        assert_eq!(GreedyMinSize.choose(&SearchState::new(&g)).unwrap(), 0);
    }

    #[test]
    fn environment_episode() {
        let g = graph(3, &[&[0, 1], &[0, 2], &[1, 2]]);
        let mut env = Environment::new(&g, CostModel::Dense);
        assert_eq!(env.step(0).unwrap(), 8);
        assert_eq!(env.step(0).unwrap_err(), Error::AlreadyEliminated(0));
        assert_eq!(env.step(9).unwrap_err(), Error::UnknownVariable(9));
        env.step(1).unwrap();
        env.step(2).unwrap();
        assert!(env.done());
        assert!(env.state().actions().is_empty());
        let (_, ledger) = run_elimination(&g, &[0, 1, 2], Mode::Dense).unwrap();
        assert_eq!(env.total(TotalsConvention::Full), ledger.dense.full);
        assert_eq!(env.total(TotalsConvention::Paper), ledger.dense.paper);
        env.reset();
        assert_eq!(env.state().actions(), vec![0, 1, 2]);
    }

    #[test]
    fn compact_first_action_on_symmetric_factor() {
        let scope = b(&(0..6).collect::<Vec<_>>());
        let c = CompactFactor::constant(&scope, &SymmetryPartition::full(&scope), 1.0).unwrap();
        let g = FactorGraph::new(scope, vec![Factor::Compact(c)]).unwrap();
        let mut env = Environment::new(&g, CostModel::Compact);
        assert_eq!(env.step(3).unwrap(), 7);
    }

    #[test]
    fn exhaustive_single_factor_is_lexicographic() {
        let g = graph(4, &[&[0, 1, 2, 3]]);
        let (order, total) = exhaustive_optimal(&g, full()).unwrap();
        assert_eq!(order, vec![0, 1, 2, 3]);
        assert_eq!(total, 16 + 8 + 4 + 2);
    }

    #[test]
    fn exhaustive_limit() {
        let g = graph(4, &[]);
        assert!(matches!(
            exhaustive_optimal_with_limit(&g, full(), 3),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn anneal_budget_one_is_greedy() {
        let g = graph(5, &[&[0, 1, 2], &[2, 3], &[3, 4], &[0, 4]]);
        let (greedy, _) = greedy_order(&g).unwrap();
        let (order, _) = anneal_order(&g, full(), AnnealParams::new(3, 1)).unwrap();
        assert_eq!(order, greedy);
        assert!(anneal_order(&g, full(), AnnealParams::new(3, 0)).is_err());
    }

    #[test]
    fn anneal_is_deterministic() {
        let g = graph(6, &[&[0, 1, 2], &[2, 3], &[3, 4, 5], &[0, 5], &[1, 4]]);
        let p = AnnealParams::new(11, 200);
        assert_eq!(
            anneal_order(&g, full(), p).unwrap(),
            anneal_order(&g, full(), p).unwrap()
        );
    }

    #[test]
    fn random_policy_is_reproducible() {
        let g = graph(8, &[&[0, 1], &[2, 3]]);
        let a = random_order(&g, 5).unwrap().0;
        assert_eq!(a, random_order(&g, 5).unwrap().0);
        let mut sorted = a.clone();
        sorted.sort();
        assert_eq!(sorted, (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn min_degree_prefers_rare_variables() {
        let g = graph(3, &[&[0, 1], &[0, 2], &[0, 1, 2]]);
        // factor degrees: 0 -> 3, 1 -> 2, 2 -> 2
        assert_eq!(MinDegree.choose(&SearchState::new(&g)).unwrap(), 1);
    }
}
