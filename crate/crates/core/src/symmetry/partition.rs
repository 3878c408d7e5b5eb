//! Groups of interchangeable variables within one factor.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::factor::{advance, DenseFactor, VarId, Variable};

/// Disjoint groups of interchangeable variables. Only groups with at least two
/// members are stored; every other scope variable is free.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SymmetryPartition {
    groups: Vec<Vec<VarId>>,
}

impl SymmetryPartition {
    /// Normalizes `groups`: members sorted, groups of size <= 1 dropped,
    /// groups ordered by smallest member. Fails if two groups overlap.
    pub fn new(groups: Vec<Vec<VarId>>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for mut g in groups {
            g.sort_unstable();
            g.dedup();
            for &v in &g {
                if !seen.insert(v) {
                    return Err(Error::InvalidPartition(format!(
                        "variable {v} appears in more than one group"
                    )));
                }
            }
            if g.len() > 1 {
                out.push(g);
            }
        }
        out.sort();
        Ok(SymmetryPartition { groups: out })
    }

    /// The partition with no interchangeable variables.
    pub fn trivial() -> Self {
        SymmetryPartition::default()
    }

    /// One group covering the whole scope.
    pub fn full(scope: &[Variable]) -> Self {
        SymmetryPartition::new(vec![scope.iter().map(Variable::id).collect()])
            .expect("a single group is always disjoint")
    }

    pub fn groups(&self) -> &[Vec<VarId>] {
        &self.groups
    }

    pub fn is_trivial(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn group_of(&self, id: VarId) -> Option<usize> {
        self.groups
            .iter()
            .position(|g| g.binary_search(&id).is_ok())
    }

    /// Checks that every grouped variable is in `scope` and that each group
    /// has a single cardinality.
    pub fn validate(&self, scope: &[Variable]) -> Result<()> {
        for g in &self.groups {
            let mut card = None;
            for &id in g {
                let v = scope.iter().find(|v| v.id() == id).ok_or_else(|| {
                    Error::InvalidPartition(format!("variable {id} is not in the factor scope"))
                })?;
                match card {
                    None => card = Some(v.cardinality()),
                    Some(c) if c != v.cardinality() => {
                        return Err(Error::InvalidPartition(format!(
                            "group {g:?} mixes cardinalities {c} and {}",
                            v.cardinality()
                        )))
                    }
                    Some(_) => {}
                }
            }
        }
        Ok(())
    }

    /// True if every group of `self` lies inside some group of `other`.
    pub fn is_refinement_of(&self, other: &SymmetryPartition) -> bool {
        self.groups.iter().all(|g| {
            other
                .groups
                .iter()
                .any(|h| g.iter().all(|v| h.binary_search(v).is_ok()))
        })
    }
}

/// Looks for an assignment whose potential changes when the values at scope
/// positions `p` and `q` are swapped. Returns the pair of value vectors.
pub(crate) fn transposition_witness(
    f: &DenseFactor,
    p: usize,
    q: usize,
) -> Option<(Vec<usize>, Vec<usize>)> {
    let cards = f.cardinalities();
    if cards[p] != cards[q] {
        let values = vec![0; cards.len()];
        return Some((values.clone(), values));
    }
    let mut values = vec![0; cards.len()];
    loop {
        if values[p] < values[q] {
            let mut swapped = values.clone();
            swapped.swap(p, q);
            if f.at(&values) != f.at(&swapped) {
                return Some((values, swapped));
            }
        }
        if !advance(&mut values, &cards) {
            return None;
        }
    }
}

/// Maximal groups of variables whose pairwise transpositions leave the table
/// unchanged (exact comparison).
///
/// Invariance under transposition is an equivalence relation on scope
/// positions, so grouping by union-find yields the maximal partition.
pub fn detect_symmetries(f: &DenseFactor) -> SymmetryPartition {
    let n = f.scope().len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for p in 0..n {
        for q in p + 1..n {
            if root(&mut parent, p) == root(&mut parent, q) {
                continue;
            }
            if transposition_witness(f, p, q).is_none() {
                let (rp, rq) = (root(&mut parent, p), root(&mut parent, q));
                parent[rq] = rp;
            }
        }
    }
    let mut classes: BTreeMap<usize, Vec<VarId>> = BTreeMap::new();
    for p in 0..n {
        let r = root(&mut parent, p);
        classes.entry(r).or_default().push(f.scope()[p].id());
    }
    SymmetryPartition::new(classes.into_values().collect())
        .expect("union-find classes are disjoint")
}

/// Structural operation on factor shapes, used to derive result symmetries
/// without touching potentials.
#[derive(Debug, Clone, Copy)]
pub enum SchematicOp<'a> {
    Multiply {
        left_scope: &'a [Variable],
        left: &'a SymmetryPartition,
        right_scope: &'a [Variable],
        right: &'a SymmetryPartition,
    },
    SumOut {
        partition: &'a SymmetryPartition,
        var: VarId,
    },
}

/// Symmetries guaranteed to hold in the result of `op`.
pub fn propagate_symmetries_schematic(op: SchematicOp<'_>) -> SymmetryPartition {
    match op {
        SchematicOp::Multiply {
            left_scope,
            left,
            right_scope,
            right,
        } => propagate_multiply(left_scope, left, right_scope, right),
        SchematicOp::SumOut { partition, var } => propagate_sum_out(partition, var),
    }
}

/// A variable leaving a group keeps the rest of the group intact.
pub fn propagate_sum_out(partition: &SymmetryPartition, var: VarId) -> SymmetryPartition {
    let groups = partition
        .groups
        .iter()
        .map(|g| g.iter().copied().filter(|&v| v != var).collect())
        .collect();
    SymmetryPartition::new(groups).expect("removing a variable keeps groups disjoint")
}

/// Groups of a product: intersections of one group from each side, plus the
/// part of each group that the other operand does not mention. Variables
/// claimed twice end up free.
pub fn propagate_multiply(
    left_scope: &[Variable],
    left: &SymmetryPartition,
    right_scope: &[Variable],
    right: &SymmetryPartition,
) -> SymmetryPartition {
    let in_scope = |scope: &[Variable], v: VarId| scope.iter().any(|w| w.id() == v);

    let mut candidates: Vec<Vec<VarId>> = Vec::new();
    for gi in &left.groups {
        for gj in &right.groups {
            let shared: Vec<VarId> = gi
                .iter()
                .copied()
                .filter(|v| gj.binary_search(v).is_ok())
                .collect();
            if !shared.is_empty() {
                candidates.push(shared);
            }
        }
    }
    for (groups, other) in [(&left.groups, right_scope), (&right.groups, left_scope)] {
        for g in groups {
            let rest: Vec<VarId> = g.iter().copied().filter(|&v| !in_scope(other, v)).collect();
            if !rest.is_empty() {
                candidates.push(rest);
            }
        }
    }

    let mut claims: BTreeMap<VarId, usize> = BTreeMap::new();
    for c in &candidates {
        for &v in c {
            *claims.entry(v).or_default() += 1;
        }
    }
    let groups = candidates
        .into_iter()
        .map(|c| c.into_iter().filter(|v| claims[v] == 1).collect())
        .collect();
    SymmetryPartition::new(groups).expect("conflicting claims were removed")
}
