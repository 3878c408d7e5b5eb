//! Histogram-indexed factor tables.
//!
//! A [`CompactFactor`] stores one potential per combination of free-variable
//! assignment and group histograms. The table is row-major over the free
//! variables (ascending id) followed by one histogram dimension per group
//! (groups ordered by smallest member), each enumerated by [`hist_rank`].

use crate::error::{Error, Result};
use crate::factor::{advance, union_scope, Assignment, DenseFactor, VarId, Variable};

use super::histogram::{compact_domain_size, hist_rank, hist_unrank, Histogram};
use super::partition::{
    propagate_multiply, propagate_sum_out, transposition_witness, SymmetryPartition,
};

/// A group of interchangeable variables sharing one cardinality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymGroup {
    vars: Vec<VarId>,
    cardinality: usize,
}

impl SymGroup {
    pub fn vars(&self) -> &[VarId] {
        &self.vars
    }

    pub fn cardinality(&self) -> usize {
        self.cardinality
    }

    fn domain_size(&self) -> Result<usize> {
        let size = compact_domain_size(self.vars.len(), self.cardinality)?;
        usize::try_from(size).map_err(|_| Error::Overflow("compact table size"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompactFactor {
    free: Vec<Variable>,
    groups: Vec<SymGroup>,
    table: Vec<f64>,
}

/// Splits `scope` into free variables and groups according to `partition`.
fn layout(
    scope: &[Variable],
    partition: &SymmetryPartition,
) -> Result<(Vec<Variable>, Vec<SymGroup>)> {
    partition.validate(scope)?;
    let free = scope
        .iter()
        .filter(|v| partition.group_of(v.id()).is_none())
        .copied()
        .collect();
    let groups = partition
        .groups()
        .iter()
        .map(|g| {
            let cardinality = scope.iter().find(|v| v.id() == g[0]).unwrap().cardinality();
            SymGroup {
                vars: g.clone(),
                cardinality,
            }
        })
        .collect();
    Ok((free, groups))
}

impl CompactFactor {
    /// Fills a compact table over `scope` by evaluating `value` at the
    /// canonical representative of each cell.
    fn build(
        scope: &[Variable],
        partition: &SymmetryPartition,
        mut value: impl FnMut(&Assignment) -> Result<f64>,
    ) -> Result<Self> {
        let (free, groups) = layout(scope, partition)?;
        let mut c = CompactFactor {
            free,
            groups,
            table: Vec::new(),
        };
        let dims = c.dims()?;
        let size = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or(Error::Overflow("compact table size"))?;
        let mut table = Vec::with_capacity(size);
        let mut coords = vec![0; dims.len()];
        loop {
            table.push(value(&c.representative(&coords)?)?);
            if !advance(&mut coords, &dims) {
                break;
            }
        }
        c.table = table;
        Ok(c)
    }

    /// Creates a compact factor from explicit parts. Free variables may be in
    /// any order and `groups` may list their members and themselves in any
    /// order; `table` follows that given layout and is reordered into
    /// canonical form.
    pub fn from_layout(
        free: Vec<Variable>,
        groups: Vec<(Vec<VarId>, usize)>,
        table: Vec<f64>,
    ) -> Result<Self> {
        let given = CompactFactor {
            free: free.clone(),
            groups: groups
                .iter()
                .map(|(vars, cardinality)| SymGroup {
                    vars: vars.clone(),
                    cardinality: *cardinality,
                })
                .collect(),
            table,
        };
        let mut scope = free;
        for (vars, cardinality) in &groups {
            if *cardinality == 0 {
                return Err(Error::InvalidFactor("cardinality must be >= 1".into()));
            }
            for &id in vars {
                scope.push(Variable::new(id, *cardinality)?);
            }
        }
        let mut ids: Vec<VarId> = scope.iter().map(Variable::id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidFactor(
                "variable appears twice in scope".into(),
            ));
        }
        let expected: usize = given
            .dims()?
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or(Error::Overflow("compact table size"))?;
        if given.table.len() != expected {
            return Err(Error::InvalidFactor(format!(
                "compact table has {} entries, layout requires {expected}",
                given.table.len()
            )));
        }
        if let Some(bad) = given.table.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidFactor(format!(
                "potential {bad} is not a finite non-negative number"
            )));
        }
        scope.sort_by_key(Variable::id);
        let partition = SymmetryPartition::new(groups.into_iter().map(|(g, _)| g).collect())?;
        CompactFactor::build(
            &scope,
            &partition,
            |a| Ok(given.table[given.cell_index(a)?]),
        )
    }

    /// Constant compact factor.
    pub fn constant(scope: &[Variable], partition: &SymmetryPartition, value: f64) -> Result<Self> {
        CompactFactor::build(scope, partition, |_| Ok(value))
    }

    pub fn scalar(value: f64) -> Self {
        CompactFactor {
            free: Vec::new(),
            groups: Vec::new(),
            table: vec![value],
        }
    }

    pub fn free(&self) -> &[Variable] {
        &self.free
    }

    pub fn groups(&self) -> &[SymGroup] {
        &self.groups
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn is_scalar(&self) -> bool {
        self.free.is_empty() && self.groups.is_empty()
    }

    /// Full scope, sorted by id.
    pub fn scope(&self) -> Vec<Variable> {
        let mut scope = self.free.clone();
        for g in &self.groups {
            scope.extend(
                g.vars.iter().map(|&id| {
                    Variable::new(id, g.cardinality).expect("group cardinality is >= 1")
                }),
            );
        }
        scope.sort_by_key(Variable::id);
        scope
    }

    pub fn partition(&self) -> SymmetryPartition {
        SymmetryPartition::new(self.groups.iter().map(|g| g.vars.clone()).collect())
            .expect("groups of a compact factor are disjoint")
    }

    fn dims(&self) -> Result<Vec<usize>> {
        let mut dims: Vec<usize> = self.free.iter().map(Variable::cardinality).collect();
        for g in &self.groups {
            dims.push(g.domain_size()?);
        }
        Ok(dims)
    }

    /// Canonical assignment for the cell at `coords`: within each group the
    /// members, ascending by id, take nondecreasing values.
    fn representative(&self, coords: &[usize]) -> Result<Assignment> {
        let mut bindings: Vec<(VarId, usize)> = self
            .free
            .iter()
            .zip(coords)
            .map(|(v, &x)| (v.id(), x))
            .collect();
        for (g, &r) in self.groups.iter().zip(&coords[self.free.len()..]) {
            let h = hist_unrank(r, g.vars.len(), g.cardinality)?;
            let mut sorted = g.vars.clone();
            sorted.sort_unstable();
            bindings.extend(sorted.into_iter().zip(h.canonical_values()));
        }
        Assignment::new(bindings)
    }

    fn cell_index(&self, a: &Assignment) -> Result<usize> {
        let mut index = 0;
        for v in &self.free {
            let x = a.get(v.id()).ok_or(Error::MissingVariable(v.id()))?;
            if x >= v.cardinality() {
                return Err(Error::InvalidAssignment(format!(
                    "value {x} out of range for variable {}",
                    v.id()
                )));
            }
            index = index * v.cardinality() + x;
        }
        for g in &self.groups {
            let values = g
                .vars
                .iter()
                .map(|&id| a.get(id).ok_or(Error::MissingVariable(id)))
                .collect::<Result<Vec<_>>>()?;
            let h = Histogram::of_values(values, g.cardinality)?;
            index = index * g.domain_size()? + hist_rank(&h);
        }
        Ok(index)
    }
}

/// Checks that every transposition of adjacent group members (which together
/// generate all permutations of the group) leaves `f` unchanged.
pub fn check_symmetric(f: &DenseFactor, partition: &SymmetryPartition) -> Result<()> {
    partition.validate(f.scope())?;
    for g in partition.groups() {
        for pair in g.windows(2) {
            let p = f.position(pair[0]).expect("validated");
            let q = f.position(pair[1]).expect("validated");
            if let Some((left, right)) = transposition_witness(f, p, q) {
                return Err(Error::NotSymmetric {
                    group: g.clone(),
                    left,
                    right,
                });
            }
        }
    }
    Ok(())
}

/// Compact encoding of `f` under `partition`, after verifying the symmetry.
pub fn encode(f: &DenseFactor, partition: &SymmetryPartition) -> Result<CompactFactor> {
    check_symmetric(f, partition)?;
    encode_unchecked(f, partition)
}

/// Like [`encode`] but reads each cell from its canonical representative
/// without verifying that the declared groups are interchangeable.
pub fn encode_unchecked(f: &DenseFactor, partition: &SymmetryPartition) -> Result<CompactFactor> {
    CompactFactor::build(f.scope(), partition, |a| f.value(a))
}

/// Expands a compact factor back into its dense table.
pub fn decode(c: &CompactFactor) -> DenseFactor {
    let scope = c.scope();
    let cards: Vec<usize> = scope.iter().map(Variable::cardinality).collect();
    let mut table = Vec::with_capacity(cards.iter().product());
    let mut values = vec![0; scope.len()];
    loop {
        let a = Assignment::from_scope(&scope, &values).expect("values are in range");
        table.push(c.table[c.cell_index(&a).expect("assignment covers the scope")]);
        if !advance(&mut values, &cards) {
            break;
        }
    }
    DenseFactor::from_canonical(scope, table)
}

/// Potential of `c` at `a` without materializing the dense table.
pub fn compact_lookup(c: &CompactFactor, a: &Assignment) -> Result<f64> {
    Ok(c.table[c.cell_index(a)?])
}

/// Sums `var` out of a compact factor. A grouped variable leaves its group,
/// and each output cell with histogram h' collects the input cells h' + e_v.
pub fn compact_sum_out(c: &CompactFactor, var: VarId) -> Result<CompactFactor> {
    let scope = c.scope();
    let target = *scope
        .iter()
        .find(|v| v.id() == var)
        .ok_or(Error::UnknownVariable(var))?;
    let kept: Vec<Variable> = scope.into_iter().filter(|v| v.id() != var).collect();
    let partition = propagate_sum_out(&c.partition(), var);
    CompactFactor::build(&kept, &partition, |a| {
        let mut bindings = a.bindings().to_vec();
        bindings.push((var, 0));
        let mut full = Assignment::new(bindings)?;
        let mut acc = 0.0;
        for v in 0..target.cardinality() {
            full = with_value(full, var, v);
            acc += compact_lookup(c, &full)?;
        }
        Ok(acc)
    })
}

fn with_value(a: Assignment, var: VarId, value: usize) -> Assignment {
    let bindings = a
        .bindings()
        .iter()
        .map(|&(id, x)| if id == var { (id, value) } else { (id, x) })
        .collect();
    Assignment::new(bindings).expect("rebinding keeps ids unique")
}

/// Product of two compact factors; result groups follow
/// [`propagate_multiply`].
pub fn compact_multiply(c1: &CompactFactor, c2: &CompactFactor) -> Result<CompactFactor> {
    let s1 = c1.scope();
    let s2 = c2.scope();
    let scope = union_scope(&s1, &s2)?;
    let partition = propagate_multiply(&s1, &c1.partition(), &s2, &c2.partition());
    CompactFactor::build(&scope, &partition, |a| {
        Ok(compact_lookup(c1, a)? * compact_lookup(c2, a)?)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factor::{multiply, sum_out};
    use crate::symmetry::detect_symmetries;

    fn b(ids: &[VarId]) -> Vec<Variable> {
        ids.iter().map(|&i| Variable::boolean(i)).collect()
    }

    fn part(groups: &[&[VarId]]) -> SymmetryPartition {
        SymmetryPartition::new(groups.iter().map(|g| g.to_vec()).collect()).unwrap()
    }

    fn triple() -> DenseFactor {
        DenseFactor::new(b(&[1, 2, 3]), vec![1., 2., 2., 3., 2., 3., 3., 4.]).unwrap()
    }

    /// Fully symmetric Boolean factor whose potential is `1 + #ones`.
    fn counting(ids: &[VarId]) -> CompactFactor {
        let scope = b(ids);
        let n = ids.len();
        let mut c = CompactFactor::constant(&scope, &SymmetryPartition::full(&scope), 0.0).unwrap();
        for r in 0..c.table.len() {
            let h = hist_unrank(r, n, 2).unwrap();
            c.table[r] = 1.0 + h.counts()[1] as f64;
        }
        c
    }

    #[test]
    fn encode_triple() {
        let c = encode(&triple(), &part(&[&[1, 2, 3]])).unwrap();
        assert_eq!(c.table().len(), 4);
        // ranks: [0,3], [1,2], [2,1], [3,0] -> three, two, one, zero ones
        assert_eq!(c.table(), &[4., 3., 2., 1.]);
        assert_eq!(decode(&c), triple());

        let a = Assignment::new(vec![(1, 0), (2, 1), (3, 1)]).unwrap();
        assert_eq!(compact_lookup(&c, &a).unwrap(), 3.);
        let a = Assignment::new(vec![(1, 0), (2, 0), (3, 0)]).unwrap();
        assert_eq!(compact_lookup(&c, &a).unwrap(), 1.);
    }

    #[test]
    fn lookup_agrees_with_decode_everywhere() {
        let c = encode(&triple(), &part(&[&[1, 2, 3]])).unwrap();
        let d = decode(&c);
        let mut values = vec![0; 3];
        loop {
            let a = Assignment::from_scope(d.scope(), &values).unwrap();
            assert_eq!(compact_lookup(&c, &a).unwrap(), d.value(&a).unwrap());
            if !advance(&mut values, &[2, 2, 2]) {
                break;
            }
        }
        assert_eq!(
            compact_lookup(&c, &Assignment::new(vec![(1, 0)]).unwrap()),
            Err(Error::MissingVariable(2))
        );
    }

    #[test]
    fn trivial_partition_keeps_table() {
        let f = DenseFactor::new(b(&[0, 4]), vec![1., 2., 3., 4.]).unwrap();
        let c = encode(&f, &SymmetryPartition::trivial()).unwrap();
        assert_eq!(c.table(), f.table());
        assert_eq!(decode(&c), f);
    }

    #[test]
    fn encode_reports_witness() {
        let f = DenseFactor::new(b(&[1, 2]), vec![1., 2., 3., 4.]).unwrap();
        match encode(&f, &part(&[&[1, 2]])) {
            Err(Error::NotSymmetric { group, left, right }) => {
                assert_eq!(group, vec![1, 2]);
                assert_ne!(f.at(&left), f.at(&right));
                let mut swapped = left.clone();
                swapped.swap(0, 1);
                assert_eq!(swapped, right);
            }
            other => panic!("expected NotSymmetric, got {other:?}"),
        }
    }

    #[test]
    fn sum_out_triple() {
        let c = encode(&triple(), &part(&[&[1, 2, 3]])).unwrap();
        let s = compact_sum_out(&c, 3).unwrap();
        assert_eq!(s.partition(), part(&[&[1, 2]]));
        // ranks [0,2], [1,1], [2,0] -> two, one, zero ones
        assert_eq!(s.table(), &[7., 5., 3.]);
        assert_eq!(decode(&s), sum_out(&triple(), &[3]).unwrap());
        assert_eq!(compact_sum_out(&c, 9), Err(Error::UnknownVariable(9)));
    }

    #[test]
    fn sum_out_group_down_to_free() {
        let c = encode(&triple(), &part(&[&[1, 2, 3]])).unwrap();
        let s = compact_sum_out(&compact_sum_out(&c, 3).unwrap(), 2).unwrap();
        assert!(s.groups().is_empty());
        assert_eq!(s.free(), &b(&[1]));
        assert_eq!(s.table(), &[8., 12.]);
        let z = compact_sum_out(&s, 1).unwrap();
        assert!(z.is_scalar());
        assert_eq!(z.table(), &[20.]);
    }

    #[test]
    fn multiply_nested_groups() {
        let c1 = counting(&[1, 2, 3, 4]);
        let c2 = counting(&[3, 4]);
        let m = compact_multiply(&c1, &c2).unwrap();
        assert_eq!(m.partition(), part(&[&[1, 2], &[3, 4]]));
        let dense = multiply(&decode(&c1), &decode(&c2)).unwrap();
        assert_eq!(decode(&m), dense);
        assert!(m.partition().is_refinement_of(&detect_symmetries(&dense)));
    }

    #[test]
    fn multiply_overlapping_pairs() {
        let c1 = counting(&[1, 2]);
        let c2 = counting(&[2, 3]);
        let m = compact_multiply(&c1, &c2).unwrap();
        assert!(m.partition().is_trivial());
        assert_eq!(decode(&m), multiply(&decode(&c1), &decode(&c2)).unwrap());
    }

    #[test]
    fn multiply_by_scalar() {
        let c = counting(&[1, 2, 3]);
        let m = compact_multiply(&CompactFactor::scalar(2.0), &c).unwrap();
        assert_eq!(m.partition(), c.partition());
        let doubled: Vec<f64> = c.table().iter().map(|x| 2.0 * x).collect();
        assert_eq!(m.table(), doubled.as_slice());
    }

    #[test]
    fn from_layout_reorders() {
        // free order (5, 0) given; X0 fastest
        let c = CompactFactor::from_layout(b(&[5, 0]), vec![], vec![1., 2., 3., 4.]).unwrap();
        assert_eq!(c.free(), &b(&[0, 5]));
        assert_eq!(c.table(), &[1., 3., 2., 4.]);

        let c = CompactFactor::from_layout(vec![], vec![(vec![3, 1, 2], 2)], vec![4., 3., 2., 1.])
            .unwrap();
        assert_eq!(decode(&c), triple());

        assert!(CompactFactor::from_layout(vec![], vec![(vec![1, 2, 3], 2)], vec![1.; 5]).is_err());
    }
}
