//! Dense factors over discrete variables.
//!
//! A [`DenseFactor`] stores one potential per joint assignment of its scope. The
//! scope is always kept sorted by variable id and the table is row-major with the
//! last scope variable varying fastest, so two factors over the same variables
//! can be compared entry by entry.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// Identifier of a random variable.
pub type VarId = usize;

/// A random variable with domain `{0, .., cardinality - 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variable {
    id: VarId,
    cardinality: usize,
}

impl Variable {
    pub fn new(id: VarId, cardinality: usize) -> Result<Self> {
        if cardinality == 0 {
            return Err(Error::InvalidFactor(format!(
                "variable {id} must have cardinality >= 1"
            )));
        }
        Ok(Variable { id, cardinality })
    }

    /// Shorthand for a two-valued variable.
    pub fn boolean(id: VarId) -> Self {
        Variable { id, cardinality: 2 }
    }

    pub fn id(&self) -> VarId {
        self.id
    }

    pub fn cardinality(&self) -> usize {
        self.cardinality
    }
}

/// A partial or full joint assignment, kept sorted by variable id.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Assignment {
    bindings: Vec<(VarId, usize)>,
}

impl Assignment {
    pub fn new(mut bindings: Vec<(VarId, usize)>) -> Result<Self> {
        bindings.sort_unstable();
        if let Some(w) = bindings.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidAssignment(format!(
                "variable {} bound twice",
                w[0].0
            )));
        }
        Ok(Assignment { bindings })
    }

    pub fn empty() -> Self {
        Assignment::default()
    }

    /// Builds an assignment binding `vars[i]` to `values[i]`.
    pub fn from_scope(vars: &[Variable], values: &[usize]) -> Result<Self> {
        if vars.len() != values.len() {
            return Err(Error::InvalidAssignment(format!(
                "{} variables but {} values",
                vars.len(),
                values.len()
            )));
        }
        for (v, &x) in vars.iter().zip(values) {
            if x >= v.cardinality() {
                return Err(Error::InvalidAssignment(format!(
                    "value {x} out of range for variable {} (cardinality {})",
                    v.id(),
                    v.cardinality()
                )));
            }
        }
        Assignment::new(
            vars.iter()
                .map(|v| v.id())
                .zip(values.iter().copied())
                .collect(),
        )
    }

    pub fn get(&self, id: VarId) -> Option<usize> {
        self.bindings
            .binary_search_by_key(&id, |&(v, _)| v)
            .ok()
            .map(|i| self.bindings[i].1)
    }

    pub fn bindings(&self) -> &[(VarId, usize)] {
        &self.bindings
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }
}

/// Restricts `a` to the variables in `targets`.
pub fn project(a: &Assignment, targets: &BTreeSet<VarId>) -> Result<Assignment> {
    let mut bindings = Vec::with_capacity(targets.len());
    for &t in targets {
        let value = a.get(t).ok_or(Error::MissingVariable(t))?;
        bindings.push((t, value));
    }
    Ok(Assignment { bindings })
}

/// Row-major strides, last position fastest.
pub(crate) fn strides(cards: &[usize]) -> Vec<usize> {
    let mut out = vec![1; cards.len()];
    for i in (0..cards.len().saturating_sub(1)).rev() {
        out[i] = out[i + 1] * cards[i + 1];
    }
    out
}

/// Advances `values` to the next assignment in row-major order. Returns false
/// after the last assignment (and leaves `values` reset to zeros).
pub(crate) fn advance(values: &mut [usize], cards: &[usize]) -> bool {
    for i in (0..values.len()).rev() {
        values[i] += 1;
        if values[i] < cards[i] {
            return true;
        }
        values[i] = 0;
    }
    false
}

pub(crate) fn checked_product(cards: impl IntoIterator<Item = usize>) -> Result<usize> {
    cards.into_iter().try_fold(1usize, |acc, c| {
        acc.checked_mul(c).ok_or(Error::Overflow("table size"))
    })
}

/// Explicit potential table over a sorted scope.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseFactor {
    scope: Vec<Variable>,
    table: Vec<f64>,
}

impl DenseFactor {
    /// Creates a factor from a scope in any order and a table laid out
    /// row-major over that order. The result is stored in canonical form.
    pub fn new(scope: Vec<Variable>, table: Vec<f64>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for v in &scope {
            if !seen.insert(v.id()) {
                return Err(Error::InvalidFactor(format!(
                    "variable {} appears twice in scope",
                    v.id()
                )));
            }
        }
        let cards: Vec<usize> = scope.iter().map(Variable::cardinality).collect();
        let expected = checked_product(cards.iter().copied())?;
        if table.len() != expected {
            return Err(Error::InvalidFactor(format!(
                "table has {} entries, scope requires {expected}",
                table.len()
            )));
        }
        if let Some(bad) = table.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidFactor(format!(
                "potential {bad} is not a finite non-negative number"
            )));
        }

        if scope.windows(2).all(|w| w[0].id() < w[1].id()) {
            return Ok(DenseFactor { scope, table });
        }

        let mut sorted = scope.clone();
        sorted.sort_by_key(Variable::id);
        let given_strides = strides(&cards);
        // stride of each sorted position within the given layout
        let remap: Vec<usize> = sorted
            .iter()
            .map(|v| {
                let pos = scope.iter().position(|w| w.id() == v.id()).unwrap();
                given_strides[pos]
            })
            .collect();
        let sorted_cards: Vec<usize> = sorted.iter().map(Variable::cardinality).collect();
        let mut out = Vec::with_capacity(table.len());
        let mut values = vec![0; sorted.len()];
        loop {
            let src: usize = values.iter().zip(&remap).map(|(x, s)| x * s).sum();
            out.push(table[src]);
            if !advance(&mut values, &sorted_cards) {
                break;
            }
        }
        Ok(DenseFactor {
            scope: sorted,
            table: out,
        })
    }

    /// Factor with empty scope holding a single potential.
    pub fn scalar(value: f64) -> Self {
        DenseFactor {
            scope: Vec::new(),
            table: vec![value],
        }
    }

    /// Constant factor over `scope`.
    pub fn constant(scope: Vec<Variable>, value: f64) -> Result<Self> {
        let n = checked_product(scope.iter().map(Variable::cardinality))?;
        DenseFactor::new(scope, vec![value; n])
    }

    pub(crate) fn from_canonical(scope: Vec<Variable>, table: Vec<f64>) -> Self {
        debug_assert!(scope.windows(2).all(|w| w[0].id() < w[1].id()));
        debug_assert_eq!(
            table.len(),
            scope.iter().map(Variable::cardinality).product::<usize>()
        );
        DenseFactor { scope, table }
    }

    pub fn scope(&self) -> &[Variable] {
        &self.scope
    }

    pub fn scope_ids(&self) -> Vec<VarId> {
        self.scope.iter().map(Variable::id).collect()
    }

    pub fn cardinalities(&self) -> Vec<usize> {
        self.scope.iter().map(Variable::cardinality).collect()
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn is_scalar(&self) -> bool {
        self.scope.is_empty()
    }

    pub fn position(&self, id: VarId) -> Option<usize> {
        self.scope.binary_search_by_key(&id, Variable::id).ok()
    }

    /// Flat index of the assignment given as values aligned with the scope.
    pub fn index_of(&self, values: &[usize]) -> usize {
        values
            .iter()
            .zip(&self.scope)
            .fold(0, |acc, (&x, v)| acc * v.cardinality() + x)
    }

    /// Potential at values aligned with the scope.
    pub fn at(&self, values: &[usize]) -> f64 {
        self.table[self.index_of(values)]
    }

    /// Potential at `a`, which must bind every scope variable. Extra
    /// bindings are ignored.
    pub fn value(&self, a: &Assignment) -> Result<f64> {
        let mut values = Vec::with_capacity(self.scope.len());
        for v in &self.scope {
            let x = a.get(v.id()).ok_or(Error::MissingVariable(v.id()))?;
            if x >= v.cardinality() {
                return Err(Error::InvalidAssignment(format!(
                    "value {x} out of range for variable {}",
                    v.id()
                )));
            }
            values.push(x);
        }
        Ok(self.at(&values))
    }

    pub fn sum(&self) -> f64 {
        self.table.iter().sum()
    }
}

/// Merges two sorted scopes, checking that shared variables agree.
pub(crate) fn union_scope(a: &[Variable], b: &[Variable]) -> Result<Vec<Variable>> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) if x.id() == y.id() => {
                if x.cardinality() != y.cardinality() {
                    return Err(Error::CardinalityMismatch {
                        var: x.id(),
                        left: x.cardinality(),
                        right: y.cardinality(),
                    });
                }
                out.push(*x);
                i += 1;
                j += 1;
            }
            (Some(x), Some(y)) if x.id() < y.id() => {
                out.push(*x);
                i += 1;
            }
            (Some(_), Some(y)) => {
                out.push(*y);
                j += 1;
            }
            (Some(x), None) => {
                out.push(*x);
                i += 1;
            }
            (None, Some(y)) => {
                out.push(*y);
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    Ok(out)
}

/// Strides of `sub` variables laid out inside `outer` positions; zero where a
/// variable of `outer` is absent from `sub`.
fn embedded_strides(outer: &[Variable], sub: &DenseFactor) -> Vec<usize> {
    let s = strides(&sub.cardinalities());
    outer
        .iter()
        .map(|v| sub.position(v.id()).map_or(0, |p| s[p]))
        .collect()
}

/// Pointwise product over the union of both scopes.
pub fn multiply(f: &DenseFactor, g: &DenseFactor) -> Result<DenseFactor> {
    let scope = union_scope(&f.scope, &g.scope)?;
    let cards: Vec<usize> = scope.iter().map(Variable::cardinality).collect();
    let size = checked_product(cards.iter().copied())?;
    let fs = embedded_strides(&scope, f);
    let gs = embedded_strides(&scope, g);

    let mut table = Vec::with_capacity(size);
    let mut values = vec![0; scope.len()];
    loop {
        let (mut fi, mut gi) = (0, 0);
        for (p, &x) in values.iter().enumerate() {
            fi += x * fs[p];
            gi += x * gs[p];
        }
        table.push(f.table[fi] * g.table[gi]);
        if !advance(&mut values, &cards) {
            break;
        }
    }
    Ok(DenseFactor { scope, table })
}

/// Sums out every variable in `targets`.
pub fn sum_out(f: &DenseFactor, targets: &[VarId]) -> Result<DenseFactor> {
    for &t in targets {
        if f.position(t).is_none() {
            return Err(Error::UnknownVariable(t));
        }
    }
    let kept: Vec<Variable> = f
        .scope
        .iter()
        .filter(|v| !targets.contains(&v.id()))
        .copied()
        .collect();
    let kept_cards: Vec<usize> = kept.iter().map(Variable::cardinality).collect();
    let kept_strides = strides(&kept_cards);
    let out_strides: Vec<usize> = f
        .scope
        .iter()
        .map(|v| {
            kept.iter()
                .position(|k| k.id() == v.id())
                .map_or(0, |p| kept_strides[p])
        })
        .collect();

    let mut table = vec![0.0; kept_cards.iter().product()];
    let cards = f.cardinalities();
    let mut values = vec![0; f.scope.len()];
    for &p in &f.table {
        let oi: usize = values.iter().zip(&out_strides).map(|(x, s)| x * s).sum();
        table[oi] += p;
        advance(&mut values, &cards);
    }
    Ok(DenseFactor { scope: kept, table })
}
