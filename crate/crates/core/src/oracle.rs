//! Brute-force partition function by enumerating every joint assignment.

use crate::error::{Error, Result};
use crate::factor::{advance, Assignment, Variable};
use crate::graph::FactorGraph;

/// Default cap on the number of joint states [`joint_oracle`] enumerates.
pub const DEFAULT_ENUMERATION_LIMIT: u128 = 1 << 20;

/// Sum over all joint assignments of the product of all factor potentials.
pub fn joint_oracle(graph: &FactorGraph) -> Result<f64> {
    joint_oracle_with_limit(graph, DEFAULT_ENUMERATION_LIMIT)
}

pub fn joint_oracle_with_limit(graph: &FactorGraph, limit: u128) -> Result<f64> {
    let vars: Vec<Variable> = graph.variables().copied().collect();
    let size = vars.iter().try_fold(1u128, |acc, v| {
        acc.checked_mul(v.cardinality() as u128)
            .ok_or(Error::Overflow("joint state count"))
    })?;
    if size > limit {
        return Err(Error::TooLarge { size, limit });
    }
    if let Some(i) = graph.factors().iter().position(|f| !f.is_materialized()) {
        return Err(Error::NotMaterialized(i));
    }

    let cards: Vec<usize> = vars.iter().map(Variable::cardinality).collect();
    let mut values = vec![0; vars.len()];
    let mut z = 0.0;
    loop {
        let a = Assignment::from_scope(&vars, &values)?;
        let mut p = 1.0;
        for f in graph.factors() {
            p *= f.value(&a).expect("materialized")?;
        }
        z += p;
        if !advance(&mut values, &cards) {
            break;
        }
    }
    Ok(z)
}
