#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use rand::Rng as _;
use symve::bench::{
    generate_mixed_fg, random_partition, random_symmetric_factor, MixedGraphConfig,
};
use symve::rng::{self, Rng};
use symve::symmetry::{CompactFactor, SymmetryPartition};
use symve::{FactorGraph, VarId, Variable};

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

pub fn tables_close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(&x, &y)| rel_close(x, y, tol))
}

pub fn model_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("models")
        .join(name)
}

/// Small Boolean graph mixing dense and symmetric factors.
pub fn mixed_graph(num_vars: usize, seed: u64) -> FactorGraph {
    let cfg = MixedGraphConfig {
        num_vars,
        num_factors: num_vars.max(2) - 1,
        arity: (1, num_vars.min(4)),
        cardinality: 2,
        symmetric_fraction: 0.5,
    };
    generate_mixed_fg(&cfg, seed).expect("valid generator config")
}

/// Random compact factor over a random sub-scope of `pool`.
pub fn random_compact(rng: &mut Rng, pool: &[Variable], max_arity: usize) -> CompactFactor {
    let k = rng.random_range(1..=max_arity.min(pool.len()));
    let mut ids: Vec<usize> = (0..pool.len()).collect();
    for i in 0..k {
        let j = rng.random_range(i..ids.len());
        ids.swap(i, j);
    }
    let mut scope: Vec<Variable> = ids[..k].iter().map(|&i| pool[i]).collect();
    scope.sort_by_key(Variable::id);
    let ids: Vec<VarId> = scope.iter().map(Variable::id).collect();
    // groups may only join variables of equal cardinality
    let card = |v: VarId| scope.iter().find(|x| x.id() == v).unwrap().cardinality();
    let groups = random_partition(rng, &ids)
        .groups()
        .iter()
        .flat_map(|g| {
            let mut by_card: BTreeMap<usize, Vec<VarId>> = BTreeMap::new();
            for &v in g {
                by_card.entry(card(v)).or_default().push(v);
            }
            by_card.into_values()
        })
        .collect();
    let partition = SymmetryPartition::new(groups).unwrap();
    random_symmetric_factor(rng, &scope, &partition).unwrap()
}

/// Variable pool with cardinalities 2 and 3.
pub fn var_pool(rng: &mut Rng, n: usize) -> Vec<Variable> {
    (0..n)
        .map(|id| Variable::new(id, rng.random_range(2..=3)).unwrap())
        .collect()
}

pub fn test_rng(seed: u64) -> Rng {
    rng::stream(seed, 0x7465_7374)
}
