mod common;

use common::{mixed_graph, random_compact, rel_close, tables_close, test_rng, var_pool};
use proptest::prelude::*;
use symve::format::{parse_model, print_model, Validation};
use symve::search::{CostModel, Environment};
use symve::symmetry::{
    check_symmetric, compact_domain_size, compact_multiply, compact_sum_out, decode,
    detect_symmetries, hist_rank, hist_unrank, propagate_multiply, Histogram,
};
use symve::{
    joint_oracle, multiply, run_elimination, sum_out, DenseFactor, Mode, TotalsConvention, VarId,
    Variable,
};

fn shuffled(n: usize) -> impl Strategy<Value = Vec<VarId>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

fn graph_and_orders() -> impl Strategy<Value = (usize, u64, Vec<VarId>, Vec<VarId>)> {
    (2usize..=7, any::<u64>())
        .prop_flat_map(|(n, seed)| (Just(n), Just(seed), shuffled(n), shuffled(n)))
}

fn boolean_table(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..2.0, 1 << n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partition_function_is_order_invariant((n, seed, o1, o2) in graph_and_orders()) {
        let g = mixed_graph(n, seed);
        let z1 = run_elimination(&g, &o1, Mode::Dense).unwrap().0.unwrap();
        let z2 = run_elimination(&g, &o2, Mode::Dense).unwrap().0.unwrap();
        let z3 = run_elimination(&g, &o2, Mode::Compact).unwrap().0.unwrap();
        prop_assert!(rel_close(z1, z2, 1e-9), "{} vs {}", z1, z2);
        prop_assert!(rel_close(z1, z3, 1e-9), "{} vs {}", z1, z3);
        prop_assert!(rel_close(z1, joint_oracle(&g).unwrap(), 1e-9));
    }

    #[test]
    fn sum_out_distributes_over_factors_without_the_variable(
        a in boolean_table(3),
        b in boolean_table(3),
    ) {
        // a over {0,1,2}, b over {2,3,4}; variable 0 is not in b
        let vars = |ids: [usize; 3]| ids.iter().map(|&i| Variable::boolean(i)).collect::<Vec<_>>();
        let fa = DenseFactor::new(vars([0, 1, 2]), a).unwrap();
        let fb = DenseFactor::new(vars([2, 3, 4]), b).unwrap();
        let lhs = sum_out(&multiply(&fa, &fb).unwrap(), &[0]).unwrap();
        let rhs = multiply(&sum_out(&fa, &[0]).unwrap(), &fb).unwrap();
        prop_assert_eq!(lhs.scope(), rhs.scope());
        prop_assert!(tables_close(lhs.table(), rhs.table(), 1e-12));
    }

    #[test]
    fn multiply_commutes(a in boolean_table(3), b in boolean_table(2)) {
        let fa = DenseFactor::new(vec![Variable::boolean(1), Variable::boolean(4), Variable::boolean(2)], a).unwrap();
        let fb = DenseFactor::new(vec![Variable::boolean(4), Variable::boolean(0)], b).unwrap();
        prop_assert_eq!(multiply(&fa, &fb).unwrap(), multiply(&fb, &fa).unwrap());
    }

    #[test]
    fn compact_sum_out_matches_dense(seed in any::<u64>()) {
        let mut rng = test_rng(seed);
        let pool = var_pool(&mut rng, 6);
        let c = random_compact(&mut rng, &pool, 5);
        for v in c.scope() {
            let reduced = compact_sum_out(&c, v.id()).unwrap();
            let dense = sum_out(&decode(&c), &[v.id()]).unwrap();
            prop_assert_eq!(&decode(&reduced), &dense);
            prop_assert!(reduced.partition().is_refinement_of(&detect_symmetries(&dense)));
        }
    }

    #[test]
    fn compact_multiply_matches_dense(seed in any::<u64>()) {
        let mut rng = test_rng(seed);
        let pool = var_pool(&mut rng, 6);
        let c1 = random_compact(&mut rng, &pool, 4);
        let c2 = random_compact(&mut rng, &pool, 4);
        let product = compact_multiply(&c1, &c2).unwrap();
        let dense = multiply(&decode(&c1), &decode(&c2)).unwrap();
        prop_assert!(tables_close(decode(&product).table(), dense.table(), 1e-12));
        let propagated = propagate_multiply(&c1.scope(), &c1.partition(), &c2.scope(), &c2.partition());
        prop_assert_eq!(&propagated, &product.partition());
        prop_assert!(check_symmetric(&dense, &propagated).is_ok());
        prop_assert!(propagated.is_refinement_of(&detect_symmetries(&dense)));
    }

    #[test]
    fn compact_cost_never_exceeds_dense((n, seed, order, _) in graph_and_orders()) {
        let g = mixed_graph(n, seed);
        let (_, ledger) = run_elimination(&g, &order, Mode::CostOnly).unwrap();
        for s in &ledger.steps {
            prop_assert!(s.compact_cost <= s.dense_cost);
        }
    }

    #[test]
    fn cost_only_matches_materialized_modes((n, seed, order, _) in graph_and_orders()) {
        let g = mixed_graph(n, seed);
        let costs = |mode| {
            let (_, ledger) = run_elimination(&g, &order, mode).unwrap();
            ledger.steps.iter().map(|s| (s.dense_cost, s.compact_cost)).collect::<Vec<_>>()
        };
        let shape = costs(Mode::CostOnly);
        prop_assert_eq!(&shape, &costs(Mode::Dense));
        prop_assert_eq!(&shape, &costs(Mode::Compact));
    }

    #[test]
    fn environment_costs_add_up_to_ledger((n, seed, order, _) in graph_and_orders()) {
        let g = mixed_graph(n, seed);
        let (_, ledger) = run_elimination(&g, &order, Mode::CostOnly).unwrap();
        for (model, compact) in [(CostModel::Dense, false), (CostModel::Compact, true)] {
            let mut env = Environment::new(&g, model);
            let mut sum = 0;
            for &v in &order {
                sum += env.step(v).unwrap();
            }
            prop_assert!(env.done());
            prop_assert_eq!(sum, ledger.total(compact, TotalsConvention::Full));
            prop_assert_eq!(env.total(TotalsConvention::Paper), ledger.total(compact, TotalsConvention::Paper));
        }
    }

    #[test]
    fn printed_models_parse_back(n in 1usize..=6, seed in any::<u64>()) {
        let g = mixed_graph(n, seed);
        let text = print_model(&g).unwrap();
        let back = parse_model(&text, Validation::Strict).unwrap().graph;
        prop_assert_eq!(print_model(&back).unwrap(), text);
        prop_assert_eq!(joint_oracle(&back).unwrap(), joint_oracle(&g).unwrap());
    }
}

#[test]
fn histogram_rank_is_a_bijection() {
    for n in 0..=8 {
        for d in 1..=5 {
            let size = compact_domain_size(n, d).unwrap() as usize;
            let mut previous: Option<Histogram> = None;
            for r in 0..size {
                let h = hist_unrank(r, n, d).unwrap();
                assert_eq!(h.group_size(), n);
                assert_eq!(hist_rank(&h), r);
                if let Some(p) = previous {
                    assert!(p.counts() < h.counts(), "rank order is lexicographic");
                }
                previous = Some(h);
            }
            assert!(hist_unrank(size, n, d).is_err());
        }
    }
}
