mod common;

use std::cmp::Ordering;

use proptest::prelude::*;

use kor_core::bucketbound::{bucket_index, low_bound};
use kor_core::label::{extend, initial_label, k_dominated, scale_value, Admission, Hop, Label, LabelStore, ScalingContext};
use kor_core::{
    all_pairs_best, kor_osscaling, InvertedIndex, KeywordMask, LazyTables, OsScalingOptions, PathKind, PathTables,
    QueryTerms,
};

use common::{dijkstra, instance, random_graph};

fn cases() -> ProptestConfig {
    ProptestConfig::with_cases(1000)
}

fn label(node: usize, mask: u32, scaled: u64, bs: u8, seq: u64) -> Label {
    Label {
        node,
        mask: KeywordMask::from_bits(mask),
        scaled,
        os: scaled as f64,
        bs: bs as f64,
        parent: None,
        hop: Hop::Edge,
        seq,
        alive: true,
    }
}

fn arb_label() -> impl Strategy<Value = Label> {
    (0usize..3, 0u32..8, 0u64..4, 0u8..4, 0u64..6).prop_map(|(n, m, s, b, q)| label(n, m, s, b, q))
}

proptest! {
    #![proptest_config(cases())]

    #[test]
    fn scaling_sandwich(o in 1e-6f64..1e6, theta in 1e-6f64..1e3) {
        let q = scale_value(o, theta) as f64;
        prop_assert!(theta * q <= o);
        prop_assert!(o < theta * (q + 1.0));
    }

    #[test]
    fn low_bound_never_drops_along_a_walk(seed in any::<u64>(), steps in proptest::collection::vec(any::<usize>(), 1..8)) {
        let (g, q) = instance(seed);
        let tables = all_pairs_best(&g);
        let index = InvertedIndex::build(&g);
        let terms = QueryTerms::new(&q, &g, &index).unwrap();
        let tau_t = tables.toward(PathKind::Tau, q.target);
        let mut cur = initial_label(&terms, q.source);
        for pick in steps {
            let out = g.out_edges(cur.node);
            if out.is_empty() {
                break;
            }
            let e = &out[pick % out.len()];
            let next = extend(&cur, 0, e, 1, &terms);
            prop_assert!(low_bound(&next, &tau_t) >= low_bound(&cur, &tau_t));
            cur = next;
        }
    }

    #[test]
    fn dominance_is_a_preorder(a in arb_label(), b in arb_label(), c in arb_label()) {
        prop_assert!(a.dominates(&a));
        if a.dominates(&b) && b.dominates(&c) {
            prop_assert!(a.dominates(&c));
        }
        if a.dominates(&b) && b.dominates(&a) {
            prop_assert_eq!((a.mask, a.scaled, a.bs), (b.mask, b.scaled, b.bs));
        }
    }

    #[test]
    fn supersedes_is_a_strict_partial_order(a in arb_label(), b in arb_label(), c in arb_label()) {
        prop_assert!(!a.supersedes(&a));
        if a.seq != b.seq {
            prop_assert!(!(a.supersedes(&b) && b.supersedes(&a)));
        }
        if a.supersedes(&b) && b.supersedes(&c) && a.seq != c.seq {
            prop_assert!(a.supersedes(&c));
        }
        if a.supersedes(&b) {
            prop_assert!(a.dominates(&b));
        }
    }

    #[test]
    fn label_order_is_strict_and_total(a in arb_label(), b in arb_label(), c in arb_label()) {
        prop_assert!(!a.precedes(&a));
        prop_assert_eq!(a.order(&b), b.order(&a).reverse());
        if a.precedes(&b) && b.precedes(&c) {
            prop_assert!(a.precedes(&c));
        }
        if (a.node, a.seq) != (b.node, b.seq) {
            prop_assert!(a.order(&b) != Ordering::Equal);
        }
        if a.mask.len() > b.mask.len() {
            prop_assert!(a.precedes(&b));
        }
    }

    #[test]
    fn k_dominated_matches_a_count(l in arb_label(), others in proptest::collection::vec(arb_label(), 0..8), k in 1usize..4) {
        let count = others.iter().filter(|o| o.supersedes(&l)).count();
        prop_assert_eq!(k_dominated(&l, &others, k), count >= k);
    }

    #[test]
    fn store_keeps_one_label_per_mask_and_level(labels in proptest::collection::vec(arb_label(), 1..40)) {
        // Distinct (mask, level) pairs bound the live count when k = 1.
        let mut store = LabelStore::new(3, 1);
        for l in labels {
            store.admit(l);
        }
        for node in 0..3 {
            let live: Vec<&Label> = store.live_at(node).collect();
            prop_assert!(live.len() <= 8 * 4);
            for a in &live {
                for b in &live {
                    prop_assert!(a.seq == b.seq || !a.supersedes(b));
                }
            }
        }
    }

    #[test]
    fn live_labels_stay_below_l_max(seed in any::<u64>()) {
        let (g, q) = instance(seed);
        let tables = all_pairs_best(&g);
        let index = InvertedIndex::build(&g);
        let opts = OsScalingOptions::default();
        if let Some(r) = kor_osscaling(&g, &tables, &index, &q, &opts).unwrap() {
            let ctx = ScalingContext::new(&g, q.budget_limit, q.keywords.len(), opts.epsilon).unwrap();
            prop_assert!(r.stats.max_live_per_node as u128 <= ctx.l_max());
        }
    }

    #[test]
    fn pruning_strategies_do_not_change_the_objective(seed in any::<u64>(), eps_pick in 0usize..3) {
        let (g, q) = instance(seed);
        let tables = all_pairs_best(&g);
        let index = InvertedIndex::build(&g);
        let epsilon = [0.1, 0.5, 0.9][eps_pick];
        let run = |s1: bool, s2: bool| {
            let opts = OsScalingOptions { epsilon, strategy1: s1, strategy2: s2, rare_fraction: 0.5 };
            kor_osscaling(&g, &tables, &index, &q, &opts).unwrap().map(|r| r.objective)
        };
        let plain = run(false, false);
        for (s1, s2) in [(true, false), (false, true), (true, true)] {
            prop_assert_eq!(run(s1, s2), plain, "strategy1={} strategy2={}", s1, s2);
        }
    }

    #[test]
    fn tables_match_dijkstra(seed in any::<u64>()) {
        let g = random_graph(seed, 9);
        let t = all_pairs_best(&g);
        for s in 0..g.node_count() {
            let obj = dijkstra(&g, s, |e| e.objective);
            let bud = dijkstra(&g, s, |e| e.budget);
            for v in 0..g.node_count() {
                prop_assert_eq!(t.os_tau(s, v), obj[v]);
                prop_assert_eq!(t.bs_sigma(s, v), bud[v]);
                if obj[v].is_finite() {
                    let p = t.reconstruct_path(PathKind::Tau, s, v).unwrap();
                    let sc = g.route_scores(&p).unwrap();
                    prop_assert_eq!((sc.objective, sc.budget), (t.os_tau(s, v), t.bs_tau(s, v)));
                    let p = t.reconstruct_path(PathKind::Sigma, s, v).unwrap();
                    let sc = g.route_scores(&p).unwrap();
                    prop_assert_eq!((sc.objective, sc.budget), (t.os_sigma(s, v), t.bs_sigma(s, v)));
                }
            }
        }
    }

    #[test]
    fn lazy_trees_agree_with_dense_tables(seed in any::<u64>()) {
        let g = random_graph(seed, 9);
        let dense = all_pairs_best(&g);
        let lazy = LazyTables::new(&g);
        for kind in [PathKind::Tau, PathKind::Sigma] {
            for a in 0..g.node_count() {
                let (dt, lt) = (dense.toward(kind, a), lazy.toward(kind, a));
                let (df, lf) = (dense.from(kind, a, f64::INFINITY), lazy.from(kind, a, f64::INFINITY));
                for v in 0..g.node_count() {
                    prop_assert_eq!(dt.scores(v), lt.scores(v));
                    prop_assert_eq!(df.scores(v), lf.scores(v));
                }
            }
        }
    }

    #[test]
    fn bucket_index_matches_a_linear_scan(low in 0.01f64..1e4, x in 0.01f64..100.0, beta in 1.01f64..3.0) {
        let mut r = 0u32;
        while beta.powi(r as i32 + 1) * x <= low {
            r += 1;
        }
        prop_assert_eq!(bucket_index(low, x, beta), r);
    }
}

#[test]
fn admitted_labels_are_never_superseded_by_a_live_one() {
    let mut store = LabelStore::new(1, 2);
    let a = store.admit(label(0, 1, 2, 2, 0));
    let b = store.admit(label(0, 1, 1, 1, 0));
    let c = store.admit(label(0, 1, 0, 0, 0));
    assert!(matches!(a, Admission::Admitted { .. }));
    assert!(matches!(b, Admission::Admitted { purged: 0, .. }));
    assert!(matches!(c, Admission::Admitted { purged: 1, .. }));
    assert_eq!(store.live_count(0), 2);
}
