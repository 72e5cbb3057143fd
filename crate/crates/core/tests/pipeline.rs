mod common;

use std::sync::Arc;

use common::{distinct_pairs, Closure};
use oreach::graph::{parse_graph, scc_condense, write_edge_list, write_gra, GraphFormat};
use oreach::index::{CondensedIndex, FallbackKind, ObservationStats};
use oreach::{DiGraph, Params, ReachIndex};
use proptest::prelude::*;

fn arb_digraph() -> impl Strategy<Value = DiGraph> {
    (1usize..40).prop_flat_map(|n| {
        proptest::collection::vec((0..n as u32, 0..n as u32), 0..3 * n)
            .prop_map(move |e| DiGraph::new(n, e))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn text_to_answers(g in arb_digraph(), seed in any::<u64>(), gra in any::<bool>()) {
        let mut text = Vec::new();
        let format = if gra { GraphFormat::Gra } else { GraphFormat::EdgeList };
        match format {
            GraphFormat::Gra => write_gra(&g, &mut text).unwrap(),
            GraphFormat::EdgeList => write_edge_list(&g, &mut text).unwrap(),
        }
        let parsed = parse_graph(&text[..], format).unwrap();
        prop_assert!(parsed.graph.edges().eq(g.edges()));

        let params = Params { t: 3, k: 4, seed, ..Params::default() };
        let cond = scc_condense(&parsed.graph);
        let built = oreach::build_index(Arc::new(cond.dag.clone()), params).unwrap();
        let loaded = ReachIndex::from_bytes(&built.to_bytes(), cond.dag).unwrap();
        let ix = CondensedIndex::from_parts(cond.scc_of, loaded);

        let closure = Closure::warshall(&g);
        let mut fb = FallbackKind::PrunedBiBfs.build(ix.index().n());
        let mut stats = ObservationStats::with_overlap();
        for (s, t) in distinct_pairs(g.n()) {
            let out = ix.query(s, t, fb.as_mut(), &mut stats);
            prop_assert_eq!(out.answer, closure.reaches(s, t), "({}, {})", s, t);
        }
        let n = g.n() as u64;
        prop_assert_eq!(stats.queries(), n * (n - 1));
        prop_assert_eq!(stats.positive_answers(), closure.positive_pairs());
        prop_assert_eq!(stats.answered_by_observation() + stats.fallback_count(), stats.queries());
    }
}
