//! Property tests for the structural invariants of graphs and measures.

use proptest::prelude::*;

use ctrlrob_core::control::{max_matching_size, structural_nd};
use ctrlrob_core::graph::DirectedGraph;

/// Strategy: a valid directed graph with up to `max_n` nodes.
fn arb_graph(max_n: usize) -> impl Strategy<Value = DirectedGraph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|s| (0..n).filter(move |&d| d != s).map(move |d| (s, d)))
            .collect();
        proptest::sample::subsequence(pairs.clone(), 0..=pairs.len())
            .prop_map(move |arcs| DirectedGraph::unweighted(n, &arcs).unwrap())
    })
}

proptest! {
    #[test]
    fn degree_sums_equal_edge_count(g in arb_graph(12)) {
        let deg = g.degrees();
        let out_sum: usize = deg.iter().map(|d| d.outgoing).sum();
        let in_sum: usize = deg.iter().map(|d| d.incoming).sum();
        prop_assert_eq!(out_sum, g.edge_count());
        prop_assert_eq!(in_sum, g.edge_count());
    }

    #[test]
    fn remove_node_shrinks_by_one_and_never_adds_edges(g in arb_graph(12), idx in 0usize..12) {
        prop_assume!(g.node_count() >= 2);
        let v = idx % g.node_count();
        let removed = g.remove_node(v).unwrap();
        prop_assert_eq!(removed.node_count(), g.node_count() - 1);
        prop_assert!(removed.edge_count() <= g.edge_count());
        // every surviving edge maps back to an original edge
        let unmap = |id: u32| if (id as usize) >= v { id as usize + 1 } else { id as usize };
        for e in removed.edges() {
            prop_assert!(g.has_edge(unmap(e.src), unmap(e.dst)));
        }
    }

    #[test]
    fn matrix_roundtrips_the_edge_set(g in arb_graph(12)) {
        let m = g.to_matrix();
        prop_assert_eq!(m.nonzero_count(), g.edge_count());
        let n = g.node_count();
        let mut arcs = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if m.get(i, j) != 0.0 {
                    arcs.push((i, j, m.get(i, j)));
                }
            }
        }
        let rebuilt = DirectedGraph::from_edge_list(n, &arcs).unwrap();
        prop_assert_eq!(rebuilt, g);
    }

    #[test]
    fn driver_density_stays_in_range(g in arb_graph(12)) {
        let nd = structural_nd(&g);
        let n = g.node_count() as f64;
        prop_assert!(nd.density >= 1.0 / n - 1e-15);
        prop_assert!(nd.density <= 1.0 + 1e-15);
        prop_assert!(nd.count >= 1);
        prop_assert!(nd.count <= g.node_count());
    }

    #[test]
    fn matching_never_exceeds_node_count(g in arb_graph(12)) {
        let m = max_matching_size(&g);
        prop_assert!(m <= g.node_count());
        prop_assert!(m <= g.edge_count());
    }
}
