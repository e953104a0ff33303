//! Driver-node counting for structural and state controllability.
//!
//! Structural controllability follows the minimum-inputs theorem: the
//! number of driver nodes is `max(1, N - |E*|)` where `|E*|` is the size
//! of a maximum matching of the directed network (a set of edges sharing
//! no common start nodes and no common end nodes). State controllability
//! uses the rank shortcut `max(1, N - rank(A))`.
//!
//! The matching runs once per removal step of a simulated attack, i.e.
//! `N-1` times per curve, so it is implemented as Hopcroft-Karp with
//! `O(E * sqrt(V))` worst case.

use crate::graph::{AdjacencyMatrix, DirectedGraph};
use crate::{CoreError, Result};

/// Default relative tolerance for the numerical rank. Weighted entries
/// are O(1) uniform draws, so relative thresholding is stable.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Which controllability notion a measurement uses.
///
/// Structural ignores edge weights entirely; state controllability
/// computes a numerical matrix rank under the given relative tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ControllabilityKind {
    Structural,
    State { rank_tol: f64 },
}

impl ControllabilityKind {
    pub fn state_default() -> Self {
        Self::State {
            rank_tol: DEFAULT_RANK_TOL,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Structural => "structural",
            Self::State { .. } => "state",
        }
    }
}

impl std::fmt::Display for ControllabilityKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Number of driver nodes and its density `count / N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriverCount {
    pub count: usize,
    pub density: f64,
}

const NONE: u32 = u32::MAX;

/// Size of a maximum matching of the directed graph: the largest edge set
/// sharing no common start nodes and no common end nodes.
///
/// Computed on the bipartite split (out-copy of every node on the left,
/// in-copy on the right, one bipartite edge per arc) with Hopcroft-Karp.
pub fn max_matching_size(g: &DirectedGraph) -> usize {
    if g.edge_count() == 0 {
        return 0;
    }
    let n = g.node_count();
    let (offsets, targets) = g.csr_out();

    let mut match_left = vec![NONE; n];
    let mut match_right = vec![NONE; n];
    let mut dist = vec![NONE; n];
    let mut queue = std::collections::VecDeque::new();
    let mut matched = 0usize;

    loop {
        // BFS phase: layer the left vertices starting from the free ones.
        queue.clear();
        for u in 0..n {
            if match_left[u] == NONE {
                dist[u] = 0;
                queue.push_back(u as u32);
            } else {
                dist[u] = NONE;
            }
        }
        let mut reachable_free_right = false;
        while let Some(u) = queue.pop_front() {
            let u = u as usize;
            for &v in &targets[offsets[u] as usize..offsets[u + 1] as usize] {
                let w = match_right[v as usize];
                if w == NONE {
                    reachable_free_right = true;
                } else if dist[w as usize] == NONE {
                    dist[w as usize] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !reachable_free_right {
            break;
        }
        // DFS phase: vertex-disjoint shortest augmenting paths.
        for u in 0..n {
            if match_left[u] == NONE
                && augment(u, &offsets, &targets, &mut match_left, &mut match_right, &mut dist)
            {
                matched += 1;
            }
        }
    }
    matched
}

fn augment(
    u: usize,
    offsets: &[u32],
    targets: &[u32],
    match_left: &mut [u32],
    match_right: &mut [u32],
    dist: &mut [u32],
) -> bool {
    let d = std::mem::replace(&mut dist[u], NONE);
    for &v in &targets[offsets[u] as usize..offsets[u + 1] as usize] {
        let w = match_right[v as usize];
        let extends = if w == NONE {
            true
        } else {
            dist[w as usize] == d.wrapping_add(1)
                && augment(w as usize, offsets, targets, match_left, match_right, dist)
        };
        if extends {
            match_left[u] = v;
            match_right[v as usize] = u as u32;
            return true;
        }
    }
    false
}

/// Structural driver-node count `max(1, N - |E*|)` with density over the
/// current node count.
pub fn structural_nd(g: &DirectedGraph) -> DriverCount {
    let n = g.node_count();
    let count = (n - max_matching_size(g)).max(1);
    DriverCount {
        count,
        density: count as f64 / n as f64,
    }
}

/// Numerical rank: the number of pivots whose magnitude exceeds
/// `tol` times the largest initial pivot, under complete-pivot Gaussian
/// elimination.
pub fn numerical_rank(m: &AdjacencyMatrix, tol: f64) -> Result<usize> {
    if !(tol > 0.0) {
        return Err(CoreError::InvalidTolerance { tol });
    }
    let n = m.n();
    for i in 0..n {
        for (j, &v) in m.row(i).iter().enumerate() {
            if !v.is_finite() {
                return Err(CoreError::NonFiniteEntry { row: i, col: j });
            }
        }
    }
    let mut a = m.values().to_vec();
    let at = |a: &[f64], i: usize, j: usize| a[i * n + j];

    // Largest initial magnitude is also the first complete pivot.
    let largest = a.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()));
    if largest == 0.0 {
        return Ok(0);
    }
    let threshold = tol * largest;

    let mut rank = 0;
    for k in 0..n {
        // complete pivoting over the remaining submatrix
        let (mut pi, mut pj, mut pv) = (k, k, 0.0f64);
        for i in k..n {
            for j in k..n {
                let v = at(&a, i, j).abs();
                if v > pv {
                    (pi, pj, pv) = (i, j, v);
                }
            }
        }
        if pv <= threshold {
            break;
        }
        if pi != k {
            for j in 0..n {
                a.swap(pi * n + j, k * n + j);
            }
        }
        if pj != k {
            for i in 0..n {
                a.swap(i * n + pj, i * n + k);
            }
        }
        let pivot = at(&a, k, k);
        for i in k + 1..n {
            let f = at(&a, i, k) / pivot;
            if f == 0.0 {
                continue;
            }
            for j in k..n {
                a[i * n + j] -= f * a[k * n + j];
            }
        }
        rank += 1;
    }
    Ok(rank)
}

/// State-controllability driver count `max(1, N - rank(A))`.
pub fn state_nd(m: &AdjacencyMatrix, tol: f64) -> Result<DriverCount> {
    let n = m.n();
    let count = (n - numerical_rank(m, tol)?).max(1);
    Ok(DriverCount {
        count,
        density: count as f64 / n as f64,
    })
}

/// Driver count under either controllability notion.
pub fn driver_count(g: &DirectedGraph, kind: ControllabilityKind) -> Result<DriverCount> {
    match kind {
        ControllabilityKind::Structural => Ok(structural_nd(g)),
        ControllabilityKind::State { rank_tol } => state_nd(&g.to_matrix(), rank_tol),
    }
}

/// True iff `M / (N * (N - 1) / 2) <= 0.05`.
///
/// The denominator is used verbatim even though a directed graph admits
/// `N * (N - 1)` distinct arcs; the check is advisory only and feeds no
/// other computation. Graphs with fewer than two nodes are reported
/// sparse vacuously.
pub fn sparsity_check(g: &DirectedGraph) -> bool {
    let n = g.node_count();
    if n < 2 {
        return true;
    }
    let m_max = n as f64 * (n as f64 - 1.0) / 2.0;
    g.edge_count() as f64 / m_max <= 0.05
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::DirectedGraph;
    use test_oracles::brute_force_max_matching;

    fn chain(n: usize) -> DirectedGraph {
        let arcs: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        DirectedGraph::unweighted(n, &arcs).unwrap()
    }

    #[test]
    fn chain_matching_uses_every_edge() {
        for n in 2..8 {
            assert_eq!(max_matching_size(&chain(n)), n - 1);
        }
    }

    #[test]
    fn out_star_matches_brute_force() {
        let arcs = [(0, 1), (0, 2), (0, 3)];
        let g = DirectedGraph::unweighted(4, &arcs).unwrap();
        let expected = brute_force_max_matching(4, &arcs);
        assert_eq!(expected, 1);
        assert_eq!(max_matching_size(&g), expected);
        assert_eq!(structural_nd(&g).count, 3);
    }

    #[test]
    fn empty_graph_has_no_matching() {
        let g = DirectedGraph::unweighted(5, &[]).unwrap();
        assert_eq!(max_matching_size(&g), 0);
        let nd = structural_nd(&g);
        assert_eq!(nd.count, 5);
        assert_eq!(nd.density, 1.0);
    }

    #[test]
    fn perfect_matching_means_one_driver() {
        // 3-cycle: every node matched once as start and once as end.
        let g = DirectedGraph::unweighted(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(max_matching_size(&g), 3);
        let nd = structural_nd(&g);
        assert_eq!(nd.count, 1);
        assert_eq!(nd.density, 1.0 / 3.0);
    }

    #[test]
    fn matching_agrees_with_brute_force_on_random_small_graphs() {
        use rand::Rng;
        let mut rng = crate::rng::from_seed(2024);
        for _ in 0..300 {
            let n = rng.random_range(1..=6usize);
            let mut arcs = Vec::new();
            for s in 0..n {
                for d in 0..n {
                    if s != d && rng.random::<f64>() < 0.4 {
                        arcs.push((s, d));
                    }
                }
            }
            let g = DirectedGraph::unweighted(n, &arcs).unwrap();
            assert_eq!(
                max_matching_size(&g),
                brute_force_max_matching(n, &arcs),
                "mismatch on n={n} arcs={arcs:?}"
            );
        }
    }

    #[test]
    fn structural_nd_ignores_weights() {
        let arcs = [(0usize, 1usize), (1, 2), (3, 1)];
        let unweighted = DirectedGraph::unweighted(4, &arcs).unwrap();
        let weighted = DirectedGraph::from_edge_list(
            4,
            &[(0, 1, 0.2), (1, 2, 0.9), (3, 1, 0.51)],
        )
        .unwrap();
        assert_eq!(structural_nd(&unweighted), structural_nd(&weighted));
    }

    #[test]
    fn adding_an_edge_never_shrinks_the_matching() {
        use rand::Rng;
        let mut rng = crate::rng::from_seed(77);
        for _ in 0..100 {
            let n = rng.random_range(2..=6usize);
            let mut arcs = Vec::new();
            for s in 0..n {
                for d in 0..n {
                    if s != d && rng.random::<f64>() < 0.3 {
                        arcs.push((s, d));
                    }
                }
            }
            let g = DirectedGraph::unweighted(n, &arcs).unwrap();
            let before = max_matching_size(&g);
            let nd_before = structural_nd(&g).count;
            // first absent arc, if any
            'outer: for s in 0..n {
                for d in 0..n {
                    if s != d && !g.has_edge(s, d) {
                        let mut more = arcs.clone();
                        more.push((s, d));
                        let g2 = DirectedGraph::unweighted(n, &more).unwrap();
                        assert!(max_matching_size(&g2) >= before);
                        assert!(structural_nd(&g2).count <= nd_before);
                        break 'outer;
                    }
                }
            }
        }
    }

    #[test]
    fn rank_of_zero_matrix_is_zero() {
        let m = AdjacencyMatrix::zero(3);
        assert_eq!(numerical_rank(&m, 1e-10).unwrap(), 0);
        let nd = state_nd(&m, 1e-10).unwrap();
        assert_eq!(nd.count, 3);
        assert_eq!(nd.density, 1.0);
    }

    #[test]
    fn permutation_structure_has_full_rank() {
        // matrix of the 4-cycle 0->1->2->3->0
        let g = DirectedGraph::unweighted(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let m = g.to_matrix();
        assert_eq!(numerical_rank(&m, 1e-10).unwrap(), 4);
        assert_eq!(state_nd(&m, 1e-10).unwrap().count, 1);
    }

    #[test]
    fn rank_two_three_by_three_gives_one_driver() {
        // rows 1 and 2 proportional: rank 2
        let m = AdjacencyMatrix::from_values(
            3,
            vec![0.0, 0.5, 0.25, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0],
        )
        .unwrap();
        assert_eq!(numerical_rank(&m, 1e-10).unwrap(), 2);
        assert_eq!(state_nd(&m, 1e-10).unwrap().count, 1);
    }

    #[test]
    fn rank_matches_exact_rational_oracle_on_dyadic_matrices() {
        use rand::Rng;
        let mut rng = crate::rng::from_seed(99);
        for _ in 0..100 {
            let n = rng.random_range(1..=8usize);
            let mut ints = vec![0i128; n * n];
            for i in 0..n {
                for j in 0..n {
                    if i != j && rng.random::<f64>() < 0.5 {
                        ints[i * n + j] = rng.random_range(1..=15);
                    }
                }
            }
            // occasionally force a dependent row to exercise deficiency
            if n >= 2 && rng.random::<f64>() < 0.5 {
                let (a, b) = (0, n - 1);
                for j in 0..n {
                    ints[b * n + j] = if j == a || j == b { 0 } else { ints[a * n + j] };
                }
            }
            let values: Vec<f64> = ints.iter().map(|&v| v as f64 / 16.0).collect();
            let m = AdjacencyMatrix::from_values(n, values).unwrap();
            assert_eq!(
                numerical_rank(&m, 1e-10).unwrap(),
                test_oracles::exact_integer_rank(n, &ints),
                "rank mismatch on {ints:?}"
            );
        }
    }

    #[test]
    fn rank_matches_exact_oracle_on_binary_matrices() {
        use rand::Rng;
        let mut rng = crate::rng::from_seed(4242);
        for _ in 0..100 {
            let n = rng.random_range(1..=8usize);
            let mut ints = vec![0i128; n * n];
            for i in 0..n {
                for j in 0..n {
                    if i != j && rng.random::<f64>() < 0.35 {
                        ints[i * n + j] = 1;
                    }
                }
            }
            let values: Vec<f64> = ints.iter().map(|&v| v as f64).collect();
            let m = AdjacencyMatrix::from_values(n, values).unwrap();
            assert_eq!(
                numerical_rank(&m, 1e-10).unwrap(),
                test_oracles::exact_integer_rank(n, &ints)
            );
        }
    }

    #[test]
    fn rank_rejects_bad_tolerance() {
        let m = AdjacencyMatrix::zero(2);
        assert!(matches!(
            numerical_rank(&m, 0.0).unwrap_err(),
            CoreError::InvalidTolerance { .. }
        ));
    }

    #[test]
    fn sparsity_thresholds() {
        // ratio 5000 / 499500 ~ 0.01
        let g = DirectedGraph::unweighted(1000, &[]).unwrap();
        assert!(sparsity_check(&g));
        let sparse_m = 5000;
        let arcs: Vec<(usize, usize)> = (0..sparse_m)
            .map(|i| {
                let s = i % 1000;
                (s, (s + 1 + i / 1000) % 1000)
            })
            .collect();
        let g = DirectedGraph::unweighted(1000, &arcs).unwrap();
        assert_eq!(g.edge_count(), 5000);
        assert!(sparsity_check(&g));

        // N=10, M=20: ratio ~ 0.44
        let arcs: Vec<(usize, usize)> = (0..20)
            .map(|i| {
                let s = i % 10;
                (s, (s + 1 + i / 10) % 10)
            })
            .collect();
        let g = DirectedGraph::unweighted(10, &arcs).unwrap();
        assert!(!sparsity_check(&g));
    }
}
