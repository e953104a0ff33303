//! Directed graphs with dense node ids and value semantics.
//!
//! Graphs are immutable once built; node removal returns a new graph with
//! the surviving ids compacted to `0..n-1` in their original relative
//! order. That keeps adjacency matrices dense and trivially indexable at
//! every step of an attack sequence, and lets simulation keep the
//! pre-attack graph around for dataset labeling.

use std::fmt::Write as _;
use std::path::Path;

use crate::{CoreError, Result};

/// A directed edge `src -> dst` with weight in `(0, 1]`.
///
/// Unweighted graphs store weight `1.0` exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub src: u32,
    pub dst: u32,
    pub weight: f64,
}

/// In/out degree of a single node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Degree {
    pub incoming: usize,
    pub outgoing: usize,
}

impl Degree {
    pub fn total(&self) -> usize {
        self.incoming + self.outgoing
    }
}

/// Immutable directed graph: no self-loops, no duplicate arcs, weights in
/// `(0, 1]`. Edges are kept sorted by `(src, dst)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectedGraph {
    n: usize,
    edges: Vec<Edge>,
}

impl DirectedGraph {
    /// Build a graph from an edge list, rejecting self-loops, duplicate
    /// arcs, out-of-range endpoints, and weights outside `(0, 1]`.
    pub fn from_edge_list(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        if n == 0 {
            return Err(CoreError::InvalidNodeCount { n });
        }
        let mut out = Vec::with_capacity(edges.len());
        for &(src, dst, weight) in edges {
            if src >= n {
                return Err(CoreError::NodeOutOfRange { index: src, n });
            }
            if dst >= n {
                return Err(CoreError::NodeOutOfRange { index: dst, n });
            }
            if src == dst {
                return Err(CoreError::SelfLoop { node: src });
            }
            if !(weight > 0.0 && weight <= 1.0) {
                return Err(CoreError::InvalidWeight { weight });
            }
            out.push(Edge {
                src: src as u32,
                dst: dst as u32,
                weight,
            });
        }
        out.sort_unstable_by_key(|e| (e.src, e.dst));
        for pair in out.windows(2) {
            if pair[0].src == pair[1].src && pair[0].dst == pair[1].dst {
                return Err(CoreError::DuplicateEdge {
                    src: pair[0].src as usize,
                    dst: pair[0].dst as usize,
                });
            }
        }
        Ok(Self { n, edges: out })
    }

    /// Unweighted convenience constructor; every arc gets weight `1.0`.
    pub fn unweighted(n: usize, arcs: &[(usize, usize)]) -> Result<Self> {
        let weighted: Vec<(usize, usize, f64)> =
            arcs.iter().map(|&(s, d)| (s, d, 1.0)).collect();
        Self::from_edge_list(n, &weighted)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges sorted by `(src, dst)`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn has_edge(&self, src: usize, dst: usize) -> bool {
        self.edges
            .binary_search_by_key(&(src as u32, dst as u32), |e| (e.src, e.dst))
            .is_ok()
    }

    /// True if any edge weight differs from `1.0`.
    pub fn is_weighted(&self) -> bool {
        self.edges.iter().any(|e| e.weight != 1.0)
    }

    /// Dense adjacency matrix; entry `(i, j)` is the weight of `i -> j`
    /// or `0`.
    pub fn to_matrix(&self) -> AdjacencyMatrix {
        let mut values = vec![0.0; self.n * self.n];
        for e in &self.edges {
            values[e.src as usize * self.n + e.dst as usize] = e.weight;
        }
        AdjacencyMatrix {
            n: self.n,
            values,
        }
    }

    /// Remove node `v` and every incident edge. Surviving ids above `v`
    /// shift down by one, preserving relative order.
    pub fn remove_node(&self, v: usize) -> Result<Self> {
        if v >= self.n {
            return Err(CoreError::NodeOutOfRange { index: v, n: self.n });
        }
        if self.n == 1 {
            return Err(CoreError::LastNode);
        }
        let v = v as u32;
        let relabel = |id: u32| if id > v { id - 1 } else { id };
        let edges = self
            .edges
            .iter()
            .filter(|e| e.src != v && e.dst != v)
            .map(|e| Edge {
                src: relabel(e.src),
                dst: relabel(e.dst),
                weight: e.weight,
            })
            .collect();
        Ok(Self {
            n: self.n - 1,
            edges,
        })
    }

    /// Per-node in/out degrees.
    pub fn degrees(&self) -> Vec<Degree> {
        let mut deg = vec![Degree::default(); self.n];
        for e in &self.edges {
            deg[e.src as usize].outgoing += 1;
            deg[e.dst as usize].incoming += 1;
        }
        deg
    }

    /// Out-adjacency in CSR form: `(offsets, targets)` with
    /// `targets[offsets[v]..offsets[v+1]]` the successors of `v`.
    pub(crate) fn csr_out(&self) -> (Vec<u32>, Vec<u32>) {
        let mut offsets = vec![0u32; self.n + 1];
        for e in &self.edges {
            offsets[e.src as usize + 1] += 1;
        }
        for i in 0..self.n {
            offsets[i + 1] += offsets[i];
        }
        // edges are sorted by (src, dst), so a single pass fills in order
        let targets = self.edges.iter().map(|e| e.dst).collect();
        (offsets, targets)
    }

    /// Serialize as edge-list text: first line `N M`, then one line per
    /// edge. The weight column is omitted when the graph is unweighted.
    pub fn to_edge_list_text(&self) -> String {
        let weighted = self.is_weighted();
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.n, self.edges.len());
        for e in &self.edges {
            if weighted {
                let _ = writeln!(out, "{} {} {}", e.src, e.dst, e.weight);
            } else {
                let _ = writeln!(out, "{} {}", e.src, e.dst);
            }
        }
        out
    }

    /// Parse the edge-list text format produced by
    /// [`to_edge_list_text`](Self::to_edge_list_text).
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (line_no, header) = lines.next().ok_or_else(|| CoreError::ParseEdgeList {
            line: 1,
            detail: "empty input".into(),
        })?;
        let mut fields = header.split_whitespace();
        let parse_usize = |s: Option<&str>, line: usize, what: &str| -> Result<usize> {
            s.ok_or_else(|| CoreError::ParseEdgeList {
                line,
                detail: format!("missing {what}"),
            })?
            .parse()
            .map_err(|e| CoreError::ParseEdgeList {
                line,
                detail: format!("bad {what}: {e}"),
            })
        };
        let n = parse_usize(fields.next(), line_no + 1, "node count")?;
        let m = parse_usize(fields.next(), line_no + 1, "edge count")?;
        if fields.next().is_some() {
            return Err(CoreError::ParseEdgeList {
                line: line_no + 1,
                detail: "header must be exactly `N M`".into(),
            });
        }

        let mut edges = Vec::with_capacity(m);
        let mut columns: Option<usize> = None;
        for (line_no, line) in lines {
            let fields: Vec<&str> = line.split_whitespace().collect();
            let cols = fields.len();
            if cols != 2 && cols != 3 {
                return Err(CoreError::ParseEdgeList {
                    line: line_no + 1,
                    detail: format!("expected 2 or 3 columns, found {cols}"),
                });
            }
            match columns {
                None => columns = Some(cols),
                Some(c) if c != cols => {
                    return Err(CoreError::ParseEdgeList {
                        line: line_no + 1,
                        detail: "mixed weighted and unweighted rows".into(),
                    })
                }
                _ => {}
            }
            let src = parse_usize(Some(fields[0]), line_no + 1, "src")?;
            let dst = parse_usize(Some(fields[1]), line_no + 1, "dst")?;
            let weight = if cols == 3 {
                fields[2].parse().map_err(|e| CoreError::ParseEdgeList {
                    line: line_no + 1,
                    detail: format!("bad weight: {e}"),
                })?
            } else {
                1.0
            };
            edges.push((src, dst, weight));
        }
        if edges.len() != m {
            return Err(CoreError::ParseEdgeList {
                line: 1,
                detail: format!("header declares {m} edges, found {}", edges.len()),
            });
        }
        Self::from_edge_list(n, &edges)
    }

    pub fn write_edge_list_file(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_edge_list_text())?;
        Ok(())
    }

    pub fn read_edge_list_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_edge_list(&text)
    }
}

/// Dense `n x n` real matrix with zero diagonal and entries in `[0, 1]`,
/// stored row-major. Entry `(i, j)` is the weight of edge `i -> j`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacencyMatrix {
    n: usize,
    values: Vec<f64>,
}

impl AdjacencyMatrix {
    /// Validating constructor for matrices built from raw values.
    pub fn from_values(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * n {
            return Err(CoreError::InvalidMatrix(format!(
                "expected {} values for n={n}, got {}",
                n * n,
                values.len()
            )));
        }
        for (idx, &v) in values.iter().enumerate() {
            let (row, col) = (idx / n, idx % n);
            if !v.is_finite() {
                return Err(CoreError::NonFiniteEntry { row, col });
            }
            if row == col && v != 0.0 {
                return Err(CoreError::InvalidMatrix(format!(
                    "nonzero diagonal entry at ({row}, {row})"
                )));
            }
            if !(0.0..=1.0).contains(&v) {
                return Err(CoreError::InvalidMatrix(format!(
                    "entry ({row}, {col}) = {v} outside [0, 1]"
                )));
            }
        }
        Ok(Self { n, values })
    }

    pub fn zero(n: usize) -> Self {
        Self {
            n,
            values: vec![0.0; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn nonzero_count(&self) -> usize {
        self.values.iter().filter(|&&v| v != 0.0).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize) -> DirectedGraph {
        let arcs: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        DirectedGraph::unweighted(n, &arcs).unwrap()
    }

    #[test]
    fn builds_a_chain() {
        let g = chain(3);
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert!(g.has_edge(0, 1));
        assert!(g.has_edge(1, 2));
        assert!(!g.has_edge(2, 0));
    }

    #[test]
    fn rejects_self_loop() {
        let err = DirectedGraph::unweighted(2, &[(0, 0)]).unwrap_err();
        assert!(matches!(err, CoreError::SelfLoop { node: 0 }));
    }

    #[test]
    fn rejects_duplicate_and_out_of_range_and_bad_weight() {
        assert!(matches!(
            DirectedGraph::unweighted(3, &[(0, 1), (0, 1)]).unwrap_err(),
            CoreError::DuplicateEdge { src: 0, dst: 1 }
        ));
        assert!(matches!(
            DirectedGraph::unweighted(3, &[(0, 3)]).unwrap_err(),
            CoreError::NodeOutOfRange { index: 3, n: 3 }
        ));
        assert!(matches!(
            DirectedGraph::from_edge_list(3, &[(0, 1, 0.0)]).unwrap_err(),
            CoreError::InvalidWeight { .. }
        ));
        assert!(matches!(
            DirectedGraph::from_edge_list(3, &[(0, 1, 1.5)]).unwrap_err(),
            CoreError::InvalidWeight { .. }
        ));
    }

    #[test]
    fn empty_graph_is_fine() {
        let g = DirectedGraph::unweighted(4, &[]).unwrap();
        assert_eq!(g.node_count(), 4);
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.to_matrix().nonzero_count(), 0);
    }

    #[test]
    fn matrix_of_chain_has_superdiagonal_ones() {
        let m = chain(3).to_matrix();
        assert_eq!(m.get(0, 1), 1.0);
        assert_eq!(m.get(1, 2), 1.0);
        assert_eq!(m.nonzero_count(), 2);
    }

    #[test]
    fn matrix_keeps_weights_verbatim() {
        let g = DirectedGraph::from_edge_list(2, &[(0, 1, 0.37)]).unwrap();
        assert_eq!(g.to_matrix().get(0, 1), 0.37);
    }

    #[test]
    fn remove_middle_of_chain_drops_both_edges() {
        let g = chain(3).remove_node(1).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn remove_head_of_chain_relabels() {
        let g = chain(3).remove_node(0).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert!(g.has_edge(0, 1));
    }

    #[test]
    fn remove_last_node_is_an_error() {
        let g = DirectedGraph::unweighted(1, &[]).unwrap();
        assert!(matches!(g.remove_node(0).unwrap_err(), CoreError::LastNode));
    }

    #[test]
    fn degrees_of_star_and_cycle() {
        let star = DirectedGraph::unweighted(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let deg = star.degrees();
        assert_eq!((deg[0].incoming, deg[0].outgoing, deg[0].total()), (0, 3, 3));
        for v in 1..4 {
            assert_eq!((deg[v].incoming, deg[v].outgoing, deg[v].total()), (1, 0, 1));
        }
        let cycle = DirectedGraph::unweighted(2, &[(0, 1), (1, 0)]).unwrap();
        for d in cycle.degrees() {
            assert_eq!((d.incoming, d.outgoing, d.total()), (1, 1, 2));
        }
        assert!(DirectedGraph::unweighted(3, &[])
            .unwrap()
            .degrees()
            .iter()
            .all(|d| d.total() == 0));
    }

    #[test]
    fn edge_list_text_roundtrip_unweighted_and_weighted() {
        let g = chain(4);
        let text = g.to_edge_list_text();
        assert!(text.starts_with("4 3\n"));
        assert!(!text.lines().nth(1).unwrap().contains('.'));
        assert_eq!(DirectedGraph::parse_edge_list(&text).unwrap(), g);

        let w = DirectedGraph::from_edge_list(3, &[(0, 1, 0.25), (2, 0, 1.0)]).unwrap();
        let text = w.to_edge_list_text();
        assert_eq!(DirectedGraph::parse_edge_list(&text).unwrap(), w);
    }

    #[test]
    fn edge_list_parse_errors() {
        assert!(matches!(
            DirectedGraph::parse_edge_list("").unwrap_err(),
            CoreError::ParseEdgeList { .. }
        ));
        assert!(matches!(
            DirectedGraph::parse_edge_list("2 1\n0 1 0.5 9\n").unwrap_err(),
            CoreError::ParseEdgeList { .. }
        ));
        // mixed column counts
        assert!(matches!(
            DirectedGraph::parse_edge_list("3 2\n0 1\n1 2 0.5\n").unwrap_err(),
            CoreError::ParseEdgeList { .. }
        ));
        // declared count mismatch
        assert!(matches!(
            DirectedGraph::parse_edge_list("3 2\n0 1\n").unwrap_err(),
            CoreError::ParseEdgeList { .. }
        ));
    }

    #[test]
    fn matrix_constructor_validates() {
        assert!(AdjacencyMatrix::from_values(2, vec![0.0, 0.5, 1.0, 0.0]).is_ok());
        assert!(AdjacencyMatrix::from_values(2, vec![0.1, 0.5, 1.0, 0.0]).is_err());
        assert!(AdjacencyMatrix::from_values(2, vec![0.0, f64::NAN, 1.0, 0.0]).is_err());
        assert!(AdjacencyMatrix::from_values(2, vec![0.0, 1.5, 1.0, 0.0]).is_err());
        assert!(AdjacencyMatrix::from_values(2, vec![0.0]).is_err());
    }
}
