//! Immutable undirected simple graphs in compressed row layout.

mod edgelist;
pub mod generators;

use std::collections::VecDeque;

use thiserror::Error;

pub use edgelist::{load_edgelist, save_edgelist};
pub use generators::{generate, CommunityLabels, Family, GeneratorSpec, LfrParams};

/// Internal node index, always in `0..node_count`.
pub type NodeId = usize;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("graph has no edges")]
    EmptyGraph,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid generator spec: {0}")]
    Spec(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, GraphError>;

/// Undirected simple graph.
///
/// Neighbors of `u` live in `targets[offsets[u]..offsets[u + 1]]`, sorted ascending.
/// `labels`, when present, maps internal indices back to the ids found in the input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
    labels: Option<Vec<u64>>,
}

/// Builds a graph from arbitrary non-negative id pairs.
///
/// Edges are symmetrized, duplicates and self-loops dropped and ids compacted to
/// `0..n` in ascending order of the original id.
pub fn build_graph(edges: &[(u64, u64)]) -> Result<Graph> {
    Graph::from_edges(edges)
}

impl Graph {
    pub fn from_edges(edges: &[(u64, u64)]) -> Result<Self> {
        let mut ids: Vec<u64> = edges
            .iter()
            .filter(|(u, v)| u != v)
            .flat_map(|&(u, v)| [u, v])
            .collect();
        if ids.is_empty() {
            return Err(GraphError::EmptyGraph);
        }
        ids.sort_unstable();
        ids.dedup();
        let index = |x: u64| ids.binary_search(&x).expect("id collected above");
        let internal: Vec<(NodeId, NodeId)> = edges
            .iter()
            .filter(|(u, v)| u != v)
            .map(|&(u, v)| (index(u), index(v)))
            .collect();
        let mut g = Self::from_internal_edges(ids.len(), &internal);
        let identity = ids.iter().enumerate().all(|(i, &x)| x == i as u64);
        if !identity {
            g.labels = Some(ids);
        }
        Ok(g)
    }

    /// Builds a graph on exactly `n` nodes, keeping isolated nodes.
    ///
    /// Panics if an endpoint is out of range.
    pub fn from_internal_edges(n: usize, edges: &[(NodeId, NodeId)]) -> Self {
        let mut degree = vec![0usize; n + 1];
        for &(u, v) in edges {
            assert!(u < n && v < n, "edge ({u}, {v}) out of range for {n} nodes");
            if u != v {
                degree[u] += 1;
                degree[v] += 1;
            }
        }
        let mut offsets = vec![0usize; n + 1];
        for u in 0..n {
            offsets[u + 1] = offsets[u] + degree[u];
        }
        let mut cursor = offsets.clone();
        let mut targets = vec![0usize; offsets[n]];
        for &(u, v) in edges {
            if u != v {
                targets[cursor[u]] = v;
                cursor[u] += 1;
                targets[cursor[v]] = u;
                cursor[v] += 1;
            }
        }
        // sort rows and squeeze out duplicates in place
        let mut write = 0usize;
        let mut new_offsets = vec![0usize; n + 1];
        for u in 0..n {
            let (start, end) = (offsets[u], offsets[u + 1]);
            targets[start..end].sort_unstable();
            let row_start = write;
            for i in start..end {
                let t = targets[i];
                if write == row_start || targets[write - 1] != t {
                    targets[write] = t;
                    write += 1;
                }
            }
            new_offsets[u + 1] = write;
        }
        targets.truncate(write);
        targets.shrink_to_fit();
        Self {
            offsets: new_offsets,
            targets,
            labels: None,
        }
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    #[inline]
    pub fn degree(&self, u: NodeId) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    #[inline]
    pub fn neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        u < self.node_count() && self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn nodes(&self) -> std::ops::Range<NodeId> {
        0..self.node_count()
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.nodes().flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    pub fn max_degree(&self) -> usize {
        self.nodes().map(|u| self.degree(u)).max().unwrap_or(0)
    }

    pub fn average_degree(&self) -> f64 {
        if self.node_count() == 0 {
            0.0
        } else {
            self.targets.len() as f64 / self.node_count() as f64
        }
    }

    /// Original id of `u` (the index itself when the input ids were already contiguous).
    pub fn label(&self, u: NodeId) -> u64 {
        match &self.labels {
            Some(l) => l[u],
            None => u as u64,
        }
    }

    pub fn labels(&self) -> Option<&[u64]> {
        self.labels.as_deref()
    }

    pub(crate) fn with_labels(mut self, labels: Option<Vec<u64>>) -> Self {
        if let Some(l) = &labels {
            assert_eq!(l.len(), self.node_count());
        }
        self.labels = labels;
        self
    }

    /// Checks symmetry, simplicity, sortedness and the degree-sum identity.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let n = self.node_count();
        if !self.targets.len().is_multiple_of(2) {
            return Err("odd number of adjacency entries".into());
        }
        for u in self.nodes() {
            let row = self.neighbors(u);
            for w in row.windows(2) {
                if w[0] >= w[1] {
                    return Err(format!("row {u} not strictly sorted"));
                }
            }
            for &v in row {
                if v >= n {
                    return Err(format!("neighbor {v} of {u} out of range"));
                }
                if v == u {
                    return Err(format!("self-loop at {u}"));
                }
                if !self.has_edge(v, u) {
                    return Err(format!("edge ({u}, {v}) not symmetric"));
                }
            }
        }
        let degree_sum: usize = self.nodes().map(|u| self.degree(u)).sum();
        if degree_sum != 2 * self.edge_count() {
            return Err("degree sum differs from twice the edge count".into());
        }
        Ok(())
    }

    /// Connected-component id per node, numbered in order of smallest member.
    pub fn components(&self) -> Vec<usize> {
        let n = self.node_count();
        let mut comp = vec![usize::MAX; n];
        let mut next = 0;
        let mut queue = VecDeque::new();
        for s in self.nodes() {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = next;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for &v in self.neighbors(u) {
                    if comp[v] == usize::MAX {
                        comp[v] = next;
                        queue.push_back(v);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    /// Induced subgraph on `nodes` (duplicates ignored).
    ///
    /// Returns the subgraph, whose internal ids follow ascending parent id, and the
    /// parent id of every subgraph node. Labels are carried over from the parent.
    pub fn induced_subgraph(&self, nodes: &[NodeId]) -> (Graph, Vec<NodeId>) {
        let mut keep: Vec<NodeId> = nodes.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let mut index = vec![usize::MAX; self.node_count()];
        for (i, &u) in keep.iter().enumerate() {
            index[u] = i;
        }
        let mut edges = Vec::new();
        for (i, &u) in keep.iter().enumerate() {
            for &v in self.neighbors(u) {
                let j = index[v];
                if j != usize::MAX && i < j {
                    edges.push((i, j));
                }
            }
        }
        let sub = Graph::from_internal_edges(keep.len(), &edges);
        let labels = self
            .labels
            .as_ref()
            .map(|l| keep.iter().map(|&u| l[u]).collect::<Vec<_>>());
        (sub.with_labels(labels), keep)
    }

    /// Induced subgraph on the largest connected component (ties: smallest member id).
    pub fn largest_connected_component(&self) -> Graph {
        self.largest_component_with_map().0
    }

    /// Like [`Graph::largest_connected_component`], also returning parent ids.
    pub fn largest_component_with_map(&self) -> (Graph, Vec<NodeId>) {
        let comp = self.components();
        let count = comp.iter().copied().max().map_or(0, |c| c + 1);
        let mut sizes = vec![0usize; count];
        for &c in &comp {
            sizes[c] += 1;
        }
        let best = sizes
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .map(|(c, _)| c);
        match best {
            Some(best) if sizes[best] < self.node_count() => {
                let members: Vec<NodeId> = self.nodes().filter(|&u| comp[u] == best).collect();
                self.induced_subgraph(&members)
            }
            _ => (self.clone(), self.nodes().collect()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(edges: &[(u64, u64)]) -> Graph {
        build_graph(edges).unwrap()
    }

    #[test]
    fn path_of_three() {
        let graph = g(&[(0, 1), (1, 2)]);
        assert_eq!(graph.node_count(), 3);
        assert_eq!(graph.edge_count(), 2);
        assert_eq!(graph.degree(1), 2);
        graph.check_invariants().unwrap();
    }

    #[test]
    fn duplicates_and_reversals_collapse() {
        let graph = g(&[(0, 1), (1, 0), (0, 1)]);
        assert_eq!(graph.edge_count(), 1);
        assert_eq!(graph.neighbors(0), &[1]);
    }

    #[test]
    fn only_self_loops_is_empty() {
        assert!(matches!(build_graph(&[(0, 0)]), Err(GraphError::EmptyGraph)));
        assert!(matches!(build_graph(&[]), Err(GraphError::EmptyGraph)));
    }

    #[test]
    fn sparse_ids_are_compacted() {
        let graph = g(&[(5, 9)]);
        assert_eq!(graph.node_count(), 2);
        assert_eq!(graph.labels(), Some(&[5u64, 9][..]));
        assert_eq!(graph.label(1), 9);
        assert!(g(&[(0, 1)]).labels().is_none());
    }

    #[test]
    fn lcc_of_two_triangles() {
        let graph = g(&[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]);
        let lcc = graph.largest_connected_component();
        assert_eq!(lcc.node_count(), 3);
        assert_eq!(lcc.edge_count(), 3);
    }

    #[test]
    fn lcc_of_connected_graph_is_identity() {
        let graph = g(&[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(graph.largest_connected_component(), graph);
    }

    #[test]
    fn lcc_picks_the_path() {
        let graph = g(&[(0, 1), (1, 2), (2, 3), (3, 4), (10, 11)]);
        let (lcc, map) = graph.largest_component_with_map();
        assert_eq!(lcc.node_count(), 5);
        assert_eq!(map, vec![0, 1, 2, 3, 4]);
        lcc.check_invariants().unwrap();
    }

    #[test]
    fn induced_subgraph_keeps_internal_edges() {
        let graph = g(&[(0, 1), (1, 2), (2, 0)]);
        let (sub, map) = graph.induced_subgraph(&[1, 0, 1]);
        assert_eq!(sub.node_count(), 2);
        assert_eq!(sub.edge_count(), 1);
        assert_eq!(map, vec![0, 1]);
    }

    #[test]
    fn edges_are_listed_once() {
        let graph = g(&[(2, 0), (1, 2), (0, 1)]);
        let e: Vec<_> = graph.edges().collect();
        assert_eq!(e, vec![(0, 1), (0, 2), (1, 2)]);
    }
}
