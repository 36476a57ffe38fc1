//! Community detection on (walk-induced) subgraphs.

mod greedy;
mod label_propagation;
mod louvain;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, NodeId};
use crate::scalar::Scalar;
use crate::walkers::Walk;

pub use greedy::greedy_modularity;
pub use label_propagation::{is_majority_fixed_point, label_propagation, LabelPropagationOutcome};
pub use louvain::louvain;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CommunityError {
    #[error("graph has no edges")]
    EmptyGraph,
    #[error("partition covers {got} nodes, graph has {expected}")]
    SizeMismatch { expected: usize, got: usize },
}

/// Total assignment of nodes to contiguous community ids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub community_count: usize,
    pub assignment: Vec<usize>,
}

impl Partition {
    /// Relabels to `0..k` in order of first appearance.
    pub fn from_assignment(raw: &[usize]) -> Self {
        let mut map = std::collections::HashMap::new();
        let assignment = raw
            .iter()
            .map(|&c| {
                let next = map.len();
                *map.entry(c).or_insert(next)
            })
            .collect();
        Self {
            community_count: map.len(),
            assignment,
        }
    }

    pub fn single_block(n: usize) -> Self {
        Self {
            community_count: usize::from(n > 0),
            assignment: vec![0; n],
        }
    }

    pub fn singletons(n: usize) -> Self {
        Self {
            community_count: n,
            assignment: (0..n).collect(),
        }
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.community_count];
        for &c in &self.assignment {
            s[c] += 1;
        }
        s
    }

    /// Number of communities with at least `min_size` members.
    pub fn count_at_least(&self, min_size: usize) -> usize {
        self.sizes().into_iter().filter(|&s| s >= min_size).count()
    }
}

/// Subgraph induced by every node visited by `walks`, with parent ids.
pub fn walk_induced_subgraph(g: &Graph, walks: &[Walk]) -> (Graph, Vec<NodeId>) {
    let visited: Vec<NodeId> = walks.iter().flat_map(|w| w.nodes()).collect();
    g.induced_subgraph(&visited)
}

/// Newman modularity `Q = sum_c [e_c / m - (d_c / 2m)^2]`.
pub fn modularity<T: Scalar>(g: &Graph, p: &Partition) -> Result<T, CommunityError> {
    if p.assignment.len() != g.node_count() {
        return Err(CommunityError::SizeMismatch {
            expected: g.node_count(),
            got: p.assignment.len(),
        });
    }
    let m = g.edge_count();
    if m == 0 {
        return Err(CommunityError::EmptyGraph);
    }
    let mut internal = vec![0usize; p.community_count];
    let mut degree = vec![0usize; p.community_count];
    for u in g.nodes() {
        degree[p.assignment[u]] += g.degree(u);
    }
    for (u, v) in g.edges() {
        if p.assignment[u] == p.assignment[v] {
            internal[p.assignment[u]] += 1;
        }
    }
    let m = T::from_count(m);
    let two_m = m + m;
    Ok(internal
        .iter()
        .zip(&degree)
        .map(|(&e, &d)| {
            let frac = T::from_count(d) / two_m;
            T::from_count(e) / m - frac * frac
        })
        .sum())
}

#[cfg(test)]
pub(crate) mod test_graphs {
    use crate::graph::{build_graph, Graph};

    pub fn two_k4_bridge() -> Graph {
        let mut e = Vec::new();
        for base in [0u64, 4] {
            for i in 0..4 {
                for j in (i + 1)..4 {
                    e.push((base + i, base + j));
                }
            }
        }
        e.push((3, 4));
        build_graph(&e).unwrap()
    }

    pub fn two_triangles() -> Graph {
        build_graph(&[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap()
    }

    pub fn complete(n: u64) -> Graph {
        let mut e = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                e.push((i, j));
            }
        }
        build_graph(&e).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::test_graphs::*;
    use super::*;
    use crate::walkers::Walk;

    #[test]
    fn single_block_has_zero_modularity() {
        for g in [two_k4_bridge(), two_triangles(), complete(5)] {
            let q: f64 = modularity(&g, &Partition::single_block(g.node_count())).unwrap();
            assert!(q.abs() < 1e-12);
        }
    }

    #[test]
    fn two_k4_split() {
        let g = two_k4_bridge();
        let p = Partition::from_assignment(&[0, 0, 0, 0, 1, 1, 1, 1]);
        let q: f64 = modularity(&g, &p).unwrap();
        assert!((q - 2.0 * (6.0 / 13.0 - 0.25)).abs() < 1e-12);
        let q32: f32 = modularity(&g, &p).unwrap();
        assert!((f64::from(q32) - q).abs() < 1e-6);
    }

    #[test]
    fn per_triangle_partition() {
        let g = two_triangles();
        let p = Partition::from_assignment(&[0, 0, 0, 1, 1, 1]);
        let q: f64 = modularity(&g, &p).unwrap();
        assert!((q - 0.5).abs() < 1e-12);
    }

    #[test]
    fn modularity_errors() {
        let g = two_triangles();
        assert_eq!(
            modularity::<f64>(&g, &Partition::single_block(3)),
            Err(CommunityError::SizeMismatch { expected: 6, got: 3 })
        );
        let empty = Graph::from_internal_edges(2, &[]);
        assert_eq!(
            modularity::<f64>(&empty, &Partition::single_block(2)),
            Err(CommunityError::EmptyGraph)
        );
    }

    fn walk_of(nodes: &[usize], g: &Graph) -> Walk {
        Walk {
            start: nodes[0],
            seed: 0,
            burn_in_dropped: 0,
            steps: nodes.iter().map(|&u| (u, g.degree(u))).collect(),
        }
    }

    #[test]
    fn induced_by_walks() {
        let tri = complete(3);
        let (sub, parents) = walk_induced_subgraph(&tri, &[walk_of(&[0, 1, 0], &tri)]);
        assert_eq!(sub.node_count(), 2);
        assert_eq!(sub.edge_count(), 1);
        assert_eq!(parents, vec![0, 1]);

        let g = two_k4_bridge();
        let all: Vec<usize> = (0..8).collect();
        let (sub, _) = walk_induced_subgraph(&g, &[walk_of(&all, &g)]);
        assert_eq!(sub, g);
    }

    #[test]
    fn partition_json() {
        let p = Partition::from_assignment(&[5, 5, 2]);
        assert_eq!(
            serde_json::to_string(&p).unwrap(),
            r#"{"community_count":2,"assignment":[0,0,1]}"#
        );
        assert_eq!(p.count_at_least(2), 1);
    }
}
