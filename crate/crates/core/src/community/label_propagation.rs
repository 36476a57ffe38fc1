//! Asynchronous label propagation with random tie-breaking.

use rand::seq::SliceRandom;
use rand::Rng as _;

use super::Partition;
use crate::graph::Graph;
use crate::seed;

pub const MAX_SWEEPS: usize = 100;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelPropagationOutcome {
    pub partition: Partition,
    pub sweeps: usize,
    pub converged: bool,
}

/// Labels with the highest count among `u`'s neighbors, in first-seen order.
fn majority_labels(g: &Graph, labels: &[usize], u: usize, counts: &mut [usize], out: &mut Vec<usize>) {
    out.clear();
    let mut seen = Vec::with_capacity(g.degree(u));
    let mut best = 0;
    for &v in g.neighbors(u) {
        let l = labels[v];
        if counts[l] == 0 {
            seen.push(l);
        }
        counts[l] += 1;
        best = best.max(counts[l]);
    }
    for &l in &seen {
        if counts[l] == best {
            out.push(l);
        }
        counts[l] = 0;
    }
}

/// True when every non-isolated node carries one of its neighborhood's majority labels.
pub fn is_majority_fixed_point(g: &Graph, assignment: &[usize]) -> bool {
    let mut counts = vec![0; g.node_count().max(assignment.iter().max().map_or(0, |m| m + 1))];
    let mut best = Vec::new();
    g.nodes().filter(|&u| g.degree(u) > 0).all(|u| {
        majority_labels(g, assignment, u, &mut counts, &mut best);
        best.contains(&assignment[u])
    })
}

pub fn label_propagation(g: &Graph, seed: u64) -> LabelPropagationOutcome {
    let n = g.node_count();
    let mut rng = seed::rng(seed);
    let mut labels: Vec<usize> = (0..n).collect();
    let mut counts = vec![0; n];
    let mut best = Vec::new();
    let mut order: Vec<usize> = (0..n).collect();
    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < MAX_SWEEPS {
        order.shuffle(&mut rng);
        for &u in &order {
            if g.degree(u) == 0 {
                continue;
            }
            majority_labels(g, &labels, u, &mut counts, &mut best);
            labels[u] = best[rng.random_range(0..best.len())];
        }
        sweeps += 1;
        if is_majority_fixed_point(g, &labels) {
            converged = true;
            break;
        }
    }
    LabelPropagationOutcome {
        partition: Partition::from_assignment(&labels),
        sweeps,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::super::test_graphs::*;
    use super::*;

    #[test]
    fn two_triangles_converge_to_two_labels() {
        let g = two_triangles();
        for seed in 0..10 {
            let out = label_propagation(&g, seed);
            assert!(out.converged);
            assert_eq!(out.partition.community_count, 2);
            assert!(is_majority_fixed_point(&g, &out.partition.assignment));
        }
    }

    #[test]
    fn isolated_nodes_keep_their_label() {
        let g = Graph::from_internal_edges(3, &[(0, 1)]);
        let out = label_propagation(&g, 4);
        assert_eq!(out.partition.community_count, 2);
    }

    #[test]
    fn fixed_point_check() {
        let g = two_triangles();
        assert!(is_majority_fixed_point(&g, &[0, 0, 0, 1, 1, 1]));
        assert!(!is_majority_fixed_point(&g, &[0, 0, 1, 1, 1, 1]));
    }

    #[test]
    fn deterministic_per_seed() {
        let g = two_k4_bridge();
        assert_eq!(label_propagation(&g, 9), label_propagation(&g, 9));
    }
}
