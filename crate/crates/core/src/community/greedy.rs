//! Agglomerative greedy modularity maximization (Clauset-Newman-Moore).

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};

use super::Partition;
use crate::graph::Graph;

#[derive(PartialEq)]
struct Candidate {
    gain: f64,
    a: usize,
    b: usize,
    version_a: u32,
    version_b: u32,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.gain
            .total_cmp(&other.gain)
            .then_with(|| other.a.cmp(&self.a))
            .then_with(|| other.b.cmp(&self.b))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Merges the pair with the largest modularity gain until no merge improves it.
pub fn greedy_modularity(g: &Graph) -> Partition {
    let n = g.node_count();
    let m = g.edge_count();
    if m == 0 {
        return Partition::singletons(n);
    }
    let inv = 1.0 / (2.0 * m as f64);
    // e[i][j]: half the fraction of edge ends between communities i and j
    let mut e: Vec<BTreeMap<usize, f64>> = g
        .nodes()
        .map(|u| g.neighbors(u).iter().map(|&v| (v, inv)).collect())
        .collect();
    let mut a: Vec<f64> = g.nodes().map(|u| g.degree(u) as f64 * inv).collect();
    let mut version = vec![0u32; n];
    let mut alive = vec![true; n];
    let mut parent: Vec<usize> = (0..n).collect();

    let mut heap = BinaryHeap::new();
    for (u, row) in e.iter().enumerate() {
        for (&v, &w) in row.range(u + 1..) {
            heap.push(Candidate {
                gain: 2.0 * (w - a[u] * a[v]),
                a: u,
                b: v,
                version_a: 0,
                version_b: 0,
            });
        }
    }

    while let Some(c) = heap.pop() {
        if !alive[c.a] || !alive[c.b] || version[c.a] != c.version_a || version[c.b] != c.version_b {
            continue;
        }
        if c.gain <= 1e-15 {
            break;
        }
        let (keep, gone) = if e[c.a].len() >= e[c.b].len() {
            (c.a, c.b)
        } else {
            (c.b, c.a)
        };
        let absorbed = std::mem::take(&mut e[gone]);
        for (k, w) in absorbed {
            if k == keep {
                continue;
            }
            *e[keep].entry(k).or_insert(0.0) += w;
            let row = &mut e[k];
            let moved = row.remove(&gone).unwrap_or(0.0);
            *row.entry(keep).or_insert(0.0) += moved;
        }
        e[keep].remove(&gone);
        a[keep] += a[gone];
        alive[gone] = false;
        parent[gone] = keep;
        version[keep] += 1;
        for (&k, &w) in &e[keep] {
            let (x, y) = if keep < k { (keep, k) } else { (k, keep) };
            heap.push(Candidate {
                gain: 2.0 * (w - a[keep] * a[k]),
                a: x,
                b: y,
                version_a: version[x],
                version_b: version[y],
            });
        }
    }

    let root = |mut u: usize| {
        while parent[u] != u {
            u = parent[u];
        }
        u
    };
    let raw: Vec<usize> = (0..n).map(root).collect();
    Partition::from_assignment(&raw)
}

#[cfg(test)]
mod tests {
    use super::super::test_graphs::*;
    use super::super::modularity;
    use super::*;

    #[test]
    fn two_k4_split_found() {
        let g = two_k4_bridge();
        let p = greedy_modularity(&g);
        assert_eq!(p.community_count, 2);
        assert_eq!(p.assignment[..4], [p.assignment[0]; 4]);
    }

    #[test]
    fn two_triangles() {
        let g = super::super::test_graphs::two_triangles();
        let p = greedy_modularity(&g);
        let q: f64 = modularity(&g, &p).unwrap();
        assert!((q - 0.5).abs() < 1e-12);
    }

    #[test]
    fn edgeless_graph_stays_singletons() {
        let g = Graph::from_internal_edges(3, &[]);
        assert_eq!(greedy_modularity(&g).community_count, 3);
    }
}
