//! Louvain: local moving plus aggregation until no node moves.

use rand::seq::SliceRandom;

use super::Partition;
use crate::graph::Graph;
use crate::seed;

/// Weighted multigraph used between aggregation levels.
struct Level {
    adj: Vec<Vec<(usize, f64)>>,
    self_loop: Vec<f64>,
    strength: Vec<f64>,
    total: f64,
}

impl Level {
    fn from_graph(g: &Graph) -> Self {
        let adj: Vec<Vec<(usize, f64)>> = g
            .nodes()
            .map(|u| g.neighbors(u).iter().map(|&v| (v, 1.0)).collect())
            .collect();
        let strength = g.nodes().map(|u| g.degree(u) as f64).collect();
        Self {
            adj,
            self_loop: vec![0.0; g.node_count()],
            strength,
            total: 2.0 * g.edge_count() as f64,
        }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    /// One local-moving phase; returns the community of each node and whether any moved.
    fn local_moves(&self, resolution: f64, rng: &mut seed::Rng) -> (Vec<usize>, bool) {
        let n = self.len();
        let mut comm: Vec<usize> = (0..n).collect();
        let mut tot = self.strength.clone();
        let mut link = vec![0.0f64; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        let mut any_move = false;
        loop {
            let mut moved = false;
            for &u in &order {
                let ku = self.strength[u];
                let own = comm[u];
                for &(v, w) in &self.adj[u] {
                    let c = comm[v];
                    if link[c] == 0.0 {
                        touched.push(c);
                    }
                    link[c] += w;
                }
                tot[own] -= ku;
                let gain = |c: usize, l: f64| l - resolution * tot[c] * ku / self.total;
                let mut best = own;
                let mut best_gain = gain(own, link[own]);
                for &c in &touched {
                    let g = gain(c, link[c]);
                    if g > best_gain + 1e-12 {
                        best = c;
                        best_gain = g;
                    }
                }
                tot[best] += ku;
                if best != own {
                    comm[u] = best;
                    moved = true;
                    any_move = true;
                }
                for &c in &touched {
                    link[c] = 0.0;
                }
                link[own] = 0.0;
                touched.clear();
            }
            if !moved {
                break;
            }
        }
        (comm, any_move)
    }

    fn aggregate(&self, comm: &[usize], count: usize) -> Level {
        let mut adj: Vec<std::collections::BTreeMap<usize, f64>> = vec![Default::default(); count];
        let mut self_loop = vec![0.0; count];
        let mut strength = vec![0.0; count];
        for u in 0..self.len() {
            let cu = comm[u];
            strength[cu] += self.strength[u];
            self_loop[cu] += self.self_loop[u];
            for &(v, w) in &self.adj[u] {
                let cv = comm[v];
                if cu == cv {
                    // each internal edge is seen from both ends
                    self_loop[cu] += w / 2.0;
                } else {
                    *adj[cu].entry(cv).or_insert(0.0) += w;
                }
            }
        }
        Level {
            adj: adj.into_iter().map(|m| m.into_iter().collect()).collect(),
            self_loop,
            strength,
            total: self.total,
        }
    }
}

/// Louvain partition of `g`, deterministic per `seed`.
pub fn louvain(g: &Graph, seed: u64, resolution: f64) -> Partition {
    let n = g.node_count();
    if g.edge_count() == 0 {
        return Partition::singletons(n);
    }
    let mut rng = seed::rng(seed);
    let mut level = Level::from_graph(g);
    let mut membership: Vec<usize> = (0..n).collect();
    loop {
        let (comm, moved) = level.local_moves(resolution, &mut rng);
        if !moved {
            break;
        }
        let relabeled = Partition::from_assignment(&comm);
        for m in membership.iter_mut() {
            *m = relabeled.assignment[*m];
        }
        level = level.aggregate(&relabeled.assignment, relabeled.community_count);
        if relabeled.community_count == 1 {
            break;
        }
    }
    Partition::from_assignment(&membership)
}
