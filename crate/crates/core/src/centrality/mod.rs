//! Node rankings: exact betweenness, closeness and PageRank, plus walk-based
//! visit counts and a degree-statistics structure classifier.

mod classify;

use std::collections::{BTreeMap, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, NodeId};
use crate::scalar::Scalar;
use crate::walkers::Walk;

pub use classify::{classify_structure, StructureFeatures};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CentralityError {
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error("no walks to rank")]
    EmptyWalks,
    #[error("no walk statistics to classify")]
    EmptyStats,
    #[error("pagerank did not converge in {iterations} iterations")]
    NonConvergence { iterations: usize },
}

pub type Result<T> = std::result::Result<T, CentralityError>;

/// Nodes ordered by descending score, ties by ascending id.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankedNodes<T> {
    pub scores: BTreeMap<NodeId, T>,
    pub ordering: Vec<NodeId>,
}

impl<T: Scalar> RankedNodes<T> {
    pub fn from_scores(scores: BTreeMap<NodeId, T>) -> Self {
        let mut ordering: Vec<NodeId> = scores.keys().copied().collect();
        ordering.sort_by(|a, b| scores[b].partial_cmp(&scores[a]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(b)));
        Self { scores, ordering }
    }

    pub fn from_dense(scores: Vec<T>) -> Self {
        Self::from_scores(scores.into_iter().enumerate().collect())
    }

    pub fn top_k(&self, k: usize) -> &[NodeId] {
        &self.ordering[..k.min(self.ordering.len())]
    }

    pub fn score(&self, u: NodeId) -> Option<T> {
        self.scores.get(&u).copied()
    }
}

/// Size of source blocks; fixed so the reduction order never depends on the thread pool.
const SOURCE_CHUNK: usize = 32;

/// Sums per-source contributions over fixed chunks, in chunk order.
fn reduce_sources<T, F>(n: usize, per_source: F) -> Vec<T>
where
    T: Scalar,
    F: Fn(NodeId, &mut [T]) + Sync,
{
    let sources: Vec<NodeId> = (0..n).collect();
    let partials: Vec<Vec<T>> = sources
        .par_chunks(SOURCE_CHUNK)
        .map(|chunk| {
            let mut acc = vec![T::zero(); n];
            for &s in chunk {
                per_source(s, &mut acc);
            }
            acc
        })
        .collect();
    let mut total = vec![T::zero(); n];
    for p in partials {
        for (t, v) in total.iter_mut().zip(p) {
            *t = *t + v;
        }
    }
    total
}

/// Brandes dependency accumulation; each unordered pair counted once, no normalization.
pub fn betweenness<T: Scalar>(g: &Graph) -> RankedNodes<T> {
    let n = g.node_count();
    let total = reduce_sources(n, |s, acc: &mut [T]| {
        let mut sigma = vec![T::zero(); n];
        let mut dist = vec![usize::MAX; n];
        let mut delta = vec![T::zero(); n];
        let mut order = Vec::with_capacity(n);
        let mut queue = VecDeque::new();
        sigma[s] = T::one();
        dist[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in g.neighbors(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] = sigma[w] + sigma[v];
                }
            }
        }
        for &w in order.iter().rev() {
            for &v in g.neighbors(w) {
                if dist[v] != usize::MAX && dist[v] + 1 == dist[w] {
                    delta[v] = delta[v] + sigma[v] / sigma[w] * (T::one() + delta[w]);
                }
            }
            if w != s {
                acc[w] = acc[w] + delta[w];
            }
        }
    });
    let half = T::lit(0.5);
    RankedNodes::from_dense(total.into_iter().map(|x| x * half).collect())
}

fn bfs_distances(g: &Graph, s: NodeId, dist: &mut [usize], queue: &mut VecDeque<NodeId>) -> (usize, usize) {
    dist.fill(usize::MAX);
    dist[s] = 0;
    queue.clear();
    queue.push_back(s);
    let (mut reached, mut sum) = (0, 0);
    while let Some(v) = queue.pop_front() {
        reached += 1;
        sum += dist[v];
        for &w in g.neighbors(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    (reached, sum)
}

/// Closeness within each node's component, scaled by the reachable fraction.
pub fn closeness<T: Scalar>(g: &Graph) -> RankedNodes<T> {
    let n = g.node_count();
    let scores: Vec<T> = (0..n)
        .into_par_iter()
        .map_init(
            || (vec![usize::MAX; n], VecDeque::new()),
            |(dist, queue), s| {
                let (reached, sum) = bfs_distances(g, s, dist, queue);
                if sum == 0 || n < 2 {
                    return T::zero();
                }
                let r = T::from_count(reached - 1);
                r / T::from_count(sum) * (r / T::from_count(n - 1))
            },
        )
        .collect();
    RankedNodes::from_dense(scores)
}

pub const PAGERANK_MAX_ITERATIONS: usize = 10_000;

/// Power iteration; dangling mass is spread uniformly.
pub fn pagerank<T: Scalar>(g: &Graph, damping: T, tol: T) -> Result<RankedNodes<T>> {
    let n = g.node_count();
    if n == 0 {
        return Err(CentralityError::EmptyGraph);
    }
    let nf = T::from_count(n);
    let mut pr = vec![T::one() / nf; n];
    let mut next = vec![T::zero(); n];
    for _ in 0..PAGERANK_MAX_ITERATIONS {
        let dangling: T = g.nodes().filter(|&u| g.degree(u) == 0).map(|u| pr[u]).sum();
        let base = (T::one() - damping) / nf + damping * dangling / nf;
        for (v, slot) in next.iter_mut().enumerate() {
            let inflow: T = g
                .neighbors(v)
                .iter()
                .map(|&u| pr[u] / T::from_count(g.degree(u)))
                .sum();
            *slot = base + damping * inflow;
        }
        let change: T = pr.iter().zip(&next).map(|(a, b)| (*a - *b).abs()).sum();
        std::mem::swap(&mut pr, &mut next);
        if change < tol {
            return Ok(RankedNodes::from_dense(pr));
        }
    }
    Err(CentralityError::NonConvergence {
        iterations: PAGERANK_MAX_ITERATIONS,
    })
}

/// Ranks visited nodes by how many walk positions landed on them.
pub fn visit_frequency_ranking<T: Scalar>(walks: &[Walk]) -> Result<RankedNodes<T>> {
    if walks.is_empty() {
        return Err(CentralityError::EmptyWalks);
    }
    let mut counts: BTreeMap<NodeId, usize> = BTreeMap::new();
    for u in walks.iter().flat_map(|w| w.nodes()) {
        *counts.entry(u).or_default() += 1;
    }
    Ok(RankedNodes::from_scores(
        counts.into_iter().map(|(u, c)| (u, T::from_count(c))).collect(),
    ))
}

/// `|a ∩ b| / k` over the first `k` entries of each list.
pub fn precision_at_k(predicted: &[NodeId], truth: &[NodeId], k: usize) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let truth: std::collections::HashSet<_> = truth.iter().take(k).collect();
    let mut seen = std::collections::HashSet::new();
    let hits = predicted
        .iter()
        .take(k)
        .filter(|u| seen.insert(**u) && truth.contains(u))
        .count();
    hits as f64 / k as f64
}
