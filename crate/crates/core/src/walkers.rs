//! Random-walk samplers over a [`LimitedGraphView`].
//!
//! All walkers take an explicit seed and are reproducible per
//! `(view state, start, length, seed)`. Use [`crate::seed::mix`] to derive
//! per-walk seeds from a master seed.

use std::collections::{HashMap, HashSet};

use rand::Rng as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::access::{AccessError, LimitedGraphView};
use crate::graph::{Graph, NodeId};
use crate::seed::{self, Rng};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WalkError {
    #[error(transparent)]
    Access(#[from] AccessError),
    #[error("node {node} has degree {degree} > d_max {d_max}")]
    DMaxTooSmall {
        node: NodeId,
        degree: usize,
        d_max: usize,
    },
    #[error("no return after {steps} steps ({returns} of {wanted} returns seen)")]
    NonReturning {
        steps: u64,
        returns: usize,
        wanted: usize,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

/// Visit sequence of `(node, degree)` pairs.
///
/// `steps[0]` is the position after the burn-in; a walk of length `L` holds `L + 1`
/// positions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Walk {
    pub start: NodeId,
    pub seed: u64,
    #[serde(default)]
    pub burn_in_dropped: usize,
    pub steps: Vec<(NodeId, usize)>,
}

impl Walk {
    /// Number of transitions retained.
    pub fn len(&self) -> usize {
        self.steps.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.steps.iter().map(|&(u, _)| u)
    }

    pub fn degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.steps.iter().map(|&(_, d)| d)
    }

    /// Checks that every move follows an edge of `g` and degrees are truthful.
    pub fn validate(&self, g: &Graph, allow_self_loops: bool) -> Result<(), String> {
        for (i, &(u, d)) in self.steps.iter().enumerate() {
            if u >= g.node_count() {
                return Err(format!("position {i}: node {u} out of range"));
            }
            if g.degree(u) != d {
                return Err(format!("position {i}: degree {d} recorded for node {u}"));
            }
        }
        for (i, w) in self.steps.windows(2).enumerate() {
            let (a, b) = (w[0].0, w[1].0);
            if a == b {
                if !allow_self_loops {
                    return Err(format!("position {i}: self transition at {a}"));
                }
            } else if !g.has_edge(a, b) {
                return Err(format!("position {i}: {a} -> {b} is not an edge"));
            }
        }
        Ok(())
    }
}

/// Transition rule of a node-sampling walk.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WalkKind {
    Simple,
    MetropolisHastings,
    /// Lazy walk on the graph padded with self-loops up to `d_max`.
    MaxDegree { d_max: usize },
}

impl WalkKind {
    pub fn allows_self_loops(self) -> bool {
        !matches!(self, WalkKind::Simple)
    }

    fn step(self, view: &mut LimitedGraphView<'_>, u: NodeId, rng: &mut Rng) -> Result<NodeId, WalkError> {
        match self {
            WalkKind::Simple => Ok(view.sample_random_neighbor(u, rng)?),
            WalkKind::MetropolisHastings => {
                let du = view.query_degree(u)?;
                let v = view.sample_random_neighbor(u, rng)?;
                let dv = view.query_degree(v)?;
                // P(u -> v) = 1/d(u) * min(1, d(u)/d(v)) = 1/max(d(u), d(v))
                if dv <= du || rng.random_range(0..dv) < du {
                    Ok(v)
                } else {
                    Ok(u)
                }
            }
            WalkKind::MaxDegree { d_max } => {
                let du = view.query_degree(u)?;
                if du > d_max {
                    return Err(WalkError::DMaxTooSmall {
                        node: u,
                        degree: du,
                        d_max,
                    });
                }
                if du == 0 {
                    return Err(AccessError::IsolatedNode(u).into());
                }
                if du == d_max || rng.random_range(0..d_max) < du {
                    Ok(view.sample_random_neighbor(u, rng)?)
                } else {
                    Ok(u)
                }
            }
        }
    }
}

/// Runs `burn_in` discarded transitions followed by `length` recorded ones.
pub fn run_walk(
    kind: WalkKind,
    view: &mut LimitedGraphView<'_>,
    start: NodeId,
    length: usize,
    burn_in: usize,
    seed: u64,
) -> Result<Walk, WalkError> {
    let mut rng = seed::rng(seed);
    if view.query_degree(start)? == 0 {
        return Err(AccessError::IsolatedNode(start).into());
    }
    let mut u = start;
    for _ in 0..burn_in {
        u = kind.step(view, u, &mut rng)?;
    }
    let mut steps = Vec::with_capacity(length + 1);
    steps.push((u, view.query_degree(u)?));
    for _ in 0..length {
        u = kind.step(view, u, &mut rng)?;
        steps.push((u, view.query_degree(u)?));
    }
    Ok(Walk {
        start,
        seed,
        burn_in_dropped: burn_in,
        steps,
    })
}

pub fn simple_random_walk(
    view: &mut LimitedGraphView<'_>,
    start: NodeId,
    length: usize,
    burn_in: usize,
    seed: u64,
) -> Result<Walk, WalkError> {
    run_walk(WalkKind::Simple, view, start, length, burn_in, seed)
}

/// Metropolis-Hastings walk with a uniform stationary distribution.
pub fn mh_walk(
    view: &mut LimitedGraphView<'_>,
    start: NodeId,
    length: usize,
    burn_in: usize,
    seed: u64,
) -> Result<Walk, WalkError> {
    run_walk(WalkKind::MetropolisHastings, view, start, length, burn_in, seed)
}

/// Max-degree walk; `d_max` is trusted out-of-band knowledge.
pub fn max_degree_walk(
    view: &mut LimitedGraphView<'_>,
    start: NodeId,
    length: usize,
    burn_in: usize,
    d_max: usize,
    seed: u64,
) -> Result<Walk, WalkError> {
    run_walk(WalkKind::MaxDegree { d_max }, view, start, length, burn_in, seed)
}

/// First-return bookkeeping of an inverse-degree weighted walk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReturnRecord {
    pub source: NodeId,
    /// `w(u) = sum over neighbors v of 1/d(u) + 1/d(v)`.
    pub source_weight: f64,
    /// Steps between consecutive returns, `Z_1..Z_k`.
    pub return_times: Vec<u64>,
    pub k: usize,
    /// Sum of degrees over every arrival of the walk.
    pub visited_degree_sum: u64,
    pub unique_nodes: usize,
}

impl ReturnRecord {
    /// `Z(k)`: time of the k-th return.
    pub fn total_time(&self) -> u64 {
        self.return_times.iter().sum()
    }

    pub fn mean_visited_degree(&self) -> f64 {
        let t = self.total_time();
        if t == 0 {
            0.0
        } else {
            self.visited_degree_sum as f64 / t as f64
        }
    }
}

/// Edge weight `1/d(u) + 1/d(v)`.
#[inline]
pub fn inverse_degree_weight(du: usize, dv: usize) -> f64 {
    1.0 / du as f64 + 1.0 / dv as f64
}

/// Cumulative transition weights out of `u`, memoised per walk.
fn cumulative_weights<'a>(
    view: &mut LimitedGraphView<'_>,
    cache: &'a mut HashMap<NodeId, (Vec<NodeId>, Vec<f64>)>,
    u: NodeId,
) -> Result<&'a (Vec<NodeId>, Vec<f64>), WalkError> {
    if let std::collections::hash_map::Entry::Vacant(e) = cache.entry(u) {
        let du = view.query_degree(u)?;
        let nbrs = view.query_neighbors(u)?;
        let mut acc = 0.0;
        let mut cum = Vec::with_capacity(nbrs.len());
        for &v in nbrs {
            acc += inverse_degree_weight(du, view.query_degree(v)?);
            cum.push(acc);
        }
        e.insert((nbrs.to_vec(), cum));
    }
    Ok(&cache[&u])
}

fn weighted_step(
    view: &mut LimitedGraphView<'_>,
    cache: &mut HashMap<NodeId, (Vec<NodeId>, Vec<f64>)>,
    u: NodeId,
    rng: &mut Rng,
) -> Result<NodeId, WalkError> {
    let (nbrs, cum) = cumulative_weights(view, cache, u)?;
    let total = *cum.last().expect("walk never reaches isolated nodes");
    let r = rng.random::<f64>() * total;
    let idx = cum.partition_point(|&c| c <= r).min(nbrs.len() - 1);
    Ok(nbrs[idx])
}

/// Trajectory of the inverse-degree weighted walk, `length` transitions from `start`.
pub fn weighted_walk(
    view: &mut LimitedGraphView<'_>,
    start: NodeId,
    length: usize,
    seed: u64,
) -> Result<Walk, WalkError> {
    let mut rng = seed::rng(seed);
    if view.query_degree(start)? == 0 {
        return Err(AccessError::IsolatedNode(start).into());
    }
    let mut cache = HashMap::new();
    let mut u = start;
    let mut steps = Vec::with_capacity(length + 1);
    steps.push((u, view.query_degree(u)?));
    for _ in 0..length {
        u = weighted_step(view, &mut cache, u, &mut rng)?;
        steps.push((u, view.query_degree(u)?));
    }
    Ok(Walk {
        start,
        seed,
        burn_in_dropped: 0,
        steps,
    })
}

/// Weighted walk from `start` until it has returned `k_returns` times.
///
/// Fails with [`WalkError::NonReturning`] once the step count exceeds
/// `200 * k * (unique nodes seen so far)`.
pub fn weighted_return_walk(
    view: &mut LimitedGraphView<'_>,
    start: NodeId,
    k_returns: usize,
    seed: u64,
) -> Result<ReturnRecord, WalkError> {
    if k_returns == 0 {
        return Err(WalkError::InvalidArgument("k_returns must be at least 1"));
    }
    let mut rng = seed::rng(seed);
    if view.query_degree(start)? == 0 {
        return Err(AccessError::IsolatedNode(start).into());
    }
    let mut cache = HashMap::new();
    let source_weight = *cumulative_weights(view, &mut cache, start)?
        .1
        .last()
        .expect("start has neighbors");
    let mut seen: HashSet<NodeId> = HashSet::from([start]);
    let mut return_times = Vec::with_capacity(k_returns);
    let mut since_last = 0u64;
    let mut steps = 0u64;
    let mut degree_sum = 0u64;
    let mut u = start;
    while return_times.len() < k_returns {
        u = weighted_step(view, &mut cache, u, &mut rng)?;
        steps += 1;
        since_last += 1;
        degree_sum += view.query_degree(u)? as u64;
        seen.insert(u);
        if u == start {
            return_times.push(since_last);
            since_last = 0;
        } else if steps > 200 * k_returns as u64 * seen.len() as u64 {
            return Err(WalkError::NonReturning {
                steps,
                returns: return_times.len(),
                wanted: k_returns,
            });
        }
    }
    Ok(ReturnRecord {
        source: start,
        source_weight,
        return_times,
        k: k_returns,
        visited_degree_sum: degree_sum,
        unique_nodes: seen.len(),
    })
}

/// I.i.d. uniform draws with replacement from the full node list.
pub fn uniform_node_sample(g: &Graph, count: usize, rng: &mut Rng) -> Vec<NodeId> {
    let n = g.node_count();
    if n == 0 {
        return Vec::new();
    }
    (0..count).map(|_| rng.random_range(0..n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;

    fn cycle(n: u64) -> Graph {
        build_graph(&(0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn k2_alternates() {
        let g = build_graph(&[(0, 1)]).unwrap();
        let mut view = LimitedGraphView::unlimited(&g);
        let w = simple_random_walk(&mut view, 0, 4, 0, 9).unwrap();
        assert_eq!(w.nodes().collect::<Vec<_>>(), vec![0, 1, 0, 1, 0]);
        assert!(w.degrees().all(|d| d == 1));
    }

    #[test]
    fn zero_length_walk_is_its_start() {
        let g = cycle(5);
        let mut view = LimitedGraphView::unlimited(&g);
        let w = simple_random_walk(&mut view, 3, 0, 0, 1).unwrap();
        assert_eq!(w.steps, vec![(3, 2)]);
        assert_eq!(w.len(), 0);
    }

    #[test]
    fn isolated_start_is_rejected() {
        let g = Graph::from_internal_edges(3, &[(0, 1)]);
        let mut view = LimitedGraphView::unlimited(&g);
        assert_eq!(
            simple_random_walk(&mut view, 2, 5, 0, 1),
            Err(WalkError::Access(AccessError::IsolatedNode(2)))
        );
    }

    #[test]
    fn burn_in_is_dropped_and_recorded() {
        let g = cycle(50);
        let mut view = LimitedGraphView::unlimited(&g);
        let full = simple_random_walk(&mut view, 0, 30, 0, 5).unwrap();
        let mut view = LimitedGraphView::unlimited(&g);
        let burnt = simple_random_walk(&mut view, 0, 20, 10, 5).unwrap();
        assert_eq!(burnt.burn_in_dropped, 10);
        assert_eq!(burnt.steps.len(), 21);
        assert_eq!(&full.steps[10..], &burnt.steps[..]);
    }

    #[test]
    fn max_degree_on_regular_graph_matches_simple_walk() {
        let g = cycle(40);
        let mut a = LimitedGraphView::unlimited(&g);
        let mut b = LimitedGraphView::unlimited(&g);
        let w1 = simple_random_walk(&mut a, 0, 500, 0, 77).unwrap();
        let w2 = max_degree_walk(&mut b, 0, 500, 0, 2, 77).unwrap();
        assert_eq!(w1.steps, w2.steps);
    }

    #[test]
    fn max_degree_rejects_small_bound() {
        let g = build_graph(&[(0, 1), (0, 2), (0, 3)]).unwrap();
        let mut view = LimitedGraphView::unlimited(&g);
        assert!(matches!(
            max_degree_walk(&mut view, 0, 3, 0, 2, 0),
            Err(WalkError::DMaxTooSmall { node: 0, degree: 3, d_max: 2 })
        ));
    }

    #[test]
    fn star_center_weight() {
        let g = build_graph(&[(0, 1), (0, 2), (0, 3)]).unwrap();
        let mut view = LimitedGraphView::unlimited(&g);
        let rec = weighted_return_walk(&mut view, 0, 3, 1).unwrap();
        assert!((rec.source_weight - 4.0).abs() < 1e-12);
        // every excursion from the center is center -> leaf -> center
        assert_eq!(rec.return_times, vec![2, 2, 2]);
        assert_eq!(rec.total_time(), 6);
    }

    #[test]
    fn cycle_weights_are_uniform() {
        let g = cycle(10);
        let mut view = LimitedGraphView::unlimited(&g);
        let rec = weighted_return_walk(&mut view, 4, 5, 3).unwrap();
        assert!((rec.source_weight - 2.0).abs() < 1e-12);
        assert!(rec.return_times.iter().all(|&z| z >= 2 && z % 2 == 0));
    }

    #[test]
    fn zero_returns_is_invalid() {
        let g = cycle(10);
        let mut view = LimitedGraphView::unlimited(&g);
        assert!(matches!(
            weighted_return_walk(&mut view, 0, 0, 0),
            Err(WalkError::InvalidArgument(_))
        ));
    }

    #[test]
    fn uniform_sample_edge_cases() {
        let single = Graph::from_internal_edges(1, &[]);
        let mut rng = seed::rng(1);
        assert!(uniform_node_sample(&single, 20, &mut rng).iter().all(|&u| u == 0));
        assert!(uniform_node_sample(&cycle(4), 0, &mut rng).is_empty());
    }

    #[test]
    fn walk_json_shape() {
        let w = Walk {
            start: 1,
            seed: 7,
            burn_in_dropped: 0,
            steps: vec![(1, 2), (2, 1)],
        };
        let json = serde_json::to_string(&w).unwrap();
        assert_eq!(
            json,
            r#"{"start":1,"seed":7,"burn_in_dropped":0,"steps":[[1,2],[2,1]]}"#
        );
        let back: Walk = serde_json::from_str(r#"{"start":1,"seed":7,"steps":[[1,2],[2,1]]}"#).unwrap();
        assert_eq!(back, w);
    }
}
