//! Per-walk summary statistics and node-name anonymization.

use std::collections::{BTreeMap, HashMap, HashSet};

use rand::seq::index::sample;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::PromptError;
use crate::graph::NodeId;
use crate::seed;
use crate::walkers::Walk;

pub const SAMPLED_NAMES: usize = 20;
pub const EXTREME_DEGREES: usize = 10;
pub const OFFSET_RANGE: std::ops::Range<u64> = 1_000_000..1_000_000_000;

/// Shifts every node id by one per-graph offset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Anonymizer {
    pub offset: u64,
}

impl Anonymizer {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            offset: seed::rng(seed).random_range(OFFSET_RANGE),
        }
    }

    pub fn with_offset(offset: u64) -> Self {
        Self { offset }
    }

    pub fn name(&self, u: NodeId) -> u64 {
        u as u64 + self.offset
    }

    /// Inverse of [`Anonymizer::name`]; `None` for names outside the image.
    pub fn node(&self, name: u64) -> Option<NodeId> {
        name.checked_sub(self.offset).map(|u| u as NodeId)
    }
}

/// Mapping from each node to its anonymized name.
pub fn anonymize(nodes: &[NodeId], seed: u64) -> BTreeMap<NodeId, u64> {
    let a = Anonymizer::from_seed(seed);
    nodes.iter().map(|&u| (u, a.name(u))).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeVisit {
    pub name: u64,
    pub visits: usize,
    pub degree: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkStats {
    pub walk_length: usize,
    pub unique_nodes: usize,
    pub unique_edges: usize,
    pub first_collision_step: Option<usize>,
    pub first_return_step: Option<usize>,
    pub decile_new_nodes: [usize; 10],
    pub sampled_names: Vec<u64>,
    pub top10_degrees: Vec<(u64, usize)>,
    pub bottom10_degrees: Vec<(u64, usize)>,
    pub degree_histogram: BTreeMap<usize, usize>,
    pub avg_degree: f64,
    /// Visit count and degree of each distinct node, ordered by name.
    pub node_visits: Vec<NodeVisit>,
}

pub fn compute_walk_stats(walk: &Walk, anon: &Anonymizer, seed: u64) -> Result<WalkStats, PromptError> {
    combined_walk_stats(std::slice::from_ref(walk), anon, seed)
}

/// Statistics of the concatenated walks; edges are only counted within a walk.
pub fn combined_walk_stats(walks: &[Walk], anon: &Anonymizer, seed: u64) -> Result<WalkStats, PromptError> {
    let positions: usize = walks.iter().map(|w| w.steps.len()).sum();
    if positions == 0 {
        return Err(PromptError::EmptyWalk);
    }
    let start = walks.iter().find(|w| !w.steps.is_empty()).map(|w| w.steps[0].0);
    let mut visits: HashMap<NodeId, (usize, usize)> = HashMap::new();
    let mut edges: HashSet<(NodeId, NodeId)> = HashSet::new();
    let mut first_collision = None;
    let mut first_return = None;
    let mut decile = [0usize; 10];
    let mut order: Vec<NodeId> = Vec::new();
    let mut pos = 0;
    for w in walks {
        for (i, &(u, d)) in w.steps.iter().enumerate() {
            if i > 0 {
                let prev = w.steps[i - 1].0;
                if prev != u {
                    edges.insert((prev.min(u), prev.max(u)));
                }
            }
            let entry = visits.entry(u).or_insert((0, d));
            if entry.0 == 0 {
                decile[pos * 10 / positions] += 1;
                order.push(u);
            } else if first_collision.is_none() {
                first_collision = Some(pos);
            }
            entry.0 += 1;
            if pos > 0 && first_return.is_none() && Some(u) == start {
                first_return = Some(pos);
            }
            pos += 1;
        }
    }

    let mut by_degree: Vec<(u64, usize)> = order.iter().map(|&u| (anon.name(u), visits[&u].1)).collect();
    by_degree.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let top10_degrees = by_degree.iter().take(EXTREME_DEGREES).copied().collect();
    by_degree.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
    let bottom10_degrees = by_degree.iter().take(EXTREME_DEGREES).copied().collect();

    let mut rng = seed::rng(seed);
    let picks = sample(&mut rng, order.len(), SAMPLED_NAMES.min(order.len()));
    let sampled_names = picks.into_iter().map(|i| anon.name(order[i])).collect();

    let mut degree_histogram = BTreeMap::new();
    let mut degree_sum = 0usize;
    for &(_, d) in visits.values() {
        *degree_histogram.entry(d).or_insert(0) += 1;
        degree_sum += d;
    }
    let mut node_visits: Vec<NodeVisit> = visits
        .iter()
        .map(|(&u, &(visits, degree))| NodeVisit {
            name: anon.name(u),
            visits,
            degree,
        })
        .collect();
    node_visits.sort_by_key(|v| v.name);

    Ok(WalkStats {
        walk_length: positions - 1,
        unique_nodes: order.len(),
        unique_edges: edges.len(),
        first_collision_step: first_collision,
        first_return_step: first_return,
        decile_new_nodes: decile,
        sampled_names,
        top10_degrees,
        bottom10_degrees,
        degree_histogram,
        avg_degree: degree_sum as f64 / order.len() as f64,
        node_visits,
    })
}
