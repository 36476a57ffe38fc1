//! Graph-size and edge-count estimation.
//!
//! Capture-recapture: two independent node samples `S1`, `S2` with `C` their common
//! distinct nodes give `N = (|S1| + 1)(|S2| + 1) / |C| - 1`. Sample sizes are
//! counted as distinct nodes, so repeated draws (sampling with replacement, lazy
//! walk self-loops) do not inflate the estimate. Edges follow as
//! `M = mean_degree * N / 2`.

use std::fmt;

use rand::Rng as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::access::LimitedGraphView;
use crate::graph::{Graph, NodeId};
use crate::scalar::Scalar;
use crate::seed;
use crate::walkers::{self, ReturnRecord, Walk, WalkError, WalkKind};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimateError {
    #[error("empty sample")]
    EmptySample,
    #[error("samples share no node; capture-recapture is undefined")]
    CollisionFree,
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, EstimateError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeMethod {
    Uniform,
    Mh,
    MaxDegree,
    ReturnWalk,
    Srw,
}

impl SizeMethod {
    pub const ALL: [SizeMethod; 5] = [
        SizeMethod::Uniform,
        SizeMethod::Mh,
        SizeMethod::MaxDegree,
        SizeMethod::ReturnWalk,
        SizeMethod::Srw,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SizeMethod::Uniform => "uniform",
            SizeMethod::Mh => "mh",
            SizeMethod::MaxDegree => "max_degree",
            SizeMethod::ReturnWalk => "return_walk",
            SizeMethod::Srw => "srw",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.as_str() == s.trim())
    }
}

impl fmt::Display for SizeMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A node sample with aligned degrees.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSet {
    pub nodes: Vec<NodeId>,
    pub degrees: Vec<usize>,
    pub method: SizeMethod,
}

impl SampleSet {
    pub fn from_walk(walk: &Walk, method: SizeMethod) -> Self {
        Self {
            nodes: walk.nodes().collect(),
            degrees: walk.degrees().collect(),
            method,
        }
    }

    pub fn from_nodes(g: &Graph, nodes: Vec<NodeId>, method: SizeMethod) -> Self {
        let degrees = nodes.iter().map(|&u| g.degree(u)).collect();
        Self {
            nodes,
            degrees,
            method,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Sorted distinct nodes.
    pub fn distinct(&self) -> Vec<NodeId> {
        let mut d = self.nodes.clone();
        d.sort_unstable();
        d.dedup();
        d
    }
}

fn sorted_intersection(a: &[NodeId], b: &[NodeId]) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

/// Chapman's estimator from set sizes and overlap.
pub fn chapman_from_counts<T: Scalar>(size1: usize, size2: usize, common: usize) -> Result<T> {
    if size1 == 0 || size2 == 0 {
        return Err(EstimateError::EmptySample);
    }
    if common == 0 {
        return Err(EstimateError::CollisionFree);
    }
    let one = T::one();
    Ok((T::from_count(size1) + one) * (T::from_count(size2) + one) / T::from_count(common) - one)
}

/// Chapman estimate of the population size from two samples.
pub fn chapman_estimate<T: Scalar>(s1: &SampleSet, s2: &SampleSet) -> Result<T> {
    let (a, b) = (s1.distinct(), s2.distinct());
    chapman_from_counts(a.len(), b.len(), sorted_intersection(&a, &b))
}

/// `M = mean(degrees) * n_hat / 2`.
pub fn edge_estimate<T: Scalar>(n_hat: T, degrees: &[usize]) -> Result<T> {
    if degrees.is_empty() {
        return Err(EstimateError::EmptySample);
    }
    let mean = T::from_count(degrees.iter().sum::<usize>()) / T::from_count(degrees.len());
    Ok(edges_from_mean_degree(n_hat, mean))
}

#[inline]
fn edges_from_mean_degree<T: Scalar>(n_hat: T, mean_degree: T) -> T {
    mean_degree * n_hat / T::lit(2.0)
}

/// `n = Z(k) w(u) / 2k`.
///
/// Panics if the record holds no return.
pub fn return_time_estimate<T: Scalar>(rec: &ReturnRecord) -> T {
    assert!(rec.k >= 1, "return record needs at least one return");
    T::from_count(rec.total_time() as usize) * T::lit(rec.source_weight)
        / (T::lit(2.0) * T::from_count(rec.k))
}

/// How the sampling budget maps to the two capture-recapture samples.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetSplit {
    /// Each sample holds `budget_fraction * n` draws.
    #[default]
    PerSample,
    /// The two samples share `budget_fraction * n` draws evenly.
    Even,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeConfig {
    pub budget_fraction: f64,
    pub burn_in_fraction: f64,
    pub split: BudgetSplit,
    pub k_returns: usize,
    pub return_walks: usize,
}

impl Default for SizeConfig {
    fn default() -> Self {
        Self {
            budget_fraction: 0.20,
            burn_in_fraction: 0.10,
            split: BudgetSplit::PerSample,
            k_returns: 10,
            return_walks: 5,
        }
    }
}

impl SizeConfig {
    /// Draws per capture-recapture sample for a graph of `n` nodes (at least 1).
    pub fn sample_size(&self, n: usize) -> usize {
        let total = self.budget_fraction * n as f64;
        let per = match self.split {
            BudgetSplit::PerSample => total,
            BudgetSplit::Even => total / 2.0,
        };
        (per.round() as usize).max(1)
    }

    pub fn burn_in(&self, n: usize) -> usize {
        (self.burn_in_fraction * n as f64).round() as usize
    }

    fn validate(&self) -> Result<()> {
        let ok = self.budget_fraction > 0.0
            && self.budget_fraction <= 1.0
            && self.burn_in_fraction >= 0.0
            && self.burn_in_fraction <= 1.0
            && self.k_returns >= 1
            && self.return_walks >= 1;
        if ok {
            Ok(())
        } else {
            Err(EstimateError::InvalidConfig(format!("{self:?}")))
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Distinct common nodes `|C|` (capture-recapture methods).
    pub common: Option<usize>,
    /// Distinct nodes per sample.
    pub distinct: Vec<usize>,
    /// Draws per sample, including repeats.
    pub draws: Vec<usize>,
    pub mean_degree: f64,
    pub budget_spent: u64,
    /// Per-walk estimates for the return-time method.
    pub walk_estimates: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeEstimate<T> {
    pub method: SizeMethod,
    pub n_hat: T,
    pub m_hat: T,
    pub seed: u64,
    pub diagnostics: Diagnostics,
}

/// Uniformly random node with at least one neighbor.
fn random_start(g: &Graph, seed: u64) -> Result<NodeId> {
    let mut rng = seed::rng(seed);
    for _ in 0..10_000 {
        let u = rng.random_range(0..g.node_count());
        if g.degree(u) > 0 {
            return Ok(u);
        }
    }
    Err(EstimateError::InvalidConfig("graph has no edges".into()))
}

/// End-to-end size estimate of `g` with one method.
///
/// Walk-based methods only touch `g` through a [`LimitedGraphView`]; `n` (to size
/// the budget), the start node and, for `max_degree`, `d_max` come from outside
/// the view.
pub fn estimate_size<T: Scalar>(
    g: &Graph,
    method: SizeMethod,
    cfg: &SizeConfig,
    seed: u64,
) -> Result<SizeEstimate<T>> {
    cfg.validate()?;
    if g.node_count() == 0 || g.edge_count() == 0 {
        return Err(EstimateError::EmptySample);
    }
    let n = g.node_count();
    match method {
        SizeMethod::ReturnWalk => estimate_by_return_walks(g, cfg, seed),
        SizeMethod::Uniform => {
            let draws = cfg.sample_size(n);
            let sets: Vec<SampleSet> = (0..2)
                .map(|i| {
                    let mut rng = seed::rng(seed::mix(seed, i));
                    let nodes = walkers::uniform_node_sample(g, draws, &mut rng);
                    SampleSet::from_nodes(g, nodes, method)
                })
                .collect();
            capture_recapture(&sets, method, seed, 0)
        }
        SizeMethod::Mh | SizeMethod::Srw | SizeMethod::MaxDegree => {
            let kind = match method {
                SizeMethod::Mh => WalkKind::MetropolisHastings,
                SizeMethod::Srw => WalkKind::Simple,
                _ => WalkKind::MaxDegree {
                    d_max: g.max_degree(),
                },
            };
            let length = cfg.sample_size(n) - 1;
            let burn_in = cfg.burn_in(n);
            let mut spent = 0;
            let mut sets = Vec::with_capacity(2);
            for i in 0..2u64 {
                let start = random_start(g, seed::mix(seed, 100 + i))?;
                let mut view = LimitedGraphView::unlimited(g);
                let walk = walkers::run_walk(kind, &mut view, start, length, burn_in, seed::mix(seed, i))?;
                spent += view.spent();
                sets.push(SampleSet::from_walk(&walk, method));
            }
            capture_recapture(&sets, method, seed, spent)
        }
    }
}

fn capture_recapture<T: Scalar>(
    sets: &[SampleSet],
    method: SizeMethod,
    seed: u64,
    budget_spent: u64,
) -> Result<SizeEstimate<T>> {
    let n_hat: T = chapman_estimate(&sets[0], &sets[1])?;
    let degrees: Vec<usize> = sets.iter().flat_map(|s| s.degrees.iter().copied()).collect();
    let m_hat = edge_estimate(n_hat, &degrees)?;
    let (a, b) = (sets[0].distinct(), sets[1].distinct());
    Ok(SizeEstimate {
        method,
        n_hat,
        m_hat,
        seed,
        diagnostics: Diagnostics {
            common: Some(sorted_intersection(&a, &b)),
            distinct: vec![a.len(), b.len()],
            draws: sets.iter().map(SampleSet::len).collect(),
            mean_degree: degrees.iter().sum::<usize>() as f64 / degrees.len() as f64,
            budget_spent,
            walk_estimates: Vec::new(),
        },
    })
}

fn estimate_by_return_walks<T: Scalar>(g: &Graph, cfg: &SizeConfig, seed: u64) -> Result<SizeEstimate<T>> {
    let burn_in = cfg.burn_in(g.node_count());
    let mut estimates = Vec::with_capacity(cfg.return_walks);
    let mut spent = 0;
    let (mut degree_sum, mut time) = (0u64, 0u64);
    for i in 0..cfg.return_walks as u64 {
        let start = random_start(g, seed::mix(seed, 100 + i))?;
        let mut view = LimitedGraphView::unlimited(g);
        let lead = walkers::simple_random_walk(&mut view, start, 0, burn_in, seed::mix(seed, 200 + i))?;
        let source = lead.steps[0].0;
        let rec = walkers::weighted_return_walk(&mut view, source, cfg.k_returns, seed::mix(seed, i))?;
        spent += view.spent();
        degree_sum += rec.visited_degree_sum;
        time += rec.total_time();
        estimates.push(return_time_estimate::<T>(&rec));
    }
    let n_hat = estimates.iter().copied().sum::<T>() / T::from_count(estimates.len());
    let mean_degree = degree_sum as f64 / time as f64;
    Ok(SizeEstimate {
        method: SizeMethod::ReturnWalk,
        n_hat,
        m_hat: edges_from_mean_degree(n_hat, T::lit(mean_degree)),
        seed,
        diagnostics: Diagnostics {
            common: None,
            distinct: Vec::new(),
            draws: Vec::new(),
            mean_degree,
            budget_spent: spent,
            walk_estimates: estimates.iter().map(|e| e.to_f64_lossy()).collect(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;

    fn set(nodes: &[NodeId]) -> SampleSet {
        SampleSet {
            nodes: nodes.to_vec(),
            degrees: vec![1; nodes.len()],
            method: SizeMethod::Uniform,
        }
    }

    #[test]
    fn chapman_formula() {
        let v: f64 = chapman_estimate(&set(&[1, 2, 3]), &set(&[2, 3, 4, 5])).unwrap();
        assert_eq!(v, 9.0);
        let v32: f32 = chapman_from_counts(3, 4, 2).unwrap();
        assert_eq!(v32, 9.0);
    }

    #[test]
    fn chapman_without_overlap() {
        let r: Result<f64> = chapman_estimate(&set(&[1, 2]), &set(&[3, 4]));
        assert_eq!(r, Err(EstimateError::CollisionFree));
        let r: Result<f64> = chapman_estimate(&set(&[]), &set(&[3, 4]));
        assert_eq!(r, Err(EstimateError::EmptySample));
    }

    #[test]
    fn chapman_counts_distinct_nodes() {
        let a: f64 = chapman_estimate(&set(&[1, 1, 2, 3]), &set(&[2, 2, 3, 4, 5])).unwrap();
        assert_eq!(a, 9.0);
    }

    #[test]
    fn exhaustive_samples_recover_n() {
        for n in 1..50usize {
            let all: Vec<NodeId> = (0..n).collect();
            let v: f64 = chapman_estimate(&set(&all), &set(&all)).unwrap();
            // (n+1)^2 / n - 1
            assert!((v - (n as f64 + 1.0 + 1.0 / n as f64)).abs() < 1e-9);
        }
    }

    #[test]
    fn edge_formula() {
        assert_eq!(edge_estimate(100.0f64, &[4, 4, 4]).unwrap(), 200.0);
        assert_eq!(edge_estimate(5.0f64, &[4; 5]).unwrap(), 10.0);
        assert_eq!(edge_estimate::<f64>(5.0, &[]), Err(EstimateError::EmptySample));
    }

    #[test]
    fn return_time_formula() {
        let rec = ReturnRecord {
            source: 0,
            source_weight: 2.0,
            return_times: vec![1000; 10],
            k: 10,
            visited_degree_sum: 0,
            unique_nodes: 0,
        };
        assert_eq!(return_time_estimate::<f64>(&rec), 1000.0);
    }

    #[test]
    fn uniform_on_small_complete_graph() {
        let mut edges = Vec::new();
        for u in 0..20u64 {
            for v in (u + 1)..20 {
                edges.push((u, v));
            }
        }
        let g = build_graph(&edges).unwrap();
        let cfg = SizeConfig {
            budget_fraction: 1.0,
            ..SizeConfig::default()
        };
        // expectation of the estimator for two 20-draw samples of K20, by simulation: 22.72
        let mean = (0..400)
            .map(|s| {
                let e: SizeEstimate<f64> = estimate_size(&g, SizeMethod::Uniform, &cfg, s).unwrap();
                e.n_hat
            })
            .sum::<f64>()
            / 400.0;
        assert!((mean - 22.72).abs() <= 1.0, "{mean}");
    }

    #[test]
    fn pipelines_are_deterministic() {
        let g = build_graph(&(0..60u64).map(|i| (i, (i * 7 + 3) % 60)).chain((0..60).map(|i| (i, (i + 1) % 60))).collect::<Vec<_>>()).unwrap();
        for m in SizeMethod::ALL {
            let a: Result<SizeEstimate<f64>> = estimate_size(&g, m, &SizeConfig::default(), 11);
            let b: Result<SizeEstimate<f64>> = estimate_size(&g, m, &SizeConfig::default(), 11);
            assert_eq!(a, b, "{m}");
        }
    }

    #[test]
    fn invalid_config() {
        let g = build_graph(&[(0, 1)]).unwrap();
        let cfg = SizeConfig {
            budget_fraction: 0.0,
            ..SizeConfig::default()
        };
        assert!(matches!(
            estimate_size::<f64>(&g, SizeMethod::Uniform, &cfg, 0),
            Err(EstimateError::InvalidConfig(_))
        ));
    }

    #[test]
    fn budget_split() {
        let per = SizeConfig::default();
        let even = SizeConfig {
            split: BudgetSplit::Even,
            ..SizeConfig::default()
        };
        assert_eq!(per.sample_size(1000), 200);
        assert_eq!(even.sample_size(1000), 100);
        assert_eq!(per.burn_in(1000), 100);
    }
}
