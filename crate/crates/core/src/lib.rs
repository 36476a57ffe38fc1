//! Estimation of large-graph properties from random-walk samples.
//!
//! The crate is organised bottom-up:
//!
//! - [`graph`]: compressed undirected graphs, edgelist IO and synthetic generators.
//! - [`access`]: the partial-access view that samplers are restricted to.
//! - [`walkers`]: simple, Metropolis-Hastings, max-degree and weighted return walks.
//! - [`estimators`]: capture-recapture size estimation and the end-to-end pipelines.
//! - [`community`]: walk-induced subgraphs, modularity and three detection baselines.
//! - [`centrality`]: betweenness, closeness, PageRank, visit ranking and a structure classifier.
//! - [`promptgen`]: walk statistics, anonymisation and prompt rendering.
//!
//! Numeric kernels are generic over [`Scalar`]; the aliases below fix the common
//! precision choices.

#![forbid(unsafe_code)]

pub mod access;
pub mod centrality;
pub mod community;
pub mod estimators;
pub mod graph;
pub mod promptgen;
pub mod scalar;
pub mod seed;
pub mod walkers;

pub use access::{AccessError, CostPolicy, LimitedGraphView};
pub use graph::{CommunityLabels, GeneratorSpec, Graph, GraphError, NodeId};
pub use scalar::Scalar;
pub use walkers::{ReturnRecord, Walk, WalkError};

/// Double-precision size estimate.
pub type SizeEstimate64 = estimators::SizeEstimate<f64>;
/// Single-precision size estimate.
pub type SizeEstimate32 = estimators::SizeEstimate<f32>;
/// Double-precision node ranking.
pub type RankedNodes64 = centrality::RankedNodes<f64>;
/// Single-precision node ranking.
pub type RankedNodes32 = centrality::RankedNodes<f32>;
