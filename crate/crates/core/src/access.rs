//! Partial-access view over a [`Graph`].
//!
//! Samplers only ever see a [`LimitedGraphView`]: it answers degree and neighbor
//! queries for nodes they already hold, and meters every answer. It has no
//! accessor for the node count, the edge count, a node list or the maximum degree.
//!
//! Cost model: the first degree query for a node costs one unit, enumerating a
//! node's neighbors costs its degree (once per session), and each random-neighbor
//! draw costs one unit. Repeated degree and neighbor queries are free.

use rand::Rng as _;
use thiserror::Error;

use crate::graph::{Graph, NodeId};
use crate::seed::Rng;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AccessError {
    #[error("query budget exhausted: need {needed}, {remaining} left")]
    BudgetExhausted { needed: u64, remaining: u64 },
    #[error("node {0} has no neighbors")]
    IsolatedNode(NodeId),
    #[error("node {0} is not part of the graph")]
    InvalidNode(NodeId),
}

/// Whether neighbor enumeration also reveals the neighbors' degrees.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CostPolicy {
    #[default]
    Metered,
    FreeNeighborDegrees,
}

const TOUCHED: u8 = 1;
const LISTED: u8 = 2;

pub struct LimitedGraphView<'g> {
    graph: &'g Graph,
    budget: Option<u64>,
    spent: u64,
    policy: CostPolicy,
    flags: Vec<u8>,
}

impl<'g> LimitedGraphView<'g> {
    pub fn unlimited(graph: &'g Graph) -> Self {
        Self::new(graph, None, CostPolicy::Metered)
    }

    pub fn with_budget(graph: &'g Graph, budget: u64) -> Self {
        Self::new(graph, Some(budget), CostPolicy::Metered)
    }

    pub fn new(graph: &'g Graph, budget: Option<u64>, policy: CostPolicy) -> Self {
        Self {
            graph,
            budget,
            spent: 0,
            policy,
            flags: vec![0; graph.node_count()],
        }
    }

    pub fn spent(&self) -> u64 {
        self.spent
    }

    /// Remaining budget, `None` when unlimited.
    pub fn remaining(&self) -> Option<u64> {
        self.budget.map(|b| b - self.spent)
    }

    pub fn policy(&self) -> CostPolicy {
        self.policy
    }

    fn check(&self, u: NodeId) -> Result<(), AccessError> {
        if u < self.flags.len() {
            Ok(())
        } else {
            Err(AccessError::InvalidNode(u))
        }
    }

    fn charge(&mut self, cost: u64) -> Result<(), AccessError> {
        if let Some(b) = self.budget {
            let remaining = b - self.spent;
            if cost > remaining {
                return Err(AccessError::BudgetExhausted {
                    needed: cost,
                    remaining,
                });
            }
        }
        self.spent += cost;
        Ok(())
    }

    pub fn query_degree(&mut self, u: NodeId) -> Result<usize, AccessError> {
        self.check(u)?;
        if self.flags[u] & TOUCHED == 0 {
            self.charge(1)?;
            self.flags[u] |= TOUCHED;
        }
        Ok(self.graph.degree(u))
    }

    /// Draws a uniform neighbor of `u`.
    pub fn sample_random_neighbor(&mut self, u: NodeId, rng: &mut Rng) -> Result<NodeId, AccessError> {
        self.check(u)?;
        let nbrs = self.graph.neighbors(u);
        if nbrs.is_empty() {
            return Err(AccessError::IsolatedNode(u));
        }
        self.charge(1)?;
        Ok(nbrs[rng.random_range(0..nbrs.len())])
    }

    pub fn query_neighbors(&mut self, u: NodeId) -> Result<&'g [NodeId], AccessError> {
        self.check(u)?;
        let nbrs = self.graph.neighbors(u);
        if self.flags[u] & LISTED == 0 {
            self.charge(nbrs.len() as u64)?;
            self.flags[u] |= LISTED;
            if self.policy == CostPolicy::FreeNeighborDegrees {
                for &v in nbrs {
                    self.flags[v] |= TOUCHED;
                }
            }
        }
        Ok(nbrs)
    }
}
