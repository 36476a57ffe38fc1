//! Prompt construction from walk statistics.
//!
//! Rendering is a pure function of the statistics, the task parameters and the
//! frozen template version; the same inputs always give byte-identical text.

mod stats;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use stats::{
    anonymize, combined_walk_stats, compute_walk_stats, Anonymizer, NodeVisit, WalkStats, EXTREME_DEGREES,
    OFFSET_RANGE, SAMPLED_NAMES,
};

pub const TEMPLATE_VERSION: &str = "template_v1";
pub const HISTOGRAM_BINS: usize = 50;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PromptError {
    #[error("walk has no steps")]
    EmptyWalk,
    #[error("no walk statistics given")]
    EmptyStats,
    #[error("unknown task {0:?}")]
    UnknownTask(String),
    #[error("invalid task parameter: {0}")]
    InvalidParams(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Size,
    Community,
    Structure,
    Topk,
}

impl Task {
    pub const ALL: [Task; 4] = [Task::Size, Task::Community, Task::Structure, Task::Topk];

    pub fn as_str(self) -> &'static str {
        match self {
            Task::Size => "size",
            Task::Community => "community",
            Task::Structure => "structure",
            Task::Topk => "topk",
        }
    }

    pub fn parse(s: &str) -> Result<Self, PromptError> {
        Self::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| PromptError::UnknownTask(s.to_string()))
    }
}

impl std::fmt::Display for Task {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which count a size prompt asks for.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeTarget {
    #[default]
    Nodes,
    Edges,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskParams {
    pub size_target: SizeTarget,
    pub k: usize,
    pub measure: String,
}

impl Default for TaskParams {
    fn default() -> Self {
        Self {
            size_target: SizeTarget::Nodes,
            k: 20,
            measure: "pagerank".to_string(),
        }
    }
}

pub const MEASURES: [&str; 3] = ["betweenness", "closeness", "pagerank"];

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub graph_id: String,
    pub walk_seeds: Vec<u64>,
    pub config: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptArtifact {
    pub task: Task,
    pub text: String,
    pub token_estimate: usize,
    pub provenance: Provenance,
}

/// Rough token count: one token per four bytes, rounded up.
pub fn estimate_tokens(text: &str) -> usize {
    text.len().div_ceil(4)
}

fn join<I: IntoIterator<Item = String>>(items: I) -> String {
    items.into_iter().collect::<Vec<_>>().join(", ")
}

fn opt(v: Option<usize>) -> String {
    v.map_or_else(|| "none".to_string(), |x| x.to_string())
}

fn pairs(v: &[(u64, usize)]) -> String {
    join(v.iter().map(|(n, d)| format!("{n}: {d}")))
}

/// Most frequent degrees (ties to the smaller degree), the rest lumped into a tail bucket.
fn histogram_line(h: &BTreeMap<usize, usize>) -> String {
    let mut bins: Vec<(usize, usize)> = h.iter().map(|(&d, &c)| (d, c)).collect();
    bins.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let tail: usize = bins.iter().skip(HISTOGRAM_BINS).map(|b| b.1).sum();
    let mut kept: Vec<(usize, usize)> = bins.into_iter().take(HISTOGRAM_BINS).collect();
    kept.sort();
    let mut line = join(kept.iter().map(|(d, c)| format!("{d}: {c}")));
    if tail > 0 {
        let _ = write!(line, ", other: {tail}");
    }
    line
}

fn size_section(out: &mut String, title: &str, s: &WalkStats) {
    let _ = writeln!(out, "## {title}");
    let _ = writeln!(out, "walk_length: {}", s.walk_length);
    let _ = writeln!(out, "unique_nodes: {}", s.unique_nodes);
    let _ = writeln!(out, "unique_edges: {}", s.unique_edges);
    let _ = writeln!(out, "first_collision_step: {}", opt(s.first_collision_step));
    let _ = writeln!(out, "first_return_step: {}", opt(s.first_return_step));
    let _ = writeln!(out, "new_nodes_per_10_percent: {}", join(s.decile_new_nodes.iter().map(|c| c.to_string())));
    let _ = writeln!(out, "sampled_node_names: {}", join(s.sampled_names.iter().map(|n| n.to_string())));
    let _ = writeln!(out, "highest_degree_nodes: {}", pairs(&s.top10_degrees));
    let _ = writeln!(out, "lowest_degree_nodes: {}", pairs(&s.bottom10_degrees));
    let _ = writeln!(out, "degree_histogram: {}", histogram_line(&s.degree_histogram));
    let _ = writeln!(out, "average_degree: {:.4}", s.avg_degree);
    out.push('\n');
}

fn records_section(out: &mut String, title: &str, s: &WalkStats) {
    let _ = writeln!(out, "## {title}");
    let _ = writeln!(out, "walk_length: {}", s.walk_length);
    let _ = writeln!(out, "unique_nodes: {}", s.unique_nodes);
    let records = s
        .node_visits
        .iter()
        .map(|v| format!("{}: [{}, {}]", v.name, v.visits, v.degree))
        .collect::<Vec<_>>()
        .join(", ");
    let _ = writeln!(out, "node_records: {{{records}}}");
    out.push('\n');
}

fn instruction(task: Task, params: &TaskParams) -> Result<String, PromptError> {
    Ok(match task {
        Task::Size => {
            let what = match params.size_target {
                SizeTarget::Nodes => "nodes",
                SizeTarget::Edges => "edges",
            };
            format!(
                "You are given statistics of random walks on an undirected graph that you cannot see in full. \
                 Node names have been shifted by a constant. \
                 Estimate the total number of {what} in the graph."
            )
        }
        Task::Community => "You are given random walks on an undirected graph. For each walk, node_records maps \
             a node name to [number of visits, degree]. Estimate how many communities the visited nodes form."
            .to_string(),
        Task::Structure => "You are given random walks on an undirected graph. For each walk, node_records maps \
             a node name to [number of visits, degree]. Decide which generator produced the graph: \
             BA (preferential attachment), ER (uniform random edges), LFR (planted communities) or Grid (lattice)."
            .to_string(),
        Task::Topk => {
            if params.k == 0 {
                return Err(PromptError::InvalidParams("k must be positive".into()));
            }
            if !MEASURES.contains(&params.measure.as_str()) {
                return Err(PromptError::InvalidParams(format!("unknown measure {:?}", params.measure)));
            }
            format!(
                "You are given random walks on an undirected graph. For each walk, node_records maps \
                 a node name to [number of visits, degree]. List the {} visited nodes with the highest {} \
                 in the full graph, most central first.",
                params.k, params.measure
            )
        }
    })
}

fn directive(task: Task, params: &TaskParams) -> String {
    match task {
        Task::Size => "End your response with a final line of the form `ANSWER: <number>`.".to_string(),
        Task::Community => "End your response with a final line of the form `ANSWER: <number of communities>`.".to_string(),
        Task::Structure => "End your response with a final line of the form `ANSWER: <BA|ER|LFR|Grid>`.".to_string(),
        Task::Topk => format!(
            "End your response with a final line of the form `ANSWER: <name1>, <name2>, ...` listing {} node names.",
            params.k
        ),
    }
}

pub fn render_prompt(
    task: Task,
    walks: &[WalkStats],
    combined: &WalkStats,
    params: &TaskParams,
    provenance: Provenance,
) -> Result<PromptArtifact, PromptError> {
    if walks.is_empty() {
        return Err(PromptError::EmptyStats);
    }
    let mut text = String::new();
    let _ = writeln!(text, "# {}", TEMPLATE_VERSION);
    let _ = writeln!(text, "{}", instruction(task, params)?);
    text.push('\n');
    let section = match task {
        Task::Size => size_section,
        _ => records_section,
    };
    for (i, s) in walks.iter().enumerate() {
        section(&mut text, &format!("Walk {}", i + 1), s);
    }
    section(&mut text, "All walks combined", combined);
    let _ = writeln!(text, "{}", directive(task, params));
    Ok(PromptArtifact {
        task,
        token_estimate: estimate_tokens(&text),
        text,
        provenance,
    })
}
