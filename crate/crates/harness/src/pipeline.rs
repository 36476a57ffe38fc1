//! Per-graph method pipelines and prompt construction.

use std::collections::BTreeMap;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};
use walkest_core::centrality::{betweenness, classify_structure, closeness, pagerank, visit_frequency_ranking};
use walkest_core::community::{greedy_modularity, label_propagation, louvain, walk_induced_subgraph, Partition};
use walkest_core::estimators::{estimate_size, SizeMethod};
use walkest_core::graph::{CommunityLabels, Family, Graph};
use walkest_core::promptgen::{
    combined_walk_stats, compute_walk_stats, render_prompt, Anonymizer, PromptArtifact, Provenance, SizeTarget,
    Task, TaskParams, WalkStats,
};
use walkest_core::walkers::{simple_random_walk, Walk};
use walkest_core::{seed, LimitedGraphView, NodeId};

use crate::benchmark::{GraphEntry, TOP_LIST_LEN};
use crate::config::{parse_pairs, TaskSpec};

/// Communities smaller than this are not counted.
pub const MIN_COMMUNITY_SIZE: usize = 2;

/// Method output carried by an experiment record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Estimate {
    Size {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n_hat: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        m_hat: Option<f64>,
    },
    Community {
        count: usize,
    },
    Structure {
        label: Family,
    },
    Topk {
        nodes: Vec<NodeId>,
    },
}

/// A loaded benchmark graph with its planted labels.
pub struct GraphContext<'a> {
    pub entry: &'a GraphEntry,
    pub graph: Graph,
    pub planted: Option<CommunityLabels>,
}

impl<'a> GraphContext<'a> {
    pub fn new(entry: &'a GraphEntry, graph: Graph) -> Self {
        let planted = entry.truth.planted.as_ref().map(|p| CommunityLabels::from_assignment(p));
        Self { entry, graph, planted }
    }
}

/// Seed of one `(graph, method, trial)` cell, independent of execution order.
pub fn record_seed(master_seed: u64, graph_id: &str, method: &str, trial: usize) -> u64 {
    seed::mix_all(master_seed, &[seed::hash_str(graph_id), seed::hash_str(method), trial as u64])
}

/// Seed shared by every method on one `(graph, trial)`, so they see the same walks.
pub fn walk_seed(master_seed: u64, graph_id: &str, trial: usize) -> u64 {
    record_seed(master_seed, graph_id, "walks", trial)
}

fn walk_length(x: f64) -> usize {
    (x.round() as usize).max(1)
}

/// Independent simple random walks from uniform starts, sharing one metered view.
fn srw_walks(g: &Graph, count: usize, length: usize, burn_in: usize, seed: u64) -> Result<(Vec<Walk>, u64), String> {
    let mut view = LimitedGraphView::unlimited(g);
    let mut rng = seed::rng(seed);
    let mut walks = Vec::with_capacity(count);
    for i in 0..count as u64 {
        let start = rng.random_range(0..g.node_count());
        let w = simple_random_walk(&mut view, start, length, burn_in, seed::mix(seed, i)).map_err(|e| e.to_string())?;
        walks.push(w);
    }
    Ok((walks, view.spent()))
}

/// Walks started from two or three members of every planted community.
fn community_walks(ctx: &GraphContext<'_>, spec: &TaskSpec, seed: u64) -> Result<(Vec<Walk>, u64), String> {
    let planted = ctx.planted.as_ref().ok_or("graph has no planted communities")?;
    let g = &ctx.graph;
    let mut view = LimitedGraphView::unlimited(g);
    let mut rng = seed::rng(seed);
    let mut walks = Vec::new();
    for c in 0..planted.community_count {
        let members = planted.members(c);
        let starts = rng.random_range(spec.seeds_per_community_min..=spec.seeds_per_community_max);
        let chosen: Vec<NodeId> = members.choose_multiple(&mut rng, starts).copied().collect();
        for &start in &chosen {
            let walk_seed = seed::mix(seed, walks.len() as u64);
            let w = simple_random_walk(&mut view, start, spec.community_walk_length, 0, walk_seed)
                .map_err(|e| e.to_string())?;
            walks.push(w);
        }
    }
    walks.shuffle(&mut rng);
    Ok((walks, view.spent()))
}

fn structure_walks(g: &Graph, spec: &TaskSpec, seed: u64) -> Result<(Vec<Walk>, u64), String> {
    let length = walk_length(spec.structure_walk_fraction * g.node_count() as f64);
    let burn_in = (spec.burn_in_fraction * length as f64).round() as usize;
    srw_walks(g, spec.structure_walks, length, burn_in, seed)
}

fn ranking_walks(g: &Graph, spec: &TaskSpec, seed: u64) -> Result<(Vec<Walk>, u64), String> {
    let length = walk_length(spec.topk_walk_multiple * g.node_count() as f64 / spec.topk_walks as f64);
    let burn_in = (spec.burn_in_fraction * length as f64).round() as usize;
    srw_walks(g, spec.topk_walks, length, burn_in, seed)
}

fn size_prompt_walks(g: &Graph, spec: &TaskSpec, seed: u64) -> Result<(Vec<Walk>, u64), String> {
    let length = walk_length(spec.budget_fraction * g.node_count() as f64 / spec.size_walks as f64);
    let burn_in = (spec.burn_in_fraction * length as f64).round() as usize;
    srw_walks(g, spec.size_walks, length, burn_in, seed)
}

/// Walks that feed the prompt (and the walk-based baseline) of `task`.
pub fn task_walks(ctx: &GraphContext<'_>, task: Task, spec: &TaskSpec, seed: u64) -> Result<(Vec<Walk>, u64), String> {
    match task {
        Task::Size => size_prompt_walks(&ctx.graph, spec, seed),
        Task::Community => community_walks(ctx, spec, seed),
        Task::Structure => structure_walks(&ctx.graph, spec, seed),
        Task::Topk => ranking_walks(&ctx.graph, spec, seed),
    }
}

fn detect(method: &str, g: &Graph, seed: u64) -> Result<Partition, String> {
    match method {
        "louvain" => Ok(louvain(g, seed, 1.0)),
        "greedy" => Ok(greedy_modularity(g)),
        "label_propagation" => Ok(label_propagation(g, seed).partition),
        other => Err(format!("unknown community method {other:?}")),
    }
}

fn anonymizer_for(seed: u64) -> Anonymizer {
    Anonymizer::from_seed(seed::mix(seed, 0xA11))
}

/// Runs a classical method on one graph; returns the estimate and the query cost.
pub fn run_method(
    ctx: &GraphContext<'_>,
    spec: &TaskSpec,
    method: &str,
    trial: usize,
) -> Result<(Estimate, u64), String> {
    let master = spec.master_seed;
    let id = &ctx.entry.id;
    let method_seed = record_seed(master, id, method, trial);
    let shared = walk_seed(master, id, trial);
    match spec.task {
        Task::Size => {
            let m = SizeMethod::parse(method).ok_or_else(|| format!("unknown size method {method:?}"))?;
            let est = estimate_size::<f64>(&ctx.graph, m, &spec.size_config(), method_seed).map_err(|e| e.to_string())?;
            Ok((
                Estimate::Size {
                    n_hat: Some(est.n_hat),
                    m_hat: Some(est.m_hat),
                },
                est.diagnostics.budget_spent,
            ))
        }
        Task::Community => {
            let (walks, spent) = community_walks(ctx, spec, shared)?;
            let (sub, _) = walk_induced_subgraph(&ctx.graph, &walks);
            let part = detect(method, &sub, method_seed)?;
            Ok((
                Estimate::Community {
                    count: part.count_at_least(MIN_COMMUNITY_SIZE),
                },
                spent,
            ))
        }
        Task::Structure => {
            if method != "degree_rules" {
                return Err(format!("unknown structure method {method:?}"));
            }
            let (walks, spent) = structure_walks(&ctx.graph, spec, shared)?;
            let stats = walk_stats(&walks, &anonymizer_for(shared))?;
            let label = classify_structure(&stats).map_err(|e| e.to_string())?;
            Ok((Estimate::Structure { label }, spent))
        }
        Task::Topk => {
            if method != "visit_frequency" {
                return Err(format!("unknown ranking method {method:?}"));
            }
            let (walks, spent) = ranking_walks(&ctx.graph, spec, shared)?;
            let ranked = visit_frequency_ranking::<f64>(&walks).map_err(|e| e.to_string())?;
            let k = spec.topk.iter().copied().max().unwrap_or(TOP_LIST_LEN);
            Ok((
                Estimate::Topk {
                    nodes: ranked.top_k(k).to_vec(),
                },
                spent,
            ))
        }
    }
}

/// Runs one method on a standalone graph and returns its core output as JSON:
/// a size estimate, a partition, a structure label or a node ranking.
pub fn estimate_graph(g: &Graph, spec: &TaskSpec, method: &str, seed: u64) -> Result<serde_json::Value, String> {
    let json = |v: Result<serde_json::Value, serde_json::Error>| v.map_err(|e| e.to_string());
    match spec.task {
        Task::Size => {
            let m = SizeMethod::parse(method).ok_or_else(|| format!("unknown size method {method:?}"))?;
            let est = estimate_size::<f64>(g, m, &spec.size_config(), seed).map_err(|e| e.to_string())?;
            json(serde_json::to_value(est))
        }
        Task::Community => {
            if g.edge_count() == 0 {
                return Err("graph has no edges".into());
            }
            json(serde_json::to_value(detect(method, g, seed)?))
        }
        Task::Structure => {
            if method != "degree_rules" {
                return Err(format!("unknown structure method {method:?}"));
            }
            let (walks, _) = structure_walks(g, spec, seed)?;
            let label = classify_structure(&walk_stats(&walks, &anonymizer_for(seed))?).map_err(|e| e.to_string())?;
            Ok(serde_json::json!({ "label": label }))
        }
        Task::Topk => {
            let ranked = match method {
                "visit_frequency" => {
                    let (walks, _) = ranking_walks(g, spec, seed)?;
                    visit_frequency_ranking::<f64>(&walks).map_err(|e| e.to_string())?
                }
                "betweenness" => betweenness::<f64>(g),
                "closeness" => closeness::<f64>(g),
                "pagerank" => pagerank::<f64>(g, 0.85, 1e-9).map_err(|e| e.to_string())?,
                other => return Err(format!("unknown ranking method {other:?}")),
            };
            json(serde_json::to_value(ranked))
        }
    }
}

fn walk_stats(walks: &[Walk], anon: &Anonymizer) -> Result<Vec<WalkStats>, String> {
    walks
        .iter()
        .map(|w| compute_walk_stats(w, anon, w.seed).map_err(|e| e.to_string()))
        .collect()
}

/// Prompt variants an agent answers for `spec.task`.
pub fn prompt_targets(spec: &TaskSpec) -> Vec<TaskParams> {
    let base = TaskParams {
        size_target: spec.size_target,
        ..TaskParams::default()
    };
    match spec.task {
        Task::Topk => spec
            .topk_measures
            .iter()
            .flat_map(|m| {
                spec.topk.iter().map(move |&k| TaskParams {
                    k,
                    measure: m.clone(),
                    ..TaskParams::default()
                })
            })
            .collect(),
        _ => vec![base],
    }
}

/// Short label distinguishing the prompt variants of one graph.
pub fn target_label(task: Task, params: &TaskParams) -> Option<String> {
    match task {
        Task::Size => Some(
            match params.size_target {
                SizeTarget::Nodes => "nodes",
                SizeTarget::Edges => "edges",
            }
            .to_string(),
        ),
        Task::Topk => Some(format!("{}@{}", params.measure, params.k)),
        _ => None,
    }
}

/// Renders the prompt of one graph and trial; walks are shared with [`run_method`].
pub fn build_prompt(
    ctx: &GraphContext<'_>,
    spec: &TaskSpec,
    params: &TaskParams,
    trial: usize,
) -> Result<(PromptArtifact, Anonymizer), String> {
    let shared = walk_seed(spec.master_seed, &ctx.entry.id, trial);
    let (walks, _) = task_walks(ctx, spec.task, spec, shared)?;
    let anon = anonymizer_for(shared);
    let stats = walk_stats(&walks, &anon)?;
    let combined = combined_walk_stats(&walks, &anon, seed::mix(shared, 0xC0)).map_err(|e| e.to_string())?;
    let config: BTreeMap<String, String> = parse_pairs(&spec.to_config_text())
        .map_err(|e| e.to_string())?
        .into_iter()
        .collect();
    let provenance = Provenance {
        graph_id: ctx.entry.id.clone(),
        walk_seeds: walks.iter().map(|w| w.seed).collect(),
        config,
    };
    let prompt = render_prompt(spec.task, &stats, &combined, params, provenance).map_err(|e| e.to_string())?;
    Ok((prompt, anon))
}
