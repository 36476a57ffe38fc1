//! Batch execution: one record per graph, method and trial.
//!
//! Records are computed in parallel and sorted before they are returned, so the
//! output never depends on scheduling.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use walkest_core::promptgen::{Anonymizer, PromptArtifact, Task};

use crate::agent::{parse_answer, Agent, AgentError, Answer};
use crate::benchmark::{GraphEntry, GraphTruth, Manifest};
use crate::config::TaskSpec;
use crate::pipeline::{build_prompt, prompt_targets, record_seed, run_method, target_label, Estimate, GraphContext};
use crate::HarnessError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Failed,
    Unparsed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub graph_id: String,
    pub task: Task,
    pub family: walkest_core::graph::Family,
    pub size_class: crate::config::SizeClass,
    pub method: String,
    /// Prompt variant (`nodes`, `pagerank@20`, ...) for agent records.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    pub trial: usize,
    pub seed: u64,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimate: Option<Estimate>,
    pub truth: GraphTruth,
    pub budget_spent: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Kept out of the records file so reruns stay byte-identical; see [`write_timings`].
    #[serde(skip)]
    pub wall_time_ms: f64,
}

impl ExperimentRecord {
    fn sort_key(&self) -> (&str, &str, Option<&str>, usize) {
        (&self.graph_id, &self.method, self.target.as_deref(), self.trial)
    }
}

/// Ground truth without the bulky planted labels.
fn record_truth(entry: &GraphEntry) -> GraphTruth {
    GraphTruth {
        planted: None,
        ..entry.truth.clone()
    }
}

fn selected<'m>(manifest: &'m Manifest, spec: &TaskSpec) -> Vec<&'m GraphEntry> {
    manifest
        .graphs
        .iter()
        .filter(|g| g.cell.task == spec.task)
        .filter(|g| spec.family.is_none_or(|f| f == g.cell.family))
        .filter(|g| spec.size_class.is_none_or(|c| c == g.cell.size_class))
        .collect()
}

fn blank_record(entry: &GraphEntry, spec: &TaskSpec, method: &str, target: Option<String>, trial: usize) -> ExperimentRecord {
    ExperimentRecord {
        graph_id: entry.id.clone(),
        task: spec.task,
        family: entry.cell.family,
        size_class: entry.cell.size_class,
        method: method.to_string(),
        target,
        trial,
        seed: record_seed(spec.master_seed, &entry.id, method, trial),
        status: Status::Failed,
        estimate: None,
        truth: record_truth(entry),
        budget_spent: 0,
        error: None,
        wall_time_ms: 0.0,
    }
}

fn pool(spec: &TaskSpec) -> Result<rayon::ThreadPool, HarnessError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers)
        .build()
        .map_err(|e| HarnessError::Other(e.to_string()))
}

fn sorted(mut records: Vec<ExperimentRecord>) -> Vec<ExperimentRecord> {
    records.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    records
}

/// Runs every classical method of `spec` on the matching manifest graphs.
///
/// Per-record problems end up in the record status; only setup errors are returned.
pub fn run_task(manifest: &Manifest, root: &Path, spec: &TaskSpec) -> Result<Vec<ExperimentRecord>, HarnessError> {
    spec.validate()?;
    let methods = spec.method_list();
    let graphs = selected(manifest, spec);
    let records = pool(spec)?.install(|| {
        graphs
            .par_iter()
            .flat_map_iter(|entry| {
                let loaded = entry.load_graph(root).map(|g| GraphContext::new(entry, g));
                let mut out = Vec::with_capacity(methods.len() * spec.trials);
                for method in &methods {
                    for trial in 0..spec.trials {
                        let mut rec = blank_record(entry, spec, method, None, trial);
                        let started = Instant::now();
                        match &loaded {
                            Err(e) => rec.error = Some(e.to_string()),
                            Ok(ctx) => match run_method(ctx, spec, method, trial) {
                                Ok((estimate, spent)) => {
                                    rec.status = Status::Ok;
                                    rec.estimate = Some(estimate);
                                    rec.budget_spent = spent;
                                }
                                Err(e) => rec.error = Some(e),
                            },
                        }
                        rec.wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
                        out.push(rec);
                    }
                }
                out
            })
            .collect::<Vec<_>>()
    });
    Ok(sorted(records))
}

/// One prompt of an agent batch with what is needed to score its answer.
pub struct PreparedPrompt {
    pub graph_id: String,
    pub target: Option<String>,
    pub trial: usize,
    pub prompt: PromptArtifact,
    pub anonymizer: Anonymizer,
}

/// A prompt that could not be built: graph id, target, trial and the reason.
pub type PromptFailure = (String, Option<String>, usize, String);

/// Renders every prompt of the batch; graphs that fail to load are reported as failed records.
pub fn prepare_prompts(
    manifest: &Manifest,
    root: &Path,
    spec: &TaskSpec,
) -> Result<(Vec<PreparedPrompt>, Vec<PromptFailure>), HarnessError> {
    spec.validate()?;
    let targets = prompt_targets(spec);
    let graphs = selected(manifest, spec);
    type Item = Result<PreparedPrompt, PromptFailure>;
    let items: Vec<Item> = pool(spec)?.install(|| {
        graphs
            .par_iter()
            .flat_map_iter(|entry| {
                let loaded = entry.load_graph(root).map(|g| GraphContext::new(entry, g));
                let mut out: Vec<Item> = Vec::new();
                for params in &targets {
                    let target = target_label(spec.task, params);
                    for trial in 0..spec.trials {
                        let built = match &loaded {
                            Err(e) => Err(e.to_string()),
                            Ok(ctx) => build_prompt(ctx, spec, params, trial),
                        };
                        out.push(match built {
                            Ok((prompt, anonymizer)) => Ok(PreparedPrompt {
                                graph_id: entry.id.clone(),
                                target: target.clone(),
                                trial,
                                prompt,
                                anonymizer,
                            }),
                            Err(e) => Err((entry.id.clone(), target.clone(), trial, e)),
                        });
                    }
                }
                out
            })
            .collect()
    });
    let mut prompts = Vec::new();
    let mut failures = Vec::new();
    for item in items {
        match item {
            Ok(p) => prompts.push(p),
            Err(f) => failures.push(f),
        }
    }
    Ok((prompts, failures))
}

fn answer_to_estimate(task: Task, target: Option<&str>, answer: Answer, anon: &Anonymizer) -> Option<Estimate> {
    match (task, answer) {
        (Task::Size, Answer::Number(x)) => Some(if target == Some("edges") {
            Estimate::Size {
                n_hat: None,
                m_hat: Some(x),
            }
        } else {
            Estimate::Size {
                n_hat: Some(x),
                m_hat: None,
            }
        }),
        (Task::Community, Answer::Number(x)) => Some(Estimate::Community { count: x as usize }),
        (Task::Structure, Answer::Label(label)) => Some(Estimate::Structure { label }),
        (Task::Topk, Answer::Names(names)) => Some(Estimate::Topk {
            // names outside the anonymized range cannot match any node
            nodes: names.iter().map(|&n| anon.node(n).unwrap_or(usize::MAX)).collect(),
        }),
        _ => None,
    }
}

/// Queries `agent` with every prompt of the batch and parses the answers.
pub fn run_agent(
    manifest: &Manifest,
    root: &Path,
    spec: &TaskSpec,
    agent: &Agent,
    agent_name: &str,
) -> Result<Vec<ExperimentRecord>, HarnessError> {
    let (prompts, failures) = prepare_prompts(manifest, root, spec)?;
    let entry = |id: &str| manifest.entry(id).expect("prompt graph comes from the manifest");
    let mut records: Vec<ExperimentRecord> = pool(spec)?.install(|| {
        prompts
            .par_iter()
            .map(|p| {
                let mut rec = blank_record(entry(&p.graph_id), spec, agent_name, p.target.clone(), p.trial);
                let started = Instant::now();
                match agent.respond(&p.prompt) {
                    Err(e) => rec.error = Some(e.to_string()),
                    Ok(text) => match parse_answer(spec.task, &text) {
                        Ok(answer) => match answer_to_estimate(spec.task, p.target.as_deref(), answer, &p.anonymizer) {
                            Some(est) => {
                                rec.status = Status::Ok;
                                rec.estimate = Some(est);
                            }
                            None => {
                                rec.status = Status::Unparsed;
                                rec.error = Some(AgentError::Unparsable.to_string());
                            }
                        },
                        Err(e) => {
                            rec.status = Status::Unparsed;
                            rec.error = Some(e.to_string());
                        }
                    },
                }
                rec.wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
                rec
            })
            .collect()
    });
    for (id, target, trial, error) in failures {
        let mut rec = blank_record(entry(&id), spec, agent_name, target, trial);
        rec.error = Some(error);
        records.push(rec);
    }
    Ok(sorted(records))
}


fn create(path: &Path) -> Result<BufWriter<File>, HarnessError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| HarnessError::io(parent, e))?;
    }
    Ok(BufWriter::new(File::create(path).map_err(|e| HarnessError::io(path, e))?))
}

/// One JSON object per line, in the given order.
pub fn write_records(path: &Path, records: &[ExperimentRecord]) -> Result<(), HarnessError> {
    let mut out = create(path)?;
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n").map_err(|e| HarnessError::io(path, e))?;
    }
    out.flush().map_err(|e| HarnessError::io(path, e))
}

pub fn read_records(path: &Path) -> Result<Vec<ExperimentRecord>, HarnessError> {
    let file = File::open(path).map_err(|e| HarnessError::io(path, e))?;
    let mut out = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| HarnessError::io(path, e))?;
        if !line.trim().is_empty() {
            out.push(serde_json::from_str(&line)?);
        }
    }
    Ok(out)
}

/// Wall-clock times, one `{graph_id, method, target, trial, wall_time_ms}` object per line.
pub fn write_timings(path: &Path, records: &[ExperimentRecord]) -> Result<(), HarnessError> {
    let mut out = create(path)?;
    for r in records {
        let row = serde_json::json!({
            "graph_id": r.graph_id,
            "method": r.method,
            "target": r.target,
            "trial": r.trial,
            "wall_time_ms": r.wall_time_ms,
        });
        serde_json::to_writer(&mut out, &row)?;
        out.write_all(b"\n").map_err(|e| HarnessError::io(path, e))?;
    }
    out.flush().map_err(|e| HarnessError::io(path, e))
}
