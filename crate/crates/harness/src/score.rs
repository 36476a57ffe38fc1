//! Aggregation of experiment records into per-group metrics and method ranks.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use walkest_core::centrality::precision_at_k;
use walkest_core::graph::Family;
use walkest_core::promptgen::Task;

use crate::config::SizeClass;
use crate::pipeline::Estimate;
use crate::runner::{ExperimentRecord, Status};
use crate::HarnessError;

/// Relative errors above this many percent are clipped in the summary statistics.
pub const REL_ERROR_CAP: f64 = 10_000.0;

pub const CSV_HEADER: [&str; 13] = [
    "task",
    "family",
    "size_class",
    "method",
    "metric",
    "attempted",
    "ok",
    "failed",
    "unparsed",
    "median",
    "mean",
    "std",
    "rank",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub task: Task,
    pub family: Family,
    pub size_class: SizeClass,
    pub method: String,
    pub metric: String,
    pub attempted: usize,
    pub ok: usize,
    pub failed: usize,
    pub unparsed: usize,
    /// Statistics over ok records; `None` for an empty group.
    pub median: Option<f64>,
    pub mean: Option<f64>,
    pub std: Option<f64>,
    /// Mean before clipping relative errors.
    pub raw_mean: Option<f64>,
    /// 1-based position among the methods of the same task, family, size class and metric.
    pub rank: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ScoreTable {
    pub rows: Vec<ScoreRow>,
}

/// `100 |estimate - truth| / truth`.
pub fn relative_error_pct(estimate: f64, truth: f64) -> f64 {
    100.0 * (estimate - truth).abs() / truth
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[mid] } else { (v[mid - 1] + v[mid]) / 2.0 })
}

pub fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

/// Sample standard deviation; zero for a single value.
pub fn sample_std(values: &[f64]) -> Option<f64> {
    let m = mean(values)?;
    if values.len() < 2 {
        return Some(0.0);
    }
    let ss: f64 = values.iter().map(|x| (x - m).powi(2)).sum();
    Some((ss / (values.len() - 1) as f64).sqrt())
}

/// Metric values of one ok record, keyed by metric name.
fn record_metrics(r: &ExperimentRecord) -> Vec<(String, f64)> {
    let Some(est) = &r.estimate else {
        return Vec::new();
    };
    match est {
        Estimate::Size { n_hat, m_hat } => {
            let mut out = Vec::new();
            if let Some(n) = n_hat {
                out.push(("node_rel_err_pct".to_string(), relative_error_pct(*n, r.truth.nodes as f64)));
            }
            if let Some(m) = m_hat {
                out.push(("edge_rel_err_pct".to_string(), relative_error_pct(*m, r.truth.edges as f64)));
            }
            out
        }
        Estimate::Community { count } => r
            .truth
            .community_count
            .map(|t| vec![("abs_error".to_string(), (*count as f64 - t as f64).abs())])
            .unwrap_or_default(),
        Estimate::Structure { label } => {
            vec![("accuracy".to_string(), f64::from(u8::from(*label == r.truth.family)))]
        }
        Estimate::Topk { nodes } => {
            let mut out = Vec::new();
            for (measure, truth) in &r.truth.top {
                for k in topk_sizes(r) {
                    let name = format!("{measure}@{k}");
                    if r.target.as_ref().is_none_or(|t| *t == name) && k <= truth.len() {
                        out.push((format!("precision@{k}:{measure}"), precision_at_k(nodes, truth, k)));
                    }
                }
            }
            out
        }
    }
}

/// Cut-offs scored for a ranking record: its own target, or 20/50/100 up to the list length.
fn topk_sizes(r: &ExperimentRecord) -> Vec<usize> {
    if let Some(k) = r.target.as_ref().and_then(|t| t.split('@').nth(1)).and_then(|k| k.parse().ok()) {
        return vec![k];
    }
    let len = match &r.estimate {
        Some(Estimate::Topk { nodes }) => nodes.len(),
        _ => 0,
    };
    [20, 50, 100].into_iter().filter(|&k| k <= len.max(20)).collect()
}

/// Metrics reported for a task even when no record succeeded.
fn expected_metrics(records: &[&ExperimentRecord]) -> Vec<String> {
    let task = records[0].task;
    match task {
        Task::Size => {
            let mut m = Vec::new();
            let has_edges_only = records.iter().all(|r| r.target.as_deref() == Some("edges"));
            let has_nodes_only = records.iter().all(|r| r.target.as_deref() == Some("nodes"));
            if !has_edges_only {
                m.push("node_rel_err_pct".to_string());
            }
            if !has_nodes_only {
                m.push("edge_rel_err_pct".to_string());
            }
            m
        }
        Task::Community => vec!["abs_error".to_string()],
        Task::Structure => vec!["accuracy".to_string()],
        Task::Topk => {
            let mut m: Vec<String> = records
                .iter()
                .filter_map(|r| r.target.as_ref())
                .filter_map(|t| t.split_once('@').map(|(measure, k)| format!("precision@{k}:{measure}")))
                .collect();
            m.sort();
            m.dedup();
            m
        }
    }
}

/// Whether a record with prompt variant `target` contributes to `metric`; untargeted
/// records contribute to every metric of their task.
fn scored_by(metric: &str, target: Option<&str>) -> bool {
    let Some(t) = target else {
        return true;
    };
    match metric {
        "node_rel_err_pct" => t == "nodes",
        "edge_rel_err_pct" => t == "edges",
        m => match (m.strip_prefix("precision@").and_then(|r| r.split_once(':')), t.split_once('@')) {
            (Some((k, measure)), Some((tm, tk))) => k == tk && measure == tm,
            _ => true,
        },
    }
}

/// Whether smaller values of `metric` are better.
fn lower_is_better(metric: &str) -> bool {
    metric.ends_with("rel_err_pct") || metric == "abs_error"
}

type GroupKey = (Task, Family, SizeClass, String);

/// Aggregates records; statistics use ok records only, failures are counted alongside.
pub fn score(records: &[ExperimentRecord]) -> ScoreTable {
    let mut groups: BTreeMap<GroupKey, Vec<&ExperimentRecord>> = BTreeMap::new();
    for r in records {
        groups
            .entry((r.task, r.family, r.size_class, r.method.clone()))
            .or_default()
            .push(r);
    }
    let mut rows = Vec::new();
    for ((task, family, size_class, method), members) in &groups {
        let mut values: BTreeMap<String, Vec<f64>> = expected_metrics(members)
            .into_iter()
            .map(|m| (m, Vec::new()))
            .collect();
        for r in members.iter().filter(|r| r.status == Status::Ok) {
            for (metric, v) in record_metrics(r) {
                values.entry(metric).or_default().push(v);
            }
        }
        for (metric, raw) in values {
            let relevant: Vec<_> = members.iter().filter(|r| scored_by(&metric, r.target.as_deref())).collect();
            let count = |s: Status| relevant.iter().filter(|r| r.status == s).count();
            let capped: Vec<f64> = if metric.ends_with("rel_err_pct") {
                raw.iter().map(|&v| v.min(REL_ERROR_CAP)).collect()
            } else {
                raw.clone()
            };
            rows.push(ScoreRow {
                task: *task,
                family: *family,
                size_class: *size_class,
                method: method.clone(),
                metric,
                attempted: relevant.len(),
                ok: count(Status::Ok),
                failed: count(Status::Failed),
                unparsed: count(Status::Unparsed),
                median: median(&capped),
                mean: mean(&capped),
                std: sample_std(&capped),
                raw_mean: mean(&raw),
                rank: 0,
            });
        }
    }
    assign_ranks(&mut rows);
    rows.sort_by(|a, b| {
        (a.task, a.family, a.size_class, &a.metric, a.rank, &a.method).cmp(&(
            b.task,
            b.family,
            b.size_class,
            &b.metric,
            b.rank,
            &b.method,
        ))
    });
    ScoreTable { rows }
}

/// Ranks methods within each comparison group: by median for relative errors, by
/// mean otherwise; empty groups go last, ties by method name.
fn assign_ranks(rows: &mut [ScoreRow]) {
    let mut by_group: BTreeMap<(Task, Family, SizeClass, String), Vec<usize>> = BTreeMap::new();
    for (i, r) in rows.iter().enumerate() {
        by_group
            .entry((r.task, r.family, r.size_class, r.metric.clone()))
            .or_default()
            .push(i);
    }
    for ((_, _, _, metric), mut idx) in by_group {
        let lower = lower_is_better(&metric);
        let key = |r: &ScoreRow| {
            let v = if metric.ends_with("rel_err_pct") { r.median } else { r.mean };
            v.map(|x| if lower { x } else { -x })
        };
        idx.sort_by(|&a, &b| {
            let (ka, kb) = (key(&rows[a]), key(&rows[b]));
            match (ka, kb) {
                (Some(x), Some(y)) => x.total_cmp(&y),
                (Some(_), None) => std::cmp::Ordering::Less,
                (None, Some(_)) => std::cmp::Ordering::Greater,
                (None, None) => std::cmp::Ordering::Equal,
            }
            .then_with(|| rows[a].method.cmp(&rows[b].method))
        });
        for (pos, i) in idx.into_iter().enumerate() {
            rows[i].rank = pos + 1;
        }
    }
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// CSV with the fixed [`CSV_HEADER`] columns, one row per group, method and metric.
pub fn to_csv(table: &ScoreTable) -> Result<String, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in &table.rows {
        w.write_record([
            r.task.as_str().to_string(),
            r.family.to_string(),
            r.size_class.to_string(),
            r.method.clone(),
            r.metric.clone(),
            r.attempted.to_string(),
            r.ok.to_string(),
            r.failed.to_string(),
            r.unparsed.to_string(),
            cell(r.median),
            cell(r.mean),
            cell(r.std),
            r.rank.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::Other(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn to_json(table: &ScoreTable) -> Result<String, HarnessError> {
    let mut s = serde_json::to_string_pretty(table)?;
    s.push('\n');
    Ok(s)
}

/// Writes `<stem>.csv` and `<stem>.json` into `dir`.
pub fn emit(table: &ScoreTable, dir: &Path, stem: &str) -> Result<(), HarnessError> {
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    for (ext, body) in [("csv", to_csv(table)?), ("json", to_json(table)?)] {
        let path = dir.join(format!("{stem}.{ext}"));
        let mut f = std::fs::File::create(&path).map_err(|e| HarnessError::io(&path, e))?;
        f.write_all(body.as_bytes()).map_err(|e| HarnessError::io(&path, e))?;
    }
    Ok(())
}
