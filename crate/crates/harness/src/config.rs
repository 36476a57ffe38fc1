//! Task parameters and the `key = value` config format.
//!
//! A config file holds one `key = value` pair per line; `#` starts a comment and
//! list values are comma separated. Keys mirror the [`TaskSpec`] field names.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use walkest_core::estimators::{BudgetSplit, SizeConfig};
use walkest_core::graph::Family;
use walkest_core::promptgen::{SizeTarget, Task, MEASURES};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("unknown config key {0:?}")]
    UnknownKey(String),
    #[error("invalid value {value:?} for {key}: {reason}")]
    InvalidValue { key: String, value: String, reason: String },
    #[error("reading config: {0}")]
    Io(#[from] std::io::Error),
}

/// Node-count class of a benchmark graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeClass {
    Small,
    Medium,
    Large,
}

impl SizeClass {
    pub const ALL: [SizeClass; 3] = [SizeClass::Small, SizeClass::Medium, SizeClass::Large];

    /// Inclusive node-count bounds.
    pub fn bounds(self) -> (usize, usize) {
        match self {
            SizeClass::Small => (100, 1_000),
            SizeClass::Medium => (1_000, 10_000),
            SizeClass::Large => (10_000, 100_000),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SizeClass::Small => "small",
            SizeClass::Medium => "medium",
            SizeClass::Large => "large",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.as_str() == s.trim())
    }
}

impl std::fmt::Display for SizeClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Everything that determines one experiment batch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub task: Task,
    /// Restricts the batch to one family; `None` runs every family of the task.
    pub family: Option<Family>,
    pub size_class: Option<SizeClass>,
    /// Classical methods to run; empty selects the task defaults.
    pub methods: Vec<String>,
    pub budget_fraction: f64,
    pub burn_in_fraction: f64,
    pub k_returns: usize,
    pub return_walks: usize,
    /// Walks whose statistics go into a size prompt; together they use the sampling budget.
    pub size_walks: usize,
    pub size_target: SizeTarget,
    pub community_walk_length: usize,
    pub seeds_per_community_min: usize,
    pub seeds_per_community_max: usize,
    pub structure_walks: usize,
    pub structure_walk_fraction: f64,
    pub topk: Vec<usize>,
    pub topk_measures: Vec<String>,
    pub topk_walks: usize,
    /// Total ranking walk length as a multiple of the node count.
    pub topk_walk_multiple: f64,
    pub trials: usize,
    pub master_seed: u64,
    /// Worker threads; 0 uses every core.
    pub workers: usize,
    pub agent_timeout_secs: u64,
}

impl TaskSpec {
    pub fn new(task: Task) -> Self {
        Self {
            task,
            family: None,
            size_class: None,
            methods: Vec::new(),
            budget_fraction: 0.20,
            burn_in_fraction: 0.10,
            k_returns: 10,
            return_walks: 5,
            size_walks: 5,
            size_target: SizeTarget::Nodes,
            community_walk_length: 300,
            seeds_per_community_min: 2,
            seeds_per_community_max: 3,
            structure_walks: 5,
            structure_walk_fraction: 0.10,
            topk: vec![20, 50, 100],
            topk_measures: MEASURES.iter().map(|m| m.to_string()).collect(),
            topk_walks: 5,
            topk_walk_multiple: 20.0,
            trials: 1,
            master_seed: 0,
            workers: 0,
            agent_timeout_secs: 300,
        }
    }

    pub fn default_methods(task: Task) -> &'static [&'static str] {
        match task {
            Task::Size => &["uniform", "mh", "max_degree", "return_walk", "srw"],
            Task::Community => &["louvain", "greedy", "label_propagation"],
            Task::Structure => &["degree_rules"],
            Task::Topk => &["visit_frequency"],
        }
    }

    /// Methods to run, falling back to the task defaults.
    pub fn method_list(&self) -> Vec<String> {
        if self.methods.is_empty() {
            Self::default_methods(self.task).iter().map(|m| m.to_string()).collect()
        } else {
            self.methods.clone()
        }
    }

    pub fn size_config(&self) -> SizeConfig {
        SizeConfig {
            budget_fraction: self.budget_fraction,
            burn_in_fraction: self.burn_in_fraction,
            split: BudgetSplit::PerSample,
            k_returns: self.k_returns,
            return_walks: self.return_walks,
        }
    }

    /// Sets one field from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad = |reason: &str| ConfigError::InvalidValue {
            key: key.to_string(),
            value: value.to_string(),
            reason: reason.to_string(),
        };
        let v = value.trim();
        let fraction = || -> Result<f64, ConfigError> {
            let x: f64 = v.parse().map_err(|_| bad("not a number"))?;
            if x > 0.0 && x <= 1.0 {
                Ok(x)
            } else {
                Err(bad("must lie in (0, 1]"))
            }
        };
        let count = || -> Result<usize, ConfigError> { v.parse().map_err(|_| bad("not a non-negative integer")) };
        let list = || -> Vec<String> {
            v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect()
        };
        match key.trim() {
            "task" => self.task = Task::parse(v).map_err(|_| bad("unknown task"))?,
            "family" => {
                self.family = if v.is_empty() || v == "all" {
                    None
                } else {
                    Some(Family::parse(v).ok_or_else(|| bad("unknown family"))?)
                }
            }
            "size_class" => {
                self.size_class = if v.is_empty() || v == "all" {
                    None
                } else {
                    Some(SizeClass::parse(v).ok_or_else(|| bad("unknown size class"))?)
                }
            }
            "methods" => self.methods = list(),
            "budget_fraction" => self.budget_fraction = fraction()?,
            "burn_in_fraction" => {
                let x: f64 = v.parse().map_err(|_| bad("not a number"))?;
                if !(0.0..=1.0).contains(&x) {
                    return Err(bad("must lie in [0, 1]"));
                }
                self.burn_in_fraction = x;
            }
            "k_returns" => self.k_returns = count()?,
            "return_walks" => self.return_walks = count()?,
            "size_walks" => self.size_walks = count()?,
            "size_target" => {
                self.size_target = match v {
                    "nodes" => SizeTarget::Nodes,
                    "edges" => SizeTarget::Edges,
                    _ => return Err(bad("expected nodes or edges")),
                }
            }
            "community_walk_length" => self.community_walk_length = count()?,
            "seeds_per_community" => {
                let (lo, hi) = match v.split_once('-') {
                    Some((a, b)) => (a.trim(), b.trim()),
                    None => (v, v),
                };
                self.seeds_per_community_min = lo.parse().map_err(|_| bad("expected `a-b` or a count"))?;
                self.seeds_per_community_max = hi.parse().map_err(|_| bad("expected `a-b` or a count"))?;
            }
            "structure_walks" => self.structure_walks = count()?,
            "structure_walk_fraction" => self.structure_walk_fraction = fraction()?,
            "topk" => {
                self.topk = list()
                    .iter()
                    .map(|s| s.parse::<usize>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| bad("expected comma-separated counts"))?
            }
            "topk_measures" => {
                let measures = list();
                if let Some(m) = measures.iter().find(|m| !MEASURES.contains(&m.as_str())) {
                    return Err(bad(&format!("unknown measure {m}")));
                }
                self.topk_measures = measures;
            }
            "topk_walks" => self.topk_walks = count()?,
            "topk_walk_multiple" => self.topk_walk_multiple = v.parse().map_err(|_| bad("not a number"))?,
            "trials" => self.trials = count()?,
            "master_seed" | "seed" => self.master_seed = v.parse().map_err(|_| bad("not a 64-bit integer"))?,
            "workers" => self.workers = count()?,
            "agent_timeout_secs" => self.agent_timeout_secs = count()? as u64,
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    /// Checks cross-field constraints after all keys are applied.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |key: &str, reason: &str| ConfigError::InvalidValue {
            key: key.to_string(),
            value: String::new(),
            reason: reason.to_string(),
        };
        if self.seeds_per_community_min == 0 || self.seeds_per_community_min > self.seeds_per_community_max {
            return Err(bad("seeds_per_community", "need 1 <= min <= max"));
        }
        if self.trials == 0 {
            return Err(bad("trials", "must be positive"));
        }
        if self.topk.contains(&0) {
            return Err(bad("topk", "k must be positive"));
        }
        for (key, v) in [
            ("size_walks", self.size_walks),
            ("structure_walks", self.structure_walks),
            ("topk_walks", self.topk_walks),
            ("k_returns", self.k_returns),
            ("return_walks", self.return_walks),
        ] {
            if v == 0 {
                return Err(bad(key, "must be positive"));
            }
        }
        Ok(())
    }

    /// Applies every pair of a config text.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (key, value) in parse_pairs(text)? {
            self.set(&key, &value)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        self.apply_text(&std::fs::read_to_string(path)?)
    }

    /// Renders these settings back into config text accepted by [`TaskSpec::apply_text`].
    pub fn to_config_text(&self) -> String {
        let join = |v: &[String]| v.join(", ");
        let mut lines = vec![
            format!("task = {}", self.task),
            format!("family = {}", self.family.map_or("all".to_string(), |f| f.to_string())),
            format!("size_class = {}", self.size_class.map_or("all".to_string(), |c| c.to_string())),
            format!("methods = {}", join(&self.methods)),
            format!("budget_fraction = {}", self.budget_fraction),
            format!("burn_in_fraction = {}", self.burn_in_fraction),
            format!("k_returns = {}", self.k_returns),
            format!("return_walks = {}", self.return_walks),
            format!("size_walks = {}", self.size_walks),
            format!(
                "size_target = {}",
                match self.size_target {
                    SizeTarget::Nodes => "nodes",
                    SizeTarget::Edges => "edges",
                }
            ),
            format!("community_walk_length = {}", self.community_walk_length),
            format!(
                "seeds_per_community = {}-{}",
                self.seeds_per_community_min, self.seeds_per_community_max
            ),
            format!("structure_walks = {}", self.structure_walks),
            format!("structure_walk_fraction = {}", self.structure_walk_fraction),
            format!(
                "topk = {}",
                self.topk.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(", ")
            ),
            format!("topk_measures = {}", join(&self.topk_measures)),
            format!("topk_walks = {}", self.topk_walks),
            format!("topk_walk_multiple = {}", self.topk_walk_multiple),
            format!("trials = {}", self.trials),
            format!("master_seed = {}", self.master_seed),
            format!("workers = {}", self.workers),
            format!("agent_timeout_secs = {}", self.agent_timeout_secs),
        ];
        lines.push(String::new());
        lines.join("\n")
    }
}

/// Splits config text into `(key, value)` pairs in file order.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
        let k = k.trim();
        if k.is_empty() {
            return Err(ConfigError::Syntax { line: i + 1 });
        }
        out.push((k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Parses a `key=value` command-line override.
pub fn parse_override(s: &str) -> Result<(String, String), String> {
    s.split_once('=')
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .ok_or_else(|| format!("expected key=value, got {s:?}"))
}
