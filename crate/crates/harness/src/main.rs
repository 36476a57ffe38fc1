//! `walkest` command line.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use walkest_core::graph::load_edgelist;
use walkest_core::promptgen::Task;
use walkest_harness::agent::prompt_hash;
use walkest_harness::benchmark::MANIFEST_FILE;
use walkest_harness::config::parse_override;
use walkest_harness::fetch::{fetch_dataset, FetchOptions};
use walkest_harness::pipeline::estimate_graph;
use walkest_harness::runner::{prepare_prompts, read_records, write_records, write_timings};
use walkest_harness::{generate_benchmark, run_agent, run_task, score, Agent, HarnessError, Manifest, TaskSpec};

#[derive(Parser)]
#[command(name = "walkest", version, about = "Walk-based graph estimation benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SpecArgs {
    /// key = value file with task settings.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides one setting; repeatable.
    #[arg(long = "set", value_parser = parse_override)]
    overrides: Vec<(String, String)>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
}

impl SpecArgs {
    /// Config file, then `--set` pairs, then dedicated flags.
    fn build(&self, task: Option<Task>) -> Result<TaskSpec, HarnessError> {
        let mut spec = TaskSpec::new(Task::Size);
        if let Some(path) = &self.config {
            spec.apply_file(path)?;
        }
        for (k, v) in &self.overrides {
            spec.set(k, v)?;
        }
        if let Some(t) = task {
            spec.task = t;
        }
        if let Some(s) = self.seed {
            spec.master_seed = s;
        }
        if let Some(w) = self.workers {
            spec.workers = w;
        }
        if let Some(t) = self.trials {
            spec.trials = t;
        }
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Args)]
struct AgentArgs {
    /// Shell command that reads a prompt on stdin and answers on stdout.
    #[arg(long, conflicts_with = "replay")]
    exec: Option<String>,
    /// Directory of stored responses named `<prompt sha256>.txt`.
    #[arg(long)]
    replay: Option<PathBuf>,
    /// Method name recorded for the agent.
    #[arg(long, default_value = "agent")]
    name: String,
}

impl AgentArgs {
    fn agent(&self, spec: &TaskSpec) -> Option<Agent> {
        match (&self.exec, &self.replay) {
            (Some(cmd), _) => Some(Agent::exec_shell(cmd, Duration::from_secs(spec.agent_timeout_secs))),
            (None, Some(dir)) => Some(Agent::Replay { dir: dir.clone() }),
            (None, None) => None,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generates the synthetic benchmark and its manifest.
    Generate {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Fraction of the full per-cell graph count.
        #[arg(long, default_value_t = 0.1)]
        scale: f64,
    },
    /// Downloads a SNAP graph and writes it as a plain edge list.
    Fetch {
        name: String,
        #[arg(long, default_value = "data")]
        data_dir: PathBuf,
        #[arg(long)]
        url: Option<String>,
        #[arg(long)]
        sha256: Option<String>,
        #[arg(long)]
        force: bool,
    },
    /// Runs one method on one edge-list graph and prints its JSON output.
    Estimate {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_parser = parse_task)]
        task: Option<Task>,
        #[arg(long)]
        method: String,
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Writes prompt artifacts for every benchmark graph of a task.
    Prompt {
        #[arg(long)]
        benchmark: PathBuf,
        #[arg(long, value_parser = parse_task)]
        task: Option<Task>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Queries an agent with every prompt of a task and scores its answers.
    AgentRun {
        #[arg(long)]
        benchmark: PathBuf,
        #[arg(long, value_parser = parse_task)]
        task: Option<Task>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        agent: AgentArgs,
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Aggregates records files into scores.csv and scores.json.
    Score {
        #[arg(long, required = true, num_args = 1..)]
        records: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generates the benchmark, runs every task and scores the results.
    Bench {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        scale: f64,
        #[command(flatten)]
        agent: AgentArgs,
        #[command(flatten)]
        spec: SpecArgs,
    },
}

fn parse_task(s: &str) -> Result<Task, String> {
    Task::parse(s).map_err(|e| e.to_string())
}

fn write_file(path: &Path, body: &str) -> Result<(), HarnessError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| HarnessError::io(parent, e))?;
    }
    std::fs::write(path, body).map_err(|e| HarnessError::io(path, e))
}

fn load_manifest(dir: &Path) -> Result<Manifest, HarnessError> {
    Ok(Manifest::load(&dir.join(MANIFEST_FILE))?)
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Generate { out, seed, scale } => {
            let m = generate_benchmark(&out, seed, scale)?;
            eprintln!("wrote {} graphs to {}", m.graphs.len(), out.display());
        }
        Command::Fetch {
            name,
            data_dir,
            url,
            sha256,
            force,
        } => {
            let got = fetch_dataset(&name, &data_dir, &FetchOptions { url, sha256, force })?;
            println!("{} ({} edges, sha256 {})", got.edges.display(), got.edge_lines, got.sha256);
        }
        Command::Estimate {
            graph,
            task,
            method,
            spec,
        } => {
            let spec = spec.build(task)?;
            let file = std::fs::File::open(&graph).map_err(|e| HarnessError::io(&graph, e))?;
            let g = load_edgelist(std::io::BufReader::new(file), true).map_err(|e| HarnessError::Other(e.to_string()))?;
            let value = estimate_graph(&g, &spec, &method, spec.master_seed).map_err(HarnessError::Other)?;
            println!("{}", serde_json::to_string_pretty(&value)?);
        }
        Command::Prompt {
            benchmark,
            task,
            out,
            spec,
        } => {
            let spec = spec.build(task)?;
            let manifest = load_manifest(&benchmark)?;
            let (prompts, failures) = prepare_prompts(&manifest, &benchmark, &spec)?;
            let mut index = String::new();
            for p in &prompts {
                let hash = prompt_hash(&p.prompt);
                write_file(&out.join(format!("{hash}.prompt.txt")), &p.prompt.text)?;
                write_file(&out.join(format!("{hash}.json")), &(serde_json::to_string_pretty(&p.prompt)? + "\n"))?;
                let row = serde_json::json!({
                    "hash": hash,
                    "graph_id": p.graph_id,
                    "target": p.target,
                    "trial": p.trial,
                    "token_estimate": p.prompt.token_estimate,
                });
                index.push_str(&row.to_string());
                index.push('\n');
            }
            write_file(&out.join("index.jsonl"), &index)?;
            for (id, target, _, e) in &failures {
                eprintln!("{id} {}: {e}", target.as_deref().unwrap_or(""));
            }
            eprintln!("wrote {} prompts to {}", prompts.len(), out.display());
        }
        Command::AgentRun {
            benchmark,
            task,
            out,
            agent,
            spec,
        } => {
            let spec = spec.build(task)?;
            let Some(a) = agent.agent(&spec) else {
                return Err(HarnessError::Other("one of --exec or --replay is required".into()));
            };
            let manifest = load_manifest(&benchmark)?;
            let records = run_agent(&manifest, &benchmark, &spec, &a, &agent.name)?;
            write_records(&out.join("records.jsonl"), &records)?;
            write_timings(&out.join("timings.jsonl"), &records)?;
            walkest_harness::score::emit(&score(&records), &out, "scores")?;
            eprintln!("wrote {} agent records to {}", records.len(), out.display());
        }
        Command::Score { records, out } => {
            let mut all = Vec::new();
            for path in &records {
                all.extend(read_records(path)?);
            }
            walkest_harness::score::emit(&score(&all), &out, "scores")?;
        }
        Command::Bench {
            out,
            scale,
            agent,
            spec,
        } => {
            let base = spec.build(None)?;
            let manifest = generate_benchmark(&out, base.master_seed, scale)?;
            let mut classical = Vec::new();
            let mut agent_records = Vec::new();
            for task in Task::ALL {
                let mut spec = base.clone();
                spec.task = task;
                spec.methods.clear();
                classical.extend(run_task(&manifest, &out, &spec)?);
                if let Some(a) = agent.agent(&spec) {
                    agent_records.extend(run_agent(&manifest, &out, &spec, &a, &agent.name)?);
                }
            }
            write_records(&out.join("records.jsonl"), &classical)?;
            let mut all = classical;
            if agent.agent(&base).is_some() {
                write_records(&out.join("agent_records.jsonl"), &agent_records)?;
                all.extend(agent_records);
            }
            write_timings(&out.join("timings.jsonl"), &all)?;
            walkest_harness::score::emit(&score(&all), &out, "scores")?;
            let mut stderr = std::io::stderr();
            let _ = writeln!(stderr, "{} graphs, {} records in {}", manifest.graphs.len(), all.len(), out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
