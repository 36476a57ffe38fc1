//! Benchmark corpus: seeded graph generation, edgelist files and the manifest.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;
use walkest_core::centrality::{betweenness, closeness, pagerank};
use walkest_core::graph::{self, generate, load_edgelist, save_edgelist, Family, GeneratorSpec, Graph, LfrParams};
use walkest_core::promptgen::Task;
use walkest_core::{seed, NodeId};

use crate::config::SizeClass;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const GRAPH_DIR: &str = "graphs";
/// Graphs per cell at scale 1.
pub const FULL_CELL_COUNT: usize = 100;
/// Length of the stored ground-truth ranking lists.
pub const TOP_LIST_LEN: usize = 100;
const MAX_ATTEMPTS: u64 = 50;

#[derive(Debug, Error)]
pub enum BenchmarkError {
    #[error("io error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("manifest: {0}")]
    Json(#[from] serde_json::Error),
    #[error("graph {id}: {source}")]
    Graph { id: String, source: graph::GraphError },
    #[error("no valid graph for {0} after {MAX_ATTEMPTS} attempts")]
    Exhausted(String),
    #[error("scale must be positive, got {0}")]
    BadScale(f64),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> BenchmarkError + '_ {
    move |source| BenchmarkError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// One row of the corpus table: which task the graphs serve, their family and size class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub task: Task,
    pub family: Family,
    pub size_class: SizeClass,
}

/// The fifteen corpus cells in manifest order.
pub fn cells() -> Vec<Cell> {
    let mut out = Vec::new();
    for family in [Family::BA, Family::ER, Family::GRP] {
        for size_class in SizeClass::ALL {
            out.push(Cell {
                task: Task::Size,
                family,
                size_class,
            });
        }
    }
    out.push(Cell {
        task: Task::Community,
        family: Family::LFR,
        size_class: SizeClass::Medium,
    });
    for family in [Family::ER, Family::BA, Family::Grid, Family::LFR] {
        out.push(Cell {
            task: Task::Structure,
            family,
            size_class: SizeClass::Medium,
        });
    }
    out.push(Cell {
        task: Task::Topk,
        family: Family::LFR,
        size_class: SizeClass::Medium,
    });
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphTruth {
    pub family: Family,
    pub nodes: usize,
    pub edges: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub community_count: Option<usize>,
    /// Planted community of every node, for graphs that have one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub planted: Option<Vec<usize>>,
    /// Highest-ranked nodes per centrality measure.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub top: BTreeMap<String, Vec<NodeId>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphEntry {
    pub id: String,
    pub cell: Cell,
    pub spec: GeneratorSpec,
    pub seed: u64,
    /// Edgelist path relative to the manifest directory.
    pub path: String,
    pub truth: GraphTruth,
}

impl GraphEntry {
    pub fn load_graph(&self, root: &Path) -> Result<Graph, BenchmarkError> {
        let path = root.join(&self.path);
        let file = File::open(&path).map_err(io_err(&path))?;
        load_edgelist(BufReader::new(file), true).map_err(|source| BenchmarkError::Graph {
            id: self.id.clone(),
            source,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub master_seed: u64,
    pub scale: f64,
    pub graphs: Vec<GraphEntry>,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self, BenchmarkError> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn to_json(&self) -> Result<String, BenchmarkError> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Hex SHA-256 of the serialized manifest.
    pub fn hash(&self) -> Result<String, BenchmarkError> {
        Ok(sha256_hex(self.to_json()?.as_bytes()))
    }

    pub fn entry(&self, id: &str) -> Option<&GraphEntry> {
        self.graphs.iter().find(|g| g.id == id)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Graphs per cell at `scale`, at least one.
pub fn cell_count(scale: f64) -> usize {
    ((FULL_CELL_COUNT as f64 * scale).round() as usize).max(1)
}

fn uniform_size(class: SizeClass, rng: &mut seed::Rng) -> usize {
    let (lo, hi) = class.bounds();
    rng.random_range(lo..=hi)
}

/// Draws generator parameters for the `cell` corpus.
fn draw_spec(cell: Cell, rng: &mut seed::Rng) -> GeneratorSpec {
    let (community_lo, community_hi) = (1_000, 3_000);
    match (cell.task, cell.family) {
        (_, Family::BA) => GeneratorSpec::BarabasiAlbert {
            nodes: uniform_size(cell.size_class, rng),
            attach: rng.random_range(3..=5),
        },
        (_, Family::ER) => GeneratorSpec::ErdosRenyi {
            nodes: uniform_size(cell.size_class, rng),
            edge_multiplier: rng.random_range(5.0..=10.0),
        },
        (_, Family::GRP) => {
            let nodes = uniform_size(cell.size_class, rng);
            let mean_block = rng.random_range(0.05..=0.2) * nodes as f64;
            GeneratorSpec::GaussianPartition {
                nodes,
                mean_block,
                variance: mean_block / 2.0,
                p_in: (12.0 / mean_block).min(0.25),
                p_out: (2.0 / nodes as f64).min(0.01),
            }
        }
        (Task::Community, Family::LFR) => GeneratorSpec::Lfr(LfrParams::new(
            rng.random_range(community_lo..=community_hi),
            rng.random_range(5..=12),
            0.05,
        )),
        (Task::Topk, Family::LFR) => GeneratorSpec::Lfr(LfrParams {
            max_degree: 60,
            ..LfrParams::new(2_000, rng.random_range(5..=12), 0.1)
        }),
        (_, Family::LFR) => GeneratorSpec::Lfr(LfrParams::new(
            uniform_size(cell.size_class, rng),
            rng.random_range(5..=12),
            0.1,
        )),
        (_, Family::Grid) => match rng.random_range(0..3) {
            0 => GeneratorSpec::HexLattice {
                rows: rng.random_range(16..=60),
                cols: rng.random_range(16..=60),
            },
            1 => GeneratorSpec::TriLattice {
                rows: rng.random_range(32..=99),
                cols: rng.random_range(32..=99),
            },
            _ => GeneratorSpec::Hypercube {
                dim: rng.random_range(10..=13),
            },
        },
    }
}

fn top_lists(g: &Graph) -> BTreeMap<String, Vec<NodeId>> {
    let mut top = BTreeMap::new();
    top.insert(
        "betweenness".to_string(),
        betweenness::<f64>(g).top_k(TOP_LIST_LEN).to_vec(),
    );
    top.insert("closeness".to_string(), closeness::<f64>(g).top_k(TOP_LIST_LEN).to_vec());
    if let Ok(pr) = pagerank::<f64>(g, 0.85, 1e-9) {
        top.insert("pagerank".to_string(), pr.top_k(TOP_LIST_LEN).to_vec());
    }
    top
}

/// Generates one graph, keeping the largest connected component; re-draws until
/// the component lies inside the size-class bounds.
fn build_entry(cell: Cell, index: usize, master_seed: u64, cell_index: usize) -> Result<(GraphEntry, Graph), BenchmarkError> {
    let id = format!(
        "{}-{}-{}-{index:03}",
        cell.task,
        cell.family.as_str().to_ascii_lowercase(),
        cell.size_class
    );
    let base = seed::mix_all(master_seed, &[cell_index as u64, index as u64]);
    let (lo, hi) = cell.size_class.bounds();
    for attempt in 0..MAX_ATTEMPTS {
        let gen_seed = seed::mix(base, attempt);
        let mut rng = seed::rng(gen_seed);
        let spec = draw_spec(cell, &mut rng);
        let Ok((full, labels)) = generate(&spec, seed::mix(gen_seed, 1)) else {
            continue;
        };
        let (g, parents) = full.largest_component_with_map();
        if g.node_count() < lo || g.node_count() > hi {
            continue;
        }
        let planted = labels.map(|l| l.restrict(&parents));
        let mut truth = GraphTruth {
            family: cell.family,
            nodes: g.node_count(),
            edges: g.edge_count(),
            community_count: planted.as_ref().map(|p| p.community_count),
            planted: None,
            top: BTreeMap::new(),
        };
        match cell.task {
            Task::Community => truth.planted = planted.map(|p| p.assignment),
            Task::Topk => truth.top = top_lists(&g),
            _ => {}
        }
        let entry = GraphEntry {
            path: format!("{GRAPH_DIR}/{id}.edges"),
            id,
            cell,
            spec,
            seed: gen_seed,
            truth,
        };
        return Ok((entry, g));
    }
    Err(BenchmarkError::Exhausted(id))
}

/// The first `count` graphs of `cell` as `generate_benchmark` would draw them, kept in memory.
pub fn sample_cell(cell: Cell, count: usize, master_seed: u64) -> Result<Vec<(GraphEntry, Graph)>, BenchmarkError> {
    let ci = cells().iter().position(|c| *c == cell).unwrap_or(usize::MAX);
    (0..count)
        .into_par_iter()
        .map(|i| build_entry(cell, i, master_seed, ci))
        .collect()
}

/// Writes every corpus graph under `out_dir` and returns the manifest (also written).
pub fn generate_benchmark(out_dir: &Path, master_seed: u64, scale: f64) -> Result<Manifest, BenchmarkError> {
    if !(scale > 0.0) {
        return Err(BenchmarkError::BadScale(scale));
    }
    let graph_dir = out_dir.join(GRAPH_DIR);
    fs::create_dir_all(&graph_dir).map_err(io_err(&graph_dir))?;
    let per_cell = cell_count(scale);
    let jobs: Vec<(usize, Cell, usize)> = cells()
        .into_iter()
        .enumerate()
        .flat_map(|(ci, cell)| (0..per_cell).map(move |i| (ci, cell, i)))
        .collect();
    let graphs = jobs
        .par_iter()
        .map(|&(ci, cell, i)| {
            let (entry, g) = build_entry(cell, i, master_seed, ci)?;
            let path = out_dir.join(&entry.path);
            let file = File::create(&path).map_err(io_err(&path))?;
            save_edgelist(&g, BufWriter::new(file)).map_err(io_err(&path))?;
            Ok(entry)
        })
        .collect::<Result<Vec<_>, BenchmarkError>>()?;
    let manifest = Manifest {
        master_seed,
        scale,
        graphs,
    };
    let path = out_dir.join(MANIFEST_FILE);
    let mut f = File::create(&path).map_err(io_err(&path))?;
    f.write_all(manifest.to_json()?.as_bytes()).map_err(io_err(&path))?;
    Ok(manifest)
}
