mod common;

use std::path::PathBuf;

use common::cycle;
use proptest::prelude::*;
use walkest_core::access::LimitedGraphView;
use walkest_core::graph::{build_graph, generate, save_edgelist, GeneratorSpec, Graph};
use walkest_core::promptgen::*;
use walkest_core::walkers::{simple_random_walk, Walk};

const WALKS: usize = 5;

fn walks_on(g: &Graph, length: usize, seed: u64) -> Vec<Walk> {
    (0..WALKS as u64)
        .map(|i| {
            let mut view = LimitedGraphView::unlimited(g);
            let start = ((seed + i) as usize * 7919) % g.node_count();
            simple_random_walk(&mut view, start, length, length / 10, seed + i).unwrap()
        })
        .collect()
}

fn prompt_for(task: Task, g: &Graph, walks: &[Walk], anon: &Anonymizer) -> PromptArtifact {
    let stats: Vec<WalkStats> = walks.iter().map(|w| compute_walk_stats(w, anon, w.seed).unwrap()).collect();
    let combined = combined_walk_stats(walks, anon, 0).unwrap();
    let provenance = Provenance {
        graph_id: format!("n{}", g.node_count()),
        walk_seeds: walks.iter().map(|w| w.seed).collect(),
        config: Default::default(),
    };
    render_prompt(task, &stats, &combined, &TaskParams::default(), provenance).unwrap()
}

fn edgelist_bytes(g: &Graph) -> usize {
    let mut out = Vec::new();
    save_edgelist(g, &mut out).unwrap();
    out.len()
}

fn golden_path(task: Task) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(format!("{}_{}.txt", TEMPLATE_VERSION, task.as_str()))
}

/// Set `WALKEST_BLESS=1` to rewrite the golden files after an intended template change.
#[test]
fn template_bytes_match_golden_files() {
    let g = build_graph(&[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (3, 4)]).unwrap();
    let walk = |seed, steps: &[(usize, usize)]| Walk {
        start: steps[0].0,
        seed,
        burn_in_dropped: 0,
        steps: steps.to_vec(),
    };
    let walks = [
        walk(1, &[(0, 3), (1, 2), (2, 3), (3, 3), (4, 1), (3, 3), (0, 3)]),
        walk(2, &[(4, 1), (3, 3), (2, 3), (0, 3), (1, 2)]),
    ];
    let anon = Anonymizer::with_offset(4_200_000);
    let bless = std::env::var_os("WALKEST_BLESS").is_some();
    for task in Task::ALL {
        let text = prompt_for(task, &g, &walks, &anon).text;
        let path = golden_path(task);
        if bless {
            std::fs::create_dir_all(path.parent().unwrap()).unwrap();
            std::fs::write(&path, &text).unwrap();
        }
        let golden = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(text, golden, "{task} prompt drifted from {}", path.display());
    }
}

#[test]
fn large_ba_prompt_is_small_and_stable() {
    let length = 3000;
    let ba = |n| generate(&GeneratorSpec::BarabasiAlbert { nodes: n, attach: 3 }, 5).unwrap().0;
    let g = ba(100_000);
    let anon = Anonymizer::from_seed(1);
    let p = prompt_for(Task::Size, &g, &walks_on(&g, length, 10), &anon);
    let edges = edgelist_bytes(&g);
    println!("prompt {} bytes, edgelist {} bytes, ratio {:.0}", p.text.len(), edges, edges as f64 / p.text.len() as f64);
    assert!(p.text.len() * 100 <= edges);

    let words = p.text.split_whitespace().count();
    let ratio = p.token_estimate as f64 / words as f64;
    println!("token estimate {} vs {} whitespace tokens", p.token_estimate, words);
    assert!((0.5..=2.0).contains(&ratio), "ratio {ratio}");

    let g2 = ba(200_000);
    let p2 = prompt_for(Task::Size, &g2, &walks_on(&g2, length, 10), &anon);
    let growth = p2.text.len() as f64 / p.text.len() as f64 - 1.0;
    println!("doubling n: {} -> {} bytes", p.text.len(), p2.text.len());
    assert!(growth.abs() < 0.2, "growth {growth}");
}

fn integers(text: &str) -> impl Iterator<Item = u64> + '_ {
    text.split(|c: char| !(c.is_ascii_digit() || c == '.'))
        .filter(|t| !t.contains('.'))
        .filter_map(|t| t.parse().ok())
}

#[test]
fn prompts_never_show_raw_ids() {
    let (g, _) = generate(&GeneratorSpec::ErdosRenyi { nodes: 200_000, edge_multiplier: 3.0 }, 2).unwrap();
    let walks = walks_on(&g, 800, 4);
    let anon = Anonymizer::from_seed(77);
    let visited: std::collections::HashSet<usize> = walks.iter().flat_map(|w| w.nodes()).collect();
    let small_limit = (WALKS * 900) as u64;
    let max_degree = visited.iter().map(|&u| g.degree(u)).max().unwrap() as u64;
    let raw_id_hits = visited.iter().filter(|&&u| u as u64 > small_limit.max(max_degree)).count();
    assert!(raw_id_hits > 1000, "scan needs raw ids that cannot pass for counts");
    for task in Task::ALL {
        let text = prompt_for(task, &g, &walks, &anon).text;
        for x in integers(&text) {
            if x >= OFFSET_RANGE.start {
                let u = anon.node(x).expect("name below offset");
                assert!(visited.contains(&u), "{task}: name {x} is not a visited node");
            } else {
                assert!(x <= small_limit.max(max_degree), "{task}: {x} looks like a raw id");
            }
        }
    }
}

#[test]
fn cycle_deciles_sum_to_unique_nodes() {
    let g = cycle(100);
    let mut view = LimitedGraphView::unlimited(&g);
    let w = simple_random_walk(&mut view, 0, 1000, 0, 3).unwrap();
    let s = compute_walk_stats(&w, &Anonymizer::from_seed(3), 3).unwrap();
    assert_eq!(s.decile_new_nodes.iter().sum::<usize>(), s.unique_nodes);
    assert!(s.unique_edges <= s.walk_length);
    assert_eq!(s.degree_histogram.keys().copied().collect::<Vec<_>>(), vec![2]);
}

#[test]
fn k2_forced_walk() {
    let w = Walk {
        start: 0,
        seed: 0,
        burn_in_dropped: 0,
        steps: vec![(0, 1), (1, 1), (0, 1), (1, 1)],
    };
    let s = compute_walk_stats(&w, &Anonymizer::with_offset(4_200_000), 0).unwrap();
    assert_eq!(s.unique_nodes, 2);
    assert_eq!(s.first_collision_step, Some(2));
    assert_eq!(s.first_return_step, Some(2));
    assert_eq!(s.degree_histogram.into_iter().collect::<Vec<_>>(), vec![(1, 2)]);
}

#[test]
fn anonymize_examples() {
    let offset = Anonymizer::from_seed(9).offset;
    assert!(OFFSET_RANGE.contains(&offset));
    let m = anonymize(&[0, 1], 9);
    assert_eq!(m[&1] - m[&0], 1);
    assert_eq!(m[&0], offset);
    let nodes: Vec<usize> = (0..100_000).collect();
    let big = anonymize(&nodes, 5);
    let image: std::collections::HashSet<u64> = big.values().copied().collect();
    assert_eq!(image.len(), nodes.len());
    assert_eq!(big, anonymize(&nodes, 5));
}

#[test]
fn artifact_json_shape() {
    let g = cycle(10);
    let walks = walks_on(&g, 20, 1);
    let p = prompt_for(Task::Community, &g, &walks, &Anonymizer::from_seed(1));
    let v: serde_json::Value = serde_json::to_value(&p).unwrap();
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys.len(), 4);
    for k in ["task", "text", "token_estimate", "provenance"] {
        assert!(keys.contains(&k));
    }
    assert_eq!(v["task"], "community");
    assert_eq!(v["provenance"]["walk_seeds"].as_array().unwrap().len(), WALKS);
    let back: PromptArtifact = serde_json::from_value(v).unwrap();
    assert_eq!(back, p);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stats_invariants(steps in prop::collection::vec((0usize..30, 1usize..8), 1..200), seed in any::<u64>()) {
        let w = Walk { start: steps[0].0, seed, burn_in_dropped: 0, steps };
        let s = compute_walk_stats(&w, &Anonymizer::from_seed(seed), seed).unwrap();
        prop_assert_eq!(s.decile_new_nodes.iter().sum::<usize>(), s.unique_nodes);
        prop_assert!(s.unique_edges <= s.walk_length);
        if let Some(c) = s.first_collision_step {
            prop_assert!(c <= s.walk_length);
        }
        prop_assert_eq!(s.degree_histogram.values().sum::<usize>(), s.unique_nodes);
    }

    #[test]
    fn token_estimate_is_ceil_quarter(text in ".{0,300}") {
        prop_assert_eq!(estimate_tokens(&text), text.len().div_ceil(4));
    }
}
