#![allow(dead_code)]

use walkest_core::graph::{build_graph, generate, GeneratorSpec, Graph, LfrParams};

pub fn cycle(n: u64) -> Graph {
    build_graph(&(0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>()).unwrap()
}

pub fn complete(n: u64) -> Graph {
    let mut e = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            e.push((i, j));
        }
    }
    build_graph(&e).unwrap()
}

pub fn star(leaves: u64) -> Graph {
    build_graph(&(1..=leaves).map(|i| (0, i)).collect::<Vec<_>>()).unwrap()
}

pub fn path(n: u64) -> Graph {
    build_graph(&(1..n).map(|i| (i - 1, i)).collect::<Vec<_>>()).unwrap()
}

/// One connected graph of at most 200 nodes per generator family.
pub fn small_family_graphs() -> Vec<(&'static str, Graph)> {
    let specs = [
        ("ba", GeneratorSpec::BarabasiAlbert { nodes: 100, attach: 3 }),
        ("er", GeneratorSpec::ErdosRenyi { nodes: 150, edge_multiplier: 3.0 }),
        (
            "grp",
            GeneratorSpec::GaussianPartition {
                nodes: 180,
                mean_block: 30.0,
                variance: 15.0,
                p_in: 0.3,
                p_out: 0.02,
            },
        ),
        ("lfr", GeneratorSpec::Lfr(LfrParams { max_degree: 20, ..LfrParams::new(200, 4, 0.1) })),
        ("hex", GeneratorSpec::HexLattice { rows: 5, cols: 6 }),
        ("tri", GeneratorSpec::TriLattice { rows: 8, cols: 9 }),
        ("hypercube", GeneratorSpec::Hypercube { dim: 6 }),
    ];
    specs
        .into_iter()
        .map(|(name, spec)| {
            let (g, _) = generate(&spec, 11).unwrap();
            let g = g.largest_connected_component();
            assert!(g.node_count() <= 200 && g.node_count() > 10, "{name}");
            (name, g)
        })
        .collect()
}

/// Random graph with `n` nodes where each pair is an edge with probability `p`.
pub fn random_graph(n: usize, p: f64, rng: &mut impl rand::Rng) -> Graph {
    let mut e = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < p {
                e.push((i, j));
            }
        }
    }
    Graph::from_internal_edges(n, &e)
}

pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}
