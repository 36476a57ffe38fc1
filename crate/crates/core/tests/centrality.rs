mod common;

use common::random_graph;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::Rng;
use walkest_core::access::LimitedGraphView;
use walkest_core::centrality::*;
use walkest_core::graph::{generate, Family, GeneratorSpec, Graph};
use walkest_core::promptgen::{compute_walk_stats, Anonymizer};
use walkest_core::seed;
use walkest_core::walkers::{simple_random_walk, Walk};

const INF: usize = usize::MAX / 4;

fn floyd_warshall(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.node_count();
    let mut d = vec![vec![INF; n]; n];
    for u in 0..n {
        d[u][u] = 0;
        for &v in g.neighbors(u) {
            d[u][v] = 1;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// Shortest-path counts from the distance matrix: the last hop of a geodesic s->t
/// is some neighbor of t one step closer to s.
fn path_counts(g: &Graph, d: &[Vec<usize>]) -> Vec<Vec<f64>> {
    let n = g.node_count();
    let mut sigma = vec![vec![0.0; n]; n];
    for s in 0..n {
        let mut by_dist: Vec<usize> = (0..n).filter(|&t| d[s][t] < INF).collect();
        by_dist.sort_by_key(|&t| d[s][t]);
        for t in by_dist {
            sigma[s][t] = if t == s {
                1.0
            } else {
                g.neighbors(t)
                    .iter()
                    .filter(|&&u| d[s][u] + 1 == d[s][t])
                    .map(|&u| sigma[s][u])
                    .sum()
            };
        }
    }
    sigma
}

fn brute_betweenness(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    let d = floyd_warshall(g);
    let sigma = path_counts(g, &d);
    (0..n)
        .map(|v| {
            let mut c = 0.0;
            for s in 0..n {
                for t in (s + 1)..n {
                    if s == v || t == v || d[s][t] >= INF {
                        continue;
                    }
                    if d[s][v] + d[v][t] == d[s][t] {
                        c += sigma[s][v] * sigma[v][t] / sigma[s][t];
                    }
                }
            }
            c
        })
        .collect()
}

fn brute_closeness(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    let d = floyd_warshall(g);
    (0..n)
        .map(|v| {
            let reach: Vec<usize> = d[v].iter().copied().filter(|&x| x < INF).collect();
            let r = (reach.len() - 1) as f64;
            let sum: usize = reach.iter().sum();
            if sum == 0 {
                0.0
            } else {
                r / sum as f64 * r / (n - 1) as f64
            }
        })
        .collect()
}

/// Solves `(I - λ M) x = (1 - λ)/n` where dangling columns of `M` are uniform.
fn pagerank_direct(g: &Graph, damping: f64) -> Vec<f64> {
    let n = g.node_count();
    let mut a = DMatrix::<f64>::identity(n, n);
    for u in 0..n {
        let du = g.degree(u);
        if du == 0 {
            for v in 0..n {
                a[(v, u)] -= damping / n as f64;
            }
        } else {
            for &v in g.neighbors(u) {
                a[(v, u)] -= damping / du as f64;
            }
        }
    }
    let b = DVector::from_element(n, (1.0 - damping) / n as f64);
    a.lu().solve(&b).expect("nonsingular").iter().copied().collect()
}

fn dense(r: &RankedNodes<f64>, n: usize) -> Vec<f64> {
    (0..n).map(|u| r.score(u).unwrap()).collect()
}

#[test]
fn betweenness_and_closeness_match_all_pairs_enumeration() {
    let mut rng = seed::rng(7);
    for i in 0..50 {
        let n = rng.random_range(2..=50);
        let p = if i % 5 == 0 { 0.04 } else { rng.random_range(0.05..0.5) };
        let g = random_graph(n, p, &mut rng);
        let b = dense(&betweenness::<f64>(&g), n);
        let c = dense(&closeness::<f64>(&g), n);
        for (x, y) in b.iter().zip(brute_betweenness(&g)) {
            assert!((x - y).abs() <= 1e-9, "betweenness {x} vs {y}");
        }
        for (x, y) in c.iter().zip(brute_closeness(&g)) {
            assert!((x - y).abs() <= 1e-9, "closeness {x} vs {y}");
        }
    }
}

#[test]
fn pagerank_matches_direct_solve() {
    let mut rng = seed::rng(8);
    for _ in 0..20 {
        let n = rng.random_range(2..=200);
        let p = rng.random_range(0.005..0.1);
        let g = random_graph(n, p, &mut rng);
        let pr = dense(&pagerank(&g, 0.85, 1e-13).unwrap(), n);
        let exact = pagerank_direct(&g, 0.85);
        for (x, y) in pr.iter().zip(&exact) {
            assert!((x - y).abs() <= 1e-8, "{x} vs {y}");
        }
        let total: f64 = pr.iter().sum();
        assert!((total - 1.0).abs() <= 1e-9);
        assert!(pr.iter().all(|&x| x > 0.0));
    }
}

fn random_tree(n: usize, rng: &mut impl Rng) -> Graph {
    let edges: Vec<(usize, usize)> = (1..n).map(|i| (rng.random_range(0..i), i)).collect();
    Graph::from_internal_edges(n, &edges)
}

/// Sizes of the components left after deleting `v` from a tree.
fn branch_sizes(g: &Graph, v: usize) -> Vec<usize> {
    let mut seen = vec![false; g.node_count()];
    seen[v] = true;
    g.neighbors(v)
        .iter()
        .map(|&root| {
            let mut stack = vec![root];
            seen[root] = true;
            let mut size = 0;
            while let Some(u) = stack.pop() {
                size += 1;
                for &w in g.neighbors(u) {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            size
        })
        .collect()
}

#[test]
fn star_center_betweenness() {
    let g = Graph::from_internal_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
    let b = betweenness::<f64>(&g);
    assert_eq!(b.score(0), Some(6.0));
    assert_eq!(b.ordering[0], 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tree_betweenness_counts_split_pairs(n in 2usize..=30, s in any::<u64>()) {
        let mut rng = seed::rng(s);
        let g = random_tree(n, &mut rng);
        let b = betweenness::<f64>(&g);
        for v in 0..n {
            let sizes = branch_sizes(&g, v);
            let sq: usize = sizes.iter().map(|x| x * x).sum();
            let expected = ((n - 1) * (n - 1) - sq) as f64 / 2.0;
            prop_assert!((b.score(v).unwrap() - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn ordering_survives_uniform_scaling(raw in prop::collection::vec(0u32..20, 1..60), scale in 0.001f64..1000.0) {
        let base: Vec<f64> = raw.iter().map(|&x| f64::from(x)).collect();
        let scaled: Vec<f64> = base.iter().map(|x| x * scale).collect();
        let a = RankedNodes::from_dense(base);
        let b = RankedNodes::from_dense(scaled);
        prop_assert_eq!(&a.ordering, &b.ordering);
        for w in a.ordering.windows(2) {
            let (x, y) = (a.score(w[0]).unwrap(), a.score(w[1]).unwrap());
            prop_assert!(x > y || (x == y && w[0] < w[1]));
        }
    }

    #[test]
    fn constant_degree_is_never_er(d in 1usize..200, len in 1usize..300) {
        let w = Walk {
            start: 0,
            seed: 0,
            burn_in_dropped: 0,
            steps: (0..len).map(|u| (u, d)).collect(),
        };
        let stats = compute_walk_stats(&w, &Anonymizer::with_offset(1_000_000), 0).unwrap();
        prop_assert_ne!(classify_structure(&[stats]).unwrap(), Family::ER);
    }
}

fn walk_stats(g: &Graph, walks: usize, length: usize, seed: u64) -> Vec<walkest_core::promptgen::WalkStats> {
    let anon = Anonymizer::from_seed(seed);
    (0..walks as u64)
        .map(|i| {
            let mut view = LimitedGraphView::unlimited(g);
            let w = simple_random_walk(&mut view, (i as usize * 7) % g.node_count(), length, length / 10, seed + i).unwrap();
            compute_walk_stats(&w, &anon, seed + i).unwrap()
        })
        .collect()
}

#[test]
fn hypercube_walk_is_grid() {
    for dim in [4, 6, 8] {
        let (g, _) = generate(&GeneratorSpec::Hypercube { dim }, 0).unwrap();
        assert_eq!(classify_structure(&walk_stats(&g, 3, 200, 5)).unwrap(), Family::Grid);
    }
}

#[test]
fn lattices_classify_as_grid() {
    for spec in [
        GeneratorSpec::HexLattice { rows: 10, cols: 12 },
        GeneratorSpec::TriLattice { rows: 12, cols: 12 },
    ] {
        let (g, _) = generate(&spec, 0).unwrap();
        assert_eq!(classify_structure(&walk_stats(&g, 3, 300, 9)).unwrap(), Family::Grid);
    }
}
