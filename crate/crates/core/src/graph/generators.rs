//! Seeded synthetic graph generators for the benchmark families.
//!
//! Every generator is a pure function of `(spec, seed)`.

use std::collections::HashSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{Graph, GraphError, NodeId, Result};
use crate::seed::{self, Rng};

/// Coarse structural family, used for labelling and scoring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    BA,
    ER,
    GRP,
    LFR,
    Grid,
}

impl Family {
    pub const STRUCTURE_LABELS: [Family; 4] = [Family::BA, Family::ER, Family::LFR, Family::Grid];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::BA => "BA",
            Family::ER => "ER",
            Family::GRP => "GRP",
            Family::LFR => "LFR",
            Family::Grid => "Grid",
        }
    }

    pub fn parse(s: &str) -> Option<Family> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ba" => Some(Family::BA),
            "er" => Some(Family::ER),
            "grp" => Some(Family::GRP),
            "lfr" => Some(Family::LFR),
            "grid" => Some(Family::Grid),
            _ => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Parameters of the planted-partition LFR variant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LfrParams {
    pub nodes: usize,
    pub communities: usize,
    /// Fraction of edge endpoints leaving their community.
    pub mixing: f64,
    /// Power-law exponent of the degree sequence.
    pub degree_exponent: f64,
    /// Power-law exponent of the community sizes.
    pub community_exponent: f64,
    pub avg_degree: f64,
    pub max_degree: usize,
    pub min_community: usize,
    pub max_community: usize,
}

impl LfrParams {
    pub fn new(nodes: usize, communities: usize, mixing: f64) -> Self {
        let mean = nodes as f64 / communities.max(1) as f64;
        Self {
            nodes,
            communities,
            mixing,
            degree_exponent: 2.0,
            community_exponent: 1.0,
            avg_degree: 6.0,
            max_degree: 30,
            min_community: ((mean * 0.5) as usize).max(2),
            max_community: ((mean * 1.5) as usize).max(3),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorSpec {
    /// Preferential attachment, `attach` edges per new node.
    BarabasiAlbert { nodes: usize, attach: usize },
    /// G(n, p) with `p` chosen so the expected edge count is `edge_multiplier * nodes`.
    ErdosRenyi { nodes: usize, edge_multiplier: f64 },
    /// Gaussian block sizes (mean `mean_block`, variance `variance`) joined by `p_in`/`p_out`.
    GaussianPartition {
        nodes: usize,
        mean_block: f64,
        variance: f64,
        p_in: f64,
        p_out: f64,
    },
    Lfr(LfrParams),
    /// Honeycomb with `rows x cols` hexagons.
    HexLattice { rows: usize, cols: usize },
    /// Triangulated `rows x cols` square grid.
    TriLattice { rows: usize, cols: usize },
    Hypercube { dim: u32 },
}

impl GeneratorSpec {
    pub fn family(&self) -> Family {
        match self {
            GeneratorSpec::BarabasiAlbert { .. } => Family::BA,
            GeneratorSpec::ErdosRenyi { .. } => Family::ER,
            GeneratorSpec::GaussianPartition { .. } => Family::GRP,
            GeneratorSpec::Lfr(_) => Family::LFR,
            GeneratorSpec::HexLattice { .. }
            | GeneratorSpec::TriLattice { .. }
            | GeneratorSpec::Hypercube { .. } => Family::Grid,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(GraphError::Spec(m));
        match *self {
            GeneratorSpec::BarabasiAlbert { nodes, attach } => {
                if attach < 1 || attach >= nodes {
                    return bad(format!("BA requires 1 <= m < n, got m={attach}, n={nodes}"));
                }
            }
            GeneratorSpec::ErdosRenyi {
                nodes,
                edge_multiplier,
            } => {
                if nodes < 2 || !(edge_multiplier > 0.0) {
                    return bad("ER requires n >= 2 and a positive multiplier".into());
                }
                if 2.0 * edge_multiplier > (nodes - 1) as f64 {
                    return bad(format!(
                        "ER multiplier {edge_multiplier} exceeds a complete graph on {nodes} nodes"
                    ));
                }
            }
            GeneratorSpec::GaussianPartition {
                nodes,
                mean_block,
                variance,
                p_in,
                p_out,
            } => {
                if nodes < 2 || !(mean_block >= 1.0) || !(variance >= 0.0) {
                    return bad("GRP requires n >= 2, mean block >= 1, variance >= 0".into());
                }
                if !(0.0..=1.0).contains(&p_in) || !(0.0..=1.0).contains(&p_out) {
                    return bad("GRP probabilities must lie in [0, 1]".into());
                }
            }
            GeneratorSpec::Lfr(ref p) => {
                if !(p.mixing > 0.0 && p.mixing < 1.0) {
                    return bad(format!("LFR mixing must lie in (0, 1), got {}", p.mixing));
                }
                if p.communities < 1 || p.nodes < 3 * p.communities {
                    return bad("LFR needs at least three nodes per community".into());
                }
                if !(p.avg_degree >= 1.0) || (p.max_degree as f64) < p.avg_degree {
                    return bad("LFR requires 1 <= avg degree <= max degree".into());
                }
                if p.max_degree >= p.nodes {
                    return bad("LFR max degree must be below the node count".into());
                }
                if p.min_community < 2 || p.min_community > p.max_community {
                    return bad("LFR community bounds must satisfy 2 <= min <= max".into());
                }
                if !(p.degree_exponent >= 1.0) || !(p.community_exponent >= 0.0) {
                    return bad("LFR exponents out of range".into());
                }
            }
            GeneratorSpec::HexLattice { rows, cols } | GeneratorSpec::TriLattice { rows, cols } => {
                if rows < 1 || cols < 1 {
                    return bad("lattice dimensions must be positive".into());
                }
            }
            GeneratorSpec::Hypercube { dim } => {
                if !(1..=24).contains(&dim) {
                    return bad(format!("hypercube dimension {dim} outside 1..=24"));
                }
            }
        }
        Ok(())
    }
}

/// Planted community assignment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommunityLabels {
    pub assignment: Vec<usize>,
    pub community_count: usize,
}

impl CommunityLabels {
    /// Relabels arbitrary ids to contiguous `0..k` in order of first appearance.
    pub fn from_assignment(raw: &[usize]) -> Self {
        let mut map = std::collections::HashMap::new();
        let assignment: Vec<usize> = raw
            .iter()
            .map(|&c| {
                let next = map.len();
                *map.entry(c).or_insert(next)
            })
            .collect();
        Self {
            community_count: map.len(),
            assignment,
        }
    }

    /// Restricts labels to the given parent nodes.
    pub fn restrict(&self, parents: &[NodeId]) -> Self {
        let raw: Vec<usize> = parents.iter().map(|&u| self.assignment[u]).collect();
        Self::from_assignment(&raw)
    }

    pub fn members(&self, community: usize) -> Vec<NodeId> {
        (0..self.assignment.len())
            .filter(|&u| self.assignment[u] == community)
            .collect()
    }
}

/// Fraction of edges whose endpoints carry different labels.
pub fn mixing_fraction(g: &Graph, labels: &[usize]) -> f64 {
    if g.edge_count() == 0 {
        return 0.0;
    }
    let inter = g.edges().filter(|&(u, v)| labels[u] != labels[v]).count();
    inter as f64 / g.edge_count() as f64
}

/// Generates a graph (and planted labels for LFR and GRP).
pub fn generate(spec: &GeneratorSpec, seed: u64) -> Result<(Graph, Option<CommunityLabels>)> {
    spec.validate()?;
    let mut rng = seed::rng(seed);
    Ok(match *spec {
        GeneratorSpec::BarabasiAlbert { nodes, attach } => {
            (barabasi_albert(nodes, attach, &mut rng), None)
        }
        GeneratorSpec::ErdosRenyi {
            nodes,
            edge_multiplier,
        } => {
            let p = 2.0 * edge_multiplier / (nodes - 1) as f64;
            let mut edges = Vec::new();
            gnp_pairs(nodes, p, &mut rng, |u, v| edges.push((u, v)));
            (Graph::from_internal_edges(nodes, &edges), None)
        }
        GeneratorSpec::GaussianPartition {
            nodes,
            mean_block,
            variance,
            p_in,
            p_out,
        } => {
            let (g, labels) = gaussian_partition(nodes, mean_block, variance, p_in, p_out, &mut rng);
            (g, Some(labels))
        }
        GeneratorSpec::Lfr(ref p) => {
            let (g, labels) = lfr(p, &mut rng)?;
            (g, Some(labels))
        }
        GeneratorSpec::HexLattice { rows, cols } => (hex_lattice(rows, cols), None),
        GeneratorSpec::TriLattice { rows, cols } => (tri_lattice(rows, cols), None),
        GeneratorSpec::Hypercube { dim } => (hypercube(dim), None),
    })
}

/// Geometric skip length for Bernoulli(p) trials.
#[inline]
fn skip(rng: &mut Rng, log_q: f64) -> u64 {
    let r: f64 = rng.random();
    ((1.0 - r).ln() / log_q).floor() as u64
}

/// Visits each unordered pair `(u, v)`, `u > v`, of `0..n` independently with probability `p`.
fn gnp_pairs(n: usize, p: f64, rng: &mut Rng, mut emit: impl FnMut(usize, usize)) {
    if p <= 0.0 || n < 2 {
        return;
    }
    if p >= 1.0 {
        for v in 1..n {
            for w in 0..v {
                emit(v, w);
            }
        }
        return;
    }
    let log_q = (1.0 - p).ln();
    let mut v: u64 = 1;
    let mut w: i64 = -1;
    let n = n as u64;
    while v < n {
        w += 1 + skip(rng, log_q) as i64;
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            emit(v as usize, w as usize);
        }
    }
}

/// Visits each pair of `0..a x 0..b` independently with probability `p`.
fn bipartite_pairs(a: usize, b: usize, p: f64, rng: &mut Rng, mut emit: impl FnMut(usize, usize)) {
    if p <= 0.0 || a == 0 || b == 0 {
        return;
    }
    let total = (a as u64) * (b as u64);
    if p >= 1.0 {
        for i in 0..total {
            emit((i / b as u64) as usize, (i % b as u64) as usize);
        }
        return;
    }
    let log_q = (1.0 - p).ln();
    let mut idx = skip(rng, log_q);
    while idx < total {
        emit((idx / b as u64) as usize, (idx % b as u64) as usize);
        idx = idx.saturating_add(1 + skip(rng, log_q));
    }
}

/// Star on `m + 1` nodes, then each new node attaches to `m` distinct targets
/// drawn proportionally to degree. Edge count is `m * (n - m)`.
fn barabasi_albert(n: usize, m: usize, rng: &mut Rng) -> Graph {
    let mut edges = Vec::with_capacity(m * (n - m));
    let mut repeated: Vec<NodeId> = Vec::with_capacity(2 * m * (n - m));
    for leaf in 1..=m {
        edges.push((0, leaf));
        repeated.push(0);
        repeated.push(leaf);
    }
    let mut chosen: Vec<NodeId> = Vec::with_capacity(m);
    for source in (m + 1)..n {
        chosen.clear();
        while chosen.len() < m {
            let t = repeated[rng.random_range(0..repeated.len())];
            if !chosen.contains(&t) {
                chosen.push(t);
            }
        }
        for &t in &chosen {
            edges.push((source, t));
            repeated.push(t);
            repeated.push(source);
        }
    }
    Graph::from_internal_edges(n, &edges)
}

fn gaussian_partition(
    n: usize,
    mean: f64,
    variance: f64,
    p_in: f64,
    p_out: f64,
    rng: &mut Rng,
) -> (Graph, CommunityLabels) {
    let normal = Normal::new(mean, variance.sqrt()).expect("validated parameters");
    let mut sizes = Vec::new();
    let mut total = 0usize;
    while total < n {
        let s = (normal.sample(rng).round().max(1.0) as usize).min(n - total);
        sizes.push(s);
        total += s;
    }
    let mut starts = Vec::with_capacity(sizes.len());
    let mut assignment = Vec::with_capacity(n);
    let mut acc = 0;
    for (c, &s) in sizes.iter().enumerate() {
        starts.push(acc);
        acc += s;
        assignment.extend(std::iter::repeat_n(c, s));
    }
    let mut edges = Vec::new();
    for (c, &s) in sizes.iter().enumerate() {
        let off = starts[c];
        gnp_pairs(s, p_in, rng, |u, v| edges.push((off + u, off + v)));
    }
    for i in 0..sizes.len() {
        for j in (i + 1)..sizes.len() {
            let (oi, oj) = (starts[i], starts[j]);
            bipartite_pairs(sizes[i], sizes[j], p_out, rng, |u, v| {
                edges.push((oi + u, oj + v))
            });
        }
    }
    let community_count = sizes.len();
    (
        Graph::from_internal_edges(n, &edges),
        CommunityLabels {
            assignment,
            community_count,
        },
    )
}

/// Mean of the continuous power law `x^-tau` truncated to `[a, b]`.
fn powerlaw_mean(a: f64, b: f64, tau: f64) -> f64 {
    let int = |e: f64| {
        if e.abs() < 1e-12 {
            (b / a).ln()
        } else {
            (b.powf(e) - a.powf(e)) / e
        }
    };
    int(2.0 - tau) / int(1.0 - tau)
}

/// Inverse-CDF draw from the power law `x^-tau` on `[a, b]`.
fn powerlaw_sample(a: f64, b: f64, tau: f64, rng: &mut Rng) -> f64 {
    let u: f64 = rng.random();
    if (tau - 1.0).abs() < 1e-12 {
        a * (b / a).powf(u)
    } else {
        let e = 1.0 - tau;
        (a.powf(e) + u * (b.powf(e) - a.powf(e))).powf(1.0 / e)
    }
}

/// Largest-remainder rounding of `weights` to integers summing to `total`.
fn apportion(weights: &[f64], total: usize) -> Vec<usize> {
    let sum: f64 = weights.iter().sum();
    let exact: Vec<f64> = weights.iter().map(|w| w / sum * total as f64).collect();
    let mut out: Vec<usize> = exact.iter().map(|x| x.floor() as usize).collect();
    let mut rest = total - out.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&i, &j| {
        let fi = exact[i] - exact[i].floor();
        let fj = exact[j] - exact[j].floor();
        fj.total_cmp(&fi).then(i.cmp(&j))
    });
    for &i in order.iter().cycle() {
        if rest == 0 {
            break;
        }
        out[i] += 1;
        rest -= 1;
    }
    out
}

#[inline]
fn key(u: NodeId, v: NodeId) -> (NodeId, NodeId) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Randomly pairs stubs, retrying rejected pairs for a few rounds.
fn pair_stubs(
    mut stubs: Vec<NodeId>,
    rng: &mut Rng,
    accept: impl Fn(NodeId, NodeId) -> bool,
    seen: &mut HashSet<(NodeId, NodeId)>,
    out: &mut Vec<(NodeId, NodeId)>,
) {
    for _ in 0..20 {
        if stubs.len() < 2 {
            return;
        }
        stubs.shuffle(rng);
        let mut left = Vec::new();
        for pair in stubs.chunks(2) {
            if pair.len() < 2 {
                left.push(pair[0]);
                continue;
            }
            let (u, v) = (pair[0], pair[1]);
            if u != v && accept(u, v) && seen.insert(key(u, v)) {
                out.push(key(u, v));
            } else {
                left.push(u);
                left.push(v);
            }
        }
        stubs = left;
    }
}

fn lfr(p: &LfrParams, rng: &mut Rng) -> Result<(Graph, CommunityLabels)> {
    let n = p.nodes;
    let k_max = p.max_degree as f64;

    // smallest degree such that the truncated power law has the requested mean
    let (mut lo, mut hi) = (1.0f64, k_max);
    if powerlaw_mean(lo, k_max, p.degree_exponent) < p.avg_degree {
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if powerlaw_mean(mid, k_max, p.degree_exponent) < p.avg_degree {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    let k_min = lo;
    let degrees: Vec<usize> = (0..n)
        .map(|_| {
            (powerlaw_sample(k_min, k_max, p.degree_exponent, rng).round() as usize)
                .clamp(1, p.max_degree)
        })
        .collect();

    let raw_sizes: Vec<f64> = (0..p.communities)
        .map(|_| {
            powerlaw_sample(
                p.min_community as f64,
                p.max_community as f64 + 1.0,
                p.community_exponent,
                rng,
            )
        })
        .collect();
    let sizes = apportion(&raw_sizes, n);
    if sizes.iter().any(|&s| s < 2) {
        return Err(GraphError::Spec("LFR community sizes collapsed below 2".into()));
    }

    // assign nodes, highest internal degree first, to communities that can host them
    let mut internal: Vec<usize> = degrees
        .iter()
        .map(|&k| ((1.0 - p.mixing) * k as f64).round() as usize)
        .collect();
    let mut order: Vec<NodeId> = (0..n).collect();
    order.shuffle(rng);
    order.sort_by(|&a, &b| internal[b].cmp(&internal[a]));
    let mut capacity = sizes.clone();
    let mut community = vec![0usize; n];
    for &u in &order {
        let fits: Vec<usize> = (0..sizes.len())
            .filter(|&c| capacity[c] > 0 && sizes[c] > internal[u])
            .collect();
        let chosen = if fits.is_empty() {
            (0..sizes.len())
                .filter(|&c| capacity[c] > 0)
                .max_by_key(|&c| (sizes[c], std::cmp::Reverse(c)))
                .expect("capacities sum to n")
        } else {
            let total: usize = fits.iter().map(|&c| capacity[c]).sum();
            let mut r = rng.random_range(0..total);
            let mut pick = fits[0];
            for &c in &fits {
                if r < capacity[c] {
                    pick = c;
                    break;
                }
                r -= capacity[c];
            }
            pick
        };
        capacity[chosen] -= 1;
        community[u] = chosen;
        internal[u] = internal[u].min(sizes[chosen] - 1);
    }
    let mut external: Vec<usize> = (0..n).map(|u| degrees[u] - internal[u]).collect();

    let mut members: Vec<Vec<NodeId>> = vec![Vec::new(); sizes.len()];
    for u in 0..n {
        members[community[u]].push(u);
    }

    let mut seen = HashSet::new();
    let mut intra = Vec::new();
    for group in &members {
        let mut stubs: Vec<NodeId> = group
            .iter()
            .flat_map(|&u| std::iter::repeat_n(u, internal[u]))
            .collect();
        if stubs.len() % 2 == 1 {
            let u = stubs.pop().expect("odd length is non-empty");
            external[u] += 1;
        }
        pair_stubs(stubs, rng, |_, _| true, &mut seen, &mut intra);
    }
    let mut stubs: Vec<NodeId> = (0..n)
        .flat_map(|u| std::iter::repeat_n(u, external[u]))
        .collect();
    if stubs.len() % 2 == 1 {
        stubs.pop();
    }
    let mut inter = Vec::new();
    pair_stubs(
        stubs,
        rng,
        |u, v| community[u] != community[v],
        &mut seen,
        &mut inter,
    );

    rewire_to_mixing(p.mixing, &community, &mut intra, &mut inter, &mut seen, rng);

    let mut edges = intra;
    edges.extend(inter);
    let g = Graph::from_internal_edges(n, &edges);
    Ok((
        g,
        CommunityLabels {
            assignment: community,
            community_count: sizes.len(),
        },
    ))
}

/// Degree-preserving double edge swaps until the inter-community edge fraction is
/// within 0.01 of `target`.
fn rewire_to_mixing(
    target: f64,
    community: &[usize],
    intra: &mut Vec<(NodeId, NodeId)>,
    inter: &mut Vec<(NodeId, NodeId)>,
    seen: &mut HashSet<(NodeId, NodeId)>,
    rng: &mut Rng,
) {
    const TOL: f64 = 0.01;
    let total = intra.len() + inter.len();
    if total == 0 {
        return;
    }
    let max_attempts = 200 * total;
    for _ in 0..max_attempts {
        let mu = inter.len() as f64 / total as f64;
        if (mu - target).abs() <= TOL {
            return;
        }
        if mu < target {
            if intra.len() < 2 {
                return;
            }
            let i = rng.random_range(0..intra.len());
            let j = rng.random_range(0..intra.len());
            let (a, b) = intra[i];
            let (c, d) = intra[j];
            if community[a] == community[c] {
                continue;
            }
            let (e1, e2) = (key(a, c), key(b, d));
            if seen.contains(&e1) || seen.contains(&e2) {
                continue;
            }
            let (hi, lo) = if i > j { (i, j) } else { (j, i) };
            if hi == lo {
                continue;
            }
            seen.remove(&intra.swap_remove(hi));
            seen.remove(&intra.swap_remove(lo));
            seen.insert(e1);
            seen.insert(e2);
            inter.push(e1);
            inter.push(e2);
        } else {
            if inter.len() < 2 {
                return;
            }
            let i = rng.random_range(0..inter.len());
            let j = rng.random_range(0..inter.len());
            if i == j {
                continue;
            }
            let (a, b) = inter[i];
            let (mut c, mut d) = inter[j];
            if community[a] != community[c] {
                std::mem::swap(&mut c, &mut d);
            }
            if community[a] != community[c] || community[b] != community[d] || a == c || b == d {
                continue;
            }
            let (e1, e2) = (key(a, c), key(b, d));
            if seen.contains(&e1) || seen.contains(&e2) {
                continue;
            }
            let (hi, lo) = if i > j { (i, j) } else { (j, i) };
            seen.remove(&inter.swap_remove(hi));
            seen.remove(&inter.swap_remove(lo));
            seen.insert(e1);
            seen.insert(e2);
            intra.push(e1);
            intra.push(e2);
        }
    }
}

/// Brick-wall honeycomb on a `(cols + 1) x (2 rows + 2)` vertex grid with its two
/// pendant corners removed.
fn hex_lattice(rows: usize, cols: usize) -> Graph {
    let height = 2 * rows + 2;
    let width = cols + 1;
    let id = |i: usize, j: usize| i * height + j;
    let mut edges = Vec::new();
    for i in 0..width {
        for j in 0..height {
            if j + 1 < height {
                edges.push((id(i, j), id(i, j + 1)));
            }
            if i + 1 < width && i % 2 == j % 2 {
                edges.push((id(i, j), id(i + 1, j)));
            }
        }
    }
    let full = Graph::from_internal_edges(width * height, &edges);
    let keep: Vec<NodeId> = full.nodes().filter(|&u| full.degree(u) >= 2).collect();
    full.induced_subgraph(&keep).0
}

/// Square grid on `(rows + 1) x (cols + 1)` vertices with one diagonal per cell.
fn tri_lattice(rows: usize, cols: usize) -> Graph {
    let (w, h) = (cols + 1, rows + 1);
    let id = |i: usize, j: usize| j * w + i;
    let mut edges = Vec::new();
    for j in 0..h {
        for i in 0..w {
            if i + 1 < w {
                edges.push((id(i, j), id(i + 1, j)));
            }
            if j + 1 < h {
                edges.push((id(i, j), id(i, j + 1)));
            }
            if i + 1 < w && j + 1 < h {
                edges.push((id(i, j), id(i + 1, j + 1)));
            }
        }
    }
    Graph::from_internal_edges(w * h, &edges)
}

fn hypercube(dim: u32) -> Graph {
    let n = 1usize << dim;
    let mut edges = Vec::with_capacity(n * dim as usize / 2);
    for u in 0..n {
        for b in 0..dim {
            let v = u ^ (1 << b);
            if u < v {
                edges.push((u, v));
            }
        }
    }
    Graph::from_internal_edges(n, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hypercube_is_regular() {
        let (g, labels) = generate(&GeneratorSpec::Hypercube { dim: 4 }, 0).unwrap();
        assert!(labels.is_none());
        assert_eq!(g.node_count(), 16);
        assert!(g.nodes().all(|u| g.degree(u) == 4));
        g.check_invariants().unwrap();
    }

    #[test]
    fn ba_edge_count_follows_star_initialisation() {
        let spec = GeneratorSpec::BarabasiAlbert {
            nodes: 100,
            attach: 3,
        };
        for seed in 0..5 {
            let (g, _) = generate(&spec, seed).unwrap();
            assert_eq!(g.edge_count(), 291);
            assert!(g.nodes().all(|u| g.degree(u) >= 3 || u <= 3));
            g.check_invariants().unwrap();
        }
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let cases = [
            GeneratorSpec::BarabasiAlbert { nodes: 3, attach: 3 },
            GeneratorSpec::BarabasiAlbert { nodes: 3, attach: 0 },
            GeneratorSpec::ErdosRenyi {
                nodes: 10,
                edge_multiplier: 50.0,
            },
            GeneratorSpec::Lfr(LfrParams::new(100, 4, 1.0)),
            GeneratorSpec::Lfr(LfrParams::new(100, 4, 0.0)),
            GeneratorSpec::Hypercube { dim: 0 },
        ];
        for spec in cases {
            assert!(matches!(generate(&spec, 1), Err(GraphError::Spec(_))), "{spec:?}");
        }
    }

    #[test]
    fn lattices_use_their_degree_sets() {
        let (hex, _) = generate(&GeneratorSpec::HexLattice { rows: 6, cols: 7 }, 0).unwrap();
        assert!(hex.nodes().all(|u| matches!(hex.degree(u), 2 | 3)));
        assert_eq!(hex.node_count(), 8 * 14 - 2);
        let (tri, _) = generate(&GeneratorSpec::TriLattice { rows: 6, cols: 7 }, 0).unwrap();
        assert!(tri.nodes().all(|u| matches!(tri.degree(u), 2 | 3 | 4 | 6)));
        assert!(tri.nodes().any(|u| tri.degree(u) == 6));
        for g in [hex, tri] {
            g.check_invariants().unwrap();
            assert_eq!(g.components().iter().max(), Some(&0));
        }
    }

    #[test]
    fn grp_labels_cover_all_nodes() {
        let spec = GeneratorSpec::GaussianPartition {
            nodes: 500,
            mean_block: 50.0,
            variance: 25.0,
            p_in: 0.25,
            p_out: 0.01,
        };
        let (g, labels) = generate(&spec, 3).unwrap();
        let labels = labels.unwrap();
        assert_eq!(labels.assignment.len(), 500);
        assert_eq!(
            labels.assignment.iter().max().unwrap() + 1,
            labels.community_count
        );
        assert!(mixing_fraction(&g, &labels.assignment) < 0.5);
    }

    #[test]
    fn lfr_hits_requested_mixing() {
        for (mu, seed) in [(0.1, 1u64), (0.3, 2), (0.05, 3)] {
            let spec = GeneratorSpec::Lfr(LfrParams::new(1000, 8, mu));
            let (g, labels) = generate(&spec, seed).unwrap();
            let labels = labels.unwrap();
            assert_eq!(labels.community_count, 8);
            let actual = mixing_fraction(&g, &labels.assignment);
            assert!((actual - mu).abs() <= 0.02, "mu={mu} actual={actual}");
            g.check_invariants().unwrap();
            let mean_deg = g.average_degree();
            assert!((mean_deg - 6.0).abs() < 1.5, "mean degree {mean_deg}");
        }
    }

    #[test]
    fn apportion_preserves_total() {
        assert_eq!(apportion(&[1.0, 1.0, 1.0], 10), vec![4, 3, 3]);
        assert_eq!(apportion(&[3.0, 1.0], 8).iter().sum::<usize>(), 8);
    }

    #[test]
    fn powerlaw_mean_matches_closed_forms() {
        // tau = 0 is uniform
        assert!((powerlaw_mean(2.0, 4.0, 0.0) - 3.0).abs() < 1e-12);
        // tau = 2: (b - a)... mean = ln(b/a) / (1/a - 1/b)
        let expected = (10.0f64).ln() / (1.0 - 0.1);
        assert!((powerlaw_mean(1.0, 10.0, 2.0) - expected).abs() < 1e-12);
    }
}
