//! Seeded synthetic citation networks and planted distance matrices for
//! tests, benchmarks, and calibration runs.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{build_graph, prune_singleton_sources, CitationGraph};
use crate::matrix::DistanceMatrix;

/// Shape of a random paper/source citation network.
#[derive(Debug, Clone, Copy)]
pub struct BipartiteConfig {
    pub papers: usize,
    pub sources: usize,
    /// Reference-list length per paper, drawn uniformly from `min_refs..=max_refs`.
    pub min_refs: usize,
    pub max_refs: usize,
    /// Additional papers citing exactly one already-cited source; they survive
    /// pruning as degree-1 leaves.
    pub extra_leaf_papers: usize,
}

impl Default for BipartiteConfig {
    fn default() -> Self {
        BipartiteConfig {
            papers: 30,
            sources: 60,
            min_refs: 3,
            max_refs: 8,
            extra_leaf_papers: 0,
        }
    }
}

/// Random citation edge list: each paper cites a uniform sample of sources.
pub fn random_bipartite_edges(cfg: &BipartiteConfig, seed: u64) -> Vec<(String, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for p in 0..cfg.papers {
        let refs = rng.random_range(cfg.min_refs..=cfg.max_refs.min(cfg.sources));
        let mut cited = std::collections::BTreeSet::new();
        while cited.len() < refs {
            cited.insert(rng.random_range(0..cfg.sources));
        }
        for s in cited {
            edges.push((format!("p{p:04}"), format!("s{s:04}")));
        }
    }
    if cfg.extra_leaf_papers > 0 {
        // Leaf papers attach to sources that already have a citation, so the
        // source survives pruning and the leaf paper keeps degree 1.
        let cited_sources: Vec<String> = {
            let mut seen = std::collections::BTreeSet::new();
            for (_, s) in &edges {
                seen.insert(s.clone());
            }
            seen.into_iter().collect()
        };
        for l in 0..cfg.extra_leaf_papers {
            let s = &cited_sources[rng.random_range(0..cited_sources.len())];
            edges.push((format!("leaf{l:03}"), s.clone()));
        }
    }
    edges
}

/// Random bipartite network that is connected after singleton-source pruning,
/// returned pruned and unit-weighted. Retries derived seeds until connected.
pub fn random_connected_bipartite(cfg: &BipartiteConfig, seed: u64) -> CitationGraph {
    for attempt in 0..100u64 {
        let edges = random_bipartite_edges(cfg, seed.wrapping_add(attempt.wrapping_mul(1_000_003)));
        let Ok((graph, _)) = build_graph(&edges) else {
            continue;
        };
        let (pruned, _) = prune_singleton_sources(&graph);
        if pruned.node_count() == 0 {
            continue;
        }
        let papers = pruned.papers();
        if papers.len() < 2 {
            continue;
        }
        let component = pruned
            .connected_component_of(papers[0])
            .expect("paper exists");
        if component.len() == pruned.node_count() {
            return pruned;
        }
    }
    panic!("no connected graph within 100 attempts for {cfg:?} (seed {seed})");
}

/// Two planted topics: block papers cite their own block's sources with
/// probability `own_topic_bias`, the other block's otherwise.
#[derive(Debug, Clone, Copy)]
pub struct PlantedTopicsConfig {
    pub papers_per_topic: usize,
    pub sources_per_topic: usize,
    pub min_refs: usize,
    pub max_refs: usize,
    pub own_topic_bias: f64,
}

impl Default for PlantedTopicsConfig {
    fn default() -> Self {
        PlantedTopicsConfig {
            papers_per_topic: 50,
            sources_per_topic: 200,
            min_refs: 8,
            max_refs: 15,
            own_topic_bias: 0.85,
        }
    }
}

/// Returns the edge list and the ids of the first (planted) topic's papers.
pub fn planted_two_topics(cfg: &PlantedTopicsConfig, seed: u64) -> (Vec<(String, String)>, Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    let paper_id = |topic: usize, i: usize| format!("t{topic}p{i:03}");
    let source_id = |topic: usize, i: usize| format!("t{topic}s{i:03}");
    for topic in 0..2 {
        for i in 0..cfg.papers_per_topic {
            let refs = rng.random_range(cfg.min_refs..=cfg.max_refs);
            let mut cited = std::collections::BTreeSet::new();
            while cited.len() < refs {
                let own = rng.random_range(0.0..1.0) < cfg.own_topic_bias;
                let t = if own { topic } else { 1 - topic };
                cited.insert((t, rng.random_range(0..cfg.sources_per_topic)));
            }
            for (t, s) in cited {
                edges.push((paper_id(topic, i), source_id(t, s)));
            }
        }
    }
    let topic_a = (0..cfg.papers_per_topic).map(|i| paper_id(0, i)).collect();
    (edges, topic_a)
}

/// Distance matrix with planted blocks: within-block distances are drawn
/// around `within_mean`, cross-block around `cross_mean`, both with Gaussian
/// noise `sigma` (clamped positive). Returns the matrix and per-paper block
/// labels.
pub fn planted_block_distances(
    block_sizes: &[usize],
    within_mean: f64,
    cross_mean: f64,
    sigma: f64,
    seed: u64,
) -> (DistanceMatrix, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut blocks = Vec::new();
    for (b, &size) in block_sizes.iter().enumerate() {
        blocks.extend(std::iter::repeat_n(b, size));
    }
    let n = blocks.len();
    assert!(n >= 2, "need at least two points");
    let labels: Vec<String> = (0..n).map(|i| format!("x{i:04}")).collect();
    let mut values = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let mean = if blocks[i] == blocks[j] {
                within_mean
            } else {
                cross_mean
            };
            let d = (mean + sigma * standard_normal(&mut rng)).max(0.05);
            values.push(d);
        }
    }
    let matrix = DistanceMatrix::from_values(labels, &values).expect("valid condensed matrix");
    (matrix, blocks)
}

/// Box-Muller standard normal draw.
fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.random_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
