//! Shared fixtures for the solver benchmarks.

use resdist::synth::{random_connected_bipartite, BipartiteConfig};
use resdist::{weigh, CitationGraph, WeightingScheme};

/// Pruned, degree-normalized benchmark network of roughly `papers` papers.
pub fn bench_graph(papers: usize, seed: u64) -> CitationGraph {
    let pruned = random_connected_bipartite(
        &BipartiteConfig {
            papers,
            sources: papers * 3,
            min_refs: 5,
            max_refs: 12,
            extra_leaf_papers: 0,
        },
        seed,
    );
    weigh(&pruned, WeightingScheme::GeometricMeanDegree).unwrap()
}
