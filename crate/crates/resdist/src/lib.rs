//! Effective-resistance thematic distances on weighted citation networks.
//!
//! Papers and the sources they cite form a nearly bipartite undirected graph.
//! Treating every citation link as an electrical conductor — with conductance
//! one over the geometric mean of the two endpoint degrees — the effective
//! resistance between two papers is a metric that accounts for every path
//! between them, not just the shortest one.
//!
//! The crate provides:
//!
//! * [`graph`] — edge-list ingestion, singleton-source pruning, and the
//!   degree-normalized link weighting;
//! * [`resistance`] — the bounded voltage-averaging solver (Jacobi or
//!   Gauss-Seidel sweeps) with certified lower/upper resistance bounds;
//! * [`exact`] — a dense grounded-Laplacian reference solver;
//! * [`sampling`] — distance-distribution estimation from a random pair
//!   sample with a finite-population standard error and stopping rule;
//! * [`coupling`] — one-sweep current approximations and the derived
//!   bibliographic-coupling measures;
//! * [`analysis`] — centrality-normalized median-distance ranking,
//!   log-distance histograms, and precision/recall scoring;
//! * [`cluster`] — Lance-Williams agglomerative clustering of distance
//!   matrices;
//! * [`synth`] — seeded synthetic networks for tests and benchmarks.

pub mod analysis;
pub mod cluster;
pub mod coupling;
pub mod error;
pub mod exact;
pub mod graph;
pub mod matrix;
pub mod resistance;
pub mod sampling;
pub mod synth;

pub use error::{Error, Result};
pub use graph::{
    build_graph, parse_edge_list, prune_singleton_sources, weigh, BuildReport, CitationGraph,
    NodeIdx, NodeKind, PruneReport, WeightingScheme,
};
pub use matrix::{DistanceMatrix, PairEntry};
pub use resistance::{
    all_pairs_resistance, resistance_between, ResistanceResult, SolverConfig, Sweep,
};
