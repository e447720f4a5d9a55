//! End-to-end library pipeline over a synthetic corpus: ingest, prune,
//! weigh, solve all pairs both ways, serialize, and run the analytics.

use resdist::analysis::{log_histogram, rank_by_topic, TopicSet};
use resdist::cluster::{agglomerate, Linkage};
use resdist::exact::exact_all_pairs;
use resdist::resistance::{all_pairs_resistance, SolverConfig, Sweep};
use resdist::synth::{random_bipartite_edges, BipartiteConfig};
use resdist::{
    build_graph, parse_edge_list, prune_singleton_sources, weigh, DistanceMatrix,
    WeightingScheme,
};

#[test]
fn corpus_round_trip_and_cross_solver_agreement() {
    // Render the synthetic corpus through the text format, as a real run would.
    let edges = random_bipartite_edges(
        &BipartiteConfig {
            papers: 24,
            sources: 50,
            min_refs: 4,
            max_refs: 9,
            extra_leaf_papers: 2,
        },
        0xF00D,
    );
    let mut text = String::from("# synthetic corpus\n");
    for (a, b) in &edges {
        text.push_str(&format!("{a}\t{b}\n"));
    }

    let parsed = parse_edge_list(text.as_bytes(), b'\t').unwrap();
    assert_eq!(parsed.len(), edges.len());
    let (built, _) = build_graph(&parsed).unwrap();
    let (pruned, report) = prune_singleton_sources(&built);
    assert_eq!(
        built.node_count(),
        pruned.node_count() + report.singleton_sources.len() + report.isolated_papers.len()
    );
    let g = weigh(&pruned, WeightingScheme::GeometricMeanDegree).unwrap();
    let papers = g.papers();
    let component = g.connected_component_of(papers[0]).unwrap();
    assert_eq!(component.len(), g.node_count(), "corpus must be connected");

    let epsilon = 1e-3;
    let jacobi = all_pairs_resistance(&g, &papers, &SolverConfig::with_epsilon(epsilon), 4).unwrap();
    let gauss = all_pairs_resistance(
        &g,
        &papers,
        &SolverConfig {
            epsilon,
            sweep: Sweep::GaussSeidel,
            ..SolverConfig::default()
        },
        2,
    )
    .unwrap();
    let oracle = exact_all_pairs(&g, &papers).unwrap();
    for i in 0..papers.len() {
        for j in (i + 1)..papers.len() {
            assert!((jacobi.get(i, j) - oracle.get(i, j)).abs() <= epsilon);
            assert!((gauss.get(i, j) - oracle.get(i, j)).abs() <= epsilon);
        }
    }

    // CSV round trip preserves every entry bit-for-bit at 12 significant digits.
    let mut csv = Vec::new();
    jacobi.write_csv(&mut csv).unwrap();
    let back = DistanceMatrix::read_csv(csv.as_slice()).unwrap();
    assert_eq!(back.labels(), jacobi.labels());
    let mut csv2 = Vec::new();
    back.write_csv(&mut csv2).unwrap();
    assert_eq!(csv, csv2);

    // Analytics accept the solver output directly.
    let topic = TopicSet {
        label: "first-half".to_string(),
        members: jacobi.labels().iter().take(10).cloned().collect(),
    };
    let ranking = rank_by_topic(&jacobi, &topic).unwrap();
    assert_eq!(ranking.entries.len(), papers.len());
    let hist = log_histogram(&jacobi, 10).unwrap();
    assert_eq!(hist.total_count(), jacobi.pair_count());
    let (dendrogram, flat) = agglomerate(&jacobi, Linkage::Ward, 4, false).unwrap();
    assert_eq!(dendrogram.merges().len(), papers.len() - 1);
    assert_eq!(flat.len(), papers.len());
    assert_eq!(flat.iter().collect::<std::collections::BTreeSet<_>>().len(), 4);
}
