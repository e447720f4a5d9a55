//! Black-box tests of the `resdist` binary: exit codes, output files, and
//! error reporting.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn resdist(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_resdist"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, contents: &str) {
    fs::write(dir.join(name), contents).unwrap();
}

const TOY_EDGES: &str = "# comment line\n\
    p1\ts1\n\
    p1\ts2\n\
    p2\ts1\n\
    p2\ts2\n\
    p3\ts2\n\
    p3\ts3\n\
    p1\ts3\n";

#[test]
fn distances_pipeline_produces_matrix_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "edges.tsv", TOY_EDGES);
    let out = resdist(
        &["distances", "--input", "edges.tsv", "--epsilon", "0.001", "--out", "run"],
        tmp.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let matrix = fs::read_to_string(tmp.path().join("run/distances.csv")).unwrap();
    assert!(matrix.starts_with("paper_a,paper_b,resistance,lower,upper,iterations,converged\n"));
    assert_eq!(matrix.lines().count(), 4, "3 pairs expected");
    let manifest = fs::read_to_string(tmp.path().join("run/manifest.json")).unwrap();
    assert!(manifest.contains("\"command\": \"distances\""));
    assert!(manifest.contains("\"epsilon\": 0.001"));
    // Scheduling knobs stay out of the manifest.
    assert!(!manifest.contains("threads"));
}

#[test]
fn prune_report_lists_reasons() {
    let tmp = tempfile::tempdir().unwrap();
    write(
        tmp.path(),
        "edges.tsv",
        &format!("{TOY_EDGES}p4\ts9\n"),
    );
    let out = resdist(
        &["distances", "--input", "edges.tsv", "--out", "run"],
        tmp.path(),
    );
    assert!(out.status.success());
    let report = fs::read_to_string(tmp.path().join("run/prune_report.csv")).unwrap();
    assert_eq!(
        report,
        "node_id,reason\ns9,singleton_source\np4,isolated_paper\n"
    );
}

#[test]
fn malformed_edge_list_exits_2_with_line_number() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "edges.tsv", "p1\ts1\nonly-one-column\n");
    let out = resdist(
        &["distances", "--input", "edges.tsv", "--out", "run"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 2"), "stderr: {stderr}");
}

#[test]
fn disconnected_papers_exit_4_with_component_report() {
    let tmp = tempfile::tempdir().unwrap();
    write(
        tmp.path(),
        "edges.tsv",
        "p1\ts1\np2\ts1\np3\ts2\np4\ts2\n",
    );
    let out = resdist(
        &["distances", "--input", "edges.tsv", "--out", "run"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(4));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("components"), "stderr: {stderr}");
    assert!(stderr.contains("p3"), "stderr: {stderr}");
}

#[test]
fn pair_prints_row_and_respects_bounds() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "edges.tsv", TOY_EDGES);
    let out = resdist(
        &["pair", "--input", "edges.tsv", "--out", "run", "p1", "p2"],
        tmp.path(),
    );
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    let row = stdout.lines().nth(1).expect("data row");
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields[0], "p1");
    let (value, lower, upper) = (
        fields[2].parse::<f64>().unwrap(),
        fields[3].parse::<f64>().unwrap(),
        fields[4].parse::<f64>().unwrap(),
    );
    assert!(lower <= value && value <= upper);
    assert_eq!(fs::read_to_string(tmp.path().join("run/pair.csv")).unwrap().lines().count(), 2);
}

#[test]
fn pair_unknown_node_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "edges.tsv", TOY_EDGES);
    let out = resdist(
        &["pair", "--input", "edges.tsv", "--out", "run", "p1", "ghost"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn pair_disconnected_exits_4() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "edges.tsv", "p1\ts1\np2\ts1\np3\ts2\np4\ts2\n");
    let out = resdist(
        &["pair", "--input", "edges.tsv", "--out", "run", "p1", "p3"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn sample_records_seed_and_stops_at_exhaustion() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "edges.tsv", TOY_EDGES);
    let out = resdist(
        &["sample", "--input", "edges.tsv", "--seed", "9", "--out", "run"],
        tmp.path(),
    );
    assert!(out.status.success());
    let estimate = fs::read_to_string(tmp.path().join("run/sample_estimate.csv")).unwrap();
    assert!(estimate.starts_with("# seed=9\nn,N,mean,std_error\n"));
    assert!(estimate.lines().nth(2).unwrap().starts_with("3,3,"));
    let sampled = fs::read_to_string(tmp.path().join("run/sampled_distances.csv")).unwrap();
    assert_eq!(sampled.lines().count(), 4);
}

#[test]
fn rank_unknown_label_exits_2_and_lists_available() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "edges.tsv", TOY_EDGES);
    write(tmp.path(), "topics.csv", "paper_id,topic_label\np1,alpha\np2,beta\n");
    let ok = resdist(
        &["distances", "--input", "edges.tsv", "--out", "run"],
        tmp.path(),
    );
    assert!(ok.status.success());
    let out = resdist(
        &[
            "rank", "--matrix", "run/distances.csv", "--topics", "topics.csv",
            "--label", "gamma", "--out", "rank",
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("alpha") && stderr.contains("beta"), "stderr: {stderr}");
}

#[test]
fn rank_emits_cumulative_recall_column() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "edges.tsv", TOY_EDGES);
    write(tmp.path(), "topics.csv", "paper_id,topic_label\np1,alpha\np2,alpha\n");
    resdist(&["distances", "--input", "edges.tsv", "--out", "run"], tmp.path());
    let out = resdist(
        &[
            "rank", "--matrix", "run/distances.csv", "--topics", "topics.csv",
            "--label", "alpha", "--out", "rank",
        ],
        tmp.path(),
    );
    assert!(out.status.success());
    let ranking = fs::read_to_string(tmp.path().join("rank/ranking.csv")).unwrap();
    assert!(ranking.starts_with("rank,paper_id,score,is_topic_member,cumulative_topic_count\n"));
    let last = ranking.lines().last().unwrap();
    assert!(last.ends_with(",2"), "curve should end at member count: {last}");
}

#[test]
fn histogram_of_degenerate_matrix_exits_3_on_zero_distance() {
    let tmp = tempfile::tempdir().unwrap();
    write(
        tmp.path(),
        "matrix.csv",
        "paper_a,paper_b,resistance,lower,upper,iterations,converged\n\
         a,b,0,0,0,0,true\n",
    );
    let out = resdist(
        &["histogram", "--matrix", "matrix.csv", "--out", "run"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn cluster_rejects_bad_linkage_and_bad_k() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "edges.tsv", TOY_EDGES);
    resdist(&["distances", "--input", "edges.tsv", "--out", "run"], tmp.path());
    let bad_linkage = resdist(
        &["cluster", "--matrix", "run/distances.csv", "--linkage", "median", "-k", "2", "--out", "c"],
        tmp.path(),
    );
    assert_eq!(bad_linkage.status.code(), Some(2));
    let bad_k = resdist(
        &["cluster", "--matrix", "run/distances.csv", "-k", "99", "--out", "c"],
        tmp.path(),
    );
    assert_eq!(bad_k.status.code(), Some(3));
}

#[test]
fn distances_csv_matches_exact_oracle() {
    use resdist::exact::exact_all_pairs;
    use resdist::synth::{random_bipartite_edges, BipartiteConfig};
    use resdist::{build_graph, prune_singleton_sources, weigh, WeightingScheme};

    let tmp = tempfile::tempdir().unwrap();
    let edges = random_bipartite_edges(
        &BipartiteConfig {
            papers: 30,
            sources: 60,
            min_refs: 4,
            max_refs: 8,
            extra_leaf_papers: 0,
        },
        31_337,
    );
    let mut text = String::new();
    for (a, b) in &edges {
        text.push_str(&format!("{a}\t{b}\n"));
    }
    write(tmp.path(), "edges.tsv", &text);

    let epsilon = 0.01;
    let out = resdist(
        &["distances", "--input", "edges.tsv", "--epsilon", "0.01", "--out", "run"],
        tmp.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let matrix = resdist::DistanceMatrix::read_csv(
        fs::read(tmp.path().join("run/distances.csv")).unwrap().as_slice(),
    )
    .unwrap();
    let (built, _) = build_graph(&edges).unwrap();
    let (pruned, _) = prune_singleton_sources(&built);
    let g = weigh(&pruned, WeightingScheme::GeometricMeanDegree).unwrap();
    let oracle = exact_all_pairs(&g, &g.papers()).unwrap();
    assert_eq!(matrix.labels(), oracle.labels());
    for i in 0..matrix.paper_count() {
        for j in (i + 1)..matrix.paper_count() {
            assert!(
                (matrix.get(i, j) - oracle.get(i, j)).abs() <= epsilon,
                "pair ({i},{j}): {} vs {}",
                matrix.get(i, j),
                oracle.get(i, j)
            );
        }
    }
}

#[test]
fn couple_explicit_pairs_only() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "edges.tsv", TOY_EDGES);
    let out = resdist(
        &[
            "couple", "--input", "edges.tsv", "--out", "run",
            "--pair", "p1", "p2", "--pair", "p1", "p3",
        ],
        tmp.path(),
    );
    assert!(out.status.success());
    let coupling = fs::read_to_string(tmp.path().join("run/coupling.csv")).unwrap();
    assert_eq!(coupling.lines().count(), 3);
    assert!(coupling.starts_with("paper_a,paper_b,coupling_unweighted,coupling_weighted,cosine\n"));
}
