//! Subcommand implementations: each one runs the library pipeline, writes
//! CSV outputs plus a `manifest.json` into the output directory, and prints
//! a short summary to stderr.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use resdist::analysis;
use resdist::cluster::{agglomerate, Linkage};
use resdist::coupling;
use resdist::matrix::fmt_sig12;
use resdist::sampling::{estimate_distribution, SamplerConfig};
use resdist::{
    all_pairs_resistance, build_graph, parse_edge_list, prune_singleton_sources,
    resistance_between, weigh, CitationGraph, DistanceMatrix, NodeIdx, PruneReport,
};

use crate::manifest::RunManifest;
use crate::{
    CliError, ClusterArgs, CoupleArgs, DistancesArgs, GraphArgs, HistogramArgs, OutArgs, PairArgs,
    RankArgs, SampleArgs,
};

fn parse_delimiter(raw: &str) -> Result<u8, CliError> {
    match raw {
        "tab" | "\\t" => Ok(b'\t'),
        "comma" => Ok(b','),
        "space" => Ok(b' '),
        other => {
            let mut chars = other.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) if c.is_ascii() => Ok(c as u8),
                _ => Err(CliError::Usage(format!(
                    "--delimiter must be tab, comma, space, or one ASCII character, got `{other}`"
                ))),
            }
        }
    }
}

struct LoadedGraph {
    /// Pruned, unit-weighted graph; commands weigh it as needed.
    pruned: CitationGraph,
    prune_report: PruneReport,
    raw: Vec<u8>,
    nodes_before: usize,
    edges_before: usize,
}

fn load_graph(args: &GraphArgs) -> Result<LoadedGraph, CliError> {
    let raw = fs::read(&args.input)?;
    let delimiter = parse_delimiter(&args.delimiter)?;
    let edges = parse_edge_list(raw.as_slice(), delimiter)?;
    let (built, report) = build_graph(&edges)?;
    if report.self_citations_rejected > 0 {
        eprintln!(
            "warning: rejected {} self-citation record(s)",
            report.self_citations_rejected
        );
    }
    let (nodes_before, edges_before) = (built.node_count(), built.edge_count());
    let (pruned, prune_report) = prune_singleton_sources(&built);
    Ok(LoadedGraph {
        pruned,
        prune_report,
        raw,
        nodes_before,
        edges_before,
    })
}

fn ensure_out(out: &OutArgs) -> Result<&Path, CliError> {
    fs::create_dir_all(&out.out)?;
    Ok(&out.out)
}

fn write_file(dir: &Path, name: &str, write: impl FnOnce(&mut dyn Write) -> resdist::Result<()>) -> Result<(), CliError> {
    let mut out = BufWriter::new(fs::File::create(dir.join(name))?);
    write(&mut out)?;
    out.flush()?;
    Ok(())
}

fn graph_config(manifest: &mut RunManifest, args: &GraphArgs) {
    manifest.config("delimiter", &args.delimiter);
    manifest.config(
        "weighting",
        match args.weighting {
            crate::WeightingArg::Unit => "unit",
            crate::WeightingArg::Geodeg => "geodeg",
        },
    );
}

fn solver_config(manifest: &mut RunManifest, args: &crate::SolverArgs) {
    manifest.config("epsilon", args.epsilon);
    manifest.config("max_iterations", args.max_iter);
    manifest.config(
        "sweep",
        match args.sweep {
            crate::SweepArg::Jacobi => "jacobi",
            crate::SweepArg::GaussSeidel => "gauss-seidel",
        },
    );
}

pub fn distances(args: DistancesArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let cfg = args.solver.config()?;
    let loaded = load_graph(&args.graph)?;
    let weighted = weigh(&loaded.pruned, args.graph.weighting.into())?;
    let papers = weighted.papers();
    let matrix = all_pairs_resistance(&weighted, &papers, &cfg, args.solver.parallelism())?;

    let dir = ensure_out(&args.out)?;
    write_file(dir, "distances.csv", |w| matrix.write_csv(w))?;
    write_file(dir, "prune_report.csv", |w| loaded.prune_report.write_csv(w))?;

    let mut manifest = RunManifest::new("distances");
    manifest.input(&args.graph.input, &loaded.raw);
    graph_config(&mut manifest, &args.graph);
    solver_config(&mut manifest, &args.solver);
    manifest.output("distances.csv").output("prune_report.csv");
    manifest.write(dir)?;

    eprintln!(
        "distances: {} -> {} nodes after pruning, {} -> {} edges, {} papers, {} pairs, {:.2}s",
        loaded.nodes_before,
        weighted.node_count(),
        loaded.edges_before,
        weighted.edge_count(),
        papers.len(),
        matrix.pair_count(),
        started.elapsed().as_secs_f64()
    );
    Ok(())
}

const PAIR_HEADER: &str = "paper_a,paper_b,resistance,lower,upper,iterations,converged";

pub fn pair(args: PairArgs) -> Result<(), CliError> {
    let cfg = args.solver.config()?;
    let loaded = load_graph(&args.graph)?;
    let weighted = weigh(&loaded.pruned, args.graph.weighting.into())?;
    let a = weighted.node_index(&args.node_a)?;
    let b = weighted.node_index(&args.node_b)?;
    let result = resistance_between(&weighted, a, b, &cfg)?;

    let row = format!(
        "{},{},{},{},{},{},{}",
        args.node_a,
        args.node_b,
        fmt_sig12(result.resistance),
        fmt_sig12(result.lower_bound),
        fmt_sig12(result.upper_bound),
        result.iterations,
        result.converged
    );
    println!("{PAIR_HEADER}");
    println!("{row}");

    let dir = ensure_out(&args.out)?;
    write_file(dir, "pair.csv", |w| {
        writeln!(w, "{PAIR_HEADER}")?;
        writeln!(w, "{row}")?;
        Ok(())
    })?;

    let mut manifest = RunManifest::new("pair");
    manifest.input(&args.graph.input, &loaded.raw);
    graph_config(&mut manifest, &args.graph);
    solver_config(&mut manifest, &args.solver);
    manifest.config("node_a", &args.node_a);
    manifest.config("node_b", &args.node_b);
    manifest.output("pair.csv");
    manifest.write(dir)?;
    Ok(())
}

pub fn sample(args: SampleArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let solver_cfg = args.solver.config()?;
    let sampler_cfg = SamplerConfig {
        epsilon: solver_cfg.epsilon,
        streak: args.streak,
        rng_seed: args.seed,
    };
    let loaded = load_graph(&args.graph)?;
    let weighted = weigh(&loaded.pruned, args.graph.weighting.into())?;
    let papers = weighted.papers();
    let (estimate, sampled) = estimate_distribution(&weighted, &papers, &sampler_cfg, &solver_cfg)?;

    let dir = ensure_out(&args.out)?;
    write_file(dir, "sample_estimate.csv", |w| {
        writeln!(w, "# seed={}", args.seed)?;
        writeln!(w, "n,N,mean,std_error")?;
        writeln!(
            w,
            "{},{},{},{}",
            estimate.n(),
            estimate.population(),
            fmt_sig12(estimate.mean()),
            fmt_sig12(estimate.std_error().unwrap_or(f64::NAN)),
        )?;
        Ok(())
    })?;
    write_file(dir, "sampled_distances.csv", |w| {
        writeln!(w, "paper_a,paper_b,resistance")?;
        for s in &sampled {
            writeln!(
                w,
                "{},{},{}",
                weighted.node_id(papers[s.a]),
                weighted.node_id(papers[s.b]),
                fmt_sig12(s.distance)
            )?;
        }
        Ok(())
    })?;

    let mut manifest = RunManifest::new("sample");
    manifest.input(&args.graph.input, &loaded.raw);
    graph_config(&mut manifest, &args.graph);
    solver_config(&mut manifest, &args.solver);
    manifest.config("seed", args.seed);
    manifest.config("streak", args.streak);
    manifest
        .output("sample_estimate.csv")
        .output("sampled_distances.csv");
    manifest.write(dir)?;

    eprintln!(
        "sample: {} of {} pairs, mean {}, standard error {}, {:.2}s",
        estimate.n(),
        estimate.population(),
        fmt_sig12(estimate.mean()),
        fmt_sig12(estimate.std_error().unwrap_or(f64::NAN)),
        started.elapsed().as_secs_f64()
    );
    Ok(())
}

pub fn rank(args: RankArgs) -> Result<(), CliError> {
    let matrix_raw = fs::read(&args.matrix)?;
    let topics_raw = fs::read(&args.topics)?;
    let matrix = DistanceMatrix::read_csv(matrix_raw.as_slice())?;
    let topics = analysis::parse_topics(topics_raw.as_slice())?;
    let topic = topics
        .iter()
        .find(|t| t.label == args.label)
        .ok_or_else(|| {
            CliError::Core(resdist::Error::UnknownLabel {
                label: args.label.clone(),
                available: topics.iter().map(|t| t.label.clone()).collect(),
            })
        })?;
    let ranking = analysis::rank_by_topic(&matrix, topic)?;

    let dir = ensure_out(&args.out)?;
    write_file(dir, "ranking.csv", |w| ranking.write_csv(w))?;

    let mut manifest = RunManifest::new("rank");
    manifest.input(&args.matrix, &matrix_raw);
    manifest.input(&args.topics, &topics_raw);
    manifest.config("label", &args.label);
    manifest.output("ranking.csv");
    manifest.write(dir)?;

    eprintln!(
        "rank: {} papers, {} topic members in matrix",
        ranking.entries.len(),
        ranking.cumulative_topic_count.last().copied().unwrap_or(0)
    );
    Ok(())
}

pub fn couple(args: CoupleArgs) -> Result<(), CliError> {
    let loaded = load_graph(&args.graph)?;
    let unit = weigh(&loaded.pruned, resdist::WeightingScheme::Unit)?;
    let geo = weigh(&loaded.pruned, resdist::WeightingScheme::GeometricMeanDegree)?;

    let pairs: Vec<(NodeIdx, NodeIdx)> = if args.pairs.is_empty() {
        let papers = unit.papers();
        let mut all = Vec::with_capacity(papers.len() * (papers.len().saturating_sub(1)) / 2);
        for i in 0..papers.len() {
            for j in (i + 1)..papers.len() {
                all.push((papers[i], papers[j]));
            }
        }
        all
    } else {
        args.pairs
            .chunks(2)
            .map(|chunk| {
                let a = unit.node_index(&chunk[0])?;
                let b = unit.node_index(&chunk[1])?;
                Ok((a, b))
            })
            .collect::<resdist::Result<Vec<_>>>()?
    };

    let dir = ensure_out(&args.out)?;
    write_file(dir, "coupling.csv", |w| {
        if args.with_current {
            writeln!(
                w,
                "paper_a,paper_b,coupling_unweighted,coupling_weighted,cosine,i1_direct,i1_neighbor,i1_total"
            )?;
        } else {
            writeln!(w, "paper_a,paper_b,coupling_unweighted,coupling_weighted,cosine")?;
        }
        for &(a, b) in &pairs {
            let unweighted = coupling::coupling_unweighted(&unit, a, b)?;
            let weighted = coupling::coupling_weighted(&unit, a, b)?;
            let cosine = coupling::coupling_cosine(&unit, a, b)?;
            write!(
                w,
                "{},{},{},{},{}",
                unit.node_id(a),
                unit.node_id(b),
                fmt_sig12(unweighted),
                fmt_sig12(weighted),
                fmt_sig12(cosine)
            )?;
            if args.with_current {
                let current = coupling::first_iteration_current(&geo, a, b)?;
                write!(
                    w,
                    ",{},{},{}",
                    fmt_sig12(current.direct_term),
                    fmt_sig12(current.neighbor_term),
                    fmt_sig12(current.first_iteration_current)
                )?;
            }
            writeln!(w)?;
        }
        Ok(())
    })?;

    let mut manifest = RunManifest::new("couple");
    manifest.input(&args.graph.input, &loaded.raw);
    graph_config(&mut manifest, &args.graph);
    manifest.config("pairs", if args.pairs.is_empty() { "all" } else { "explicit" });
    manifest.config("with_current", args.with_current);
    manifest.output("coupling.csv");
    manifest.write(dir)?;

    eprintln!("couple: {} pair(s)", pairs.len());
    Ok(())
}

pub fn cluster(args: ClusterArgs) -> Result<(), CliError> {
    let matrix_raw = fs::read(&args.matrix)?;
    let matrix = DistanceMatrix::read_csv(matrix_raw.as_slice())?;
    let linkage =
        Linkage::parse(&args.linkage).map_err(|e| CliError::Usage(e.to_string()))?;
    let (dendrogram, flat) = agglomerate(&matrix, linkage, args.k, args.squared)?;

    let dir = ensure_out(&args.out)?;
    write_file(dir, "dendrogram.csv", |w| {
        writeln!(w, "step,cluster_a,cluster_b,height,size")?;
        for (step, merge) in dendrogram.merges().iter().enumerate() {
            writeln!(
                w,
                "{},{},{},{},{}",
                step,
                merge.cluster_a,
                merge.cluster_b,
                fmt_sig12(merge.height),
                merge.size
            )?;
        }
        Ok(())
    })?;
    write_file(dir, "clusters.csv", |w| {
        writeln!(w, "paper_id,cluster")?;
        for (label, &cluster) in matrix.labels().iter().zip(&flat) {
            writeln!(w, "{label},{cluster}")?;
        }
        Ok(())
    })?;

    let mut manifest = RunManifest::new("cluster");
    manifest.input(&args.matrix, &matrix_raw);
    manifest.config("linkage", &args.linkage);
    manifest.config("k", args.k);
    manifest.config("squared", args.squared);
    manifest.output("dendrogram.csv").output("clusters.csv");
    manifest.write(dir)?;

    eprintln!(
        "cluster: {} papers into {} clusters ({} linkage)",
        matrix.paper_count(),
        args.k,
        args.linkage
    );
    Ok(())
}

pub fn histogram(args: HistogramArgs) -> Result<(), CliError> {
    let matrix_raw = fs::read(&args.matrix)?;
    let matrix = DistanceMatrix::read_csv(matrix_raw.as_slice())?;
    let hist = analysis::log_histogram(&matrix, args.bins)?;

    let dir = ensure_out(&args.out)?;
    write_file(dir, "histogram.csv", |w| hist.write_csv(w))?;

    let mut manifest = RunManifest::new("histogram");
    manifest.input(&args.matrix, &matrix_raw);
    manifest.config("bins", args.bins);
    manifest.output("histogram.csv");
    manifest.write(dir)?;

    eprintln!(
        "histogram: {} distances in {} bin(s)",
        hist.total_count(),
        hist.bins.len()
    );
    Ok(())
}
