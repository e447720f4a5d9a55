//! Citation-graph construction: edge-list parsing, the undirected nearly
//! bipartite graph of papers and sources, singleton-source pruning, and
//! degree-normalized link weighting.
//!
//! The pipeline is staged: [`parse_edge_list`] -> [`build_graph`] ->
//! [`prune_singleton_sources`] -> [`weigh`]. Each stage returns a new
//! immutable [`CitationGraph`]; a finished graph is safe to share across
//! threads.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Read};

use crate::error::{Error, Result};

/// Dense index of a node inside one [`CitationGraph`].
///
/// Indices are assigned in first-appearance order of the edge stream and are
/// contiguous `0..n`, so outputs keyed by index are reproducible byte for
/// byte. Indices from one graph are not valid in another (pruning reindexes).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeIdx(pub u32);

impl NodeIdx {
    #[inline]
    pub fn as_usize(self) -> usize {
        self.0 as usize
    }
}

/// Role of a node in the nearly bipartite citation network.
///
/// A node is a `Paper` iff it appears at least once in the citing column;
/// everything that is only ever cited is a `Source`. A cited node that also
/// cites is a `Paper` (the network is not fully bipartite).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Paper,
    Source,
}

/// Link-weight assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightingScheme {
    /// Every edge carries weight 1.
    #[default]
    Unit,
    /// `w_ij = 1 / sqrt(k_i * k_j)` with `k` the degrees on the pruned graph,
    /// so a link from a long reference list to a highly cited source is weak.
    GeometricMeanDegree,
}

/// Immutable undirected weighted citation graph.
///
/// Adjacency is stored compressed (per-node sorted neighbor slices); entries
/// are binary (duplicate citation records collapse), there are no self-loops,
/// and `node_weight[i]` always equals the sum of incident link weights.
#[derive(Debug, Clone)]
pub struct CitationGraph {
    ids: Vec<String>,
    index_of: HashMap<String, u32>,
    kinds: Vec<NodeKind>,
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
    weights: Vec<f64>,
    node_weight: Vec<f64>,
    scheme: WeightingScheme,
    pruned: bool,
}

/// Counters reported by [`build_graph`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildReport {
    /// Records with citing id equal to cited id; meaningless in the electric
    /// model and dropped.
    pub self_citations_rejected: usize,
    /// Extra copies of an already-seen undirected edge.
    pub duplicates_collapsed: usize,
}

/// Nodes removed by [`prune_singleton_sources`], in removal order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PruneReport {
    pub singleton_sources: Vec<String>,
    pub isolated_papers: Vec<String>,
}

impl PruneReport {
    pub fn is_empty(&self) -> bool {
        self.singleton_sources.is_empty() && self.isolated_papers.is_empty()
    }

    /// CSV rows `node_id,reason` with reason in `{singleton_source, isolated_paper}`.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "node_id,reason")?;
        for id in &self.singleton_sources {
            writeln!(out, "{id},singleton_source")?;
        }
        for id in &self.isolated_papers {
            writeln!(out, "{id},isolated_paper")?;
        }
        Ok(())
    }
}

/// Parse a delimited two-column edge list into `(citing, cited)` id pairs.
///
/// Lines starting with `#` are comments and blank lines are skipped. Ids are
/// whitespace-trimmed. Duplicate pairs are preserved here; they collapse at
/// [`build_graph`].
pub fn parse_edge_list<R: Read>(input: R, delimiter: u8) -> Result<Vec<(String, String)>> {
    let reader = BufReader::new(input);
    let delim = delimiter as char;
    let mut edges = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(delim).collect();
        if fields.len() != 2 {
            return Err(Error::Parse {
                line: lineno + 1,
                msg: format!("expected 2 columns, found {}", fields.len()),
            });
        }
        let citing = fields[0].trim();
        let cited = fields[1].trim();
        if citing.is_empty() || cited.is_empty() {
            return Err(Error::Parse {
                line: lineno + 1,
                msg: "empty id field".to_string(),
            });
        }
        edges.push((citing.to_string(), cited.to_string()));
    }
    Ok(edges)
}

/// Build the undirected graph from `(citing, cited)` pairs.
///
/// Node kinds follow the citing-column rule, duplicate records collapse to a
/// single adjacency entry, and self-citations are rejected (counted in the
/// report). Weights start out `Unit`; call [`weigh`] after pruning to apply
/// the degree-normalized scheme.
pub fn build_graph<S: AsRef<str>>(edges: &[(S, S)]) -> Result<(CitationGraph, BuildReport)> {
    let mut ids: Vec<String> = Vec::new();
    let mut index_of: HashMap<String, u32> = HashMap::new();
    let mut cites: Vec<bool> = Vec::new();
    let mut report = BuildReport::default();

    let mut intern = |id: &str, ids: &mut Vec<String>, cites: &mut Vec<bool>| -> u32 {
        if let Some(&i) = index_of.get(id) {
            return i;
        }
        let i = ids.len() as u32;
        ids.push(id.to_string());
        cites.push(false);
        index_of.insert(id.to_string(), i);
        i
    };

    let mut pairs: Vec<(u32, u32)> = Vec::with_capacity(edges.len());
    for (citing, cited) in edges {
        let (citing, cited) = (citing.as_ref(), cited.as_ref());
        if citing == cited {
            report.self_citations_rejected += 1;
            continue;
        }
        let a = intern(citing, &mut ids, &mut cites);
        let b = intern(cited, &mut ids, &mut cites);
        cites[a as usize] = true;
        pairs.push((a.min(b), a.max(b)));
    }
    if ids.is_empty() {
        return Err(Error::EmptyGraph);
    }

    let before = pairs.len();
    pairs.sort_unstable();
    pairs.dedup();
    report.duplicates_collapsed = before - pairs.len();

    let kinds: Vec<NodeKind> = cites
        .iter()
        .map(|&c| if c { NodeKind::Paper } else { NodeKind::Source })
        .collect();

    let graph = CitationGraph::from_parts(ids, index_of, kinds, &pairs, None, false);
    Ok((graph, report))
}

/// Drop every source cited exactly once, in a single sweep keyed on
/// pre-sweep degrees, then drop (and report) papers left with no links.
///
/// Papers are never removed for having degree 1: a seldom-cited paper still
/// carries current, while a singleton source cannot. Degrees are recomputed
/// on the pruned graph, which is what the degree-normalized weighting uses.
pub fn prune_singleton_sources(g: &CitationGraph) -> (CitationGraph, PruneReport) {
    let n = g.node_count();
    let mut keep = vec![true; n];
    let mut report = PruneReport::default();

    for (i, keep_node) in keep.iter_mut().enumerate() {
        if g.kinds[i] == NodeKind::Source && g.degree_of(i) == 1 {
            *keep_node = false;
            report.singleton_sources.push(g.ids[i].clone());
        }
    }
    // Papers whose only links pointed at removed singletons become isolated.
    for i in 0..n {
        if keep[i]
            && g.kinds[i] == NodeKind::Paper
            && g.neighbor_indices(i).iter().all(|&j| !keep[j as usize])
        {
            keep[i] = false;
            report.isolated_papers.push(g.ids[i].clone());
        }
    }

    let mut pruned = g.subgraph(|i| keep[i.as_usize()]);
    pruned.pruned = true;
    pruned.reset_unit_weights();
    (pruned, report)
}

/// Assign link weights per `scheme` and recompute node weights.
///
/// `GeometricMeanDegree` demands a pruned graph: the degrees in the formula
/// are the degrees after dropping singleton sources.
pub fn weigh(g: &CitationGraph, scheme: WeightingScheme) -> Result<CitationGraph> {
    if scheme == WeightingScheme::GeometricMeanDegree && !g.pruned {
        return Err(Error::Contract(
            "degree-normalized weighting requires a pruned graph; call prune_singleton_sources first"
                .to_string(),
        ));
    }
    let mut out = g.clone();
    match scheme {
        WeightingScheme::Unit => out.reset_unit_weights(),
        WeightingScheme::GeometricMeanDegree => {
            for i in 0..out.node_count() {
                let ki = out.degree_of(i) as f64;
                let (start, end) = (out.offsets[i], out.offsets[i + 1]);
                for e in start..end {
                    let kj = out.degree_of(out.neighbors[e] as usize) as f64;
                    out.weights[e] = 1.0 / (ki * kj).sqrt();
                }
            }
            out.recompute_node_weights();
        }
    }
    out.scheme = scheme;
    Ok(out)
}

impl CitationGraph {
    fn from_parts(
        ids: Vec<String>,
        index_of: HashMap<String, u32>,
        kinds: Vec<NodeKind>,
        pairs: &[(u32, u32)],
        pair_weights: Option<&[f64]>,
        pruned: bool,
    ) -> Self {
        let n = ids.len();
        let mut degree = vec![0usize; n];
        for &(a, b) in pairs {
            degree[a as usize] += 1;
            degree[b as usize] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + degree[i];
        }
        let mut neighbors = vec![0u32; offsets[n]];
        let mut weights = vec![1.0f64; offsets[n]];
        let mut cursor = offsets.clone();
        for (k, &(a, b)) in pairs.iter().enumerate() {
            let w = pair_weights.map_or(1.0, |ws| ws[k]);
            neighbors[cursor[a as usize]] = b;
            weights[cursor[a as usize]] = w;
            cursor[a as usize] += 1;
            neighbors[cursor[b as usize]] = a;
            weights[cursor[b as usize]] = w;
            cursor[b as usize] += 1;
        }
        // Sort each adjacency slice (with its weights) for binary-search lookups.
        for i in 0..n {
            let (s, e) = (offsets[i], offsets[i + 1]);
            let mut zipped: Vec<(u32, f64)> = neighbors[s..e]
                .iter()
                .copied()
                .zip(weights[s..e].iter().copied())
                .collect();
            zipped.sort_unstable_by_key(|&(j, _)| j);
            for (k, (j, w)) in zipped.into_iter().enumerate() {
                neighbors[s + k] = j;
                weights[s + k] = w;
            }
        }
        let mut graph = CitationGraph {
            ids,
            index_of,
            kinds,
            offsets,
            neighbors,
            weights,
            node_weight: vec![0.0; n],
            scheme: WeightingScheme::Unit,
            pruned,
        };
        graph.recompute_node_weights();
        graph
    }

    fn reset_unit_weights(&mut self) {
        self.weights.iter_mut().for_each(|w| *w = 1.0);
        self.scheme = WeightingScheme::Unit;
        self.recompute_node_weights();
    }

    fn recompute_node_weights(&mut self) {
        for i in 0..self.node_count() {
            self.node_weight[i] = self.weights[self.offsets[i]..self.offsets[i + 1]]
                .iter()
                .sum();
        }
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn is_pruned(&self) -> bool {
        self.pruned
    }

    pub fn scheme(&self) -> WeightingScheme {
        self.scheme
    }

    /// Resolve an external id to its dense index.
    pub fn node_index(&self, id: &str) -> Result<NodeIdx> {
        self.index_of
            .get(id)
            .map(|&i| NodeIdx(i))
            .ok_or_else(|| Error::UnknownNode(id.to_string()))
    }

    pub fn node_id(&self, node: NodeIdx) -> &str {
        &self.ids[node.as_usize()]
    }

    pub fn kind(&self, node: NodeIdx) -> NodeKind {
        self.kinds[node.as_usize()]
    }

    /// Number of distinct neighbors (`k_i`).
    pub fn degree(&self, node: NodeIdx) -> usize {
        self.degree_of(node.as_usize())
    }

    #[inline]
    fn degree_of(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    /// Sum of incident link weights (`w_i`).
    pub fn node_weight(&self, node: NodeIdx) -> f64 {
        self.node_weight[node.as_usize()]
    }

    #[inline]
    fn neighbor_indices(&self, i: usize) -> &[u32] {
        &self.neighbors[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn neighbors(&self, node: NodeIdx) -> impl Iterator<Item = NodeIdx> + '_ {
        self.neighbor_indices(node.as_usize())
            .iter()
            .map(|&j| NodeIdx(j))
    }

    /// Neighbors of `node` with the incident link weights.
    #[inline]
    pub fn neighbors_weighted(&self, node: NodeIdx) -> impl Iterator<Item = (NodeIdx, f64)> + '_ {
        let (s, e) = (
            self.offsets[node.as_usize()],
            self.offsets[node.as_usize() + 1],
        );
        self.neighbors[s..e]
            .iter()
            .zip(&self.weights[s..e])
            .map(|(&j, &w)| (NodeIdx(j), w))
    }

    /// Link weight `w_ab`, or 0 when no edge exists.
    pub fn weight_between(&self, a: NodeIdx, b: NodeIdx) -> f64 {
        let slice = self.neighbor_indices(a.as_usize());
        match slice.binary_search(&b.0) {
            Ok(pos) => self.weights[self.offsets[a.as_usize()] + pos],
            Err(_) => 0.0,
        }
    }

    pub fn has_edge(&self, a: NodeIdx, b: NodeIdx) -> bool {
        self.neighbor_indices(a.as_usize()).binary_search(&b.0).is_ok()
    }

    /// All paper nodes, in index order.
    pub fn papers(&self) -> Vec<NodeIdx> {
        (0..self.node_count() as u32)
            .filter(|&i| self.kinds[i as usize] == NodeKind::Paper)
            .map(NodeIdx)
            .collect()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = (&str, NodeIdx)> {
        self.ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.as_str(), NodeIdx(i as u32)))
    }

    /// Maximal connected node set containing `seed`, sorted by index.
    pub fn connected_component_of(&self, seed: NodeIdx) -> Result<Vec<NodeIdx>> {
        if seed.as_usize() >= self.node_count() {
            return Err(Error::UnknownNode(format!("#{}", seed.0)));
        }
        let mut seen = vec![false; self.node_count()];
        let mut queue = std::collections::VecDeque::new();
        seen[seed.as_usize()] = true;
        queue.push_back(seed.0);
        while let Some(i) = queue.pop_front() {
            for &j in self.neighbor_indices(i as usize) {
                if !seen[j as usize] {
                    seen[j as usize] = true;
                    queue.push_back(j);
                }
            }
        }
        Ok(seen
            .iter()
            .enumerate()
            .filter(|&(_, &s)| s)
            .map(|(i, _)| NodeIdx(i as u32))
            .collect())
    }

    /// Subgraph of the nodes selected by `keep`, carrying current link
    /// weights over verbatim (node weights are recomputed; the scheme tag
    /// still describes the original assignment).
    pub fn retain_nodes<F: Fn(NodeIdx) -> bool>(&self, keep: F) -> CitationGraph {
        self.subgraph(keep)
    }

    /// Copy of the graph with every link weight multiplied by `factor`.
    pub fn scale_weights(&self, factor: f64) -> CitationGraph {
        let mut out = self.clone();
        out.weights.iter_mut().for_each(|w| *w *= factor);
        out.recompute_node_weights();
        out
    }

    fn subgraph<F: Fn(NodeIdx) -> bool>(&self, keep: F) -> CitationGraph {
        let mut remap = vec![u32::MAX; self.node_count()];
        let mut ids = Vec::new();
        let mut kinds = Vec::new();
        let mut index_of = HashMap::new();
        for (i, slot) in remap.iter_mut().enumerate() {
            if keep(NodeIdx(i as u32)) {
                *slot = ids.len() as u32;
                index_of.insert(self.ids[i].clone(), ids.len() as u32);
                ids.push(self.ids[i].clone());
                kinds.push(self.kinds[i]);
            }
        }
        let mut pairs = Vec::new();
        let mut pair_weights = Vec::new();
        for a in 0..self.node_count() {
            if remap[a] == u32::MAX {
                continue;
            }
            let (s, e) = (self.offsets[a], self.offsets[a + 1]);
            for k in s..e {
                let b = self.neighbors[k] as usize;
                if a < b && remap[b] != u32::MAX {
                    pairs.push((remap[a], remap[b]));
                    pair_weights.push(self.weights[k]);
                }
            }
        }
        let mut out = CitationGraph::from_parts(
            ids,
            index_of,
            kinds,
            &pairs,
            Some(&pair_weights),
            self.pruned,
        );
        out.scheme = self.scheme;
        out
    }
}
