//! One-sweep current approximations and the bibliographic-coupling measures
//! derived from them.
//!
//! After a single voltage sweep from the zero start, each non-pole node sits
//! at `V_i(1) = w_ip / w_i`, so the current reaching the grounded pole has
//! the closed form `I_g(1) = w_pg + sum_i w_gi w_ip / w_i` — no iteration
//! loop required. On an unweighted graph the neighbor sum collapses to the
//! sum of inverse citation counts of the commonly cited sources; under
//! degree-normalized weights it collapses to
//! `(1/sqrt(k_g k_p)) * sum_i A_gi A_pi / (sqrt(k_i) * sum_j A_ij / sqrt(k_j))`.
//!
//! One sweep of current is a coarse similarity proxy, not a replacement for
//! the converged resistance: `1 / I_g(1)` only upper-bounds the distance.
//! It is cheap enough to serve as a pre-filter and as a cross-check on the
//! link weighting.

use crate::error::{Error, Result};
use crate::graph::{CitationGraph, NodeIdx, WeightingScheme};

/// Current reaching the grounded pole after exactly one sweep, split into
/// the direct-edge term and the common-neighbor term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingResult {
    /// `I_g(1) = direct_term + neighbor_term`.
    pub first_iteration_current: f64,
    /// `w_pg`; zero whenever the poles are two or more hops apart.
    pub direct_term: f64,
    /// `sum_i w_gi w_ip / w_i` over common neighbors.
    pub neighbor_term: f64,
}

fn check_distinct(g: &CitationGraph, p: NodeIdx, q: NodeIdx) -> Result<()> {
    if p == q {
        return Err(Error::IdenticalPoles(g.node_id(p).to_string()));
    }
    if p.as_usize() >= g.node_count() || q.as_usize() >= g.node_count() {
        return Err(Error::UnknownNode(format!(
            "#{}",
            p.0.max(q.0)
        )));
    }
    Ok(())
}

/// Closed-form current after one voltage sweep with poles `p` (positive) and
/// `q` (grounded), on whatever weights the graph carries.
pub fn first_iteration_current(
    g: &CitationGraph,
    p: NodeIdx,
    q: NodeIdx,
) -> Result<CouplingResult> {
    check_distinct(g, p, q)?;
    let direct_term = g.weight_between(p, q);
    let mut neighbor_term = 0.0;
    for (i, w_qi) in g.neighbors_weighted(q) {
        if i == p {
            continue;
        }
        let w_ip = g.weight_between(i, p);
        if w_ip > 0.0 {
            neighbor_term += w_qi * w_ip / g.node_weight(i);
        }
    }
    Ok(CouplingResult {
        first_iteration_current: direct_term + neighbor_term,
        direct_term,
        neighbor_term,
    })
}

/// Absolute bibliographic coupling on an unweighted graph: the sum of
/// inverse citation counts `sum_i A_qi A_pi / k_i` over commonly cited
/// sources, so highly cited sources contribute less.
pub fn coupling_unweighted(g: &CitationGraph, p: NodeIdx, q: NodeIdx) -> Result<f64> {
    check_distinct(g, p, q)?;
    if g.scheme() != WeightingScheme::Unit {
        return Err(Error::Contract(
            "unweighted coupling is defined on unit-weighted graphs".to_string(),
        ));
    }
    let mut total = 0.0;
    for i in g.neighbors(q) {
        if i != p && g.has_edge(i, p) {
            total += 1.0 / g.degree(i) as f64;
        }
    }
    Ok(total)
}

/// Relative bibliographic coupling under degree-normalized link weights:
/// `(1/sqrt(k_q k_p)) * sum_i A_qi A_pi / (sqrt(k_i) * sum_j A_ij / sqrt(k_j))`.
///
/// The denominator `sqrt(k_q k_p)` is the cosine-similarity denominator;
/// each common source is additionally downgraded by its citation count and
/// by how spread-out its citing papers' reference lists are. Algebraically
/// identical to the neighbor term of [`first_iteration_current`] on the
/// degree-normalized weighting.
pub fn coupling_weighted(g: &CitationGraph, p: NodeIdx, q: NodeIdx) -> Result<f64> {
    check_distinct(g, p, q)?;
    if !g.is_pruned() {
        return Err(Error::Contract(
            "weighted coupling uses post-pruning degrees; prune the graph first".to_string(),
        ));
    }
    let mut total = 0.0;
    for i in g.neighbors(q) {
        if i == p || !g.has_edge(i, p) {
            continue;
        }
        let spread: f64 = g
            .neighbors(i)
            .map(|j| 1.0 / (g.degree(j) as f64).sqrt())
            .sum();
        total += 1.0 / ((g.degree(i) as f64).sqrt() * spread);
    }
    Ok(total / (g.degree(p) as f64 * g.degree(q) as f64).sqrt())
}

/// Cosine bibliographic coupling baseline: common-neighbor count over
/// `sqrt(k_p k_q)`.
pub fn coupling_cosine(g: &CitationGraph, p: NodeIdx, q: NodeIdx) -> Result<f64> {
    check_distinct(g, p, q)?;
    let common = g.neighbors(q).filter(|&i| i != p && g.has_edge(i, p)).count();
    Ok(common as f64 / (g.degree(p) as f64 * g.degree(q) as f64).sqrt())
}
