//! Bounded iterative two-pole resistance.
//!
//! The positive pole is fixed at voltage 1 and the grounded pole at 0; every
//! other node is repeatedly replaced by the conductance-weighted average of
//! its neighbors' voltages. From the all-zero start the voltages can only
//! grow, so the current leaving the positive pole overestimates the true
//! current (a lower bound on resistance) while the current reaching ground
//! underestimates it (an upper bound). Iteration stops once the two
//! resistance bounds differ by less than the configured tolerance and the
//! midpoint is reported, pinning the absolute error below half the gap.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{CitationGraph, NodeIdx};
use crate::matrix::{DistanceMatrix, PairEntry};

/// Update order for one voltage sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sweep {
    /// Simultaneous update reading only previous-sweep voltages. This is the
    /// order the bound-monotonicity argument assumes; it is the default.
    #[default]
    Jacobi,
    /// In-place update reading already-updated voltages within the sweep.
    /// Converges to the same fixed point, usually in fewer sweeps; bound
    /// monotonicity is not guaranteed.
    GaussSeidel,
}

/// Tolerances and limits for [`resistance_between`].
#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    /// Absolute gap between the resistance bounds at which to stop.
    pub epsilon: f64,
    pub max_iterations: u32,
    pub sweep: Sweep,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            epsilon: 0.1,
            max_iterations: 100_000,
            sweep: Sweep::Jacobi,
        }
    }
}

impl SolverConfig {
    pub fn with_epsilon(epsilon: f64) -> Self {
        SolverConfig {
            epsilon,
            ..SolverConfig::default()
        }
    }
}

/// Converged (or abandoned) two-pole resistance with its bracket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResistanceResult {
    /// Midpoint of the final bounds.
    pub resistance: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub iterations: u32,
    pub converged: bool,
}

impl From<ResistanceResult> for PairEntry {
    fn from(r: ResistanceResult) -> Self {
        PairEntry {
            resistance: r.resistance,
            lower: r.lower_bound,
            upper: r.upper_bound,
            iterations: r.iterations,
            converged: r.converged,
        }
    }
}

/// Voltages of one two-pole computation, restricted to the poles' connected
/// component. Pole voltages stay pinned at 1 and 0; all other component
/// nodes start at 0.
#[derive(Debug, Clone)]
pub struct VoltageState {
    voltages: Vec<f64>,
    scratch: Vec<f64>,
    sweep_nodes: Vec<u32>,
    pole_p: NodeIdx,
    pole_g: NodeIdx,
    iteration: u32,
}

impl VoltageState {
    /// Zero-start state; checks that the poles are distinct and connected.
    pub fn new(g: &CitationGraph, pole_p: NodeIdx, pole_g: NodeIdx) -> Result<Self> {
        if pole_p == pole_g {
            return Err(Error::IdenticalPoles(g.node_id(pole_p).to_string()));
        }
        let component = g.connected_component_of(pole_p)?;
        if !component.contains(&pole_g) {
            return Err(Error::Disconnected {
                a: g.node_id(pole_p).to_string(),
                b: g.node_id(pole_g).to_string(),
            });
        }
        Ok(Self::with_component(g, pole_p, pole_g, &component))
    }

    /// Zero-start state over a precomputed component (all-pairs runs share
    /// one component check instead of repeating the traversal per pair).
    fn with_component(
        g: &CitationGraph,
        pole_p: NodeIdx,
        pole_g: NodeIdx,
        component: &[NodeIdx],
    ) -> Self {
        let mut voltages = vec![0.0; g.node_count()];
        voltages[pole_p.as_usize()] = 1.0;
        let sweep_nodes = component
            .iter()
            .filter(|&&n| n != pole_p && n != pole_g)
            .map(|&n| n.0)
            .collect();
        VoltageState {
            scratch: voltages.clone(),
            voltages,
            sweep_nodes,
            pole_p,
            pole_g,
            iteration: 0,
        }
    }

    pub fn voltage(&self, node: NodeIdx) -> f64 {
        self.voltages[node.as_usize()]
    }

    pub fn voltages(&self) -> &[f64] {
        &self.voltages
    }

    pub fn poles(&self) -> (NodeIdx, NodeIdx) {
        (self.pole_p, self.pole_g)
    }

    pub fn iteration(&self) -> u32 {
        self.iteration
    }
}

/// One voltage sweep: every non-pole component node gets the weighted
/// average of its neighbors' voltages, `V_i <- (1/w_i) * sum_j w_ij V_j`.
pub fn iterate_voltages(g: &CitationGraph, state: &mut VoltageState, sweep: Sweep) {
    match sweep {
        Sweep::Jacobi => {
            for &i in &state.sweep_nodes {
                let node = NodeIdx(i);
                let acc: f64 = g
                    .neighbors_weighted(node)
                    .map(|(j, w)| w * state.voltages[j.as_usize()])
                    .sum();
                state.scratch[i as usize] = acc / g.node_weight(node);
            }
            for &i in &state.sweep_nodes {
                state.voltages[i as usize] = state.scratch[i as usize];
            }
        }
        Sweep::GaussSeidel => {
            for &i in &state.sweep_nodes {
                let node = NodeIdx(i);
                let acc: f64 = g
                    .neighbors_weighted(node)
                    .map(|(j, w)| w * state.voltages[j.as_usize()])
                    .sum();
                state.voltages[i as usize] = acc / g.node_weight(node);
            }
        }
    }
    state.iteration += 1;
}

/// Total current measured at each pole: leaving the positive pole,
/// `I_p = w_p - sum_i w_pi V_i`, and arriving at ground, `I_g = sum_i w_gi V_i`.
pub fn current_bounds(g: &CitationGraph, state: &VoltageState) -> (f64, f64) {
    let into_p: f64 = g
        .neighbors_weighted(state.pole_p)
        .map(|(j, w)| w * state.voltages[j.as_usize()])
        .sum();
    let from_p = g.node_weight(state.pole_p) - into_p;
    let into_g: f64 = g
        .neighbors_weighted(state.pole_g)
        .map(|(j, w)| w * state.voltages[j.as_usize()])
        .sum();
    (from_p, into_g)
}

/// Resistance bracket implied by [`current_bounds`]; the upper bound is
/// infinite until any current reaches ground.
fn resistance_bracket(from_p: f64, into_g: f64) -> (f64, f64) {
    let lower = 1.0 / from_p;
    let upper = if into_g > 0.0 {
        1.0 / into_g
    } else {
        f64::INFINITY
    };
    (lower, upper)
}

/// Effective resistance between `p` and `q`, iterated until the bound gap
/// drops below `cfg.epsilon` or the iteration budget runs out (in which case
/// the result carries `converged = false` and the still-valid bracket).
pub fn resistance_between(
    g: &CitationGraph,
    p: NodeIdx,
    q: NodeIdx,
    cfg: &SolverConfig,
) -> Result<ResistanceResult> {
    let mut state = VoltageState::new(g, p, q)?;
    Ok(solve(g, &mut state, cfg))
}

/// Solve one pair over a component that has already been checked to contain
/// both poles; batch drivers share the component traversal this way.
pub(crate) fn solve_in_component(
    g: &CitationGraph,
    p: NodeIdx,
    q: NodeIdx,
    cfg: &SolverConfig,
    component: &[NodeIdx],
) -> ResistanceResult {
    let mut state = VoltageState::with_component(g, p, q, component);
    solve(g, &mut state, cfg)
}

fn solve(g: &CitationGraph, state: &mut VoltageState, cfg: &SolverConfig) -> ResistanceResult {
    loop {
        iterate_voltages(g, state, cfg.sweep);
        let (from_p, into_g) = current_bounds(g, state);
        let (lower, upper) = resistance_bracket(from_p, into_g);
        if upper - lower < cfg.epsilon {
            return ResistanceResult {
                resistance: 0.5 * (lower + upper),
                lower_bound: lower,
                upper_bound: upper,
                iterations: state.iteration,
                converged: true,
            };
        }
        if state.iteration >= cfg.max_iterations {
            return ResistanceResult {
                resistance: 0.5 * (lower + upper),
                lower_bound: lower,
                upper_bound: upper,
                iterations: state.iteration,
                converged: false,
            };
        }
    }
}

/// Resistance for every unordered pair of `papers`, fanned out over
/// `parallelism` worker threads. Pairs are independent computations on the
/// shared immutable graph; results land in lexicographic `(index_a, index_b)`
/// order no matter how they were scheduled.
pub fn all_pairs_resistance(
    g: &CitationGraph,
    papers: &[NodeIdx],
    cfg: &SolverConfig,
    parallelism: usize,
) -> Result<DistanceMatrix> {
    let mut papers: Vec<NodeIdx> = papers.to_vec();
    papers.sort_unstable();
    papers.dedup();
    if papers.len() < 2 {
        return Err(Error::Domain(format!(
            "all-pairs needs at least 2 papers, got {}",
            papers.len()
        )));
    }
    let component = check_single_component(g, &papers)?;

    let n = papers.len();
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            pairs.push((papers[i], papers[j]));
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
    let entries: Vec<PairEntry> = pool.install(|| {
        pairs
            .par_iter()
            .map(|&(p, q)| PairEntry::from(solve_in_component(g, p, q, cfg, &component)))
            .collect()
    });

    let labels = papers.iter().map(|&p| g.node_id(p).to_string()).collect();
    DistanceMatrix::new(labels, entries)
}

/// Verify all papers share one connected component; on failure, group them
/// by component for the error report.
pub(crate) fn check_single_component(
    g: &CitationGraph,
    papers: &[NodeIdx],
) -> Result<Vec<NodeIdx>> {
    let component = g.connected_component_of(papers[0])?;
    if papers.iter().all(|p| component.binary_search(p).is_ok()) {
        return Ok(component);
    }
    let mut groups: Vec<Vec<String>> = Vec::new();
    let mut assigned: Vec<bool> = vec![false; papers.len()];
    for i in 0..papers.len() {
        if assigned[i] {
            continue;
        }
        let comp = g.connected_component_of(papers[i])?;
        let mut group = Vec::new();
        for (k, &p) in papers.iter().enumerate() {
            if !assigned[k] && comp.binary_search(&p).is_ok() {
                assigned[k] = true;
                group.push(g.node_id(p).to_string());
            }
        }
        groups.push(group);
    }
    Err(Error::DisconnectedPapers { groups })
}
