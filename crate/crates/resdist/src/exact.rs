//! Exact effective resistance through a dense graph-Laplacian solve.
//!
//! This is the brute-force reference for the iterative solver and an exact
//! mode for small graphs: ground one pole (delete its row and column), solve
//! the remaining symmetric positive-definite system with a Cholesky
//! factorization, and read the resistance off the solution. Correctness over
//! speed; the size cap keeps the dense factorization honest.

use std::collections::HashMap;

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graph::{CitationGraph, NodeIdx};
use crate::matrix::DistanceMatrix;

/// Largest connected component the dense path will factor.
pub const DEFAULT_SIZE_CAP: usize = 2000;

/// Residual bound for the grounded linear solve (infinity norm, after
/// iterative refinement).
pub const SOLVE_RESIDUAL: f64 = 1e-10;

/// Dense Laplacian of one connected component.
///
/// Row sums are zero, off-diagonal entries are `-w_ij`, the diagonal is the
/// node weight `w_i`; on a connected component the matrix is positive
/// semidefinite with nullity one.
#[derive(Debug, Clone)]
pub struct DenseLaplacian {
    matrix: DMatrix<f64>,
    component: Vec<NodeIdx>,
    local: HashMap<u32, usize>,
}

impl DenseLaplacian {
    /// Laplacian of the component containing `seed`.
    pub fn for_component(g: &CitationGraph, seed: NodeIdx, cap: usize) -> Result<Self> {
        let component = g.connected_component_of(seed)?;
        if component.len() > cap {
            return Err(Error::SizeCap {
                size: component.len(),
                cap,
            });
        }
        let local: HashMap<u32, usize> = component
            .iter()
            .enumerate()
            .map(|(k, &node)| (node.0, k))
            .collect();
        let m = component.len();
        let mut matrix = DMatrix::zeros(m, m);
        for (k, &node) in component.iter().enumerate() {
            matrix[(k, k)] = g.node_weight(node);
            for (j, w) in g.neighbors_weighted(node) {
                let l = local[&j.0];
                matrix[(k, l)] = -w;
            }
        }
        Ok(DenseLaplacian {
            matrix,
            component,
            local,
        })
    }

    pub fn size(&self) -> usize {
        self.component.len()
    }

    pub fn component(&self) -> &[NodeIdx] {
        &self.component
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    fn local(&self, node: NodeIdx) -> Option<usize> {
        self.local.get(&node.0).copied()
    }

    /// Grounded system: the Laplacian with `ground`'s row and column removed,
    /// factored once for repeated solves.
    fn grounded(&self, ground: NodeIdx) -> Result<GroundedSystem> {
        let g_local = self
            .local(ground)
            .expect("ground node must be in the component");
        let m = self.size() - 1;
        // Map component-local indices to grounded-system indices.
        let keep: Vec<usize> = (0..self.size()).filter(|&k| k != g_local).collect();
        let mut reduced = DMatrix::zeros(m, m);
        for (r, &kr) in keep.iter().enumerate() {
            for (c, &kc) in keep.iter().enumerate() {
                reduced[(r, c)] = self.matrix[(kr, kc)];
            }
        }
        let chol = reduced.clone().cholesky().ok_or_else(|| {
            Error::Domain("grounded Laplacian is not positive definite".to_string())
        })?;
        Ok(GroundedSystem {
            reduced,
            chol,
            keep,
            g_local,
        })
    }
}

struct GroundedSystem {
    reduced: DMatrix<f64>,
    chol: Cholesky<f64, nalgebra::Dyn>,
    keep: Vec<usize>,
    g_local: usize,
}

impl GroundedSystem {
    /// Grounded index of a component-local index, None for the ground itself.
    fn grounded_index(&self, local: usize) -> Option<usize> {
        if local == self.g_local {
            return None;
        }
        // keep is sorted, so the grounded index is the insertion position.
        Some(self.keep.binary_search(&local).expect("kept index"))
    }

    /// Solve `L' v = e_src` with one round of iterative refinement; the
    /// solution is the vector of node potentials for unit injected current.
    fn solve_unit(&self, src: usize) -> Result<DVector<f64>> {
        let m = self.keep.len();
        let mut rhs = DVector::zeros(m);
        rhs[src] = 1.0;
        let mut v = self.chol.solve(&rhs);
        for _ in 0..2 {
            let residual = &rhs - &self.reduced * &v;
            if residual.amax() <= SOLVE_RESIDUAL {
                return Ok(v);
            }
            v += self.chol.solve(&residual);
        }
        let residual = (&rhs - &self.reduced * &v).amax();
        if residual <= SOLVE_RESIDUAL {
            Ok(v)
        } else {
            Err(Error::Domain(format!(
                "grounded solve residual {residual:.3e} above {SOLVE_RESIDUAL:.0e}"
            )))
        }
    }
}

/// Exact two-pole resistance with the default component-size cap.
pub fn exact_resistance(g: &CitationGraph, p: NodeIdx, q: NodeIdx) -> Result<f64> {
    exact_resistance_capped(g, p, q, DEFAULT_SIZE_CAP)
}

/// Exact two-pole resistance: fix the potential of `q` to zero, inject unit
/// current at `p`, and return `p`'s potential.
pub fn exact_resistance_capped(
    g: &CitationGraph,
    p: NodeIdx,
    q: NodeIdx,
    cap: usize,
) -> Result<f64> {
    if p == q {
        return Err(Error::IdenticalPoles(g.node_id(p).to_string()));
    }
    let lap = DenseLaplacian::for_component(g, p, cap)?;
    if lap.local(q).is_none() {
        return Err(Error::Disconnected {
            a: g.node_id(p).to_string(),
            b: g.node_id(q).to_string(),
        });
    }
    let system = lap.grounded(q)?;
    let src = system
        .grounded_index(lap.local(p).expect("p in component"))
        .expect("p is not the ground");
    let v = system.solve_unit(src)?;
    Ok(v[src])
}

/// Exact distance matrix over `papers` from one factorization.
///
/// Grounds an arbitrary component node `z` once and uses
/// `R(u, v) = M_uu + M_vv - 2 M_uv` on the grounded inverse columns, which
/// matches the per-pair grounded solve up to solve round-off.
pub fn exact_all_pairs(g: &CitationGraph, papers: &[NodeIdx]) -> Result<DistanceMatrix> {
    exact_all_pairs_capped(g, papers, DEFAULT_SIZE_CAP)
}

pub fn exact_all_pairs_capped(
    g: &CitationGraph,
    papers: &[NodeIdx],
    cap: usize,
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
    let lap = DenseLaplacian::for_component(g, papers[0], cap)?;
    if let Some(&outside) = papers.iter().find(|&&p| lap.local(p).is_none()) {
        return Err(Error::Disconnected {
            a: g.node_id(papers[0]).to_string(),
            b: g.node_id(outside).to_string(),
        });
    }

    // Ground the highest-index component node; it may be one of the papers.
    let ground = *lap.component.last().expect("non-empty component");
    let system = lap.grounded(ground)?;

    // One solve per paper (skipping the ground, whose column is all zeros).
    let mut columns: Vec<Option<DVector<f64>>> = Vec::with_capacity(papers.len());
    let mut grounded_of: Vec<Option<usize>> = Vec::with_capacity(papers.len());
    for &p in &papers {
        let gi = system.grounded_index(lap.local(p).expect("paper in component"));
        grounded_of.push(gi);
        columns.push(match gi {
            Some(src) => Some(system.solve_unit(src)?),
            None => None,
        });
    }

    let n = papers.len();
    let mut values = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let r = match (&columns[i], &columns[j]) {
                (Some(ci), Some(cj)) => {
                    let (gi, gj) = (grounded_of[i].unwrap(), grounded_of[j].unwrap());
                    ci[gi] + cj[gj] - 2.0 * ci[gj]
                }
                // One of the poles is the ground: R(p, z) = M_pp.
                (Some(ci), None) => ci[grounded_of[i].unwrap()],
                (None, Some(cj)) => cj[grounded_of[j].unwrap()],
                (None, None) => unreachable!("two distinct papers cannot both be the ground"),
            };
            values.push(r);
        }
    }
    let labels = papers.iter().map(|&p| g.node_id(p).to_string()).collect();
    DistanceMatrix::from_values(labels, &values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, prune_singleton_sources, weigh, WeightingScheme};

    fn unit_graph(edges: &[(&str, &str)]) -> CitationGraph {
        let pairs: Vec<(String, String)> = edges
            .iter()
            .map(|&(a, b)| (a.to_string(), b.to_string()))
            .collect();
        build_graph(&pairs).unwrap().0
    }

    fn r(g: &CitationGraph, a: &str, b: &str) -> f64 {
        exact_resistance(g, g.node_index(a).unwrap(), g.node_index(b).unwrap()).unwrap()
    }

    #[test]
    fn single_edge_is_one() {
        let g = unit_graph(&[("p", "q")]);
        assert!((r(&g, "p", "q") - 1.0).abs() < 1e-12);
    }

    #[test]
    fn series_path_adds() {
        let g = unit_graph(&[("p", "s"), ("q", "s")]);
        assert!((r(&g, "p", "q") - 2.0).abs() < 1e-12);
    }

    #[test]
    fn four_cycle_adjacent_poles() {
        // p-a-q-b-p: direct branch p-a in series with nothing vs the 3-edge
        // detour; adjacent poles p,a -> 1 ohm parallel 3 ohm = 3/4.
        let g = unit_graph(&[("p", "a"), ("a", "q"), ("q", "b"), ("b", "p")]);
        assert!((r(&g, "p", "a") - 0.75).abs() < 1e-12);
        assert!((r(&g, "p", "q") - 1.0).abs() < 1e-12);
    }

    #[test]
    fn complete_graph_closed_form() {
        // K_n has R = 2/n between any pair.
        let names = ["a", "b", "c", "d"];
        let mut edges = Vec::new();
        for i in 0..names.len() {
            for j in (i + 1)..names.len() {
                edges.push((names[i], names[j]));
            }
        }
        let g = unit_graph(&edges);
        assert!((r(&g, "a", "c") - 0.5).abs() < 1e-12);
    }

    #[test]
    fn disconnected_poles_error() {
        let g = unit_graph(&[("p1", "s1"), ("p2", "s2")]);
        let p1 = g.node_index("p1").unwrap();
        let p2 = g.node_index("p2").unwrap();
        assert!(matches!(
            exact_resistance(&g, p1, p2),
            Err(Error::Disconnected { .. })
        ));
    }

    #[test]
    fn size_cap_refuses() {
        let g = unit_graph(&[("p", "q"), ("q", "r")]);
        let p = g.node_index("p").unwrap();
        let r_ = g.node_index("r").unwrap();
        assert!(matches!(
            exact_resistance_capped(&g, p, r_, 2),
            Err(Error::SizeCap { size: 3, cap: 2 })
        ));
    }

    #[test]
    fn all_pairs_path_endpoints() {
        let g = unit_graph(&[("p1", "s"), ("p2", "s")]);
        let m = exact_all_pairs(&g, &g.papers()).unwrap();
        assert_eq!(m.pair_count(), 1);
        assert!((m.get(0, 1) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn all_pairs_matches_per_pair_solves() {
        let edges = crate::synth::random_bipartite_edges(
            &crate::synth::BipartiteConfig {
                papers: 12,
                sources: 20,
                min_refs: 2,
                max_refs: 5,
                extra_leaf_papers: 0,
            },
            99,
        );
        let (g, _) = build_graph(&edges).unwrap();
        let (pruned, _) = prune_singleton_sources(&g);
        let geo = weigh(&pruned, WeightingScheme::GeometricMeanDegree).unwrap();
        let papers = geo.papers();
        let comp = geo.connected_component_of(papers[0]).unwrap();
        let papers: Vec<NodeIdx> = papers.into_iter().filter(|p| comp.contains(p)).collect();
        if papers.len() < 2 {
            return;
        }
        let m = exact_all_pairs(&geo, &papers).unwrap();
        for i in 0..papers.len() {
            for j in (i + 1)..papers.len() {
                let direct = exact_resistance(&geo, papers[i], papers[j]).unwrap();
                assert!(
                    (m.get(i, j) - direct).abs() < 1e-9,
                    "pair ({i},{j}): {} vs {}",
                    m.get(i, j),
                    direct
                );
            }
        }
    }

    #[test]
    fn oracle_is_symmetric_and_metric() {
        let g = unit_graph(&[
            ("p1", "s1"),
            ("p1", "s2"),
            ("p2", "s1"),
            ("p2", "s3"),
            ("p3", "s2"),
            ("p3", "s3"),
            ("p3", "s1"),
        ]);
        let ids = ["p1", "p2", "p3"];
        for a in ids {
            for b in ids {
                if a == b {
                    continue;
                }
                assert!((r(&g, a, b) - r(&g, b, a)).abs() < 1e-9);
            }
        }
        for a in ids {
            for b in ids {
                for c in ids {
                    if a == b || b == c || a == c {
                        continue;
                    }
                    assert!(r(&g, a, c) <= r(&g, a, b) + r(&g, b, c) + 1e-9);
                }
            }
        }
    }

    #[test]
    fn rayleigh_monotone_under_added_edge() {
        let base = vec![
            ("p1", "s1"),
            ("p2", "s1"),
            ("p2", "s2"),
            ("p3", "s2"),
            ("p3", "s3"),
            ("p1", "s3"),
        ];
        let mut extended = base.clone();
        extended.push(("p1", "s2"));
        let g0 = unit_graph(&base);
        let g1 = unit_graph(&extended);
        for a in ["p1", "p2", "p3"] {
            for b in ["p1", "p2", "p3"] {
                if a == b {
                    continue;
                }
                assert!(r(&g1, a, b) <= r(&g0, a, b) + 1e-9);
            }
        }
    }

    #[test]
    fn laplacian_rows_sum_to_zero() {
        let g = unit_graph(&[("p1", "s1"), ("p2", "s1"), ("p1", "s2"), ("p2", "s2")]);
        let lap =
            DenseLaplacian::for_component(&g, g.node_index("p1").unwrap(), DEFAULT_SIZE_CAP)
                .unwrap();
        for row in 0..lap.size() {
            let sum: f64 = (0..lap.size()).map(|c| lap.matrix()[(row, c)]).sum();
            assert!(sum.abs() < 1e-12);
        }
    }
}
