//! Agglomerative hierarchical clustering of a distance matrix via
//! Lance-Williams updates.
//!
//! Ward's update is applied to the input dissimilarities directly. That is
//! the right reading for resistance distances: they embed as *squared*
//! Euclidean distances, which is exactly the quantity Ward's recurrence
//! expects, so merge heights stay monotone. Squaring the input first is
//! available behind a flag for callers feeding plain Euclidean distances.

use crate::error::{Error, Result};
use crate::matrix::DistanceMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Linkage {
    Ward,
    Average,
    Single,
    Complete,
}

impl Linkage {
    pub fn parse(name: &str) -> Result<Linkage> {
        match name.to_ascii_lowercase().as_str() {
            "ward" => Ok(Linkage::Ward),
            "average" => Ok(Linkage::Average),
            "single" => Ok(Linkage::Single),
            "complete" => Ok(Linkage::Complete),
            other => Err(Error::Domain(format!(
                "unknown linkage `{other}` (expected ward, average, single, or complete)"
            ))),
        }
    }
}

/// One agglomeration step. Cluster ids follow the stepwise convention:
/// `0..n` are the leaves, the merge recorded at step `s` creates cluster
/// `n + s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub cluster_a: usize,
    pub cluster_b: usize,
    pub height: f64,
    pub size: usize,
}

/// Stepwise dendrogram over `n` leaves (`n - 1` merges).
#[derive(Debug, Clone)]
pub struct Dendrogram {
    n: usize,
    merges: Vec<Merge>,
}

impl Dendrogram {
    pub fn leaf_count(&self) -> usize {
        self.n
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    /// Leaves in dendrogram drawing order (left-to-right traversal of the
    /// final tree).
    pub fn leaf_order(&self) -> Vec<usize> {
        if self.n == 1 {
            return vec![0];
        }
        let mut order = Vec::with_capacity(self.n);
        let root = self.n + self.merges.len() - 1;
        let mut stack = vec![root];
        while let Some(cluster) = stack.pop() {
            if cluster < self.n {
                order.push(cluster);
            } else {
                let merge = &self.merges[cluster - self.n];
                stack.push(merge.cluster_b);
                stack.push(merge.cluster_a);
            }
        }
        order
    }

    /// Flat clustering with exactly `k` clusters: undo the last `k - 1`
    /// merges. Labels are `0..k`, numbered by first appearance in leaf
    /// index order.
    pub fn cut(&self, k: usize) -> Result<Vec<usize>> {
        if k == 0 || k > self.n {
            return Err(Error::Domain(format!(
                "cluster count k={k} out of range 1..={}",
                self.n
            )));
        }
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        // Track one representative leaf per stepwise cluster id.
        let mut representative: Vec<usize> = (0..self.n).collect();
        for (step, merge) in self.merges.iter().take(self.n - k).enumerate() {
            let a = representative[merge.cluster_a];
            let b = representative[merge.cluster_b];
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[rb] = ra;
            representative.push(ra);
            let _ = step;
        }
        let mut labels = vec![usize::MAX; self.n];
        let mut next = 0;
        for leaf in 0..self.n {
            let root = find(&mut parent, leaf);
            if labels[root] == usize::MAX {
                labels[root] = next;
                next += 1;
            }
            labels[leaf] = labels[root];
        }
        Ok(labels)
    }
}

/// Agglomerate `m` under the chosen linkage and cut at `k` clusters.
///
/// `square_input` squares the dissimilarities before clustering (the Ward
/// variant for plain Euclidean inputs); merge heights are then reported on
/// the squared scale.
pub fn agglomerate(
    m: &DistanceMatrix,
    linkage: Linkage,
    k: usize,
    square_input: bool,
) -> Result<(Dendrogram, Vec<usize>)> {
    let dendrogram = linkage_matrix(m, linkage, square_input)?;
    let flat = dendrogram.cut(k)?;
    Ok((dendrogram, flat))
}

/// Full Lance-Williams agglomeration (primitive O(n^3) scan, plenty for
/// corpus-sized matrices).
pub fn linkage_matrix(
    m: &DistanceMatrix,
    linkage: Linkage,
    square_input: bool,
) -> Result<Dendrogram> {
    let n = m.paper_count();
    let total = 2 * n - 1;
    let mut dist = vec![f64::INFINITY; total * total];
    for i in 0..n {
        for j in (i + 1)..n {
            let mut d = m.get(i, j);
            if !d.is_finite() || d < 0.0 {
                return Err(Error::Domain(format!(
                    "dissimilarity between `{}` and `{}` is {d}; clustering needs finite non-negative distances",
                    m.labels()[i],
                    m.labels()[j]
                )));
            }
            if square_input {
                d *= d;
            }
            dist[i * total + j] = d;
            dist[j * total + i] = d;
        }
    }

    let mut sizes = vec![1usize; total];
    let mut active: Vec<usize> = (0..n).collect();
    let mut merges = Vec::with_capacity(n - 1);

    for step in 0..(n - 1) {
        let mut best = f64::INFINITY;
        let (mut bi, mut bj) = (0usize, 0usize);
        for (ai, &ci) in active.iter().enumerate() {
            for &cj in &active[(ai + 1)..] {
                let d = dist[ci * total + cj];
                if d < best {
                    best = d;
                    bi = ci;
                    bj = cj;
                }
            }
        }
        let new = n + step;
        let (na, nb) = (sizes[bi], sizes[bj]);
        merges.push(Merge {
            cluster_a: bi,
            cluster_b: bj,
            height: best,
            size: na + nb,
        });
        sizes[new] = na + nb;
        active.retain(|&c| c != bi && c != bj);
        for &ck in &active {
            let (dik, djk) = (dist[bi * total + ck], dist[bj * total + ck]);
            let updated = match linkage {
                Linkage::Single => dik.min(djk),
                Linkage::Complete => dik.max(djk),
                Linkage::Average => {
                    (na as f64 * dik + nb as f64 * djk) / (na + nb) as f64
                }
                Linkage::Ward => {
                    let nk = sizes[ck] as f64;
                    let (na, nb) = (na as f64, nb as f64);
                    ((na + nk) * dik + (nb + nk) * djk - nk * best) / (na + nb + nk)
                }
            };
            dist[new * total + ck] = updated;
            dist[ck * total + new] = updated;
        }
        active.push(new);
    }

    Ok(Dendrogram { n, merges })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::planted_block_distances;

    fn matrix(labels: usize, values: &[f64]) -> DistanceMatrix {
        DistanceMatrix::from_values(
            (0..labels).map(|i| format!("n{i}")).collect(),
            values,
        )
        .unwrap()
    }

    #[test]
    fn two_tight_pairs_split_under_every_linkage() {
        // Points 0,1 close together, 2,3 close together, pairs far apart.
        let m = matrix(4, &[0.1, 5.0, 5.2, 5.1, 4.9, 0.2]);
        for linkage in [Linkage::Ward, Linkage::Average, Linkage::Single, Linkage::Complete] {
            let (_, flat) = agglomerate(&m, linkage, 2, false).unwrap();
            assert_eq!(flat[0], flat[1]);
            assert_eq!(flat[2], flat[3]);
            assert_ne!(flat[0], flat[2]);
        }
    }

    #[test]
    fn cut_at_n_gives_singletons() {
        let m = matrix(4, &[1.0, 2.0, 3.0, 1.5, 2.5, 1.2]);
        let (_, flat) = agglomerate(&m, Linkage::Average, 4, false).unwrap();
        assert_eq!(flat, vec![0, 1, 2, 3]);
    }

    #[test]
    fn cut_rejects_out_of_range_k() {
        let m = matrix(3, &[1.0, 2.0, 3.0]);
        assert!(agglomerate(&m, Linkage::Ward, 0, false).is_err());
        assert!(agglomerate(&m, Linkage::Ward, 4, false).is_err());
    }

    #[test]
    fn dendrogram_has_n_minus_one_merges() {
        let m = matrix(5, &[1.0, 2.0, 3.0, 4.0, 1.5, 2.5, 3.5, 1.2, 2.2, 0.9]);
        let (dend, _) = agglomerate(&m, Linkage::Complete, 1, false).unwrap();
        assert_eq!(dend.merges().len(), 4);
        let mut order = dend.leaf_order();
        order.sort_unstable();
        assert_eq!(order, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn merge_heights_are_monotone() {
        let (m, _) = planted_block_distances(&[6, 6, 6], 1.0, 3.0, 0.2, 9);
        for linkage in [Linkage::Ward, Linkage::Average, Linkage::Single, Linkage::Complete] {
            let dend = linkage_matrix(&m, linkage, false).unwrap();
            for pair in dend.merges().windows(2) {
                assert!(
                    pair[1].height >= pair[0].height - 1e-9,
                    "{linkage:?}: inversion {} -> {}",
                    pair[0].height,
                    pair[1].height
                );
            }
        }
    }

    #[test]
    fn ward_heights_monotone_on_resistance_distances() {
        // Resistance distances embed as squared Euclidean distances, the
        // exact input Ward's recurrence is defined for.
        let pruned = crate::synth::random_connected_bipartite(
            &crate::synth::BipartiteConfig::default(),
            61,
        );
        let g = crate::graph::weigh(&pruned, crate::graph::WeightingScheme::GeometricMeanDegree)
            .unwrap();
        let m = crate::exact::exact_all_pairs(&g, &g.papers()).unwrap();
        let dend = linkage_matrix(&m, Linkage::Ward, false).unwrap();
        for pair in dend.merges().windows(2) {
            assert!(pair[1].height >= pair[0].height - 1e-9);
        }
    }

    #[test]
    fn ward_recovers_planted_blocks() {
        let (m, truth) = planted_block_distances(&[15, 12, 10], 1.0, 3.0, 0.2, 21);
        let (_, flat) = agglomerate(&m, Linkage::Ward, 3, false).unwrap();
        for block in 0..3 {
            let members: Vec<usize> = (0..truth.len()).filter(|&i| truth[i] == block).collect();
            let first = flat[members[0]];
            assert!(
                members.iter().all(|&i| flat[i] == first),
                "block {block} split: {flat:?}"
            );
        }
    }

    #[test]
    fn squared_variant_changes_heights_not_tight_pairs() {
        let m = matrix(4, &[0.1, 5.0, 5.2, 5.1, 4.9, 0.2]);
        let (raw, flat_raw) = agglomerate(&m, Linkage::Ward, 2, false).unwrap();
        let (squared, flat_sq) = agglomerate(&m, Linkage::Ward, 2, true).unwrap();
        assert_eq!(flat_raw, flat_sq);
        assert!((squared.merges()[0].height - raw.merges()[0].height.powi(2)).abs() < 1e-12);
    }
}
