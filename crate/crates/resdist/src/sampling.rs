//! Distance-distribution estimation from a random sample of paper pairs.
//!
//! All unordered pairs are put in seeded uniform random order, so the first
//! `n` computed distances are a random sample of the whole population. The
//! running mean carries a finite-population standard error
//! `S_R^2 = (N-n) / ((N-1)(n-1)n) * [sum R_i^2 - (sum R_i)^2 / n]`,
//! and sampling stops once `S_R` has stayed below a tenth of the solver
//! tolerance for a configured number of consecutive updates.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{CitationGraph, NodeIdx};
use crate::resistance::{self, SolverConfig};

/// Sampler tolerances; `epsilon` is the same number the solver uses, and the
/// stopping rule watches for `S_R < epsilon / 10`.
#[derive(Debug, Clone, Copy)]
pub struct SamplerConfig {
    pub epsilon: f64,
    /// Consecutive below-threshold checks required before stopping.
    pub streak: u32,
    pub rng_seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            epsilon: 0.1,
            streak: 10,
            rng_seed: 0,
        }
    }
}

/// Neumaier compensated accumulator; keeps the variance cancellation in the
/// standard-error formula benign over long streams.
#[derive(Debug, Clone, Copy, Default)]
struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Running mean and finite-population standard error over sampled distances.
#[derive(Debug, Clone, Default)]
pub struct SampleEstimate {
    n: u64,
    population: u64,
    sum_r: CompensatedSum,
    sum_r2: CompensatedSum,
}

impl SampleEstimate {
    /// Fresh estimate for a population of `population` pairs.
    pub fn new(population: u64) -> Self {
        SampleEstimate {
            population,
            ..SampleEstimate::default()
        }
    }

    /// Fold one sampled distance into the running sums.
    pub fn update(&mut self, r: f64) -> Result<()> {
        if !r.is_finite() || r < 0.0 {
            return Err(Error::Domain(format!(
                "sampled distance must be finite and non-negative, got {r}"
            )));
        }
        if self.n >= self.population {
            return Err(Error::Domain(
                "sample already covers the whole population".to_string(),
            ));
        }
        self.n += 1;
        self.sum_r.add(r);
        self.sum_r2.add(r * r);
        Ok(())
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn population(&self) -> u64 {
        self.population
    }

    pub fn sum(&self) -> f64 {
        self.sum_r.value()
    }

    pub fn sum_of_squares(&self) -> f64 {
        self.sum_r2.value()
    }

    pub fn mean(&self) -> f64 {
        if self.n == 0 {
            f64::NAN
        } else {
            self.sum_r.value() / self.n as f64
        }
    }

    /// Finite-population standard error of the mean; defined for `n >= 2`.
    /// Vanishes once the sample covers the whole population.
    pub fn std_error(&self) -> Option<f64> {
        if self.n < 2 {
            return None;
        }
        let (n, cap) = (self.n as f64, self.population as f64);
        let sum = self.sum_r.value();
        let spread = self.sum_r2.value() - sum * sum / n;
        let factor = (cap - n) / ((cap - 1.0) * (n - 1.0) * n);
        Some((factor * spread).max(0.0).sqrt())
    }
}

/// Lazily shuffled stream of all unordered index pairs `(i, j)`, `i < j`,
/// over `0..count`. The same seed always yields the same stream, and every
/// prefix is a uniform random sample of the pair population.
#[derive(Debug, Clone)]
pub struct PairStream {
    pairs: Vec<(u32, u32)>,
    rng: ChaCha8Rng,
    position: usize,
}

impl PairStream {
    pub fn population(&self) -> u64 {
        self.pairs.len() as u64
    }
}

impl Iterator for PairStream {
    type Item = (usize, usize);

    fn next(&mut self) -> Option<(usize, usize)> {
        if self.position >= self.pairs.len() {
            return None;
        }
        // Incremental Fisher-Yates: each yielded element is drawn uniformly
        // from the not-yet-emitted remainder.
        let swap_with = self.rng.random_range(self.position..self.pairs.len());
        self.pairs.swap(self.position, swap_with);
        let (a, b) = self.pairs[self.position];
        self.position += 1;
        Some((a as usize, b as usize))
    }
}

/// Seeded uniform random order over all unordered pairs of `0..count`.
pub fn shuffle_pairs(count: usize, seed: u64) -> Result<PairStream> {
    if count < 2 {
        return Err(Error::Domain(format!(
            "need at least 2 papers to sample pairs, got {count}"
        )));
    }
    let mut pairs = Vec::with_capacity(count * (count - 1) / 2);
    for i in 0..count as u32 {
        for j in (i + 1)..count as u32 {
            pairs.push((i, j));
        }
    }
    Ok(PairStream {
        pairs,
        rng: ChaCha8Rng::seed_from_u64(seed),
        position: 0,
    })
}

/// One sampled pair with its distance, in sampling order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampledPair {
    pub a: usize,
    pub b: usize,
    pub distance: f64,
}

/// Drive the estimator over the shuffled pair stream with an arbitrary
/// distance callback, stopping per the `S_R < epsilon/10` streak rule or at
/// stream exhaustion.
pub fn estimate_with<F>(
    count: usize,
    cfg: &SamplerConfig,
    mut distance: F,
) -> Result<(SampleEstimate, Vec<SampledPair>)>
where
    F: FnMut(usize, usize) -> Result<f64>,
{
    let stream = shuffle_pairs(count, cfg.rng_seed)?;
    let mut estimate = SampleEstimate::new(stream.population());
    let mut sampled = Vec::new();
    let threshold = cfg.epsilon / 10.0;
    let mut below = 0u32;
    for (a, b) in stream {
        let d = distance(a, b)?;
        estimate.update(d)?;
        sampled.push(SampledPair { a, b, distance: d });
        match estimate.std_error() {
            Some(se) if se < threshold => below += 1,
            _ => below = 0,
        }
        if below >= cfg.streak.max(1) {
            break;
        }
    }
    Ok((estimate, sampled))
}

/// Estimate the distance distribution of `papers` by solving sampled pairs
/// with the iterative solver.
pub fn estimate_distribution(
    g: &CitationGraph,
    papers: &[NodeIdx],
    cfg: &SamplerConfig,
    solver_cfg: &SolverConfig,
) -> Result<(SampleEstimate, Vec<SampledPair>)> {
    let mut papers: Vec<NodeIdx> = papers.to_vec();
    papers.sort_unstable();
    papers.dedup();
    if papers.len() < 2 {
        return Err(Error::Domain(format!(
            "need at least 2 papers to sample pairs, got {}",
            papers.len()
        )));
    }
    let component = resistance::check_single_component(g, &papers)?;
    estimate_with(papers.len(), cfg, |a, b| {
        let result = resistance::solve_in_component(g, papers[a], papers[b], solver_cfg, &component);
        Ok(result.resistance)
    })
}
