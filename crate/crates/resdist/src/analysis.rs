//! Validation analytics over a finished distance matrix: topic files,
//! centrality-normalized median-distance ranking with cumulative recall,
//! log-distance histograms, and precision/recall against planted truth.
//!
//! High-degree papers sit close to everything simply because every current
//! must pass through their many neighbors, so a paper is ranked by the
//! *ratio* of its median distance to the topic over its median distance to
//! the whole sample; the ratio cancels the centrality effect.

use std::collections::BTreeSet;
use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::matrix::{fmt_sig12, DistanceMatrix};

/// A labelled set of paper ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopicSet {
    pub label: String,
    pub members: BTreeSet<String>,
}

/// Parse a `paper_id,topic_label` CSV (header required). A paper may appear
/// under several labels; topics overlap. Label order follows first
/// appearance.
pub fn parse_topics<R: Read>(input: R) -> Result<Vec<TopicSet>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    {
        let headers = reader.headers()?;
        if headers.len() != 2 || &headers[0] != "paper_id" || &headers[1] != "topic_label" {
            return Err(Error::Parse {
                line: 1,
                msg: format!(
                    "expected header `paper_id,topic_label`, found `{}`",
                    headers.iter().collect::<Vec<_>>().join(",")
                ),
            });
        }
    }
    let mut order: Vec<String> = Vec::new();
    let mut topics: std::collections::HashMap<String, BTreeSet<String>> =
        std::collections::HashMap::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != 2 {
            return Err(Error::Parse {
                line: row + 2,
                msg: format!("expected 2 columns, found {}", record.len()),
            });
        }
        let (paper, label) = (&record[0], &record[1]);
        if paper.is_empty() || label.is_empty() {
            return Err(Error::Parse {
                line: row + 2,
                msg: "empty field".to_string(),
            });
        }
        if !topics.contains_key(label) {
            order.push(label.to_string());
        }
        topics
            .entry(label.to_string())
            .or_default()
            .insert(paper.to_string());
    }
    Ok(order
        .into_iter()
        .map(|label| {
            let members = topics.remove(&label).unwrap_or_default();
            TopicSet { label, members }
        })
        .collect())
}

/// Median distance from `paper` to `targets`, excluding `paper` itself if it
/// is a target (its zero self-distance would bias the median). Even counts
/// use the mean of the central pair.
pub fn median_distance(m: &DistanceMatrix, paper: usize, targets: &[usize]) -> Result<f64> {
    let mut distances: Vec<f64> = targets
        .iter()
        .filter(|&&t| t != paper)
        .map(|&t| m.get(paper, t))
        .collect();
    if distances.is_empty() {
        return Err(Error::Domain(format!(
            "no targets left for paper `{}` after excluding itself",
            m.labels()[paper]
        )));
    }
    distances.sort_unstable_by(f64::total_cmp);
    let mid = distances.len() / 2;
    Ok(if distances.len() % 2 == 1 {
        distances[mid]
    } else {
        0.5 * (distances[mid - 1] + distances[mid])
    })
}

/// One ranked paper.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedPaper {
    pub paper: String,
    /// Index in the distance matrix, used as the deterministic tie-breaker.
    pub index: usize,
    /// Median distance to the topic over median distance to all papers.
    pub score: f64,
    pub is_member: bool,
}

/// Papers ordered by ascending median-ratio score, with the running count of
/// topic members seen so far (the cumulative-recall curve).
#[derive(Debug, Clone)]
pub struct RankingResult {
    pub topic_label: String,
    pub entries: Vec<RankedPaper>,
    pub cumulative_topic_count: Vec<usize>,
}

impl RankingResult {
    /// CSV rows `rank,paper_id,score,is_topic_member,cumulative_topic_count`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "rank,paper_id,score,is_topic_member,cumulative_topic_count"
        )?;
        for (rank, (entry, cum)) in self
            .entries
            .iter()
            .zip(&self.cumulative_topic_count)
            .enumerate()
        {
            writeln!(
                out,
                "{},{},{},{},{}",
                rank + 1,
                entry.paper,
                fmt_sig12(entry.score),
                entry.is_member,
                cum
            )?;
        }
        Ok(())
    }
}

/// Rank every paper of the matrix by `median(distance to topic members) /
/// median(distance to all papers)`, ascending; smaller means more similar.
///
/// Topic members outside the matrix are ignored; a member ranking its own
/// single-member topic gets score 0 by convention. Ties break by matrix
/// index so reruns are byte-identical.
pub fn rank_by_topic(m: &DistanceMatrix, topic: &TopicSet) -> Result<RankingResult> {
    let member_indices: Vec<usize> = m
        .labels()
        .iter()
        .enumerate()
        .filter(|(_, l)| topic.members.contains(*l))
        .map(|(i, _)| i)
        .collect();
    if member_indices.is_empty() {
        return Err(Error::Domain(format!(
            "topic `{}` shares no papers with the distance matrix",
            topic.label
        )));
    }
    let all: Vec<usize> = (0..m.paper_count()).collect();
    let member_set: BTreeSet<usize> = member_indices.iter().copied().collect();

    let mut entries = Vec::with_capacity(m.paper_count());
    for p in 0..m.paper_count() {
        let is_member = member_set.contains(&p);
        let effective: Vec<usize> = member_indices
            .iter()
            .copied()
            .filter(|&t| t != p)
            .collect();
        let score = if effective.is_empty() {
            // Sole member of its own topic: pinned to the top.
            0.0
        } else {
            let to_topic = median_distance(m, p, &effective)?;
            let to_all = median_distance(m, p, &all)?;
            to_topic / to_all
        };
        entries.push(RankedPaper {
            paper: m.labels()[p].clone(),
            index: p,
            score,
            is_member,
        });
    }
    entries.sort_by(|a, b| a.score.total_cmp(&b.score).then(a.index.cmp(&b.index)));

    let mut cumulative = Vec::with_capacity(entries.len());
    let mut seen = 0usize;
    for entry in &entries {
        if entry.is_member {
            seen += 1;
        }
        cumulative.push(seen);
    }
    Ok(RankingResult {
        topic_label: topic.label.clone(),
        entries,
        cumulative_topic_count: cumulative,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramBin {
    /// Bin edges on the natural-log scale.
    pub left: f64,
    pub right: f64,
    pub count: usize,
}

/// Histogram of `ln(distance)` over all matrix entries.
#[derive(Debug, Clone)]
pub struct Histogram {
    pub bins: Vec<HistogramBin>,
}

impl Histogram {
    pub fn total_count(&self) -> usize {
        self.bins.iter().map(|b| b.count).sum()
    }

    /// CSV rows `bin_left,bin_right,count` (edges in ln units).
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "bin_left,bin_right,count")?;
        for bin in &self.bins {
            writeln!(
                out,
                "{},{},{}",
                fmt_sig12(bin.left),
                fmt_sig12(bin.right),
                bin.count
            )?;
        }
        Ok(())
    }
}

/// Equal-width bins over `[min, max]` of the log distances; bins are
/// right-open except the last. A degenerate range (all distances equal)
/// collapses to one bin.
pub fn log_histogram(m: &DistanceMatrix, bins: usize) -> Result<Histogram> {
    log_histogram_values(&m.condensed(), bins)
}

fn log_histogram_values(values: &[f64], bins: usize) -> Result<Histogram> {
    if bins == 0 {
        return Err(Error::Domain("bin count must be positive".to_string()));
    }
    if values.is_empty() {
        return Err(Error::Domain("no distances to bin".to_string()));
    }
    let mut logs = Vec::with_capacity(values.len());
    for &v in values {
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::Domain(format!(
                "distances must be positive and finite to take logs, got {v}"
            )));
        }
        logs.push(v.ln());
    }
    let lo = logs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if lo == hi {
        return Ok(Histogram {
            bins: vec![HistogramBin {
                left: lo,
                right: hi,
                count: logs.len(),
            }],
        });
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &x in &logs {
        let k = (((x - lo) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    Ok(Histogram {
        bins: counts
            .into_iter()
            .enumerate()
            .map(|(k, count)| HistogramBin {
                left: lo + k as f64 * width,
                right: if k + 1 == bins {
                    hi
                } else {
                    lo + (k + 1) as f64 * width
                },
                count,
            })
            .collect(),
    })
}

/// Per-topic precision and recall of a flat clustering.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicScore {
    pub label: String,
    pub precision: f64,
    pub recall: f64,
}

/// Score `found` (one cluster label per matrix paper, aligned with `labels`)
/// against each truth topic via its best-F1 cluster.
///
/// A topic with no papers in the clustered universe scores (0, 0); if no
/// topic overlaps the universe at all the inputs are disjoint and that is an
/// error.
pub fn precision_recall(
    found: &[usize],
    labels: &[String],
    truth: &[TopicSet],
) -> Result<Vec<TopicScore>> {
    if found.len() != labels.len() {
        return Err(Error::Domain(format!(
            "clustering covers {} papers but {} labels were supplied",
            found.len(),
            labels.len()
        )));
    }
    let cluster_count = found.iter().copied().max().map_or(0, |m| m + 1);
    let mut clusters: Vec<Vec<usize>> = vec![Vec::new(); cluster_count];
    for (i, &c) in found.iter().enumerate() {
        clusters[c].push(i);
    }

    let mut scores = Vec::with_capacity(truth.len());
    let mut any_overlap = false;
    for topic in truth {
        let present: Vec<usize> = labels
            .iter()
            .enumerate()
            .filter(|(_, l)| topic.members.contains(*l))
            .map(|(i, _)| i)
            .collect();
        if present.is_empty() {
            scores.push(TopicScore {
                label: topic.label.clone(),
                precision: 0.0,
                recall: 0.0,
            });
            continue;
        }
        any_overlap = true;
        let present_set: BTreeSet<usize> = present.iter().copied().collect();
        let mut best = TopicScore {
            label: topic.label.clone(),
            precision: 0.0,
            recall: 0.0,
        };
        let mut best_f1 = -1.0;
        for members in &clusters {
            if members.is_empty() {
                continue;
            }
            let inter = members.iter().filter(|i| present_set.contains(i)).count() as f64;
            let precision = inter / members.len() as f64;
            let recall = inter / present.len() as f64;
            let f1 = if precision + recall > 0.0 {
                2.0 * precision * recall / (precision + recall)
            } else {
                0.0
            };
            if f1 > best_f1 {
                best_f1 = f1;
                best = TopicScore {
                    label: topic.label.clone(),
                    precision,
                    recall,
                };
            }
        }
        scores.push(best);
    }
    if !any_overlap {
        return Err(Error::Domain(
            "clustering and topics cover disjoint paper sets".to_string(),
        ));
    }
    Ok(scores)
}
