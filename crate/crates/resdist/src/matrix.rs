//! Condensed symmetric matrix of paper-paper resistance distances, with the
//! long-form CSV serialization shared by the iterative and exact solvers.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Read, Write};

use crate::error::{Error, Result};

/// One converged (or abandoned) pair computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairEntry {
    pub resistance: f64,
    pub lower: f64,
    pub upper: f64,
    pub iterations: u32,
    pub converged: bool,
}

impl PairEntry {
    /// Entry for an exactly known distance (degenerate bounds).
    pub fn exact(value: f64) -> Self {
        PairEntry {
            resistance: value,
            lower: value,
            upper: value,
            iterations: 0,
            converged: true,
        }
    }
}

/// Symmetric paper-paper distance matrix in condensed (upper-triangle) form.
///
/// Entry order is lexicographic by `(index_a, index_b)` with `index_a <
/// index_b`, which is also the row order of the CSV serialization.
#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    labels: Vec<String>,
    index_of: HashMap<String, usize>,
    entries: Vec<PairEntry>,
}

/// Index of pair `(i, j)`, `i < j`, in a condensed matrix over `n` items.
#[inline]
pub fn condensed_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    n * i - i * (i + 1) / 2 + j - i - 1
}

impl DistanceMatrix {
    pub fn new(labels: Vec<String>, entries: Vec<PairEntry>) -> Result<Self> {
        let n = labels.len();
        if n < 2 {
            return Err(Error::Domain(format!(
                "a distance matrix needs at least 2 papers, got {n}"
            )));
        }
        if entries.len() != n * (n - 1) / 2 {
            return Err(Error::Domain(format!(
                "expected {} condensed entries for {} papers, got {}",
                n * (n - 1) / 2,
                n,
                entries.len()
            )));
        }
        let index_of = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect();
        Ok(DistanceMatrix {
            labels,
            index_of,
            entries,
        })
    }

    /// Matrix of exactly known distances in condensed order.
    pub fn from_values(labels: Vec<String>, values: &[f64]) -> Result<Self> {
        Self::new(labels, values.iter().map(|&v| PairEntry::exact(v)).collect())
    }

    pub fn paper_count(&self) -> usize {
        self.labels.len()
    }

    pub fn pair_count(&self) -> usize {
        self.entries.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index_of.get(label).copied()
    }

    /// Distance between papers `i` and `j`; 0 on the diagonal.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.entries[condensed_index(self.paper_count(), a, b)].resistance
    }

    pub fn entry(&self, i: usize, j: usize) -> &PairEntry {
        assert_ne!(i, j, "no diagonal entries in a condensed matrix");
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        &self.entries[condensed_index(self.paper_count(), a, b)]
    }

    pub fn entries(&self) -> &[PairEntry] {
        &self.entries
    }

    /// Condensed distances in `(index_a, index_b)` order.
    pub fn condensed(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.resistance).collect()
    }

    /// CSV with header `paper_a,paper_b,resistance,lower,upper,iterations,converged`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "paper_a,paper_b,resistance,lower,upper,iterations,converged"
        )?;
        let n = self.paper_count();
        let mut k = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                let e = &self.entries[k];
                writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    self.labels[i],
                    self.labels[j],
                    fmt_sig12(e.resistance),
                    fmt_sig12(e.lower),
                    fmt_sig12(e.upper),
                    e.iterations,
                    e.converged
                )?;
                k += 1;
            }
        }
        Ok(())
    }

    /// Parse a matrix written by [`DistanceMatrix::write_csv`].
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let reader = BufReader::new(input);
        let mut lines = reader.lines().enumerate();
        let header = match lines.next() {
            Some((_, line)) => line?,
            None => {
                return Err(Error::Parse {
                    line: 1,
                    msg: "empty distance-matrix file".into(),
                })
            }
        };
        if header.trim() != "paper_a,paper_b,resistance,lower,upper,iterations,converged" {
            return Err(Error::Parse {
                line: 1,
                msg: format!("unexpected header `{}`", header.trim()),
            });
        }

        let mut labels: Vec<String> = Vec::new();
        let mut seen: HashMap<String, usize> = HashMap::new();
        let mut rows: Vec<(usize, usize, PairEntry)> = Vec::new();
        for (lineno, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 7 {
                return Err(Error::Parse {
                    line: lineno + 1,
                    msg: format!("expected 7 columns, found {}", fields.len()),
                });
            }
            let mut intern = |id: &str| -> usize {
                *seen.entry(id.to_string()).or_insert_with(|| {
                    labels.push(id.to_string());
                    labels.len() - 1
                })
            };
            let a = intern(fields[0]);
            let b = intern(fields[1]);
            let parse_f = |raw: &str, what: &str| -> Result<f64> {
                raw.trim().parse::<f64>().map_err(|_| Error::Parse {
                    line: lineno + 1,
                    msg: format!("bad {what} `{raw}`"),
                })
            };
            let entry = PairEntry {
                resistance: parse_f(fields[2], "resistance")?,
                lower: parse_f(fields[3], "lower bound")?,
                upper: parse_f(fields[4], "upper bound")?,
                iterations: fields[5].trim().parse().map_err(|_| Error::Parse {
                    line: lineno + 1,
                    msg: format!("bad iteration count `{}`", fields[5]),
                })?,
                converged: match fields[6].trim() {
                    "true" => true,
                    "false" => false,
                    other => {
                        return Err(Error::Parse {
                            line: lineno + 1,
                            msg: format!("bad converged flag `{other}`"),
                        })
                    }
                },
            };
            if a == b {
                return Err(Error::Parse {
                    line: lineno + 1,
                    msg: "diagonal entry in condensed matrix".into(),
                });
            }
            rows.push((a, b, entry));
        }

        let n = labels.len();
        let expected = n.saturating_mul(n.saturating_sub(1)) / 2;
        if n < 2 || rows.len() != expected {
            return Err(Error::Domain(format!(
                "distance matrix covers {} papers but has {} of {} expected pairs",
                n,
                rows.len(),
                expected
            )));
        }
        let mut entries = vec![None; expected];
        for (a, b, e) in rows {
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            let slot = &mut entries[condensed_index(n, i, j)];
            if slot.is_some() {
                return Err(Error::Domain(format!(
                    "duplicate pair ({}, {})",
                    labels[i], labels[j]
                )));
            }
            *slot = Some(e);
        }
        let entries = entries.into_iter().map(Option::unwrap).collect();
        Self::new(labels, entries)
    }
}

/// Format with up to 12 significant digits, positional where readable and
/// scientific otherwise. Deterministic, so repeated runs emit identical bytes.
pub fn fmt_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_fraction(format!("{x:.decimals$}"))
    } else {
        let formatted = format!("{x:.11e}");
        match formatted.split_once('e') {
            Some((mantissa, e)) => format!("{}e{}", trim_fraction(mantissa.to_string()), e),
            None => formatted,
        }
    }
}

fn trim_fraction(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let trimmed = s.trim_end_matches('0').trim_end_matches('.');
    trimmed.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> DistanceMatrix {
        DistanceMatrix::from_values(
            vec!["a".into(), "b".into(), "c".into()],
            &[1.0, 2.5, 0.125],
        )
        .unwrap()
    }

    #[test]
    fn condensed_indexing() {
        assert_eq!(condensed_index(4, 0, 1), 0);
        assert_eq!(condensed_index(4, 0, 3), 2);
        assert_eq!(condensed_index(4, 1, 2), 3);
        assert_eq!(condensed_index(4, 2, 3), 5);
    }

    #[test]
    fn get_is_symmetric_with_zero_diagonal() {
        let m = toy();
        assert_eq!(m.get(0, 1), 1.0);
        assert_eq!(m.get(1, 0), 1.0);
        assert_eq!(m.get(2, 1), 0.125);
        assert_eq!(m.get(1, 1), 0.0);
    }

    #[test]
    fn csv_round_trip() {
        let m = toy();
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let back = DistanceMatrix::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.labels(), m.labels());
        for i in 0..3 {
            for j in (i + 1)..3 {
                assert_eq!(back.get(i, j), m.get(i, j));
            }
        }
    }

    #[test]
    fn csv_rejects_missing_pairs() {
        let text = "paper_a,paper_b,resistance,lower,upper,iterations,converged\n\
                    a,b,1,1,1,0,true\n\
                    a,c,2,2,2,0,true\n";
        assert!(DistanceMatrix::read_csv(text.as_bytes()).is_err());
    }

    #[test]
    fn infinity_round_trips() {
        let m = DistanceMatrix::new(
            vec!["a".into(), "b".into()],
            vec![PairEntry {
                resistance: f64::INFINITY,
                lower: 3.0,
                upper: f64::INFINITY,
                iterations: 7,
                converged: false,
            }],
        )
        .unwrap();
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let back = DistanceMatrix::read_csv(buf.as_slice()).unwrap();
        assert!(back.entry(0, 1).upper.is_infinite());
        assert!(!back.entry(0, 1).converged);
    }

    #[test]
    fn sig12_formatting() {
        assert_eq!(fmt_sig12(0.0), "0");
        assert_eq!(fmt_sig12(2.0), "2");
        assert_eq!(fmt_sig12(0.125), "0.125");
        assert_eq!(fmt_sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_sig12(1.5e-7), "1.5e-7");
        assert_eq!(fmt_sig12(-42.5), "-42.5");
        assert_eq!(fmt_sig12(f64::INFINITY), "inf");
    }
}
