//! Error type shared by every module of the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unknown node id `{0}`")]
    UnknownNode(String),

    #[error("poles must be two distinct nodes (got `{0}` twice)")]
    IdenticalPoles(String),

    #[error("nodes `{a}` and `{b}` lie in different connected components; resistance is infinite")]
    Disconnected { a: String, b: String },

    #[error("papers split across {} components: {}", groups.len(), summarize_groups(groups))]
    DisconnectedPapers { groups: Vec<Vec<String>> },

    #[error("graph has no nodes")]
    EmptyGraph,

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("{0}")]
    Domain(String),

    #[error("component has {size} nodes, above the exact-solver cap of {cap}; use the iterative solver")]
    SizeCap { size: usize, cap: usize },

    #[error("unknown topic label `{label}`; available: {}", available.join(", "))]
    UnknownLabel { label: String, available: Vec<String> },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn summarize_groups(groups: &[Vec<String>]) -> String {
    groups
        .iter()
        .map(|g| {
            let mut head: Vec<&str> = g.iter().take(3).map(String::as_str).collect();
            if g.len() > 3 {
                head.push("...");
            }
            format!("[{} papers: {}]", g.len(), head.join(", "))
        })
        .collect::<Vec<_>>()
        .join(" ")
}
