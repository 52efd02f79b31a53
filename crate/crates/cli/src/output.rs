//! Output files: atomic writes, DOT rendering, and JSON serialization.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use minet::filtration::EdgeSet;
use minet::ingest::SectorMap;

use crate::CliError;

/// Writes via a temp file in the target directory plus a rename, so readers
/// never observe a half-written file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let io_err = |source| CliError::Io {
        path: path.to_owned(),
        source,
    };
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(dir) = dir {
        std::fs::create_dir_all(dir).map_err(io_err)?;
    }
    let mut tmp = tempfile::NamedTempFile::new_in(dir.unwrap_or(Path::new(".")))
        .map_err(io_err)?;
    tmp.write_all(contents.as_bytes()).map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io {
        path: path.to_owned(),
        source: e.into(),
    })?;
    text.push('\n');
    write_atomic(path, &text)
}

/// Undirected DOT graph. Every roster node is declared in order; nodes with
/// a known sector are filled with its color.
pub fn dot_graph(edges: &EdgeSet, tickers: &[String], sectors: &SectorMap) -> String {
    let mut out = String::from("graph mi_network {\n");
    out.push_str("  node [shape=circle style=filled fillcolor=lightgray];\n");
    for ticker in tickers {
        match sectors.get(ticker) {
            Some(info) => {
                let _ = writeln!(
                    out,
                    "  \"{ticker}\" [fillcolor=\"{}\" color=\"{}\" sector=\"{}\"];",
                    info.color, info.color, info.sector
                );
            }
            None => {
                let _ = writeln!(out, "  \"{ticker}\";");
            }
        }
    }
    for e in edges.edges() {
        let _ = writeln!(
            out,
            "  \"{}\" -- \"{}\" [weight={}];",
            tickers[e.i], tickers[e.j], e.weight
        );
    }
    out.push_str("}\n");
    out
}
