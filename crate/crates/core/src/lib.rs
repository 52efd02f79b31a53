//! Builds stock-correlation networks from return series.
//!
//! The pipeline: discretize log returns, score every pair of series with
//! normalized mutual information, keep edges that clear either a global
//! threshold or a per-node maximum-likelihood breakpoint (optionally with a
//! connectivity penalty), then characterize the surviving network (degree
//! law, clustering, maximal cliques, intra-clique disparity).
//!
//! Heavy loops (pairwise MI, per-node breakpoint scans, parameter sweeps)
//! run on rayon when the default `parallel` feature is on; `*_seq` variants
//! are always available and produce identical results.

pub mod distfit;
pub mod error;
pub mod filtration;
pub mod infotheory;
pub mod ingest;
mod parallel;
pub mod topology;

pub use error::{Error, ErrorKind, Result};
