//! Edge filtration: global thresholds and per-node likelihood breakpoints.
//!
//! The breakpoint methods sort each node's similarity row ascending and
//! split it into a weak and a strong segment, placing the split where the
//! combined two-segment log-likelihood peaks. The penalized variant
//! subtracts a connectivity cost that grows with the strong segment's
//! distance from full similarity, pulling the threshold down and keeping
//! more edges.

use std::fmt::Write as _;
use std::io;
use std::str::FromStr;

use crate::distfit::{fit_mle, select_fit, Family};
use crate::error::{Error, Result};
use crate::infotheory::MIMatrix;
use crate::parallel;

/// How per-node thresholds combine into undirected edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeRule {
    /// Keep `(i, j)` when the weight clears either endpoint's threshold.
    /// Symmetric in the node order.
    Union,
    /// Keep `(i, j)`, `i < j`, when the weight clears node `i`'s threshold
    /// only. Order-sensitive, kept for comparisons against the union rule.
    LowerIndex,
}

impl FromStr for EdgeRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "union" => Ok(EdgeRule::Union),
            "lower-index" => Ok(EdgeRule::LowerIndex),
            other => Err(Error::InvalidParam(format!(
                "unknown edge rule {other:?}, expected union or lower-index"
            ))),
        }
    }
}

impl std::fmt::Display for EdgeRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EdgeRule::Union => "union",
            EdgeRule::LowerIndex => "lower-index",
        })
    }
}

/// Segment model: a fixed family, or the best of several by likelihood.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilyChoice {
    Fixed(Family),
    Auto(Vec<Family>),
}

impl FamilyChoice {
    fn is_quantized(&self) -> Result<bool> {
        match self {
            FamilyChoice::Fixed(f) => Ok(f.is_quantized()),
            FamilyChoice::Auto(candidates) => {
                let first = candidates
                    .first()
                    .ok_or_else(|| Error::InvalidParam("empty family list".into()))?;
                if candidates.iter().any(|f| f.is_quantized() != first.is_quantized()) {
                    return Err(Error::MixedFamilies);
                }
                Ok(first.is_quantized())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiltrationConfig {
    pub weak: FamilyChoice,
    pub strong: FamilyChoice,
    /// Smallest admissible segment length on either side of a split.
    pub min_segment: usize,
    pub edge_rule: EdgeRule,
}

impl Default for FiltrationConfig {
    fn default() -> Self {
        Self {
            weak: FamilyChoice::Fixed(Family::Normal),
            strong: FamilyChoice::Fixed(Family::Exponential),
            min_segment: 5,
            edge_rule: EdgeRule::Union,
        }
    }
}

impl FiltrationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_segment < 2 {
            return Err(Error::InvalidParam(format!(
                "minimum segment {} must be at least 2",
                self.min_segment
            )));
        }
        // Weak and strong likelihoods are added together, so both segments
        // must be modeled on the same measure.
        if self.weak.is_quantized()? != self.strong.is_quantized()? {
            return Err(Error::MixedFamilies);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

/// Undirected simple graph on `0..n` with weighted edges, kept sorted by
/// `(i, j)` so identical graphs serialize identically.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSet {
    n: usize,
    edges: Vec<Edge>,
}

impl EdgeSet {
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self> {
        let mut edges: Vec<Edge> = edges
            .into_iter()
            .map(|e| {
                if e.i == e.j || e.i >= n || e.j >= n {
                    return Err(Error::InvalidParam(format!(
                        "edge ({}, {}) invalid for {n} nodes",
                        e.i, e.j
                    )));
                }
                if !e.weight.is_finite() || !(0.0..=1.0).contains(&e.weight) {
                    return Err(Error::InvalidParam(format!(
                        "edge ({}, {}) weight {} outside [0, 1]",
                        e.i, e.j, e.weight
                    )));
                }
                Ok(Edge {
                    i: e.i.min(e.j),
                    j: e.i.max(e.j),
                    weight: e.weight,
                })
            })
            .collect::<Result<_>>()?;
        edges.sort_unstable_by(|a, b| (a.i, a.j).cmp(&(b.i, b.j)));
        if let Some(w) = edges.windows(2).find(|w| (w[0].i, w[0].j) == (w[1].i, w[1].j)) {
            return Err(Error::InvalidParam(format!(
                "duplicate edge ({}, {})",
                w[0].i, w[0].j
            )));
        }
        Ok(Self { n, edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        let key = (i.min(j), i.max(j));
        self.edges
            .binary_search_by(|e| (e.i, e.j).cmp(&key))
            .is_ok()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.n];
        for e in &self.edges {
            deg[e.i] += 1;
            deg[e.j] += 1;
        }
        deg
    }

    /// Neighbor lists, each ascending (a consequence of edge ordering).
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.edges {
            adj[e.i].push(e.j);
            adj[e.j].push(e.i);
        }
        debug_assert!(adj.iter().all(|a| a.windows(2).all(|w| w[0] < w[1])));
        adj
    }

    /// CSV rows `src,dst,weight` in edge order, weights in shortest
    /// round-trip form.
    pub fn to_csv(&self, tickers: &[String]) -> Result<String> {
        if tickers.len() != self.n {
            return Err(Error::LengthMismatch {
                left: tickers.len(),
                right: self.n,
            });
        }
        let mut out = String::from("src,dst,weight\n");
        for e in &self.edges {
            let _ = writeln!(out, "{},{},{}", tickers[e.i], tickers[e.j], e.weight);
        }
        Ok(out)
    }

    pub fn from_csv(reader: impl io::Read, tickers: &[String]) -> Result<Self> {
        let index: std::collections::HashMap<&str, usize> = tickers
            .iter()
            .enumerate()
            .map(|(i, t)| (t.as_str(), i))
            .collect();
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| Error::InvalidParam(e.to_string()))?;
        if !headers.iter().eq(["src", "dst", "weight"]) {
            return Err(Error::InvalidParam(
                "expected header src,dst,weight".into(),
            ));
        }
        let mut edges = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| Error::InvalidParam(e.to_string()))?;
            let lookup = |t: &str| {
                index.get(t).copied().ok_or_else(|| {
                    Error::InvalidParam(format!("unknown ticker {t:?} in edge list"))
                })
            };
            let i = lookup(&rec[0])?;
            let j = lookup(&rec[1])?;
            let weight: f64 = rec[2]
                .parse()
                .map_err(|_| Error::InvalidParam(format!("bad weight {:?}", &rec[2])))?;
            edges.push(Edge { i, j, weight });
        }
        Self::new(tickers.len(), edges)
    }
}

/// Keeps edges with weight strictly above `eta`.
pub fn global_threshold(matrix: &MIMatrix, eta: f64) -> Result<EdgeSet> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidParam(format!(
            "threshold {eta} outside [0, 1]"
        )));
    }
    let n = matrix.n();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let weight = matrix.get(i, j);
            if weight > eta {
                edges.push(Edge { i, j, weight });
            }
        }
    }
    EdgeSet::new(n, edges)
}

/// Split of one node's ascending similarity row.
#[derive(Debug, Clone, PartialEq)]
pub struct BreakpointResult {
    /// Node index; 0 from the row-level functions, set by network builders.
    pub node: usize,
    /// Count of weak entries: the row splits as `row[..u]` / `row[u..]`.
    pub u: usize,
    /// Largest weak value; an edge survives when its weight exceeds this.
    pub threshold: f64,
    /// Objective at each candidate split; entry `k` is `u = min_segment + k`.
    pub objective_curve: Vec<f64>,
    pub weak_family: Family,
    pub strong_family: Family,
}

fn segment_loglik(segment: &[f64], choice: &FamilyChoice) -> Result<f64> {
    let fit = match choice {
        FamilyChoice::Fixed(f) => fit_mle(segment, *f),
        FamilyChoice::Auto(candidates) => select_fit(segment, candidates),
    };
    match fit {
        Ok(fit) => Ok(fit.loglik),
        Err(Error::DegenerateFit) => Ok(f64::NEG_INFINITY),
        Err(e) => Err(e),
    }
}

fn segment_family(segment: &[f64], choice: &FamilyChoice) -> Result<Family> {
    match choice {
        FamilyChoice::Fixed(f) => Ok(*f),
        FamilyChoice::Auto(candidates) => match select_fit(segment, candidates) {
            Ok(fit) => Ok(fit.family),
            // A segment can become constant after a tie adjustment; fall
            // back to the first candidate rather than fail the node.
            Err(Error::DegenerateFit) => Ok(candidates[0]),
            Err(e) => Err(e),
        },
    }
}

/// Connectivity cost of splitting at `u`: `alpha` times the strong
/// segment's total shortfall from full similarity, scaled by the row mean
/// raised to `q`.
pub fn penalty(row: &[f64], u: usize, alpha: f64, q: f64) -> Result<f64> {
    check_penalty_params(alpha, q)?;
    if u > row.len() || row.is_empty() {
        return Err(Error::InvalidParam(format!(
            "split {u} outside row of {} values",
            row.len()
        )));
    }
    let mean = row.iter().sum::<f64>() / row.len() as f64;
    if mean == 0.0 {
        return Err(Error::ZeroRowMean);
    }
    let shortfall: f64 = row[u..].iter().map(|x| 1.0 - x).sum();
    Ok(alpha * shortfall / mean.powf(q))
}

fn check_penalty_params(alpha: f64, q: f64) -> Result<()> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::InvalidParam(format!(
            "penalty weight {alpha} outside [0, 1)"
        )));
    }
    if !q.is_finite() || q < 1.0 {
        return Err(Error::InvalidParam(format!(
            "penalty exponent {q} must be at least 1"
        )));
    }
    Ok(())
}

/// Maximum-likelihood split of an ascending similarity row.
///
/// Scans every split leaving `min_segment` on each side, maximizes the
/// two-segment log-likelihood (earliest split wins exact ties), then nudges
/// a split landing inside a run of equal values to the nearest feasible run
/// boundary so the threshold realizes the reported split.
pub fn mlm_breakpoint(row: &[f64], config: &FiltrationConfig) -> Result<BreakpointResult> {
    scan_breakpoint(row, config, 0.0, 2.0)
}

/// [`mlm_breakpoint`] with the connectivity penalty subtracted from the
/// objective. `alpha = 0` reproduces the unpenalized split exactly.
pub fn cmlm_breakpoint(
    row: &[f64],
    alpha: f64,
    q: f64,
    config: &FiltrationConfig,
) -> Result<BreakpointResult> {
    check_penalty_params(alpha, q)?;
    scan_breakpoint(row, config, alpha, q)
}

fn scan_breakpoint(
    row: &[f64],
    config: &FiltrationConfig,
    alpha: f64,
    q: f64,
) -> Result<BreakpointResult> {
    config.validate()?;
    let len = row.len();
    let m = config.min_segment;
    if len < 2 * m {
        return Err(Error::TooFewSamples {
            got: len,
            need: 2 * m,
        });
    }
    if !row.windows(2).all(|w| w[0] <= w[1]) {
        return Err(Error::InvalidParam("row must be ascending".into()));
    }

    let mut curve = Vec::with_capacity(len - 2 * m + 1);
    let mut best: Option<(usize, f64)> = None;
    for u in m..=(len - m) {
        let mut objective =
            segment_loglik(&row[..u], &config.weak)? + segment_loglik(&row[u..], &config.strong)?;
        if alpha != 0.0 && objective.is_finite() {
            objective -= penalty(row, u, alpha, q)?;
        }
        curve.push(objective);
        if objective.is_finite() && best.is_none_or(|(_, b)| objective > b) {
            best = Some((u, objective));
        }
    }
    let (raw_u, _) = best.ok_or(Error::NoFeasibleSplit)?;
    let u = snap_to_run_boundary(row, raw_u, m)?;
    Ok(BreakpointResult {
        node: 0,
        u,
        threshold: row[u - 1],
        objective_curve: curve,
        weak_family: segment_family(&row[..u], &config.weak)?,
        strong_family: segment_family(&row[u..], &config.strong)?,
    })
}

/// A split inside a run of equal values cannot be realized by a threshold;
/// move it to the nearer feasible end of the run (the whole run goes to one
/// segment). Earlier end wins a distance tie.
fn snap_to_run_boundary(row: &[f64], u: usize, min_segment: usize) -> Result<usize> {
    if row[u - 1] != row[u] {
        return Ok(u);
    }
    let value = row[u - 1];
    let start = row.partition_point(|x| *x < value);
    let end = row.partition_point(|x| *x <= value);
    let feasible = min_segment..=(row.len() - min_segment);
    match (feasible.contains(&start), feasible.contains(&end)) {
        (true, true) => Ok(if u - start <= end - u { start } else { end }),
        (true, false) => Ok(start),
        (false, true) => Ok(end),
        (false, false) => Err(Error::NoFeasibleSplit),
    }
}

/// Per-node breakpoints over a similarity matrix, one edge set under the
/// configured rule. Runs on rayon under the `parallel` feature.
pub fn mlm_network(
    matrix: &MIMatrix,
    config: &FiltrationConfig,
) -> Result<(EdgeSet, Vec<BreakpointResult>)> {
    let rows = node_rows(matrix, config)?;
    let results = parallel::map_slice(&rows, |row| scan_breakpoint(row, config, 0.0, 2.0));
    finish_network(matrix, config, results)
}

/// Single-threaded [`mlm_network`]; produces identical results.
pub fn mlm_network_seq(
    matrix: &MIMatrix,
    config: &FiltrationConfig,
) -> Result<(EdgeSet, Vec<BreakpointResult>)> {
    let rows = node_rows(matrix, config)?;
    let results = parallel::map_slice_seq(&rows, |row| scan_breakpoint(row, config, 0.0, 2.0));
    finish_network(matrix, config, results)
}

/// Penalized per-node breakpoints; `alpha = 0` matches [`mlm_network`]
/// exactly.
pub fn cmlm_network(
    matrix: &MIMatrix,
    alpha: f64,
    q: f64,
    config: &FiltrationConfig,
) -> Result<(EdgeSet, Vec<BreakpointResult>)> {
    check_penalty_params(alpha, q)?;
    let rows = node_rows(matrix, config)?;
    let results = parallel::map_slice(&rows, |row| scan_breakpoint(row, config, alpha, q));
    finish_network(matrix, config, results)
}

/// Single-threaded [`cmlm_network`]; produces identical results.
pub fn cmlm_network_seq(
    matrix: &MIMatrix,
    alpha: f64,
    q: f64,
    config: &FiltrationConfig,
) -> Result<(EdgeSet, Vec<BreakpointResult>)> {
    check_penalty_params(alpha, q)?;
    let rows = node_rows(matrix, config)?;
    let results = parallel::map_slice_seq(&rows, |row| scan_breakpoint(row, config, alpha, q));
    finish_network(matrix, config, results)
}

fn node_rows(matrix: &MIMatrix, config: &FiltrationConfig) -> Result<Vec<Vec<f64>>> {
    config.validate()?;
    let n = matrix.n();
    if n < 2 * config.min_segment + 1 {
        return Err(Error::InvalidParam(format!(
            "need at least {} nodes for segments of {}, got {n}",
            2 * config.min_segment + 1,
            config.min_segment
        )));
    }
    Ok((0..n).map(|i| matrix.row_off_diag_sorted(i)).collect())
}

fn finish_network(
    matrix: &MIMatrix,
    config: &FiltrationConfig,
    results: Vec<Result<BreakpointResult>>,
) -> Result<(EdgeSet, Vec<BreakpointResult>)> {
    let n = matrix.n();
    let mut breakpoints = Vec::with_capacity(n);
    for (i, result) in results.into_iter().enumerate() {
        let mut bp = result.map_err(|e| Error::Node {
            node: matrix.tickers()[i].clone(),
            source: Box::new(e),
        })?;
        bp.node = i;
        breakpoints.push(bp);
    }
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let weight = matrix.get(i, j);
            let keep = match config.edge_rule {
                EdgeRule::Union => {
                    weight > breakpoints[i].threshold.min(breakpoints[j].threshold)
                }
                EdgeRule::LowerIndex => weight > breakpoints[i].threshold,
            };
            if keep {
                edges.push(Edge { i, j, weight });
            }
        }
    }
    Ok((EdgeSet::new(n, edges)?, breakpoints))
}
