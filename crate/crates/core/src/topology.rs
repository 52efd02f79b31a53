//! Topology of a filtered network: degree law, clustering, cliques,
//! disparity, and parameter sweeps.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::filtration::{cmlm_network, cmlm_network_seq, global_threshold, EdgeSet, FiltrationConfig};
use crate::infotheory::MIMatrix;
use crate::ingest::SectorMap;
use crate::parallel;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeStats {
    /// Mean degree over all nodes, isolated ones included.
    pub avg_degree: f64,
    /// `histogram[k]` counts nodes of degree `k`.
    pub histogram: Vec<usize>,
    /// Nodes of degree zero.
    pub excluded: usize,
}

pub fn degree_stats(edges: &EdgeSet) -> DegreeStats {
    let degrees = edges.degrees();
    let max = degrees.iter().copied().max().unwrap_or(0);
    let mut histogram = vec![0usize; max + 1];
    for &d in &degrees {
        histogram[d] += 1;
    }
    DegreeStats {
        avg_degree: 2.0 * edges.len() as f64 / edges.n() as f64,
        excluded: histogram[0],
        histogram,
    }
}

/// Discrete power-law fit of a degree sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawFit {
    /// Continuous-approximation MLE `1 + n / sum(ln(k / (k_min - 1/2)))`.
    pub gamma_mle: f64,
    /// Asymptotic standard error `(gamma_mle - 1) / sqrt(n)`.
    pub std_error: f64,
    /// Least-squares slope of the empirical log-log degree distribution.
    pub gamma_ls: f64,
    pub k_min: usize,
    pub n_tail: usize,
    scale_free: bool,
}

impl PowerLawFit {
    /// True when the MLE exponent lies strictly inside `(2, 3)`.
    pub fn is_scale_free(&self) -> bool {
        self.scale_free
    }
}

/// Fits `p(k) ~ k^-gamma` to the positive degrees at or above `k_min`
/// (defaulting to the smallest positive degree). Needs at least 10 tail
/// degrees, not all equal.
pub fn powerlaw_gamma(degrees: &[usize], k_min: Option<usize>) -> Result<PowerLawFit> {
    let positive: Vec<usize> = degrees.iter().copied().filter(|&d| d > 0).collect();
    let k_min = k_min.unwrap_or_else(|| positive.iter().copied().min().unwrap_or(1)).max(1);
    let tail: Vec<usize> = positive.into_iter().filter(|&d| d >= k_min).collect();
    if tail.len() < 10 {
        return Err(Error::TooFewDegrees {
            got: tail.len(),
            need: 10,
        });
    }

    let n = tail.len() as f64;
    let shift = k_min as f64 - 0.5;
    let log_sum: f64 = tail.iter().map(|&k| (k as f64 / shift).ln()).sum();
    let gamma_mle = 1.0 + n / log_sum;
    let std_error = (gamma_mle - 1.0) / n.sqrt();

    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &k in &tail {
        *counts.entry(k).or_insert(0) += 1;
    }
    if counts.len() < 2 {
        return Err(Error::DegenerateDegrees);
    }
    let points: Vec<(f64, f64)> = counts
        .iter()
        .map(|(&k, &c)| ((k as f64).ln(), (c as f64 / n).ln()))
        .collect();
    let gamma_ls = -ls_slope(&points);

    Ok(PowerLawFit {
        gamma_mle,
        std_error,
        gamma_ls,
        k_min,
        n_tail: tail.len(),
        scale_free: gamma_mle > 2.0 && gamma_mle < 3.0,
    })
}

fn ls_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in points {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

fn sorted_common_above(a: &[usize], b: &[usize], floor: usize) -> usize {
    let mut count = 0;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                if a[i] > floor {
                    count += 1;
                }
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// Global transitivity: `3 * triangles / connected triples`, zero for a
/// graph with no connected triple.
pub fn clustering_coefficient(edges: &EdgeSet) -> f64 {
    let adj = edges.adjacency();
    let mut triangles = 0usize;
    for e in edges.edges() {
        // Common neighbors above j close each triangle exactly once.
        triangles += sorted_common_above(&adj[e.i], &adj[e.j], e.j);
    }
    let triples: usize = adj.iter().map(|a| a.len() * a.len().saturating_sub(1) / 2).sum();
    if triples == 0 {
        0.0
    } else {
        3.0 * triangles as f64 / triples as f64
    }
}

/// Mean over all nodes of the local clustering coefficient, counting
/// degree-0 and degree-1 nodes as zero.
pub fn average_local_clustering(edges: &EdgeSet) -> f64 {
    let adj = edges.adjacency();
    if adj.is_empty() {
        return 0.0;
    }
    let mut total = 0.0;
    for nbrs in &adj {
        let d = nbrs.len();
        if d < 2 {
            continue;
        }
        let mut links = 0usize;
        for (a, &u) in nbrs.iter().enumerate() {
            for &v in &nbrs[a + 1..] {
                if edges.contains(u, v) {
                    links += 1;
                }
            }
        }
        total += 2.0 * links as f64 / (d * (d - 1)) as f64;
    }
    total / adj.len() as f64
}

/// All maximal cliques of size 3 or more, via Bron-Kerbosch with pivoting.
/// Members are ascending and the cliques sorted lexicographically.
pub fn maximal_cliques(edges: &EdgeSet) -> Vec<Vec<usize>> {
    let adj = edges.adjacency();
    let mut out = Vec::new();
    let mut current = Vec::new();
    let candidates: Vec<usize> = (0..edges.n()).collect();
    bron_kerbosch(&adj, &mut current, candidates, Vec::new(), &mut out);
    out.retain(|c| c.len() >= 3);
    out.sort();
    out
}

fn intersect_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn bron_kerbosch(
    adj: &[Vec<usize>],
    current: &mut Vec<usize>,
    mut candidates: Vec<usize>,
    mut excluded: Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if candidates.is_empty() && excluded.is_empty() {
        let mut clique = current.clone();
        clique.sort_unstable();
        out.push(clique);
        return;
    }
    // Pivot on the vertex covering most candidates to prune branches.
    let pivot = candidates
        .iter()
        .chain(excluded.iter())
        .copied()
        .max_by_key(|&v| intersect_sorted(&adj[v], &candidates).len())
        .expect("candidate or excluded set is nonempty");
    let branch: Vec<usize> = candidates
        .iter()
        .copied()
        .filter(|v| adj[pivot].binary_search(v).is_err())
        .collect();
    for v in branch {
        current.push(v);
        bron_kerbosch(
            adj,
            current,
            intersect_sorted(&candidates, &adj[v]),
            intersect_sorted(&excluded, &adj[v]),
            out,
        );
        current.pop();
        let pos = candidates.binary_search(&v).expect("v drawn from candidates");
        candidates.remove(pos);
        let pos = excluded.binary_search(&v).unwrap_err();
        excluded.insert(pos, v);
    }
}

/// Concentration of node `i`'s in-clique weight: `sum_j (w_ij / s_i)^2`
/// over the other members. 1 when one neighbor dominates, `1/(m-1)` when
/// weights are equal.
pub fn disparity(node: usize, clique: &[usize], matrix: &MIMatrix) -> Result<f64> {
    if clique.len() < 2 {
        return Err(Error::InvalidParam(format!(
            "clique of {} members has no disparity",
            clique.len()
        )));
    }
    if !clique.contains(&node) {
        return Err(Error::InvalidParam(format!("node {node} not in clique")));
    }
    if clique.iter().any(|&j| j >= matrix.n()) {
        return Err(Error::InvalidParam("clique member outside matrix".into()));
    }
    let strength: f64 = clique
        .iter()
        .filter(|&&j| j != node)
        .map(|&j| matrix.get(node, j))
        .sum();
    if strength == 0.0 {
        return Err(Error::ZeroWeightSum { node });
    }
    Ok(clique
        .iter()
        .filter(|&&j| j != node)
        .map(|&j| {
            let share = matrix.get(node, j) / strength;
            share * share
        })
        .sum())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CliqueReport {
    pub members: Vec<String>,
    pub size: usize,
    /// Mean similarity over member pairs.
    pub avg_mi: f64,
    /// Mean member disparity.
    pub disparity: f64,
    /// Sector tally of the members, when sector data is present.
    pub sectors: BTreeMap<String, usize>,
}

pub fn clique_report(
    clique: &[usize],
    matrix: &MIMatrix,
    sectors: &SectorMap,
) -> Result<CliqueReport> {
    if clique.len() < 2 {
        return Err(Error::InvalidParam(format!(
            "clique of {} members has no pair statistics",
            clique.len()
        )));
    }
    let mut members = clique.to_vec();
    members.sort_unstable();
    let mut mi_sum = 0.0;
    let mut pairs = 0usize;
    for (a, &i) in members.iter().enumerate() {
        for &j in &members[a + 1..] {
            mi_sum += matrix.get(i, j);
            pairs += 1;
        }
    }
    let mut disparity_sum = 0.0;
    for &i in &members {
        disparity_sum += disparity(i, &members, matrix)?;
    }
    let mut tally = BTreeMap::new();
    let member_names: Vec<String> = members
        .iter()
        .map(|&i| matrix.tickers()[i].clone())
        .collect();
    for name in &member_names {
        if let Some(info) = sectors.get(name) {
            *tally.entry(info.sector.clone()).or_insert(0) += 1;
        }
    }
    Ok(CliqueReport {
        size: members.len(),
        avg_mi: mi_sum / pairs as f64,
        disparity: disparity_sum / members.len() as f64,
        sectors: tally,
        members: member_names,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClusteringKind {
    Global,
    AverageLocal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopologyReport {
    pub nodes: usize,
    pub edges: usize,
    pub avg_degree: f64,
    pub excluded: usize,
    pub degree_histogram: Vec<usize>,
    pub clustering: f64,
    pub clustering_kind: ClusteringKind,
    pub gamma: Option<PowerLawFit>,
    /// Why `gamma` is absent, when it is.
    pub gamma_error: Option<String>,
}

pub fn topology_report(
    edges: &EdgeSet,
    k_min: Option<usize>,
    clustering_kind: ClusteringKind,
) -> TopologyReport {
    let stats = degree_stats(edges);
    let clustering = match clustering_kind {
        ClusteringKind::Global => clustering_coefficient(edges),
        ClusteringKind::AverageLocal => average_local_clustering(edges),
    };
    let (gamma, gamma_error) = match powerlaw_gamma(&edges.degrees(), k_min) {
        Ok(fit) => (Some(fit), None),
        Err(e) => (None, Some(e.to_string())),
    };
    TopologyReport {
        nodes: edges.n(),
        edges: edges.len(),
        avg_degree: stats.avg_degree,
        excluded: stats.excluded,
        degree_histogram: stats.histogram,
        clustering,
        clustering_kind,
        gamma,
        gamma_error,
    }
}

/// Which knob a sweep turns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMethod {
    /// Grid of global thresholds.
    Threshold,
    /// Grid of penalty weights for the penalized breakpoint method.
    Cmlm,
}

impl std::str::FromStr for SweepMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "threshold" => Ok(SweepMethod::Threshold),
            "cmlm" => Ok(SweepMethod::Cmlm),
            other => Err(Error::InvalidParam(format!(
                "unknown sweep method {other:?}, expected threshold or cmlm"
            ))),
        }
    }
}

impl std::fmt::Display for SweepMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SweepMethod::Threshold => "threshold",
            SweepMethod::Cmlm => "cmlm",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOptions {
    pub filtration: FiltrationConfig,
    /// Penalty exponent for [`SweepMethod::Cmlm`].
    pub q: f64,
    pub k_min: Option<usize>,
    pub clustering: ClusteringKind,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            filtration: FiltrationConfig::default(),
            q: 2.0,
            k_min: None,
            clustering: ClusteringKind::Global,
        }
    }
}

/// One grid point of a sweep. Cells are `None` when that statistic could
/// not be computed at this parameter; `note` says why.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub param: f64,
    pub avg_degree: Option<f64>,
    pub excluded: Option<usize>,
    pub gamma_mle: Option<f64>,
    pub gamma_ls: Option<f64>,
    pub clustering: Option<f64>,
    pub edge_count: Option<usize>,
    pub note: Option<String>,
}

fn check_grid(method: SweepMethod, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidParam("empty parameter grid".into()));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParam(
            "parameter grid must be strictly ascending".into(),
        ));
    }
    let valid = match method {
        SweepMethod::Threshold => (0.0..=1.0).contains(&grid[0]) && (0.0..=1.0).contains(&grid[grid.len() - 1]),
        SweepMethod::Cmlm => (0.0..1.0).contains(&grid[0]) && (0.0..1.0).contains(&grid[grid.len() - 1]),
    };
    if !valid {
        return Err(Error::InvalidParam(format!(
            "grid values out of range for {method} sweep"
        )));
    }
    Ok(())
}

fn sweep_row(
    matrix: &MIMatrix,
    method: SweepMethod,
    param: f64,
    options: &SweepOptions,
    sequential: bool,
) -> SweepRow {
    let built = match method {
        SweepMethod::Threshold => global_threshold(matrix, param),
        SweepMethod::Cmlm if sequential => {
            cmlm_network_seq(matrix, param, options.q, &options.filtration).map(|(e, _)| e)
        }
        SweepMethod::Cmlm => {
            cmlm_network(matrix, param, options.q, &options.filtration).map(|(e, _)| e)
        }
    };
    let edges = match built {
        Ok(e) => e,
        Err(e) => {
            return SweepRow {
                param,
                avg_degree: None,
                excluded: None,
                gamma_mle: None,
                gamma_ls: None,
                clustering: None,
                edge_count: None,
                note: Some(e.to_string()),
            }
        }
    };
    let stats = degree_stats(&edges);
    let clustering = match options.clustering {
        ClusteringKind::Global => clustering_coefficient(&edges),
        ClusteringKind::AverageLocal => average_local_clustering(&edges),
    };
    let (gamma, note) = match powerlaw_gamma(&edges.degrees(), options.k_min) {
        Ok(fit) => (Some(fit), None),
        Err(e) => (None, Some(e.to_string())),
    };
    SweepRow {
        param,
        avg_degree: Some(stats.avg_degree),
        excluded: Some(stats.excluded),
        gamma_mle: gamma.map(|g| g.gamma_mle),
        gamma_ls: gamma.map(|g| g.gamma_ls),
        clustering: Some(clustering),
        edge_count: Some(edges.len()),
        note,
    }
}

/// Network statistics across a parameter grid (ascending). Rows where the
/// network could not be built carry a note instead of numbers. Runs on
/// rayon under the `parallel` feature.
pub fn sweep(
    matrix: &MIMatrix,
    method: SweepMethod,
    grid: &[f64],
    options: &SweepOptions,
) -> Result<Vec<SweepRow>> {
    check_grid(method, grid)?;
    options.filtration.validate()?;
    Ok(parallel::map_slice(grid, |&p| {
        sweep_row(matrix, method, p, options, false)
    }))
}

/// Single-threaded [`sweep`]; produces identical results.
pub fn sweep_seq(
    matrix: &MIMatrix,
    method: SweepMethod,
    grid: &[f64],
    options: &SweepOptions,
) -> Result<Vec<SweepRow>> {
    check_grid(method, grid)?;
    options.filtration.validate()?;
    Ok(parallel::map_slice_seq(grid, |&p| {
        sweep_row(matrix, method, p, options, true)
    }))
}

/// CSV for sweep rows; `None` cells print empty.
pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    fn cell<T: std::fmt::Display>(v: &Option<T>) -> String {
        v.as_ref().map(ToString::to_string).unwrap_or_default()
    }
    let mut out = String::from("param,avg_degree,excluded,gamma_mle,gamma_ls,clustering,edge_count\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.param,
            cell(&r.avg_degree),
            cell(&r.excluded),
            cell(&r.gamma_mle),
            cell(&r.gamma_ls),
            cell(&r.clustering),
            cell(&r.edge_count),
        );
    }
    out
}
