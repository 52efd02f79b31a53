//! Discretization, entropy, and normalized mutual information.
//!
//! All entropies are in bits. Normalized MI is `I(X;Y) / H(X,Y)`, which
//! lies in `[0, 1]` and equals 1 exactly for identical non-constant series;
//! the floating-point implementation preserves both properties bit-exactly
//! by summing marginal and joint terms in matching order.

use std::fmt::Write as _;
use std::io;

use crate::error::{Error, Result};
use crate::ingest::ReturnMatrix;
use crate::parallel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinningScheme {
    /// Quantile edges: near-equal occupancy per bin.
    EqualFrequency,
    /// Uniform edges between the sample min and max.
    EqualWidth,
}

impl std::str::FromStr for BinningScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "equal-frequency" => Ok(BinningScheme::EqualFrequency),
            "equal-width" => Ok(BinningScheme::EqualWidth),
            other => Err(Error::InvalidParam(format!(
                "unknown binning scheme {other:?}, expected equal-frequency or equal-width"
            ))),
        }
    }
}

impl std::fmt::Display for BinningScheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BinningScheme::EqualFrequency => "equal-frequency",
            BinningScheme::EqualWidth => "equal-width",
        })
    }
}

/// A real series reduced to bin symbols `0..bin_count`.
///
/// `bin_count` is the effective count after collapsing duplicate edges; a
/// series is degenerate when everything landed in a single bin.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSeries {
    symbols: Vec<u32>,
    bin_count: usize,
    bin_edges: Vec<f64>,
    degenerate: bool,
}

impl DiscreteSeries {
    /// Wraps pre-binned symbols; mainly for tests and external pipelines.
    pub fn from_symbols(symbols: Vec<u32>, bin_count: usize) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::InvalidParam("empty symbol series".into()));
        }
        if bin_count == 0 {
            return Err(Error::InvalidParam("bin count must be positive".into()));
        }
        if let Some(&bad) = symbols.iter().find(|&&s| s as usize >= bin_count) {
            return Err(Error::InvalidParam(format!(
                "symbol {bad} outside 0..{bin_count}"
            )));
        }
        let bin_edges = (0..=bin_count).map(|k| k as f64).collect();
        Ok(Self {
            symbols,
            bin_count,
            bin_edges,
            degenerate: bin_count < 2,
        })
    }

    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn bin_count(&self) -> usize {
        self.bin_count
    }

    pub fn bin_edges(&self) -> &[f64] {
        &self.bin_edges
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }
}

/// Bins a series into at most `bins` symbols.
///
/// The symbol of `x` is the number of interior edges `<= x`, so each bin is
/// right-open except the last. Duplicate quantile edges collapse, which can
/// leave fewer effective bins than requested; a constant series collapses
/// to one bin and is flagged degenerate.
pub fn discretize(values: &[f64], bins: usize, scheme: BinningScheme) -> Result<DiscreteSeries> {
    if values.is_empty() {
        return Err(Error::InvalidParam("empty series".into()));
    }
    if bins == 0 {
        return Err(Error::InvalidParam("bin count must be positive".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParam("non-finite value in series".into()));
    }

    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let (lo, hi) = (sorted[0], sorted[sorted.len() - 1]);
    if lo == hi {
        return Ok(DiscreteSeries {
            symbols: vec![0; values.len()],
            bin_count: 1,
            bin_edges: vec![lo - 0.5, lo + 0.5],
            degenerate: true,
        });
    }

    let mut interior: Vec<f64> = match scheme {
        BinningScheme::EqualFrequency => (1..bins)
            .map(|k| sorted[k * sorted.len() / bins])
            .collect(),
        BinningScheme::EqualWidth => {
            let h = (hi - lo) / bins as f64;
            (1..bins).map(|k| lo + k as f64 * h).collect()
        }
    };
    interior.dedup();
    interior.retain(|e| *e > lo && *e <= hi);

    let symbols = values
        .iter()
        .map(|v| interior.partition_point(|e| e <= v) as u32)
        .collect();
    let bin_count = interior.len() + 1;
    let mut bin_edges = Vec::with_capacity(bin_count + 1);
    bin_edges.push(lo);
    bin_edges.extend_from_slice(&interior);
    bin_edges.push(hi);
    Ok(DiscreteSeries {
        symbols,
        bin_count,
        bin_edges,
        degenerate: bin_count < 2,
    })
}

fn entropy_from_counts(counts: impl IntoIterator<Item = usize>, total: usize) -> f64 {
    let total = total as f64;
    let mut h = 0.0;
    for c in counts {
        if c > 0 {
            let p = c as f64 / total;
            h -= p * p.log2();
        }
    }
    h
}

/// Plug-in Shannon entropy in bits.
pub fn entropy(x: &DiscreteSeries) -> f64 {
    let mut counts = vec![0usize; x.bin_count];
    for &s in &x.symbols {
        counts[s as usize] += 1;
    }
    entropy_from_counts(counts, x.len())
}

/// Joint entropy in bits. Cells are accumulated in the same symbol order as
/// [`entropy`], so `joint_entropy(x, x)` equals `entropy(x)` bit-exactly.
pub fn joint_entropy(x: &DiscreteSeries, y: &DiscreteSeries) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let stride = y.bin_count;
    let mut counts = vec![0usize; x.bin_count * stride];
    for (&sx, &sy) in x.symbols.iter().zip(&y.symbols) {
        counts[sx as usize * stride + sy as usize] += 1;
    }
    Ok(entropy_from_counts(counts, x.len()))
}

/// `I(X;Y) = H(X) + H(Y) - H(X,Y)`, clamped to be non-negative.
pub fn mutual_information(x: &DiscreteSeries, y: &DiscreteSeries) -> Result<f64> {
    let h = joint_entropy(x, y)?;
    Ok(((entropy(x) + entropy(y)) - h).max(0.0))
}

/// `I(X;Y) / H(X,Y)` in `[0, 1]`; zero by convention when `H(X,Y) = 0`.
pub fn normalized_mi(x: &DiscreteSeries, y: &DiscreteSeries) -> Result<f64> {
    let hxy = joint_entropy(x, y)?;
    if hxy == 0.0 {
        return Ok(0.0);
    }
    let i = ((entropy(x) + entropy(y)) - hxy).max(0.0);
    Ok((i / hxy).clamp(0.0, 1.0))
}

/// Metric form `1 - I(X;Y) / H(X,Y)`: 0 for identical series, 1 for
/// independent ones.
pub fn distance(x: &DiscreteSeries, y: &DiscreteSeries) -> Result<f64> {
    Ok(1.0 - normalized_mi(x, y)?)
}

/// Symmetric matrix of pairwise normalized MI with unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct MIMatrix {
    tickers: Vec<String>,
    values: Vec<Vec<f64>>,
    degenerate: Vec<bool>,
    pairs_evaluated: usize,
}

impl MIMatrix {
    /// Validates and normalizes an externally supplied matrix: entries must
    /// be in `[0, 1]` and symmetric with unit diagonal, all within `1e-12`.
    /// Stored values are clamped, mirrored from the upper triangle, and the
    /// diagonal is set to exactly 1.
    pub fn from_values(tickers: Vec<String>, mut values: Vec<Vec<f64>>) -> Result<Self> {
        let n = tickers.len();
        if n < 2 {
            return Err(Error::MatrixFormat(format!("need at least 2 tickers, got {n}")));
        }
        if values.len() != n || values.iter().any(|r| r.len() != n) {
            return Err(Error::MatrixFormat(format!("matrix is not {n}x{n}")));
        }
        for (i, row) in values.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() || !(-1e-12..=1.0 + 1e-12).contains(&v) {
                    return Err(Error::MatrixFormat(format!("entry ({i}, {j}) = {v} outside [0, 1]")));
                }
            }
            if (row[i] - 1.0).abs() > 1e-12 {
                return Err(Error::MatrixFormat(format!(
                    "diagonal entry ({i}, {i}) = {} is not 1",
                    row[i]
                )));
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if (values[i][j] - values[j][i]).abs() > 1e-12 {
                    return Err(Error::MatrixFormat(format!(
                        "asymmetric at ({i}, {j}): {} vs {}",
                        values[i][j], values[j][i]
                    )));
                }
            }
        }
        for i in 0..n {
            values[i][i] = 1.0;
            for j in (i + 1)..n {
                let v = values[i][j].clamp(0.0, 1.0);
                values[i][j] = v;
                values[j][i] = v;
            }
        }
        Ok(Self {
            tickers,
            values,
            degenerate: vec![false; n],
            pairs_evaluated: 0,
        })
    }

    pub fn n(&self) -> usize {
        self.tickers.len()
    }

    pub fn tickers(&self) -> &[String] {
        &self.tickers
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    /// True when series `i` collapsed to a single bin (its MI row is 0).
    pub fn is_degenerate(&self, i: usize) -> bool {
        self.degenerate[i]
    }

    pub fn degenerate_tickers(&self) -> Vec<&str> {
        self.tickers
            .iter()
            .zip(&self.degenerate)
            .filter(|(_, d)| **d)
            .map(|(t, _)| t.as_str())
            .collect()
    }

    /// Unordered pairs scored by the last computation (0 for imported data).
    pub fn pairs_evaluated(&self) -> usize {
        self.pairs_evaluated
    }

    /// Off-diagonal entries of row `i`, ascending.
    pub fn row_off_diag_sorted(&self, i: usize) -> Vec<f64> {
        let mut row: Vec<f64> = self.values[i]
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, v)| *v)
            .collect();
        row.sort_unstable_by(f64::total_cmp);
        row
    }

    /// CSV with a `ticker` label column and 12-significant-digit entries.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("ticker");
        for t in &self.tickers {
            out.push(',');
            out.push_str(t);
        }
        out.push('\n');
        for (t, row) in self.tickers.iter().zip(&self.values) {
            out.push_str(t);
            for v in row {
                let _ = write!(out, ",{v:.11e}");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(reader: impl io::Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| Error::MatrixFormat(e.to_string()))?;
        if headers.get(0) != Some("ticker") {
            return Err(Error::MatrixFormat("expected leading ticker column".into()));
        }
        let tickers: Vec<String> = headers.iter().skip(1).map(str::to_owned).collect();
        let mut values = Vec::with_capacity(tickers.len());
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::MatrixFormat(e.to_string()))?;
            if rec.len() != tickers.len() + 1 {
                return Err(Error::MatrixFormat(format!(
                    "row {i} has {} fields, expected {}",
                    rec.len(),
                    tickers.len() + 1
                )));
            }
            if rec.get(0) != tickers.get(i).map(String::as_str) {
                return Err(Error::MatrixFormat(format!(
                    "row {i} label {:?} does not match header order",
                    rec.get(0).unwrap_or("")
                )));
            }
            let row = rec
                .iter()
                .skip(1)
                .map(|f| {
                    f.parse::<f64>()
                        .map_err(|_| Error::MatrixFormat(format!("bad number {f:?} in row {i}")))
                })
                .collect::<Result<Vec<f64>>>()?;
            values.push(row);
        }
        if values.len() != tickers.len() {
            return Err(Error::MatrixFormat(format!(
                "{} rows for {} tickers",
                values.len(),
                tickers.len()
            )));
        }
        Self::from_values(tickers, values)
    }
}

fn check_pair_count(returns: &ReturnMatrix) -> Result<()> {
    if returns.n() < 2 {
        return Err(Error::InvalidParam(format!(
            "need at least 2 series, got {}",
            returns.n()
        )));
    }
    Ok(())
}

fn assemble(
    returns: &ReturnMatrix,
    series: Vec<DiscreteSeries>,
    pair_values: Vec<f64>,
    pairs: &[(usize, usize)],
) -> MIMatrix {
    let n = returns.n();
    let mut values = vec![vec![0.0; n]; n];
    for i in 0..n {
        values[i][i] = 1.0;
    }
    for (&(i, j), v) in pairs.iter().zip(&pair_values) {
        values[i][j] = *v;
        values[j][i] = *v;
    }
    MIMatrix {
        tickers: returns.tickers().to_vec(),
        values,
        degenerate: series.iter().map(DiscreteSeries::is_degenerate).collect(),
        pairs_evaluated: pairs.len(),
    }
}

fn upper_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            pairs.push((i, j));
        }
    }
    pairs
}

/// Pairwise normalized MI over all rows; each unordered pair is scored once
/// and mirrored. Runs on rayon under the `parallel` feature.
pub fn mi_matrix(returns: &ReturnMatrix, bins: usize, scheme: BinningScheme) -> Result<MIMatrix> {
    check_pair_count(returns)?;
    let series: Vec<DiscreteSeries> =
        parallel::map_slice(returns.rows(), |row| discretize(row, bins, scheme))
            .into_iter()
            .collect::<Result<_>>()?;
    let pairs = upper_pairs(returns.n());
    let values = parallel::map_slice(&pairs, |&(i, j)| {
        normalized_mi(&series[i], &series[j]).expect("rows share a common length")
    });
    Ok(assemble(returns, series, values, &pairs))
}

/// Single-threaded [`mi_matrix`]; produces identical results.
pub fn mi_matrix_seq(
    returns: &ReturnMatrix,
    bins: usize,
    scheme: BinningScheme,
) -> Result<MIMatrix> {
    check_pair_count(returns)?;
    let series: Vec<DiscreteSeries> =
        parallel::map_slice_seq(returns.rows(), |row| discretize(row, bins, scheme))
            .into_iter()
            .collect::<Result<_>>()?;
    let pairs = upper_pairs(returns.n());
    let values = parallel::map_slice_seq(&pairs, |&(i, j)| {
        normalized_mi(&series[i], &series[j]).expect("rows share a common length")
    });
    Ok(assemble(returns, series, values, &pairs))
}
