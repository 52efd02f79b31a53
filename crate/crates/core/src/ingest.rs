//! Price/sector input, log returns, and synthetic block-correlated fixtures.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Closing prices for `n` tickers over `T` dates, row-major.
///
/// Invariants: every row has one price per date, all prices are finite and
/// strictly positive, tickers and dates are unique, `T >= 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceMatrix {
    tickers: Vec<String>,
    dates: Vec<String>,
    prices: Vec<Vec<f64>>,
}

impl PriceMatrix {
    pub fn new(tickers: Vec<String>, dates: Vec<String>, prices: Vec<Vec<f64>>) -> Result<Self> {
        if tickers.is_empty() {
            return Err(Error::InvalidParam("no tickers".into()));
        }
        if dates.len() < 2 {
            return Err(Error::InvalidParam(format!(
                "need at least 2 dates, got {}",
                dates.len()
            )));
        }
        if prices.len() != tickers.len() {
            return Err(Error::LengthMismatch {
                left: prices.len(),
                right: tickers.len(),
            });
        }
        let mut seen = HashMap::new();
        for (i, t) in tickers.iter().enumerate() {
            if seen.insert(t.clone(), i).is_some() {
                return Err(Error::DuplicateTicker { ticker: t.clone() });
            }
        }
        let mut seen_dates = HashMap::new();
        for (i, d) in dates.iter().enumerate() {
            if seen_dates.insert(d.clone(), i).is_some() {
                return Err(Error::InvalidParam(format!("duplicate date {d}")));
            }
        }
        for (row, ticker) in prices.iter().zip(&tickers) {
            if row.len() != dates.len() {
                return Err(Error::LengthMismatch {
                    left: row.len(),
                    right: dates.len(),
                });
            }
            for (p, date) in row.iter().zip(&dates) {
                if !p.is_finite() || *p <= 0.0 {
                    return Err(Error::NonPositivePrice {
                        ticker: ticker.clone(),
                        date: date.clone(),
                        value: *p,
                    });
                }
            }
        }
        Ok(Self {
            tickers,
            dates,
            prices,
        })
    }

    pub fn tickers(&self) -> &[String] {
        &self.tickers
    }

    pub fn dates(&self) -> &[String] {
        &self.dates
    }

    pub fn n(&self) -> usize {
        self.tickers.len()
    }

    pub fn observations(&self) -> usize {
        self.dates.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.prices[i]
    }

    /// Wide CSV (`ticker,<date>,...`), one row per ticker. Prices print in
    /// shortest round-trip form so re-parsing reproduces the matrix exactly.
    pub fn to_wide_csv(&self) -> String {
        let mut out = String::from("ticker");
        for d in &self.dates {
            out.push(',');
            out.push_str(d);
        }
        out.push('\n');
        for (ticker, row) in self.tickers.iter().zip(&self.prices) {
            out.push_str(ticker);
            for p in row {
                let _ = write!(out, ",{p}");
            }
            out.push('\n');
        }
        out
    }
}

/// Log returns for `n` tickers over `T - 1` periods, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnMatrix {
    tickers: Vec<String>,
    returns: Vec<Vec<f64>>,
}

impl ReturnMatrix {
    pub fn new(tickers: Vec<String>, returns: Vec<Vec<f64>>) -> Result<Self> {
        if tickers.len() != returns.len() {
            return Err(Error::LengthMismatch {
                left: tickers.len(),
                right: returns.len(),
            });
        }
        if let Some(first) = returns.first() {
            let len = first.len();
            if len == 0 {
                return Err(Error::InvalidParam("empty return series".into()));
            }
            for row in &returns {
                if row.len() != len {
                    return Err(Error::LengthMismatch {
                        left: row.len(),
                        right: len,
                    });
                }
            }
        }
        Ok(Self { tickers, returns })
    }

    pub fn tickers(&self) -> &[String] {
        &self.tickers
    }

    pub fn n(&self) -> usize {
        self.tickers.len()
    }

    pub fn observations(&self) -> usize {
        self.returns.first().map_or(0, Vec::len)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.returns[i]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.returns
    }
}

/// How price CSV columns are laid out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsvLayout {
    /// One row per ticker: `ticker,<date1>,<date2>,...`
    Wide,
    /// One row per observation: `date,ticker,close`
    Long,
}

impl std::str::FromStr for CsvLayout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wide" => Ok(CsvLayout::Wide),
            "long" => Ok(CsvLayout::Long),
            other => Err(Error::InvalidParam(format!(
                "unknown layout {other:?}, expected wide or long"
            ))),
        }
    }
}

/// What to do when a ticker is missing some observations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MissingPolicy {
    /// Reject the file, naming the first gap.
    Error,
    /// Drop every ticker with an incomplete series.
    DropIncomplete,
}

pub fn load_prices(path: &Path, layout: CsvLayout) -> Result<PriceMatrix> {
    let (m, _) = load_prices_with(path, layout, MissingPolicy::Error)?;
    Ok(m)
}

/// Returns the matrix plus the tickers dropped under
/// [`MissingPolicy::DropIncomplete`] (always empty under `Error`).
pub fn load_prices_with(
    path: &Path,
    layout: CsvLayout,
    missing: MissingPolicy,
) -> Result<(PriceMatrix, Vec<String>)> {
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_prices(io::BufReader::new(file), layout, missing, path)
}

pub fn parse_prices(
    reader: impl io::Read,
    layout: CsvLayout,
    missing: MissingPolicy,
    path: &Path,
) -> Result<(PriceMatrix, Vec<String>)> {
    match layout {
        CsvLayout::Wide => parse_wide(reader, missing, path),
        CsvLayout::Long => parse_long(reader, missing, path),
    }
}

fn csv_err(path: &Path, source: csv::Error) -> Error {
    Error::Csv {
        path: path.to_owned(),
        source,
    }
}

fn record_line(rec: &csv::StringRecord) -> u64 {
    rec.position().map_or(0, csv::Position::line)
}

fn parse_price_field(
    field: &str,
    ticker: &str,
    date: &str,
    path: &Path,
    line: u64,
) -> Result<f64> {
    let value: f64 = field.trim().parse().map_err(|_| Error::MalformedInput {
        path: path.to_owned(),
        line,
        message: format!("unparseable price {field:?} for {ticker} at {date}"),
    })?;
    if !value.is_finite() || value <= 0.0 {
        return Err(Error::NonPositivePrice {
            ticker: ticker.to_owned(),
            date: date.to_owned(),
            value,
        });
    }
    Ok(value)
}

fn parse_wide(
    reader: impl io::Read,
    missing: MissingPolicy,
    path: &Path,
) -> Result<(PriceMatrix, Vec<String>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers().map_err(|e| csv_err(path, e))?.clone();
    if headers.len() < 3 || headers.get(0) != Some("ticker") {
        return Err(Error::MalformedInput {
            path: path.to_owned(),
            line: 1,
            message: "expected header ticker,<date>,... with at least two dates".into(),
        });
    }
    let dates: Vec<String> = headers.iter().skip(1).map(str::to_owned).collect();

    let mut tickers = Vec::new();
    let mut prices = Vec::new();
    let mut dropped = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let line = record_line(&rec);
        if rec.len() != dates.len() + 1 {
            return Err(Error::MalformedInput {
                path: path.to_owned(),
                line,
                message: format!("expected {} fields, got {}", dates.len() + 1, rec.len()),
            });
        }
        let ticker = rec.get(0).unwrap_or("").to_owned();
        if ticker.is_empty() {
            return Err(Error::MalformedInput {
                path: path.to_owned(),
                line,
                message: "empty ticker".into(),
            });
        }
        let mut row = Vec::with_capacity(dates.len());
        let mut gap = None;
        for (field, date) in rec.iter().skip(1).zip(&dates) {
            if field.is_empty() {
                gap = Some(Error::MissingObservation {
                    ticker: ticker.clone(),
                    date: date.clone(),
                });
                break;
            }
            row.push(parse_price_field(field, &ticker, date, path, line)?);
        }
        match gap {
            Some(err) => match missing {
                MissingPolicy::Error => return Err(err),
                MissingPolicy::DropIncomplete => dropped.push(ticker),
            },
            None => {
                tickers.push(ticker);
                prices.push(row);
            }
        }
    }
    Ok((PriceMatrix::new(tickers, dates, prices)?, dropped))
}

fn parse_long(
    reader: impl io::Read,
    missing: MissingPolicy,
    path: &Path,
) -> Result<(PriceMatrix, Vec<String>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers().map_err(|e| csv_err(path, e))?;
    let expected = ["date", "ticker", "close"];
    if headers.len() != 3 || !headers.iter().eq(expected) {
        return Err(Error::MalformedInput {
            path: path.to_owned(),
            line: 1,
            message: "expected header date,ticker,close".into(),
        });
    }

    // First-appearance order for both axes keeps output deterministic.
    let mut tickers: Vec<String> = Vec::new();
    let mut dates: Vec<String> = Vec::new();
    let mut ticker_ix: HashMap<String, usize> = HashMap::new();
    let mut date_ix: HashMap<String, usize> = HashMap::new();
    let mut cells: HashMap<(usize, usize), f64> = HashMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let line = record_line(&rec);
        if rec.len() != 3 {
            return Err(Error::MalformedInput {
                path: path.to_owned(),
                line,
                message: format!("expected 3 fields, got {}", rec.len()),
            });
        }
        let (date, ticker, field) = (&rec[0], &rec[1], &rec[2]);
        if date.is_empty() || ticker.is_empty() {
            return Err(Error::MalformedInput {
                path: path.to_owned(),
                line,
                message: "empty date or ticker".into(),
            });
        }
        let ti = *ticker_ix.entry(ticker.to_owned()).or_insert_with(|| {
            tickers.push(ticker.to_owned());
            tickers.len() - 1
        });
        let di = *date_ix.entry(date.to_owned()).or_insert_with(|| {
            dates.push(date.to_owned());
            dates.len() - 1
        });
        let value = parse_price_field(field, ticker, date, path, line)?;
        if cells.insert((ti, di), value).is_some() {
            return Err(Error::DuplicateObservation {
                ticker: ticker.to_owned(),
                date: date.to_owned(),
            });
        }
    }

    let mut kept_tickers = Vec::new();
    let mut prices = Vec::new();
    let mut dropped = Vec::new();
    'tickers: for (ti, ticker) in tickers.iter().enumerate() {
        let mut row = Vec::with_capacity(dates.len());
        for (di, date) in dates.iter().enumerate() {
            match cells.get(&(ti, di)) {
                Some(v) => row.push(*v),
                None => match missing {
                    MissingPolicy::Error => {
                        return Err(Error::MissingObservation {
                            ticker: ticker.clone(),
                            date: date.clone(),
                        })
                    }
                    MissingPolicy::DropIncomplete => {
                        dropped.push(ticker.clone());
                        continue 'tickers;
                    }
                },
            }
        }
        kept_tickers.push(ticker.clone());
        prices.push(row);
    }
    Ok((PriceMatrix::new(kept_tickers, dates, prices)?, dropped))
}

/// Natural-log returns: `r[i][t] = ln(p[i][t+1] / p[i][t])`.
pub fn log_returns(prices: &PriceMatrix) -> ReturnMatrix {
    let returns = prices
        .prices
        .iter()
        .map(|row| row.windows(2).map(|w| (w[1] / w[0]).ln()).collect())
        .collect();
    ReturnMatrix {
        tickers: prices.tickers.clone(),
        returns,
    }
}

/// Sector codes with their plot colors.
pub const SECTOR_PALETTE: [(&str, &str); 13] = [
    ("FI", "red"),
    ("ETGW", "brown"),
    ("TWP", "white"),
    ("MA", "purple"),
    ("MINI", "gray"),
    ("RE", "black"),
    ("IT", "blue"),
    ("CO", "orange"),
    ("WR", "pink"),
    ("CSE", "mauve"),
    ("AFAH", "plum"),
    ("CI", "turquoise"),
    ("LBS", "yellow"),
];

pub fn palette_color(sector: &str) -> Option<&'static str> {
    SECTOR_PALETTE
        .iter()
        .find(|(code, _)| *code == sector)
        .map(|(_, color)| *color)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorInfo {
    pub sector: String,
    pub color: String,
}

/// Ticker-to-sector assignment covering a roster.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SectorMap {
    assignments: HashMap<String, SectorInfo>,
}

impl SectorMap {
    /// Builds a map from `(ticker, sector, explicit color)` rows, keeping
    /// only roster tickers. Every roster ticker must be assigned; sectors
    /// outside the palette need an explicit color.
    pub fn from_rows<I>(rows: I, roster: &[String]) -> Result<Self>
    where
        I: IntoIterator<Item = (String, String, Option<String>)>,
    {
        let mut assignments = HashMap::new();
        for (ticker, sector, color) in rows {
            if !roster.contains(&ticker) {
                continue;
            }
            let color = match color {
                Some(c) => c,
                None => palette_color(&sector)
                    .ok_or_else(|| Error::UnknownSector {
                        ticker: ticker.clone(),
                        sector: sector.clone(),
                    })?
                    .to_owned(),
            };
            if assignments
                .insert(ticker.clone(), SectorInfo { sector, color })
                .is_some()
            {
                return Err(Error::DuplicateTicker { ticker });
            }
        }
        let mut missing: Vec<String> = roster
            .iter()
            .filter(|t| !assignments.contains_key(*t))
            .cloned()
            .collect();
        if !missing.is_empty() {
            missing.sort();
            return Err(Error::MissingSectors { tickers: missing });
        }
        Ok(Self { assignments })
    }

    pub fn get(&self, ticker: &str) -> Option<&SectorInfo> {
        self.assignments.get(ticker)
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    /// CSV with one `ticker,sector,color` row per roster entry, roster order.
    pub fn to_csv(&self, roster: &[String]) -> String {
        let mut out = String::from("ticker,sector,color\n");
        for ticker in roster {
            if let Some(info) = self.get(ticker) {
                let _ = writeln!(out, "{ticker},{},{}", info.sector, info.color);
            }
        }
        out
    }
}

/// Reads `ticker,sector[,color]` CSV and checks it covers the roster.
pub fn load_sectors(path: &Path, roster: &[String]) -> Result<SectorMap> {
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_sectors(io::BufReader::new(file), roster, path)
}

pub fn parse_sectors(reader: impl io::Read, roster: &[String], path: &Path) -> Result<SectorMap> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let headers = rdr.headers().map_err(|e| csv_err(path, e))?;
    let ok = headers.len() >= 2
        && headers.get(0) == Some("ticker")
        && headers.get(1) == Some("sector")
        && (headers.len() == 2 || headers.get(2) == Some("color"));
    if !ok {
        return Err(Error::MalformedInput {
            path: path.to_owned(),
            line: 1,
            message: "expected header ticker,sector[,color]".into(),
        });
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let line = record_line(&rec);
        if rec.len() < 2 || rec.len() > 3 {
            return Err(Error::MalformedInput {
                path: path.to_owned(),
                line,
                message: format!("expected 2 or 3 fields, got {}", rec.len()),
            });
        }
        let color = rec.get(2).filter(|c| !c.is_empty()).map(str::to_owned);
        rows.push((rec[0].to_owned(), rec[1].to_owned(), color));
    }
    SectorMap::from_rows(rows, roster)
}

/// Synthetic block-correlated returns from a one-factor-per-block model.
///
/// Series `i` in block `b` is `sqrt(inter)*g + sqrt(intra[b]-inter)*f_b +
/// sqrt(1-intra[b])*e_i` with independent standard normals, so any two
/// series in block `b` have correlation `intra[b]` and series in different
/// blocks have correlation `inter`. Identical arguments produce
/// bit-identical output.
pub fn gen_block_returns(
    block_sizes: &[usize],
    intra: &[f64],
    inter: f64,
    observations: usize,
    seed: u64,
) -> Result<ReturnMatrix> {
    if block_sizes.is_empty() || block_sizes.contains(&0) {
        return Err(Error::InvalidParam(
            "block sizes must be nonempty and positive".into(),
        ));
    }
    if intra.len() != block_sizes.len() {
        return Err(Error::LengthMismatch {
            left: intra.len(),
            right: block_sizes.len(),
        });
    }
    if observations < 2 {
        return Err(Error::InvalidParam(format!(
            "need at least 2 observations, got {observations}"
        )));
    }
    for &r in intra {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::InvalidCorrelation(format!(
                "intra-block correlation {r} outside [0, 1)"
            )));
        }
    }
    if !(0.0..1.0).contains(&inter) {
        return Err(Error::InvalidCorrelation(format!(
            "inter-block correlation {inter} outside [0, 1)"
        )));
    }
    let min_intra = intra.iter().copied().fold(f64::INFINITY, f64::min);
    if inter > min_intra {
        return Err(Error::InvalidCorrelation(format!(
            "inter-block correlation {inter} exceeds smallest intra-block correlation {min_intra}"
        )));
    }

    let n: usize = block_sizes.iter().sum();
    let a = inter.sqrt();
    let loadings: Vec<(f64, f64)> = intra
        .iter()
        .map(|&r| ((r - inter).sqrt(), (1.0 - r).sqrt()))
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    let mut returns = vec![vec![0.0; observations]; n];
    // Fixed draw order per period: market factor, block factors, then one
    // idiosyncratic draw per series.
    for t in 0..observations {
        let g: f64 = normal.sample(&mut rng);
        let mut i = 0;
        for (b, &size) in block_sizes.iter().enumerate() {
            let f: f64 = normal.sample(&mut rng);
            let (load_block, load_noise) = loadings[b];
            for _ in 0..size {
                let e: f64 = normal.sample(&mut rng);
                returns[i][t] = a * g + load_block * f + load_noise * e;
                i += 1;
            }
        }
    }

    let width = n.saturating_sub(1).to_string().len().max(3);
    let tickers = (0..n).map(|i| format!("S{i:0width$}")).collect();
    Ok(ReturnMatrix { tickers, returns })
}

/// Converts returns to a positive price matrix: price `base` at the first
/// date, then successive factors `exp(vol * r)`. `log_returns` recovers
/// `vol * r` up to float rounding.
pub fn synth_prices(returns: &ReturnMatrix, base: f64, vol: f64) -> Result<PriceMatrix> {
    if !(base.is_finite() && base > 0.0) {
        return Err(Error::InvalidParam(format!("base price {base} not positive")));
    }
    if !(vol.is_finite() && vol > 0.0) {
        return Err(Error::InvalidParam(format!("volatility {vol} not positive")));
    }
    let t_count = returns.observations() + 1;
    let width = (t_count - 1).to_string().len().max(4);
    let dates = (0..t_count).map(|t| format!("t{t:0width$}")).collect();
    let prices = returns
        .returns
        .iter()
        .map(|row| {
            let mut p = Vec::with_capacity(t_count);
            p.push(base);
            for r in row {
                p.push(p.last().unwrap() * (vol * r).exp());
            }
            p
        })
        .collect();
    PriceMatrix::new(returns.tickers.clone(), dates, prices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn matrix(tickers: &[&str], dates: &[&str], prices: &[&[f64]]) -> PriceMatrix {
        PriceMatrix::new(
            tickers.iter().map(|s| s.to_string()).collect(),
            dates.iter().map(|s| s.to_string()).collect(),
            prices.iter().map(|r| r.to_vec()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn wide_csv_round_trips() {
        let m = matrix(
            &["AAA", "BBB"],
            &["2024-01-02", "2024-01-03", "2024-01-04"],
            &[&[100.0, 101.5, 99.25], &[50.0, 50.5, 51.125]],
        );
        let csv = m.to_wide_csv();
        let (back, dropped) = parse_prices(
            csv.as_bytes(),
            CsvLayout::Wide,
            MissingPolicy::Error,
            Path::new("mem"),
        )
        .unwrap();
        assert_eq!(back, m);
        assert!(dropped.is_empty());
    }

    #[test]
    fn long_layout_orders_by_first_appearance() {
        let csv = "date,ticker,close\n\
                   d1,B,10\nd1,A,20\nd2,B,11\nd2,A,21\n";
        let (m, _) = parse_prices(
            csv.as_bytes(),
            CsvLayout::Long,
            MissingPolicy::Error,
            Path::new("mem"),
        )
        .unwrap();
        assert_eq!(m.tickers(), ["B", "A"]);
        assert_eq!(m.dates(), ["d1", "d2"]);
        assert_eq!(m.row(0), [10.0, 11.0]);
        assert_eq!(m.row(1), [20.0, 21.0]);
    }

    #[test]
    fn non_positive_price_is_rejected_with_location() {
        let csv = "ticker,d1,d2\nAAA,100,-3\n";
        let err = parse_prices(
            csv.as_bytes(),
            CsvLayout::Wide,
            MissingPolicy::Error,
            Path::new("mem"),
        )
        .unwrap_err();
        match err {
            Error::NonPositivePrice { ticker, date, value } => {
                assert_eq!(ticker, "AAA");
                assert_eq!(date, "d2");
                assert_eq!(value, -3.0);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn duplicate_long_observation_is_rejected() {
        let csv = "date,ticker,close\nd1,A,10\nd1,A,11\nd2,A,12\n";
        let err = parse_prices(
            csv.as_bytes(),
            CsvLayout::Long,
            MissingPolicy::Error,
            Path::new("mem"),
        )
        .unwrap_err();
        assert!(matches!(err, Error::DuplicateObservation { .. }));
    }

    #[test]
    fn missing_observation_names_the_gap() {
        let csv = "date,ticker,close\nd1,A,10\nd2,A,11\nd1,B,5\n";
        let err = parse_prices(
            csv.as_bytes(),
            CsvLayout::Long,
            MissingPolicy::Error,
            Path::new("mem"),
        )
        .unwrap_err();
        match err {
            Error::MissingObservation { ticker, date } => {
                assert_eq!(ticker, "B");
                assert_eq!(date, "d2");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn drop_incomplete_keeps_complete_tickers() {
        let csv = "date,ticker,close\nd1,A,10\nd2,A,11\nd1,B,5\n";
        let (m, dropped) = parse_prices(
            csv.as_bytes(),
            CsvLayout::Long,
            MissingPolicy::DropIncomplete,
            Path::new("mem"),
        )
        .unwrap();
        assert_eq!(m.tickers(), ["A"]);
        assert_eq!(dropped, ["B"]);
    }

    #[test]
    fn ragged_wide_row_is_rejected() {
        let csv = "ticker,d1,d2,d3\nAAA,1,2,3\nBBB,1,2\n";
        let err = parse_prices(
            csv.as_bytes(),
            CsvLayout::Wide,
            MissingPolicy::Error,
            Path::new("mem"),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Csv { .. } | Error::MalformedInput { .. }));
    }

    #[test]
    fn log_returns_match_hand_values() {
        let m = matrix(&["A"], &["d1", "d2", "d3"], &[&[100.0, 110.0, 99.0]]);
        let r = log_returns(&m);
        assert_eq!(r.observations(), 2);
        assert_relative_eq!(r.row(0)[0], (1.1f64).ln(), max_relative = 1e-15);
        assert_relative_eq!(r.row(0)[1], (0.9f64).ln(), max_relative = 1e-15);
    }

    #[test]
    fn sector_map_uses_palette_and_explicit_colors() {
        let roster = vec!["A".to_string(), "B".to_string()];
        let csv = "ticker,sector,color\nA,FI,\nB,XX,teal\nC,MA,\n";
        let map = parse_sectors(csv.as_bytes(), &roster, Path::new("mem")).unwrap();
        assert_eq!(map.len(), 2);
        assert_eq!(map.get("A").unwrap().color, "red");
        assert_eq!(map.get("B").unwrap().color, "teal");
        assert!(map.get("C").is_none());
    }

    #[test]
    fn unknown_sector_without_color_is_rejected() {
        let roster = vec!["A".to_string()];
        let csv = "ticker,sector\nA,XX\n";
        let err = parse_sectors(csv.as_bytes(), &roster, Path::new("mem")).unwrap_err();
        assert!(matches!(err, Error::UnknownSector { .. }));
    }

    #[test]
    fn uncovered_roster_is_rejected_with_sorted_list() {
        let roster: Vec<String> = ["C", "A", "B"].iter().map(|s| s.to_string()).collect();
        let csv = "ticker,sector\nB,FI\n";
        let err = parse_sectors(csv.as_bytes(), &roster, Path::new("mem")).unwrap_err();
        match err {
            Error::MissingSectors { tickers } => assert_eq!(tickers, ["A", "C"]),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn empty_roster_yields_empty_map() {
        let csv = "ticker,sector\nA,FI\n";
        let map = parse_sectors(csv.as_bytes(), &[], Path::new("mem")).unwrap();
        assert!(map.is_empty());
    }

    #[test]
    fn generator_is_deterministic_per_seed() {
        let a = gen_block_returns(&[3, 2], &[0.6, 0.4], 0.1, 50, 7).unwrap();
        let b = gen_block_returns(&[3, 2], &[0.6, 0.4], 0.1, 50, 7).unwrap();
        let c = gen_block_returns(&[3, 2], &[0.6, 0.4], 0.1, 50, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.tickers(), ["S000", "S001", "S002", "S003", "S004"]);
    }

    fn pearson(x: &[f64], y: &[f64]) -> f64 {
        let n = x.len() as f64;
        let mx = x.iter().sum::<f64>() / n;
        let my = y.iter().sum::<f64>() / n;
        let mut sxy = 0.0;
        let mut sxx = 0.0;
        let mut syy = 0.0;
        for (a, b) in x.iter().zip(y) {
            sxy += (a - mx) * (b - my);
            sxx += (a - mx) * (a - mx);
            syy += (b - my) * (b - my);
        }
        sxy / (sxx * syy).sqrt()
    }

    #[test]
    fn generator_produces_block_structure() {
        let r = gen_block_returns(&[20, 20], &[0.7, 0.7], 0.1, 4000, 11).unwrap();
        let within = pearson(r.row(0), r.row(1));
        let across = pearson(r.row(0), r.row(25));
        assert_abs_diff_eq!(within, 0.7, epsilon = 0.08);
        assert_abs_diff_eq!(across, 0.1, epsilon = 0.08);
    }

    #[test]
    fn generator_accepts_single_uncorrelated_block() {
        let r = gen_block_returns(&[3], &[0.0], 0.0, 30, 1).unwrap();
        assert_eq!(r.n(), 3);
        assert_eq!(r.observations(), 30);
    }

    #[test]
    fn generator_rejects_bad_correlations() {
        assert!(matches!(
            gen_block_returns(&[4, 4], &[0.3, 0.5], 0.4, 30, 1),
            Err(Error::InvalidCorrelation(_))
        ));
        assert!(matches!(
            gen_block_returns(&[4], &[1.0], 0.0, 30, 1),
            Err(Error::InvalidCorrelation(_))
        ));
        assert!(matches!(
            gen_block_returns(&[], &[], 0.0, 30, 1),
            Err(Error::InvalidParam(_))
        ));
    }

    #[test]
    fn synth_prices_round_trip_recovers_scaled_returns() {
        let r = gen_block_returns(&[4], &[0.2], 0.1, 40, 3).unwrap();
        let prices = synth_prices(&r, 100.0, 0.01).unwrap();
        assert_eq!(prices.observations(), 41);
        let back = log_returns(&prices);
        for i in 0..r.n() {
            for t in 0..r.observations() {
                assert_relative_eq!(back.row(i)[t], 0.01 * r.row(i)[t], max_relative = 1e-9);
            }
        }
    }
}
