//! Subcommand implementations: resolve flags against the config file,
//! run the pipeline, write artifacts.

use std::io::BufReader;
use std::path::{Path, PathBuf};

use minet::distfit::Family;
use minet::filtration::{
    cmlm_network, global_threshold, mlm_network, BreakpointResult, EdgeRule, EdgeSet,
    FamilyChoice, FiltrationConfig,
};
use minet::infotheory::{mi_matrix, BinningScheme, MIMatrix};
use minet::ingest::{
    gen_block_returns, load_sectors, log_returns, parse_prices, synth_prices, CsvLayout,
    MissingPolicy, SectorMap, SECTOR_PALETTE,
};
use minet::topology::{
    clique_report, maximal_cliques, sweep_to_csv, topology_report, ClusteringKind, SweepMethod,
    SweepOptions,
};

use crate::config::RunConfig;
use crate::output::{dot_graph, write_atomic, write_json};
use crate::{AnalyzeArgs, BuildArgs, CliError, GenArgs, MiArgs, SweepArgs};

const DEFAULT_BLOCKS: &str = "30,30,30";
const DEFAULT_INTRA: &str = "0.35";
const DEFAULT_INTER: f64 = 0.1;
const DEFAULT_OBS: usize = 1157;
const DEFAULT_SEED: u64 = 42;
const DEFAULT_BINS: usize = 8;
const DEFAULT_SCHEME: &str = "equal-frequency";
const DEFAULT_METHOD: &str = "cmlm";
const DEFAULT_FAMILIES: &str = "normal,exponential";
const DEFAULT_MIN_SEGMENT: usize = 5;
const DEFAULT_EDGE_RULE: &str = "union";
const DEFAULT_ALPHA: f64 = 0.3;
const DEFAULT_Q: f64 = 2.0;
const DEFAULT_THRESHOLD_GRID: &str = "0:0.1:0.9";
const DEFAULT_CMLM_GRID: &str = "0:0.01:0.4";
const DEFAULT_OUT: &str = "out";
const GEN_BASE_PRICE: f64 = 100.0;
const GEN_VOLATILITY: f64 = 0.01;

fn pick<T: Clone>(flag: &Option<T>, file: &Option<T>) -> Option<T> {
    flag.clone().or_else(|| file.clone())
}

fn pick_switch(flag: bool, file: Option<bool>) -> bool {
    flag || file.unwrap_or(false)
}

fn require<T>(value: Option<T>, name: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("--{name} is required (flag or config file)")))
}

fn out_dir(flag: &Option<PathBuf>, file: &RunConfig) -> PathBuf {
    pick(flag, &file.out).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

fn round12(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

/// `start:step:end` (inclusive, positive step) or a comma-separated list.
/// Stepped values are rounded to 12 decimals so grids print cleanly.
pub fn parse_grid(arg: &str) -> Result<Vec<f64>, CliError> {
    let num = |s: &str| -> Result<f64, CliError> {
        s.trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("bad number {s:?} in grid {arg:?}")))
    };
    let parts: Vec<&str> = arg.split(':').collect();
    match parts.len() {
        1 => arg.split(',').map(num).collect(),
        3 => {
            let (start, step, end) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
            if !(step > 0.0) || end < start {
                return Err(CliError::Usage(format!(
                    "grid {arg:?} must be start:step:end with positive step"
                )));
            }
            let mut grid = Vec::new();
            for k in 0.. {
                let v = round12(start + step * k as f64);
                if v > end + 1e-9 {
                    break;
                }
                grid.push(v);
            }
            Ok(grid)
        }
        _ => Err(CliError::Usage(format!(
            "grid {arg:?} must be start:step:end or v1,v2,..."
        ))),
    }
}

pub fn parse_blocks(arg: &str) -> Result<Vec<usize>, CliError> {
    arg.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("bad block size {s:?}")))
        })
        .collect()
}

/// One correlation per block, or a single value broadcast to all blocks.
pub fn parse_intra(arg: &str, blocks: usize) -> Result<Vec<f64>, CliError> {
    let values: Vec<f64> = arg
        .split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("bad correlation {s:?}")))
        })
        .collect::<Result<_, _>>()?;
    if values.len() == 1 && blocks > 1 {
        return Ok(vec![values[0]; blocks]);
    }
    if values.len() != blocks {
        return Err(CliError::Usage(format!(
            "{} intra correlations for {blocks} blocks",
            values.len()
        )));
    }
    Ok(values)
}

/// `weak,strong` with families normal, exponential, rayleigh, or
/// poisson[:scale]; or `auto` to pick the best density family per segment.
pub fn parse_families(arg: &str) -> Result<(FamilyChoice, FamilyChoice), CliError> {
    if arg.trim() == "auto" {
        let all = vec![Family::Normal, Family::Exponential, Family::Rayleigh];
        return Ok((FamilyChoice::Auto(all.clone()), FamilyChoice::Auto(all)));
    }
    let parts: Vec<&str> = arg.split(',').collect();
    if parts.len() != 2 {
        return Err(CliError::Usage(format!(
            "families {arg:?} must be weak,strong or auto"
        )));
    }
    let weak: Family = parts[0].trim().parse()?;
    let strong: Family = parts[1].trim().parse()?;
    Ok((FamilyChoice::Fixed(weak), FamilyChoice::Fixed(strong)))
}

fn wrote(path: &Path) {
    println!("wrote {}", path.display());
}

pub fn gen(args: &GenArgs, file: &RunConfig) -> Result<(), CliError> {
    let blocks = parse_blocks(&pick(&args.blocks, &file.blocks).unwrap_or_else(|| DEFAULT_BLOCKS.into()))?;
    let intra = parse_intra(
        &pick(&args.intra, &file.intra).unwrap_or_else(|| DEFAULT_INTRA.into()),
        blocks.len(),
    )?;
    let inter = pick(&args.inter, &file.inter).unwrap_or(DEFAULT_INTER);
    let obs = pick(&args.obs, &file.obs).unwrap_or(DEFAULT_OBS);
    let seed = pick(&args.seed, &file.seed).unwrap_or(DEFAULT_SEED);
    let out = out_dir(&args.out, file);

    let returns = gen_block_returns(&blocks, &intra, inter, obs, seed)?;
    let prices = synth_prices(&returns, GEN_BASE_PRICE, GEN_VOLATILITY)?;

    let roster = prices.tickers().to_vec();
    let mut assignments = Vec::with_capacity(roster.len());
    let mut i = 0;
    for (b, &size) in blocks.iter().enumerate() {
        let sector = SECTOR_PALETTE[b % SECTOR_PALETTE.len()].0;
        for _ in 0..size {
            assignments.push((roster[i].clone(), sector.to_string(), None));
            i += 1;
        }
    }
    let sectors = SectorMap::from_rows(assignments, &roster)?;

    let prices_path = out.join("prices.csv");
    write_atomic(&prices_path, &prices.to_wide_csv())?;
    wrote(&prices_path);
    let sectors_path = out.join("sectors.csv");
    write_atomic(&sectors_path, &sectors.to_csv(&roster))?;
    wrote(&sectors_path);
    Ok(())
}

fn compute_matrix(
    input: &Path,
    layout: CsvLayout,
    policy: MissingPolicy,
    bins: usize,
    scheme: BinningScheme,
) -> Result<MIMatrix, CliError> {
    let reader = std::fs::File::open(input).map_err(|source| CliError::Io {
        path: input.to_owned(),
        source,
    })?;
    let (prices, dropped) = parse_prices(BufReader::new(reader), layout, policy, input)?;
    for ticker in &dropped {
        eprintln!("warning: dropped {ticker}: incomplete series");
    }
    let returns = log_returns(&prices);
    let matrix = mi_matrix(&returns, bins, scheme)?;
    for ticker in matrix.degenerate_tickers() {
        eprintln!("warning: {ticker} is constant; its MI row is zero");
    }
    Ok(matrix)
}

fn load_matrix(path: &Path) -> Result<MIMatrix, CliError> {
    let file = std::fs::File::open(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })?;
    Ok(MIMatrix::from_csv(BufReader::new(file))?)
}

pub fn mi(args: &MiArgs, file: &RunConfig) -> Result<(), CliError> {
    let input = require(pick(&args.input, &file.input), "input")?;
    let layout: CsvLayout = pick(&args.layout, &file.layout)
        .unwrap_or_else(|| "wide".into())
        .parse()?;
    let policy = if pick_switch(args.drop_incomplete, file.drop_incomplete) {
        MissingPolicy::DropIncomplete
    } else {
        MissingPolicy::Error
    };
    let bins = pick(&args.bins, &file.bins).unwrap_or(DEFAULT_BINS);
    let scheme: BinningScheme = pick(&args.scheme, &file.scheme)
        .unwrap_or_else(|| DEFAULT_SCHEME.into())
        .parse()?;
    let out = out_dir(&args.out, file);

    let matrix = compute_matrix(&input, layout, policy, bins, scheme)?;
    let path = out.join("mi.csv");
    write_atomic(&path, &matrix.to_csv())?;
    wrote(&path);
    Ok(())
}

#[derive(serde::Serialize)]
struct BreakpointJson<'a> {
    node: &'a str,
    u: usize,
    threshold: f64,
    weak_family: String,
    strong_family: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    objective_curve: Option<&'a Vec<f64>>,
}

fn breakpoints_json<'a>(
    matrix: &'a MIMatrix,
    breakpoints: &'a [BreakpointResult],
    alpha: Option<f64>,
    curves: bool,
) -> Vec<BreakpointJson<'a>> {
    breakpoints
        .iter()
        .map(|bp| BreakpointJson {
            node: &matrix.tickers()[bp.node],
            u: bp.u,
            threshold: bp.threshold,
            weak_family: bp.weak_family.to_string(),
            strong_family: bp.strong_family.to_string(),
            alpha,
            objective_curve: curves.then_some(&bp.objective_curve),
        })
        .collect()
}

pub fn build(args: &BuildArgs, file: &RunConfig) -> Result<(), CliError> {
    let mi_path = pick(&args.mi, &file.mi);
    let input_path = pick(&args.input, &file.input);
    let matrix = match (mi_path, input_path) {
        (Some(_), Some(_)) => {
            return Err(CliError::Usage(
                "give either --mi or --input, not both".into(),
            ))
        }
        (None, None) => return Err(CliError::Usage("either --mi or --input is required".into())),
        (Some(mi), None) => load_matrix(&mi)?,
        (None, Some(input)) => {
            let layout: CsvLayout = pick(&args.layout, &file.layout)
                .unwrap_or_else(|| "wide".into())
                .parse()?;
            let policy = if pick_switch(args.drop_incomplete, file.drop_incomplete) {
                MissingPolicy::DropIncomplete
            } else {
                MissingPolicy::Error
            };
            let bins = pick(&args.bins, &file.bins).unwrap_or(DEFAULT_BINS);
            let scheme: BinningScheme = pick(&args.scheme, &file.scheme)
                .unwrap_or_else(|| DEFAULT_SCHEME.into())
                .parse()?;
            compute_matrix(&input, layout, policy, bins, scheme)?
        }
    };

    let method = pick(&args.method, &file.method).unwrap_or_else(|| DEFAULT_METHOD.into());
    let (weak, strong) = parse_families(
        &pick(&args.families, &file.families).unwrap_or_else(|| DEFAULT_FAMILIES.into()),
    )?;
    let edge_rule: EdgeRule = pick(&args.edge_rule, &file.edge_rule)
        .unwrap_or_else(|| DEFAULT_EDGE_RULE.into())
        .parse()?;
    let config = FiltrationConfig {
        weak,
        strong,
        min_segment: pick(&args.min_segment, &file.min_segment).unwrap_or(DEFAULT_MIN_SEGMENT),
        edge_rule,
    };

    let (edges, diagnostics): (EdgeSet, Option<(Vec<BreakpointResult>, Option<f64>)>) =
        match method.as_str() {
            "threshold" => {
                let eta = require(pick(&args.eta, &file.eta), "eta")?;
                (global_threshold(&matrix, eta)?, None)
            }
            "mlm" => {
                let (edges, bps) = mlm_network(&matrix, &config)?;
                (edges, Some((bps, None)))
            }
            "cmlm" => {
                let alpha = pick(&args.alpha, &file.alpha).unwrap_or(DEFAULT_ALPHA);
                let q = pick(&args.q, &file.q).unwrap_or(DEFAULT_Q);
                let (edges, bps) = cmlm_network(&matrix, alpha, q, &config)?;
                (edges, Some((bps, Some(alpha))))
            }
            other => {
                return Err(CliError::Usage(format!(
                    "unknown method {other:?}, expected threshold, mlm, or cmlm"
                )))
            }
        };

    let sectors = match pick(&args.sectors, &file.sectors) {
        Some(path) => load_sectors(&path, matrix.tickers())?,
        None => SectorMap::default(),
    };

    let out = out_dir(&args.out, file);
    let edges_path = out.join("edges.csv");
    write_atomic(&edges_path, &edges.to_csv(matrix.tickers())?)?;
    wrote(&edges_path);
    if let Some((breakpoints, alpha)) = &diagnostics {
        let rows = breakpoints_json(&matrix, breakpoints, *alpha, args.curves || file.curves.unwrap_or(false));
        let path = out.join("breakpoints.json");
        write_json(&path, &rows)?;
        wrote(&path);
    }
    let dot_path = out.join("network.dot");
    write_atomic(&dot_path, &dot_graph(&edges, matrix.tickers(), &sectors))?;
    wrote(&dot_path);
    Ok(())
}

pub fn analyze(args: &AnalyzeArgs, file: &RunConfig) -> Result<(), CliError> {
    let mi_path = require(pick(&args.mi, &file.mi), "mi")?;
    let edges_path = require(pick(&args.edges, &file.edges), "edges")?;
    let matrix = load_matrix(&mi_path)?;
    let reader = std::fs::File::open(&edges_path).map_err(|source| CliError::Io {
        path: edges_path.clone(),
        source,
    })?;
    let edges = EdgeSet::from_csv(BufReader::new(reader), matrix.tickers())?;
    let sectors = match pick(&args.sectors, &file.sectors) {
        Some(path) => load_sectors(&path, matrix.tickers())?,
        None => SectorMap::default(),
    };
    let clustering = if pick_switch(args.local_clustering, file.local_clustering) {
        ClusteringKind::AverageLocal
    } else {
        ClusteringKind::Global
    };
    let k_min = pick(&args.k_min, &file.k_min);
    let out = out_dir(&args.out, file);

    let report = topology_report(&edges, k_min, clustering);
    if let Some(reason) = &report.gamma_error {
        eprintln!("warning: no degree-law fit: {reason}");
    }
    let topology_path = out.join("topology.json");
    write_json(&topology_path, &report)?;
    wrote(&topology_path);

    let mut reports = Vec::new();
    for clique in maximal_cliques(&edges) {
        reports.push(clique_report(&clique, &matrix, &sectors)?);
    }
    reports.sort_by(|a, b| {
        b.size
            .cmp(&a.size)
            .then_with(|| a.members.cmp(&b.members))
    });
    let cliques_path = out.join("cliques.json");
    write_json(&cliques_path, &reports)?;
    wrote(&cliques_path);
    Ok(())
}

pub fn sweep(args: &SweepArgs, file: &RunConfig) -> Result<(), CliError> {
    let mi_path = require(pick(&args.mi, &file.mi), "mi")?;
    let matrix = load_matrix(&mi_path)?;
    let method: SweepMethod = pick(&args.method, &file.method)
        .unwrap_or_else(|| DEFAULT_METHOD.into())
        .parse()?;
    let default_grid = match method {
        SweepMethod::Threshold => DEFAULT_THRESHOLD_GRID,
        SweepMethod::Cmlm => DEFAULT_CMLM_GRID,
    };
    let grid = parse_grid(&pick(&args.grid, &file.grid).unwrap_or_else(|| default_grid.into()))?;
    let (weak, strong) = parse_families(
        &pick(&args.families, &file.families).unwrap_or_else(|| DEFAULT_FAMILIES.into()),
    )?;
    let edge_rule: EdgeRule = pick(&args.edge_rule, &file.edge_rule)
        .unwrap_or_else(|| DEFAULT_EDGE_RULE.into())
        .parse()?;
    let options = SweepOptions {
        filtration: FiltrationConfig {
            weak,
            strong,
            min_segment: pick(&args.min_segment, &file.min_segment).unwrap_or(DEFAULT_MIN_SEGMENT),
            edge_rule,
        },
        q: pick(&args.q, &file.q).unwrap_or(DEFAULT_Q),
        k_min: pick(&args.k_min, &file.k_min),
        clustering: if pick_switch(args.local_clustering, file.local_clustering) {
            ClusteringKind::AverageLocal
        } else {
            ClusteringKind::Global
        },
    };
    let out = out_dir(&args.out, file);

    let rows = minet::topology::sweep(&matrix, method, &grid, &options)?;
    for row in &rows {
        if let Some(note) = &row.note {
            eprintln!("warning: param {}: {note}", row.param);
        }
    }
    let path = out.join("sweep.csv");
    write_atomic(&path, &sweep_to_csv(&rows))?;
    wrote(&path);
    Ok(())
}
