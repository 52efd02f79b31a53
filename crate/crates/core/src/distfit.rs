//! Maximum-likelihood fits for similarity-row segments.
//!
//! Four families with closed-form estimators: normal, exponential,
//! Rayleigh, and a Poisson model over quantized values. Log-likelihoods
//! are in nats and always evaluated pointwise from the fitted parameters,
//! so an objective assembled from segment fits is exactly the sum of the
//! per-point terms.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub const DEFAULT_POISSON_SCALE: u32 = 100;

/// Candidate distribution family.
///
/// `PoissonQuantized` models `round(scale * x)` as Poisson counts; its
/// likelihood lives on a different measure than the density families, so
/// the two kinds must not be compared against each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Normal,
    Exponential,
    Rayleigh,
    PoissonQuantized { scale: u32 },
}

impl Family {
    pub fn is_quantized(self) -> bool {
        matches!(self, Family::PoissonQuantized { .. })
    }

    /// Fixed order used to break exact likelihood ties deterministically.
    fn rank(self) -> u8 {
        match self {
            Family::Normal => 0,
            Family::Exponential => 1,
            Family::Rayleigh => 2,
            Family::PoissonQuantized { .. } => 3,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Normal => f.write_str("normal"),
            Family::Exponential => f.write_str("exponential"),
            Family::Rayleigh => f.write_str("rayleigh"),
            Family::PoissonQuantized { scale } => {
                if *scale == DEFAULT_POISSON_SCALE {
                    f.write_str("poisson")
                } else {
                    write!(f, "poisson:{scale}")
                }
            }
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "normal" => Ok(Family::Normal),
            "exponential" => Ok(Family::Exponential),
            "rayleigh" => Ok(Family::Rayleigh),
            "poisson" => Ok(Family::PoissonQuantized {
                scale: DEFAULT_POISSON_SCALE,
            }),
            other => {
                if let Some(scale) = other.strip_prefix("poisson:") {
                    let scale: u32 = scale.parse().map_err(|_| {
                        Error::InvalidParam(format!("bad poisson scale in {other:?}"))
                    })?;
                    if scale == 0 {
                        return Err(Error::InvalidParam("poisson scale must be positive".into()));
                    }
                    return Ok(Family::PoissonQuantized { scale });
                }
                Err(Error::InvalidParam(format!(
                    "unknown family {other:?}, expected normal, exponential, rayleigh, or poisson[:scale]"
                )))
            }
        }
    }
}

impl Serialize for Family {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Family {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Fitted parameters; the variant always matches the family that was fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitParams {
    Normal { mean: f64, variance: f64 },
    Exponential { rate: f64 },
    Rayleigh { scale: f64 },
    Poisson { lambda: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult {
    pub family: Family,
    pub params: FitParams,
    /// Log-likelihood of the sample at the fitted parameters, in nats.
    pub loglik: f64,
    pub n: usize,
}

fn check_sample(xs: &[f64], family: Family) -> Result<()> {
    if xs.len() < 2 {
        return Err(Error::TooFewSamples {
            got: xs.len(),
            need: 2,
        });
    }
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParam("non-finite value in sample".into()));
    }
    if xs.iter().all(|&x| x == xs[0]) {
        return Err(Error::DegenerateFit);
    }
    match family {
        Family::Exponential | Family::Rayleigh | Family::PoissonQuantized { .. } => {
            if xs.iter().any(|&x| x < 0.0) {
                return Err(Error::InvalidParam(format!(
                    "negative value in sample for {family} fit"
                )));
            }
        }
        Family::Normal => {}
    }
    Ok(())
}

/// Closed-form maximum-likelihood fit of `family` to `xs`.
///
/// Zeros are nudged up by machine epsilon for the positive-support
/// densities. A sample of identical values is rejected as degenerate for
/// every family.
pub fn fit_mle(xs: &[f64], family: Family) -> Result<FitResult> {
    check_sample(xs, family)?;
    let n = xs.len() as f64;
    let params = match family {
        Family::Normal => {
            let mean = xs.iter().sum::<f64>() / n;
            let variance = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
            FitParams::Normal { mean, variance }
        }
        Family::Exponential => {
            let mean = xs.iter().map(|&x| positive(x)).sum::<f64>() / n;
            FitParams::Exponential { rate: 1.0 / mean }
        }
        Family::Rayleigh => {
            let mean_sq = xs.iter().map(|&x| positive(x) * positive(x)).sum::<f64>() / n;
            FitParams::Rayleigh {
                scale: (mean_sq / 2.0).sqrt(),
            }
        }
        Family::PoissonQuantized { scale } => {
            let lambda = xs.iter().map(|&x| quantize(x, scale)).sum::<f64>() / n;
            FitParams::Poisson { lambda }
        }
    };
    Ok(FitResult {
        family,
        params,
        loglik: log_likelihood(xs, family, &params),
        n: xs.len(),
    })
}

fn positive(x: f64) -> f64 {
    x.max(f64::EPSILON)
}

fn quantize(x: f64, scale: u32) -> f64 {
    (x * scale as f64).round()
}

fn ln_factorial(k: u64) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

/// Sum of pointwise log-densities (log-masses for the quantized family) of
/// `xs` under the given parameters, in nats. Parameters outside each
/// family's domain give `-inf`.
pub fn log_likelihood(xs: &[f64], family: Family, params: &FitParams) -> f64 {
    match (family, params) {
        (Family::Normal, FitParams::Normal { mean, variance }) => {
            if *variance <= 0.0 {
                return f64::NEG_INFINITY;
            }
            let log_norm = 0.5 * (2.0 * std::f64::consts::PI * variance).ln();
            xs.iter()
                .map(|x| -log_norm - (x - mean) * (x - mean) / (2.0 * variance))
                .sum()
        }
        (Family::Exponential, FitParams::Exponential { rate }) => {
            if *rate <= 0.0 {
                return f64::NEG_INFINITY;
            }
            xs.iter().map(|&x| rate.ln() - rate * positive(x)).sum()
        }
        (Family::Rayleigh, FitParams::Rayleigh { scale }) => {
            if *scale <= 0.0 {
                return f64::NEG_INFINITY;
            }
            let two_sq = 2.0 * scale * scale;
            xs.iter()
                .map(|&x| {
                    let x = positive(x);
                    x.ln() - (scale * scale).ln() - x * x / two_sq
                })
                .sum()
        }
        (Family::PoissonQuantized { scale }, FitParams::Poisson { lambda }) => {
            if *lambda <= 0.0 {
                return f64::NEG_INFINITY;
            }
            xs.iter()
                .map(|&x| {
                    let k = quantize(x, scale);
                    k * lambda.ln() - lambda - ln_factorial(k as u64)
                })
                .sum()
        }
        _ => f64::NEG_INFINITY,
    }
}

fn check_candidates(candidates: &[Family]) -> Result<()> {
    if candidates.is_empty() {
        return Err(Error::InvalidParam("no candidate families".into()));
    }
    if candidates.iter().any(|f| f.is_quantized()) && candidates.iter().any(|f| !f.is_quantized())
    {
        return Err(Error::MixedFamilies);
    }
    Ok(())
}

/// Fits every candidate and keeps the best by log-likelihood; exact ties go
/// to the family earliest in the fixed order normal < exponential <
/// rayleigh < poisson, independent of candidate order.
pub fn select_fit(xs: &[f64], candidates: &[Family]) -> Result<FitResult> {
    check_candidates(candidates)?;
    let mut best: Option<FitResult> = None;
    for &family in candidates {
        let fit = fit_mle(xs, family)?;
        let better = match &best {
            None => true,
            Some(b) => {
                fit.loglik > b.loglik
                    || (fit.loglik == b.loglik && family.rank() < b.family.rank())
            }
        };
        if better {
            best = Some(fit);
        }
    }
    Ok(best.expect("candidates are nonempty"))
}

/// Family with the highest likelihood among `candidates`; see [`select_fit`].
pub fn select_family(xs: &[f64], candidates: &[Family]) -> Result<Family> {
    Ok(select_fit(xs, candidates)?.family)
}

/// Split objective: log-likelihood of `xs[..u]` under its own `weak` fit
/// plus that of `xs[u..]` under its own `strong` fit. A degenerate segment
/// yields `-inf` rather than an error so breakpoint scans can skip it.
pub fn segment_objective(
    xs: &[f64],
    u: usize,
    weak: Family,
    strong: Family,
    min_segment: usize,
) -> Result<f64> {
    let len = xs.len();
    if min_segment < 2 {
        return Err(Error::InvalidParam(format!(
            "minimum segment {min_segment} must be at least 2"
        )));
    }
    if u < min_segment || len < u + min_segment {
        return Err(Error::SegmentTooSmall {
            u,
            len,
            min_segment,
        });
    }
    debug_assert!(xs.windows(2).all(|w| w[0] <= w[1]), "input must be sorted");
    let weak_ll = match fit_mle(&xs[..u], weak) {
        Ok(fit) => fit.loglik,
        Err(Error::DegenerateFit) => return Ok(f64::NEG_INFINITY),
        Err(e) => return Err(e),
    };
    let strong_ll = match fit_mle(&xs[u..], strong) {
        Ok(fit) => fit.loglik,
        Err(Error::DegenerateFit) => return Ok(f64::NEG_INFINITY),
        Err(e) => return Err(e),
    };
    Ok(weak_ll + strong_ll)
}
