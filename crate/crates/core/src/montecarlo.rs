//! Random walks with drift and the null-calibration experiment: how strongly
//! do independent trending walks correlate with a given target, on levels and
//! on changes, and how autocorrelated are the regression residuals?

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, Domain, RNG_NAME};
use crate::series::TimeSeries;
use crate::special::normal_pdf;
use crate::stats::{correlation, lag1_corr, ols_simple};

pub const DEFAULT_BINS: usize = 40;
/// Thresholds reported for the level-correlation shares.
pub const SHARE_THRESHOLDS: [f64; 2] = [0.30, 0.75];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkParams {
    pub drift_min: f64,
    pub drift_max: f64,
    pub length: usize,
    pub x0: f64,
    /// Scale of the N(0, 1) shocks. Always 1 in the experiment; 0 turns the
    /// walk into its deterministic drift path.
    pub noise_scale: f64,
}

impl Default for WalkParams {
    fn default() -> Self {
        Self {
            drift_min: 0.02,
            drift_max: 0.2,
            length: 101,
            x0: 0.0,
            noise_scale: 1.0,
        }
    }
}

impl WalkParams {
    pub fn with_length(length: usize) -> Self {
        Self {
            length,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.drift_min.is_finite()
            && self.drift_max.is_finite()
            && self.drift_min > 0.0
            && self.drift_min < self.drift_max;
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "drift range [{}, {}) must be positive and non-empty",
                self.drift_min, self.drift_max
            )));
        }
        if self.length < 2 {
            return Err(Error::InvalidParameter(format!(
                "walk length must be at least 2, got {}",
                self.length
            )));
        }
        if !(self.x0.is_finite() && self.noise_scale.is_finite() && self.noise_scale >= 0.0) {
            return Err(Error::InvalidParameter(
                "x0 and noise scale must be finite, noise scale non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// x[t] = d + x[t-1] + e[t] with x[0] = x0.
pub fn walk_with_drift<R: Rng + ?Sized>(params: &WalkParams, drift: f64, rng: &mut R) -> Vec<f64> {
    let mut values = Vec::with_capacity(params.length);
    let mut x = params.x0;
    values.push(x);
    for _ in 1..params.length {
        let e: f64 = StandardNormal.sample(rng);
        x = drift + x + params.noise_scale * e;
        values.push(x);
    }
    values
}

/// Drift and path of walk `walk_index`; the drift is drawn first from the
/// walk's own sub-stream, then the shocks.
pub fn walk_values(params: &WalkParams, walk_index: u64, master_seed: u64) -> (f64, Vec<f64>) {
    let mut rng = rng::substream(master_seed, Domain::Walk, walk_index);
    let drift = rng.random_range(params.drift_min..params.drift_max);
    let values = walk_with_drift(params, drift, &mut rng);
    (drift, values)
}

pub fn gen_random_walk(
    params: &WalkParams,
    walk_index: u64,
    master_seed: u64,
) -> Result<TimeSeries> {
    params.validate()?;
    let (_, values) = walk_values(params, walk_index, master_seed);
    TimeSeries::from_values(format!("walk {walk_index}"), 0, values)
}

/// Equal-width histogram with an optional scaled normal overlay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// Normal density at each bin centre, with the sample mean and standard
    /// deviation, scaled by `n * bin_width` so it is comparable to counts.
    pub overlay: Option<Vec<f64>>,
    /// All values were equal; a single unit-width bin centred on them is used.
    pub degenerate: bool,
}

impl Histogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }
}

pub fn histogram(values: &[f64], n_bins: usize, with_normal_overlay: bool) -> Result<Histogram> {
    if values.is_empty() || n_bins == 0 {
        return Err(Error::EmptyHistogram);
    }
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::InvalidParameter(
            "histogram values must be finite".into(),
        ));
    }
    if lo == hi {
        return Ok(Histogram {
            edges: vec![lo - 0.5, lo + 0.5],
            counts: vec![values.len() as u64],
            overlay: None,
            degenerate: true,
        });
    }
    let width = (hi - lo) / n_bins as f64;
    let mut edges: Vec<f64> = (0..n_bins).map(|i| lo + i as f64 * width).collect();
    edges.push(hi);
    let mut counts = vec![0u64; n_bins];
    for &v in values {
        // last bin is closed on the right
        let idx = (((v - lo) / width) as usize).min(n_bins - 1);
        counts[idx] += 1;
    }
    let overlay = if with_normal_overlay {
        let (mean, sd) = mean_sd(values);
        (sd > 0.0).then(|| {
            let scale = values.len() as f64 * width;
            edges
                .windows(2)
                .map(|w| scale * normal_pdf(0.5 * (w[0] + w[1]), mean, sd))
                .collect()
        })
    } else {
        None
    };
    Ok(Histogram {
        edges,
        counts,
        overlay,
        degenerate: false,
    })
}

fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Summary statistics of one simulated distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorStats {
    pub mean: f64,
    pub sd: f64,
    pub min: f64,
    pub max: f64,
    pub max_abs: f64,
}

impl VectorStats {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let (mean, sd) = mean_sd(values);
        let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Some(Self {
            mean,
            sd,
            min,
            max,
            max_abs: min.abs().max(max.abs()),
        })
    }
}

/// Fraction of `values` strictly above `threshold`.
pub fn share_above(values: &[f64], threshold: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().filter(|&&v| v > threshold).count() as f64 / values.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloHistograms {
    pub level_corrs: Histogram,
    pub change_corrs: Histogram,
    pub level_resid_rho: Histogram,
    pub change_resid_rho: Histogram,
}

/// Per-walk outputs of the experiment, in walk-index order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSummary {
    pub n_walks: usize,
    /// Walks whose statistics were undefined (e.g. zero variance); excluded
    /// from every vector below.
    pub n_excluded: usize,
    pub level_corrs: Vec<f64>,
    pub change_corrs: Vec<f64>,
    pub level_resid_rho: Vec<f64>,
    pub change_resid_rho: Vec<f64>,
    pub params: WalkParams,
    pub seed: u64,
    pub rng_name: String,
}

#[derive(Debug, Clone, Copy)]
struct WalkOutcome {
    level_r: f64,
    change_r: f64,
    level_rho: f64,
    change_rho: f64,
}

fn walk_outcome(walk: &[f64], target: &[f64], target_changes: &[f64]) -> Result<WalkOutcome> {
    let walk_changes: Vec<f64> = walk.windows(2).map(|w| w[1] - w[0]).collect();
    let level_r = correlation(walk, target)?;
    let change_r = correlation(&walk_changes, target_changes)?;
    let level_rho = lag1_corr(&ols_simple(walk, target)?.residuals)?.rho_hat;
    let change_rho = lag1_corr(&ols_simple(&walk_changes, target_changes)?.residuals)?.rho_hat;
    Ok(WalkOutcome {
        level_r,
        change_r,
        level_rho,
        change_rho,
    })
}

/// Simulates `n_walks` drift walks of the target's length and correlates each
/// with the target. Work is spread over the current rayon pool; the output is
/// identical for any pool size.
pub fn run_monte_carlo(
    target: &TimeSeries,
    n_walks: usize,
    params: &WalkParams,
    master_seed: u64,
) -> Result<MonteCarloSummary> {
    params.validate()?;
    if target.len() != params.length {
        return Err(Error::LengthMismatch(target.len(), params.length));
    }
    if n_walks == 0 {
        return Err(Error::InvalidParameter(
            "at least one walk is required".into(),
        ));
    }
    if target.len() < 5 {
        // lag-1 residual correlation on changes needs four residuals
        return Err(Error::TooShort {
            needed: 5,
            got: target.len(),
        });
    }
    let target_values = target.values();
    let target_changes: Vec<f64> = target_values.windows(2).map(|w| w[1] - w[0]).collect();
    // a degenerate target would exclude every walk
    if target_values.iter().all(|&v| v == target_values[0])
        || target_changes.iter().all(|&v| v == target_changes[0])
    {
        return Err(Error::ConstantInput.context("Monte Carlo target"));
    }

    let outcomes: Vec<Option<WalkOutcome>> = (0..n_walks as u64)
        .into_par_iter()
        .map(|i| {
            let (_, walk) = walk_values(params, i, master_seed);
            walk_outcome(&walk, target_values, &target_changes).ok()
        })
        .collect();

    let mut summary = MonteCarloSummary {
        n_walks,
        n_excluded: 0,
        level_corrs: Vec::with_capacity(n_walks),
        change_corrs: Vec::with_capacity(n_walks),
        level_resid_rho: Vec::with_capacity(n_walks),
        change_resid_rho: Vec::with_capacity(n_walks),
        params: *params,
        seed: master_seed,
        rng_name: RNG_NAME.to_owned(),
    };
    for outcome in outcomes {
        match outcome {
            Some(o) => {
                summary.level_corrs.push(o.level_r);
                summary.change_corrs.push(o.change_r);
                summary.level_resid_rho.push(o.level_rho);
                summary.change_resid_rho.push(o.change_rho);
            }
            None => summary.n_excluded += 1,
        }
    }
    Ok(summary)
}

impl MonteCarloSummary {
    pub fn n_valid(&self) -> usize {
        self.level_corrs.len()
    }

    pub fn histograms(&self, n_bins: usize) -> Result<MonteCarloHistograms> {
        Ok(MonteCarloHistograms {
            level_corrs: histogram(&self.level_corrs, n_bins, true)?,
            change_corrs: histogram(&self.change_corrs, n_bins, true)?,
            level_resid_rho: histogram(&self.level_resid_rho, n_bins, true)?,
            change_resid_rho: histogram(&self.change_resid_rho, n_bins, true)?,
        })
    }

    /// Compact, serializable digest for reports.
    pub fn digest(&self, n_bins: usize) -> Result<MonteCarloDigest> {
        let stats = |v: &[f64]| VectorStats::of(v).ok_or(Error::EmptyHistogram);
        Ok(MonteCarloDigest {
            n_walks: self.n_walks,
            n_excluded: self.n_excluded,
            level_share_above_030: share_above(&self.level_corrs, SHARE_THRESHOLDS[0]),
            level_share_above_075: share_above(&self.level_corrs, SHARE_THRESHOLDS[1]),
            level_corrs: stats(&self.level_corrs)?,
            change_corrs: stats(&self.change_corrs)?,
            level_resid_rho: stats(&self.level_resid_rho)?,
            change_resid_rho: stats(&self.change_resid_rho)?,
            histograms: self.histograms(n_bins)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloDigest {
    pub n_walks: usize,
    pub n_excluded: usize,
    pub level_share_above_030: f64,
    pub level_share_above_075: f64,
    pub level_corrs: VectorStats,
    pub change_corrs: VectorStats,
    pub level_resid_rho: VectorStats,
    pub change_resid_rho: VectorStats,
    pub histograms: MonteCarloHistograms,
}

/// A linear trend with small white jitter, standing in for an observed
/// trending series. The jitter keeps period-to-period changes non-constant so
/// that change correlations are defined.
pub fn linear_trend_target(
    start: i64,
    length: usize,
    slope: f64,
    jitter_sd: f64,
    seed: u64,
) -> Result<TimeSeries> {
    let mut rng = rng::substream(seed, Domain::Target, 0);
    let values = (0..length)
        .map(|t| {
            let e: f64 = StandardNormal.sample(&mut rng);
            slope * t as f64 + jitter_sd * e
        })
        .collect();
    TimeSeries::from_values("linear trend target", start, values)
}
