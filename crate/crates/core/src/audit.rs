//! The end-to-end audit of a pair of series: unit-root tests, level and
//! change correlations, the level regression's residual autocorrelation, an
//! optional random-walk null, and a verdict.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::adf::{adf_test, AdfResult, Deterministic};
use crate::error::{Error, Result};
use crate::montecarlo::{run_monte_carlo, MonteCarloDigest, WalkParams, DEFAULT_BINS};
use crate::rng::RNG_NAME;
use crate::series::{align, difference, TimeSeries};
use crate::stats::{
    ols_simple, pearson, residual_lag1_corr, Ar1Diagnostics, CorrelationMode, CorrelationResult,
};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditConfig {
    pub alpha: f64,
    pub lags: usize,
    pub deterministic: Deterministic,
    pub min_overlap: usize,
    /// Number of simulated walks; 0 skips the Monte Carlo step.
    pub walks: usize,
    pub seed: u64,
    pub drift_min: f64,
    pub drift_max: f64,
    pub bins: usize,
}

impl Default for AuditConfig {
    fn default() -> Self {
        let walk = WalkParams::default();
        Self {
            alpha: 0.05,
            lags: 1,
            deterministic: Deterministic::Constant,
            min_overlap: 20,
            walks: 0,
            seed: 0,
            drift_min: walk.drift_min,
            drift_max: walk.drift_max,
            bins: DEFAULT_BINS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VerdictCategory {
    SpuriousRisk,
    ChangesConsistent,
    LevelsOnlyStationary,
    Inconclusive,
}

impl fmt::Display for VerdictCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictCategory::SpuriousRisk => "SPURIOUS_RISK",
            VerdictCategory::ChangesConsistent => "CHANGES_CONSISTENT",
            VerdictCategory::LevelsOnlyStationary => "LEVELS_ONLY_STATIONARY",
            VerdictCategory::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub category: VerdictCategory,
    pub rationale: Vec<String>,
}

fn adf_line(name: &str, r: &AdfResult) -> String {
    format!(
        "{name}: ADF statistic {:.3} vs 5% critical value {:.3} -> {}",
        r.statistic,
        r.critical_values.five_pct,
        r.verdict_text()
    )
}

fn corr_line(what: &str, c: &CorrelationResult, alpha: f64) -> String {
    format!(
        "{what}: r = {:.3}, p = {:.4} (n = {}) -> {} at {alpha}",
        c.r,
        c.p_two_sided,
        c.n,
        if c.significant_at(alpha) {
            "significant"
        } else {
            "not significant"
        }
    )
}

/// Verdict rule. Uses only quantities that are symmetric in the two series.
///
/// 1. both levels keep a unit root, levels correlate significantly and
///    changes do not: `SPURIOUS_RISK`;
/// 2. changes correlate significantly: `CHANGES_CONSISTENT`;
/// 3. both levels reject a unit root: `LEVELS_ONLY_STATIONARY`;
/// 4. otherwise `INCONCLUSIVE`.
pub fn derive_verdict(
    adf_a: &AdfResult,
    adf_b: &AdfResult,
    corr_levels: &CorrelationResult,
    corr_changes: &CorrelationResult,
    alpha: f64,
) -> Verdict {
    let both_unit_root = !adf_a.reject_at_5pct && !adf_b.reject_at_5pct;
    let both_stationary = adf_a.reject_at_5pct && adf_b.reject_at_5pct;
    let levels_sig = corr_levels.significant_at(alpha);
    let changes_sig = corr_changes.significant_at(alpha);

    let category = if both_unit_root && levels_sig && !changes_sig {
        VerdictCategory::SpuriousRisk
    } else if changes_sig {
        VerdictCategory::ChangesConsistent
    } else if both_stationary {
        VerdictCategory::LevelsOnlyStationary
    } else {
        VerdictCategory::Inconclusive
    };

    let adf_summary = match (both_unit_root, both_stationary) {
        (true, _) => "both level series look non-stationary",
        (_, true) => "both level series look stationary",
        _ => "the level series differ in stationarity",
    };
    let conclusion = match category {
        VerdictCategory::SpuriousRisk => {
            "the level correlation is likely spurious: it does not survive differencing"
        }
        VerdictCategory::ChangesConsistent => {
            "period-to-period changes co-move; the association is not only a shared trend"
        }
        VerdictCategory::LevelsOnlyStationary => {
            "both series are stationary, so the level correlation can be read directly"
        }
        VerdictCategory::Inconclusive => "no rule applies; inspect the raw statistics",
    };
    let rationale = vec![
        format!(
            "ADF verdicts (levels): {}; {}; {adf_summary}",
            adf_line("a", adf_a),
            adf_line("b", adf_b)
        ),
        corr_line("levels correlation", corr_levels, alpha),
        corr_line("changes correlation", corr_changes, alpha),
        format!("{category}: {conclusion}"),
    ];
    Verdict {
        category,
        rationale,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputInfo {
    pub label: String,
    pub first: i64,
    pub last: i64,
    pub n: usize,
    pub dropped_by_alignment: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inputs {
    pub a: InputInfo,
    pub b: InputInfo,
    pub overlap_first: i64,
    pub overlap_last: i64,
    pub overlap_n: usize,
    /// The common stamps are not consecutive, so some changes span gaps.
    pub changes_have_gaps: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdfSection {
    pub a_levels: AdfResult,
    pub b_levels: AdfResult,
    /// Supplementary: tests on the differenced series; absent when the test
    /// could not be run on them.
    pub a_changes: Option<AdfResult>,
    pub b_changes: Option<AdfResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Correlations {
    pub levels: CorrelationResult,
    pub changes: CorrelationResult,
}

/// Regression of `a` on `b` in levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionSection {
    pub beta0: f64,
    pub beta1: f64,
    pub se_beta1: f64,
    pub r_squared: f64,
    pub n: usize,
    pub residual_lag1: Ar1Diagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    #[serde(flatten)]
    pub audit: AuditConfig,
    pub rng_name: String,
    pub tool_version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub inputs: Inputs,
    pub adf: AdfSection,
    pub correlations: Correlations,
    pub regression: RegressionSection,
    pub monte_carlo: Option<MonteCarloDigest>,
    pub verdict: Verdict,
    pub config: ConfigEcho,
}

impl AuditReport {
    /// Recomputes the verdict from the report's own fields.
    pub fn rederive_verdict(&self) -> Verdict {
        derive_verdict(
            &self.adf.a_levels,
            &self.adf.b_levels,
            &self.correlations.levels,
            &self.correlations.changes,
            self.config.audit.alpha,
        )
    }
}

pub fn audit(a: &TimeSeries, b: &TimeSeries, config: &AuditConfig) -> Result<AuditReport> {
    if !(config.alpha > 0.0 && config.alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "significance level must lie in (0, 1), got {}",
            config.alpha
        )));
    }
    let pair = align(a, b)?;
    if pair.len() < config.min_overlap {
        return Err(Error::OverlapTooShort {
            needed: config.min_overlap,
            got: pair.len(),
        });
    }
    let inputs = Inputs {
        a: InputInfo {
            label: a.label().to_owned(),
            first: a.first_time(),
            last: a.last_time(),
            n: a.len(),
            dropped_by_alignment: pair.dropped_a,
        },
        b: InputInfo {
            label: b.label().to_owned(),
            first: b.first_time(),
            last: b.last_time(),
            n: b.len(),
            dropped_by_alignment: pair.dropped_b,
        },
        overlap_first: pair.times[0],
        overlap_last: pair.times[pair.len() - 1],
        overlap_n: pair.len(),
        changes_have_gaps: false,
    };
    let (a, b) = pair.into_series(a.label(), b.label());

    let a_levels = adf_test(&a, config.lags, config.deterministic)
        .map_err(|e| e.context(format!("ADF on levels of {}", a.label())))?;
    let b_levels = adf_test(&b, config.lags, config.deterministic)
        .map_err(|e| e.context(format!("ADF on levels of {}", b.label())))?;
    let da = difference(&a)?;
    let db = difference(&b)?;
    let adf = AdfSection {
        a_levels,
        b_levels,
        a_changes: adf_test(&da.series, config.lags, config.deterministic).ok(),
        b_changes: adf_test(&db.series, config.lags, config.deterministic).ok(),
    };

    let levels = pearson(a.values(), b.values(), CorrelationMode::Levels)
        .map_err(|e| e.context("levels correlation"))?;
    let changes = pearson(
        da.series.values(),
        db.series.values(),
        CorrelationMode::Changes,
    )
    .map_err(|e| e.context("changes correlation"))?;

    let fit = ols_simple(a.values(), b.values()).map_err(|e| e.context("level regression"))?;
    let residual_lag1 = residual_lag1_corr(&fit).map_err(|e| e.context("residual diagnostics"))?;
    let regression = RegressionSection {
        beta0: fit.beta0,
        beta1: fit.beta1,
        se_beta1: fit.se_beta1,
        r_squared: fit.r_squared,
        n: fit.n,
        residual_lag1,
    };

    let monte_carlo = if config.walks > 0 {
        let params = WalkParams {
            drift_min: config.drift_min,
            drift_max: config.drift_max,
            length: b.len(),
            ..WalkParams::default()
        };
        let summary = run_monte_carlo(&b, config.walks, &params, config.seed)
            .map_err(|e| e.context("Monte Carlo"))?;
        Some(summary.digest(config.bins)?)
    } else {
        None
    };

    let verdict = derive_verdict(
        &adf.a_levels,
        &adf.b_levels,
        &levels,
        &changes,
        config.alpha,
    );
    Ok(AuditReport {
        inputs: Inputs {
            changes_have_gaps: da.has_gaps,
            ..inputs
        },
        adf,
        correlations: Correlations { levels, changes },
        regression,
        monte_carlo,
        verdict,
        config: ConfigEcho {
            audit: config.clone(),
            rng_name: RNG_NAME.to_owned(),
            tool_version: TOOL_VERSION.to_owned(),
        },
    })
}
