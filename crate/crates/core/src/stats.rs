//! Pearson correlation with t-based significance, simple OLS and the lag-1
//! residual autocorrelation diagnostic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special;

/// Whether a correlation was computed on levels or on first differences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationMode {
    Levels,
    Changes,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub r: f64,
    pub n: usize,
    /// Infinite when |r| = 1.
    #[serde(with = "crate::report::extended_float")]
    pub t_stat: f64,
    pub p_two_sided: f64,
    pub mode: CorrelationMode,
}

impl CorrelationResult {
    pub fn significant_at(&self, alpha: f64) -> bool {
        self.p_two_sided < alpha
    }
}

/// Simple least-squares fit `y = beta0 + beta1 * x + e`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OlsFit {
    pub beta0: f64,
    pub beta1: f64,
    pub residuals: Vec<f64>,
    pub r_squared: f64,
    pub n: usize,
    pub se_beta1: f64,
    /// The response had zero variance; `r_squared` is reported as 0.
    pub degenerate_response: bool,
}

/// Lag-1 autocorrelation of regression residuals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ar1Diagnostics {
    pub rho_hat: f64,
    pub n_pairs: usize,
}

struct Moments {
    n: usize,
    mean_x: f64,
    mean_y: f64,
    sxx: f64,
    syy: f64,
    sxy: f64,
}

fn moments(x: &[f64], y: &[f64]) -> Moments {
    let n = x.len();
    let nf = n as f64;
    let mean_x = x.iter().sum::<f64>() / nf;
    let mean_y = y.iter().sum::<f64>() / nf;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (&xi, &yi) in x.iter().zip(y) {
        let dx = xi - mean_x;
        let dy = yi - mean_y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    Moments {
        n,
        mean_x,
        mean_y,
        sxx,
        syy,
        sxy,
    }
}

fn check_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 3 {
        return Err(Error::TooShort {
            needed: 3,
            got: x.len(),
        });
    }
    Ok(())
}

/// Sample correlation coefficient without significance; shared by [`pearson`]
/// and the residual diagnostic.
pub fn correlation(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    let m = moments(x, y);
    if m.sxx == 0.0 || m.syy == 0.0 {
        return Err(Error::ConstantInput);
    }
    let prod = m.sxx * m.syy;
    let denom = if prod.is_finite() {
        prod.sqrt()
    } else {
        m.sxx.sqrt() * m.syy.sqrt()
    };
    let r = m.sxy / denom;
    Ok(r.clamp(-1.0, 1.0))
}

pub fn pearson(x: &[f64], y: &[f64], mode: CorrelationMode) -> Result<CorrelationResult> {
    let r = correlation(x, y)?;
    let n = x.len();
    let df = (n - 2) as f64;
    let (t_stat, p) = if r.abs() >= 1.0 {
        (r.signum() * f64::INFINITY, 0.0)
    } else {
        let t = r * (df / (1.0 - r * r)).sqrt();
        (t, special::student_t_two_sided(t, df))
    };
    Ok(CorrelationResult {
        r,
        n,
        t_stat,
        p_two_sided: p,
        mode,
    })
}

/// Regresses `y` on `x` with an intercept.
pub fn ols_simple(y: &[f64], x: &[f64]) -> Result<OlsFit> {
    check_pair(x, y)?;
    let m = moments(x, y);
    if m.sxx == 0.0 {
        return Err(Error::ConstantRegressor);
    }
    let beta1 = m.sxy / m.sxx;
    let beta0 = m.mean_y - beta1 * m.mean_x;
    let residuals: Vec<f64> = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| (yi - m.mean_y) - beta1 * (xi - m.mean_x))
        .collect();
    let ssr: f64 = residuals.iter().map(|e| e * e).sum();
    let degenerate_response = m.syy == 0.0;
    let r_squared = if degenerate_response {
        0.0
    } else {
        (m.sxy / m.sxx * (m.sxy / m.syy)).clamp(0.0, 1.0)
    };
    let se_beta1 = (ssr / (m.n - 2) as f64 / m.sxx).sqrt();
    Ok(OlsFit {
        beta0,
        beta1,
        residuals,
        r_squared,
        n: m.n,
        se_beta1,
        degenerate_response,
    })
}

/// Correlation of `e[t]` with `e[t - 1]` over the fit's residuals.
pub fn residual_lag1_corr(fit: &OlsFit) -> Result<Ar1Diagnostics> {
    lag1_corr(&fit.residuals)
}

pub fn lag1_corr(residuals: &[f64]) -> Result<Ar1Diagnostics> {
    let n = residuals.len();
    if n < 4 {
        return Err(Error::TooShort { needed: 4, got: n });
    }
    let rho_hat = correlation(&residuals[1..], &residuals[..n - 1])?;
    Ok(Ar1Diagnostics {
        rho_hat,
        n_pairs: n - 1,
    })
}

/// Upper-tail probability of Student's t with integer degrees of freedom.
pub fn student_t_sf(t: f64, df: u32) -> f64 {
    assert!(df >= 1, "degrees of freedom must be positive");
    special::student_t_sf(t, f64::from(df))
}
