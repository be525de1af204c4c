//! Augmented Dickey-Fuller unit-root test with a fixed lag order.
//!
//! The test regression is
//!
//! ```text
//! dy[t] = a (+ d*t) + g*y[t-1] + sum_{j=1..p} f_j*dy[t-j] + u[t]
//! ```
//!
//! and the statistic is the t-ratio of `g`. Critical values come from
//! MacKinnon's finite-sample response surfaces (MacKinnon 2010, "Critical
//! Values for Cointegration Tests", Queen's Economics Department WP 1227,
//! Table 2, N = 1). The approximate p-value uses the asymptotic distribution
//! fits of MacKinnon (1994), JBES 12(2), Tables 3 and 4.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::least_squares;
use crate::series::TimeSeries;
use crate::special::normal_cdf;

/// Deterministic terms in the test regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Deterministic {
    None,
    #[default]
    Constant,
    ConstantTrend,
}

impl fmt::Display for Deterministic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Deterministic::None => "none",
            Deterministic::Constant => "constant",
            Deterministic::ConstantTrend => "constant_trend",
        })
    }
}

impl FromStr for Deterministic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" | "n" => Ok(Deterministic::None),
            "constant" | "c" => Ok(Deterministic::Constant),
            "constant_trend" | "ct" | "trend" => Ok(Deterministic::ConstantTrend),
            other => Err(Error::InvalidParameter(format!(
                "unknown deterministic spec `{other}` (expected none, constant or constant_trend)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalValues {
    #[serde(rename = "1%")]
    pub one_pct: f64,
    #[serde(rename = "5%")]
    pub five_pct: f64,
    #[serde(rename = "10%")]
    pub ten_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdfResult {
    pub statistic: f64,
    pub lags: usize,
    pub deterministic: Deterministic,
    pub n_effective: usize,
    pub critical_values: CriticalValues,
    pub reject_at_5pct: bool,
    /// Approximate MacKinnon p-value, clamped to [0.001, 0.999].
    pub approx_p: Option<f64>,
}

impl AdfResult {
    pub fn verdict_text(&self) -> &'static str {
        if self.reject_at_5pct {
            "reject unit root (stationary)"
        } else {
            "fail to reject unit root (non-stationary)"
        }
    }
}

// Response surface coefficients [b0, b1, b2, b3] for 1%, 5%, 10%:
// cv(T) = b0 + b1/T + b2/T^2 + b3/T^3.
const SURFACE_NONE: [[f64; 4]; 3] = [
    [-2.56574, -2.2358, -3.627, 0.0],
    [-1.94100, -0.2686, -3.365, 31.223],
    [-1.61682, 0.2656, -2.714, 25.364],
];
const SURFACE_CONSTANT: [[f64; 4]; 3] = [
    [-3.43035, -6.5393, -16.786, -79.433],
    [-2.86154, -2.8903, -4.234, -40.040],
    [-2.56677, -1.5384, -2.809, 0.0],
];
const SURFACE_TREND: [[f64; 4]; 3] = [
    [-3.95877, -9.0531, -28.428, -134.155],
    [-3.41049, -4.3904, -9.036, -45.374],
    [-3.12705, -2.5856, -3.925, -22.380],
];

/// Finite-sample critical values for `nobs` observations in the test regression.
pub fn critical_values(deterministic: Deterministic, nobs: usize) -> CriticalValues {
    let table = match deterministic {
        Deterministic::None => &SURFACE_NONE,
        Deterministic::Constant => &SURFACE_CONSTANT,
        Deterministic::ConstantTrend => &SURFACE_TREND,
    };
    let inv = 1.0 / nobs as f64;
    let eval = |c: &[f64; 4]| c[0] + inv * (c[1] + inv * (c[2] + inv * c[3]));
    CriticalValues {
        one_pct: eval(&table[0]),
        five_pct: eval(&table[1]),
        ten_pct: eval(&table[2]),
    }
}

struct PValueFit {
    tau_max: f64,
    tau_min: f64,
    tau_star: f64,
    small: [f64; 3],
    large: [f64; 4],
}

const P_NONE: PValueFit = PValueFit {
    tau_max: f64::INFINITY,
    tau_min: -19.04,
    tau_star: -1.04,
    small: [0.6344, 1.2378, 3.2496e-2],
    large: [0.4797, 9.3557e-1, -6.999e-2, 3.3066e-2],
};
const P_CONSTANT: PValueFit = PValueFit {
    tau_max: 2.74,
    tau_min: -18.83,
    tau_star: -1.61,
    small: [2.1659, 1.4412, 3.8269e-2],
    large: [1.7339, 9.3202e-1, -1.2745e-1, -1.0368e-2],
};
const P_TREND: PValueFit = PValueFit {
    tau_max: 0.7,
    tau_min: -16.18,
    tau_star: -2.89,
    small: [3.2512, 1.6047, 4.9588e-2],
    large: [2.5261, 6.1654e-1, -3.7956e-1, -6.0285e-2],
};

/// Approximate p-value of an ADF statistic, clamped to [0.001, 0.999].
pub fn approx_p_value(statistic: f64, deterministic: Deterministic) -> f64 {
    let fit = match deterministic {
        Deterministic::None => &P_NONE,
        Deterministic::Constant => &P_CONSTANT,
        Deterministic::ConstantTrend => &P_TREND,
    };
    let p = if statistic > fit.tau_max {
        1.0
    } else if statistic < fit.tau_min {
        0.0
    } else if statistic <= fit.tau_star {
        let c = &fit.small;
        normal_cdf(c[0] + statistic * (c[1] + statistic * c[2]))
    } else {
        let c = &fit.large;
        normal_cdf(c[0] + statistic * (c[1] + statistic * (c[2] + statistic * c[3])))
    };
    p.clamp(0.001, 0.999)
}

/// Runs the ADF test on the values of `s` with `lags` lagged differences.
pub fn adf_test(s: &TimeSeries, lags: usize, deterministic: Deterministic) -> Result<AdfResult> {
    adf_on_values(s.values(), lags, deterministic)
}

pub fn adf_on_values(y: &[f64], lags: usize, deterministic: Deterministic) -> Result<AdfResult> {
    let n = y.len();
    if n < lags + 10 {
        return Err(Error::TooShort {
            needed: lags + 10,
            got: n,
        });
    }
    if y.iter().all(|&v| v == y[0]) {
        return Err(Error::ConstantSeries);
    }
    let dy: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
    // rows t = lags+1 ..= n-1 index y; dy[t-1] is the response
    let rows = lags + 1..n;
    let n_effective = rows.len();

    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(lags + 3);
    columns.push(rows.clone().map(|t| y[t - 1]).collect());
    for j in 1..=lags {
        columns.push(rows.clone().map(|t| dy[t - 1 - j]).collect());
    }
    match deterministic {
        Deterministic::None => {}
        Deterministic::Constant => columns.push(vec![1.0; n_effective]),
        Deterministic::ConstantTrend => {
            columns.push(vec![1.0; n_effective]);
            columns.push((1..=n_effective).map(|t| t as f64).collect());
        }
    }
    let response: Vec<f64> = rows.map(|t| dy[t - 1]).collect();

    let fit = least_squares(&columns, &response)?;
    let dof = fit.nobs - columns.len();
    let sigma2 = fit.ssr / dof as f64;
    let se = (sigma2 * fit.cov_diag[0]).sqrt();
    if se == 0.0 || !se.is_finite() {
        return Err(Error::SingularDesign);
    }
    let statistic = fit.coef[0] / se;
    let critical_values = critical_values(deterministic, n_effective);
    Ok(AdfResult {
        statistic,
        lags,
        deterministic,
        n_effective,
        critical_values,
        // a tie with the critical value does not reject
        reject_at_5pct: statistic < critical_values.five_pct,
        approx_p: Some(approx_p_value(statistic, deterministic)),
    })
}
