//! Dense least squares via Householder QR, sized for the handful of regressors
//! in a unit-root regression.

use crate::error::{Error, Result};

pub(crate) struct LeastSquares {
    pub coef: Vec<f64>,
    /// Diagonal of (X'X)^-1.
    pub cov_diag: Vec<f64>,
    pub ssr: f64,
    pub nobs: usize,
}

/// Solves `min ||y - X b||` where `columns[j]` is the j-th column of X.
#[allow(clippy::needless_range_loop)]
pub(crate) fn least_squares(columns: &[Vec<f64>], y: &[f64]) -> Result<LeastSquares> {
    let k = columns.len();
    let n = y.len();
    if n <= k {
        return Err(Error::TooShort {
            needed: k + 1,
            got: n,
        });
    }
    // column-major working copy
    let mut a: Vec<Vec<f64>> = columns.to_vec();
    let mut b = y.to_vec();
    let norms: Vec<f64> = a
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();

    for j in 0..k {
        let alpha_norm = a[j][j..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if alpha_norm <= 1e-12 * norms[j].max(f64::MIN_POSITIVE) {
            return Err(Error::SingularDesign);
        }
        let alpha = if a[j][j] > 0.0 {
            -alpha_norm
        } else {
            alpha_norm
        };
        let mut v: Vec<f64> = a[j][j..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 > 0.0 {
            for col in a.iter_mut().skip(j) {
                let dot: f64 = v.iter().zip(&col[j..]).map(|(p, q)| p * q).sum();
                let f = 2.0 * dot / vnorm2;
                for (c, vi) in col[j..].iter_mut().zip(&v) {
                    *c -= f * vi;
                }
            }
            let dot: f64 = v.iter().zip(&b[j..]).map(|(p, q)| p * q).sum();
            let f = 2.0 * dot / vnorm2;
            for (c, vi) in b[j..].iter_mut().zip(&v) {
                *c -= f * vi;
            }
        }
    }

    // R is upper triangular in a[col][row], row <= col
    let r = |row: usize, col: usize| a[col][row];
    let mut coef = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = b[i];
        for j in i + 1..k {
            s -= r(i, j) * coef[j];
        }
        coef[i] = s / r(i, i);
    }
    let ssr: f64 = b[k..].iter().map(|v| v * v).sum();

    // R^-1 by back substitution, then diag(R^-1 R^-T) as row norms
    let mut rinv = vec![vec![0.0; k]; k];
    for i in 0..k {
        rinv[i][i] = 1.0 / r(i, i);
        for j in (0..i).rev() {
            let mut s = 0.0;
            for m in j + 1..=i {
                s += r(j, m) * rinv[m][i];
            }
            rinv[j][i] = -s / r(j, j);
        }
    }
    let cov_diag = (0..k)
        .map(|i| rinv[i][i..].iter().map(|v| v * v).sum())
        .collect();

    Ok(LeastSquares {
        coef,
        cov_diag,
        ssr,
        nobs: n,
    })
}
