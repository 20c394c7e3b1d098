//! Ordinary least squares via Householder QR, with classical standard
//! errors, two-sided t tests on the coefficients, and R-squared.

use serde::Serialize;

use super::{special, StatsError};

/// Dense row-major matrix, just big enough for regression designs.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Build from row slices; every row must have the same length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            data.extend_from_slice(row);
        }
        Matrix { rows: r, cols: c, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }
}

/// Fitted least-squares model.
#[derive(Debug, Clone, Serialize)]
pub struct RegressionFit {
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub t_values: Vec<f64>,
    pub p_values: Vec<f64>,
    pub n_obs: usize,
    pub r_squared: f64,
    pub rss: f64,
    #[serde(skip)]
    pub residuals: Vec<f64>,
}

/// Fit y = X b by least squares.
///
/// The design is factored with Householder reflections; a pivot whose
/// magnitude collapses relative to the largest column norm signals a rank
/// deficiency. Standard errors are the classical sigma^2 (X'X)^-1 kind with
/// n - k residual degrees of freedom.
pub fn ols(y: &[f64], design: &Matrix) -> Result<RegressionFit, StatsError> {
    let n = design.rows();
    let k = design.cols();
    if y.len() != n {
        return Err(StatsError::InsufficientObservations { n: y.len(), k });
    }
    if n <= k || k == 0 {
        return Err(StatsError::InsufficientObservations { n, k });
    }
    super::check_finite(y)?;
    if !design.data.iter().all(|v| v.is_finite()) {
        return Err(StatsError::NonFiniteInput);
    }

    // Working copies: `a` is reduced to R in place, `qty` accumulates Q'y.
    let mut a = design.clone();
    let mut qty = y.to_vec();
    let max_col_norm = (0..k)
        .map(|j| (0..n).map(|i| a.get(i, j).powi(2)).sum::<f64>().sqrt())
        .fold(0.0f64, f64::max);
    let tol = 1e-10 * max_col_norm.max(1.0);

    for j in 0..k {
        // Householder vector for column j, rows j..n.
        let norm = (j..n).map(|i| a.get(i, j).powi(2)).sum::<f64>().sqrt();
        if norm <= tol {
            return Err(StatsError::RankDeficient(j));
        }
        let alpha = if a.get(j, j) >= 0.0 { -norm } else { norm };
        let mut v = vec![0.0; n - j];
        for i in j..n {
            v[i - j] = a.get(i, j);
        }
        v[0] -= alpha;
        let vtv: f64 = v.iter().map(|x| x * x).sum();
        if vtv > 0.0 {
            // Apply H = I - 2vv'/v'v to the trailing columns and to Q'y.
            for c in j..k {
                let dot: f64 = (j..n).map(|i| v[i - j] * a.get(i, c)).sum();
                let scale = 2.0 * dot / vtv;
                for i in j..n {
                    let updated = a.get(i, c) - scale * v[i - j];
                    a.set(i, c, updated);
                }
            }
            let dot: f64 = (j..n).map(|i| v[i - j] * qty[i]).sum();
            let scale = 2.0 * dot / vtv;
            for i in j..n {
                qty[i] -= scale * v[i - j];
            }
        }
        a.set(j, j, alpha);
        for i in j + 1..n {
            a.set(i, j, 0.0);
        }
    }

    // Back-substitute R b = (Q'y)[..k].
    let mut beta = vec![0.0; k];
    for j in (0..k).rev() {
        let acc: f64 = (j + 1..k).map(|c| a.get(j, c) * beta[c]).sum();
        beta[j] = (qty[j] - acc) / a.get(j, j);
    }

    // Residuals against the original design.
    let mut residuals = vec![0.0; n];
    let mut rss = 0.0;
    for i in 0..n {
        let fitted: f64 = (0..k).map(|c| design.get(i, c) * beta[c]).sum();
        let r = y[i] - fitted;
        residuals[i] = r;
        rss += r * r;
    }
    let df = (n - k) as f64;
    let sigma2 = rss / df;

    // (X'X)^-1 = R^-1 R^-T from the triangular factor.
    let mut rinv = Matrix::zeros(k, k);
    for col in 0..k {
        // Solve R x = e_col.
        let mut x = vec![0.0; k];
        for j in (0..=col).rev() {
            let rhs = if j == col { 1.0 } else { 0.0 };
            let acc: f64 = (j + 1..k).map(|c| a.get(j, c) * x[c]).sum();
            x[j] = (rhs - acc) / a.get(j, j);
        }
        for (j, v) in x.into_iter().enumerate() {
            rinv.set(j, col, v);
        }
    }
    let std_errors: Vec<f64> = (0..k)
        .map(|j| {
            let cov_jj: f64 = (0..k).map(|c| rinv.get(j, c) * rinv.get(j, c)).sum();
            (sigma2 * cov_jj).sqrt()
        })
        .collect();

    let t_values: Vec<f64> = beta
        .iter()
        .zip(&std_errors)
        .map(|(b, se)| if *se > 0.0 { b / se } else { f64::INFINITY })
        .collect();
    let p_values: Vec<f64> = t_values
        .iter()
        .map(|&t| special::t_two_sided_p(t, df))
        .collect();

    let y_mean = y.iter().sum::<f64>() / n as f64;
    let tss: f64 = y.iter().map(|v| (v - y_mean) * (v - y_mean)).sum();
    let r_squared = if tss > 0.0 {
        1.0 - rss / tss
    } else if rss <= 1e-24 {
        1.0
    } else {
        0.0
    };

    Ok(RegressionFit {
        coefficients: beta,
        std_errors,
        t_values,
        p_values,
        n_obs: n,
        r_squared,
        rss,
        residuals,
    })
}
