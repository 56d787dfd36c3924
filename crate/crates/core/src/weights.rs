//! Weight matrices, canonical balancing and column ordering.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::BinaryMatrix;

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 100_000;

/// Entrywise nonnegative `m x n` weights with cached logs and support counts.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightMatrix {
    m: usize,
    n: usize,
    w: Vec<f64>,
    logw: Vec<f64>,
    row_nnz: Vec<usize>,
    col_nnz: Vec<usize>,
}

impl WeightMatrix {
    /// Builds from row-major data.
    pub fn new(m: usize, n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != m * n {
            return Err(Error::Dimension(format!("expected {} weights for a {m}x{n} matrix, got {}", m * n, data.len())));
        }
        if let Some((k, &x)) = data.iter().enumerate().find(|(_, x)| !x.is_finite() || **x < 0.0) {
            return Err(Error::InvalidWeights(format!("entry ({}, {}) = {x} is not a finite nonnegative number", k / n.max(1), k % n.max(1))));
        }
        let logw = data.iter().map(|&x| if x > 0.0 { x.ln() } else { f64::NEG_INFINITY }).collect();
        let mut row_nnz = vec![0; m];
        let mut col_nnz = vec![0; n];
        for i in 0..m {
            for j in 0..n {
                if data[i * n + j] > 0.0 {
                    row_nnz[i] += 1;
                    col_nnz[j] += 1;
                }
            }
        }
        Ok(Self { m, n, w: data, logw, row_nnz, col_nnz })
    }

    pub fn ones(m: usize, n: usize) -> Self {
        Self::new(m, n, vec![1.0; m * n]).expect("unit weights are valid")
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("ragged weight rows".into()));
        }
        Self::new(m, n, rows.concat())
    }

    /// Ones on the support pattern, zeros elsewhere.
    pub fn from_support(support: &BinaryMatrix) -> Self {
        let (m, n) = (support.rows(), support.cols());
        let data = (0..m * n).map(|k| if support.get(k / n, k % n) { 1.0 } else { 0.0 }).collect();
        Self::new(m, n, data).expect("0/1 weights are valid")
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.w[i * self.n + j]
    }

    #[inline]
    pub fn ln(&self, i: usize, j: usize) -> f64 {
        self.logw[i * self.n + j]
    }

    #[inline]
    pub fn is_positive(&self, i: usize, j: usize) -> bool {
        self.w[i * self.n + j] > 0.0
    }

    pub fn data(&self) -> &[f64] {
        &self.w
    }

    pub fn row_nnz(&self) -> &[usize] {
        &self.row_nnz
    }

    pub fn col_nnz(&self) -> &[usize] {
        &self.col_nnz
    }

    pub fn has_zeros(&self) -> bool {
        self.w.contains(&0.0)
    }

    pub fn support(&self) -> BinaryMatrix {
        let mut a = BinaryMatrix::zeros(self.m, self.n);
        for i in 0..self.m {
            for j in 0..self.n {
                a.set(i, j, self.is_positive(i, j));
            }
        }
        a
    }

    /// True when every entry lies within `tol` of one.
    pub fn is_flat(&self, tol: f64) -> bool {
        self.w.iter().all(|&x| (x - 1.0).abs() <= tol)
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.w.len());
        for j in 0..self.n {
            for i in 0..self.m {
                data.push(self.get(i, j));
            }
        }
        Self::new(self.n, self.m, data).expect("transpose keeps validity")
    }

    /// Column `k` of the result is column `perm[k]` of `self`.
    pub fn permute_cols(&self, perm: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.w.len());
        for i in 0..self.m {
            data.extend(perm.iter().map(|&j| self.get(i, j)));
        }
        Self::new(self.m, self.n, data).expect("permutation keeps validity")
    }

    /// `alpha_i beta_j w_ij`.
    pub fn scaled(&self, alpha: &[f64], beta: &[f64]) -> Result<Self> {
        if alpha.len() != self.m || beta.len() != self.n {
            return Err(Error::Dimension("scaling vectors do not match the weight matrix".into()));
        }
        let data = (0..self.m * self.n).map(|k| alpha[k / self.n] * beta[k % self.n] * self.w[k]).collect();
        Self::new(self.m, self.n, data)
    }

    fn check_nondegenerate(&self) -> Result<()> {
        if let Some(i) = self.row_nnz.iter().position(|&k| k == 0) {
            return Err(Error::DegenerateWeights(format!("row {i} has no positive entry")));
        }
        if let Some(j) = self.col_nnz.iter().position(|&k| k == 0) {
            return Err(Error::DegenerateWeights(format!("column {j} has no positive entry")));
        }
        Ok(())
    }
}

/// The balanced representative `wbar = alpha beta^T o w` whose nonzero row
/// and column averages equal one.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalWeights {
    pub wbar: WeightMatrix,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

impl CanonicalWeights {
    /// Wraps `w` unchanged, for callers that skip balancing.
    pub fn identity(w: &WeightMatrix) -> Self {
        let residual = balance_residual(w);
        Self { wbar: w.clone(), alpha: vec![1.0; w.m()], beta: vec![1.0; w.n()], iterations: 0, residual, converged: true }
    }
}

/// L1 distance of the row and column sums of `w` from its row and column
/// support counts.
pub fn balance_residual(w: &WeightMatrix) -> f64 {
    let (m, n) = (w.m(), w.n());
    let mut col = vec![0.0; n];
    let mut err = 0.0;
    for i in 0..m {
        let mut row = 0.0;
        for (j, cj) in col.iter_mut().enumerate() {
            let x = w.get(i, j);
            row += x;
            *cj += x;
        }
        err += (row - w.row_nnz()[i] as f64).abs();
    }
    err + col.iter().zip(w.col_nnz()).map(|(s, &k)| (s - k as f64).abs()).sum::<f64>()
}

/// Alternating row and column normalization to the canonical member of the
/// scaling class of `w`. Stops once the L1 change of the scalings drops to
/// `tol` or after `max_iter` sweeps; the last iterate is returned either way
/// with `converged` reporting which.
pub fn canonicalize(w: &WeightMatrix, tol: f64, max_iter: usize) -> Result<CanonicalWeights> {
    w.check_nondegenerate()?;
    let (m, n) = (w.m(), w.n());
    let row_target: Vec<f64> = w.row_nnz().iter().map(|&k| k as f64).collect();
    let col_target: Vec<f64> = w.col_nnz().iter().map(|&k| k as f64).collect();

    let update_rows = |beta: &[f64], alpha: &mut Vec<f64>| {
        for i in 0..m {
            let s: f64 = (0..n).map(|j| beta[j] * w.get(i, j)).sum();
            alpha[i] = row_target[i] / s;
        }
        let mean = alpha.iter().sum::<f64>() / m as f64;
        alpha.iter_mut().for_each(|a| *a /= mean);
    };
    let update_cols = |alpha: &[f64], beta: &mut Vec<f64>| {
        for j in 0..n {
            let s: f64 = (0..m).map(|i| alpha[i] * w.get(i, j)).sum();
            beta[j] = col_target[j] / s;
        }
    };

    let mut alpha = vec![1.0; m];
    let mut beta = vec![1.0; n];
    update_rows(&beta, &mut alpha);
    update_cols(&alpha, &mut beta);

    let mut iterations = 0;
    let mut change = f64::INFINITY;
    let (mut alpha0, mut beta0) = (alpha.clone(), beta.clone());
    while iterations < max_iter && change > tol {
        iterations += 1;
        update_rows(&beta, &mut alpha);
        update_cols(&alpha, &mut beta);
        change = l1_change(&alpha, &alpha0) + l1_change(&beta, &beta0);
        alpha0.copy_from_slice(&alpha);
        beta0.copy_from_slice(&beta);
    }

    let wbar = w.scaled(&alpha, &beta)?;
    let residual = balance_residual(&wbar);
    Ok(CanonicalWeights { wbar, alpha, beta, iterations, residual, converged: change <= tol })
}

fn l1_change(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// True when every row's positive entries are contiguous and the first and
/// last positive columns are nondecreasing down the rows.
pub fn detect_banded(w: &WeightMatrix) -> bool {
    let mut prev: Option<(usize, usize)> = None;
    for i in 0..w.m() {
        let first = (0..w.n()).find(|&j| w.is_positive(i, j));
        let Some(start) = first else { continue };
        let end = (0..w.n()).rev().find(|&j| w.is_positive(i, j)).unwrap_or(start);
        if (start..=end).any(|j| !w.is_positive(i, j)) {
            return false;
        }
        if let Some((ps, pe)) = prev {
            if start < ps || end < pe {
                return false;
            }
        }
        prev = Some((start, end));
    }
    true
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnOrderMode {
    Auto,
    None,
    #[default]
    Descend,
}

/// A permutation `perm` of the columns; sampled column `k` is original
/// column `perm[k]`.
pub fn column_order(wbar: &WeightMatrix, c: &[usize], mode: ColumnOrderMode) -> Vec<usize> {
    let n = c.len();
    let identity: Vec<usize> = (0..n).collect();
    match mode {
        ColumnOrderMode::None => identity,
        ColumnOrderMode::Auto if detect_banded(wbar) => identity,
        ColumnOrderMode::Auto | ColumnOrderMode::Descend => {
            let var: Vec<f64> = (0..n).map(|j| column_variance(wbar, j)).collect();
            let mut order = identity;
            order.sort_by(|&a, &b| {
                c[b].cmp(&c[a]).then(var[b].partial_cmp(&var[a]).unwrap_or(std::cmp::Ordering::Equal)).then(a.cmp(&b))
            });
            order
        }
    }
}

fn column_variance(w: &WeightMatrix, j: usize) -> f64 {
    let m = w.m();
    if m == 0 {
        return 0.0;
    }
    let mean = (0..m).map(|i| w.get(i, j)).sum::<f64>() / m as f64;
    (0..m).map(|i| (w.get(i, j) - mean).powi(2)).sum::<f64>() / m as f64
}

/// Inverse of a permutation.
pub fn invert_permutation(perm: &[usize]) -> Result<Vec<usize>> {
    let mut inv = vec![usize::MAX; perm.len()];
    for (k, &j) in perm.iter().enumerate() {
        if j >= perm.len() || inv[j] != usize::MAX {
            return Err(Error::NotPermutation);
        }
        inv[j] = k;
    }
    Ok(inv)
}
