//! Elementary symmetric polynomials of row-weight suffixes and the per-row
//! `v` factors built from them.
//!
//! `G(i, j, k)` is the log of `e_k(wbar_ij, ..., wbar_in)`, the sum over all
//! `k`-subsets of the row's remaining weights of their products. Columns are
//! 1-based here; `j = n + 1` denotes the empty suffix.

use crate::logspace::log_add;
use crate::weights::WeightMatrix;

/// Log-domain table of `G(i, j, k)` for `j = 1..=n` and `k = 0..=r_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct GTable {
    n: usize,
    width: Vec<usize>,
    offset: Vec<usize>,
    data: Vec<f64>,
}

impl GTable {
    /// Number of stored cells.
    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// `G(i, j, k)`; `k` beyond the row's original sum is not stored and
    /// must not be requested.
    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        if j > self.n {
            return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
        }
        debug_assert!(k < self.width[i], "k = {k} beyond stored range for row {i}");
        self.data[self.offset[i] + (j - 1) * self.width[i] + k]
    }
}

/// Builds the table for weights `wbar` and original row sums `r` in
/// `O(n d)` time.
pub fn precompute_g(wbar: &WeightMatrix, r: &[usize]) -> GTable {
    let (m, n) = (wbar.m(), wbar.n());
    assert_eq!(r.len(), m, "row sums must match the weight rows");
    let width: Vec<usize> = r.iter().map(|&x| x + 1).collect();
    let mut offset = Vec::with_capacity(m);
    let mut total = 0;
    for &w in &width {
        offset.push(total);
        total += w * n;
    }
    let mut data = vec![f64::NEG_INFINITY; total];
    for i in 0..m {
        let wd = width[i];
        let base = offset[i];
        for j in (1..=n).rev() {
            let lw = wbar.ln(i, j - 1);
            let cell = base + (j - 1) * wd;
            data[cell] = 0.0;
            for k in 1..wd {
                let (skip, take) = if j == n {
                    (f64::NEG_INFINITY, if k == 1 { lw } else { f64::NEG_INFINITY })
                } else {
                    let next = base + j * wd;
                    (data[next + k], lw + data[next + k - 1])
                };
                data[cell + k] = log_add(skip, take);
            }
        }
    }
    GTable { n, width, offset, data }
}

/// Outcome of the `v` computation for one row.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum VFactor {
    /// Finite `log v`.
    Value(f64),
    /// Only a one keeps the rest of the row completable.
    ForceOne,
    /// A one here is impossible (zero weight) but a zero is fine.
    ForceZero,
    /// Neither value can complete the row.
    Dead,
}

/// `v` for row `i` with current sum `k` at column `j` (1-based) of `n`.
#[inline]
pub fn v_row(g: &GTable, wbar: &WeightMatrix, i: usize, k: usize, j: usize) -> VFactor {
    let n = wbar.n();
    let rest = n - j;
    if k == 0 {
        return VFactor::Value(0.0);
    }
    if k > rest + 1 {
        return VFactor::Dead;
    }
    let positive = wbar.is_positive(i, j - 1);
    if k == rest + 1 {
        return if positive { VFactor::Value(0.0) } else { VFactor::Dead };
    }
    let den = g.get(i, j + 1, k);
    if !positive {
        return if den > f64::NEG_INFINITY { VFactor::ForceZero } else { VFactor::Dead };
    }
    let num = g.get(i, j + 1, k - 1);
    if den == f64::NEG_INFINITY {
        return if num > f64::NEG_INFINITY { VFactor::ForceOne } else { VFactor::Dead };
    }
    VFactor::Value(wbar.ln(i, j - 1) + ((rest - k + 1) as f64).ln() - (k as f64).ln() + num - den)
}

/// `v` under a structural-zero pattern. `rest_support` is the number of
/// positive weights of row `i` in columns `j+1..=n`. Zeros in either ratio
/// term give `v = 1`, leaving the entry to the hard constraints.
#[inline]
pub fn v_row_structural(g: &GTable, wbar: &WeightMatrix, i: usize, k: usize, j: usize, rest_support: usize) -> f64 {
    if k == 0 || k > rest_support || !wbar.is_positive(i, j - 1) {
        return 0.0;
    }
    let num = g.get(i, j + 1, k - 1);
    let den = g.get(i, j + 1, k);
    if num == f64::NEG_INFINITY || den == f64::NEG_INFINITY {
        return 0.0;
    }
    wbar.ln(i, j - 1) + ((rest_support - k + 1) as f64).ln() - (k as f64).ln() + num - den
}

/// Per-row `v` factors for column `j` with the rows' special cases split out.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct VVector {
    pub log_v: Vec<f64>,
    pub force_ones: Vec<usize>,
    pub force_zeros: Vec<usize>,
    pub dead: Vec<usize>,
}

pub fn v_weights(g: &GTable, wbar: &WeightMatrix, r_current: &[usize], j: usize) -> VVector {
    let mut out = VVector { log_v: vec![0.0; r_current.len()], ..Default::default() };
    for (i, &k) in r_current.iter().enumerate() {
        match v_row(g, wbar, i, k, j) {
            VFactor::Value(x) => out.log_v[i] = x,
            VFactor::ForceOne => out.force_ones.push(i),
            VFactor::ForceZero => out.force_zeros.push(i),
            VFactor::Dead => out.dead.push(i),
        }
    }
    out
}

pub fn v_structural(g: &GTable, wbar: &WeightMatrix, r_current: &[usize], j: usize) -> Vec<f64> {
    let n = wbar.n();
    r_current
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let rest = (j..n).filter(|&col| wbar.is_positive(i, col)).count();
            v_row_structural(g, wbar, i, k, j, rest)
        })
        .collect()
}
