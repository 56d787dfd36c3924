//! Asymptotic enumeration of binary matrices with given margins and the
//! per-row `u` factors derived from them.
//!
//! `log_n_*` return the log of an approximate count `N~(r, c)`. The `u`
//! factors are ratios `N~(r - e_i, c') / N~(r, c')` for the matrix left after
//! removing the current column, simplified to closed forms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logspace::ln_binomial;
use crate::margins::Margins;
use crate::matrix::BinaryMatrix;

/// Which asymptotic count drives the `u` factors.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Approximation {
    /// Dense, near semi-regular margins.
    #[default]
    Canfield,
    /// Sparse margins.
    Greenhill,
}

/// `sum_i t_i (t_i - 1) ... (t_i - ell + 1)`.
pub fn falling_factorial_sum(t: &[usize], ell: u32) -> u128 {
    t.iter()
        .map(|&x| {
            let x = x as u128;
            (0..ell as u128).map(|k| x.saturating_sub(k)).product::<u128>()
        })
        .sum()
}

/// Summary statistics of a margin pair that enter the asymptotic formulas.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ApproxContext {
    pub mu: f64,
    pub nu: f64,
    pub eta: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
    pub delta: f64,
    pub r2: f64,
    pub r3: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl ApproxContext {
    /// Statistics for `r` and `c` on an `r.len() x c.len()` grid. The sums of
    /// `r` and `c` need not agree; only `sum c` enters the centering.
    pub fn new(r: &[usize], c: &[usize]) -> Self {
        let (m, n) = (r.len() as f64, c.len() as f64);
        let total: f64 = c.iter().sum::<usize>() as f64;
        let eta = canfield_eta(m, n, total);
        let mu = eta * r.iter().map(|&x| (x as f64 - total / m).powi(2)).sum::<f64>();
        let nu = eta * c.iter().map(|&x| (x as f64 - total / n).powi(2)).sum::<f64>();
        let c1 = falling_factorial_sum(c, 1) as f64;
        let c2 = falling_factorial_sum(c, 2) as f64;
        let c3 = falling_factorial_sum(c, 3) as f64;
        let (alpha1, alpha2, alpha3) = greenhill_alphas(c1, c2, c3);
        Self {
            mu,
            nu,
            eta,
            alpha1,
            alpha2,
            alpha3,
            delta: 0.0,
            r2: falling_factorial_sum(r, 2) as f64,
            r3: falling_factorial_sum(r, 3) as f64,
            c1,
            c2,
            c3,
        }
    }

    /// As [`ApproxContext::new`] with the correction for the structural zeros
    /// of `support` (`true` where entries may be one).
    pub fn with_support(r: &[usize], c: &[usize], support: &BinaryMatrix) -> Self {
        let mut ctx = Self::new(r, c);
        let (m, n) = (r.len(), c.len());
        let total: f64 = c.iter().sum::<usize>() as f64;
        let mn = (m * n) as f64;
        let row_cnt = support.row_sums();
        let col_cnt = support.col_sums();
        let mut delta = 0.0;
        for i in 0..m {
            for j in 0..n {
                if !support.get(i, j) {
                    delta += (r[i] as f64 - row_cnt[i] as f64 * total / mn) * (c[j] as f64 - col_cnt[j] as f64 * total / mn);
                }
            }
        }
        ctx.delta = ctx.eta * delta;
        ctx
    }
}

fn canfield_eta(m: f64, n: f64, total: f64) -> f64 {
    let cells = m * n;
    if total <= 0.0 || total >= cells {
        0.0
    } else {
        cells / (total * (cells - total))
    }
}

/// Greenhill-McKay coefficients from `[c]_1, [c]_2, [c]_3`, with `0/0 = 0`.
fn greenhill_alphas(c1: f64, c2: f64, c3: f64) -> (f64, f64, f64) {
    if c1 == 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let (p2, p3, p4, p5) = (c1 * c1, c1.powi(3), c1.powi(4), c1.powi(5));
    let a1 = c2 / (2.0 * p2) + c2 / (2.0 * p3) + c2 * c2 / (4.0 * p4);
    let a2 = -c3 / (3.0 * p3) + c2 * c2 / (2.0 * p4);
    let a3 = c2 / (4.0 * p4) + c3 / (2.0 * p4) - c2 * c2 / (2.0 * p5);
    (a1, a2, a3)
}

fn check_ranges(r: &[usize], c: &[usize]) -> Result<()> {
    let (m, n) = (r.len(), c.len());
    if r.iter().any(|&x| x > n) || c.iter().any(|&x| x > m) {
        return Err(Error::MarginRange(format!("margins exceed the {m}x{n} grid")));
    }
    Ok(())
}

/// Canfield-Greenhill-McKay approximation evaluated for arbitrary `r` and
/// `c` on an `r.len() x c.len()` grid (sums need not agree).
pub fn log_n_canfield_raw(r: &[usize], c: &[usize]) -> Result<f64> {
    check_ranges(r, c)?;
    let (m, n) = (r.len(), c.len());
    let total: usize = c.iter().sum();
    if total == 0 || total == m * n {
        return Ok(0.0);
    }
    let ctx = ApproxContext::new(r, c);
    let binoms = -ln_binomial(m * n, total)
        + r.iter().map(|&x| ln_binomial(n, x)).sum::<f64>()
        + c.iter().map(|&x| ln_binomial(m, x)).sum::<f64>();
    Ok(binoms - 0.5 * (1.0 - ctx.mu) * (1.0 - ctx.nu))
}

pub fn log_n_canfield(margins: &Margins) -> f64 {
    log_n_canfield_raw(margins.rows(), margins.cols()).expect("validated margins")
}

/// Greenhill-McKay sparse approximation for arbitrary `r` and `c`.
pub fn log_n_greenhill_raw(r: &[usize], c: &[usize]) -> Result<f64> {
    check_ranges(r, c)?;
    let ctx = ApproxContext::new(r, c);
    let lf = |x: usize| crate::logspace::ln_factorial(x);
    let total: usize = c.iter().sum();
    let base = lf(total) - r.iter().map(|&x| lf(x)).sum::<f64>() - c.iter().map(|&x| lf(x)).sum::<f64>();
    Ok(base - ctx.alpha1 * ctx.r2 - ctx.alpha2 * ctx.r3 - ctx.alpha3 * ctx.r2 * ctx.r2)
}

pub fn log_n_greenhill(margins: &Margins) -> f64 {
    log_n_greenhill_raw(margins.rows(), margins.cols()).expect("validated margins")
}

/// Approximate count of binary matrices with margins `r`, `c` supported on
/// `support`, for arbitrary `r` and `c`.
pub fn log_n_structural_raw(r: &[usize], c: &[usize], support: &BinaryMatrix) -> Result<f64> {
    let (m, n) = (r.len(), c.len());
    if support.rows() != m || support.cols() != n {
        return Err(Error::Dimension("support does not match the margins".into()));
    }
    let row_cnt = support.row_sums();
    let col_cnt = support.col_sums();
    if r.iter().zip(&row_cnt).any(|(x, k)| x > k) || c.iter().zip(&col_cnt).any(|(x, k)| x > k) {
        return Err(Error::MarginRange("margins exceed the support".into()));
    }
    let total: usize = c.iter().sum();
    let cells: usize = row_cnt.iter().sum();
    let ctx = ApproxContext::with_support(r, c, support);
    let binoms = -ln_binomial(cells, total)
        + r.iter().zip(&row_cnt).map(|(&x, &k)| ln_binomial(k, x)).sum::<f64>()
        + c.iter().zip(&col_cnt).map(|(&x, &k)| ln_binomial(k, x)).sum::<f64>();
    if total == 0 || total == m * n {
        return Ok(binoms);
    }
    Ok(binoms - 0.5 * (1.0 - ctx.mu) * (1.0 - ctx.nu) - ctx.delta)
}

/// Closed form of the dense `log u` as a function of a row's current sum,
/// given the remaining columns.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CanfieldFactor {
    coef: f64,
    shift: f64,
}

impl CanfieldFactor {
    /// `m` rows; `n_rest` remaining columns with `sum c' = s1` and
    /// `sum c'^2 = s2`.
    pub fn new(m: usize, n_rest: usize, s1: u64, s2: u64) -> Self {
        let cells = (m * n_rest) as f64;
        let (s1f, s2f) = (s1 as f64, s2 as f64);
        if n_rest == 0 || s1 == 0 || s1f >= cells {
            return Self { coef: 0.0, shift: 0.0 };
        }
        let eta = cells / (s1f * (cells - s1f));
        let nu = eta * (s2f - s1f * s1f / n_rest as f64);
        Self { coef: eta * (1.0 - nu), shift: 0.5 + s1f / m as f64 }
    }

    /// From the remaining column sums directly.
    pub fn from_cols(m: usize, c_rest: &[usize]) -> Self {
        let s1 = c_rest.iter().map(|&x| x as u64).sum();
        let s2 = c_rest.iter().map(|&x| (x * x) as u64).sum();
        Self::new(m, c_rest.len(), s1, s2)
    }

    /// `log u` for a row with current sum `r` when `n_cur` columns remain
    /// including the current one. Forced rows get `0`.
    #[inline]
    pub fn log_u(&self, r: usize, n_cur: usize) -> f64 {
        if r == 0 || r >= n_cur {
            return 0.0;
        }
        (r as f64).ln() - ((n_cur - r) as f64).ln() + self.coef * (self.shift - r as f64)
    }
}

/// Closed form of the sparse `log u`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GreenhillFactor {
    a1: f64,
    a2: f64,
    a3: f64,
    r2: f64,
}

impl GreenhillFactor {
    /// From falling-factorial sums of the remaining columns and `[r]_2` of
    /// the current row sums.
    pub fn new(c1: f64, c2: f64, c3: f64, r2: f64) -> Self {
        let (a1, a2, a3) = greenhill_alphas(c1, c2, c3);
        Self { a1, a2, a3, r2 }
    }

    pub fn from_margins(r: &[usize], c_rest: &[usize]) -> Self {
        Self::new(
            falling_factorial_sum(c_rest, 1) as f64,
            falling_factorial_sum(c_rest, 2) as f64,
            falling_factorial_sum(c_rest, 3) as f64,
            falling_factorial_sum(r, 2) as f64,
        )
    }

    #[inline]
    pub fn log_u(&self, r: usize, n_cur: usize) -> f64 {
        if r == 0 || r >= n_cur {
            return 0.0;
        }
        let rf = r as f64;
        rf.ln() + (rf - 1.0) * (2.0 * self.a1 + 3.0 * self.a2 * (rf - 2.0) + 4.0 * self.a3 * (self.r2 - rf + 1.0))
    }
}

/// `log u_i` for every row from the dense approximation; `n_cur` counts the
/// current column.
pub fn u_canfield(r: &[usize], c_rest: &[usize], n_cur: usize) -> Vec<f64> {
    let f = CanfieldFactor::from_cols(r.len(), c_rest);
    r.iter().map(|&x| f.log_u(x, n_cur)).collect()
}

/// `log u_i` for every row from the sparse approximation.
pub fn u_greenhill(r: &[usize], c_rest: &[usize], n_cur: usize) -> Vec<f64> {
    let f = GreenhillFactor::from_margins(r, c_rest);
    r.iter().map(|&x| f.log_u(x, n_cur)).collect()
}

/// `log u_i` under structural zeros. `support(i, k)` reports whether entry
/// `k` of the remaining columns (excluding the current one) may be one.
pub fn u_structural<F>(r: &[usize], c_rest: &[usize], support: F) -> Vec<f64>
where
    F: Fn(usize, usize) -> bool,
{
    let m = r.len();
    let n_rest = c_rest.len();
    let row_cnt: Vec<usize> = (0..m).map(|i| (0..n_rest).filter(|&k| support(i, k)).count()).collect();
    let col_cnt: Vec<usize> = (0..n_rest).map(|k| (0..m).filter(|&i| support(i, k)).count()).collect();
    let s1: usize = c_rest.iter().sum();
    let cells = (m * n_rest) as f64;
    let s1f = s1 as f64;
    let (eta, nu) = if n_rest == 0 || s1 == 0 || s1f >= cells {
        (0.0, 0.0)
    } else {
        let eta = cells / (s1f * (cells - s1f));
        let mean = s1f / n_rest as f64;
        (eta, eta * c_rest.iter().map(|&x| (x as f64 - mean).powi(2)).sum::<f64>())
    };
    (0..m)
        .map(|i| {
            let ri = r[i];
            if ri == 0 || ri > row_cnt[i] {
                return 0.0;
            }
            let mut zero_term = 0.0;
            for k in 0..n_rest {
                if !support(i, k) {
                    zero_term += c_rest[k] as f64 - col_cnt[k] as f64 * s1f / cells;
                }
            }
            let rf = ri as f64;
            rf.ln() - ((row_cnt[i] - ri + 1) as f64).ln() + eta * ((1.0 - nu) * (0.5 - rf + s1f / m as f64) + zero_term)
        })
        .collect()
}
