//! Margin bookkeeping, Gale-Ryser feasibility and the hard constraints that
//! cut the first column down to its exact support.
//!
//! A [`ConstraintSet`] describes the set of first columns `x` that satisfy
//!
//! ```text
//! x[pi_i] in A_i   and   x[pi_1] + ... + x[pi_i] in B_i   for i = 1..m
//! ```
//!
//! where `pi` orders the rows by decreasing row sum and every `B_i` is an
//! interval `[lower_i, c_1]`. With the bounds built here the set coincides
//! with the projection onto the first column of all matrices with the given
//! margins.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::BinaryMatrix;

/// Row and column sums of an `m x n` binary matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Margins {
    rows: Vec<usize>,
    cols: Vec<usize>,
    total: usize,
}

impl Margins {
    pub fn new(rows: Vec<usize>, cols: Vec<usize>) -> Result<Self> {
        let (m, n) = (rows.len(), cols.len());
        if let Some((i, &r)) = rows.iter().enumerate().find(|(_, &r)| r > n) {
            return Err(Error::MarginRange(format!("r[{i}] = {r} exceeds column count {n}")));
        }
        if let Some((j, &c)) = cols.iter().enumerate().find(|(_, &c)| c > m) {
            return Err(Error::MarginRange(format!("c[{j}] = {c} exceeds row count {m}")));
        }
        let sr: usize = rows.iter().sum();
        let sc: usize = cols.iter().sum();
        if sr != sc {
            return Err(Error::SumMismatch { rows: sr, cols: sc });
        }
        Ok(Self { rows, cols, total: sr })
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.cols.len()
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn cols(&self) -> &[usize] {
        &self.cols
    }

    /// Total number of ones, `d`.
    pub fn total(&self) -> usize {
        self.total
    }

    pub fn transpose(&self) -> Self {
        Self { rows: self.cols.clone(), cols: self.rows.clone(), total: self.total }
    }

    /// Margins with the columns rearranged so that new column `k` is old
    /// column `perm[k]`.
    pub fn permute_cols(&self, perm: &[usize]) -> Self {
        Self { rows: self.rows.clone(), cols: perm.iter().map(|&j| self.cols[j]).collect(), total: self.total }
    }
}

/// Conjugate of a column-sum vector: `cc[l-1] = #{j : c_j >= l}` for
/// `l = 1..=m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugateVector(pub Vec<usize>);

impl ConjugateVector {
    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

/// Column sums at or above `m` land in bucket `m`.
pub fn conjugate(c: &[usize], m: usize) -> ConjugateVector {
    let mut cc = vec![0usize; m];
    if m == 0 {
        return ConjugateVector(cc);
    }
    for &k in c {
        if k >= 1 {
            cc[k.min(m) - 1] += 1;
        }
    }
    for l in (0..m.saturating_sub(1)).rev() {
        cc[l] += cc[l + 1];
    }
    ConjugateVector(cc)
}

/// Row indices ordered by decreasing value, ties by increasing index.
pub fn descending_order(r: &[usize]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..r.len()).collect();
    order.sort_by(|&a, &b| r[b].cmp(&r[a]).then(a.cmp(&b)));
    order
}

/// Gale-Ryser test for the existence of a binary matrix with the given
/// margins.
pub fn gale_ryser_feasible(margins: &Margins) -> bool {
    let m = margins.m();
    let mut sorted = margins.rows().to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let cc = conjugate(margins.cols(), m);
    let (mut lhs, mut rhs) = (0usize, 0usize);
    for (&r, &k) in sorted.iter().zip(&cc.0) {
        lhs += r;
        rhs += k;
        if lhs > rhs {
            return false;
        }
    }
    true
}

/// Allowed values of a single entry of the column.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Allowed {
    Zero,
    One,
    Both,
    /// No value is allowed; the column has empty support.
    Neither,
}

impl Allowed {
    #[inline]
    pub fn permits(self, x: bool) -> bool {
        match self {
            Allowed::Zero => !x,
            Allowed::One => x,
            Allowed::Both => true,
            Allowed::Neither => false,
        }
    }
}

/// The permutation `pi` with per-position entry sets `A_i` and partial-sum
/// intervals `B_i = [lower_i, c_1]`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConstraintSet {
    pi: Vec<usize>,
    allowed: Vec<Allowed>,
    lower: Vec<usize>,
    b: Vec<i64>,
    c1: usize,
}

impl ConstraintSet {
    /// Fills the constraints for the current first column from rows already
    /// ordered by decreasing value. `conj_rest[l-1]` counts the remaining
    /// columns (excluding the current one) with sum at least `l`, and
    /// `n_cur` is the number of columns including the current one. Rows left
    /// out of `order` must have value zero; they are forced to zero.
    pub fn fill_standard(&mut self, order: &[usize], r: &[usize], conj_rest: &[usize], n_cur: usize, c1: usize) {
        let m = order.len();
        self.reset(m, c1);
        self.pi.extend_from_slice(order);
        let (mut cum_r, mut cum_cc) = (0i64, 0i64);
        for (i, &row) in order.iter().enumerate() {
            let val = r[row];
            self.allowed.push(if val == 0 {
                Allowed::Zero
            } else if val >= n_cur {
                if val == n_cur {
                    Allowed::One
                } else {
                    Allowed::Neither
                }
            } else {
                Allowed::Both
            });
            cum_r += val as i64;
            cum_cc += conj_rest.get(i).copied().unwrap_or(0) as i64;
            let b = cum_r - cum_cc;
            self.b.push(b);
            self.lower.push(if i + 1 == m { c1 } else { b.max(0) as usize });
        }
    }

    /// Fills the constraints for a first column under a structural-zero
    /// pattern with at most one zero per row and column. `cols` are the
    /// current column sums (first entry is the current column, sorted
    /// decreasingly) and `support(row, k)` reports whether entry `k` of the
    /// current submatrix may be one.
    pub fn fill_structural<F>(&mut self, r: &[usize], cols: &[usize], support: F)
    where
        F: Fn(usize, usize) -> bool,
    {
        let m = r.len();
        let n = cols.len();
        let c1 = cols.first().copied().unwrap_or(0);
        self.reset(m, c1);

        let zero_col: Vec<usize> = (0..m)
            .map(|i| (0..n).find(|&k| !support(i, k)).map_or(n + 1, |k| k + 1))
            .collect();
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| r[b].cmp(&r[a]).then(zero_col[a].cmp(&zero_col[b])).then(a.cmp(&b)));

        // tail[j] = c_{j+1} + ... + c_n with 1-based j
        let mut tail = vec![0i64; n + 1];
        for j in (0..n).rev() {
            tail[j] = tail[j + 1] + if j + 1 < n { cols[j + 1] as i64 } else { 0 };
        }
        // acc[j-1] = sum over placed rows of a[row, 2..=j]
        let mut acc = vec![0i64; n];
        let mut cum_r = 0i64;
        for (i, &row) in order.iter().enumerate() {
            let row_total = (0..n).filter(|&k| support(row, k)).count();
            let ar = if n > 0 && support(row, 0) { r[row] } else { 0 };
            self.allowed.push(if ar == 0 {
                Allowed::Zero
            } else if ar == row_total {
                Allowed::One
            } else if ar < row_total {
                Allowed::Both
            } else {
                Allowed::Neither
            });
            let mut prefix = 0i64;
            for (j, slot) in acc.iter_mut().enumerate() {
                if j >= 1 && support(row, j) {
                    prefix += 1;
                }
                *slot += prefix;
            }
            cum_r += r[row] as i64;
            let min_term = (0..n).map(|j| tail[j] + acc[j]).min().unwrap_or(0);
            let b = cum_r - min_term;
            self.b.push(b);
            self.lower.push(if i + 1 == m { c1 } else { b.max(0) as usize });
        }
        self.pi = order;
    }

    fn reset(&mut self, m: usize, c1: usize) {
        self.pi.clear();
        self.allowed.clear();
        self.lower.clear();
        self.b.clear();
        self.pi.reserve(m);
        self.allowed.reserve(m);
        self.lower.reserve(m);
        self.b.reserve(m);
        self.c1 = c1;
    }

    pub fn len(&self) -> usize {
        self.pi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pi.is_empty()
    }

    /// Row visited at position `i` (0-based).
    pub fn pi(&self) -> &[usize] {
        &self.pi
    }

    pub fn allowed(&self) -> &[Allowed] {
        &self.allowed
    }

    /// Lower ends of the partial-sum intervals; the upper end is `c1`.
    pub fn lower(&self) -> &[usize] {
        &self.lower
    }

    /// The raw `b_i` before clamping at zero.
    pub fn b(&self) -> &[i64] {
        &self.b
    }

    pub fn c1(&self) -> usize {
        self.c1
    }

    /// Restricts a row (by row index) to the value one.
    pub fn force_one(&mut self, row: usize) {
        if let Some(pos) = self.pi.iter().position(|&r| r == row) {
            self.allowed[pos] = match self.allowed[pos] {
                Allowed::Both | Allowed::One => Allowed::One,
                _ => Allowed::Neither,
            };
        }
    }

    /// Removes every value for a row, emptying the support.
    pub fn forbid(&mut self, row: usize) {
        if let Some(pos) = self.pi.iter().position(|&r| r == row) {
            self.allowed[pos] = Allowed::Neither;
        }
    }

    /// Membership of a column `x` (indexed by row).
    pub fn contains(&self, x: &[bool]) -> bool {
        if x.len() < self.rows() {
            return false;
        }
        let mut s = 0usize;
        for (i, &row) in self.pi.iter().enumerate() {
            if !self.allowed[i].permits(x[row]) {
                return false;
            }
            s += x[row] as usize;
            if s < self.lower[i] || s > self.c1 {
                return false;
            }
        }
        s == self.c1 && x.iter().filter(|&&b| b).count() == s
    }

    /// Length of the row-indexed columns this set describes. Rows missing
    /// from the order are forced to zero.
    pub fn rows(&self) -> usize {
        self.pi.iter().max().map_or(0, |&r| r + 1)
    }

    /// All members, by brute force over `{0,1}^m`. Intended for small `m`.
    pub fn members(&self) -> Vec<Vec<bool>> {
        let m = self.rows();
        assert!(m <= 24, "brute-force membership listing needs m <= 24");
        (0u32..(1u32 << m))
            .map(|bits| (0..m).map(|i| bits >> i & 1 == 1).collect::<Vec<bool>>())
            .filter(|x| self.contains(x))
            .collect()
    }
}

/// Exact first-column support constraints for the given margins.
pub fn build_constraints(margins: &Margins) -> Result<ConstraintSet> {
    if margins.n() == 0 {
        return Err(Error::InvalidArgument("margins have no columns".into()));
    }
    if !gale_ryser_feasible(margins) {
        return Err(Error::Infeasible);
    }
    let m = margins.m();
    let order = descending_order(margins.rows());
    let conj_rest = conjugate(&margins.cols()[1..], m);
    let mut set = ConstraintSet::default();
    set.fill_standard(&order, margins.rows(), conj_rest.as_slice(), margins.n(), margins.cols()[0]);
    Ok(set)
}

/// Checks that a support pattern has at most one zero in every row and
/// column.
pub fn check_single_zero_pattern(support: &BinaryMatrix) -> Result<()> {
    for i in 0..support.rows() {
        let zeros = (0..support.cols()).filter(|&j| !support.get(i, j)).count();
        if zeros > 1 {
            return Err(Error::UnsupportedPattern(format!("row {i} has {zeros} structural zeros")));
        }
    }
    for j in 0..support.cols() {
        let zeros = (0..support.rows()).filter(|&i| !support.get(i, j)).count();
        if zeros > 1 {
            return Err(Error::UnsupportedPattern(format!("column {j} has {zeros} structural zeros")));
        }
    }
    Ok(())
}

/// Exact first-column support under a structural-zero pattern `support`
/// (`true` where the weight is positive) with at most one zero per row and
/// column. Columns must already be sorted by decreasing sum.
pub fn build_constraints_structural(margins: &Margins, support: &BinaryMatrix) -> Result<ConstraintSet> {
    if support.rows() != margins.m() || support.cols() != margins.n() {
        return Err(Error::Dimension(format!(
            "support is {}x{}, margins are {}x{}",
            support.rows(),
            support.cols(),
            margins.m(),
            margins.n()
        )));
    }
    if margins.n() == 0 {
        return Err(Error::InvalidArgument("margins have no columns".into()));
    }
    if margins.cols().windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::InvalidArgument("structural constraints need columns sorted by decreasing sum".into()));
    }
    check_single_zero_pattern(support)?;
    let mut set = ConstraintSet::default();
    set.fill_structural(margins.rows(), margins.cols(), |i, k| support.get(i, k));
    Ok(set)
}
