//! Exact reference values for small or specially structured instances:
//! exhaustive enumeration, exact counts and permanents, the two-regular
//! recursion, constant-matrix alpha-permanents, and the MINSTD test
//! weights.
//!
//! Nothing here shares code with the sampler beyond the basic data types.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::logspace::{compensated_sum, ln_biguint};
use crate::margins::Margins;
use crate::matrix::BinaryMatrix;
use crate::weights::WeightMatrix;

/// Default cap on search nodes for exhaustive enumeration.
pub const DEFAULT_NODE_CAP: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Enumeration,
    ColumnDp,
    InclusionExclusion,
    SubsetDp,
    Recursion,
    ClosedForm,
}

/// An exact value with its natural log. `exact` holds the value itself when
/// it is rational.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactCount {
    pub ln: f64,
    pub exact: Option<BigRational>,
    pub method: Method,
}

impl ExactCount {
    fn integer(x: BigUint, method: Method) -> Self {
        Self { ln: ln_biguint(&x), exact: Some(BigRational::from_integer(BigInt::from(x))), method }
    }

    fn real(x: f64, method: Method) -> Self {
        Self { ln: x.ln(), exact: None, method }
    }

    /// The value when it is a nonnegative integer.
    pub fn as_biguint(&self) -> Option<BigUint> {
        let r = self.exact.as_ref()?;
        if !r.is_integer() || r.is_negative() {
            return None;
        }
        r.to_integer().to_biguint()
    }

    pub fn to_f64(&self) -> f64 {
        match &self.exact {
            Some(r) => r.to_f64().unwrap_or(f64::INFINITY),
            None => self.ln.exp(),
        }
    }

    /// Decimal digits for integers, `p/q` for other rationals, scientific
    /// notation otherwise.
    pub fn render(&self) -> String {
        match &self.exact {
            Some(r) if r.is_integer() => r.to_integer().to_string(),
            Some(r) => format!("{}/{}", r.numer(), r.denom()),
            None => format!("{:e}", self.ln.exp()),
        }
    }
}

/// All matrices with the given margins, optionally restricted to
/// `support`, by depth-first search over columns.
pub fn enumerate_omega(margins: &Margins, support: Option<&BinaryMatrix>, node_cap: u64) -> Result<Vec<BinaryMatrix>> {
    let mut out = Vec::new();
    visit_omega(margins, support, node_cap, |z| out.push(z.clone()))?;
    Ok(out)
}

/// Calls `f` on every matrix with the given margins (within `support`).
pub fn visit_omega<F>(margins: &Margins, support: Option<&BinaryMatrix>, node_cap: u64, mut f: F) -> Result<()>
where
    F: FnMut(&BinaryMatrix),
{
    let (m, n) = (margins.m(), margins.n());
    if let Some(s) = support {
        if s.rows() != m || s.cols() != n {
            return Err(Error::Dimension("support does not match the margins".into()));
        }
    }
    let mut state = Search {
        m,
        n,
        cols: margins.cols(),
        support,
        rem: margins.rows().to_vec(),
        z: BinaryMatrix::zeros(m, n),
        nodes: 0,
        cap: node_cap,
    };
    state.column(0, &mut f)
}

struct Search<'a> {
    m: usize,
    n: usize,
    cols: &'a [usize],
    support: Option<&'a BinaryMatrix>,
    rem: Vec<usize>,
    z: BinaryMatrix,
    nodes: u64,
    cap: u64,
}

impl Search<'_> {
    fn allowed(&self, i: usize, j: usize) -> bool {
        self.support.is_none_or(|s| s.get(i, j))
    }

    fn column<F: FnMut(&BinaryMatrix)>(&mut self, j: usize, f: &mut F) -> Result<()> {
        if j == self.n {
            if self.rem.iter().all(|&x| x == 0) {
                f(&self.z);
            }
            return Ok(());
        }
        // after this column, n - j - 1 columns remain
        let left = self.n - j - 1;
        if self.rem.iter().any(|&x| x > left + 1) {
            return Ok(());
        }
        self.rows(j, 0, self.cols[j], left, f)
    }

    fn rows<F: FnMut(&BinaryMatrix)>(&mut self, j: usize, i: usize, need: usize, left: usize, f: &mut F) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.cap {
            return Err(Error::TooLarge(format!("enumeration exceeded {} search nodes", self.cap)));
        }
        if i == self.m {
            return if need == 0 { self.column(j + 1, f) } else { Ok(()) };
        }
        if need > self.m - i {
            return Ok(());
        }
        let r = self.rem[i];
        // a row that needs every remaining column must take this one
        let must = r == left + 1;
        if r > 0 && need > 0 && self.allowed(i, j) {
            self.rem[i] -= 1;
            self.z.set(i, j, true);
            let res = self.rows(j, i + 1, need - 1, left, f);
            self.z.set(i, j, false);
            self.rem[i] += 1;
            res?;
        }
        if !must {
            self.rows(j, i + 1, need, left, f)?;
        }
        Ok(())
    }
}

/// Number of binary matrices with the given margins, by dynamic programming
/// over columns with the multiset of residual row sums as state.
pub fn count_uniform(margins: &Margins) -> BigUint {
    let n = margins.n();
    let mut cols = margins.cols().to_vec();
    cols.sort_unstable_by(|a, b| b.cmp(a));
    // counts[v] = rows with residual sum v
    let mut counts = vec![0u32; n + 1];
    for &r in margins.rows() {
        counts[r] += 1;
    }
    let mut memo = HashMap::new();
    count_dp(&cols, 0, &counts, &mut memo)
}

fn count_dp(cols: &[usize], j: usize, counts: &[u32], memo: &mut HashMap<(usize, Vec<u32>), BigUint>) -> BigUint {
    let left = cols.len() - j;
    if counts.iter().enumerate().any(|(v, &k)| k > 0 && v > left) {
        return BigUint::zero();
    }
    if j == cols.len() {
        return BigUint::one();
    }
    let key = (j, counts.to_vec());
    if let Some(v) = memo.get(&key) {
        return v.clone();
    }
    // distribute the column's ones over residual values 1..
    let mut total = BigUint::zero();
    let mut take = vec![0u32; counts.len()];
    distribute(cols, j, counts, 1, cols[j] as u32, &mut take, BigUint::one(), &mut total, memo);
    memo.insert(key, total.clone());
    total
}

#[allow(clippy::too_many_arguments)]
fn distribute(
    cols: &[usize],
    j: usize,
    counts: &[u32],
    v: usize,
    need: u32,
    take: &mut Vec<u32>,
    ways: BigUint,
    total: &mut BigUint,
    memo: &mut HashMap<(usize, Vec<u32>), BigUint>,
) {
    if need == 0 {
        let mut next = counts.to_vec();
        for (val, &t) in take.iter().enumerate() {
            if t > 0 {
                next[val] -= t;
                next[val - 1] += t;
            }
        }
        let sub = count_dp(cols, j + 1, &next, memo);
        *total += ways * sub;
        return;
    }
    if v >= counts.len() {
        return;
    }
    let avail: u32 = counts[v..].iter().sum();
    if avail < need {
        return;
    }
    for t in 0..=counts[v].min(need) {
        take[v] = t;
        let w = &ways * binomial_u(counts[v], t);
        distribute(cols, j, counts, v + 1, need - t, take, w, total, memo);
    }
    take[v] = 0;
}

fn binomial_u(n: u32, k: u32) -> BigUint {
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// `kappa = sum over Omega of prod w^z`. Unit weights use the column DP;
/// otherwise the matrices are enumerated and the products summed with
/// compensation.
pub fn exact_kappa(margins: &Margins, w: &WeightMatrix) -> Result<ExactCount> {
    if w.m() != margins.m() || w.n() != margins.n() {
        return Err(Error::Dimension("weights do not match the margins".into()));
    }
    if w.data().iter().all(|&x| x == 1.0) {
        return Ok(ExactCount::integer(count_uniform(margins), Method::ColumnDp));
    }
    let support = w.support();
    let mut terms = Vec::new();
    visit_omega(margins, Some(&support), DEFAULT_NODE_CAP, |z| {
        terms.push(z.ones().into_iter().map(|(i, j)| w.get(i, j)).product::<f64>());
    })?;
    Ok(ExactCount::real(compensated_sum(terms), Method::Enumeration))
}

/// Permanent of a square nonnegative matrix with `n <= 20`. Integer
/// matrices go through inclusion-exclusion in exact integer arithmetic;
/// others through a subset recursion that only adds nonnegative terms.
pub fn exact_permanent(w: &WeightMatrix) -> Result<ExactCount> {
    let n = w.m();
    if w.n() != n {
        return Err(Error::Dimension("permanent needs a square matrix".into()));
    }
    if n > 20 {
        return Err(Error::TooLarge(format!("permanent of order {n} exceeds 20")));
    }
    if n == 0 {
        return Ok(ExactCount::integer(BigUint::one(), Method::InclusionExclusion));
    }
    let integer = w.data().iter().all(|&x| x.fract() == 0.0 && x < 2f64.powi(40));
    if integer {
        let a: Vec<i64> = w.data().iter().map(|&x| x as i64).collect();
        let p = ryser(&a, n);
        return Ok(ExactCount::integer(p.to_biguint().unwrap_or_default(), Method::InclusionExclusion));
    }
    Ok(ExactCount::real(permanent_subset_dp(w), Method::SubsetDp))
}

fn ryser(a: &[i64], n: usize) -> BigInt {
    let mut total = BigInt::zero();
    let mut row_sums = vec![0i64; n];
    let mut gray = 0u64;
    for k in 1u64..(1u64 << n) {
        let next = k ^ (k >> 1);
        let j = (gray ^ next).trailing_zeros() as usize;
        let added = next & (1 << j) != 0;
        for (i, s) in row_sums.iter_mut().enumerate() {
            if added {
                *s += a[i * n + j];
            } else {
                *s -= a[i * n + j];
            }
        }
        gray = next;
        let mut prod = BigInt::one();
        let mut small: Option<i128> = Some(1);
        for &s in &row_sums {
            small = small.and_then(|p| p.checked_mul(s as i128));
            if small.is_none() {
                break;
            }
        }
        match small {
            Some(p) => prod = BigInt::from(p),
            None => {
                for &s in &row_sums {
                    prod *= s;
                }
            }
        }
        let bits = next.count_ones() as usize;
        if (n - bits).is_multiple_of(2) {
            total += prod;
        } else {
            total -= prod;
        }
    }
    total
}

fn permanent_subset_dp(w: &WeightMatrix) -> f64 {
    let n = w.m();
    let mut dp = vec![0.0f64; 1 << n];
    dp[0] = 1.0;
    for s in 1usize..(1 << n) {
        let row = s.count_ones() as usize - 1;
        let mut acc = 0.0;
        let mut bits = s;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            acc += dp[s & !(1 << j)] * w.get(row, j);
            bits &= bits - 1;
        }
        dp[s] = acc;
    }
    dp[(1 << n) - 1]
}

/// Number of `n x n` binary matrices with every row and column sum two.
pub fn two_regular_count(n: usize) -> BigUint {
    let mut h = vec![BigUint::zero(), BigUint::zero(), BigUint::one(), BigUint::from(6u32)];
    if n < h.len() {
        return h[n].clone();
    }
    for k in 4..=n {
        let kk = BigUint::from(k);
        let inner = BigUint::from(2 * k - 3) * &h[k - 2] + BigUint::from((k - 2) * (k - 2)) * &h[k - 3];
        let val = &kk * BigUint::from((k - 1) * (k - 1)) * inner / BigUint::from(2u32);
        h.push(val);
    }
    h.swap_remove(n)
}

/// `per_alpha` of the constant `n x n` matrix with entry `b`:
/// `b^n prod_{i=1}^n (i + alpha - 1)`, exact in the binary values of `b`
/// and `alpha`.
pub fn const_alpha_permanent(n: usize, b: f64, alpha: f64) -> Result<ExactCount> {
    if !(b >= 0.0 && b.is_finite()) {
        return Err(Error::InvalidArgument(format!("entry must be finite and nonnegative, got {b}")));
    }
    let (Some(br), Some(ar)) = (BigRational::from_float(b), BigRational::from_float(alpha)) else {
        return Err(Error::InvalidArgument("alpha must be finite".into()));
    };
    let mut acc = BigRational::one();
    for i in 1..=n {
        acc *= &br * (BigRational::from_integer(BigInt::from(i - 1)) + &ar);
    }
    let ln = rational_ln(&acc);
    Ok(ExactCount { ln, exact: Some(acc), method: Method::ClosedForm })
}

fn rational_ln(r: &BigRational) -> f64 {
    if r.is_zero() {
        return f64::NEG_INFINITY;
    }
    let num = r.numer().abs().to_biguint().unwrap_or_default();
    let den = r.denom().to_biguint().unwrap_or_default();
    ln_biguint(&num) - ln_biguint(&den)
}

/// Exact count for `r = (R, 1, ..., 1)` of length `m` and
/// `c = (C, 1, ..., 1)` of length `n`.
pub fn pathological_count(m: usize, n: usize, big_r: usize, big_c: usize) -> Result<BigUint> {
    if big_r == 0 || big_c == 0 || big_r > n || big_c > m || big_r + m != big_c + n {
        return Err(Error::InvalidArgument("margins must be (R,1,...,1) and (C,1,...,1) with equal sums".into()));
    }
    let fact = |k: usize| (1..=k).fold(BigUint::one(), |acc, i| acc * BigUint::from(i));
    let choose = |a: usize, b: usize| if b > a { BigUint::zero() } else { binomial_u(a as u32, b as u32) };
    let without = if n > big_r { choose(n - 1, big_r) * choose(m - 1, big_c) * fact(n - 1 - big_r) } else { BigUint::zero() };
    let with = choose(n - 1, big_r - 1) * choose(m - 1, big_c - 1) * fact(n - big_r);
    Ok(without + with)
}

/// Margins `(R, 1, ..., 1)` and `(C, 1, ..., 1)`.
pub fn pathological_margins(m: usize, n: usize, big_r: usize, big_c: usize) -> Result<Margins> {
    let mut r = vec![1; m];
    let mut c = vec![1; n];
    r[0] = big_r;
    c[0] = big_c;
    Margins::new(r, c)
}

/// Row and column sums of the 13 x 17 finch incidence matrix.
pub fn finch_margins() -> Margins {
    Margins::new(
        vec![14, 13, 14, 10, 12, 2, 10, 1, 10, 11, 6, 2, 17],
        vec![4, 4, 11, 10, 10, 8, 9, 10, 8, 9, 3, 10, 4, 7, 9, 3, 3],
    )
    .expect("finch margins are consistent")
}

pub const MINSTD_MODULUS: u64 = (1 << 31) - 1;
pub const MINSTD_MULTIPLIER: u64 = 16807;

/// `R(1), ..., R(count)` of the MINSTD generator started from `R(0) = 1`.
pub fn minstd_sequence(count: usize) -> Vec<u64> {
    let mut x = 1u64;
    (0..count)
        .map(|_| {
            x = x * MINSTD_MULTIPLIER % MINSTD_MODULUS;
            x
        })
        .collect()
}

/// The canonical pseudo-random `m x n` matrix
/// `y_ij = R((j - 1) m + i) / (2^31 - 1)`, filled column by column.
pub fn minstd_canonical(m: usize, n: usize) -> WeightMatrix {
    let seq = minstd_sequence(m * n);
    let mut data = vec![0.0; m * n];
    for j in 0..n {
        for i in 0..m {
            data[i * n + j] = seq[j * m + i] as f64 / MINSTD_MODULUS as f64;
        }
    }
    WeightMatrix::new(m, n, data).expect("MINSTD values lie in (0, 1)")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WeightClass {
    I,
    II,
    III,
    IV,
}

impl WeightClass {
    pub const ALL: [WeightClass; 4] = [WeightClass::I, WeightClass::II, WeightClass::III, WeightClass::IV];
}

/// Test weights from a canonical matrix: ones, `y + 1`, `y`, or
/// `-1{y < 0.99} log y`.
pub fn weight_class(y: &WeightMatrix, class: WeightClass) -> WeightMatrix {
    let data = y
        .data()
        .iter()
        .map(|&v| match class {
            WeightClass::I => 1.0,
            WeightClass::II => v + 1.0,
            WeightClass::III => v,
            WeightClass::IV => {
                if v < 0.99 {
                    -v.ln()
                } else {
                    0.0
                }
            }
        })
        .collect();
    WeightMatrix::new(y.m(), y.n(), data).expect("class weights are nonnegative")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn margins(r: &[usize], c: &[usize]) -> Margins {
        Margins::new(r.to_vec(), c.to_vec()).unwrap()
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(enumerate_omega(&margins(&[1, 1], &[1, 1]), None, DEFAULT_NODE_CAP).unwrap().len(), 2);
        assert_eq!(enumerate_omega(&margins(&[1, 1, 1], &[1, 1, 1]), None, DEFAULT_NODE_CAP).unwrap().len(), 6);
        let all = enumerate_omega(&margins(&[2, 2, 2], &[2, 2, 2]), None, DEFAULT_NODE_CAP).unwrap();
        assert_eq!(all.len(), 6);
        for z in &all {
            assert_eq!(z.row_sums(), vec![2, 2, 2]);
            assert_eq!(z.col_sums(), vec![2, 2, 2]);
        }
    }

    #[test]
    fn enumeration_respects_support() {
        let mut s = BinaryMatrix::zeros(3, 3);
        for i in 0..3 {
            for j in 0..3 {
                s.set(i, j, i != j);
            }
        }
        let d = enumerate_omega(&margins(&[1, 1, 1], &[1, 1, 1]), Some(&s), DEFAULT_NODE_CAP).unwrap();
        assert_eq!(d.len(), 2);
    }

    #[test]
    fn enumeration_cap() {
        let mg = margins(&[4; 8], &[4; 8]);
        assert!(matches!(enumerate_omega(&mg, None, 1000), Err(Error::TooLarge(_))));
    }

    #[test]
    fn column_dp_agrees_with_enumeration() {
        for (r, c) in [
            (vec![2, 1, 1], vec![1, 2, 1]),
            (vec![3, 2, 2, 1], vec![2, 2, 2, 2]),
            (vec![1, 0, 2, 3], vec![3, 1, 2]),
            (vec![2, 2, 2, 2], vec![2, 2, 2, 2]),
        ] {
            let mg = margins(&r, &c);
            let e = enumerate_omega(&mg, None, DEFAULT_NODE_CAP).unwrap().len();
            assert_eq!(count_uniform(&mg), BigUint::from(e));
        }
    }

    #[test]
    fn finch_count() {
        let n = count_uniform(&finch_margins());
        assert_eq!(n.to_string(), "67149106137567626");
    }

    #[test]
    fn weighted_kappa() {
        let w = WeightMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let k = exact_kappa(&margins(&[1, 1], &[1, 1]), &w).unwrap();
        assert!((k.to_f64() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn permanents() {
        let id = WeightMatrix::from_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
        assert_eq!(exact_permanent(&id).unwrap().as_biguint(), Some(BigUint::one()));
        assert_eq!(exact_permanent(&WeightMatrix::ones(4, 4)).unwrap().as_biguint(), Some(BigUint::from(24u32)));
        let w = WeightMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(exact_permanent(&w).unwrap().as_biguint(), Some(BigUint::from(10u32)));
        let f = WeightMatrix::from_rows(&[vec![0.5, 2.0], vec![3.0, 0.25]]).unwrap();
        assert!((exact_permanent(&f).unwrap().to_f64() - 6.125).abs() < 1e-15);
    }

    #[test]
    fn permanent_routes_agree() {
        let y = minstd_canonical(7, 7);
        let scaled = WeightMatrix::new(7, 7, y.data().iter().map(|v| (v * 10.0).floor()).collect()).unwrap();
        let exact = exact_permanent(&scaled).unwrap().to_f64();
        let dp = permanent_subset_dp(&scaled);
        assert!((exact - dp).abs() <= 1e-12 * exact);
    }

    #[test]
    fn permanent_is_kappa_with_unit_margins() {
        let w = minstd_canonical(5, 5);
        let p = exact_permanent(&w).unwrap().to_f64();
        let k = exact_kappa(&margins(&[1; 5], &[1; 5]), &w).unwrap().to_f64();
        assert!((p - k).abs() <= 1e-12 * p);
    }

    #[test]
    fn two_regular_values() {
        assert_eq!(two_regular_count(1), BigUint::zero());
        assert_eq!(two_regular_count(2), BigUint::one());
        assert_eq!(two_regular_count(3), BigUint::from(6u32));
        assert_eq!(two_regular_count(4), BigUint::from(90u32));
        for n in 2..=6 {
            assert_eq!(two_regular_count(n), count_uniform(&margins(&vec![2; n], &vec![2; n])));
        }
    }

    #[test]
    fn constant_alpha_permanents() {
        assert_eq!(const_alpha_permanent(3, 1.0, 1.0).unwrap().as_biguint(), Some(BigUint::from(6u32)));
        assert_eq!(const_alpha_permanent(3, 1.0, 2.0).unwrap().as_biguint(), Some(BigUint::from(24u32)));
        let big = const_alpha_permanent(500, 1.0, 0.5).unwrap();
        let log10 = big.ln / std::f64::consts::LN_10;
        assert_eq!(log10.floor(), 1132.0);
        assert!((10f64.powf(log10 - 1132.0) - 3.078).abs() < 5e-4);
        for n in 1..=6 {
            let c = const_alpha_permanent(n, 1.5, 1.0).unwrap().to_f64();
            let p = exact_permanent(&WeightMatrix::new(n, n, vec![1.5; n * n]).unwrap()).unwrap().to_f64();
            assert!((c - p).abs() <= 1e-12 * p);
        }
    }

    #[test]
    fn pathological_formula_matches_enumeration() {
        for (m, n, r1, c1) in [(3, 4, 2, 1), (4, 5, 3, 2), (5, 5, 3, 3), (4, 6, 4, 2)] {
            let mg = pathological_margins(m, n, r1, c1).unwrap();
            let e = enumerate_omega(&mg, None, DEFAULT_NODE_CAP).unwrap().len();
            assert_eq!(pathological_count(m, n, r1, c1).unwrap(), BigUint::from(e), "{m}x{n}");
        }
    }

    #[test]
    fn minstd_values() {
        let seq = minstd_sequence(2);
        assert_eq!(seq, vec![16807, 282475249]);
        let y = minstd_canonical(3, 2);
        assert_eq!(y.get(0, 0), 16807.0 / MINSTD_MODULUS as f64);
        assert_eq!(y.get(1, 0), 282475249.0 / MINSTD_MODULUS as f64);
        let seq4 = minstd_sequence(4);
        assert_eq!(y.get(0, 1), seq4[3] as f64 / MINSTD_MODULUS as f64);
    }

    #[test]
    fn weight_classes() {
        let y = WeightMatrix::from_rows(&[vec![0.25, 0.995]]).unwrap();
        assert_eq!(weight_class(&y, WeightClass::I).data(), &[1.0, 1.0]);
        assert_eq!(weight_class(&y, WeightClass::II).data(), &[1.25, 1.995]);
        assert_eq!(weight_class(&y, WeightClass::III).data(), &[0.25, 0.995]);
        let iv = weight_class(&y, WeightClass::IV);
        assert!((iv.get(0, 0) + 0.25f64.ln()).abs() < 1e-15);
        assert_eq!(iv.get(0, 1), 0.0);
    }

    #[test]
    fn class_iv_zero_density() {
        let iv = weight_class(&minstd_canonical(500, 500), WeightClass::IV);
        let zeros = iv.data().iter().filter(|&&x| x == 0.0).count() as f64 / 250_000.0;
        assert!((zeros - 0.01).abs() < 0.005, "{zeros}");
    }
}
