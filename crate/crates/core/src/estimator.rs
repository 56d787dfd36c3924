//! Importance weights, the count and expectation estimators, and their
//! diagnostics.
//!
//! All inputs are log importance weights `log f`; dead samples carry
//! `-inf` and count towards `T` with `f = 0`.

use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::logspace::log_sum_exp;
use crate::matrix::BinaryMatrix;
use crate::proposal::PreparedProblem;
use crate::weights::WeightMatrix;

/// A positive number stored as its base-10 log, for values far outside
/// the `f64` range.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct LogBigNumber {
    pub log10: f64,
}

impl LogBigNumber {
    pub const ZERO: Self = Self { log10: f64::NEG_INFINITY };

    pub fn from_ln(ln: f64) -> Self {
        Self { log10: ln / std::f64::consts::LN_10 }
    }

    pub fn ln(self) -> f64 {
        self.log10 * std::f64::consts::LN_10
    }

    pub fn is_zero(self) -> bool {
        self.log10 == f64::NEG_INFINITY
    }

    /// `(a, b)` with `value = a * 10^b` and `1 <= a < 10`; zero gives `(0, 0)`.
    pub fn mantissa_exp(self) -> (f64, i64) {
        if !self.log10.is_finite() {
            return (0.0, 0);
        }
        let mut b = self.log10.floor();
        let mut a = 10f64.powf(self.log10 - b);
        if a >= 10.0 {
            a /= 10.0;
            b += 1.0;
        }
        (a, b as i64)
    }

    /// Value as `f64`; overflows to infinity.
    pub fn to_f64(self) -> f64 {
        10f64.powf(self.log10)
    }
}

impl fmt::Display for LogBigNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.mantissa_exp();
        write!(f, "{a:.6}e{b}")
    }
}

impl Serialize for LogBigNumber {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let (a, b) = self.mantissa_exp();
        let mut st = serializer.serialize_struct("LogBigNumber", 3)?;
        st.serialize_field("mantissa", &a)?;
        st.serialize_field("exp10", &b)?;
        st.serialize_field("log10", &if self.log10.is_finite() { Some(self.log10) } else { None })?;
        st.end()
    }
}

/// `sum_ij z_ij log w_ij - log_q`; `-inf` when `log_q` is `-inf`.
pub fn log_importance_weight(z: &BinaryMatrix, w: &WeightMatrix, log_q: f64) -> f64 {
    if log_q == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    z.ones().into_iter().map(|(i, j)| w.ln(i, j)).sum::<f64>() - log_q
}

/// Estimates and diagnostics over `T` importance weights.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimateSummary {
    #[serde(rename = "T")]
    pub t: u64,
    pub alive: u64,
    pub dead_fraction: f64,
    /// `T^-1 sum f`.
    pub kappa_hat: LogBigNumber,
    /// Standard error `kappa_hat * sqrt(cv2 / T)`.
    pub se: LogBigNumber,
    /// `sum (f / kappa_hat - 1)^2 / (T - 1)`; needs two samples and one
    /// alive.
    pub cv2_hat: Option<f64>,
    /// `max f / min f - 1` over alive samples.
    pub delta_hat: Option<f64>,
    /// The min in `delta_hat` skipped dead samples.
    pub delta_excludes_dead: bool,
    /// `T / (1 + cv2_hat)`.
    pub ess: Option<f64>,
    /// `sum f h / sum f` when `h` was given.
    pub mu_hat: Option<f64>,
    pub log_mu_hat: Option<f64>,
    /// `kappa_hat * mu_hat`, with its standard error and relative error in
    /// percent, when `h` was given.
    pub product_hat: Option<LogBigNumber>,
    pub product_se: Option<LogBigNumber>,
    pub rel_se_pct: Option<f64>,
}

/// Log-mean and squared coefficient of variation of `exp(xs)` by two passes.
fn log_mean_cv2(xs: &[f64]) -> (f64, Option<f64>) {
    let t = xs.len() as f64;
    let lm = log_sum_exp(xs) - t.ln();
    if lm == f64::NEG_INFINITY || xs.len() < 2 {
        return (lm, None);
    }
    let ss: f64 = xs.iter().map(|&x| ((x - lm).exp() - 1.0).powi(2)).sum();
    (lm, Some(ss / (t - 1.0)))
}

/// Summarizes log importance weights `log_f` and, optionally, log values of
/// a nonnegative statistic `h` of each sample.
pub fn estimate(log_f: &[f64], log_h: Option<&[f64]>) -> Result<EstimateSummary> {
    if log_f.is_empty() {
        return Err(Error::InvalidArgument("no samples".into()));
    }
    if let Some(h) = log_h {
        if h.len() != log_f.len() {
            return Err(Error::Dimension(format!("{} statistic values for {} samples", h.len(), log_f.len())));
        }
    }
    let t = log_f.len();
    let alive: Vec<f64> = log_f.iter().copied().filter(|x| *x > f64::NEG_INFINITY).collect();
    let dead = t - alive.len();
    let (lk, cv2) = log_mean_cv2(log_f);
    let tf = t as f64;
    let se = match cv2 {
        Some(c) => LogBigNumber::from_ln(lk + 0.5 * (c / tf).ln()),
        None => LogBigNumber::ZERO,
    };
    let delta_hat = if alive.is_empty() {
        None
    } else {
        let max = alive.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = alive.iter().copied().fold(f64::INFINITY, f64::min);
        Some((max - min).exp_m1())
    };

    let mut out = EstimateSummary {
        t: t as u64,
        alive: alive.len() as u64,
        dead_fraction: dead as f64 / tf,
        kappa_hat: LogBigNumber::from_ln(lk),
        se,
        cv2_hat: cv2,
        delta_hat,
        delta_excludes_dead: dead > 0,
        ess: cv2.map(|c| tf / (1.0 + c)),
        mu_hat: None,
        log_mu_hat: None,
        product_hat: None,
        product_se: None,
        rel_se_pct: None,
    };

    if let Some(h) = log_h {
        let lg: Vec<f64> = log_f.iter().zip(h).map(|(&f, &h)| if f == f64::NEG_INFINITY { f } else { f + h }).collect();
        let (lp, pcv2) = log_mean_cv2(&lg);
        if lk > f64::NEG_INFINITY {
            out.log_mu_hat = Some(lp - lk);
            out.mu_hat = Some((lp - lk).exp());
        }
        out.product_hat = Some(LogBigNumber::from_ln(lp));
        if let Some(c) = pcv2 {
            out.product_se = Some(LogBigNumber::from_ln(lp + 0.5 * (c / tf).ln()));
            out.rel_se_pct = Some((c / tf).sqrt() * 100.0);
        }
    }
    Ok(out)
}

/// Streaming, mergeable summary of log importance weights. Values are kept
/// relative to a running shift so that sums of `f` and squared deviations
/// never overflow; merging uses the pairwise update for means and second
/// moments.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightAccumulator {
    pub count: u64,
    pub dead: u64,
    shift: f64,
    mean: f64,
    m2: f64,
    pub max: f64,
    pub min: f64,
}

impl Default for WeightAccumulator {
    fn default() -> Self {
        Self { count: 0, dead: 0, shift: f64::NEG_INFINITY, mean: 0.0, m2: 0.0, max: f64::NEG_INFINITY, min: f64::INFINITY }
    }
}

impl WeightAccumulator {
    pub fn push(&mut self, log_f: f64) {
        let mut one = Self { count: 1, ..Default::default() };
        if log_f == f64::NEG_INFINITY {
            one.dead = 1;
        } else {
            one.shift = log_f;
            one.mean = 1.0;
            one.max = log_f;
            one.min = log_f;
        }
        self.merge(&one);
    }

    /// Rescales the shifted moments to a new shift `s >= self.shift`.
    fn rescaled(&self, s: f64) -> (f64, f64) {
        if self.shift == f64::NEG_INFINITY {
            return (0.0, 0.0);
        }
        let k = (self.shift - s).exp();
        (self.mean * k, self.m2 * k * k)
    }

    pub fn merge(&mut self, other: &Self) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let s = self.shift.max(other.shift);
        let (ma, qa) = self.rescaled(s);
        let (mb, qb) = other.rescaled(s);
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        let d = mb - ma;
        self.mean = ma + d * nb / n;
        self.m2 = qa + qb + d * d * na * nb / n;
        self.shift = s;
        self.count += other.count;
        self.dead += other.dead;
        self.max = self.max.max(other.max);
        self.min = self.min.min(other.min);
    }

    /// `log kappa_hat`.
    pub fn log_mean(&self) -> f64 {
        if self.shift == f64::NEG_INFINITY || self.mean <= 0.0 {
            return f64::NEG_INFINITY;
        }
        self.shift + self.mean.ln()
    }

    pub fn cv2(&self) -> Option<f64> {
        (self.count >= 2 && self.mean > 0.0).then(|| self.m2 / (self.count as f64 - 1.0) / (self.mean * self.mean))
    }

    pub fn delta(&self) -> Option<f64> {
        (self.max > f64::NEG_INFINITY).then(|| (self.max - self.min).exp_m1())
    }
}

/// Number of cycles of the permutation matrix `z`.
pub fn cycle_count(z: &BinaryMatrix) -> Result<usize> {
    let n = z.rows();
    if z.cols() != n {
        return Err(Error::NotPermutation);
    }
    let mut next = vec![usize::MAX; n];
    for (i, j) in z.ones() {
        if next[j] != usize::MAX {
            return Err(Error::NotPermutation);
        }
        next[j] = i;
    }
    if next.contains(&usize::MAX) || z.row_sums().iter().any(|&s| s != 1) {
        return Err(Error::NotPermutation);
    }
    let mut seen = vec![false; n];
    let mut cycles = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        cycles += 1;
        let mut k = start;
        while !seen[k] {
            seen[k] = true;
            k = next[k];
        }
    }
    Ok(cycles)
}

/// Estimates `per_alpha(w) = sum over permutations of alpha^cycles * prod w`
/// from `samples` draws of a problem prepared with unit margins.
pub fn alpha_permanent(prob: &PreparedProblem, alpha: f64, seed: u64, samples: u64) -> Result<EstimateSummary> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!("alpha must be positive, got {alpha}")));
    }
    let m = prob.margins();
    if m.m() != m.n() || m.rows().iter().chain(m.cols()).any(|&x| x != 1) {
        return Err(Error::InvalidArgument("alpha-permanents need a square problem with unit margins".into()));
    }
    let la = alpha.ln();
    let pairs = prob.run(seed, 0..samples, |_, ws, alive, _, lf| {
        if !alive {
            return (f64::NEG_INFINITY, 0.0);
        }
        let cycles = cycle_count(&ws.matrix(prob)).expect("sampler returns permutations");
        (lf, cycles as f64 * la)
    });
    let (lf, lh): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    estimate(&lf, Some(&lh))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn big_number_formatting() {
        let x = LogBigNumber::from_ln(6.722e16f64.ln());
        let (a, b) = x.mantissa_exp();
        assert_eq!(b, 16);
        assert!((a - 6.722).abs() < 1e-9);
        assert_eq!(x.to_string(), "6.722000e16");
        assert_eq!(LogBigNumber::ZERO.mantissa_exp(), (0.0, 0));
        let huge = LogBigNumber { log10: 1132.0 + 3.078f64.log10() };
        assert_eq!(huge.mantissa_exp().1, 1132);
        let json = serde_json::to_value(huge).unwrap();
        assert_eq!(json["exp10"], 1132);
    }

    #[test]
    fn constant_weights() {
        let s = estimate(&[2f64.ln(); 10], None).unwrap();
        assert!((s.kappa_hat.to_f64() - 2.0).abs() < 1e-12);
        assert!(s.cv2_hat.unwrap().abs() < 1e-15);
        assert!(s.delta_hat.unwrap().abs() < 1e-15);
    }

    #[test]
    fn two_weights_by_hand() {
        let s = estimate(&[0.0, 3f64.ln()], None).unwrap();
        assert!((s.kappa_hat.to_f64() - 2.0).abs() < 1e-12);
        assert!((s.delta_hat.unwrap() - 2.0).abs() < 1e-12);
        assert!((s.cv2_hat.unwrap() - 0.5).abs() < 1e-12);
        assert!((s.ess.unwrap() - 2.0 / 1.5).abs() < 1e-12);
    }

    #[test]
    fn dead_samples_count_as_zero() {
        let s = estimate(&[0.0, f64::NEG_INFINITY], None).unwrap();
        assert!((s.kappa_hat.to_f64() - 0.5).abs() < 1e-12);
        assert_eq!(s.dead_fraction, 0.5);
        assert!(s.delta_excludes_dead);
        assert_eq!(s.delta_hat, Some(0.0));
        let all_dead = estimate(&[f64::NEG_INFINITY; 3], None).unwrap();
        assert!(all_dead.kappa_hat.is_zero());
        assert!(all_dead.cv2_hat.is_none() && all_dead.delta_hat.is_none());
    }

    #[test]
    fn ratio_estimator() {
        // f = (1, 3), h = (2, 4): mu = (2 + 12) / 4
        let s = estimate(&[0.0, 3f64.ln()], Some(&[2f64.ln(), 4f64.ln()])).unwrap();
        assert!((s.mu_hat.unwrap() - 3.5).abs() < 1e-12);
        assert!((s.product_hat.unwrap().to_f64() - 7.0).abs() < 1e-12);
        // sigma^2 = ((2-7)^2 + (12-7)^2) / 1 = 50
        let se = s.product_se.unwrap().to_f64();
        assert!((se - (50.0f64 / 2.0).sqrt()).abs() < 1e-10);
        assert!((s.rel_se_pct.unwrap() - 5.0 / 7.0 * 100.0).abs() < 1e-9);
    }

    #[test]
    fn cycles() {
        let id = BinaryMatrix::from_rows(&[vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]]).unwrap();
        assert_eq!(cycle_count(&id).unwrap(), 4);
        let full = BinaryMatrix::from_rows(&[vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]]).unwrap();
        assert_eq!(cycle_count(&full).unwrap(), 1);
        let swap = BinaryMatrix::from_rows(&[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 1]]).unwrap();
        assert_eq!(cycle_count(&swap).unwrap(), 2);
        let bad = BinaryMatrix::from_rows(&[vec![1, 1], vec![0, 0]]).unwrap();
        assert!(cycle_count(&bad).is_err());
    }

    #[test]
    fn importance_weight_uses_given_weights() {
        let z = BinaryMatrix::from_rows(&[vec![1, 0], vec![0, 1]]).unwrap();
        let w = WeightMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let lf = log_importance_weight(&z, &w, 0.5f64.ln());
        assert!((lf - 12f64.ln()).abs() < 1e-15);
        assert_eq!(log_importance_weight(&z, &w, f64::NEG_INFINITY), f64::NEG_INFINITY);
    }

    fn log_weights() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(prop_oneof![9 => -50.0f64..50.0, 1 => Just(f64::NEG_INFINITY)], 2..60)
    }

    proptest! {
        #[test]
        fn diagnostics_are_scale_invariant(lf in log_weights(), shift in -300.0f64..300.0) {
            let a = estimate(&lf, None).unwrap();
            let shifted: Vec<f64> = lf.iter().map(|x| x + shift).collect();
            let b = estimate(&shifted, None).unwrap();
            if let (Some(x), Some(y)) = (a.cv2_hat, b.cv2_hat) {
                prop_assert!((x - y).abs() <= 1e-9 * x.max(1.0));
            }
            if let (Some(x), Some(y)) = (a.delta_hat, b.delta_hat) {
                prop_assert!((x.ln_1p() - y.ln_1p()).abs() <= 1e-9);
            }
        }

        #[test]
        fn accumulator_merges_associatively(lf in log_weights(), split in 0usize..60) {
            let split = split.min(lf.len());
            let mut whole = WeightAccumulator::default();
            lf.iter().for_each(|&x| whole.push(x));
            let (mut left, mut right) = (WeightAccumulator::default(), WeightAccumulator::default());
            lf[..split].iter().for_each(|&x| left.push(x));
            lf[split..].iter().for_each(|&x| right.push(x));
            left.merge(&right);
            let batch = estimate(&lf, None).unwrap();
            prop_assert_eq!(left.count, whole.count);
            prop_assert_eq!(left.dead, whole.dead);
            let lm = batch.kappa_hat.ln();
            if lm.is_finite() {
                prop_assert!((left.log_mean() - whole.log_mean()).abs() < 1e-12 * lm.abs().max(1.0));
                prop_assert!((left.log_mean() - lm).abs() < 1e-12 * lm.abs().max(1.0));
                if let (Some(x), Some(y)) = (left.cv2(), batch.cv2_hat) {
                    prop_assert!((x - y).abs() <= 1e-9 * y.max(1.0));
                }
            }
        }
    }
}
