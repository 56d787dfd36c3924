//! Column-by-column proposal: the dynamic program for a single column and
//! the sequential sampler and evaluator for whole matrices.
//!
//! Each column is drawn from
//!
//! ```text
//! Q(x) ∝ prod_i (u_i v_i)^x_i  restricted to the constraint set
//! ```
//!
//! represented as a Markov chain over partial sums `S_i = x[pi_1] + ... +
//! x[pi_i]`. Backward messages are kept in linear scale with per-level
//! normalization, so a column costs `O(m c_1)` to build and `O(m)` to draw.

use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{u_structural, Approximation, CanfieldFactor, GreenhillFactor};
use crate::error::{Error, Result};
use crate::margins::{check_single_zero_pattern, conjugate, descending_order, gale_ryser_feasible, Allowed, ConstraintSet, Margins};
use crate::matrix::BinaryMatrix;
use crate::rowpoly::{precompute_g, v_row, v_row_structural, GTable, VFactor};
use crate::weights::{canonicalize, column_order, CanonicalWeights, ColumnOrderMode, WeightMatrix, DEFAULT_MAX_ITER, DEFAULT_TOL};

/// Weights within this distance of one everywhere are treated as flat and
/// the `v` factors are skipped.
const FLAT_TOL: f64 = 1e-10;

/// Rescale the running probability product before it underflows.
const RESCALE_BELOW: f64 = 1e-250;

/// How zero weights are handled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZeroMode {
    /// Zeros only enter through the `v` factors; the proposal support may
    /// exceed the target support.
    #[default]
    General,
    /// Exact support for patterns with at most one zero per row and column.
    Structural,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerOptions {
    pub approx: Approximation,
    pub canonicalize: bool,
    pub column_order: ColumnOrderMode,
    pub zeros: ZeroMode,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SamplerOptions {
    fn default() -> Self {
        Self {
            approx: Approximation::Canfield,
            canonicalize: true,
            column_order: ColumnOrderMode::Descend,
            zeros: ZeroMode::General,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

/// The instance to sample: margins, weights and options.
#[derive(Clone, Debug)]
pub struct ProblemSpec {
    pub margins: Margins,
    pub weights: WeightMatrix,
    pub options: SamplerOptions,
}

impl ProblemSpec {
    pub fn new(margins: Margins, weights: WeightMatrix, options: SamplerOptions) -> Self {
        Self { margins, weights, options }
    }

    /// Unit weights with default options.
    pub fn uniform(margins: Margins) -> Self {
        let weights = WeightMatrix::ones(margins.m(), margins.n());
        Self::new(margins, weights, SamplerOptions::default())
    }
}

/// One proposed matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub index: u64,
    pub alive: bool,
    pub log_q: f64,
    pub log_f: f64,
    /// The matrix in the original column order; partial when not alive.
    #[serde(skip)]
    pub z: Option<BinaryMatrix>,
}

/// Independent random stream for sample `index` under a master seed.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Markov-chain representation of one column's proposal.
#[derive(Clone, Debug, Default)]
pub struct ColumnChain {
    c1: usize,
    rows: Vec<usize>,
    lower: Vec<usize>,
    p: Vec<f64>,
    q: Vec<f64>,
    beta: Vec<f64>,
    alive: bool,
}

impl ColumnChain {
    /// Builds the chain for a constraint set with per-row `log u` and
    /// `log v` (indexed by row). Returns `None` when the proposal has empty
    /// support.
    pub fn build(constraints: &ConstraintSet, log_u: &[f64], log_v: &[f64]) -> Option<Self> {
        let mut chain = Self::default();
        chain.reset(constraints.c1());
        for (k, &row) in constraints.pi().iter().enumerate() {
            chain.push_logit(row, constraints.allowed()[k], constraints.lower()[k], log_u[row] + log_v[row]);
        }
        chain.finish().then_some(chain)
    }

    fn reset(&mut self, c1: usize) {
        self.c1 = c1;
        self.rows.clear();
        self.lower.clear();
        self.p.clear();
        self.q.clear();
        self.alive = false;
    }

    /// Appends a position with the given one/zero weights.
    #[inline]
    fn push(&mut self, row: usize, lower: usize, p: f64, q: f64) {
        self.rows.push(row);
        self.lower.push(lower);
        self.p.push(p);
        self.q.push(q);
    }

    #[inline]
    fn push_logit(&mut self, row: usize, allowed: Allowed, lower: usize, logit: f64) {
        let (p, q) = match allowed {
            Allowed::Zero => (0.0, 1.0),
            Allowed::One => (1.0, 0.0),
            Allowed::Neither => (0.0, 0.0),
            Allowed::Both => logistic(logit),
        };
        self.push(row, lower, p, q);
    }

    /// Reachable partial sums after the first `i` positions.
    fn level_range(&self, i: usize) -> (usize, usize) {
        let m = self.rows.len();
        let lo = if i == 0 { 0 } else { self.lower[i - 1].max(self.c1.saturating_sub(m - i)) };
        (lo, self.c1.min(i))
    }

    /// Backward pass; returns whether the chain has nonempty support.
    /// Level `i` holds one cell per partial sum `0..=c1` plus a pad. Only
    /// the reachable cells and their two neighbours are written; the rest
    /// keep stale values and are never read.
    fn finish(&mut self) -> bool {
        let m = self.rows.len();
        let c1 = self.c1;
        let st = c1 + 2;
        self.alive = false;
        if m < c1 || self.lower.last().is_some_and(|&l| l > c1) {
            return false;
        }
        let need = (m + 1) * st;
        if self.beta.len() < need {
            self.beta.resize(need, 0.0);
        }
        let last = &mut self.beta[m * st..need];
        last[c1] = 1.0;
        last[c1 + 1] = 0.0;
        if c1 > 0 {
            last[c1 - 1] = 0.0;
        }
        let beta = &mut self.beta[..need];
        for i in (1..=m).rev() {
            let (p, q) = (self.p[i - 1], self.q[i - 1]);
            let lo = if i == 1 { 0 } else { self.lower[i - 2].max((c1 + i).saturating_sub(m + 1)) };
            let hi = c1.min(i - 1);
            if lo > hi {
                return false;
            }
            let (out, next) = beta[(i - 1) * st..(i + 1) * st].split_at_mut(st);
            let mut max = 0.0f64;
            for s in lo..hi + 1 {
                let b = q * next[s] + p * next[s + 1];
                out[s] = b;
                if b > max {
                    max = b;
                }
            }
            if max <= 0.0 {
                return false;
            }
            if max < RESCALE_BELOW {
                let inv = max.recip();
                out[lo..hi + 1].iter_mut().for_each(|o| *o *= inv);
            }
            out[hi + 1] = 0.0;
            if lo > 0 {
                out[lo - 1] = 0.0;
            }
        }
        self.alive = true;
        true
    }

    /// Message at level `i`, partial sum `s`; `s` must be within one of the
    /// reachable range.
    #[inline]
    fn beta_at(&self, i: usize, s: usize) -> f64 {
        self.beta[i * (self.c1 + 2) + s]
    }

    /// Conditional weights of `x = 0` and `x = 1` at position `i` (0-based)
    /// from partial sum `s`.
    #[inline]
    fn step_weights(&self, i: usize, s: usize) -> (f64, f64) {
        (self.q[i] * self.beta_at(i + 1, s), self.p[i] * self.beta_at(i + 1, s + 1))
    }

    /// Conditional probability of a one at position `i` given partial sum `s`;
    /// `None` when the state is unreachable.
    pub fn transition(&self, i: usize, s: usize) -> Option<f64> {
        let (lo, hi) = self.level_range(i);
        if !self.alive || i >= self.rows.len() || s < lo || s > hi {
            return None;
        }
        let (b0, b1) = self.step_weights(i, s);
        let tot = b0 + b1;
        (tot > 0.0).then(|| b1 / tot)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Number of stored message cells.
    pub fn cells(&self) -> usize {
        (self.rows.len() + 1) * (self.c1 + 2)
    }

    /// Draws a column into `x` (indexed by row, assumed all false on entry)
    /// and returns `log Q(x)`.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, x: &mut [bool]) -> f64 {
        debug_assert!(self.alive);
        let mut acc = LogProduct::default();
        let mut s = 0;
        for i in 0..self.rows.len() {
            if s == self.c1 {
                break;
            }
            let (b0, b1) = self.step_weights(i, s);
            let tot = b0 + b1;
            let u: f64 = rng.gen();
            if u * tot < b1 {
                x[self.rows[i]] = true;
                s += 1;
                acc.mul(b1 / tot);
            } else {
                acc.mul(b0 / tot);
            }
        }
        acc.ln()
    }

    /// Convenience draw returning a fresh column.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (Vec<bool>, f64) {
        let mut x = vec![false; self.rows.iter().max().map_or(0, |&r| r + 1)];
        let lq = self.sample_into(rng, &mut x);
        (x, lq)
    }

    /// `log Q(x)`, `-inf` outside the support.
    pub fn evaluate(&self, x: &[bool]) -> f64 {
        if !self.alive {
            return f64::NEG_INFINITY;
        }
        let mut acc = LogProduct::default();
        let mut s = 0;
        for i in 0..self.rows.len() {
            let (b0, b1) = self.step_weights(i, s);
            let tot = b0 + b1;
            if tot <= 0.0 {
                return f64::NEG_INFINITY;
            }
            let chosen = if x[self.rows[i]] {
                s += 1;
                b1
            } else {
                b0
            };
            if chosen <= 0.0 {
                return f64::NEG_INFINITY;
            }
            acc.mul(chosen / tot);
        }
        if s == self.c1 {
            acc.ln()
        } else {
            f64::NEG_INFINITY
        }
    }
}

/// `(sigmoid(l), sigmoid(-l))` computed without cancellation.
#[inline]
fn logistic(l: f64) -> (f64, f64) {
    if l == f64::INFINITY {
        (1.0, 0.0)
    } else if l == f64::NEG_INFINITY {
        (0.0, 1.0)
    } else if l >= 0.0 {
        let e = (-l).exp();
        (1.0 / (1.0 + e), e / (1.0 + e))
    } else {
        let e = l.exp();
        (e / (1.0 + e), 1.0 / (1.0 + e))
    }
}

/// Running product of probabilities kept in range by occasional logs.
#[derive(Clone, Copy, Debug)]
struct LogProduct {
    prod: f64,
    log: f64,
}

impl Default for LogProduct {
    fn default() -> Self {
        Self { prod: 1.0, log: 0.0 }
    }
}

impl LogProduct {
    #[inline]
    fn mul(&mut self, x: f64) {
        self.prod *= x;
        if self.prod < RESCALE_BELOW {
            self.log += self.prod.ln();
            self.prod = 1.0;
        }
    }

    fn ln(self) -> f64 {
        self.log + self.prod.ln()
    }
}

/// A spec after preprocessing: balanced weights, column order, `G` table and
/// the initial margin state. Immutable and shareable across threads.
#[derive(Clone, Debug)]
pub struct PreparedProblem {
    margins: Margins,
    options: SamplerOptions,
    /// Sampled column `k` is original column `perm[k]`.
    perm: Vec<usize>,
    cols: Vec<usize>,
    w: WeightMatrix,
    wbar: WeightMatrix,
    canonical: CanonicalWeights,
    flat: bool,
    g: Option<GTable>,
    init_order: Vec<usize>,
    /// `rest_support[i * (n + 1) + t]`: positive weights of row `i` in sampled
    /// columns `t..n`. Only filled for structural sampling.
    rest_support: Vec<usize>,
}

impl PreparedProblem {
    pub fn new(spec: &ProblemSpec) -> Result<Self> {
        let margins = &spec.margins;
        let (m, n) = (margins.m(), margins.n());
        if m == 0 || n == 0 {
            return Err(Error::InvalidArgument("margins must have at least one row and one column".into()));
        }
        if spec.weights.m() != m || spec.weights.n() != n {
            return Err(Error::Dimension(format!(
                "weights are {}x{}, margins are {m}x{n}",
                spec.weights.m(),
                spec.weights.n()
            )));
        }
        if !gale_ryser_feasible(margins) {
            return Err(Error::Infeasible);
        }
        let options = spec.options.clone();
        let structural = options.zeros == ZeroMode::Structural;
        if structural {
            if options.approx != Approximation::Canfield {
                return Err(Error::InvalidArgument("structural-zero sampling needs the canfield approximation".into()));
            }
            check_single_zero_pattern(&spec.weights.support())?;
        }
        let canonical = if options.canonicalize {
            canonicalize(&spec.weights, options.tol, options.max_iter)?
        } else {
            if let Some(i) = spec.weights.row_nnz().iter().position(|&k| k == 0) {
                return Err(Error::DegenerateWeights(format!("row {i} has no positive entry")));
            }
            if let Some(j) = spec.weights.col_nnz().iter().position(|&k| k == 0) {
                return Err(Error::DegenerateWeights(format!("column {j} has no positive entry")));
            }
            CanonicalWeights::identity(&spec.weights)
        };
        let mode = if structural { ColumnOrderMode::Descend } else { options.column_order };
        let perm = column_order(&canonical.wbar, margins.cols(), mode);
        let w = spec.weights.permute_cols(&perm);
        let wbar = canonical.wbar.permute_cols(&perm);
        let cols: Vec<usize> = perm.iter().map(|&j| margins.cols()[j]).collect();
        let flat = wbar.is_flat(FLAT_TOL);
        let g = (!flat).then(|| precompute_g(&wbar, margins.rows()));
        let mut rest_support = Vec::new();
        if structural {
            rest_support = vec![0; m * (n + 1)];
            for i in 0..m {
                for t in (0..n).rev() {
                    rest_support[i * (n + 1) + t] = rest_support[i * (n + 1) + t + 1] + wbar.is_positive(i, t) as usize;
                }
            }
        }
        Ok(Self {
            init_order: descending_order(margins.rows()),
            margins: margins.clone(),
            options,
            perm,
            cols,
            w,
            wbar,
            canonical,
            flat,
            g,
            rest_support,
        })
    }

    pub fn margins(&self) -> &Margins {
        &self.margins
    }

    pub fn options(&self) -> &SamplerOptions {
        &self.options
    }

    /// Sampled column `k` is original column `column_order()[k]`.
    pub fn column_order(&self) -> &[usize] {
        &self.perm
    }

    pub fn canonical(&self) -> &CanonicalWeights {
        &self.canonical
    }

    /// Whether the balanced weights are flat, in which case the `v` factors
    /// are all one.
    pub fn is_flat(&self) -> bool {
        self.flat
    }

    pub fn m(&self) -> usize {
        self.margins.m()
    }

    pub fn n(&self) -> usize {
        self.margins.n()
    }

    /// A fresh per-thread workspace.
    pub fn workspace(&self) -> Workspace {
        Workspace::new(self.m(), self.n())
    }

    /// Draws one matrix into `ws` and returns `(alive, log_q, log_f)`.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, ws: &mut Workspace) -> (bool, f64, f64) {
        self.drive(ws, Driver::Sample(rng))
    }

    /// Draws sample `index` under `seed`, keeping the matrix.
    pub fn sample(&self, seed: u64, index: u64) -> SampleRecord {
        let mut ws = self.workspace();
        let mut rng = sample_rng(seed, index);
        let (alive, log_q, log_f) = self.sample_into(&mut rng, &mut ws);
        SampleRecord { index, alive, log_q, log_f, z: Some(ws.matrix(self)) }
    }

    /// `log Q*(z)` for a matrix in the original column order; `-inf` outside
    /// the proposal support.
    pub fn evaluate(&self, z: &BinaryMatrix) -> f64 {
        if z.rows() != self.m() || z.cols() != self.n() {
            return f64::NEG_INFINITY;
        }
        let mut ws = self.workspace();
        self.drive(&mut ws, Driver::<ChaCha8Rng>::Evaluate(z)).1
    }

    /// `log f(z) = sum z log w - log Q*(z)` for a matrix in the original
    /// column order.
    pub fn log_weight(&self, z: &BinaryMatrix) -> f64 {
        if z.rows() != self.m() || z.cols() != self.n() {
            return f64::NEG_INFINITY;
        }
        let mut ws = self.workspace();
        self.drive(&mut ws, Driver::<ChaCha8Rng>::Evaluate(z)).2
    }

    /// Runs the samples with the given indices under `seed` on the current
    /// rayon pool and maps each through `f`. Results come back in index
    /// order, so output does not depend on the number of threads.
    pub fn run<T, F>(&self, seed: u64, indices: Range<u64>, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64, &Workspace, bool, f64, f64) -> T + Sync + Send,
    {
        indices
            .into_par_iter()
            .map_init(
                || self.workspace(),
                |ws, index| {
                    let mut rng = sample_rng(seed, index);
                    let (alive, log_q, log_f) = self.sample_into(&mut rng, ws);
                    f(index, ws, alive, log_q, log_f)
                },
            )
            .collect()
    }

    /// Log importance weights of `count` samples, by index.
    pub fn log_weights(&self, seed: u64, count: u64) -> Vec<f64> {
        self.run(seed, 0..count, |_, _, alive, _, lf| if alive { lf } else { f64::NEG_INFINITY })
    }

    fn drive<R: Rng + ?Sized>(&self, ws: &mut Workspace, mut driver: Driver<'_, R>) -> (bool, f64, f64) {
        ws.reset(self);
        let m = self.m();
        let n = self.n();
        let mut log_q = 0.0;
        let mut log_w = 0.0;
        for t in 0..n {
            let alive = if self.options.zeros == ZeroMode::Structural {
                self.build_structural(ws, t)
            } else {
                self.build_general(ws, t)
            };
            if !alive {
                return (false, f64::NEG_INFINITY, f64::NEG_INFINITY);
            }
            let lq = match &mut driver {
                Driver::Sample(rng) => ws.chain.sample_into(&mut **rng, &mut ws.x),
                Driver::Evaluate(z) => {
                    let col = self.perm[t];
                    if (0..m).filter(|&i| z.get(i, col)).count() != self.cols[t] {
                        return (false, f64::NEG_INFINITY, f64::NEG_INFINITY);
                    }
                    for &row in &ws.chain.rows {
                        ws.x[row] = z.get(row, col);
                    }
                    ws.chain.evaluate(&ws.x)
                }
            };
            if lq == f64::NEG_INFINITY {
                ws.x.iter_mut().for_each(|x| *x = false);
                return (false, f64::NEG_INFINITY, f64::NEG_INFINITY);
            }
            log_q += lq;
            for k in 0..ws.chain.rows.len() {
                let row = ws.chain.rows[k];
                if ws.x[row] {
                    ws.x[row] = false;
                    log_w += self.w.ln(row, t);
                    ws.z.set(row, t, true);
                    ws.decrement(row);
                }
            }
        }
        if log_w == f64::NEG_INFINITY {
            return (false, log_q, f64::NEG_INFINITY);
        }
        (true, log_q, log_w - log_q)
    }

    /// Fills the chain for sampled column `t` on the general path.
    fn build_general(&self, ws: &mut Workspace, t: usize) -> bool {
        let n = self.n();
        let n_cur = n - t;
        let c1 = self.cols[t];
        ws.remove_column(c1);
        // Rows with nothing left sit at the end of the order and are forced
        // to zero, so the chain stops before them.
        let live = ws.bound[0];

        let vmax = ws.order.first().map_or(0, |&row| ws.r[row]);
        ws.log_u.clear();
        match self.options.approx {
            Approximation::Canfield => {
                let f = CanfieldFactor::new(self.m(), n_cur - 1, ws.s1, ws.s2);
                ws.log_u.extend((0..=vmax).map(|v| f.log_u(v, n_cur)));
            }
            Approximation::Greenhill => {
                let (s1, s2, s3) = (ws.s1 as f64, ws.s2 as f64, ws.s3 as f64);
                let f = GreenhillFactor::new(s1, s2 - s1, s3 - 3.0 * s2 + 2.0 * s1, ws.r2 as f64);
                ws.log_u.extend((0..=vmax).map(|v| f.log_u(v, n_cur)));
            }
        }

        if self.g.is_none() {
            // Flat weights: the constraint set and the chain are filled in
            // one pass, with the same bounds as `fill_standard`.
            let Workspace { chain, log_u, pq, r, order, conj, .. } = ws;
            chain.reset(c1);
            pq.clear();
            pq.extend(log_u.iter().map(|&l| logistic(l)));
            let order = &order[..live];
            chain.rows.extend_from_slice(order);
            let (mut cum_r, mut cum_cc) = (0i64, 0i64);
            for (k, &row) in order.iter().enumerate() {
                let val = r[row];
                let (p, q) = if val < n_cur {
                    pq[val]
                } else if val == n_cur {
                    (1.0, 0.0)
                } else {
                    return false;
                };
                cum_r += val as i64;
                cum_cc += conj.get(k).copied().unwrap_or(0) as i64;
                chain.lower.push(if k + 1 == live { c1 } else { (cum_r - cum_cc).max(0) as usize });
                chain.p.push(p);
                chain.q.push(q);
            }
            return chain.finish();
        }

        ws.constraints.fill_standard(&ws.order[..live], &ws.r, &ws.conj, n_cur, c1);
        let Workspace { chain, constraints, log_u, r, .. } = ws;
        chain.reset(c1);
        let pi = constraints.pi();
        let allowed = constraints.allowed();
        let lower = constraints.lower();
        let g = self.g.as_ref().expect("weights are not flat");
        for k in 0..pi.len() {
            let row = pi[k];
            let val = r[row];
            let mut a = allowed[k];
            let mut lv = 0.0;
            match v_row(g, &self.wbar, row, val, t + 1) {
                VFactor::Value(x) => lv = x,
                VFactor::ForceOne => a = if a == Allowed::Zero { Allowed::Neither } else { Allowed::One },
                VFactor::ForceZero => a = if a == Allowed::One { Allowed::Neither } else { Allowed::Zero },
                VFactor::Dead => a = Allowed::Neither,
            }
            if a == Allowed::Neither {
                return false;
            }
            chain.push_logit(row, a, lower[k], log_u[val] + lv);
        }

        chain.finish()
    }

    /// Fills the chain for sampled column `t` on the structural-zero path.
    fn build_structural(&self, ws: &mut Workspace, t: usize) -> bool {
        let m = self.m();
        let n = self.n();
        let c1 = self.cols[t];
        ws.remove_column(c1);
        let wbar = &self.wbar;
        ws.constraints.fill_structural(&ws.r, &self.cols[t..], |i, k| wbar.is_positive(i, t + k));
        let log_u = u_structural(&ws.r, &self.cols[t + 1..], |i, k| wbar.is_positive(i, t + 1 + k));
        let Workspace { chain, constraints, r, .. } = ws;
        chain.reset(c1);
        for k in 0..m {
            let row = constraints.pi()[k];
            let a = constraints.allowed()[k];
            if a == Allowed::Neither {
                return false;
            }
            let lv = match &self.g {
                Some(g) => v_row_structural(g, wbar, row, r[row], t + 1, self.rest_support[row * (n + 1) + t + 1]),
                None => 0.0,
            };
            chain.push_logit(row, a, constraints.lower()[k], log_u[row] + lv);
        }
        chain.finish()
    }
}

enum Driver<'a, R: Rng + ?Sized> {
    Sample(&'a mut R),
    Evaluate(&'a BinaryMatrix),
}

/// Mutable per-sample state: current row sums kept sorted with O(1)
/// updates, the running conjugate of the unsampled columns, and buffers.
#[derive(Clone, Debug)]
pub struct Workspace {
    r: Vec<usize>,
    /// Rows by decreasing current sum.
    order: Vec<usize>,
    /// Position of each row in `order`.
    pos: Vec<usize>,
    /// `bound[v]`: number of rows with current sum above `v`.
    bound: Vec<usize>,
    /// Conjugate of the columns after the current one.
    conj: Vec<usize>,
    s1: u64,
    s2: u64,
    s3: u64,
    r2: u64,
    constraints: ConstraintSet,
    chain: ColumnChain,
    log_u: Vec<f64>,
    pq: Vec<(f64, f64)>,
    x: Vec<bool>,
    z: BinaryMatrix,
}

impl Workspace {
    fn new(m: usize, n: usize) -> Self {
        Self {
            r: Vec::with_capacity(m),
            order: Vec::with_capacity(m),
            pos: vec![0; m],
            bound: vec![0; n + 1],
            conj: Vec::with_capacity(m),
            s1: 0,
            s2: 0,
            s3: 0,
            r2: 0,
            constraints: ConstraintSet::default(),
            chain: ColumnChain::default(),
            log_u: Vec::new(),
            pq: Vec::new(),
            x: vec![false; m],
            z: BinaryMatrix::zeros(m, n),
        }
    }

    fn reset(&mut self, prob: &PreparedProblem) {
        let (m, n) = (prob.m(), prob.n());
        if self.z.rows() != m || self.z.cols() != n {
            *self = Self::new(m, n);
        }
        self.r.clear();
        self.r.extend_from_slice(prob.margins.rows());
        self.order.clear();
        self.order.extend_from_slice(&prob.init_order);
        for (k, &row) in self.order.iter().enumerate() {
            self.pos[row] = k;
        }
        self.bound.iter_mut().for_each(|b| *b = 0);
        for &v in &self.r {
            for b in &mut self.bound[..v] {
                *b += 1;
            }
        }
        self.conj.clear();
        self.conj.extend_from_slice(conjugate(&prob.cols, m).as_slice());
        let (mut s1, mut s2, mut s3) = (0u64, 0u64, 0u64);
        for &c in &prob.cols {
            let c = c as u64;
            s1 += c;
            s2 += c * c;
            s3 += c * c * c;
        }
        (self.s1, self.s2, self.s3) = (s1, s2, s3);
        self.r2 = self.r.iter().map(|&v| (v * v.saturating_sub(1)) as u64).sum();
        self.z.clear();
    }

    /// Drops the current column from the running conjugate and power sums.
    fn remove_column(&mut self, c: usize) {
        let upto = c.min(self.conj.len());
        for cc in &mut self.conj[..upto] {
            *cc -= 1;
        }
        let c = c as u64;
        self.s1 -= c;
        self.s2 -= c * c;
        self.s3 -= c * c * c;
    }

    /// Decrements row `row`, moving it to the end of its value block.
    fn decrement(&mut self, row: usize) {
        let v = self.r[row];
        debug_assert!(v > 0);
        let last = self.bound[v - 1] - 1;
        let p = self.pos[row];
        let other = self.order[last];
        self.order.swap(p, last);
        self.pos[other] = p;
        self.pos[row] = last;
        self.bound[v - 1] -= 1;
        self.r[row] = v - 1;
        self.r2 -= 2 * (v as u64 - 1);
    }

    /// The sampled matrix in the original column order.
    pub fn matrix(&self, prob: &PreparedProblem) -> BinaryMatrix {
        let mut out = BinaryMatrix::zeros(prob.m(), prob.n());
        for (i, t) in self.z.ones() {
            out.set(i, prob.perm[t], true);
        }
        out
    }

    /// Ones of the sampled matrix as `(row, original column)` pairs in
    /// row-major order.
    pub fn ones(&self, prob: &PreparedProblem) -> Vec<(usize, usize)> {
        self.matrix(prob).ones()
    }
}
