#![allow(dead_code)]

use binsis::margins::gale_ryser_feasible;
use binsis::oracle::{enumerate_omega, minstd_canonical, weight_class, WeightClass, DEFAULT_NODE_CAP};
use binsis::{BinaryMatrix, Margins, PreparedProblem, ProblemSpec, SamplerOptions, WeightMatrix};

/// All vectors of length `len` with entries in `0..=max`.
fn vectors(len: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..=max).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

/// Every feasible `m x n` margin pair with at least one matrix besides the
/// trivial empty and full ones. With `sorted`, rows and columns are
/// nonincreasing.
pub fn feasible_margins(m: usize, n: usize, sorted: bool) -> Vec<Margins> {
    let nonincreasing = |v: &Vec<usize>| v.windows(2).all(|p| p[0] >= p[1]);
    let rows: Vec<_> = vectors(m, n).into_iter().filter(|v| !sorted || nonincreasing(v)).collect();
    let cols: Vec<_> = vectors(n, m).into_iter().filter(|v| !sorted || nonincreasing(v)).collect();
    let mut out = Vec::new();
    for r in &rows {
        let total: usize = r.iter().sum();
        if total == 0 || total == m * n {
            continue;
        }
        for c in &cols {
            if c.iter().sum::<usize>() != total {
                continue;
            }
            let mg = Margins::new(r.clone(), c.clone()).unwrap();
            if gale_ryser_feasible(&mg) {
                out.push(mg);
            }
        }
    }
    out
}

/// The leading `m x n` block of the 4 x 4 canonical test matrix under a
/// weight class.
pub fn class_weights(class: WeightClass, m: usize, n: usize) -> WeightMatrix {
    let w = weight_class(&minstd_canonical(4, 4), class);
    let data = (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| w.get(i, j)).collect();
    WeightMatrix::new(m, n, data).unwrap()
}

/// Class IV's rule `-1{y < t} log y` at a lower threshold, so that a 4 x 4
/// block actually has zeros.
pub fn thresholded_weights(threshold: f64, m: usize, n: usize) -> WeightMatrix {
    let y = minstd_canonical(4, 4);
    let data = (0..m)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| {
            let v = y.get(i, j);
            if v < threshold {
                -v.ln()
            } else {
                0.0
            }
        })
        .collect();
    WeightMatrix::new(m, n, data).unwrap()
}

pub struct GridCase {
    pub label: String,
    pub margins: Margins,
    pub weights: WeightMatrix,
}

/// Margins exhaustively for shapes up to 3 x 3 plus sorted 4 x 4 margins,
/// crossed with the four weight classes and a thresholded zero pattern.
pub fn grid() -> Vec<GridCase> {
    let mut shapes = Vec::new();
    for m in 1..=3 {
        for n in 1..=3 {
            shapes.push((m, n, false));
        }
    }
    shapes.extend([(2, 4, false), (4, 2, false), (3, 4, true), (4, 3, true), (4, 4, true)]);
    let mut out = Vec::new();
    for (m, n, sorted) in shapes {
        for mg in feasible_margins(m, n, sorted) {
            for class in WeightClass::ALL {
                out.push(GridCase { label: format!("{class:?} r={:?} c={:?}", mg.rows(), mg.cols()), margins: mg.clone(), weights: class_weights(class, m, n) });
            }
            out.push(GridCase { label: format!("zeros r={:?} c={:?}", mg.rows(), mg.cols()), margins: mg.clone(), weights: thresholded_weights(0.8, m, n) });
        }
    }
    out
}

/// `sum z log w`, `-inf` when `z` hits a zero weight.
pub fn log_target(z: &BinaryMatrix, w: &WeightMatrix) -> f64 {
    z.ones().into_iter().map(|(i, j)| w.ln(i, j)).sum()
}

pub struct Exhaustive {
    /// `sum over target support of Q* f`, in logs.
    pub log_weighted_mass: f64,
    /// `log kappa` by direct summation.
    pub log_kappa: f64,
    /// `Q*` mass on all matrices with the margins.
    pub proposal_mass: f64,
    /// Target-support matrices the proposal cannot reach.
    pub missed: usize,
    /// Matrices with the margins the proposal cannot reach.
    pub unreachable: usize,
}

/// Sums `Q*` and `Q* f` over every matrix with the margins.
pub fn exhaustive(prob: &PreparedProblem, margins: &Margins, w: &WeightMatrix) -> Exhaustive {
    let all = enumerate_omega(margins, None, DEFAULT_NODE_CAP).unwrap();
    let mut lq_f = Vec::new();
    let mut lk = Vec::new();
    let mut mass = 0.0;
    let (mut missed, mut unreachable) = (0, 0);
    for z in &all {
        let lq = prob.evaluate(z);
        let lt = log_target(z, w);
        if lq > f64::NEG_INFINITY {
            mass += lq.exp();
        } else {
            unreachable += 1;
        }
        if lt > f64::NEG_INFINITY {
            lk.push(lt);
            if lq == f64::NEG_INFINITY {
                missed += 1;
            } else {
                lq_f.push(lq + prob.log_weight(z));
            }
        }
    }
    Exhaustive {
        log_weighted_mass: binsis::logspace::log_sum_exp(&lq_f),
        log_kappa: binsis::logspace::log_sum_exp(&lk),
        proposal_mass: mass,
        missed,
        unreachable,
    }
}

pub fn prepare(margins: &Margins, w: &WeightMatrix, options: SamplerOptions) -> PreparedProblem {
    PreparedProblem::new(&ProblemSpec::new(margins.clone(), w.clone(), options)).unwrap()
}

/// Relative error of `exp(a)` against `exp(b)`; zero when both vanish.
pub fn rel_err_ln(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    (a - b).exp_m1().abs()
}
