mod common;

use binsis::combinatorics::Approximation;
use binsis::oracle::exact_kappa;
use binsis::weights::ColumnOrderMode;
use binsis::SamplerOptions;
use common::{exhaustive, grid, prepare, rel_err_ln};
use proptest::prelude::*;

#[test]
fn grid_is_large_enough() {
    let g = grid();
    assert!(g.len() >= 50, "{} cases", g.len());
    assert!(g.iter().any(|c| c.weights.has_zeros()));
}

#[test]
fn proposal_is_exactly_unbiased_on_grid() {
    for approx in [Approximation::Canfield, Approximation::Greenhill] {
        let options = SamplerOptions { approx, ..Default::default() };
        for case in grid() {
            let prob = prepare(&case.margins, &case.weights, options.clone());
            let ex = exhaustive(&prob, &case.margins, &case.weights);
            let oracle = exact_kappa(&case.margins, &case.weights).unwrap();
            assert!(rel_err_ln(ex.log_kappa, oracle.ln) < 1e-12, "{}", case.label);
            assert_eq!(ex.missed, 0, "{}", case.label);
            assert!(rel_err_ln(ex.log_weighted_mass, oracle.ln) < 1e-9, "{approx:?} {}", case.label);
        }
    }
}

#[test]
fn positive_weights_give_exact_support() {
    for case in grid().into_iter().filter(|c| !c.weights.has_zeros()) {
        let prob = prepare(&case.margins, &case.weights, SamplerOptions::default());
        let ex = exhaustive(&prob, &case.margins, &case.weights);
        assert_eq!(ex.unreachable, 0, "{}", case.label);
        assert!((ex.proposal_mass - 1.0).abs() < 1e-9, "{}: mass {}", case.label, ex.proposal_mass);
    }
}

#[test]
fn column_orders_are_all_unbiased() {
    for mode in [ColumnOrderMode::None, ColumnOrderMode::Auto] {
        let options = SamplerOptions { column_order: mode, ..Default::default() };
        for case in grid().into_iter().step_by(7) {
            let prob = prepare(&case.margins, &case.weights, options.clone());
            let ex = exhaustive(&prob, &case.margins, &case.weights);
            assert!(rel_err_ln(ex.log_weighted_mass, ex.log_kappa) < 1e-9, "{mode:?} {}", case.label);
        }
    }
}

#[test]
fn raw_weights_are_unbiased() {
    let options = SamplerOptions { canonicalize: false, ..Default::default() };
    for case in grid().into_iter().step_by(5) {
        let prob = prepare(&case.margins, &case.weights, options.clone());
        let ex = exhaustive(&prob, &case.margins, &case.weights);
        assert!(rel_err_ln(ex.log_weighted_mass, ex.log_kappa) < 1e-9, "{}", case.label);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_specs_are_unbiased(
        m in 1usize..=4,
        n in 1usize..=4,
        bits in proptest::collection::vec(any::<bool>(), 16),
        ws in proptest::collection::vec(0.05f64..20.0, 16),
    ) {
        let z = binsis::BinaryMatrix::from_rows(
            &(0..m).map(|i| (0..n).map(|j| bits[i * 4 + j] as u8).collect()).collect::<Vec<_>>(),
        ).unwrap();
        let margins = match binsis::Margins::new(z.row_sums(), z.col_sums()) {
            Ok(mg) => mg,
            Err(_) => return Ok(()),
        };
        let w = binsis::WeightMatrix::new(m, n, (0..m * n).map(|k| ws[k]).collect()).unwrap();
        let prob = prepare(&margins, &w, SamplerOptions::default());
        let ex = exhaustive(&prob, &margins, &w);
        prop_assert_eq!(ex.unreachable, 0);
        prop_assert!((ex.proposal_mass - 1.0).abs() < 1e-9);
        prop_assert!(rel_err_ln(ex.log_weighted_mass, ex.log_kappa) < 1e-9);
    }
}
