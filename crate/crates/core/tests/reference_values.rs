use binsis::combinatorics::log_n_canfield;
use binsis::oracle::{
    const_alpha_permanent, count_uniform, enumerate_omega, finch_margins, minstd_sequence, two_regular_count,
    DEFAULT_NODE_CAP,
};
use binsis::{LogBigNumber, Margins};
use num_bigint::BigUint;
use serde_json::Value;

fn fixtures() -> Value {
    serde_json::from_str(include_str!("fixtures/reference.json")).unwrap()
}

fn regular(n: usize, r: usize) -> Margins {
    Margins::new(vec![r; n], vec![r; n]).unwrap()
}

fn usizes(v: &Value) -> Vec<usize> {
    v.as_array().unwrap().iter().map(|x| x.as_u64().unwrap() as usize).collect()
}

#[test]
fn two_regular_counts_match_reference_digits() {
    let f = fixtures();
    for (n, digits) in f["two_regular"].as_object().unwrap() {
        let n: usize = n.parse().unwrap();
        let want: BigUint = digits.as_str().unwrap().parse().unwrap();
        assert_eq!(two_regular_count(n), want, "n={n}");
    }
}

#[test]
fn two_regular_recursion_agrees_with_column_count() {
    for n in 2..=9 {
        assert_eq!(two_regular_count(n), count_uniform(&regular(n, 2)), "n={n}");
    }
    assert_eq!(enumerate_omega(&regular(4, 2), None, DEFAULT_NODE_CAP).unwrap().len(), 90);
}

#[test]
fn finch_margins_and_count_match_reference() {
    let f = fixtures();
    let mg = finch_margins();
    assert_eq!(mg.rows(), usizes(&f["finch"]["r"]).as_slice());
    assert_eq!(mg.cols(), usizes(&f["finch"]["c"]).as_slice());
    let want: BigUint = f["finch"]["count"].as_str().unwrap().parse().unwrap();
    assert_eq!(count_uniform(&mg), want);
}

#[test]
fn constant_alpha_permanent_matches_reference() {
    for case in fixtures()["const_alpha"].as_array().unwrap() {
        let n = case["n"].as_u64().unwrap() as usize;
        let x = const_alpha_permanent(n, case["entry"].as_f64().unwrap(), case["alpha"].as_f64().unwrap()).unwrap();
        let (mantissa, exp10) = LogBigNumber::from_ln(x.ln).mantissa_exp();
        assert_eq!(exp10, case["exp10"].as_i64().unwrap());
        assert!((mantissa - case["mantissa"].as_f64().unwrap()).abs() < 1e-3, "{mantissa}");
    }
}

#[test]
fn canfield_approximation_is_close_for_large_two_regular() {
    let f = &fixtures()["canfield_500_r2"];
    let want = (f["mantissa"].as_f64().unwrap().log10() + f["exp10"].as_f64().unwrap()) * std::f64::consts::LN_10;
    let got = log_n_canfield(&regular(500, 2));
    assert!((got - want).exp_m1().abs() < 1e-3, "relative error {}", (got - want).exp_m1());
}

#[test]
fn minstd_matches_reference() {
    let f = &fixtures()["minstd"];
    let seq = minstd_sequence(2);
    assert_eq!(seq, vec![f["R1"].as_u64().unwrap(), f["R2"].as_u64().unwrap()]);
}
