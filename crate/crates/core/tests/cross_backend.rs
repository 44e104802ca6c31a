//! Checks that tie independent modules together through the public API.

use num::Zero;
use qtcorr_core::correlators::{
    one_point_closed, trace_brute_hat, trace_brute_hat_numeric, two_point_closed_general,
    two_point_closed_special, ParamPair,
};
use qtcorr_core::fock::{vertex_zero_mode_apply, zero_mode_matrix, FockVector, VertexParams};
use qtcorr_core::hypergeom::{c, SumOptions};
use qtcorr_core::macdonald::{modified_h_tilde_family, plethystic_twist};
use qtcorr_core::partitions::b_hat_stat;
use qtcorr_core::rational::{int, one_minus, rat, to_f64};
use qtcorr_core::verify::{run_criterion, VerifyConfig};
use qtcorr_core::{Partition, Rational};

fn p(parts: &[usize]) -> Partition {
    Partition::new(parts.to_vec()).unwrap()
}

#[test]
fn exact_one_point_series_matches_numeric_sum() {
    let (q, t) = (rat(1, 2), rat(1, 3));
    let v = rat(1, 20);
    let exact = to_f64(&one_point_closed(&q, &t, 12).unwrap().eval(&v));
    let pair = ParamPair::new(c(0.5), c(1.0 / 3.0));
    let numeric = trace_brute_hat_numeric(&[pair], c(0.05), 24).unwrap();
    // truncating at v^12 costs ~ p(13)·3^13·0.05^13 ≪ 1e-10
    assert!((numeric.value.re - exact).abs() < 1e-10);
}

#[test]
fn exact_special_two_point_matches_general_numeric_form() {
    // q1 q2 t1 t2 = 4 · 1/2 · 2 · 1/4 = 1
    let (p1, p2) = (ParamPair::new(int(4), rat(1, 2)), ParamPair::new(int(2), rat(1, 4)));
    let v = rat(1, 100);
    let series = two_point_closed_special(&p1, &p2, 10).unwrap();
    assert_eq!(series, trace_brute_hat(&[p1, p2], 10).unwrap());
    let exact = to_f64(&series.eval(&v));
    let general = two_point_closed_general(
        &ParamPair::new(c(4.0), c(0.5)),
        &ParamPair::new(c(2.0), c(0.25)),
        c(0.01),
        SumOptions::default(),
    )
    .unwrap();
    assert!((general.value.re - exact).abs() < 1e-9 * exact.abs());
}

#[test]
fn zero_mode_on_first_power_sum() {
    let (q, t) = (rat(1, 2), rat(1, 3));
    let params = VertexParams::from_zero_mode_args(q.clone(), int(1), t.clone(), int(1), int(1));
    let out = vertex_zero_mode_apply(&params, &FockVector::basis(p(&[1])), 4).unwrap();
    let expected = &q + &t - &q * &t;
    assert_eq!(out, FockVector::basis(p(&[1])).scale(&expected));
    let scale = one_minus(&q) * one_minus(&t);
    assert_eq!(expected / scale, b_hat_stat(&p(&[1]), &q, &t).unwrap());
}

#[test]
fn twisted_modified_basis_diagonalises_the_zero_mode() {
    let (q, t) = (rat(2, 5), rat(-1, 3));
    let params = VertexParams::from_zero_mode_args(q.clone(), int(1), t.clone(), int(1), int(1));
    let scale = one_minus(&q) * one_minus(&t);
    for d in 1..=4 {
        let v0 = zero_mode_matrix(&params, d).matrix;
        let twist = plethystic_twist(d, &q);
        for (lambda, h) in modified_h_tilde_family(d, &q, &t).unwrap() {
            let twisted = twist.apply(h.coords());
            let image = v0.apply(&twisted);
            let eig = b_hat_stat(&lambda, &q, &t).unwrap() * &scale;
            let expected: Vec<Rational> = twisted.iter().map(|x| x * &eig).collect();
            assert_eq!(image, expected, "{lambda}");
            assert!(!twisted.iter().all(Zero::is_zero));
        }
    }
}

#[test]
fn reports_serialise_with_the_documented_fields() {
    let results = run_criterion(1, &VerifyConfig::default()).unwrap();
    let v = serde_json::to_value(&results).unwrap();
    for r in v.as_array().unwrap() {
        for key in ["name", "status", "deviation", "details"] {
            assert!(r.get(key).is_some(), "missing {key}");
        }
        assert_eq!(r["status"], "pass");
        assert_eq!(r["deviation"], "0");
    }
}
