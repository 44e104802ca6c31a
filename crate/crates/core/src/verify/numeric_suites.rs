use rand::Rng;
use serde_json::json;

use super::{draw_signed, CheckResult, VerifyConfig};
use crate::correlators::numeric::check_two_point_domain;
use crate::correlators::{
    t_terms_numeric, trace_brute_hat_numeric, two_point_closed_general, ParamPair, DEFAULT_BRUTE_SIZE,
};
use crate::hypergeom::{c, hall_residual, heine_residual, q_binomial_residual, ComplexScalar, SumOptions};

const DRAWS: usize = 100;

/// An admissible two-point configuration with `|v| ≤ 0.2`.
fn draw_two_point(rng: &mut impl Rng) -> (ParamPair<ComplexScalar>, ParamPair<ComplexScalar>, ComplexScalar) {
    loop {
        let p1 = ParamPair::new(c(draw_signed(rng, 0.05, 0.7)), c(draw_signed(rng, 0.05, 0.6)));
        let p2 = ParamPair::new(c(draw_signed(rng, 0.05, 0.7)), c(draw_signed(rng, 0.05, 0.6)));
        let v = c(draw_signed(rng, 0.02, 0.2));
        if check_two_point_domain(&p1, &p2, v).is_ok() {
            return (p1, p2, v);
        }
    }
}

fn point_json(p1: &ParamPair<ComplexScalar>, p2: &ParamPair<ComplexScalar>, v: ComplexScalar) -> serde_json::Value {
    json!({ "q1": p1.q.re, "t1": p1.t.re, "q2": p2.q.re, "t2": p2.t.re, "v": v.re })
}

/// General two-point closed form against the truncated partition sum, and
/// the two routes to its ordered-row part.
pub(super) fn general_two_point(rng: &mut impl Rng, cfg: &VerifyConfig) -> Vec<CheckResult> {
    let opts = SumOptions::default();
    let mut out = Vec::new();
    for k in 0..5 {
        let (p1, p2, v) = draw_two_point(rng);
        let point = point_json(&p1, &p2, v);
        let name = format!("two_point_closed_vs_brute[{k}]");
        let closed = two_point_closed_general(&p1, &p2, v, opts);
        let brute = trace_brute_hat_numeric(&[p1.clone(), p2.clone()], v, DEFAULT_BRUTE_SIZE);
        out.push(match (closed, brute) {
            (Ok(cl), Ok(br)) => {
                let allowed = cfg.tol + br.error_bound + cl.error_bound;
                let details = json!({
                    "point": point,
                    "max_size": DEFAULT_BRUTE_SIZE,
                    "tail_bound": br.error_bound,
                    "closed_error_bound": cl.error_bound,
                    "allowed": allowed,
                });
                CheckResult::numeric(5, name, (cl.value - br.value).norm(), allowed, details)
            }
            (Err(e), _) | (_, Err(e)) => CheckResult::error(5, name, &e),
        });
        let name = format!("ordered_rows_hyper_vs_double_sum[{k}]");
        out.push(match t_terms_numeric(&p1, &p2, v, opts) {
            Ok(tt) => CheckResult::numeric(5, name, (tt.t1_hyper - tt.t1_double_sum).norm(), cfg.tol, json!({ "point": point })),
            Err(e) => CheckResult::error(5, name, &e),
        });
    }
    out
}

fn summarise(criterion: u8, name: &str, residuals: &[(f64, serde_json::Value)], tol: f64) -> CheckResult {
    let (worst, at) = residuals
        .iter()
        .fold((0.0f64, serde_json::Value::Null), |(w, a), (r, p)| if *r > w || r.is_nan() { (*r, p.clone()) } else { (w, a) });
    CheckResult::numeric(criterion, name, worst, tol, json!({ "draws": residuals.len(), "worst_point": at, "tol": tol }))
}

/// q-binomial theorem, Heine's summation and Hall's transformation over
/// seeded admissible draws, plus Hall at the ordered-row instantiation.
pub(super) fn hypergeometric_identities(rng: &mut impl Rng, cfg: &VerifyConfig) -> Vec<CheckResult> {
    let opts = SumOptions::default();
    let mut out = Vec::new();
    let mut errors = Vec::new();

    let mut qb = Vec::with_capacity(DRAWS);
    while qb.len() < DRAWS && errors.len() < DRAWS {
        let (a, t, v) = (draw_signed(rng, 0.0, 2.0), draw_signed(rng, 0.0, 0.9), draw_signed(rng, 0.02, 0.7));
        match q_binomial_residual(c(a), c(t), c(v), opts) {
            Ok(r) => qb.push((r, json!({ "a": a, "t": t, "v": v }))),
            Err(e) => errors.push(("q_binomial", e)),
        }
    }
    out.push(summarise(6, "q_binomial_theorem", &qb, cfg.tol));

    let mut heine = Vec::with_capacity(DRAWS);
    while heine.len() < DRAWS && errors.len() < DRAWS {
        let a = draw_signed(rng, 0.5, 2.0);
        let b = draw_signed(rng, 0.2, 0.9);
        let cc = draw_signed(rng, 0.0, 0.9);
        let v = draw_signed(rng, 0.02, 0.7);
        if (cc / (a * b)).abs() >= 0.9 {
            continue;
        }
        match heine_residual(c(a), c(b), c(cc), c(v), opts) {
            Ok(r) => heine.push((r, json!({ "a": a, "b": b, "c": cc, "v": v }))),
            Err(e) => errors.push(("heine", e)),
        }
    }
    out.push(summarise(6, "heine_summation", &heine, cfg.tol));

    let mut hall = Vec::with_capacity(DRAWS);
    while hall.len() < DRAWS && errors.len() < DRAWS {
        let (a, b, cc) = (draw_signed(rng, 0.3, 0.95), draw_signed(rng, 0.3, 0.95), draw_signed(rng, 0.3, 0.95));
        let (d, e) = (draw_signed(rng, 0.0, 0.9), draw_signed(rng, 0.0, 0.9));
        let v = draw_signed(rng, 0.02, 0.7);
        let inside = [d * e / (a * b * cc), d * e / (a * b), d * e / (b * cc)].iter().all(|x| x.abs() < 0.9);
        if !inside {
            continue;
        }
        match hall_residual(c(a), c(b), c(cc), c(d), c(e), c(v), opts) {
            Ok(r) => hall.push((r, json!({ "a": a, "b": b, "c": cc, "d": d, "e": e, "v": v }))),
            Err(e) => errors.push(("hall", e)),
        }
    }
    out.push(summarise(6, "hall_transformation", &hall, cfg.tol));

    // a = t1 t2, b = t2, c = 1/q2, d = v t2, e = v q1 t1 t2, argument v² q1 q2
    let mut inst = Vec::with_capacity(DRAWS);
    while inst.len() < DRAWS && errors.len() < DRAWS {
        let (p1, p2, v) = draw_two_point(rng);
        let (q1, t1, q2, t2) = (p1.q, p1.t, p2.q, p2.t);
        match hall_residual(t1 * t2, t2, c(1.0) / q2, v * t2, v * q1 * t1 * t2, v, opts) {
            Ok(r) => inst.push((r, point_json(&p1, &p2, v))),
            Err(e) => errors.push(("hall_ordered_rows", e)),
        }
    }
    out.push(summarise(6, "hall_at_ordered_row_instantiation", &inst, cfg.tol));

    // admissible draws should never be rejected by the evaluators
    if let Some((which, e)) = errors.first() {
        out.push(CheckResult::error(6, format!("{which}_evaluation"), e));
    }
    out
}
