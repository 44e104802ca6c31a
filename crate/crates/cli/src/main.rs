//! `qtcorr`: compute q,t-deformed correlators and run the verification suites.
//!
//! Exit status: 0 when every check passes, 1 when a check fails, 2 on usage,
//! parse or domain errors.

mod expr;
mod report;

use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use num::Zero;
use qtcorr_core::correlators::{
    one_point_closed, trace_brute_hat, trace_brute_hat_numeric, two_point_closed_general,
    two_point_closed_special, ParamPair, DEFAULT_BRUTE_SIZE,
};
use qtcorr_core::fock::{
    two_vertex_expectation_brute, v0_trace_direct, v0_trace_projection, vertex_product_expectation_closed,
    vertex_product_expectation_product_form, zero_mode_expectation_brute, zero_mode_expectation_closed,
    VertexParams,
};
use qtcorr_core::hypergeom::{c, SumOptions};
use qtcorr_core::rational::{parse_rational, to_f64};
use qtcorr_core::verify::{run_suite, VerifyConfig, SUITES};
use qtcorr_core::Rational;
use serde_json::json;

use report::{Format, Report, SeriesDump};

#[derive(Parser, Debug)]
#[command(name = "qtcorr", version, about = "Exact and numeric q,t-deformed correlation functions")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,
    /// Worker threads for the partition sums and traces.
    #[arg(long, env = "QTCORR_THREADS", global = true)]
    threads: Option<usize>,
    /// Seed for randomly drawn test points.
    #[arg(long, default_value_t = 7, global = true)]
    seed: u64,
    /// Absolute tolerance of numeric comparisons.
    #[arg(long, default_value_t = 1e-8, global = true)]
    tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// One-point function: closed product against the partition sum.
    Onepoint {
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        /// Truncation order N (series kept modulo v^{N+1}).
        #[arg(long, default_value_t = 12)]
        order: usize,
    },
    /// Two-point function. Exact on q1·q2·t1·t2 = 1; numeric when --v is given.
    Twopoint {
        /// q1,t1,q2,t2
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        params: Vec<String>,
        #[arg(long, default_value_t = 10)]
        order: usize,
        /// Numeric evaluation point (switches to the numeric backend).
        #[arg(long, allow_hyphen_values = true)]
        v: Option<String>,
        /// Largest partition size in the numeric partition sum.
        #[arg(long, default_value_t = DEFAULT_BRUTE_SIZE)]
        max_size: usize,
    },
    /// Vertex-operator traces. Parameters per vertex are q1,q2,t1,t2 as in
    /// the zero mode V₀(q1,q2,t1,t2): creation q1^k − q2^k, annihilation t2^k − t1^k.
    Vertex {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        params: Vec<String>,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        kappa: String,
        /// Number of vertices (1 or 2).
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 8)]
        order: usize,
        /// Extra intermediate degree K for two vertices (ζ-order).
        #[arg(long, default_value_t = 6)]
        zeta_order: usize,
    },
    /// Run a verification suite.
    Verify {
        /// partitions, qseries, hypergeom, onepoint, twopoint, vertex, macdonald or all.
        suite: String,
    },
    /// Evaluate a series expression, e.g. "pinf(1/2) / poch(1/3, 4, 1)".
    Series {
        expression: String,
        #[arg(long, default_value_t = 12)]
        order: usize,
    },
}

/// Usage or domain problem, reported with exit status 2.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(UsageError(msg.into()).into())
}

fn exact(s: &str) -> Result<Rational> {
    parse_rational(s).map_err(|e| UsageError(e.to_string()).into())
}

/// Accepts `num/den` or decimal notation for the numeric backend.
fn real(s: &str) -> Result<f64> {
    if let Ok(r) = parse_rational(s) {
        return Ok(to_f64(&r));
    }
    s.trim().parse::<f64>().map_err(|_| UsageError(format!("'{s}' is not a number")).into())
}

/// Core errors at this level are domain violations.
fn domain<T>(r: qtcorr_core::Result<T>) -> Result<T> {
    r.map_err(|e| UsageError(e.to_string()).into())
}

fn series_dev(a: &qtcorr_core::VSeries, b: &qtcorr_core::VSeries) -> Rational {
    a.max_abs_diff(b)
}

fn onepoint(q: &str, t: &str, order: usize) -> Result<Report> {
    let (q, t) = (exact(q)?, exact(t)?);
    let mut rep = Report::new("onepoint", json!({ "q": q.to_string(), "t": t.to_string(), "order": order }));
    let closed = domain(one_point_closed(&q, &t, order))?;
    let brute = domain(trace_brute_hat(&[ParamPair::new(q, t)], order))?;
    let diff = &closed - &brute;
    let dev = series_dev(&closed, &brute);
    rep.push("closed_vs_brute", dev.is_zero(), json!(dev.to_string()), json!({ "order": order }));
    rep.attach(SeriesDump::from_v("closed", &closed));
    rep.attach(SeriesDump::from_v("brute", &brute));
    rep.attach(SeriesDump::from_v("difference", &diff));
    Ok(rep)
}

fn twopoint(params: &[String], order: usize, v: Option<&str>, max_size: usize, tol: f64) -> Result<Report> {
    if params.len() != 4 {
        return usage("--params takes q1,t1,q2,t2");
    }
    match v {
        None => {
            let p: Vec<Rational> = params.iter().map(|s| exact(s)).collect::<Result<_>>()?;
            let (p1, p2) = (ParamPair::new(p[0].clone(), p[1].clone()), ParamPair::new(p[2].clone(), p[3].clone()));
            let cfg = json!({ "params": params, "order": order, "backend": "exact" });
            let mut rep = Report::new("twopoint", cfg);
            let closed = two_point_closed_special(&p1, &p2, order).map_err(|e| {
                UsageError(format!("{e}; the exact backend needs q1·q2·t1·t2 = 1 (pass --v for the numeric backend)"))
            })?;
            let brute = domain(trace_brute_hat(&[p1, p2], order))?;
            let dev = series_dev(&closed, &brute);
            rep.push("special_closed_vs_brute", dev.is_zero(), json!(dev.to_string()), json!({ "order": order }));
            rep.attach(SeriesDump::from_v("closed", &closed));
            rep.attach(SeriesDump::from_v("brute", &brute));
            rep.attach(SeriesDump::from_v("difference", &(&closed - &brute)));
            Ok(rep)
        }
        Some(vs) => {
            let p: Vec<f64> = params.iter().map(|s| real(s)).collect::<Result<_>>()?;
            let v = real(vs)?;
            let (p1, p2) = (ParamPair::new(c(p[0]), c(p[1])), ParamPair::new(c(p[2]), c(p[3])));
            let cfg = json!({ "params": p, "v": v, "max_size": max_size, "tol": tol, "backend": "numeric" });
            let mut rep = Report::new("twopoint", cfg);
            // the tail bound carries the clearest convergence-domain diagnosis
            let brute = domain(trace_brute_hat_numeric(&[p1.clone(), p2.clone()], c(v), max_size))?;
            let closed = domain(two_point_closed_general(&p1, &p2, c(v), SumOptions::default()))?;
            let dev = (closed.value - brute.value).norm();
            let allowed = tol + brute.error_bound + closed.error_bound;
            rep.push(
                "general_closed_vs_brute",
                dev <= allowed,
                json!(dev),
                json!({
                    "closed": { "re": closed.value.re, "im": closed.value.im, "error_bound": closed.error_bound },
                    "brute": { "re": brute.value.re, "im": brute.value.im, "tail_bound": brute.error_bound },
                    "max_size": max_size,
                    "allowed": allowed,
                }),
            );
            Ok(rep)
        }
    }
}

fn vertex(params: &[String], kappa: &str, n: usize, order: usize, zeta_order: usize) -> Result<Report> {
    if !(1..=2).contains(&n) {
        return usage("--n must be 1 or 2");
    }
    if params.len() != 4 * n {
        return usage(format!("--params needs {} values (q1,q2,t1,t2 per vertex)", 4 * n));
    }
    let kappa = exact(kappa)?;
    let p: Vec<Rational> = params.iter().map(|s| exact(s)).collect::<Result<_>>()?;
    let vps: Vec<VertexParams> = p
        .chunks(4)
        .map(|ch| VertexParams::from_zero_mode_args(ch[0].clone(), ch[1].clone(), ch[2].clone(), ch[3].clone(), kappa.clone()))
        .collect();
    let cfg = json!({ "params": params, "kappa": kappa.to_string(), "n": n, "order": order, "zeta_order": zeta_order });
    let mut rep = Report::new("vertex", cfg);
    if n == 1 {
        let vp = &vps[0];
        let closed = domain(zero_mode_expectation_closed(vp, order))?;
        let brute = zero_mode_expectation_brute(vp, order);
        let dev = series_dev(&closed, &brute);
        rep.push("zero_mode_closed_vs_trace", dev.is_zero(), json!(dev.to_string()), json!({ "order": order }));
        let routes = series_dev(&v0_trace_projection(vp, order), &v0_trace_direct(vp, order));
        rep.push("trace_projection_vs_direct", routes.is_zero(), json!(routes.to_string()), json!({ "order": order }));
        rep.attach(SeriesDump::from_v("closed", &closed));
        rep.attach(SeriesDump::from_v("brute", &brute));
        rep.attach(SeriesDump::from_v("difference", &(&closed - &brute)));
    } else {
        let closed = domain(vertex_product_expectation_closed(&vps, order, zeta_order))?;
        let brute = domain(two_vertex_expectation_brute(&vps[0], &vps[1], order, zeta_order))?;
        let product = domain(vertex_product_expectation_product_form(&vps, order, zeta_order))?;
        let box_ = json!({ "v_order": order, "intermediate_degree_cap": order + zeta_order });
        let dev = domain(closed.max_abs_diff(&brute))?;
        rep.push("two_vertex_closed_vs_brute", dev.is_zero(), json!(dev.to_string()), box_.clone());
        let dev = domain(closed.max_abs_diff(&product))?;
        rep.push("two_vertex_closed_vs_product_form", dev.is_zero(), json!(dev.to_string()), box_);
        rep.attach(SeriesDump::from_zeta("closed", &closed));
        rep.attach(SeriesDump::from_zeta("brute", &brute));
        rep.attach(SeriesDump::from_zeta("difference", &domain(closed.sub(&brute))?));
    }
    Ok(rep)
}

fn verify(suite: &str, seed: u64, tol: f64) -> Result<Report> {
    if !SUITES.contains(&suite) {
        return usage(format!("unknown suite '{suite}'; expected one of {}", SUITES.join(", ")));
    }
    let cfg = VerifyConfig { seed, tol };
    let mut rep = Report::new("verify", json!({ "suite": suite, "seed": seed, "tol": tol }));
    for r in domain(run_suite(suite, &cfg))? {
        rep.push_check(r);
    }
    Ok(rep)
}

fn series(expression: &str, order: usize) -> Result<Report> {
    let s = expr::evaluate(expression, order).map_err(|e| UsageError(e.to_string()))?;
    let mut rep = Report::new("series", json!({ "expression": expression, "order": order }));
    rep.push("evaluate", true, serde_json::Value::Null, json!({ "order": order }));
    rep.attach(SeriesDump::from_v("result", &s));
    Ok(rep)
}

fn run(cli: &Cli) -> Result<Report> {
    if !(cli.tol > 0.0) {
        return usage("--tol must be positive");
    }
    if let Some(n) = cli.threads {
        if n == 0 {
            return usage("thread count must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring the worker pool")?;
    }
    match &cli.command {
        Command::Onepoint { q, t, order } => onepoint(q, t, *order),
        Command::Twopoint { params, order, v, max_size } => twopoint(params, *order, v.as_deref(), *max_size, cli.tol),
        Command::Vertex { params, kappa, n, order, zeta_order } => vertex(params, kappa, *n, *order, *zeta_order),
        Command::Verify { suite } => verify(suite, cli.seed, cli.tol),
        Command::Series { expression, order } => series(expression, *order),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(rep) => {
            print!("{}", rep.render(cli.format));
            if rep.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            // usage, parse and domain errors alike: no check was run
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_accepts_both_notations() {
        assert_eq!(real("1/4").unwrap(), 0.25);
        assert_eq!(real("0.25").unwrap(), 0.25);
        assert!(real("x").is_err());
        assert!(exact("0.25").is_err());
    }
}
