//! Numeric q-Pochhammer symbols and `(r+1, r)`-basic hypergeometric series
//! in double-precision complex arithmetic, with residual checks for the
//! q-binomial theorem, Heine's summation and Hall's transformation.

use num::complex::Complex64;
use num::{One, Zero};
use serde::Serialize;

use crate::error::{QtError, Result};

pub type ComplexScalar = Complex64;

/// Factors of a product or denominators smaller than this are treated as
/// vanishing.
const ZERO_FACTOR: f64 = 1e-14;

/// Consecutive small terms required before a series is declared converged.
const SMALL_RUN: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SumOptions {
    pub tol: f64,
    pub max_terms: usize,
}

impl Default for SumOptions {
    fn default() -> Self {
        SumOptions { tol: 1e-12, max_terms: 10_000 }
    }
}

impl SumOptions {
    pub fn with_tol(tol: f64) -> Self {
        SumOptions { tol, ..Self::default() }
    }
}

pub fn c(re: f64) -> ComplexScalar {
    Complex64::new(re, 0.0)
}

/// `(a)_r = Π_{i=0}^{r-1} (1 - a v^i)`.
pub fn num_pochhammer_fin(a: ComplexScalar, r: usize, v: ComplexScalar) -> ComplexScalar {
    let mut acc = Complex64::one();
    let mut vp = Complex64::one();
    for _ in 0..r {
        acc *= Complex64::one() - a * vp;
        vp *= v;
    }
    acc
}

/// A truncated infinite product together with a bound on its relative error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProductValue {
    #[serde(serialize_with = "ser_complex")]
    pub value: ComplexScalar,
    pub factors: usize,
    pub rel_error_bound: f64,
}

/// `(a)_∞`, stopping once `|a v^i| < tol·(1-|v|)`.
///
/// With `I` factors taken and `ε = |a||v|^I / ((1-|v|)(1-|a v^I|))`, the
/// omitted tail satisfies `|log Π_{i≥I}(1 - a v^i)| ≤ ε`, so the relative
/// error is at most `e^ε - 1`.
pub fn num_pochhammer_inf_bounded(
    a: ComplexScalar,
    v: ComplexScalar,
    tol: f64,
) -> Result<ProductValue> {
    let rv = v.norm();
    if rv >= 1.0 {
        return Err(QtError::Divergence(format!("(a)_∞ needs |v| < 1, got |v| = {rv}")));
    }
    let mut acc = Complex64::one();
    let mut term = a; // a·v^i
    let mut factors = 0usize;
    let threshold = tol * (1.0 - rv);
    loop {
        if term.norm() < threshold || term.is_zero() {
            break;
        }
        acc *= Complex64::one() - term;
        term *= v;
        factors += 1;
        if factors > 1_000_000 {
            return Err(QtError::NonConvergence { terms: factors });
        }
    }
    let rest = term.norm();
    let eps = rest / ((1.0 - rv) * (1.0 - rest));
    Ok(ProductValue { value: acc, factors, rel_error_bound: eps.exp_m1() })
}

pub fn num_pochhammer_inf(a: ComplexScalar, v: ComplexScalar, tol: f64) -> Result<ComplexScalar> {
    Ok(num_pochhammer_inf_bounded(a, v, tol)?.value)
}

/// Parameters of `_{r+1}Φ_r(a_1..a_{r+1}; b_1..b_r; v; z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiSpec {
    numerator: Vec<ComplexScalar>,
    denominator: Vec<ComplexScalar>,
    base: ComplexScalar,
    argument: ComplexScalar,
}

impl PhiSpec {
    pub fn new(
        numerator: Vec<ComplexScalar>,
        denominator: Vec<ComplexScalar>,
        base: ComplexScalar,
        argument: ComplexScalar,
    ) -> Result<Self> {
        if numerator.len() != denominator.len() + 1 {
            return Err(QtError::Precondition(format!(
                "need r+1 numerator and r denominator parameters, got {} and {}",
                numerator.len(),
                denominator.len()
            )));
        }
        Ok(PhiSpec { numerator, denominator, base, argument })
    }

    pub fn numerator(&self) -> &[ComplexScalar] {
        &self.numerator
    }

    pub fn denominator(&self) -> &[ComplexScalar] {
        &self.denominator
    }

    pub fn base(&self) -> ComplexScalar {
        self.base
    }

    pub fn argument(&self) -> ComplexScalar {
        self.argument
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhiValue {
    #[serde(serialize_with = "ser_complex")]
    pub value: ComplexScalar,
    pub terms: usize,
}

/// Sums `Σ_m (a_1)_m⋯(a_{r+1})_m / ((v)_m (b_1)_m⋯(b_r)_m) z^m`.
///
/// Stops after three consecutive terms with `|term| ≤ tol·|partial sum|`.
/// A denominator factor `1 - b_j v^{m-1}` that vanishes makes the `m`-th
/// term undefined and is reported as [`QtError::ZeroDenominator`].
pub fn basic_phi(spec: &PhiSpec, opts: SumOptions) -> Result<PhiValue> {
    let v = spec.base;
    let z = spec.argument;
    if v.norm() >= 1.0 {
        return Err(QtError::Divergence(format!("basic series needs |v| < 1, got {}", v.norm())));
    }
    if z.norm() >= 1.0 {
        return Err(QtError::Divergence(format!(
            "basic series needs |z| < 1, got {}",
            z.norm()
        )));
    }
    let mut sum = Complex64::zero();
    let mut term = Complex64::one();
    let mut vm = Complex64::one(); // v^m
    let mut small = 0usize;
    for m in 0..opts.max_terms {
        sum += term;
        if term.norm() <= opts.tol * sum.norm() {
            small += 1;
            if small >= SMALL_RUN {
                return Ok(PhiValue { value: sum, terms: m + 1 });
            }
        } else {
            small = 0;
        }
        // ratio term_{m+1}/term_m
        let mut num = z;
        for &a in &spec.numerator {
            num *= Complex64::one() - a * vm;
        }
        let mut den = Complex64::one() - vm * v;
        for &b in &spec.denominator {
            let f = Complex64::one() - b * vm;
            if f.norm() < ZERO_FACTOR {
                return Err(QtError::ZeroDenominator { index: m + 1 });
            }
            den *= f;
        }
        term = term * num / den;
        vm *= v;
    }
    Err(QtError::NonConvergence { terms: opts.max_terms })
}

fn phi(
    numerator: &[ComplexScalar],
    denominator: &[ComplexScalar],
    v: ComplexScalar,
    z: ComplexScalar,
    opts: SumOptions,
) -> Result<ComplexScalar> {
    let spec = PhiSpec::new(numerator.to_vec(), denominator.to_vec(), v, z)?;
    Ok(basic_phi(&spec, opts)?.value)
}

fn poch(a: ComplexScalar, v: ComplexScalar, opts: SumOptions) -> Result<ComplexScalar> {
    num_pochhammer_inf(a, v, opts.tol)
}

fn require_below_one(x: ComplexScalar, what: &str) -> Result<()> {
    if x.norm() < 1.0 {
        Ok(())
    } else {
        Err(QtError::Divergence(format!("{what} must have modulus < 1, got {}", x.norm())))
    }
}

fn nonzero(x: ComplexScalar, what: &str) -> Result<ComplexScalar> {
    if x.norm() < ZERO_FACTOR {
        Err(QtError::DivisionByZero(what.to_string()))
    } else {
        Ok(x)
    }
}

/// `|Σ_r t^r (a)_r/(v)_r − (at)_∞/(t)_∞|`.
pub fn q_binomial_residual(
    a: ComplexScalar,
    t: ComplexScalar,
    v: ComplexScalar,
    opts: SumOptions,
) -> Result<f64> {
    require_below_one(t, "t")?;
    require_below_one(v, "v")?;
    let lhs = phi(&[a], &[], v, t, opts)?;
    let rhs = poch(a * t, v, opts)? / nonzero(poch(t, v, opts)?, "(t)_∞")?;
    Ok((lhs - rhs).norm())
}

/// Both sides of Heine's summation
/// `₂Φ₁(a,b;c;v;c/ab) = (c/a)_∞(c/b)_∞ / ((c)_∞(c/ab)_∞)`.
pub fn heine_sides(
    a: ComplexScalar,
    b: ComplexScalar,
    cc: ComplexScalar,
    v: ComplexScalar,
    opts: SumOptions,
) -> Result<(ComplexScalar, ComplexScalar)> {
    require_below_one(b, "b")?;
    require_below_one(v, "v")?;
    let a = nonzero(a, "a")?;
    let b_nz = nonzero(b, "b")?;
    let arg = cc / (a * b_nz);
    require_below_one(arg, "c/(ab)")?;
    let lhs = phi(&[a, b], &[cc], v, arg, opts)?;
    let den = nonzero(poch(cc, v, opts)? * poch(arg, v, opts)?, "(c)_∞ (c/ab)_∞")?;
    let rhs = poch(cc / a, v, opts)? * poch(cc / b_nz, v, opts)? / den;
    Ok((lhs, rhs))
}

pub fn heine_residual(
    a: ComplexScalar,
    b: ComplexScalar,
    cc: ComplexScalar,
    v: ComplexScalar,
    opts: SumOptions,
) -> Result<f64> {
    if b.is_zero() {
        // both sides are identically 1 (the series has only its m = 0 term)
        require_below_one(v, "v")?;
        return Ok(0.0);
    }
    let (l, r) = heine_sides(a, b, cc, v, opts)?;
    Ok((l - r).norm())
}

/// Both sides of Hall's two-term transformation
/// `₃Φ₂(a,b,c; d,e; v; de/abc)
///   = (b)_∞(de/ab)_∞(de/bc)_∞ / ((d)_∞(e)_∞(de/abc)_∞)
///     · ₃Φ₂(d/b, e/b, de/abc; de/ab, de/bc; v; b)`.
pub fn hall_sides(
    a: ComplexScalar,
    b: ComplexScalar,
    cc: ComplexScalar,
    d: ComplexScalar,
    e: ComplexScalar,
    v: ComplexScalar,
    opts: SumOptions,
) -> Result<(ComplexScalar, ComplexScalar)> {
    require_below_one(b, "b")?;
    require_below_one(v, "v")?;
    let abc = nonzero(a * b * cc, "abc")?;
    let b = nonzero(b, "b")?;
    let z = d * e / abc;
    require_below_one(z, "de/(abc)")?;
    let de_ab = d * e / (a * b);
    let de_bc = d * e / (b * cc);
    let lhs = phi(&[a, b, cc], &[d, e], v, z, opts)?;
    let den = nonzero(poch(d, v, opts)? * poch(e, v, opts)? * poch(z, v, opts)?, "Hall prefactor")?;
    let pre = poch(b, v, opts)? * poch(de_ab, v, opts)? * poch(de_bc, v, opts)? / den;
    let rhs = pre * phi(&[d / b, e / b, z], &[de_ab, de_bc], v, b, opts)?;
    Ok((lhs, rhs))
}

pub fn hall_residual(
    a: ComplexScalar,
    b: ComplexScalar,
    cc: ComplexScalar,
    d: ComplexScalar,
    e: ComplexScalar,
    v: ComplexScalar,
    opts: SumOptions,
) -> Result<f64> {
    let (l, r) = hall_sides(a, b, cc, d, e, v, opts)?;
    Ok((l - r).norm())
}

pub(crate) fn ser_complex<S: serde::Serializer>(
    z: &ComplexScalar,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeStruct;
    let mut st = s.serialize_struct("Complex", 2)?;
    st.serialize_field("re", &z.re)?;
    st.serialize_field("im", &z.im)?;
    st.end()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::pochhammer_fin;
    use crate::rational::{rat, to_f64, Rational};
    use proptest::prelude::*;

    fn close(a: ComplexScalar, b: ComplexScalar, eps: f64) -> bool {
        (a - b).norm() <= eps * (1.0 + b.norm())
    }

    #[test]
    fn finite_pochhammer() {
        assert_eq!(num_pochhammer_fin(c(0.7), 0, c(0.3)), c(1.0));
        assert_eq!(num_pochhammer_fin(c(2.0), 1, c(0.3)), c(-1.0));
        let val = num_pochhammer_fin(c(0.5), 3, c(0.1));
        assert!(close(val, c(0.5 * 0.95 * 0.995), 1e-15));
    }

    #[test]
    fn infinite_pochhammer() {
        assert_eq!(num_pochhammer_inf(c(0.0), c(0.5), 1e-12).unwrap(), c(1.0));
        let direct: f64 = (1..200).map(|k| 1.0 - 0.1f64.powi(k)).product();
        let got = num_pochhammer_inf(c(0.1), c(0.1), 1e-15).unwrap();
        assert!(close(got, c(direct), 1e-14));
        assert!(matches!(
            num_pochhammer_inf(c(0.5), c(1.0), 1e-12),
            Err(QtError::Divergence(_))
        ));
    }

    #[test]
    fn infinite_pochhammer_matches_exact_rational_product() {
        // a = 1/3, v = 1/10, 40 factors computed exactly
        let (a, v) = (rat(1, 3), rat(1, 10));
        let mut exact = Rational::one();
        let mut vp = Rational::one();
        for _ in 0..40 {
            exact *= Rational::one() - &a * &vp;
            vp *= &v;
        }
        let pv = num_pochhammer_inf_bounded(c(1.0 / 3.0), c(0.1), 1e-15).unwrap();
        let rel = ((pv.value.re - to_f64(&exact)) / to_f64(&exact)).abs();
        assert!(rel < 1e-14, "rel = {rel}");
        assert!(pv.rel_error_bound < 1e-14);
    }

    #[test]
    fn numeric_matches_exact_series_polynomial() {
        // (a)_r as a full polynomial in v, evaluated at a rational point
        for (an, ad, r) in [(1, 3, 5), (-7, 4, 6), (5, 2, 4)] {
            let a = rat(an, ad);
            let order = r * (r - 1) / 2;
            let x = rat(2, 9);
            let exact = to_f64(&pochhammer_fin(&a, r, order).eval(&x));
            let num = num_pochhammer_fin(c(an as f64 / ad as f64), r, c(2.0 / 9.0));
            assert!(((num.re - exact) / exact).abs() < 1e-12);
        }
    }

    #[test]
    fn phi_special_values() {
        let opts = SumOptions::default();
        let zero_arg = PhiSpec::new(vec![c(0.3), c(0.4)], vec![c(0.2)], c(0.1), c(0.0)).unwrap();
        assert_eq!(basic_phi(&zero_arg, opts).unwrap().value, c(1.0));
        let unit =
            PhiSpec::new(vec![c(0.3), c(1.0), c(0.6)], vec![c(0.2), c(0.5)], c(0.2), c(0.7))
                .unwrap();
        assert_eq!(basic_phi(&unit, opts).unwrap().value, c(1.0));
    }

    #[test]
    fn phi_errors() {
        let opts = SumOptions::default();
        assert!(PhiSpec::new(vec![c(0.1)], vec![c(0.2)], c(0.1), c(0.1)).is_err());
        // (b)_m vanishes: b = 1/v² kills the factor at i = 2, i.e. term m = 3
        let bad = PhiSpec::new(vec![c(0.3), c(0.4)], vec![c(100.0)], c(0.1), c(0.5)).unwrap();
        assert_eq!(basic_phi(&bad, opts), Err(QtError::ZeroDenominator { index: 3 }));
        let diverge = PhiSpec::new(vec![c(0.3)], vec![], c(0.1), c(1.2)).unwrap();
        assert!(matches!(basic_phi(&diverge, opts), Err(QtError::Divergence(_))));
        let slow = PhiSpec::new(vec![c(0.0)], vec![], c(0.1), c(0.999)).unwrap();
        let tight = SumOptions { tol: 1e-14, max_terms: 50 };
        assert_eq!(basic_phi(&slow, tight), Err(QtError::NonConvergence { terms: 50 }));
    }

    #[test]
    fn doubling_max_terms_is_stable() {
        let spec =
            PhiSpec::new(vec![c(0.4), c(-0.3), c(0.8)], vec![c(0.25), c(0.6)], c(0.3), c(0.85))
                .unwrap();
        let a = basic_phi(&spec, SumOptions { tol: 1e-13, max_terms: 5_000 }).unwrap();
        let b = basic_phi(&spec, SumOptions { tol: 1e-13, max_terms: 10_000 }).unwrap();
        assert_eq!(a, b);
        assert!(a.terms < 400);
    }

    #[test]
    fn q_binomial_examples() {
        let opts = SumOptions::default();
        assert!(q_binomial_residual(c(0.0), c(0.2), c(0.1), opts).unwrap() < 1e-10);
        assert_eq!(q_binomial_residual(c(0.4), c(0.0), c(0.1), opts).unwrap(), 0.0);
        assert!(q_binomial_residual(c(0.3), c(0.2), c(0.1), opts).unwrap() < 1e-10);
    }

    #[test]
    fn heine_examples() {
        let opts = SumOptions::default();
        let (a, b) = (2.0, 0.3);
        let r = heine_residual(c(a), c(b), c(0.5 * a * b), c(0.1), opts).unwrap();
        assert!(r < 1e-9, "{r}");
        assert_eq!(heine_residual(c(0.7), c(0.0), c(0.2), c(0.1), opts).unwrap(), 0.0);
        // argument c/ab tiny: both sides close to 1
        let r = heine_residual(c(0.8), c(0.5), c(1e-6), c(0.2), opts).unwrap();
        assert!(r < 1e-10);
        assert!(heine_residual(c(0.1), c(0.2), c(0.5), c(0.1), opts).is_err());
    }

    #[test]
    fn hall_examples() {
        let opts = SumOptions::default();
        // c = 1 makes both sides equal to 1
        let (l, r) = hall_sides(c(0.7), c(0.5), c(1.0), c(0.3), c(0.4), c(0.2), opts).unwrap();
        assert!(close(l, c(1.0), 1e-14));
        assert!(close(r, c(1.0), 1e-10));
        let res = hall_residual(c(0.3), c(0.2), c(0.5), c(0.4), c(0.6), c(0.15), opts);
        // |de/abc| = 0.24/0.03 = 8: inadmissible
        assert!(res.is_err());
        let r = hall_residual(c(0.9), c(0.6), c(0.8), c(0.3), c(0.5), c(0.15), opts).unwrap();
        assert!(r < 1e-9, "{r}");
    }

    #[test]
    fn hall_at_the_two_point_instantiation() {
        let opts = SumOptions::default();
        let (q1, t1, q2, t2, v) = (0.3, 0.2, 0.25, 0.15, 0.1);
        let r = hall_residual(
            c(t1 * t2),
            c(t2),
            c(1.0 / q2),
            c(v * t2),
            c(v * q1 * t1 * t2),
            c(v),
            opts,
        )
        .unwrap();
        assert!(r < 1e-9, "{r}");
    }

    proptest! {
        #[test]
        fn q_binomial_holds_on_random_complex_points(
            ar in -0.9f64..0.9, ai in -0.9f64..0.9,
            tr in -0.6f64..0.6, ti in -0.6f64..0.6,
            vr in -0.5f64..0.5, vi in -0.5f64..0.5,
        ) {
            let r = q_binomial_residual(
                Complex64::new(ar, ai), Complex64::new(tr, ti), Complex64::new(vr, vi),
                SumOptions::default(),
            ).unwrap();
            prop_assert!(r < 1e-9);
        }
    }
}
