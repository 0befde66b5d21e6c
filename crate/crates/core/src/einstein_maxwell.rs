//! The `p = 2m` specialization: roots of `A1(a)`, Einstein–Maxwell parameter
//! search, the Yamabe-type functional, Hirzebruch and Hodge-4 closed forms,
//! the double-root discriminant and the conformally-Einstein profile.

use std::f64::consts::PI;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::moments::{quad, solve_constants_field, solve_extremal_constants};
use crate::poly::Poly;
use crate::positivity::{positivity_check, PositivityReport};
use crate::profile::{build_profile, canonical_profile, Profile};
use crate::ratfn::RationalFn;
use crate::roots::{bisect, golden_min, real_roots, simplest_rational_between};
use crate::scalar::{q, Field, Power, Scalar};
use crate::setup::{AdmissibleSetup, Block, WeightParams};

/// Default upper end of the search interval for `a`.
pub const DEFAULT_A_MAX: f64 = 1000.0;
/// Grid size of the float bracketing scan.
pub const SCAN_POINTS: usize = 512;
/// Lower offset of the float scan: the grid covers `a - 1 ∈ [SCAN_OFFSET, a_max - 1]`.
pub const SCAN_OFFSET: f64 = 1e-3;

/// `A1` as a rational function of `a` for integer `p` (symbolic `a`).
pub fn a1_rational_function(setup: &AdmissibleSetup<BigRational>, p: i64) -> Result<RationalFn<BigRational>> {
    let sym = setup.map(|c| RationalFn::constant(c.clone()));
    let (a1, _) = solve_constants_field(&sym, &RationalFn::variable(), p)?;
    Ok(a1)
}

/// `(A1, A2)` as rational functions of `a`.
pub fn constants_rational_functions(
    setup: &AdmissibleSetup<BigRational>,
    p: i64,
) -> Result<(RationalFn<BigRational>, RationalFn<BigRational>)> {
    let sym = setup.map(|c| RationalFn::constant(c.clone()));
    solve_constants_field(&sym, &RationalFn::variable(), p)
}

/// `A1` at a single float `a`.
pub fn a1_at(setup: &AdmissibleSetup<f64>, p: Power, a: f64) -> Result<f64> {
    Ok(solve_extremal_constants(setup, &WeightParams::new(a, p)?)?.a1)
}

/// A root of `A1(a)` with `|a| > 1` together with the extremal data there.
#[derive(Debug, Clone)]
pub struct EmSolution {
    pub a: f64,
    /// The root itself when it is rational (exact search only).
    pub a_exact: Option<BigRational>,
    /// Exact multiplicity, or an estimate in float mode.
    pub multiplicity: usize,
    pub multiplicity_exact: bool,
    /// Constant weighted scalar curvature; the scalar curvature of `(z+a)^{-2} g`.
    pub a2: f64,
    pub positivity: PositivityReport,
    pub profile: Profile<f64>,
    /// Set for `a < -1`: `profile` then belongs to the mirrored setup at `-a`.
    pub mirrored: bool,
}

fn solution_at(
    setup: &AdmissibleSetup<f64>,
    p: Power,
    a: f64,
    a_exact: Option<BigRational>,
    multiplicity: usize,
    multiplicity_exact: bool,
    exact_setup: Option<&AdmissibleSetup<BigRational>>,
) -> Result<EmSolution> {
    let w = WeightParams::new(a, p)?;
    let profile = build_profile(setup, &w)?;
    let (_, a2) = profile.constants().expect("solver profile");
    // a rational root allows the exact positivity decision
    let positivity = match (&a_exact, exact_setup, p) {
        (Some(ar), Some(es), Power::Int(n)) => {
            let wq = WeightParams::int(ar.clone(), n)?;
            positivity_check(&build_profile(es, &wq)?)
        }
        _ => positivity_check(&profile),
    };
    Ok(EmSolution { a, a_exact, multiplicity, multiplicity_exact, a2, positivity, profile, mirrored: false })
}

/// All roots of `A1(a) = 0` with `1 < a ≤ a_max`.
///
/// Exact scalars with integer `p` isolate the roots of the numerator of
/// `A1(a)` by Sturm sequences (an infinite `a_max` means no cap); otherwise
/// a log-spaced sign scan is refined by bisection, and near-tangencies are
/// refined by golden section.
pub fn find_em_parameters<S: Scalar>(setup: &AdmissibleSetup<S>, p: Power, a_max: f64) -> Result<Vec<EmSolution>> {
    if !(a_max > 1.0) {
        return Err(Error::InvalidArgument(format!("a_max = {a_max} must exceed 1")));
    }
    let sf = setup.to_f64();
    if let (true, Power::Int(n)) = (S::EXACT, p) {
        let es = setup.map(|c| c.to_rational().expect("exact scalar"));
        return exact_search(&es, &sf, n, a_max);
    }
    if !a_max.is_finite() {
        return Err(Error::InvalidArgument("the float search needs a finite a_max".into()));
    }
    float_search(&sf, p, a_max)
}

/// `1 + max |c_k / c_n|`, an upper bound for the real roots.
fn cauchy_bound(p: &Poly<BigRational>) -> BigRational {
    let lead = p.leading();
    let m = p.coeffs().iter().map(|c| (c.clone() / lead.clone()).abs()).max().unwrap_or_else(BigRational::zero);
    m + BigRational::one()
}

fn exact_search(
    es: &AdmissibleSetup<BigRational>,
    sf: &AdmissibleSetup<f64>,
    p: i64,
    a_max: f64,
) -> Result<Vec<EmSolution>> {
    let a1 = a1_rational_function(es, p)?;
    if a1.is_zero() {
        return Err(Error::InvalidArgument("A1 vanishes identically in a".into()));
    }
    let hi = if a_max.is_finite() {
        BigRational::from_float(a_max).expect("finite a_max")
    } else {
        cauchy_bound(a1.numer())
    };
    let width = q(1, 1i64 << 56);
    let mut out = Vec::new();
    for r in real_roots(a1.numer(), &q(1, 1), &hi, &width) {
        // a rational root with a small denominator is the simplest fraction in its interval
        let cand = simplest_rational_between(&r.lo, &r.hi);
        let exact = a1.numer().eval(&cand).is_zero().then_some(cand);
        out.push(solution_at(sf, Power::Int(p), r.to_f64(), exact, r.multiplicity, true, Some(es))?);
    }
    // a root sitting exactly on a_max
    if a_max.is_finite() && a1.numer().eval(&hi).is_zero() {
        let mult = a1.numer().deflate_root(&hi).0;
        out.push(solution_at(sf, Power::Int(p), a_max, Some(hi), mult, true, Some(es))?);
    }
    Ok(out)
}

/// All roots with `1 < |a| ≤ a_max`, ascending. Roots below `-1` come from
/// the mirrored setup, where they appear as `-a > 1`.
pub fn find_em_parameters_abs<S: Scalar>(
    setup: &AdmissibleSetup<S>,
    p: Power,
    a_max: f64,
) -> Result<Vec<EmSolution>> {
    let mut out: Vec<EmSolution> = find_em_parameters(&setup.mirror(), p, a_max)?
        .into_iter()
        .rev()
        .map(|mut s| {
            s.a = -s.a;
            s.a_exact = s.a_exact.map(|v| -v);
            s.mirrored = true;
            s
        })
        .collect();
    out.extend(find_em_parameters(setup, p, a_max)?);
    Ok(out)
}

/// Whether the class carries a CSCK metric, seen as a root `a = ∞`:
/// `A1` grows like `a²` times the unweighted Futaki invariant, so the
/// class is CSCK exactly when `A1` grows at most linearly.
pub fn csck_at_infinity(setup: &AdmissibleSetup<BigRational>, p: i64) -> Result<bool> {
    let a1 = a1_rational_function(setup, p)?;
    let (n, d) = (a1.numer().degree(), a1.denom().degree().unwrap_or(0));
    Ok(n.map_or(true, |n| n < d + 2))
}

/// Log-spaced scan points for `a` in `(1, a_max]`.
pub fn scan_grid(a_max: f64, n: usize) -> Vec<f64> {
    let lo = SCAN_OFFSET.ln();
    let hi = (a_max - 1.0).ln();
    (0..n).map(|i| 1.0 + (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Order of vanishing from `|g(r+2h)| / |g(r+h)| ≈ 2^k`.
fn estimate_multiplicity(g: &dyn Fn(f64) -> f64, r: f64) -> usize {
    let h = 1e-3 * (r - 1.0).min(1.0);
    let k = |s: f64| ((g(r + 2.0 * s) / g(r + s)).abs().log2()).round();
    let est = 0.5 * (k(h) + k(-h));
    if est.is_finite() && est >= 1.0 {
        est.round() as usize
    } else {
        1
    }
}

fn float_search(sf: &AdmissibleSetup<f64>, p: Power, a_max: f64) -> Result<Vec<EmSolution>> {
    let grid = scan_grid(a_max, SCAN_POINTS);
    let vals: Vec<f64> = grid.par_iter().map(|&a| a1_at(sf, p, a)).collect::<Result<_>>()?;
    let g = |a: f64| a1_at(sf, p, a).unwrap_or(f64::NAN);
    let mut roots: Vec<(f64, usize)> = Vec::new();
    for i in 0..grid.len() - 1 {
        if vals[i] == 0.0 {
            roots.push((grid[i], estimate_multiplicity(&g, grid[i])));
        } else if vals[i] * vals[i + 1] < 0.0 {
            let r = bisect(g, grid[i], grid[i + 1], 1e-12 * grid[i]);
            roots.push((r, estimate_multiplicity(&g, r)));
        }
    }
    // tangential roots do not change sign: refine small local minima of |A1|
    for i in 1..grid.len() - 1 {
        let (l, c, r) = (vals[i - 1].abs(), vals[i].abs(), vals[i + 1].abs());
        if c < l && c < r && vals[i - 1] * vals[i + 1] > 0.0 && vals[i] * vals[i - 1] > 0.0 {
            let (t, v) = golden_min(|a| g(a).abs(), grid[i - 1], grid[i + 1], 1e-12 * grid[i]);
            let a2 = solve_extremal_constants(sf, &WeightParams::new(t, p)?)?.a2;
            if v <= 1e-9 * a2.abs().max(1.0) {
                roots.push((t, 2));
            }
        }
    }
    roots.sort_by(|a, b| a.0.total_cmp(&b.0));
    roots
        .into_iter()
        .map(|(r, k)| solution_at(sf, p, r, None, k, false, None))
        .collect()
}

/// `a0(x) = (1 + √(1-x²)) / x` and, for `x ≥ 4/5`, the pair
/// `a± = (x ± √(x(5x-4))) / (2(1-x))`, returned as `(a0, Some((a+, a-)))`.
pub fn hirzebruch_closed_forms(x: f64) -> Result<(f64, Option<(f64, f64)>)> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::InvalidArgument(format!("x = {x} must lie in (0, 1)")));
    }
    let a0 = (1.0 + (1.0 - x * x).sqrt()) / x;
    let disc = x * (5.0 * x - 4.0);
    if disc < 0.0 {
        return Ok((a0, None));
    }
    let r = disc.sqrt();
    let ap = (x + r) / (2.0 * (1.0 - x));
    let am = (x - r) / (2.0 * (1.0 - x));
    debug_assert!(1.0 < am && am <= a0 * (1.0 + 1e-12) && a0 <= ap * (1.0 + 1e-12));
    Ok((a0, Some((ap, am))))
}

/// Exact square root of a nonnegative rational, if it is a perfect square.
pub fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    (n.clone() * n.clone() == *r.numer() && d.clone() * d.clone() == *r.denom()).then(|| BigRational::new(n, d))
}

/// `D_s(x)`, whose zeros mark double roots of `F/(1-z²)` on the `a0(x)` branch.
pub fn double_root_discriminant(s: f64, x: f64) -> f64 {
    discriminant_with_root(s, x, (1.0 - x * x).sqrt())
}

/// [`double_root_discriminant`] in exact arithmetic when `√(1-x²)` is rational.
pub fn double_root_discriminant_exact(s: &BigRational, x: &BigRational) -> Option<BigRational> {
    let r = rational_sqrt(&(BigRational::one() - x.clone() * x.clone()))?;
    Some(discriminant_with_root(s.clone(), x.clone(), r))
}

fn discriminant_with_root<F: Field>(s: F, x: F, r: F) -> F {
    let c = |n: i64| F::from_i64(n);
    let x2 = x.clone() * x.clone();
    let x3 = x2.clone() * x.clone();
    let x4 = x3.clone() * x.clone();
    let sx = s.clone() * x.clone();
    let poly = c(12) + c(12) * sx.clone() - c(19) * x2.clone() - c(12) * s.clone() * x3.clone()
        + (c(7) + s.clone() * s.clone()) * x4;
    let rad = c(2) + c(2) * sx - c(2) * x2 - s * x3;
    poly + c(6) * rad * r
}

/// Hodge-4 cofactor `q(a, x)` of `A1` for a single block of dimension 2.
pub fn hodge4_q<F: Field>(a: &F, x: &F, s: &F) -> F {
    let c = |n: i64| F::from_i64(n);
    let u = a.clone() - F::one();
    let one_x = F::one() - x.clone();
    let x2 = x.clone() * x.clone();
    let x3 = x2.clone() * x.clone();
    let sx = s.clone() * x.clone();
    let terms = [
        c(96) * one_x.ipow(3),
        c(32) * one_x.ipow(2) * (c(12) - c(9) * x.clone() - sx.clone()),
        c(8) * one_x.clone()
            * (c(87) - c(120) * x.clone() - c(16) * sx.clone() + c(39) * x2.clone() + c(10) * s.clone() * x2.clone()),
        c(8) * one_x.clone()
            * (c(93) - c(81) * x.clone() - c(29) * sx.clone() + c(18) * x2.clone() + c(3) * s.clone() * x2.clone()),
        c(2) * (c(243) - c(315) * x.clone() - c(104) * sx.clone() + c(99) * x2.clone()
            + c(70) * s.clone() * x2.clone()
            - c(15) * x3.clone()
            + c(22) * s.clone() * x3.clone()),
        c(2) * (c(90) - c(63) * x.clone() - c(45) * sx + c(14) * s.clone() * x2.clone() - c(3) * x3.clone()
            + c(15) * s.clone() * x3),
        c(5) * (c(6) - c(2) * s.clone() + s.clone() * (c(2) + x.clone()) * one_x.ipow(2)),
    ];
    let mut acc = F::zero();
    for (k, t) in terms.into_iter().enumerate() {
        acc = acc + t * u.ipow(k as i64);
    }
    acc
}

/// Residual of the Hodge-4 factorization at rational `(a, x, s)`:
///
/// `A1 · G · 45 (a-1)^10 (a+1)^10 / 8 + 2 (-x a² + 2a - x) q(a, x)`,
///
/// where `G = α0 α2 - α1²` is the (positive) Gram determinant of the moments.
/// `A1` itself carries `G` in its denominator, so the factorization is
/// stated for `A1 · G`; both have the same zeros in `a`.
pub fn hodge4_factorization_residual(a: &BigRational, x: &BigRational, s: &BigRational) -> Result<BigRational> {
    let setup = AdmissibleSetup::single(x.clone(), 2, s.clone())?;
    let c = solve_extremal_constants(&setup, &WeightParams::int(a.clone(), 6)?)?;
    let one = BigRational::one();
    let lhs = c.a1.clone() * c.gram_gap() * q(45, 8) * (a.clone() - one.clone()).ipow(10) * (a.clone() + one).ipow(10);
    let lin = -x.clone() * a.clone() * a.clone() + q(2, 1) * a.clone() - x.clone();
    Ok(lhs + q(2, 1) * lin * hodge4_q(a, x, s))
}

/// The polynomial in `a` whose roots are the Einstein–Maxwell parameters of
/// the two-block setup `s1 = 2, s2 = -2` (first-kind Koiso–Sakane classes).
pub fn koiso_sakane_q<F: Field>(x1: &F, x2: &F) -> Poly<F> {
    let c = |n: i64| F::from_i64(n);
    let (x1, x2) = (x1.clone(), x2.clone());
    let s = x1.clone() + x2.clone();
    let p11 = x1.clone() * x1.clone();
    let p22 = x2.clone() * x2.clone();
    let p12 = x1.clone() * x2.clone();
    let p112 = p11.clone() * x2.clone();
    let p122 = x1.clone() * p22.clone();
    let p1122 = p11.clone() * p22.clone();
    let coeffs = vec![
        -c(3) * s.clone() * (x1.clone() - x2.clone() + p12.clone()),
        c(3) * (c(2) * x1.clone() + c(3) * p11.clone() - c(2) * x2.clone() + c(8) * p12.clone()
            + c(2) * p112.clone()
            + c(3) * p22.clone()
            - c(2) * p122.clone()
            + c(2) * p1122.clone()),
        -c(3) * s.clone() * (c(15) - c(2) * x1.clone() + c(2) * x2.clone() + c(17) * p12.clone()),
        c(60) - c(10) * x1.clone() + c(45) * p11.clone() + c(10) * x2.clone() + c(240) * p12.clone()
            - c(18) * p112.clone()
            + c(45) * p22.clone()
            + c(18) * p122.clone()
            + c(90) * p1122.clone(),
        -c(5) * s.clone() * (c(33) + c(4) * x1.clone() - c(4) * x2.clone() + c(45) * p12.clone()),
        c(72) + c(34) * x1.clone() + c(123) * p11.clone() - c(34) * x2.clone() + c(408) * p12.clone()
            + c(50) * p112.clone()
            + c(123) * p22.clone()
            - c(50) * p122.clone()
            + c(90) * p1122.clone(),
        -s.clone() * (c(159) - c(2) * x1.clone() + c(2) * x2.clone() + c(105) * p12.clone()),
        c(60) - c(30) * x1.clone() + c(15) * p11 + c(30) * x2.clone() + c(96) * p12.clone() - c(38) * p112
            + c(15) * p22
            + c(38) * p122
            + c(6) * p1122,
        c(15) * (-F::one() + x1 - x2) * s,
    ];
    Poly::new(coeffs)
}

/// The Koiso–Sakane two-block setup over `CP1 × CP1`.
pub fn koiso_sakane_setup<S: Scalar>(x1: S, x2: S) -> Result<AdmissibleSetup<S>> {
    AdmissibleSetup::new(vec![Block::new(x1, 1, S::from_i64(2)), Block::new(x2, 1, S::from_i64(-2))], 0, 0)
}

/// Jet `(F, F', F'')` used by the Yamabe functional.
pub type JetFn<'a> = dyn Fn(f64) -> (f64, f64, f64) + Sync + 'a;

/// Total scalar curvature over volume^{(m-1)/m} of `(z+t)^{-2} g`, with the
/// base-volume constant dropped, for the profile `jet`.
pub fn yamabe_functional_with(setup: &AdmissibleSetup<f64>, jet: &JetFn, t: f64) -> Result<f64> {
    let (n, d) = yamabe_parts(setup, jet, t)?;
    let m = setup.m() as f64;
    Ok(n / d.powf((m - 1.0) / m))
}

fn yamabe_parts(setup: &AdmissibleSetup<f64>, jet: &JetFn, t: f64) -> Result<(f64, f64)> {
    if !(t > 1.0) {
        return Err(Error::InvalidArgument(format!("t = {t} must exceed 1")));
    }
    let m = setup.m() as f64;
    let pc = setup.momentum_polynomial();
    let cd = setup.curvature_density();
    let e = -2.0 * m;
    let n = quad(
        |z| {
            let (f, df, d2f) = jet(z);
            let w = z + t;
            (-w * w * d2f + 2.0 * (2.0 * m - 1.0) * w * df - 2.0 * m * (2.0 * m - 1.0) * f + 2.0 * w * w * cd.eval(&z))
                * w.powf(e)
        },
        -1.0,
        1.0,
        "Yamabe numerator",
    )?;
    let d = quad(|z| pc.eval(&z) * (z + t).powf(e), -1.0, 1.0, "Yamabe volume")?;
    Ok((n, d))
}

fn canonical_jet(setup: &AdmissibleSetup<f64>) -> impl Fn(f64) -> (f64, f64, f64) + Sync {
    let f = canonical_profile(setup);
    move |z| {
        let j = f.jet_f64(z);
        (j.f, j.df, j.d2f)
    }
}

/// The Yamabe-type functional evaluated with the canonical profile `(1-z²) p_c`.
pub fn yamabe_functional(setup: &AdmissibleSetup<f64>, t: f64) -> Result<f64> {
    yamabe_functional_with(setup, &canonical_jet(setup), t)
}

/// `d/dt` of [`yamabe_functional`], differentiated under the integral.
pub fn yamabe_derivative(setup: &AdmissibleSetup<f64>, t: f64) -> Result<f64> {
    let jet = canonical_jet(setup);
    let (n, d) = yamabe_parts(setup, &jet, t)?;
    let m = setup.m() as f64;
    let pc = setup.momentum_polynomial();
    let cd = setup.curvature_density();
    let e = -2.0 * m;
    let dn = quad(
        |z| {
            let (f, df, d2f) = jet(z);
            let w = z + t;
            let l = -w * w * d2f + 2.0 * (2.0 * m - 1.0) * w * df - 2.0 * m * (2.0 * m - 1.0) * f;
            (-2.0 * w * d2f + 2.0 * (2.0 * m - 1.0) * df) * w.powf(e) + e * l * w.powf(e - 1.0)
                + 2.0 * (2.0 + e) * cd.eval(&z) * w.powf(e + 1.0)
        },
        -1.0,
        1.0,
        "Yamabe numerator derivative",
    )?;
    let dd = quad(|z| e * pc.eval(&z) * (z + t).powf(e - 1.0), -1.0, 1.0, "Yamabe volume derivative")?;
    let k = (m - 1.0) / m;
    Ok(dn * d.powf(-k) - k * n * d.powf(-k - 1.0) * dd)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriticalKind {
    LocalMin,
    LocalMax,
    Inflection,
}

impl CriticalKind {
    pub fn label(&self) -> &'static str {
        match self {
            CriticalKind::LocalMin => "local-min",
            CriticalKind::LocalMax => "local-max",
            CriticalKind::Inflection => "inflection",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint {
    pub t: f64,
    pub value: f64,
    pub kind: CriticalKind,
}

/// Critical points of the Yamabe functional in `(1, t_max]`, located as
/// sign changes of its derivative on the log-spaced scan grid.
pub fn yamabe_critical_points(setup: &AdmissibleSetup<f64>, t_max: f64) -> Result<Vec<CriticalPoint>> {
    let grid = scan_grid(t_max, SCAN_POINTS);
    let d: Vec<f64> = grid.par_iter().map(|&t| yamabe_derivative(setup, t)).collect::<Result<_>>()?;
    let g = |t: f64| yamabe_derivative(setup, t).unwrap_or(f64::NAN);
    let mut out = Vec::new();
    for i in 0..grid.len() - 1 {
        if d[i] * d[i + 1] < 0.0 || d[i] == 0.0 {
            let t = if d[i] == 0.0 { grid[i] } else { bisect(g, grid[i], grid[i + 1], 1e-13 * grid[i]) };
            let kind = match (d[i] < 0.0, d[i + 1] > 0.0) {
                (true, true) => CriticalKind::LocalMin,
                (false, false) => CriticalKind::LocalMax,
                _ => CriticalKind::Inflection,
            };
            out.push(CriticalPoint { t, value: yamabe_functional(setup, t)?, kind });
        }
    }
    Ok(out)
}

/// Factor turning [`yamabe_functional`] into the normalized functional on
/// the first Hirzebruch surface (base `CP1` of area `2π`).
pub fn hirzebruch_yamabe_scale(x: f64) -> f64 {
    2.0 * PI / x.sqrt()
}

/// Closed form of the normalized functional on the first Hirzebruch surface.
pub fn hirzebruch_yamabe_closed(x: f64, t: f64) -> f64 {
    4.0 * PI * 6f64.sqrt() * (1.0 - 2.0 * x - 2.0 * x * t + (1.0 + 2.0 * x) * t * t)
        / (x * (1.0 - 4.0 * x * t + 3.0 * t * t) * (t * t - 1.0)).sqrt()
}

/// `2m(2m-1) Vol(S^{2m})^{1/m}` for `m = 2`.
pub const AUBIN_BOUND_M2: f64 = 8.0 * PI * 2.449_489_742_783_178;

/// The first Hirzebruch surface `P(O ⊕ O(1)) → CP1` in the class `x`;
/// the base block has `s = 2`, so the curvature term of `Scal` is `4x(z+t)²/(1+xz)`.
pub fn hirzebruch_setup<S: Scalar>(x: S) -> Result<AdmissibleSetup<S>> {
    AdmissibleSetup::single(x, 1, S::from_i64(2))
}

/// Profile of the conformally-Einstein ansatz with `y = z + 1/x`, `c = a - 1/x`:
///
/// `F/x^{m-1} = Σ_j (j/m) C(2m, m+j) [λ+ c^{m-j} y^{m+j} - λ- c^{j-1} y^{m-j}] + (2s/m) y^m`.
pub fn einstein_polynomial(m: u32, s: f64, x: f64, a: f64, lp: f64, lm: f64) -> Poly<f64> {
    let mi = m as i64;
    let y = Poly::linear(1.0 / x, 1.0);
    let c = a - 1.0 / x;
    let mut acc = y.pow(m).scale(&(2.0 * s / m as f64));
    for j in 1..=mi {
        let k = j as f64 / m as f64 * binomial(2 * mi, mi + j);
        let plus = y.pow((mi + j) as u32).scale(&(lp * c.powi((mi - j) as i32)));
        let minus = y.pow((mi - j) as u32).scale(&(lm * c.powi((j - 1) as i32)));
        acc = &acc + &(&plus - &minus).scale(&k);
    }
    acc.scale(&x.powi(mi as i32 - 1))
}

fn binomial(n: i64, k: i64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// The four endpoint conditions `F(±1) = 0`, `F'(±1) = ∓2 p_c(±1)` with
/// `p_c = (1 + x z)^{m-1}`.
fn einstein_residual(m: u32, s: f64, v: [f64; 4]) -> [f64; 4] {
    let [lp, lm, x, a] = v;
    let f = einstein_polynomial(m, s, x, a, lp, lm);
    let df = f.derivative();
    let pc = |z: f64| (1.0 + x * z).powi(m as i32 - 1);
    [f.eval(&1.0), f.eval(&-1.0), df.eval(&1.0) + 2.0 * pc(1.0), df.eval(&-1.0) - 2.0 * pc(-1.0)]
}

fn norm(r: &[f64; 4]) -> f64 {
    r.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Least-squares `(λ+, λ-)` for fixed `(x, a)`; the residual is affine in them.
fn lambda_seed(m: u32, s: f64, x: f64, a: f64) -> Option<(f64, f64)> {
    let r0 = einstein_residual(m, s, [0.0, 0.0, x, a]);
    let rp = einstein_residual(m, s, [1.0, 0.0, x, a]);
    let rm = einstein_residual(m, s, [0.0, 1.0, x, a]);
    let cp: Vec<f64> = (0..4).map(|i| rp[i] - r0[i]).collect();
    let cm: Vec<f64> = (0..4).map(|i| rm[i] - r0[i]).collect();
    let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
    let neg: Vec<f64> = r0.iter().map(|v| -v).collect();
    let sol = crate::linalg::solve(
        vec![vec![dot(&cp, &cp), dot(&cp, &cm)], vec![dot(&cm, &cp), dot(&cm, &cm)]],
        vec![dot(&cp, &neg), dot(&cm, &neg)],
    )?;
    Some((sol[0], sol[1]))
}

fn newton(m: u32, s: f64, mut v: [f64; 4]) -> Option<([f64; 4], f64)> {
    let mut r = einstein_residual(m, s, v);
    for _ in 0..100 {
        let nr = norm(&r);
        if nr < 1e-13 {
            break;
        }
        let mut jac = vec![vec![0.0; 4]; 4];
        for k in 0..4 {
            let h = 1e-7 * v[k].abs().max(1.0);
            let (mut up, mut dn) = (v, v);
            up[k] += h;
            dn[k] -= h;
            let (ru, rd) = (einstein_residual(m, s, up), einstein_residual(m, s, dn));
            for i in 0..4 {
                jac[i][k] = (ru[i] - rd[i]) / (2.0 * h);
            }
        }
        let step = crate::linalg::solve(jac, r.iter().map(|x| -x).collect())?;
        let mut lam = 1.0;
        loop {
            let mut cand = v;
            for k in 0..4 {
                cand[k] += lam * step[k];
            }
            let rc = einstein_residual(m, s, cand);
            if norm(&rc) < nr && cand[2] > 0.0 && cand[2] < 1.0 {
                v = cand;
                r = rc;
                break;
            }
            lam *= 0.5;
            if lam < 1e-10 {
                return None;
            }
        }
    }
    let nr = norm(&r);
    nr.is_finite().then_some((v, nr))
}

/// Result of the conformally-Einstein solve.
#[derive(Debug, Clone)]
pub struct ConformallyEinstein {
    pub m: u32,
    pub s: f64,
    pub x_e: f64,
    /// The branch returned by the endpoint solve.
    pub a_e: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub residual: f64,
    /// All parameters `a > 1` with `A1(a) = 0` whose extremal profile equals
    /// the Einstein profile, ascending.
    pub branches: Vec<f64>,
    pub polynomial: Poly<f64>,
}

/// Multi-start grid of the Newton solve.
pub const EINSTEIN_SEEDS: usize = 16;
/// Residual tolerance of the Newton solve.
pub const EINSTEIN_TOL: f64 = 1e-12;

/// Solves the endpoint conditions of the conformally-Einstein ansatz for
/// `(λ+, λ-, x_e, a_e)` by damped Newton from a grid of `(x, a)` seeds, then
/// collects the roots of `A1` at `x_e` whose profile matches.
pub fn conformally_einstein_profile(m: u32, s: f64) -> Result<ConformallyEinstein> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!("m = {m} must be at least 2")));
    }
    if !(s > 1.0) {
        return Err(Error::InvalidArgument(format!("s = {s} must exceed 1")));
    }
    let n = EINSTEIN_SEEDS;
    let seeds: Vec<(f64, f64)> = (0..n * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            let x = 0.05 + 0.9 * i as f64 / (n - 1) as f64;
            let a = (1.05f64.ln() + (20f64.ln() - 1.05f64.ln()) * j as f64 / (n - 1) as f64).exp();
            (x, a)
        })
        .collect();
    let best = seeds
        .par_iter()
        .filter_map(|&(x, a)| {
            let (lp, lm) = lambda_seed(m, s, x, a)?;
            newton(m, s, [lp, lm, x, a])
        })
        .filter(|(v, _)| v[2] > 0.0 && v[2] < 1.0 && v[3] > 1.0)
        .min_by(|a, b| a.1.total_cmp(&b.1));
    let (v, res) = best.ok_or_else(|| Error::NoConvergence("no admissible seed converged".into()))?;
    if res > EINSTEIN_TOL {
        return Err(Error::NoConvergence(format!("best residual {res:e}")));
    }
    let [lp, lm, x_e, a_e] = v;
    let polynomial = einstein_polynomial(m, s, x_e, a_e, lp, lm);
    let setup = AdmissibleSetup::single(x_e, m - 1, s)?;
    let scale = (-20..=20).map(|k| polynomial.eval(&(k as f64 / 20.0)).abs()).fold(0.0, f64::max);
    let mut branches = Vec::new();
    for sol in find_em_parameters(&setup, Power::Int(2 * m as i64), DEFAULT_A_MAX)? {
        let dev = (-20..=20)
            .map(|k| {
                let z = k as f64 / 20.0;
                (sol.profile.value_f64(z) - polynomial.eval(&z)).abs()
            })
            .fold(0.0, f64::max);
        if dev <= 1e-6 * scale {
            branches.push(sol.a);
        }
    }
    Ok(ConformallyEinstein {
        m,
        s,
        x_e,
        a_e,
        lambda_plus: lp,
        lambda_minus: lm,
        residual: res,
        branches,
        polynomial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::time::Instant;

    #[test]
    fn hirzebruch_roots_exact() {
        let t = Instant::now();
        let three = find_em_parameters(&hirzebruch_setup(q(3, 5)).unwrap(), Power::Int(4), 100.0).unwrap();
        assert_eq!(three.len(), 1);
        assert_eq!(three[0].a_exact, Some(q(3, 1)));
        let two = find_em_parameters(&hirzebruch_setup(q(4, 5)).unwrap(), Power::Int(4), 100.0).unwrap();
        assert_eq!(two.len(), 1);
        assert_eq!((two[0].a_exact.clone(), two[0].multiplicity), (Some(q(2, 1)), 3));
        let nine = find_em_parameters(&hirzebruch_setup(q(9, 10)).unwrap(), Power::Int(4), 100.0).unwrap();
        let (a0, pm) = hirzebruch_closed_forms(0.9).unwrap();
        let (ap, am) = pm.unwrap();
        let got: Vec<f64> = nine.iter().map(|r| r.a).collect();
        assert_eq!(got.len(), 3);
        for (g, e) in got.iter().zip([am, a0, ap]) {
            assert!((g - e).abs() < 1e-10, "{g} vs {e}");
        }
        eprintln!("exact Hirzebruch search: {:?}", t.elapsed());
    }

    #[test]
    fn hirzebruch_roots_float() {
        let nine = find_em_parameters(&hirzebruch_setup(0.9).unwrap(), Power::Int(4), 100.0).unwrap();
        let (a0, pm) = hirzebruch_closed_forms(0.9).unwrap();
        let (ap, am) = pm.unwrap();
        let got: Vec<f64> = nine.iter().map(|r| r.a).collect();
        assert_eq!(got.len(), 3, "{got:?}");
        for (g, e) in got.iter().zip([am, a0, ap]) {
            assert!((g - e).abs() < 1e-8 * e, "{g} vs {e}");
        }
        assert!(nine.iter().all(|r| r.multiplicity == 1));
    }

    #[test]
    fn closed_forms() {
        assert!((hirzebruch_closed_forms(0.8).unwrap().0 - 2.0).abs() < 1e-15);
        let (a0, pm) = hirzebruch_closed_forms(0.6).unwrap();
        assert!((a0 - 3.0).abs() < 1e-15 && pm.is_none());
        assert!(hirzebruch_closed_forms(1.0).is_err());
    }

    #[test]
    fn hodge4_factorization() {
        for (a, x, s) in [(q(3, 1), q(1, 2), q(1, 1)), (q(7, 4), q(2, 7), q(5, 2)), (q(11, 3), q(9, 10), q(0, 1))] {
            assert!(hodge4_factorization_residual(&a, &x, &s).unwrap().is_zero());
        }
    }

    #[test]
    fn negative_parameters_through_the_mirror() {
        let setup = koiso_sakane_setup(q(1, 20), q(-1, 2)).unwrap();
        assert!(find_em_parameters(&setup, Power::Int(6), f64::INFINITY).unwrap().is_empty());
        let sols = find_em_parameters_abs(&setup, Power::Int(6), f64::INFINITY).unwrap();
        assert_eq!(sols.len(), 1);
        assert!(sols[0].mirrored && sols[0].a < -1.0);
        let a1 = a1_rational_function(&setup, 6).unwrap();
        let f = |a: f64| {
            let r = BigRational::from_float(a).unwrap();
            a1.eval(&r).unwrap().to_f64()
        };
        let a = sols[0].a;
        assert!(f(a - 1e-6) * f(a + 1e-6) < 0.0);
    }

    #[test]
    fn csck_lines_are_roots_at_infinity() {
        assert!(csck_at_infinity(&koiso_sakane_setup(q(1, 4), q(-1, 4)).unwrap(), 6).unwrap());
        assert!(csck_at_infinity(&koiso_sakane_setup(q(1, 4), q(-3, 4)).unwrap(), 6).unwrap());
        assert!(!csck_at_infinity(&koiso_sakane_setup(q(1, 4), q(-9, 20)).unwrap(), 6).unwrap());
        assert!(!csck_at_infinity(&hirzebruch_setup(q(1, 2)).unwrap(), 4).unwrap());
    }

    #[test]
    fn koiso_sakane_boundary_values_and_divisibility() {
        let (x1, x2) = (q(1, 3), q(-3, 5));
        let qp = koiso_sakane_q(&x1, &x2);
        let one = BigRational::one();
        let sq = |v: BigRational| v.clone() * v;
        assert_eq!(qp.eval(&one), q(192, 1) * sq(x1.clone() - one.clone()) * sq(x2.clone() - one.clone()));
        assert_eq!(qp.eval(&-one.clone()), q(-192, 1) * sq(x1.clone() + one.clone()) * sq(x2.clone() + one.clone()));
        let a1 = a1_rational_function(&koiso_sakane_setup(x1, x2).unwrap(), 6).unwrap();
        let (_, r) = a1.numer().div_rem(&qp);
        assert!(r.is_zero());
    }

    #[test]
    fn discriminant_paths_agree() {
        for s in [q(-3, 1), q(0, 1), q(5, 2)] {
            let ex = double_root_discriminant_exact(&s, &q(4, 5)).unwrap();
            let fl = double_root_discriminant(s.to_f64(), 0.8);
            assert!((ex.to_f64() - fl).abs() < 1e-12);
        }
        assert!((double_root_discriminant(0.0, 1e-9) - 24.0).abs() < 1e-6);
        assert!(double_root_discriminant_exact(&q(1, 1), &q(1, 2)).is_none());
    }

    #[test]
    fn hirzebruch_yamabe_matches_closed_form() {
        let x = 0.9;
        let setup = hirzebruch_setup(x).unwrap();
        for t in [1.5, 2.0, 3.0, 5.0] {
            let v = hirzebruch_yamabe_scale(x) * yamabe_functional(&setup, t).unwrap();
            let e = hirzebruch_yamabe_closed(x, t);
            assert!((v - e).abs() < 1e-10 * e.abs(), "{t}: {v} vs {e}");
        }
    }

    #[test]
    fn yamabe_derivative_matches_difference() {
        let setup = AdmissibleSetup::new(vec![Block::new(0.4, 1, 2.0), Block::new(-0.3, 2, 1.5)], 0, 1).unwrap();
        for t in [1.3, 2.0, 7.0] {
            let h = 1e-5 * t;
            let fd = (yamabe_functional(&setup, t + h).unwrap() - yamabe_functional(&setup, t - h).unwrap()) / (2.0 * h);
            let an = yamabe_derivative(&setup, t).unwrap();
            assert!((fd - an).abs() < 1e-6 * an.abs().max(1.0), "{t}: {fd} vs {an}");
        }
    }

    #[test]
    fn yamabe_critical_points_are_em_roots() {
        let setup = hirzebruch_setup(0.9).unwrap();
        let cps = yamabe_critical_points(&setup, 100.0).unwrap();
        let kinds: Vec<_> = cps.iter().map(|c| c.kind).collect();
        assert_eq!(kinds, [CriticalKind::LocalMin, CriticalKind::LocalMax, CriticalKind::LocalMin]);
        let (a0, _) = hirzebruch_closed_forms(0.9).unwrap();
        assert!((cps[1].t - a0).abs() < 1e-8);
        assert!(hirzebruch_yamabe_scale(0.9) * cps[1].value < AUBIN_BOUND_M2);
    }

    #[test]
    fn einstein_solve_is_extremal() {
        let ce = conformally_einstein_profile(2, 2.0).unwrap();
        assert!(ce.residual < EINSTEIN_TOL);
        let setup = AdmissibleSetup::single(ce.x_e, 1, 2.0).unwrap();
        let a1 = a1_at(&setup, Power::Int(4), ce.a_e).unwrap();
        assert!(a1.abs() < 1e-10, "{a1}");
        let ans = crate::profile::build_profile_ansatz(&setup, &WeightParams::int(ce.a_e, 4).unwrap()).unwrap();
        for k in -10..=10 {
            let z = k as f64 / 10.0;
            assert!((ans.value_f64(z) - ce.polynomial.eval(&z)).abs() < 1e-8);
        }
        assert_eq!(ce.branches.len(), 1);
        assert!(conformally_einstein_profile(2, 1.0).is_err());
    }
}
