//! Orthotoric identities: Vandermonde sums and the `(f, p)`-extremality
//! residual, tested by evaluation at random rational points.

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::solve;
use crate::scalar::{Field, Power, Scalar};

/// `Θ(z) = P(z) + b1 z^{p-1} + b2 z^p`, with `P` in ascending coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaSpec {
    pub poly: Vec<BigRational>,
    pub b1: BigRational,
    pub b2: BigRational,
}

impl ThetaSpec {
    pub fn polynomial(poly: Vec<BigRational>) -> Self {
        ThetaSpec { poly, b1: BigRational::zero(), b2: BigRational::zero() }
    }

    /// `(Θ, Θ', Θ'')` at `z`.
    pub fn jet<S: Scalar>(&self, z: &S, p: Power) -> Result<(S, S, S)> {
        let c: Vec<S> = self.poly.iter().map(S::from_rational).collect();
        let (mut v, mut d1, mut d2) = (S::zero(), S::zero(), S::zero());
        for ck in c.iter().rev() {
            d2 = d2 * z.clone() + d1.clone() * S::from_i64(2);
            d1 = d1 * z.clone() + v.clone();
            v = v * z.clone() + ck.clone();
        }
        if !(self.b1.is_zero() && self.b2.is_zero()) {
            let (b1, b2) = (S::from_rational(&self.b1), S::from_rational(&self.b2));
            let pf = power_value::<S>(p)?;
            let one = S::one();
            let two = S::from_i64(2);
            let zp = |e: i64| zpow(z, p, e);
            v = v + b1.clone() * zp(-1)? + b2.clone() * zp(0)?;
            d1 = d1 + b1.clone() * (pf.clone() - one.clone()) * zp(-2)? + b2.clone() * pf.clone() * zp(-1)?;
            d2 = d2
                + b1 * (pf.clone() - one.clone()) * (pf.clone() - two) * zp(-3)?
                + b2 * pf.clone() * (pf - one) * zp(-2)?;
        }
        Ok((v, d1, d2))
    }
}

fn power_value<S: Scalar>(p: Power) -> Result<S> {
    match p {
        Power::Int(n) => Ok(S::from_i64(n)),
        Power::Real(v) => S::from_f64(v).ok_or_else(|| Error::ExactUnsupported(format!("real exponent p = {v}"))),
    }
}

/// `z^{p + e}`.
fn zpow<S: Scalar>(z: &S, p: Power, e: i64) -> Result<S> {
    match p {
        Power::Int(n) => Ok(z.ipow(n + e)),
        Power::Real(v) => {
            if S::EXACT {
                return Err(Error::ExactUnsupported(format!("z^{} needs a float scalar", v + e as f64)));
            }
            Ok(S::from_f64(z.to_f64().powf(v + e as f64)).expect("finite"))
        }
    }
}

/// Per-coordinate profiles `Θ_j`, Killing potential `f = Σ a_k σ_k` and exponent `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthotoricSpec {
    pub m: usize,
    pub theta: Vec<ThetaSpec>,
    pub f_coeffs: Vec<BigRational>,
    pub p: Power,
}

impl OrthotoricSpec {
    pub fn new(m: usize, theta: Vec<ThetaSpec>, f_coeffs: Vec<BigRational>, p: Power) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidArgument(format!("m = {m} must be at least 2")));
        }
        if theta.len() != m {
            return Err(Error::InvalidArgument(format!("{} profiles given for m = {m}", theta.len())));
        }
        if f_coeffs.len() != m + 1 {
            return Err(Error::InvalidArgument(format!("{} Killing coefficients given, need {}", f_coeffs.len(), m + 1)));
        }
        Ok(OrthotoricSpec { m, theta, f_coeffs, p })
    }

    /// The same polynomial profile in every coordinate.
    pub fn shared(m: usize, poly: Vec<BigRational>, f_coeffs: Vec<BigRational>, p: Power) -> Result<Self> {
        Self::new(m, vec![ThetaSpec::polynomial(poly); m], f_coeffs, p)
    }

    /// `f = σ_m` with `Θ_j = P + b1_j z^{p-1} + b2_j z^p`.
    pub fn sigma_m(m: usize, poly: Vec<BigRational>, b: Vec<(BigRational, BigRational)>, p: i64) -> Result<Self> {
        let theta = b.into_iter().map(|(b1, b2)| ThetaSpec { poly: poly.clone(), b1, b2 }).collect();
        let mut f = vec![BigRational::zero(); m + 1];
        f[m] = BigRational::one();
        Self::new(m, theta, f, Power::Int(p))
    }

    pub fn is_sigma_m(&self) -> bool {
        self.f_coeffs[..self.m].iter().all(|c| c.is_zero()) && self.f_coeffs[self.m].is_one()
    }
}

/// Elementary symmetric value `σ_r(ξ)`; zero outside `0..=len`.
pub fn sigma<F: Field>(xi: &[F], r: i64) -> F {
    if r < 0 || r as usize > xi.len() {
        return F::zero();
    }
    let r = r as usize;
    let mut e = vec![F::zero(); r + 1];
    e[0] = F::one();
    for x in xi {
        for k in (1..=r).rev() {
            e[k] = e[k].clone() + e[k - 1].clone() * x.clone();
        }
    }
    e[r].clone()
}

/// `σ_r(ξ̂_j)`: symmetric function of the coordinates other than `ξ_j`.
pub fn sigma_hat<F: Field>(xi: &[F], r: i64, j: usize) -> F {
    let rest: Vec<F> = xi.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| x.clone()).collect();
    sigma(&rest, r)
}

/// `Δ_j = Π_{k≠j} (ξ_j - ξ_k)`.
pub fn delta<F: Field>(xi: &[F], j: usize) -> F {
    xi.iter()
        .enumerate()
        .filter(|(k, _)| *k != j)
        .fold(F::one(), |acc, (_, x)| acc * (xi[j].clone() - x.clone()))
}

/// Random point with pairwise distinct nonzero rational coordinates:
/// numerators uniform in `[-100, 100]`, denominators in `[1, 20]`.
pub fn random_point(m: usize, rng: &mut ChaCha8Rng) -> Vec<BigRational> {
    loop {
        let xi: Vec<BigRational> = (0..m)
            .map(|_| BigRational::new(rng.gen_range(-100i64..=100).into(), rng.gen_range(1i64..=20).into()))
            .collect();
        let distinct = (0..m).all(|j| (j + 1..m).all(|k| xi[j] != xi[k]));
        if distinct && xi.iter().all(|x| !x.is_zero()) {
            return xi;
        }
    }
}

/// Random point with positive coordinates, for real exponents in float mode.
fn random_positive_point(m: usize, rng: &mut ChaCha8Rng) -> Vec<BigRational> {
    loop {
        let xi: Vec<BigRational> = (0..m)
            .map(|_| BigRational::new(rng.gen_range(1i64..=100).into(), rng.gen_range(1i64..=20).into()))
            .collect();
        if (0..m).all(|j| (j + 1..m).all(|k| xi[j] != xi[k])) {
            return xi;
        }
    }
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VandermondeFamily {
    /// `Σ_j ξ_j^{m-s} σ_{r-1}(ξ̂_j) / Δ_j = (-1)^{s-1} δ_{rs}`.
    General,
    /// `Σ_j ξ_j^{m-s} / Δ_j = δ_{s1}` and `Σ_j ξ_j^m / Δ_j = σ_1`.
    Basic,
    /// `Σ_j ξ_j^{s-2} / Δ_j = (-1)^{m-1} δ_{s1} / σ_m` and
    /// `Σ_j ξ_j^{-2} / Δ_j = (-1)^{m-1} σ_{m-1} / σ_m²`.
    Inverse,
}

impl VandermondeFamily {
    pub fn label(&self) -> &'static str {
        match self {
            VandermondeFamily::General => "general",
            VandermondeFamily::Basic => "basic",
            VandermondeFamily::Inverse => "inverse",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VandermondeReport {
    pub family: VandermondeFamily,
    pub m: usize,
    pub trials: usize,
    pub identities_checked: usize,
    /// Points at which some identity failed.
    pub failures: Vec<Vec<BigRational>>,
}

impl VandermondeReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn sign(k: i64) -> BigRational {
    if k.rem_euclid(2) == 0 {
        BigRational::one()
    } else {
        -BigRational::one()
    }
}

/// `(lhs, rhs)` pairs of one family at one point.
fn vandermonde_pairs(family: VandermondeFamily, xi: &[BigRational]) -> Vec<(BigRational, BigRational)> {
    let m = xi.len();
    let mi = m as i64;
    let deltas: Vec<BigRational> = (0..m).map(|j| delta(xi, j)).collect();
    let sum = |g: &dyn Fn(usize) -> BigRational| (0..m).fold(BigRational::zero(), |acc, j| acc + g(j) / deltas[j].clone());
    let kron = |a: i64, b: i64| if a == b { BigRational::one() } else { BigRational::zero() };
    let mut out = Vec::new();
    match family {
        VandermondeFamily::General => {
            for r in 1..=mi {
                for s in 1..=mi {
                    let lhs = sum(&|j| xi[j].ipow(mi - s) * sigma_hat(xi, r - 1, j));
                    out.push((lhs, sign(s - 1) * kron(r, s)));
                }
            }
        }
        VandermondeFamily::Basic => {
            for s in 1..=mi {
                out.push((sum(&|j| xi[j].ipow(mi - s)), kron(s, 1)));
            }
            out.push((sum(&|j| xi[j].ipow(mi)), sigma(xi, 1)));
        }
        VandermondeFamily::Inverse => {
            let sm = sigma(xi, mi);
            for s in 1..=mi {
                out.push((sum(&|j| xi[j].ipow(s - 2)), sign(mi - 1) * kron(s, 1) / sm.clone()));
            }
            out.push((sum(&|j| xi[j].ipow(-2)), sign(mi - 1) * sigma(xi, mi - 1) / (sm.clone() * sm)));
        }
    }
    out
}

/// Tests one identity family at `trials` random points, exactly.
pub fn check_vandermonde(m: usize, family: VandermondeFamily, trials: usize, seed: u64) -> Result<VandermondeReport> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!("m = {m} must be at least 2")));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be positive".into()));
    }
    let mut rng = rng_from_seed(seed);
    let mut failures = Vec::new();
    let mut checked = 0;
    for _ in 0..trials {
        let xi = random_point(m, &mut rng);
        let pairs = vandermonde_pairs(family, &xi);
        checked += pairs.len();
        if pairs.iter().any(|(l, r)| l != r) {
            failures.push(xi);
        }
    }
    Ok(VandermondeReport { family, m, trials, identities_checked: checked, failures })
}

/// Left side of the `(f, p)`-extremality equation at `ξ`:
///
/// `-f² Σ Θ_j''/Δ_j + 2(p-1) f Σ a_k σ_{k-1}(ξ̂_j) Θ_j'/Δ_j
///  - p(p-1) Σ a_k a_l σ_{k-1}(ξ̂_j) σ_{l-1}(ξ̂_j) Θ_j/Δ_j`.
pub fn fp_ext_residual<S: Scalar>(spec: &OrthotoricSpec, xi: &[S]) -> Result<S> {
    let m = spec.m;
    if xi.len() != m {
        return Err(Error::InvalidArgument(format!("point has {} coordinates, need {m}", xi.len())));
    }
    let a: Vec<S> = spec.f_coeffs.iter().map(S::from_rational).collect();
    let p = power_value::<S>(spec.p)?;
    let one = S::one();
    let f = (0..=m).fold(S::zero(), |acc, k| acc + a[k].clone() * sigma(xi, k as i64));
    let (mut t2, mut t1, mut t0) = (S::zero(), S::zero(), S::zero());
    for j in 0..m {
        let dj = delta(xi, j);
        if dj.is_zero() {
            return Err(Error::InvalidArgument("coincident coordinates: Δ_j = 0".into()));
        }
        let (th, th1, th2) = spec.theta[j].jet(&xi[j], spec.p)?;
        // Σ_k a_k σ_{k-1}(ξ̂_j) is the derivative of f in ξ_j
        let df = (1..=m).fold(S::zero(), |acc, k| acc + a[k].clone() * sigma_hat(xi, k as i64 - 1, j));
        t2 = t2 + th2 / dj.clone();
        t1 = t1 + df.clone() * th1 / dj.clone();
        t0 = t0 + df.clone() * df * th / dj;
    }
    Ok(-(f.clone() * f.clone()) * t2 + S::from_i64(2) * (p.clone() - one.clone()) * f * t1 - p.clone() * (p - one) * t0)
}

/// Outcome of fitting `Σ_k b_k σ_k` to a residual.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineFit<S> {
    pub is_affine: bool,
    /// `b_0, ..., b_m`, present whenever the fitting system was solvable.
    pub coeffs: Option<Vec<S>>,
    /// Largest verification mismatch (zero in exact mode when affine).
    pub max_mismatch: f64,
}

/// Float-mode agreement tolerance, relative to the residual scale.
pub const FLOAT_TOL: f64 = 1e-9;

/// Fits `b_0..b_m` from `m + 1` random points, then checks the fit at
/// `trials` fresh points (exactly, or to [`FLOAT_TOL`] in float mode).
pub fn check_affine_in_sigma<S: Scalar>(
    eval: &dyn Fn(&[S]) -> Result<S>,
    m: usize,
    trials: usize,
    rng: &mut ChaCha8Rng,
    positive_points: bool,
) -> Result<AffineFit<S>> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be positive".into()));
    }
    let draw = |rng: &mut ChaCha8Rng| -> Vec<S> {
        let pt = if positive_points { random_positive_point(m, rng) } else { random_point(m, rng) };
        pt.iter().map(S::from_rational).collect()
    };
    let mut coeffs = None;
    for _ in 0..20 {
        let pts: Vec<Vec<S>> = (0..=m).map(|_| draw(rng)).collect();
        let rows: Vec<Vec<S>> = pts.iter().map(|x| (0..=m).map(|k| sigma(x, k as i64)).collect()).collect();
        let rhs: Vec<S> = pts.iter().map(|x| eval(x)).collect::<Result<_>>()?;
        // resample when the σ-vectors are affinely dependent
        if let Some(b) = solve(rows, rhs) {
            coeffs = Some(b);
            break;
        }
    }
    let b = coeffs.ok_or_else(|| Error::Singular("could not draw affinely independent points".into()))?;
    let mut worst = 0.0f64;
    let mut ok = true;
    for _ in 0..trials {
        let x = draw(rng);
        let fit = (0..=m).fold(S::zero(), |acc, k| acc + b[k].clone() * sigma(&x, k as i64));
        let v = eval(&x)?;
        let diff = (v.clone() - fit).abs_val();
        if S::EXACT {
            if !diff.is_zero() {
                ok = false;
                worst = worst.max(diff.to_f64());
            }
        } else {
            let rel = diff.to_f64() / v.abs_val().to_f64().max(1.0);
            worst = worst.max(rel);
            if rel > FLOAT_TOL {
                ok = false;
            }
        }
    }
    Ok(AffineFit { is_affine: ok, coeffs: Some(b), max_mismatch: worst })
}

/// Affinity test of the extremality residual of `spec`.
pub fn check_spec_affine<S: Scalar>(spec: &OrthotoricSpec, trials: usize, seed: u64) -> Result<AffineFit<S>> {
    let positive = matches!(spec.p, Power::Real(_));
    if S::EXACT && positive {
        return Err(Error::ExactUnsupported("non-integer p needs float mode".into()));
    }
    let mut rng = rng_from_seed(seed);
    check_affine_in_sigma(&|x: &[S]| fp_ext_residual(spec, x), spec.m, trials, &mut rng, positive)
}

/// Closed-form `(b0, b1)` for the flat case `Θ_j = P`, `f = a0 + a1 σ_1`,
/// where `c0` and `c1` are the coefficients of `z^m` and `z^{m-1}` in `P`:
/// `b1 = a1² c0 (p-1)(2m-p)`, `b0 = (p-1)(2m a0 a1 c0 - p a1² c1)`.
pub fn flat_coefficients<F: Field>(m: usize, p: &F, a0: &F, a1: &F, c0: &F, c1: &F) -> (F, F) {
    let one = F::one();
    let two_m = F::from_i64(2 * m as i64);
    let pm1 = p.clone() - one;
    let b1 = a1.clone() * a1.clone() * c0.clone() * pm1.clone() * (two_m.clone() - p.clone());
    let b0 = pm1 * (two_m * a0.clone() * a1.clone() * c0.clone() - p.clone() * a1.clone() * a1.clone() * c1.clone());
    (b0, b1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsckCheck {
    /// Fitted `b_{m-1} = b_m = 0`.
    pub csck: bool,
    /// `P(0) = P'(0) = 0`.
    pub criterion: bool,
    /// Fitted `b_k = 0` for every `k ≤ m - 2`.
    pub lower_vanish: bool,
    pub fit: AffineFit<BigRational>,
}

impl CsckCheck {
    pub fn consistent(&self) -> bool {
        self.fit.is_affine && self.lower_vanish && self.csck == self.criterion
    }
}

/// Constant weighted scalar curvature test for `f = σ_m`, compared against
/// the criterion `P(0) = P'(0) = 0`.
pub fn sigma_m_csck_check(spec: &OrthotoricSpec, trials: usize, seed: u64) -> Result<CsckCheck> {
    if !spec.is_sigma_m() {
        return Err(Error::InvalidArgument("Killing potential is not σ_m".into()));
    }
    match spec.p {
        Power::Int(p) if !(1..=spec.m as i64 + 1).contains(&p) => {}
        other => return Err(Error::InvalidArgument(format!("p = {other} must be an integer outside 1..=m+1"))),
    }
    let poly = &spec.theta[0].poly;
    if spec.theta.iter().any(|t| &t.poly != poly) {
        return Err(Error::InvalidArgument("σ_m form needs one shared polynomial part".into()));
    }
    if poly.len() > spec.m + 1 {
        return Err(Error::InvalidArgument(format!("polynomial part has degree above m = {}", spec.m)));
    }
    let fit = check_spec_affine::<BigRational>(spec, trials, seed)?;
    let b = fit.coeffs.clone().unwrap_or_default();
    let m = spec.m;
    let csck = b.len() == m + 1 && b[m - 1].is_zero() && b[m].is_zero();
    let lower_vanish = b.len() == m + 1 && b[..m - 1].iter().all(|c| c.is_zero());
    let coeff = |k: usize| poly.get(k).cloned().unwrap_or_else(BigRational::zero);
    let criterion = coeff(0).is_zero() && coeff(1).is_zero();
    Ok(CsckCheck { csck, criterion, lower_vanish, fit })
}
