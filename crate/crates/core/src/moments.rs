//! Weighted moments of `p_c` and the extremal constants `(A1, A2)`.

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::quadrature::integrate;
use crate::scalar::{Field, Power, Scalar};
use crate::setup::{AdmissibleSetup, WeightParams};

/// `(t + a)^q` in f64 for an integer or real exponent.
pub(crate) fn wpow(w: f64, q: Power) -> f64 {
    match q {
        Power::Int(n) => w.powi(n as i32),
        Power::Real(v) => w.powf(v),
    }
}

pub(crate) fn shift(q: Power, by: i64) -> Power {
    match q {
        Power::Int(n) => Power::Int(n + by),
        Power::Real(v) => Power::Real(v + by as f64),
    }
}

pub(crate) fn neg(q: Power) -> Power {
    match q {
        Power::Int(n) => Power::Int(-n),
        Power::Real(v) => Power::Real(-v),
    }
}

pub(crate) fn quad(f: impl Fn(f64) -> f64, a: f64, b: f64, what: &str) -> Result<f64> {
    let r = integrate(f, a, b);
    if !r.converged || !r.value.is_finite() {
        return Err(Error::Quadrature(format!("{what}: value {} error {}", r.value, r.error)));
    }
    Ok(r.value)
}

/// `∫_{-1}^{1} P(t) (t + a)^q dt` by expanding `P` in powers of `t + a`.
/// Exact for any field; a `(t + a)^{-1}` term has no rational antiderivative.
pub fn integrate_shifted<F: Field>(p: &Poly<F>, a: &F, q: i64) -> Result<F> {
    let b = p.shift_basis(a);
    let hi = a.clone() + F::one();
    let lo = a.clone() - F::one();
    let mut acc = F::zero();
    for (j, c) in b.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let k = j as i64 + q;
        if k == -1 {
            return Err(Error::LogObstruction(format!(
                "integrand contains (t+a)^-1 (term {j} with exponent {q})"
            )));
        }
        let e = k + 1;
        acc = acc + c.clone() * (hi.ipow(e) - lo.ipow(e)) / F::from_i64(e);
    }
    Ok(acc)
}

fn t_power<F: Field>(r: u32, p: &Poly<F>) -> Poly<F> {
    &Poly::monomial(F::one(), r as usize) * p
}

/// `α_{r,q} = ∫_{-1}^{1} (t+a)^q t^r p_c(t) dt` over any field, integer `q`.
pub fn alpha_field<F: Field>(setup: &AdmissibleSetup<F>, a: &F, r: u32, q: i64) -> Result<F> {
    integrate_shifted(&t_power(r, &setup.momentum_polynomial()), a, q)
}

/// `β_{r,q}`: the curvature moment plus the boundary contributions
/// `(-1)^r (a-1)^q p_c(-1) + (a+1)^q p_c(1)`.
pub fn beta_field<F: Field>(setup: &AdmissibleSetup<F>, a: &F, r: u32, q: i64) -> Result<F> {
    let interior = integrate_shifted(&t_power(r, &setup.curvature_density()), a, q)?;
    let pc = setup.momentum_polynomial();
    let sign = if r % 2 == 0 { F::one() } else { -F::one() };
    let lo = (a.clone() - F::one()).ipow(q) * pc.eval(&-F::one()) * sign;
    let hi = (a.clone() + F::one()).ipow(q) * pc.eval(&F::one());
    Ok(interior + lo + hi)
}

fn require_int(q: Power, what: &str) -> Result<i64> {
    q.as_int()
        .ok_or_else(|| Error::ExactUnsupported(format!("{what} with non-integer exponent {q}")))
}

/// `α_{r,q}`: exact expansion for exact scalars, adaptive quadrature otherwise.
pub fn alpha<S: Scalar>(setup: &AdmissibleSetup<S>, w: &WeightParams<S>, r: u32, q: Power) -> Result<S> {
    if S::EXACT {
        return alpha_field(setup, &w.a, r, require_int(q, "alpha")?);
    }
    let pc = setup.momentum_polynomial().to_f64();
    let a = w.a.to_f64();
    let v = quad(|t| t.powi(r as i32) * pc.eval(&t) * wpow(t + a, q), -1.0, 1.0, "alpha")?;
    Ok(S::from_f64(v).expect("finite quadrature value"))
}

/// `β_{r,q}`, dispatched like [`alpha`].
pub fn beta<S: Scalar>(setup: &AdmissibleSetup<S>, w: &WeightParams<S>, r: u32, q: Power) -> Result<S> {
    if S::EXACT {
        return beta_field(setup, &w.a, r, require_int(q, "beta")?);
    }
    let f = setup.to_f64();
    let pc = f.momentum_polynomial();
    let sp = f.curvature_density();
    let a = w.a.to_f64();
    let v = quad(|t| t.powi(r as i32) * sp.eval(&t) * wpow(t + a, q), -1.0, 1.0, "beta")?;
    let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
    let v = v + sign * wpow(a - 1.0, q) * pc.eval(&-1.0) + wpow(a + 1.0, q) * pc.eval(&1.0);
    Ok(S::from_f64(v).expect("finite moment"))
}

/// Extremal constants with the moments that determine them.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalConstants<S> {
    pub a1: S,
    pub a2: S,
    /// `α_{r,-(p+1)}` for `r = 0, 1, 2`.
    pub alpha: [S; 3],
    /// `β_{r,1-p}` for `r = 0, 1`.
    pub beta: [S; 2],
}

impl<S: Scalar> ExtremalConstants<S> {
    /// `α0 α2 - α1^2`, positive by Cauchy–Schwarz.
    pub fn gram_gap(&self) -> S {
        self.alpha[0].clone() * self.alpha[2].clone() - self.alpha[1].clone() * self.alpha[1].clone()
    }

    pub fn to_f64(&self) -> ExtremalConstants<f64> {
        ExtremalConstants {
            a1: self.a1.to_f64(),
            a2: self.a2.to_f64(),
            alpha: [self.alpha[0].to_f64(), self.alpha[1].to_f64(), self.alpha[2].to_f64()],
            beta: [self.beta[0].to_f64(), self.beta[1].to_f64()],
        }
    }
}

/// Solves the two compatibility conditions
/// `α_{1} A1 + α_{0} A2 = 2β_{0}`, `α_{2} A1 + α_{1} A2 = 2β_{1}`
/// (moments taken with exponents `-(p+1)` and `1-p`).
pub fn solve_constants_field<F: Field>(setup: &AdmissibleSetup<F>, a: &F, p: i64) -> Result<(F, F)> {
    let al: Vec<F> = (0..3).map(|r| alpha_field(setup, a, r, -(p + 1))).collect::<Result<_>>()?;
    let b0 = beta_field(setup, a, 0, 1 - p)?;
    let b1 = beta_field(setup, a, 1, 1 - p)?;
    let det = al[1].clone() * al[1].clone() - al[0].clone() * al[2].clone();
    if det.is_zero() {
        return Err(Error::Singular("moment matrix is degenerate".into()));
    }
    let two = F::from_i64(2);
    let a1 = two.clone() * (b0.clone() * al[1].clone() - b1.clone() * al[0].clone()) / det.clone();
    let a2 = two * (b1 * al[1].clone() - b0 * al[2].clone()) / det;
    Ok((a1, a2))
}

/// Extremal constants `(A1, A2)` for the weight `(z+a, p)`.
///
/// The float path solves in the basis `{1, t+1}`, which keeps the Gram
/// determinant well conditioned when the weight concentrates near `t = -1`.
pub fn solve_extremal_constants<S: Scalar>(
    setup: &AdmissibleSetup<S>,
    w: &WeightParams<S>,
) -> Result<ExtremalConstants<S>> {
    let q1 = neg(shift(w.p, 1));
    let q2 = neg(shift(w.p, -1));
    let alpha_v = [alpha(setup, w, 0, q1)?, alpha(setup, w, 1, q1)?, alpha(setup, w, 2, q1)?];
    let beta_v = [beta(setup, w, 0, q2)?, beta(setup, w, 1, q2)?];
    let (a1, a2) = if S::EXACT {
        let gap = alpha_v[0].clone() * alpha_v[2].clone() - alpha_v[1].clone() * alpha_v[1].clone();
        if !(gap > S::zero()) {
            return Err(Error::Inconsistency("Cauchy–Schwarz α1² < α0 α2 violated".into()));
        }
        let two = S::from_i64(2);
        let det = -gap;
        let a1 = two.clone() * (beta_v[0].clone() * alpha_v[1].clone() - beta_v[1].clone() * alpha_v[0].clone())
            / det.clone();
        let a2 = two * (beta_v[1].clone() * alpha_v[1].clone() - beta_v[0].clone() * alpha_v[2].clone()) / det;
        (a1, a2)
    } else {
        let (a1, a2) = centered_solve(&setup.to_f64(), w.a.to_f64(), w.p)?;
        (S::from_f64(a1).expect("finite"), S::from_f64(a2).expect("finite"))
    };
    Ok(ExtremalConstants { a1, a2, alpha: alpha_v, beta: beta_v })
}

fn centered_solve(setup: &AdmissibleSetup<f64>, a: f64, p: Power) -> Result<(f64, f64)> {
    let pc = setup.momentum_polynomial();
    let sp = setup.curvature_density();
    let q1 = neg(shift(p, 1));
    let q2 = neg(shift(p, -1));
    let m: Vec<f64> = (0..3)
        .map(|r| quad(|t| (t + 1.0).powi(r) * pc.eval(&t) * wpow(t + a, q1), -1.0, 1.0, "centered alpha"))
        .collect::<Result<_>>()?;
    let b0 = quad(|t| sp.eval(&t) * wpow(t + a, q2), -1.0, 1.0, "beta")?
        + wpow(a - 1.0, q2) * pc.eval(&-1.0)
        + wpow(a + 1.0, q2) * pc.eval(&1.0);
    let b1 = quad(|t| (t + 1.0) * sp.eval(&t) * wpow(t + a, q2), -1.0, 1.0, "centered beta")?
        + 2.0 * wpow(a + 1.0, q2) * pc.eval(&1.0);
    let gap = m[0] * m[2] - m[1] * m[1];
    if !(gap > 0.0) {
        return Err(Error::Inconsistency(format!("Cauchy–Schwarz violated: gap {gap}")));
    }
    let a1 = 2.0 * (b1 * m[0] - b0 * m[1]) / gap;
    let b = 2.0 * (b0 * m[2] - b1 * m[1]) / gap;
    Ok((a1, b + a1))
}
