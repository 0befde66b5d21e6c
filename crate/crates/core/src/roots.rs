//! Real roots: Sturm counting and isolation over the rationals, plus
//! float bracketing helpers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::poly::Poly;
use crate::scalar::q;

pub type RPoly = Poly<BigRational>;

/// `p / gcd(p, p')`.
pub fn squarefree(p: &RPoly) -> RPoly {
    if p.degree().unwrap_or(0) == 0 {
        return p.clone();
    }
    let g = p.gcd(&p.derivative());
    p.div_rem(&g).0
}

/// Yun's square-free decomposition: `p = c * prod f_i^i`, returned as `(f_i, i)`
/// with non-constant `f_i`.
pub fn squarefree_decomposition(p: &RPoly) -> Vec<(RPoly, usize)> {
    let mut out = Vec::new();
    if p.degree().unwrap_or(0) == 0 {
        return out;
    }
    let dp = p.derivative();
    let a0 = p.gcd(&dp);
    let mut b = p.div_rem(&a0).0;
    let mut c = dp.div_rem(&a0).0;
    let mut d = &c - &b.derivative();
    let mut i = 1;
    while b.degree().unwrap_or(0) > 0 {
        let a = b.gcd(&d);
        if a.degree().unwrap_or(0) > 0 {
            out.push((a.clone(), i));
        }
        b = b.div_rem(&a).0;
        c = d.div_rem(&a).0;
        d = &c - &b.derivative();
        i += 1;
    }
    out
}

fn positive_normalize(p: RPoly) -> RPoly {
    let l = p.leading();
    if l.is_zero() {
        return p;
    }
    p.scale(&Signed::abs(&l).recip())
}

pub fn sturm_sequence(p: &RPoly) -> Vec<RPoly> {
    let mut seq = vec![p.clone(), positive_normalize(p.derivative())];
    loop {
        let n = seq.len();
        if seq[n - 1].is_zero() {
            seq.pop();
            break;
        }
        let (_, r) = seq[n - 2].div_rem(&seq[n - 1]);
        if r.is_zero() {
            break;
        }
        seq.push(positive_normalize(-&r));
    }
    seq
}

fn sign_changes(seq: &[RPoly], x: &BigRational) -> usize {
    let mut last = 0i8;
    let mut n = 0;
    for p in seq {
        let v = p.eval(x);
        let s = if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                n += 1;
            }
            last = s;
        }
    }
    n
}

/// Number of distinct real roots in the open interval `(lo, hi)`.
pub fn count_roots_open(seq: &[RPoly], lo: &BigRational, hi: &BigRational) -> usize {
    let base = sign_changes(seq, lo) - sign_changes(seq, hi);
    if seq[0].eval(hi).is_zero() {
        base - 1
    } else {
        base
    }
}

/// A real root known either exactly or up to an isolating interval.
#[derive(Debug, Clone, PartialEq)]
pub struct IsolatedRoot {
    pub lo: BigRational,
    pub hi: BigRational,
    pub multiplicity: usize,
}

impl IsolatedRoot {
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn midpoint(&self) -> BigRational {
        (self.lo.clone() + self.hi.clone()) / q(2, 1)
    }

    pub fn to_f64(&self) -> f64 {
        crate::scalar::rational_to_f64(&self.midpoint())
    }
}

/// Isolating intervals for the distinct roots of a squarefree `p` in `(lo, hi)`.
pub fn isolate_squarefree(p: &RPoly, lo: &BigRational, hi: &BigRational) -> Vec<(BigRational, BigRational)> {
    let seq = sturm_sequence(p);
    let mut out = Vec::new();
    let mut stack = vec![(lo.clone(), hi.clone())];
    while let Some((a, b)) = stack.pop() {
        let n = count_roots_open(&seq, &a, &b);
        if n == 0 {
            continue;
        }
        if n == 1 {
            out.push((a, b));
            continue;
        }
        let mid = (a.clone() + b.clone()) / q(2, 1);
        if p.eval(&mid).is_zero() {
            out.push((mid.clone(), mid.clone()));
        }
        stack.push((mid.clone(), b));
        stack.push((a, mid));
    }
    out.sort_by(|x, y| x.0.cmp(&y.0));
    out
}

/// Bisects an isolating interval of a squarefree `p` until narrower than `width`.
pub fn refine(p: &RPoly, mut lo: BigRational, mut hi: BigRational, width: &BigRational) -> (BigRational, BigRational) {
    if lo == hi {
        return (lo, hi);
    }
    let mut slo = p.eval(&lo).signum();
    if slo.is_zero() {
        return (lo.clone(), lo);
    }
    if p.eval(&hi).is_zero() {
        return (hi.clone(), hi);
    }
    while hi.clone() - lo.clone() > *width {
        let mid = (lo.clone() + hi.clone()) / q(2, 1);
        let sm = p.eval(&mid).signum();
        if sm.is_zero() {
            return (mid.clone(), mid);
        }
        if sm == slo {
            lo = mid;
            slo = sm;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Distinct roots of `p` in `(lo, hi)` with multiplicities, each refined
/// to an interval narrower than `width`.
pub fn real_roots(p: &RPoly, lo: &BigRational, hi: &BigRational, width: &BigRational) -> Vec<IsolatedRoot> {
    let mut out = Vec::new();
    for (f, mult) in squarefree_decomposition(p) {
        for (a, b) in isolate_squarefree(&f, lo, hi) {
            let (a, b) = refine(&f, a, b, width);
            out.push(IsolatedRoot { lo: a, hi: b, multiplicity: mult });
        }
    }
    out.sort_by(|x, y| x.lo.cmp(&y.lo));
    out
}

/// The rational with the smallest denominator in the closed interval `[lo, hi]`.
pub fn simplest_rational_between(lo: &BigRational, hi: &BigRational) -> BigRational {
    assert!(lo <= hi);
    if lo.is_negative() && hi.is_positive() || lo.is_zero() || hi.is_zero() {
        return BigRational::zero();
    }
    if hi.is_negative() {
        return -simplest_rational_between(&-hi.clone(), &-lo.clone());
    }
    let fl = lo.floor();
    if fl == *lo {
        return lo.clone();
    }
    if fl.clone() + BigRational::one() <= *hi {
        return fl + BigRational::one();
    }
    // both in (fl, fl + 1): recurse on reciprocals of fractional parts
    let inner = simplest_rational_between(&(hi.clone() - fl.clone()).recip(), &(lo.clone() - fl.clone()).recip());
    fl + inner.recip()
}

fn integer_content_scale(p: &RPoly) -> BigInt {
    let mut l = BigInt::one();
    for c in p.coeffs() {
        l = l.lcm(c.denom());
    }
    let lead = (p.leading() * BigRational::from_integer(l)).to_integer();
    lead.abs()
}

/// Whether the unique root of a squarefree `p` in `[lo, hi]` is rational,
/// returning it if so. Uses the fact that a rational root `u/v` has `v`
/// dividing the leading coefficient of the integer-normalized polynomial,
/// so the simplest fraction in a narrow enough interval is the only candidate.
pub fn rational_root_in(p: &RPoly, lo: &BigRational, hi: &BigRational) -> Option<BigRational> {
    if lo == hi {
        return p.eval(lo).is_zero().then(|| lo.clone());
    }
    let l = integer_content_scale(p);
    let bound = BigRational::from_integer(l.clone() * l).recip() / q(2, 1);
    let (a, b) = refine(p, lo.clone(), hi.clone(), &bound);
    if a == b {
        return Some(a);
    }
    let cand = simplest_rational_between(&a, &b);
    p.eval(&cand).is_zero().then_some(cand)
}

/// Bisection on a float sign change to absolute width `tol`.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Chebyshev–Lobatto nodes on `[-1, 1]`, ascending.
pub fn chebyshev_nodes(n: usize) -> Vec<f64> {
    (0..=n)
        .map(|k| -(std::f64::consts::PI * k as f64 / n as f64).cos())
        .collect()
}

/// Golden-section minimization of `f` on `[lo, hi]` to width `tol`.
pub fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..300 {
        if hi - lo <= tol {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}
