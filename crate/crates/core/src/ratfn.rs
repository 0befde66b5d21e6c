//! Univariate rational functions `num / den` over a [`Field`].
//!
//! Used to carry the weight parameter `a` symbolically through the moment
//! and ansatz computations.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::poly::Poly;
use crate::scalar::Field;

#[derive(Clone)]
pub struct RationalFn<F> {
    num: Poly<F>,
    den: Poly<F>,
}

impl<F: Field> RationalFn<F> {
    /// Reduced fraction with monic denominator. Panics on a zero denominator.
    pub fn new(num: Poly<F>, den: Poly<F>) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return RationalFn { num, den: Poly::one() };
        }
        let g = num.gcd(&den);
        let (n, _) = num.div_rem(&g);
        let (d, _) = den.div_rem(&g);
        let l = d.leading();
        let inv = F::one() / l;
        RationalFn { num: n.scale(&inv), den: d.scale(&inv) }
    }

    pub fn from_poly(p: Poly<F>) -> Self {
        RationalFn { num: p, den: Poly::one() }
    }

    pub fn constant(c: F) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    /// The indeterminate itself.
    pub fn variable() -> Self {
        Self::from_poly(Poly::identity())
    }

    pub fn numer(&self) -> &Poly<F> {
        &self.num
    }

    pub fn denom(&self) -> &Poly<F> {
        &self.den
    }

    pub fn derivative(&self) -> Self {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        RationalFn::new(n, &self.den * &self.den)
    }

    /// `None` at a pole.
    pub fn eval(&self, t: &F) -> Option<F> {
        let d = self.den.eval(t);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(t) / d)
        }
    }
}

impl<F: Field> PartialEq for RationalFn<F> {
    fn eq(&self, other: &Self) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }
}

impl<F: Field> Add for RationalFn<F> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        if self.den == rhs.den {
            return RationalFn::new(&self.num + &rhs.num, self.den);
        }
        RationalFn::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl<F: Field> Sub for RationalFn<F> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<F: Field> Mul for RationalFn<F> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        RationalFn::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl<F: Field> Div for RationalFn<F> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        assert!(!rhs.num.is_zero(), "division by zero rational function");
        RationalFn::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }
}

impl<F: Field> Neg for RationalFn<F> {
    type Output = Self;
    fn neg(self) -> Self {
        RationalFn { num: -&self.num, den: self.den }
    }
}

impl<F: Field> Zero for RationalFn<F> {
    fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl<F: Field> One for RationalFn<F> {
    fn one() -> Self {
        Self::from_poly(Poly::one())
    }
}

impl<F: Field> Field for RationalFn<F> {
    fn from_i64(n: i64) -> Self {
        Self::constant(F::from_i64(n))
    }
}

impl<F: Field> fmt::Debug for RationalFn<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}) / ({:?})", self.num, self.den)
    }
}
