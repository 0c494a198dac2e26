//! Dense univariate polynomials over exact rationals or doubles.
//!
//! A polynomial is stored as `coeffs[i]` = coefficient of `z^i`, always in
//! canonical form: the trailing coefficient is nonzero, and the zero
//! polynomial is the empty vector. Its degree is `None`, which orders below
//! every finite degree and is therefore a member of every `F_k`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigRational, One, Zero};

use crate::exact;

/// Coefficient ring: exact rationals for constraint checks, `f64` for numerics.
pub trait Coeff:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn from_usize(n: usize) -> Self;
}

impl Coeff for f64 {
    fn from_usize(n: usize) -> Self {
        n as f64
    }
}

impl Coeff for BigRational {
    fn from_usize(n: usize) -> Self {
        <BigRational as num::FromPrimitive>::from_usize(n).expect("usize is representable")
    }
}

#[derive(Clone, PartialEq, Default)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

/// Floating-point polynomial used for pricing and simulation.
pub type Polynomial = Poly<f64>;
/// Exact polynomial used for constraint checking.
pub type RatPoly = Poly<BigRational>;

impl<T: Coeff> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    /// `c * z^k`
    pub fn monomial(c: T, k: usize) -> Self {
        let mut coeffs = vec![T::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Coefficient of `z^i`; zero beyond the stored range.
    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(T::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial (degree minus infinity).
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Membership in `F_k`, the polynomials of degree at most `k`.
    pub fn in_fk(&self, k: usize) -> bool {
        self.degree().is_none_or(|d| d <= k)
    }

    pub fn eval(&self, z: &T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, c| acc * z.clone() + c.clone())
    }

    pub fn derivative(&self, order: usize) -> Self {
        if order == 0 {
            return self.clone();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(order)
            .map(|(i, c)| {
                let falling = (i + 1 - order..=i).fold(T::one(), |acc, k| acc * T::from_usize(k));
                c.clone() * falling
            })
            .collect();
        Self::new(coeffs)
    }

    pub fn scale(&self, k: &T) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.clone() * k.clone()).collect())
    }

    /// Multiply by `z^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![T::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs }
    }

    pub fn map<U: Coeff>(&self, f: impl Fn(&T) -> U) -> Poly<U> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }
}

impl RatPoly {
    pub fn to_f64(&self) -> Polynomial {
        self.map(exact::to_f64)
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }
}

impl Polynomial {
    pub fn eval_f64(&self, z: f64) -> f64 {
        self.eval(&z)
    }
}

impl<T: Coeff> Add for &Poly<T> {
    type Output = Poly<T>;
    fn add(self, rhs: Self) -> Poly<T> {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..len).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl<T: Coeff> Sub for &Poly<T> {
    type Output = Poly<T>;
    fn sub(self, rhs: Self) -> Poly<T> {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..len).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl<T: Coeff> Mul for &Poly<T> {
    type Output = Poly<T>;
    fn mul(self, rhs: Self) -> Poly<T> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, p) in self.coeffs.iter().enumerate() {
            for (j, q) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + p.clone() * q.clone();
            }
        }
        Poly::new(out)
    }
}

impl<T: Coeff> Neg for &Poly<T> {
    type Output = Poly<T>;
    fn neg(self) -> Poly<T> {
        Poly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

impl<T: fmt::Debug> fmt::Debug for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.coeffs).finish()
    }
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(exact::format_rational).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

impl From<Vec<f64>> for Polynomial {
    fn from(v: Vec<f64>) -> Self {
        Poly::new(v)
    }
}
