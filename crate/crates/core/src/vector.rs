//! Dense vectors with elementwise algebra.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A dense `d`-dimensional real vector.
///
/// Products, quotients, squares and square roots act coordinatewise.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector<T>(Vec<T>);

impl<T: Scalar> Vector<T> {
    /// Wraps `entries`, rejecting NaN and infinite values.
    pub fn new(entries: Vec<T>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyInput("vector entries"));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::input("vector entries must be finite"));
        }
        Ok(Self(entries))
    }

    /// Wraps `entries` without validation. Callers check finiteness where it matters.
    pub fn from_vec_unchecked(entries: Vec<T>) -> Self {
        Self(entries)
    }

    pub fn from_f64(entries: &[f64]) -> Result<Self> {
        Self::new(entries.iter().map(|&v| T::lit(v)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![T::zero(); dim])
    }

    pub fn ones(dim: usize) -> Self {
        Self(vec![T::one(); dim])
    }

    pub fn filled(dim: usize, value: T) -> Self {
        Self(vec![value; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.0
    }

    pub fn into_inner(self) -> Vec<T> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.0.iter()
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.0.iter().map(|v| v.to_f64_lossy()).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self(self.0.iter().map(|&v| f(v)).collect())
    }

    /// Applies `f` coordinatewise to `(self_j, other_j)`.
    ///
    /// Panics on dimension mismatch; public entry points validate dimensions first.
    pub fn zip_map(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        assert_eq!(self.dim(), other.dim(), "vector dimension mismatch");
        Self(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() == expected {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected,
                found: self.dim(),
            })
        }
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|v| v * s)
    }

    pub fn hadamard(&self, other: &Self) -> Self {
        self.zip_map(other, |a, b| a * b)
    }

    pub fn square(&self) -> Self {
        self.map(|v| v * v)
    }

    pub fn sqrt(&self) -> Self {
        self.map(T::sqrt)
    }

    pub fn abs(&self) -> Self {
        self.map(T::abs)
    }

    /// Coordinatewise maximum.
    pub fn max_elementwise(&self, other: &Self) -> Self {
        self.zip_map(other, T::max)
    }

    /// Coordinatewise `self / denom`; every denominator entry must be strictly positive.
    pub fn checked_div(&self, denom: &Self) -> Result<Self> {
        denom.check_dim(self.dim())?;
        if let Some(j) = denom.0.iter().position(|&d| !(d > T::zero())) {
            return Err(Error::ZeroDenominator { t: 0, coord: j });
        }
        Ok(self.zip_map(denom, |a, b| a / b))
    }

    pub fn dot(&self, other: &Self) -> T {
        assert_eq!(self.dim(), other.dim(), "vector dimension mismatch");
        self.0
            .iter()
            .zip(&other.0)
            .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
    }

    pub fn norm_sq(&self) -> T {
        self.0.iter().fold(T::zero(), |acc, &v| acc + v * v)
    }

    pub fn norm(&self) -> T {
        self.norm_sq().sqrt()
    }

    pub fn l1_norm(&self) -> T {
        self.0.iter().fold(T::zero(), |acc, &v| acc + v.abs())
    }

    pub fn sum(&self) -> T {
        self.0.iter().fold(T::zero(), |acc, &v| acc + v)
    }

    pub fn min_entry(&self) -> T {
        self.0.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max_entry(&self) -> T {
        self.0.iter().copied().fold(T::neg_infinity(), T::max)
    }
}

impl<T> Index<usize> for Vector<T> {
    type Output = T;

    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

impl<T> IndexMut<usize> for Vector<T> {
    fn index_mut(&mut self, i: usize) -> &mut T {
        &mut self.0[i]
    }
}

impl<T: Scalar> Add for &Vector<T> {
    type Output = Vector<T>;

    fn add(self, rhs: Self) -> Vector<T> {
        self.zip_map(rhs, |a, b| a + b)
    }
}

impl<T: Scalar> Sub for &Vector<T> {
    type Output = Vector<T>;

    fn sub(self, rhs: Self) -> Vector<T> {
        self.zip_map(rhs, |a, b| a - b)
    }
}

impl<T: Scalar> Mul<T> for &Vector<T> {
    type Output = Vector<T>;

    fn mul(self, rhs: T) -> Vector<T> {
        self.scale(rhs)
    }
}

impl<T: Scalar> Neg for &Vector<T> {
    type Output = Vector<T>;

    fn neg(self) -> Vector<T> {
        self.map(|v| -v)
    }
}

impl<T: Scalar> From<Vector<T>> for Vec<T> {
    fn from(v: Vector<T>) -> Self {
        v.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_entries() {
        assert!(Vector::new(vec![1.0, f64::NAN]).is_err());
        assert!(Vector::new(vec![f64::INFINITY]).is_err());
        assert!(Vector::<f64>::new(vec![]).is_err());
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let a = Vector::new(vec![1.0, 2.0]).unwrap();
        let b = Vector::new(vec![1.0, 0.0]).unwrap();
        assert_eq!(
            a.checked_div(&b),
            Err(Error::ZeroDenominator { t: 0, coord: 1 })
        );
        let c = Vector::new(vec![2.0, 4.0]).unwrap();
        assert_eq!(a.checked_div(&c).unwrap().as_slice(), &[0.5, 0.5]);
    }

    #[test]
    fn norms() {
        let v = Vector::new(vec![3.0_f32, -4.0]).unwrap();
        assert_eq!(v.norm(), 5.0);
        assert_eq!(v.l1_norm(), 7.0);
        assert_eq!(v.min_entry(), -4.0);
        assert_eq!(v.max_entry(), 3.0);
    }

    #[test]
    fn elementwise_ops() {
        let a = Vector::new(vec![1.0, 5.0]).unwrap();
        let b = Vector::new(vec![3.0, 2.0]).unwrap();
        assert_eq!((&a + &b).as_slice(), &[4.0, 7.0]);
        assert_eq!((&a - &b).as_slice(), &[-2.0, 3.0]);
        assert_eq!(a.max_elementwise(&b).as_slice(), &[3.0, 5.0]);
        assert_eq!(a.hadamard(&b).as_slice(), &[3.0, 10.0]);
        assert_eq!(a.dot(&b), 13.0);
    }
}
