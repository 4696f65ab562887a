use crate::error::{Error, Result};
use crate::problems::{sign, Problem, ProblemConstants, Region};
use crate::rng::SplitMix64;
use crate::scalar::Scalar;
use crate::vector::Vector;

/// One-dimensional `f(x) = 100 x^2` for `|x| <= b`, extended linearly as
/// `200 b |x| - 100 b^2` outside, so the gradient saturates at `200 b`.
///
/// Deterministic. The gradient at the kink `|x| = b` is the inner (quadratic)
/// branch. Declared region `[-2b, 2b]`, `H = 200 b`, `L = 200`, `f* = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseQuadratic<T> {
    b: T,
}

impl<T: Scalar> PiecewiseQuadratic<T> {
    pub fn new(b: T) -> Result<Self> {
        if !(b.is_finite() && b > T::zero()) {
            return Err(Error::config("piecewise quadratic requires b > 0"));
        }
        Ok(Self { b })
    }

    pub fn breakpoint(&self) -> T {
        self.b
    }

    fn value_1d(&self, x: T) -> T {
        let hundred = T::lit(100.0);
        if x.abs() <= self.b {
            hundred * x * x
        } else {
            T::lit(200.0) * self.b * x.abs() - hundred * self.b * self.b
        }
    }

    fn gradient_1d(&self, x: T) -> T {
        if x.abs() <= self.b {
            T::lit(200.0) * x
        } else {
            T::lit(200.0) * self.b * sign(x)
        }
    }
}

impl<T: Scalar> Default for PiecewiseQuadratic<T> {
    fn default() -> Self {
        Self { b: T::lit(10.0) }
    }
}

impl<T: Scalar> Problem<T> for PiecewiseQuadratic<T> {
    fn name(&self) -> &str {
        "piecewise_quadratic"
    }

    fn dim(&self) -> usize {
        1
    }

    fn value(&self, x: &Vector<T>) -> T {
        self.value_1d(x[0])
    }

    fn full_gradient(&self, x: &Vector<T>) -> Vector<T> {
        Vector::from_vec_unchecked(vec![self.gradient_1d(x[0])])
    }

    fn stochastic_gradient(&self, x: &Vector<T>, _rng: &mut SplitMix64) -> Vector<T> {
        self.full_gradient(x)
    }

    fn constants(&self) -> ProblemConstants<T> {
        ProblemConstants {
            h: Some(T::lit(200.0) * self.b),
            l: Some(T::lit(200.0)),
            f_star: Some(T::zero()),
        }
    }

    fn region(&self) -> Region<T> {
        Region::symmetric(1, self.b + self.b)
    }

    fn default_start(&self) -> Vector<T> {
        Vector::from_vec_unchecked(vec![T::lit(5.0)])
    }

    fn is_deterministic(&self) -> bool {
        true
    }

    fn kink_distance(&self, x: &Vector<T>) -> Option<T> {
        Some((x[0].abs() - self.b).abs())
    }
}
