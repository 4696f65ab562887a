//! Objective and gradient oracles.
//!
//! Every problem exposes its value, its exact gradient, and an unbiased
//! stochastic gradient drawn from a caller-owned [`SplitMix64`] stream.
//! Constants (gradient bound `H`, Lipschitz constant `L`, optimal value) are
//! declared relative to the problem's bounded [`Region`].

mod piecewise;
mod quadratic;
mod synthetic;
mod term_b;

pub use piecewise::PiecewiseQuadratic;
pub use quadratic::Quadratic100;
pub use synthetic::SyntheticFiniteSum;
pub use term_b::TermBCounterexample;

use crate::rng::SplitMix64;
use crate::scalar::Scalar;
use crate::vector::Vector;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ProblemConstants<T> {
    /// Bound on both `||grad f(x)||` and `||g||` inside the declared region.
    pub h: Option<T>,
    /// Lipschitz constant of the full gradient.
    pub l: Option<T>,
    pub f_star: Option<T>,
}

/// Axis-aligned box `[lower, upper]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Region<T> {
    pub lower: Vector<T>,
    pub upper: Vector<T>,
}

impl<T: Scalar> Region<T> {
    pub fn symmetric(dim: usize, radius: T) -> Self {
        Self {
            lower: Vector::filled(dim, -radius),
            upper: Vector::filled(dim, radius),
        }
    }

    pub fn contains(&self, x: &Vector<T>) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(self.upper.iter()))
            .all(|(&xi, (&lo, &hi))| lo <= xi && xi <= hi)
    }

    pub fn sample(&self, rng: &mut SplitMix64) -> Vector<T> {
        let entries = self
            .lower
            .iter()
            .zip(self.upper.iter())
            .map(|(&lo, &hi)| T::lit(rng.uniform(lo.to_f64_lossy(), hi.to_f64_lossy())))
            .collect();
        Vector::from_vec_unchecked(entries)
    }
}

pub trait Problem<T: Scalar>: Send + Sync {
    fn name(&self) -> &str;

    fn dim(&self) -> usize;

    fn value(&self, x: &Vector<T>) -> T;

    fn full_gradient(&self, x: &Vector<T>) -> Vector<T>;

    /// Unbiased estimate of [`Problem::full_gradient`].
    fn stochastic_gradient(&self, x: &Vector<T>, rng: &mut SplitMix64) -> Vector<T>;

    fn constants(&self) -> ProblemConstants<T>;

    fn region(&self) -> Region<T>;

    /// Starting point used when an experiment does not specify one.
    fn default_start(&self) -> Vector<T>;

    /// True when the stochastic gradient equals the full gradient.
    fn is_deterministic(&self) -> bool {
        false
    }

    /// Distance from `x` to the nearest point where the gradient is discontinuous
    /// in slope, or `None` for smooth problems.
    fn kink_distance(&self, _x: &Vector<T>) -> Option<T> {
        None
    }
}

/// Problems of the form `f = scale * sum_i f_i` with per-component access.
pub trait FiniteSum<T: Scalar>: Problem<T> {
    fn num_components(&self) -> usize;

    fn component_value(&self, i: usize, x: &Vector<T>) -> T;

    fn component_gradient(&self, i: usize, x: &Vector<T>) -> Vector<T>;
}

/// `sign(0) = 0`, unlike `Float::signum`.
pub(crate) fn sign<T: Scalar>(v: T) -> T {
    if v > T::zero() {
        T::one()
    } else if v < T::zero() {
        -T::one()
    } else {
        T::zero()
    }
}

/// Central-difference gradient `(f(x + h e_j) - f(x - h e_j)) / (2h)` per coordinate.
pub fn finite_difference_gradient<T: Scalar, P: Problem<T> + ?Sized>(
    problem: &P,
    x: &Vector<T>,
    h: T,
) -> Vector<T> {
    assert!(h > T::zero(), "finite-difference step must be positive");
    let two_h = h + h;
    let entries = (0..x.dim())
        .map(|j| {
            let mut plus = x.clone();
            let mut minus = x.clone();
            plus[j] = plus[j] + h;
            minus[j] = minus[j] - h;
            (problem.value(&plus) - problem.value(&minus)) / two_h
        })
        .collect();
    Vector::from_vec_unchecked(entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_of_zero_is_zero() {
        assert_eq!(sign(0.0_f64), 0.0);
        assert_eq!(sign(-0.0_f64), 0.0);
        assert_eq!(sign(-3.0_f64), -1.0);
    }

    #[test]
    fn finite_difference_on_quadratic() {
        let p = Quadratic100::<f64>::new(0.0).unwrap();
        let x = Vector::new(vec![1.0]).unwrap();
        let fd = finite_difference_gradient(&p, &x, 1e-5);
        assert!((fd[0] - 200.0).abs() <= 200.0 * 1e-6);
    }

    #[test]
    fn region_sampling_stays_inside() {
        let r = Region::<f64>::symmetric(3, 2.0);
        let mut rng = SplitMix64::new(1);
        for _ in 0..100 {
            assert!(r.contains(&r.sample(&mut rng)));
        }
    }
}
