use crate::problems::{sign, FiniteSum, Problem, ProblemConstants, Region};
use crate::rng::SplitMix64;
use crate::scalar::Scalar;
use crate::vector::Vector;

const COMPONENTS: usize = 11;

/// Eleven-component one-dimensional finite sum `f = sum_i f_i` with
///
/// ```text
/// f_1(x) = 5.5 x^2          (|x| <= 1),   11|x| - 5.5   (|x| > 1)
/// f_i(x) = -0.5 x^2         (|x| <= 1),   -|x| + 0.5    (|x| > 1),  i = 2..11
/// ```
///
/// so `f(x) = 0.5 x^2` near the origin and its only stationary point is `0`.
///
/// The stochastic gradient draws `i` uniformly and returns `11 * f_i'(x)`,
/// which is unbiased for `f'`. Adaptive methods with `eps = 0` are invariant
/// to this rescaling, so trajectories coincide with sampling `f_i'(x)` directly.
/// Declared region `[-3, 3]`, `H = 121`, `L = 1`, `f* = 0`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TermBCounterexample;

impl TermBCounterexample {
    pub fn new() -> Self {
        Self
    }
}

impl TermBCounterexample {
    fn component_gradient_1d<T: Scalar>(i: usize, x: T) -> T {
        assert!(i < COMPONENTS, "component index {i} out of range");
        let inside = x.abs() <= T::one();
        match (i == 0, inside) {
            (true, true) => T::lit(11.0) * x,
            (true, false) => T::lit(11.0) * sign(x),
            (false, true) => -x,
            (false, false) => -sign(x),
        }
    }

    fn component_value_1d<T: Scalar>(i: usize, x: T) -> T {
        assert!(i < COMPONENTS, "component index {i} out of range");
        let inside = x.abs() <= T::one();
        match (i == 0, inside) {
            (true, true) => T::lit(5.5) * x * x,
            (true, false) => T::lit(11.0) * x.abs() - T::lit(5.5),
            (false, true) => T::lit(-0.5) * x * x,
            (false, false) => -x.abs() + T::lit(0.5),
        }
    }
}

impl<T: Scalar> Problem<T> for TermBCounterexample {
    fn name(&self) -> &str {
        "term_b_counterexample"
    }

    fn dim(&self) -> usize {
        1
    }

    fn value(&self, x: &Vector<T>) -> T {
        let x = x[0];
        if x.abs() <= T::one() {
            T::lit(0.5) * x * x
        } else {
            x.abs() - T::lit(0.5)
        }
    }

    fn full_gradient(&self, x: &Vector<T>) -> Vector<T> {
        let x = x[0];
        let g = if x.abs() <= T::one() { x } else { sign(x) };
        Vector::from_vec_unchecked(vec![g])
    }

    fn stochastic_gradient(&self, x: &Vector<T>, rng: &mut SplitMix64) -> Vector<T> {
        let i = rng.below(COMPONENTS as u64) as usize;
        let n = T::from_usize_lossy(COMPONENTS);
        Vector::from_vec_unchecked(vec![n * Self::component_gradient_1d(i, x[0])])
    }

    fn constants(&self) -> ProblemConstants<T> {
        ProblemConstants {
            h: Some(T::lit(121.0)),
            l: Some(T::one()),
            f_star: Some(T::zero()),
        }
    }

    fn region(&self) -> Region<T> {
        Region::symmetric(1, T::lit(3.0))
    }

    fn default_start(&self) -> Vector<T> {
        Vector::from_vec_unchecked(vec![T::lit(0.5)])
    }

    fn kink_distance(&self, x: &Vector<T>) -> Option<T> {
        Some((x[0].abs() - T::one()).abs())
    }
}

impl<T: Scalar> FiniteSum<T> for TermBCounterexample {
    fn num_components(&self) -> usize {
        COMPONENTS
    }

    fn component_value(&self, i: usize, x: &Vector<T>) -> T {
        Self::component_value_1d(i, x[0])
    }

    fn component_gradient(&self, i: usize, x: &Vector<T>) -> Vector<T> {
        Vector::from_vec_unchecked(vec![Self::component_gradient_1d(i, x[0])])
    }
}
