use crate::error::{Error, Result};
use crate::problems::{Problem, ProblemConstants, Region};
use crate::rng::SplitMix64;
use crate::scalar::Scalar;
use crate::vector::Vector;

const RADIUS: f64 = 5.0;

/// `f(x) = 100 x^2` with gradient `200 x`, optionally perturbed by noise
/// drawn uniformly from `[-noise_scale, noise_scale]`.
///
/// Declared region `[-5, 5]`, `H = 1000 + noise_scale`, `L = 200`, `f* = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadratic100<T> {
    noise_scale: T,
}

impl<T: Scalar> Quadratic100<T> {
    pub fn new(noise_scale: T) -> Result<Self> {
        if !(noise_scale.is_finite() && noise_scale >= T::zero()) {
            return Err(Error::config("noise scale must be non-negative"));
        }
        Ok(Self { noise_scale })
    }
}

impl<T: Scalar> Problem<T> for Quadratic100<T> {
    fn name(&self) -> &str {
        "quadratic_100"
    }

    fn dim(&self) -> usize {
        1
    }

    fn value(&self, x: &Vector<T>) -> T {
        T::lit(100.0) * x[0] * x[0]
    }

    fn full_gradient(&self, x: &Vector<T>) -> Vector<T> {
        Vector::from_vec_unchecked(vec![T::lit(200.0) * x[0]])
    }

    fn stochastic_gradient(&self, x: &Vector<T>, rng: &mut SplitMix64) -> Vector<T> {
        let mut g = self.full_gradient(x);
        if self.noise_scale > T::zero() {
            let s = self.noise_scale.to_f64_lossy();
            g[0] = g[0] + T::lit(rng.uniform(-s, s));
        }
        g
    }

    fn constants(&self) -> ProblemConstants<T> {
        ProblemConstants {
            h: Some(T::lit(200.0 * RADIUS) + self.noise_scale),
            l: Some(T::lit(200.0)),
            f_star: Some(T::zero()),
        }
    }

    fn region(&self) -> Region<T> {
        Region::symmetric(1, T::lit(RADIUS))
    }

    fn default_start(&self) -> Vector<T> {
        Vector::from_vec_unchecked(vec![T::lit(5.0)])
    }

    fn is_deterministic(&self) -> bool {
        self.noise_scale == T::zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gradient_values() {
        let p = Quadratic100::new(0.0).unwrap();
        assert_eq!(p.full_gradient(&Vector::new(vec![1.0]).unwrap())[0], 200.0);
        assert_eq!(p.full_gradient(&Vector::new(vec![0.0]).unwrap())[0], 0.0);
    }

    #[test]
    fn noiseless_oracle_is_exact() {
        let p = Quadratic100::new(0.0).unwrap();
        let mut rng = SplitMix64::new(5);
        let x = Vector::new(vec![0.3]).unwrap();
        assert_eq!(p.stochastic_gradient(&x, &mut rng), p.full_gradient(&x));
        assert!(p.is_deterministic());
    }

    #[test]
    fn noise_is_bounded() {
        let p = Quadratic100::<f64>::new(2.0).unwrap();
        let mut rng = SplitMix64::new(5);
        let x = Vector::new(vec![0.3]).unwrap();
        for _ in 0..1000 {
            let g = p.stochastic_gradient(&x, &mut rng)[0];
            assert!((g - 60.0).abs() <= 2.0);
        }
        assert!(Quadratic100::new(-1.0).is_err());
    }
}
