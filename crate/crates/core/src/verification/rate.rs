use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Minimum number of checkpoints accepted by [`fit_rate`].
pub const MIN_CHECKPOINTS: usize = 5;

/// Least-squares fit of `y(T) ~ (q1 + q2 ln T) / sqrt(T)` plus an upper envelope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit<T> {
    pub q1: T,
    pub q2: T,
    /// Non-negative intercept inflation that makes the envelope dominate every checkpoint.
    pub margin: T,
    /// `max_k |y_k - fit(T_k)| / |y_k|`.
    pub max_rel_residual: T,
}

impl<T: Scalar> RateFit<T> {
    pub fn predict(&self, t: T) -> T {
        (self.q1 + self.q2 * t.ln()) / t.sqrt()
    }

    /// `(q1 + margin + q2 ln T) / sqrt(T)`.
    pub fn envelope(&self, t: T) -> T {
        (self.q1 + self.margin + self.q2 * t.ln()) / t.sqrt()
    }

    pub fn dominates(&self, checkpoints: &[(T, T)]) -> bool {
        checkpoints.iter().all(|&(t, y)| self.envelope(t) >= y)
    }
}

/// Fits the rate model to `(T, running-min)` checkpoints.
///
/// The intercept is then raised by the largest scaled positive residual so the
/// envelope is a one-sided bound on every checkpoint.
pub fn fit_rate<T: Scalar>(checkpoints: &[(T, T)]) -> Result<RateFit<T>> {
    if checkpoints.len() < MIN_CHECKPOINTS {
        return Err(Error::input(format!(
            "rate fit needs at least {MIN_CHECKPOINTS} checkpoints, got {}",
            checkpoints.len()
        )));
    }
    if checkpoints
        .iter()
        .any(|&(t, y)| !(t >= T::one() && t.is_finite() && y.is_finite()))
    {
        return Err(Error::input(
            "checkpoints need finite T >= 1 and finite values",
        ));
    }
    if checkpoints.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::input(
            "checkpoint T values must be strictly increasing",
        ));
    }

    let basis = |t: T| {
        let r = T::one() / t.sqrt();
        (r, t.ln() * r)
    };
    let (mut s11, mut s12, mut s22, mut r1, mut r2) =
        (T::zero(), T::zero(), T::zero(), T::zero(), T::zero());
    for &(t, y) in checkpoints {
        let (p1, p2) = basis(t);
        s11 = s11 + p1 * p1;
        s12 = s12 + p1 * p2;
        s22 = s22 + p2 * p2;
        r1 = r1 + p1 * y;
        r2 = r2 + p2 * y;
    }
    let det = s11 * s22 - s12 * s12;
    if !(det.abs() > T::epsilon() * s11 * s22) {
        return Err(Error::Degenerate(
            "rate-fit design matrix is singular".into(),
        ));
    }
    let q1 = (r1 * s22 - r2 * s12) / det;
    let q2 = (s11 * r2 - s12 * r1) / det;

    let mut margin = T::zero();
    let mut max_rel_residual = T::zero();
    let mut max_log = T::zero();
    for &(t, y) in checkpoints {
        let fit = (q1 + q2 * t.ln()) / t.sqrt();
        margin = margin.max((y - fit) * t.sqrt());
        max_log = max_log.max(t.ln());
        if y != T::zero() {
            max_rel_residual = max_rel_residual.max(((y - fit) / y).abs());
        }
    }
    if margin > T::zero() {
        // Absorbs rounding in re-evaluating the envelope.
        let scale = q1.abs() + margin + q2.abs() * max_log;
        margin = margin + T::lit(8.0) * T::epsilon() * scale;
    }
    Ok(RateFit {
        q1,
        q2,
        margin,
        max_rel_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Vec<f64> {
        (0..31).map(|k| 10f64.powf(2.0 + k as f64 / 10.0)).collect()
    }

    #[test]
    fn exact_inverse_sqrt() {
        let pts: Vec<_> = grid().into_iter().map(|t| (t, 3.0 / t.sqrt())).collect();
        let fit = fit_rate(&pts).unwrap();
        assert!(
            (fit.q1 - 3.0).abs() < 1e-8 && fit.q2.abs() < 1e-8,
            "{fit:?}"
        );
        assert!(fit.dominates(&pts));
    }

    #[test]
    fn exact_log_member() {
        let pts: Vec<_> = grid()
            .into_iter()
            .map(|t| (t, (1.0 + 2.0 * t.ln()) / t.sqrt()))
            .collect();
        let fit = fit_rate(&pts).unwrap();
        assert!(
            (fit.q1 - 1.0).abs() < 1e-8 && (fit.q2 - 2.0).abs() < 1e-8,
            "{fit:?}"
        );
    }

    #[test]
    fn faster_decay_is_still_dominated() {
        let pts: Vec<_> = grid().into_iter().map(|t| (t, 5.0 / t)).collect();
        let fit = fit_rate(&pts).unwrap();
        assert!(fit.margin > 0.0);
        assert!(fit.dominates(&pts));
    }

    #[test]
    fn rejects_bad_checkpoints() {
        assert!(fit_rate(&[(1.0, 1.0), (2.0, 1.0)]).is_err());
        let repeated = [(10.0, 1.0); 5];
        assert!(fit_rate(&repeated).is_err());
    }
}
