use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Both sides of a numeric inequality `lhs <= rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeqCheck<T> {
    pub lhs: T,
    pub rhs: T,
    pub holds: bool,
}

/// Relative slack granted to the right-hand side of the sequence inequalities.
pub const SEQ_TOLERANCE: f64 = 1e-12;

/// `sum_i b_i^2 <= (1/(1-beta))^2 (beta/(1-beta))^2 sum_{i>=2} a_i^2` with
///
/// ```text
/// b_i = sum_{k=1}^{i} beta^(i-k) sum_{l=k+1}^{i} a_l
/// ```
///
/// evaluated by literal double summation.
pub fn check_seq_exp<T: Scalar>(a: &[T], beta: T) -> Result<SeqCheck<T>> {
    if !(beta >= T::zero() && beta < T::one()) {
        return Err(Error::input(format!("beta must lie in [0, 1), got {beta}")));
    }
    if let Some(bad) = a.iter().find(|v| !(**v >= T::zero())) {
        return Err(Error::input(format!(
            "sequence entries must be >= 0, got {bad}"
        )));
    }
    let n = a.len();
    let mut lhs = T::zero();
    for i in 1..=n {
        let mut b_i = T::zero();
        for k in 1..=i {
            let inner = (k + 1..=i).fold(T::zero(), |acc, l| acc + a[l - 1]);
            b_i = b_i + beta.powi((i - k) as i32) * inner;
        }
        lhs = lhs + b_i * b_i;
    }
    let scale = T::one() / (T::one() - beta);
    let ratio = beta * scale;
    let tail = a.iter().skip(1).fold(T::zero(), |acc, &v| acc + v * v);
    let rhs = scale * scale * ratio * ratio * tail;
    Ok(SeqCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + T::lit(SEQ_TOLERANCE) * rhs,
    })
}

/// `sum_t a_t / (a_1 + ... + a_t) <= 1 - ln a_1 + ln (a_1 + ... + a_T)`.
pub fn check_seq_adagrad<T: Scalar>(a: &[T]) -> Result<SeqCheck<T>> {
    let first = *a.first().ok_or(Error::EmptyInput("sequence"))?;
    if !(first > T::zero()) {
        return Err(Error::input(format!("a_1 must be > 0, got {first}")));
    }
    if let Some(bad) = a.iter().find(|v| !(**v >= T::zero() && v.is_finite())) {
        return Err(Error::input(format!(
            "sequence entries must be >= 0, got {bad}"
        )));
    }
    let mut prefix = T::zero();
    let mut lhs = T::zero();
    for &v in a {
        prefix = prefix + v;
        lhs = lhs + v / prefix;
    }
    let rhs = T::one() - first.ln() + prefix.ln();
    Ok(SeqCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + T::lit(SEQ_TOLERANCE) * rhs.abs(),
    })
}
