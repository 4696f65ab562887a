//! Iteration-indexed parameter schedules. Iterations are counted from `t = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Step size `alpha_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepSchedule<T> {
    Constant {
        alpha: T,
    },
    /// `alpha_t = scale / sqrt(t)`
    InverseSqrt {
        scale: T,
    },
    /// Explicit `alpha_1, alpha_2, ...`; the last entry is held past the end.
    Table {
        values: Vec<T>,
    },
}

impl<T: Scalar> StepSchedule<T> {
    pub fn constant(alpha: T) -> Self {
        Self::Constant { alpha }
    }

    pub fn inverse_sqrt(scale: T) -> Self {
        Self::InverseSqrt { scale }
    }

    pub fn at(&self, t: usize) -> T {
        debug_assert!(t >= 1);
        match self {
            Self::Constant { alpha } => *alpha,
            Self::InverseSqrt { scale } => *scale / T::from_usize_lossy(t).sqrt(),
            Self::Table { values } => values[(t - 1).min(values.len() - 1)],
        }
    }

    /// True when `alpha_t <= alpha_{t-1}` for all `t`.
    pub fn is_non_increasing(&self) -> bool {
        match self {
            Self::Constant { .. } | Self::InverseSqrt { .. } => true,
            Self::Table { values } => values.windows(2).all(|w| w[1] <= w[0]),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            Self::Constant { alpha } => alpha.is_finite() && *alpha > T::zero(),
            Self::InverseSqrt { scale } => scale.is_finite() && *scale > T::zero(),
            Self::Table { values } => {
                !values.is_empty() && values.iter().all(|a| a.is_finite() && *a > T::zero())
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::config(
                "step sizes must be finite and strictly positive",
            ))
        }
    }
}

/// First-moment weight `beta_{1,t}`; always non-increasing and below 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Beta1Schedule<T> {
    Constant {
        beta1: T,
    },
    /// Explicit non-increasing `beta_{1,1}, beta_{1,2}, ...`; the last entry is held.
    Table {
        values: Vec<T>,
    },
    /// `beta_{1,t} = limit + (beta1 - limit) * rate^(t-1)`, decaying from `beta1` to `limit`.
    Geometric {
        beta1: T,
        rate: T,
        limit: T,
    },
}

impl<T: Scalar> Beta1Schedule<T> {
    pub fn constant(beta1: T) -> Self {
        Self::Constant { beta1 }
    }

    pub fn zero() -> Self {
        Self::Constant { beta1: T::zero() }
    }

    pub fn geometric(beta1: T, rate: T, limit: T) -> Self {
        Self::Geometric { beta1, rate, limit }
    }

    pub fn at(&self, t: usize) -> T {
        debug_assert!(t >= 1);
        match self {
            Self::Constant { beta1 } => *beta1,
            Self::Table { values } => values[(t - 1).min(values.len() - 1)],
            Self::Geometric { beta1, rate, limit } => {
                let decay = rate.powi(i32::try_from(t - 1).unwrap_or(i32::MAX));
                *limit + (*beta1 - *limit) * decay
            }
        }
    }

    /// Upper bound `beta1 >= beta_{1,t}` for all `t`.
    pub fn cap(&self) -> T {
        match self {
            Self::Constant { beta1 } | Self::Geometric { beta1, .. } => *beta1,
            Self::Table { values } => values[0],
        }
    }

    pub fn is_identically_zero(&self) -> bool {
        match self {
            Self::Constant { beta1 } => *beta1 == T::zero(),
            Self::Table { values } => values.iter().all(|b| *b == T::zero()),
            Self::Geometric { beta1, .. } => *beta1 == T::zero(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let in_range = |b: T| b.is_finite() && b >= T::zero() && b < T::one();
        match self {
            Self::Constant { beta1 } if in_range(*beta1) => Ok(()),
            Self::Table { values }
                if !values.is_empty()
                    && values.iter().all(|&b| in_range(b))
                    && values.windows(2).all(|w| w[1] <= w[0]) =>
            {
                Ok(())
            }
            Self::Geometric { beta1, rate, limit }
                if in_range(*beta1)
                    && *limit >= T::zero()
                    && *limit <= *beta1
                    && *rate >= T::zero()
                    && *rate < T::one() =>
            {
                Ok(())
            }
            _ => Err(Error::config(
                "beta1 schedule must be non-increasing with values in [0, 1)",
            )),
        }
    }
}

/// Second-moment weight `beta_2` for the exponential-moving-average variants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Beta2Schedule<T> {
    Constant {
        beta2: T,
    },
    /// `beta_{2,t} = 1 - 1/t`, which turns the moving average into the running mean.
    InverseT,
}

impl<T: Scalar> Beta2Schedule<T> {
    pub fn constant(beta2: T) -> Self {
        Self::Constant { beta2 }
    }

    pub fn at(&self, t: usize) -> T {
        match self {
            Self::Constant { beta2 } => *beta2,
            Self::InverseT => T::one() - T::one() / T::from_usize_lossy(t),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Constant { beta2 }
                if beta2.is_finite() && *beta2 >= T::zero() && *beta2 < T::one() =>
            {
                Ok(())
            }
            Self::InverseT => Ok(()),
            _ => Err(Error::config("beta2 must lie in [0, 1)")),
        }
    }
}
