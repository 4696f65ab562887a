//! Generalized Adam-type stochastic optimizers and convergence diagnostics.
//!
//! The crate implements the two-moment update
//!
//! ```text
//! m_t     = b1_t * m_{t-1} + (1 - b1_t) * g_t
//! vhat_t  = h_t(g_1, ..., g_t)
//! x_{t+1} = x_t - alpha_t * m_t / (sqrt(vhat_t) + eps)
//! ```
//!
//! for every classic choice of the weighting `h_t` (SGD, heavy-ball, AdaGrad,
//! AdaFom, AMSGrad, RMSProp, Adam), together with
//!
//! * [`problems`]: objective/gradient oracles, including two non-convergence
//!   counterexamples and a seeded least-squares finite sum,
//! * [`monitor`]: online bookkeeping of the quantities that govern
//!   convergence (curvature term, effective-stepsize oscillation, cumulative
//!   effective stepsize) and a growth-rate classifier,
//! * [`verification`]: brute-force checks of the sequence inequalities and
//!   the auxiliary-iterate identity used in the convergence analysis,
//! * [`harness`]: reproducible experiments with bit-stable CSV/JSON output.
//!
//! All numerical code is generic over [`Scalar`] (`f32` or `f64`); the
//! experiment harness runs in `f64`. Aliases such as [`Vector64`] and
//! [`Optimizer64`] name the common instantiations.

// Guards written as `!(x > 0)` must also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod harness;
pub mod monitor;
pub mod optimizer;
pub mod problems;
pub mod rng;
pub mod scalar;
pub mod vector;
pub mod verification;

pub use error::{Error, Result};
pub use monitor::{
    certify, finalize, ConvergenceReport, Monitor, MonitorRecord, TheoryConstants, TheoryInputs,
    Verdict,
};
pub use optimizer::{
    bounded_update_check, init, step, step_in_place, update_second_moment, Beta1Schedule,
    Beta2Schedule, GeneralizedAdam, OptimizerConfig, OptimizerState, StepSchedule, Variant,
};
pub use problems::{finite_difference_gradient, Problem, ProblemConstants, Region};
pub use rng::SplitMix64;
pub use scalar::Scalar;
pub use vector::Vector;

pub type Vector64 = Vector<f64>;
pub type Vector32 = Vector<f32>;
pub type OptimizerConfig64 = OptimizerConfig<f64>;
pub type OptimizerState64 = OptimizerState<f64>;
pub type Optimizer64 = GeneralizedAdam<f64>;
pub type Optimizer32 = GeneralizedAdam<f32>;
pub type MonitorRecord64 = MonitorRecord<f64>;
pub type ConvergenceReport64 = ConvergenceReport<f64>;
