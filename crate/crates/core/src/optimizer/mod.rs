//! The generalized Adam update and its classic instances.
//!
//! Every variant shares the same first-moment recursion and update step and
//! differs only in the weighting vector `vhat_t`:
//!
//! | variant              | `vhat_t`                                              |
//! |----------------------|-------------------------------------------------------|
//! | `Sgd`, `HeavyBall`   | `1`                                                   |
//! | `AdaGrad`            | `(1/t) * sum_{i<=t} g_i^2` (running sum divided by t) |
//! | `AdaFom`             | `(1 - 1/t) * vhat_{t-1} + (1/t) * g_t^2`              |
//! | `AmsGrad`            | `max(vhat_{t-1}, v_t)`, `v_t = b2 v_{t-1} + (1-b2) g_t^2` |
//! | `RmsProp`, `Adam`    | `b2 * vhat_{t-1} + (1 - b2) * g_t^2`                  |
//!
//! The variant fixes the `vhat_t` row only. The first-moment schedule is free:
//! `Sgd` with a constant nonzero `beta1` is the heavy-ball method, `AdaFom`
//! with `beta1 = 0` is AdaGrad, and `Adam` with `beta1 = 0` is RMSProp.
//! There is no bias correction.

mod schedule;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use schedule::{Beta1Schedule, Beta2Schedule, StepSchedule};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::vector::Vector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Sgd,
    HeavyBall,
    #[serde(rename = "adagrad")]
    AdaGrad,
    #[serde(rename = "adafom")]
    AdaFom,
    #[serde(rename = "amsgrad")]
    AmsGrad,
    #[serde(rename = "rmsprop")]
    RmsProp,
    Adam,
}

impl Variant {
    pub const ALL: [Variant; 7] = [
        Variant::Sgd,
        Variant::HeavyBall,
        Variant::AdaGrad,
        Variant::AdaFom,
        Variant::AmsGrad,
        Variant::RmsProp,
        Variant::Adam,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Sgd => "sgd",
            Variant::HeavyBall => "heavy_ball",
            Variant::AdaGrad => "adagrad",
            Variant::AdaFom => "adafom",
            Variant::AmsGrad => "amsgrad",
            Variant::RmsProp => "rmsprop",
            Variant::Adam => "adam",
        }
    }

    /// Whether `vhat_t` is the constant 1.
    pub fn is_unweighted(self) -> bool {
        matches!(self, Variant::Sgd | Variant::HeavyBall)
    }

    /// Whether the variant reads `beta2`.
    pub fn uses_beta2(self) -> bool {
        matches!(self, Variant::AmsGrad | Variant::RmsProp | Variant::Adam)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace(['-', ' '], "_");
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == key || (key == "heavyball" && *v == Variant::HeavyBall))
            .ok_or_else(|| Error::Unknown {
                kind: "variant",
                name: s.to_string(),
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig<T> {
    pub variant: Variant,
    pub alpha: StepSchedule<T>,
    pub beta1: Beta1Schedule<T>,
    /// Required by `AmsGrad`, `RmsProp` and `Adam`; ignored otherwise.
    pub beta2: Option<Beta2Schedule<T>>,
    pub epsilon: T,
    pub dim: usize,
}

impl<T: Scalar> OptimizerConfig<T> {
    /// Plain configuration: constant step `alpha`, `beta1 = 0`, `beta2 = 0.9` where used, `eps = 0`.
    pub fn new(variant: Variant, dim: usize, alpha: T) -> Self {
        Self {
            variant,
            alpha: StepSchedule::constant(alpha),
            beta1: Beta1Schedule::zero(),
            beta2: variant
                .uses_beta2()
                .then(|| Beta2Schedule::constant(T::lit(0.9))),
            epsilon: T::zero(),
            dim,
        }
    }

    pub fn with_alpha(mut self, alpha: StepSchedule<T>) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_beta1(mut self, beta1: Beta1Schedule<T>) -> Self {
        self.beta1 = beta1;
        self
    }

    pub fn with_beta2(mut self, beta2: Beta2Schedule<T>) -> Self {
        self.beta2 = Some(beta2);
        self
    }

    pub fn with_epsilon(mut self, epsilon: T) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::config("dimension must be positive"));
        }
        self.alpha.validate()?;
        self.beta1.validate()?;
        if !(self.epsilon.is_finite() && self.epsilon >= T::zero()) {
            return Err(Error::config("epsilon must be finite and non-negative"));
        }
        if self.variant.uses_beta2() {
            match &self.beta2 {
                Some(b2) => b2.validate()?,
                None => return Err(Error::config(format!("{} requires beta2", self.variant))),
            }
        }
        Ok(())
    }

    fn beta2_at(&self, t: usize) -> T {
        self.beta2
            .as_ref()
            .map_or_else(T::zero, |schedule| schedule.at(t))
    }
}

/// Iterate and moment estimates after `t` steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerState<T> {
    /// Number of completed steps.
    pub t: usize,
    /// Current iterate `x_{t+1}` (equal to `x_1` before the first step).
    pub x: Vector<T>,
    /// Iterate before the last step; `x_1` at initialization.
    pub x_prev: Vector<T>,
    pub m: Vector<T>,
    /// Moving average `v_t` (AMSGrad only; zero otherwise).
    pub v: Vector<T>,
    pub vhat: Vector<T>,
    /// `sum_{i<=t} g_i^2`, maintained for AdaGrad.
    pub grad_sq_sum: Vector<T>,
    /// Last applied effective stepsize `alpha_t / (sqrt(vhat_t) + eps)`; zero before the first step.
    pub eff_step: Vector<T>,
    /// `alpha_t` of the last step; zero before the first step.
    pub alpha: T,
}

impl<T: Scalar> OptimizerState<T> {
    /// Last applied update direction `alpha_t * m_t / (sqrt(vhat_t) + eps)`.
    pub fn update_direction(&self) -> Vector<T> {
        self.eff_step.hadamard(&self.m)
    }
}

/// Sets up the state with `m_0 = v_0 = vhat_0 = 0` and `x_0 = x_1`.
pub fn init<T: Scalar>(config: &OptimizerConfig<T>, x1: Vector<T>) -> Result<OptimizerState<T>> {
    config.validate()?;
    x1.check_dim(config.dim)?;
    if !x1.is_finite() {
        return Err(Error::NumericFailure {
            t: 0,
            what: "initial iterate",
        });
    }
    let d = config.dim;
    Ok(OptimizerState {
        t: 0,
        x_prev: x1.clone(),
        x: x1,
        m: Vector::zeros(d),
        v: Vector::zeros(d),
        vhat: Vector::zeros(d),
        grad_sq_sum: Vector::zeros(d),
        eff_step: Vector::zeros(d),
        alpha: T::zero(),
    })
}

/// New second-moment quantities after observing `g` at step `t`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct SecondMoment<T> {
    pub v: Vector<T>,
    pub vhat: Vector<T>,
    pub grad_sq_sum: Vector<T>,
}

pub(crate) fn second_moment<T: Scalar>(
    variant: Variant,
    state: &OptimizerState<T>,
    g: &Vector<T>,
    beta2: T,
    t: usize,
) -> SecondMoment<T> {
    assert!(t >= 1, "second moment is defined from t = 1");
    let g2 = g.square();
    let mut v = state.v.clone();
    let mut grad_sq_sum = state.grad_sq_sum.clone();
    let vhat = match variant {
        Variant::Sgd | Variant::HeavyBall => Vector::ones(g.dim()),
        Variant::AdaGrad => {
            grad_sq_sum = &grad_sq_sum + &g2;
            grad_sq_sum.scale(T::one() / T::from_usize_lossy(t))
        }
        Variant::AdaFom => {
            let inv_t = T::one() / T::from_usize_lossy(t);
            state
                .vhat
                .zip_map(&g2, |prev, sq| (T::one() - inv_t) * prev + inv_t * sq)
        }
        Variant::AmsGrad => {
            v = state
                .v
                .zip_map(&g2, |prev, sq| beta2 * prev + (T::one() - beta2) * sq);
            state.vhat.max_elementwise(&v)
        }
        Variant::RmsProp | Variant::Adam => state
            .vhat
            .zip_map(&g2, |prev, sq| beta2 * prev + (T::one() - beta2) * sq),
    };
    SecondMoment {
        v,
        vhat,
        grad_sq_sum,
    }
}

/// The weighting `vhat_t = h_t(g_1, ..., g_t)` given the state after `t - 1` steps.
pub fn update_second_moment<T: Scalar>(
    variant: Variant,
    state: &OptimizerState<T>,
    g: &Vector<T>,
    beta2: T,
    t: usize,
) -> Vector<T> {
    second_moment(variant, state, g, beta2, t).vhat
}

/// One iteration of the generalized Adam update, in place.
///
/// The state is left untouched when an error is returned.
pub fn step_in_place<T: Scalar>(
    state: &mut OptimizerState<T>,
    g: &Vector<T>,
    config: &OptimizerConfig<T>,
) -> Result<()> {
    g.check_dim(config.dim)?;
    state.x.check_dim(config.dim)?;
    let t = state.t + 1;
    if !g.is_finite() {
        return Err(Error::NumericFailure {
            t,
            what: "gradient",
        });
    }

    let beta1 = config.beta1.at(t);
    let m = state
        .m
        .zip_map(g, |prev, gj| beta1 * prev + (T::one() - beta1) * gj);

    let SecondMoment {
        v,
        vhat,
        grad_sq_sum,
    } = second_moment(config.variant, state, g, config.beta2_at(t), t);

    let alpha = config.alpha.at(t);
    let denom = vhat.map(|vh| vh.sqrt() + config.epsilon);
    if let Some(coord) = denom.iter().position(|&d| !(d > T::zero())) {
        return Err(Error::ZeroDenominator { t, coord });
    }
    let eff_step = denom.map(|d| alpha / d);
    let x = state
        .x
        .zip_map(&eff_step.hadamard(&m), |xj, step| xj - step);

    for (what, vec) in [
        ("first moment", &m),
        ("second moment", &vhat),
        ("effective stepsize", &eff_step),
        ("iterate", &x),
    ] {
        if !vec.is_finite() {
            return Err(Error::NumericFailure { t, what });
        }
    }

    state.x_prev = std::mem::replace(&mut state.x, x);
    state.m = m;
    state.v = v;
    state.vhat = vhat;
    state.grad_sq_sum = grad_sq_sum;
    state.eff_step = eff_step;
    state.alpha = alpha;
    state.t = t;
    Ok(())
}

/// Functional form of [`step_in_place`].
pub fn step<T: Scalar>(
    state: &OptimizerState<T>,
    g: &Vector<T>,
    config: &OptimizerConfig<T>,
) -> Result<OptimizerState<T>> {
    let mut next = state.clone();
    step_in_place(&mut next, g, config)?;
    Ok(next)
}

/// Whether the last update satisfies `||alpha_t m_t / (sqrt(vhat_t) + eps)|| <= bound`.
pub fn bounded_update_check<T: Scalar>(state: &OptimizerState<T>, bound: T) -> bool {
    state.update_direction().norm() <= bound
}

/// Configuration and state bundled together.
#[derive(Debug, Clone)]
pub struct GeneralizedAdam<T> {
    config: OptimizerConfig<T>,
    state: OptimizerState<T>,
}

impl<T: Scalar> GeneralizedAdam<T> {
    pub fn new(config: OptimizerConfig<T>, x1: Vector<T>) -> Result<Self> {
        let state = init(&config, x1)?;
        Ok(Self { config, state })
    }

    pub fn config(&self) -> &OptimizerConfig<T> {
        &self.config
    }

    pub fn state(&self) -> &OptimizerState<T> {
        &self.state
    }

    pub fn iterate(&self) -> &Vector<T> {
        &self.state.x
    }

    pub fn step(&mut self, g: &Vector<T>) -> Result<&OptimizerState<T>> {
        step_in_place(&mut self.state, g, &self.config)?;
        Ok(&self.state)
    }

    pub fn into_state(self) -> OptimizerState<T> {
        self.state
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> Vector<f64> {
        Vector::new(xs.to_vec()).unwrap()
    }

    #[test]
    fn init_zeroes_moments() {
        let cfg = OptimizerConfig::new(Variant::AdaGrad, 1, 1.0);
        let s = init(&cfg, v(&[1.0])).unwrap();
        assert_eq!(s.t, 0);
        assert_eq!(s.x.as_slice(), &[1.0]);
        assert_eq!(s.x_prev.as_slice(), &[1.0]);
        assert_eq!(s.m.as_slice(), &[0.0]);
        assert_eq!(s.vhat.as_slice(), &[0.0]);

        let cfg = OptimizerConfig::new(Variant::AmsGrad, 2, 1.0);
        let s = init(&cfg, v(&[1.0, 2.0])).unwrap();
        assert_eq!(s.v.as_slice(), &[0.0, 0.0]);
        assert_eq!(s.vhat.as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn init_rejects_dimension_mismatch() {
        let cfg = OptimizerConfig::new(Variant::Sgd, 2, 0.1);
        assert_eq!(
            init(&cfg, v(&[1.0, 2.0, 3.0])),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 3
            })
        );
    }

    #[test]
    fn sgd_step() {
        let cfg = OptimizerConfig::new(Variant::Sgd, 1, 0.1);
        let s = init(&cfg, v(&[1.0])).unwrap();
        let s = step(&s, &v(&[0.5]), &cfg).unwrap();
        assert_eq!(s.x.as_slice(), &[0.95]);
        assert_eq!(s.t, 1);
        assert_eq!(s.x_prev.as_slice(), &[1.0]);
    }

    #[test]
    fn adagrad_first_step() {
        let cfg = OptimizerConfig::new(Variant::AdaGrad, 1, 1.0);
        let s = init(&cfg, v(&[1.0])).unwrap();
        let s = step(&s, &v(&[2.0]), &cfg).unwrap();
        assert_eq!(s.vhat.as_slice(), &[4.0]);
        assert_eq!(s.x.as_slice(), &[0.0]);
    }

    #[test]
    fn amsgrad_keeps_maximum() {
        let cfg =
            OptimizerConfig::new(Variant::AmsGrad, 1, 0.1).with_beta2(Beta2Schedule::constant(0.5));
        let s = init(&cfg, v(&[0.0])).unwrap();
        let s = step(&s, &v(&[2.0]), &cfg).unwrap();
        assert_eq!(s.v.as_slice(), &[2.0]);
        assert_eq!(s.vhat.as_slice(), &[2.0]);
        let s = step(&s, &v(&[0.0]), &cfg).unwrap();
        assert_eq!(s.v.as_slice(), &[1.0]);
        assert_eq!(s.vhat.as_slice(), &[2.0]);
    }

    #[test]
    fn heavy_ball_momentum() {
        let cfg = OptimizerConfig::new(Variant::HeavyBall, 1, 0.1)
            .with_beta1(Beta1Schedule::constant(0.9));
        let s = init(&cfg, v(&[0.0])).unwrap();
        let s = step(&s, &v(&[1.0]), &cfg).unwrap();
        assert!((s.m[0] - 0.1).abs() < 1e-15);
        let m1 = s.m[0];
        let s = step(&s, &v(&[3.0]), &cfg).unwrap();
        assert!((s.m[0] - (0.9 * m1 + 0.1 * 3.0)).abs() < 1e-15);
    }

    #[test]
    fn adafom_running_mean_update() {
        let cfg = OptimizerConfig::new(Variant::AdaFom, 1, 1.0);
        let mut s = init(&cfg, v(&[0.0])).unwrap();
        s.vhat = v(&[4.0]);
        s.t = 1;
        let vh = update_second_moment(Variant::AdaFom, &s, &v(&[0.0]), 0.0, 2);
        assert_eq!(vh.as_slice(), &[2.0]);
    }

    #[test]
    fn adam_ema_fixed_point() {
        let cfg = OptimizerConfig::new(Variant::Adam, 1, 1.0);
        let mut s = init(&cfg, v(&[0.0])).unwrap();
        s.vhat = v(&[1.0]);
        let vh = update_second_moment(Variant::Adam, &s, &v(&[1.0]), 0.9, 2);
        assert!((vh[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_gradient_coordinate_with_zero_epsilon_fails() {
        let cfg = OptimizerConfig::new(Variant::AdaGrad, 2, 1.0);
        let s = init(&cfg, v(&[1.0, 1.0])).unwrap();
        assert_eq!(
            step(&s, &v(&[1.0, 0.0]), &cfg),
            Err(Error::ZeroDenominator { t: 1, coord: 1 })
        );
        let cfg = cfg.with_epsilon(1e-8);
        let s2 = step(&s, &v(&[1.0, 0.0]), &cfg).unwrap();
        assert_eq!(s2.x[1], 1.0);
    }

    #[test]
    fn non_finite_gradient_rejected_and_state_untouched() {
        let cfg = OptimizerConfig::new(Variant::Adam, 1, 0.1);
        let mut s = init(&cfg, v(&[1.0])).unwrap();
        let before = s.clone();
        let bad = Vector::from_vec_unchecked(vec![f64::NAN]);
        assert_eq!(
            step_in_place(&mut s, &bad, &cfg),
            Err(Error::NumericFailure {
                t: 1,
                what: "gradient"
            })
        );
        assert_eq!(s, before);
    }

    #[test]
    fn overflow_reported_as_numeric_failure() {
        let cfg = OptimizerConfig::new(Variant::Sgd, 1, 1e300);
        let s = init(&cfg, v(&[0.0])).unwrap();
        assert!(matches!(
            step(&s, &v(&[1e300]), &cfg),
            Err(Error::NumericFailure { t: 1, .. })
        ));
    }

    #[test]
    fn missing_beta2_rejected() {
        let mut cfg = OptimizerConfig::new(Variant::Adam, 1, 0.1);
        cfg.beta2 = None;
        assert!(cfg.validate().is_err());
        let cfg = OptimizerConfig::new(Variant::AdaGrad, 1, 0.1);
        assert!(cfg.beta2.is_none());
        cfg.validate().unwrap();
    }

    #[test]
    fn bounded_update() {
        let cfg = OptimizerConfig::new(Variant::Sgd, 2, 0.1);
        let s = init(&cfg, v(&[0.0, 0.0])).unwrap();
        let s = step(&s, &v(&[1.0, 0.0]), &cfg).unwrap();
        assert!(bounded_update_check(&s, 0.2));
        assert!(!bounded_update_check(&s, 0.0));
    }

    #[test]
    fn generic_over_f32() {
        let cfg = OptimizerConfig::<f32>::new(Variant::Sgd, 1, 0.1);
        let mut opt = GeneralizedAdam::new(cfg, Vector::new(vec![1.0_f32]).unwrap()).unwrap();
        opt.step(&Vector::new(vec![0.5]).unwrap()).unwrap();
        assert!((opt.iterate()[0] - 0.95).abs() < 1e-7);
    }

    #[test]
    fn variant_names_round_trip() {
        for v in Variant::ALL {
            assert_eq!(v.name().parse::<Variant>().unwrap(), v);
            let json = serde_json::to_string(&v).unwrap();
            assert_eq!(json, format!("\"{}\"", v.name()));
        }
        assert_eq!("AMSGrad".parse::<Variant>().unwrap(), Variant::AmsGrad);
        assert!("nadam".parse::<Variant>().is_err());
    }
}
