use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimizer::{init, step_in_place, OptimizerConfig, OptimizerState};
use crate::scalar::Scalar;
use crate::vector::Vector;

/// A recorded run: `states[k]` is the state after `k` steps, `grads[k]` is `g_{k+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace<T> {
    pub config: OptimizerConfig<T>,
    pub states: Vec<OptimizerState<T>>,
    pub grads: Vec<Vector<T>>,
}

impl<T: Scalar> RunTrace<T> {
    /// Runs `steps` iterations from `x1`, drawing each gradient from `oracle(x_t)`.
    pub fn record(
        config: OptimizerConfig<T>,
        x1: Vector<T>,
        steps: usize,
        mut oracle: impl FnMut(&Vector<T>) -> Vector<T>,
    ) -> Result<Self> {
        let mut state = init(&config, x1)?;
        let mut states = Vec::with_capacity(steps + 1);
        let mut grads = Vec::with_capacity(steps);
        states.push(state.clone());
        for _ in 0..steps {
            let g = oracle(&state.x);
            step_in_place(&mut state, &g, &config)?;
            grads.push(g);
            states.push(state.clone());
        }
        Ok(Self {
            config,
            states,
            grads,
        })
    }

    pub fn steps(&self) -> usize {
        self.grads.len()
    }
}

/// Auxiliary iterates and per-step identity residuals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZTrace<T> {
    /// `z_1, ..., z_{T+1}`.
    pub z: Vec<Vector<T>>,
    /// `||(z_{t+1} - z_t) - RHS_t||` for `t = 1..T`.
    pub residuals: Vec<T>,
    /// `residual_t / (1 + ||z_t||)`, maximized over `t`.
    pub max_rel_residual: T,
}

impl<T: Scalar> ZTrace<T> {
    pub fn holds(&self, tolerance: T) -> bool {
        self.max_rel_residual <= tolerance
    }
}

/// Checks the auxiliary-iterate identity
///
/// ```text
/// z_t = x_t + k_t (x_t - x_{t-1}),   k_t = b1_t / (1 - b1_t),   x_0 = x_1
/// z_{t+1} - z_t = -(k_{t+1} - k_t) e_t m_t - k_t (e_t - e_{t-1}) m_{t-1} - e_t g_t
/// ```
///
/// where `e_t` is the effective stepsize (`e_0 = 0`, `m_0 = 0`). Both sides
/// are evaluated independently from the recorded trace.
pub fn check_z_identity<T: Scalar>(trace: &RunTrace<T>) -> Result<ZTrace<T>> {
    let steps = trace.steps();
    if steps == 0 {
        return Err(Error::EmptyInput("run trace"));
    }
    if trace.states.len() != steps + 1 {
        return Err(Error::input(format!(
            "trace has {} states for {} gradients",
            trace.states.len(),
            steps
        )));
    }
    if trace.states.iter().enumerate().any(|(k, s)| s.t != k) {
        return Err(Error::input("trace states must be consecutive from t = 0"));
    }
    let kappa = |t: usize| {
        let b = trace.config.beta1.at(t);
        b / (T::one() - b)
    };
    // x_t is the iterate before step t: states[t - 1].x, with x_0 = x_1.
    let x = |t: usize| &trace.states[t.saturating_sub(1)].x;
    let z_at = |t: usize| {
        let k = kappa(t);
        x(t).zip_map(x(t - 1), |cur, prev| cur + k * (cur - prev))
    };

    let z: Vec<Vector<T>> = (1..=steps + 1).map(z_at).collect();
    let mut residuals = Vec::with_capacity(steps);
    let mut max_rel_residual = T::zero();
    for t in 1..=steps {
        let prev = &trace.states[t - 1];
        let cur = &trace.states[t];
        let e = &cur.eff_step;
        let g = &trace.grads[t - 1];
        let dk = kappa(t + 1) - kappa(t);
        let k = kappa(t);
        let rhs: Vec<T> = (0..e.dim())
            .map(|j| {
                -dk * e[j] * cur.m[j] - k * (e[j] - prev.eff_step[j]) * prev.m[j] - e[j] * g[j]
            })
            .collect();
        let lhs = &z[t] - &z[t - 1];
        let residual = lhs
            .iter()
            .zip(rhs)
            .map(|(&l, r)| (l - r) * (l - r))
            .sum::<T>()
            .sqrt();
        max_rel_residual = max_rel_residual.max(residual / (T::one() + z[t - 1].norm()));
        residuals.push(residual);
    }
    Ok(ZTrace {
        z,
        residuals,
        max_rel_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizer::{Beta1Schedule, Beta2Schedule, StepSchedule, Variant};

    fn v(x: f64) -> Vector<f64> {
        Vector::new(vec![x]).unwrap()
    }

    #[test]
    fn momentum_free_run_has_z_equal_x() {
        let cfg =
            OptimizerConfig::new(Variant::Adam, 1, 0.1).with_beta2(Beta2Schedule::constant(0.9));
        let trace = RunTrace::record(cfg, v(1.0), 20, |x| x.scale(2.0)).unwrap();
        let z = check_z_identity(&trace).unwrap();
        for (k, zk) in z.z.iter().enumerate() {
            assert_eq!(zk, &trace.states[k].x);
        }
        assert!(z.holds(1e-15), "{:?}", z.residuals);
    }

    #[test]
    fn geometric_momentum_identity() {
        let cfg = OptimizerConfig::new(Variant::AmsGrad, 1, 0.0)
            .with_alpha(StepSchedule::inverse_sqrt(0.01))
            .with_beta1(Beta1Schedule::geometric(0.9, 0.99, 0.5))
            .with_beta2(Beta2Schedule::constant(0.99));
        let trace = RunTrace::record(cfg, v(5.0), 100, |x| x.scale(200.0)).unwrap();
        assert!(check_z_identity(&trace).unwrap().holds(1e-10));
    }

    #[test]
    fn rejects_broken_traces() {
        let cfg = OptimizerConfig::new(Variant::Sgd, 1, 0.1);
        let mut trace = RunTrace::record(cfg, v(1.0), 3, |x| x.clone()).unwrap();
        assert!(check_z_identity(&RunTrace {
            grads: vec![],
            ..trace.clone()
        })
        .is_err());
        trace.states.pop();
        assert!(check_z_identity(&trace).is_err());
    }
}
