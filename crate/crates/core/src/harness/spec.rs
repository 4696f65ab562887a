use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimizer::{Beta1Schedule, Beta2Schedule, OptimizerConfig, StepSchedule, Variant};
use crate::problems::{
    PiecewiseQuadratic, Problem, Quadratic100, SyntheticFiniteSum, TermBCounterexample,
};

/// Problem selector: `name` plus the parameters that problem accepts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub name: String,
    #[serde(default)]
    pub params: ProblemParams,
}

/// Union of all problem parameters; unset fields take the problem's default.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProblemParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise_scale: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub batch: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

pub const PROBLEM_NAMES: [&str; 4] = [
    "piecewise_quadratic",
    "term_b_counterexample",
    "quadratic_100",
    "synthetic_finite_sum",
];

pub const SYNTHETIC_DEFAULT_N: usize = 32;
pub const SYNTHETIC_DEFAULT_DIM: usize = 4;
pub const SYNTHETIC_DEFAULT_ROWS: usize = 2;
pub const SYNTHETIC_DEFAULT_SEED: u64 = 1;

impl ProblemSpec {
    pub fn named(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            params: ProblemParams::default(),
        }
    }

    pub fn build(&self) -> Result<Box<dyn Problem<f64>>> {
        let p = &self.params;
        let reject = |allowed: &[&str]| -> Result<()> {
            let set = [
                ("b", p.b.is_some()),
                ("noise_scale", p.noise_scale.is_some()),
                ("n", p.n.is_some()),
                ("dim", p.dim.is_some()),
                ("rows", p.rows.is_some()),
                ("batch", p.batch.is_some()),
                ("seed", p.seed.is_some()),
            ];
            match set.iter().find(|(k, on)| *on && !allowed.contains(k)) {
                Some((k, _)) => Err(Error::config(format!(
                    "parameter `{k}` does not apply to {}",
                    self.name
                ))),
                None => Ok(()),
            }
        };
        match self.name.as_str() {
            "piecewise_quadratic" => {
                reject(&["b"])?;
                Ok(Box::new(PiecewiseQuadratic::new(p.b.unwrap_or(10.0))?))
            }
            "term_b_counterexample" => {
                reject(&[])?;
                Ok(Box::new(TermBCounterexample))
            }
            "quadratic_100" => {
                reject(&["noise_scale"])?;
                Ok(Box::new(Quadratic100::new(p.noise_scale.unwrap_or(0.0))?))
            }
            "synthetic_finite_sum" => {
                reject(&["n", "dim", "rows", "batch", "seed"])?;
                Ok(Box::new(SyntheticFiniteSum::with_shape(
                    p.n.unwrap_or(SYNTHETIC_DEFAULT_N),
                    p.dim.unwrap_or(SYNTHETIC_DEFAULT_DIM),
                    p.rows.unwrap_or(SYNTHETIC_DEFAULT_ROWS),
                    p.batch.unwrap_or(1),
                    p.seed.unwrap_or(SYNTHETIC_DEFAULT_SEED),
                )?))
            }
            other => Err(Error::Unknown {
                kind: "problem",
                name: other.to_string(),
            }),
        }
    }
}

/// Optimizer settings without the dimension, which comes from the problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerSpec {
    pub variant: Variant,
    pub alpha: StepSchedule<f64>,
    #[serde(default = "Beta1Schedule::zero")]
    pub beta1: Beta1Schedule<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta2: Option<Beta2Schedule<f64>>,
    #[serde(default)]
    pub epsilon: f64,
}

impl OptimizerSpec {
    pub fn new(variant: Variant, alpha: StepSchedule<f64>) -> Self {
        Self {
            variant,
            alpha,
            beta1: Beta1Schedule::zero(),
            beta2: None,
            epsilon: 0.0,
        }
    }

    pub fn with_beta2(mut self, beta2: f64) -> Self {
        self.beta2 = Some(Beta2Schedule::constant(beta2));
        self
    }

    pub fn to_config(&self, dim: usize) -> Result<OptimizerConfig<f64>> {
        let config = OptimizerConfig {
            variant: self.variant,
            alpha: self.alpha.clone(),
            beta1: self.beta1.clone(),
            beta2: self.beta2.clone(),
            epsilon: self.epsilon,
            dim,
        };
        config.validate()?;
        Ok(config)
    }
}

fn one() -> usize {
    1
}

/// A complete, reproducible experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub problem: ProblemSpec,
    pub optimizer: OptimizerSpec,
    pub iters: usize,
    #[serde(default)]
    pub seed: u64,
    /// Iterations at which the running minimum of `||grad f||^2` is reported.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoints: Option<Vec<usize>>,
    /// Path prefix for `<output>.csv` and `<output>.json`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default = "one")]
    pub record_every: usize,
    /// Starting point; the problem's default when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x1: Option<Vec<f64>>,
}

impl ExperimentSpec {
    pub fn new(problem: ProblemSpec, optimizer: OptimizerSpec, iters: usize) -> Self {
        Self {
            problem,
            optimizer,
            iters,
            seed: 0,
            checkpoints: None,
            output: None,
            record_every: 1,
            x1: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::config(format!("experiment spec: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("experiment spec serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.iters == 0 {
            return Err(Error::config("iters must be at least 1"));
        }
        if self.record_every == 0 {
            return Err(Error::config("record_every must be at least 1"));
        }
        if let Some(cps) = &self.checkpoints {
            if cps.iter().any(|&t| t == 0 || t > self.iters) || cps.windows(2).any(|w| w[1] <= w[0])
            {
                return Err(Error::config(
                    "checkpoints must be strictly increasing within 1..=iters",
                ));
            }
        }
        Ok(())
    }
}

/// Process exit status for a harness error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::ZeroDenominator { .. } | Error::NumericFailure { .. } => 1,
        _ => 2,
    }
}
