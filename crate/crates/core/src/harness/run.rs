use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::spec::ExperimentSpec;
use crate::monitor::{
    certify, finalize, ConvergenceReport, Monitor, MonitorRecord, RateForm, Slopes,
    TheoryConstants, TheoryInputs, Verdict, DEFAULT_THRESHOLD,
};
use crate::optimizer::{init, step_in_place, OptimizerState, StepSchedule, Variant};
use crate::problems::Problem;
use crate::rng::SplitMix64;
use crate::vector::Vector;

/// Stream label for the stochastic-gradient draws of a run.
const GRADIENT_STREAM: u64 = 0x0A1D;

pub const CSV_HEADER: &str = "t,f_x,grad_norm_sq,termA_inc,termA_cum,termB_inc,termB_cum,termC_inc,termC_cum,gamma_t,gamma_cum,eff_step_min,eff_step_max,x_norm";

/// Iteration at which a run stopped on a non-finite or zero-denominator step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Abort {
    pub t: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub t: usize,
    pub min_grad_sq: f64,
}

/// Everything produced by [`run`].
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub spec: ExperimentSpec,
    pub problem_name: String,
    pub records: Vec<MonitorRecord<f64>>,
    /// `None` only when the run aborted at its first step.
    pub report: Option<ConvergenceReport<f64>>,
    pub verdict: Verdict,
    pub final_state: OptimizerState<f64>,
    pub abort: Option<Abort>,
    pub checkpoints: Vec<Checkpoint>,
    /// Largest `||g_t||` seen.
    pub max_grad_norm: f64,
    /// `g_1` and `vhat_1`, when the first step completed.
    pub first_grad: Option<Vector<f64>>,
    pub first_vhat: Option<Vector<f64>>,
}

/// Runs the experiment, observing every step.
///
/// Invalid specs are errors. A numeric failure stops the run early, keeps
/// the records so far and is reported through [`RunOutcome::abort`]; such a
/// run is classified `Diverging`.
pub fn run(spec: &ExperimentSpec) -> Result<RunOutcome> {
    spec.validate()?;
    let problem = spec.problem.build()?;
    run_with(spec, problem.as_ref())
}

/// [`run`] against an already constructed problem; `spec.problem` is only echoed.
pub fn run_with(spec: &ExperimentSpec, problem: &dyn Problem<f64>) -> Result<RunOutcome> {
    spec.validate()?;
    let config = spec.optimizer.to_config(problem.dim())?;
    let x1 = match &spec.x1 {
        Some(x) => Vector::new(x.clone())?,
        None => problem.default_start(),
    };
    let mut state = init(&config, x1)?;
    let mut rng = SplitMix64::derive(spec.seed, GRADIENT_STREAM);
    let constants = problem.constants();
    let mut monitor = Monitor::new(config.variant, config.epsilon, constants.h);
    let mut abort = None;
    let mut max_update = 0.0_f64;
    let mut max_grad_norm = 0.0_f64;
    let mut first_grad: Option<Vector<f64>> = None;
    let mut first_vhat: Option<Vector<f64>> = None;

    for _ in 0..spec.iters {
        let g = problem.stochastic_gradient(&state.x, &mut rng);
        let prev = state.clone();
        match step_in_place(&mut state, &g, &config) {
            Ok(()) => {}
            Err(e @ (Error::NumericFailure { .. } | Error::ZeroDenominator { .. })) => {
                abort = Some(Abort {
                    t: prev.t + 1,
                    message: e.to_string(),
                });
                break;
            }
            Err(e) => return Err(e),
        }
        max_update = max_update.max(state.update_direction().norm());
        max_grad_norm = max_grad_norm.max(g.norm());
        if first_grad.is_none() {
            first_grad = Some(g.clone());
            first_vhat = Some(state.vhat.clone());
        }
        monitor.observe(&prev, &state, &g, Some(problem));
    }

    let records = monitor.into_records();
    let theory = match (constants.h, constants.l) {
        (Some(h), Some(l)) => {
            let unit_inverse_sqrt =
                matches!(config.alpha, StepSchedule::InverseSqrt { scale } if scale == 1.0);
            let (c, rate_form) = match (config.variant, unit_inverse_sqrt) {
                (Variant::AmsGrad, true) => (
                    first_vhat.as_ref().map(|v| v.sqrt().min_entry()),
                    Some(RateForm::AmsGrad),
                ),
                (Variant::AdaFom, true) => (
                    first_grad.as_ref().map(|g| g.abs().min_entry()),
                    Some(RateForm::AdaFom),
                ),
                _ => (None, None),
            };
            Some(TheoryInputs {
                h,
                l,
                g: max_update,
                beta1: config.beta1.cap(),
                d: config.dim,
                c: c.filter(|c| *c > 0.0),
                f_star: constants.f_star,
                rate_form,
            })
        }
        _ => None,
    };
    let report = if records.is_empty() {
        None
    } else {
        Some(finalize(&records, theory.as_ref())?)
    };
    let verdict = match (&abort, &report) {
        (Some(_), _) => Verdict::Diverging,
        (None, Some(r)) => certify(r, DEFAULT_THRESHOLD),
        (None, None) => Verdict::Suspect,
    };
    let checkpoints = match (&spec.checkpoints, &report) {
        (Some(cps), Some(r)) => cps
            .iter()
            .filter(|&&t| t <= r.iterations)
            .map(|&t| Checkpoint {
                t,
                min_grad_sq: r.min_grad_sq_running[t - 1],
            })
            .collect(),
        _ => Vec::new(),
    };
    Ok(RunOutcome {
        spec: spec.clone(),
        problem_name: problem.name().to_string(),
        records,
        report,
        verdict,
        final_state: state,
        abort,
        checkpoints,
        max_grad_norm,
        first_grad,
        first_vhat,
    })
}

/// Shortest round-trip decimal: plain notation for magnitudes in `[1e-5, 1e16)`,
/// scientific otherwise.
pub fn format_float(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

impl RunOutcome {
    /// The run log; one row per iteration `t` with `t = 1 (mod record_every)`.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.records.len() / self.spec.record_every + 2));
        out.push_str(CSV_HEADER);
        out.push('\n');
        let Some(report) = &self.report else {
            return out;
        };
        let f = format_float;
        for (k, r) in self.records.iter().enumerate() {
            if k % self.spec.record_every != 0 {
                continue;
            }
            let f_x = r.f_x.map(f).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.t,
                f_x,
                f(r.grad_norm_sq),
                f(r.term_a_inc),
                f(report.term_a_cum[k]),
                f(r.term_b_inc),
                f(report.term_b_cum[k]),
                f(r.term_c_inc),
                f(report.term_c_cum[k]),
                f(r.gamma_t),
                f(report.gamma_cum[k]),
                f(r.eff_step_min),
                f(r.eff_step_max),
                f(r.x_norm),
            );
        }
        out
    }

    pub fn summary(&self) -> RunSummary {
        let finals = self.report.as_ref().map(|r| Finals {
            term_a: r.final_term_a(),
            term_b: r.final_term_b(),
            term_c: r.final_term_c(),
            gamma: r.final_gamma(),
            gamma_lower_bound: r
                .gamma_lower_bound_cum
                .as_ref()
                .and_then(|s| s.last().copied()),
            min_grad_sq: r.final_min_grad_sq(),
            ratio: r.final_ratio(),
        });
        RunSummary {
            problem: self.problem_name.clone(),
            variant: self.spec.optimizer.variant,
            iters: self.spec.iters,
            completed: self.records.len(),
            seed: self.spec.seed,
            verdict: self.verdict,
            slopes: self.report.as_ref().map(|r| r.slopes),
            finals,
            theory_constants: self.report.as_ref().and_then(|r| r.theory_constants),
            grad_is_surrogate: self.report.as_ref().is_some_and(|r| r.grad_is_surrogate),
            checkpoints: self.checkpoints.clone(),
            final_x: self.final_state.x.to_f64_vec(),
            aborted_at: self.abort.as_ref().map(|a| a.t),
            abort_message: self.abort.as_ref().map(|a| a.message.clone()),
        }
    }

    /// Writes `<prefix>.csv` and `<prefix>.json`, returning both paths.
    pub fn write(&self, prefix: &Path) -> Result<(PathBuf, PathBuf)> {
        let csv = with_suffix(prefix, "csv");
        let json = with_suffix(prefix, "json");
        write_file(&csv, &self.to_csv())?;
        write_file(&json, &self.summary().to_json())?;
        Ok((csv, json))
    }
}

fn with_suffix(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| io_error(parent, e))?;
    }
    std::fs::write(path, contents).map_err(|e| io_error(path, e))
}

pub(crate) fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Finals {
    pub term_a: f64,
    pub term_b: f64,
    pub term_c: f64,
    pub gamma: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_lower_bound: Option<f64>,
    pub min_grad_sq: f64,
    pub ratio: f64,
}

/// JSON report of a single run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub problem: String,
    pub variant: Variant,
    pub iters: usize,
    pub completed: usize,
    pub seed: u64,
    pub verdict: Verdict,
    pub slopes: Option<Slopes<f64>>,
    pub finals: Option<Finals>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theory_constants: Option<TheoryConstants<f64>>,
    pub grad_is_surrogate: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checkpoints: Vec<Checkpoint>,
    pub final_x: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aborted_at: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abort_message: Option<String>,
}

impl RunSummary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("run summary serializes")
    }
}
