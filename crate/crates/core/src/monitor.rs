//! Online bookkeeping of the quantities that decide whether an Adam-type run converges.
//!
//! With `e_t = alpha_t / (sqrt(vhat_t) + eps)` the effective stepsize, each
//! step contributes
//!
//! * Term A: `||e_t * g_t||^2` (curvature-induced ascent),
//! * Term B: `||e_t - e_{t-1}||_1` (oscillation of effective stepsizes),
//! * Term C: `||e_t - e_{t-1}||^2`,
//! * `gamma_t = min_j (e_t)_j` (realized descent budget).
//!
//! The oscillation sums start at `t = 2`, so Terms B and C contribute zero at
//! `t = 1`. The guaranteed rate is `min_t ||grad f(x_t)||^2 = O(s1(T) / s2(T))`
//! where `s1` bounds Terms A-C and `s2` grows like `sum gamma_t`; [`certify`]
//! compares their log-log growth rates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimizer::{OptimizerState, Variant};
use crate::problems::Problem;
use crate::scalar::Scalar;
use crate::vector::Vector;

/// Per-step monitor output, describing the step taken from iterate `x_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonitorRecord<T> {
    pub t: usize,
    /// `f(x_t)`, when a problem is attached.
    pub f_x: Option<T>,
    /// `||grad f(x_t)||^2`, or `||g_t||^2` when no problem is attached (see `surrogate`).
    pub grad_norm_sq: T,
    pub surrogate: bool,
    pub term_a_inc: T,
    pub term_b_inc: T,
    pub term_c_inc: T,
    /// Largest coordinate of `|e_t - e_{t-1}|` (zero at `t = 1`).
    pub max_oscillation: T,
    pub gamma_t: T,
    /// `alpha_t / (sqrt(vhat_max) + eps)` where `vhat_max` is the largest weight
    /// reachable with gradients bounded by the declared `H`.
    pub gamma_lower_bound: Option<T>,
    pub eff_step_min: T,
    pub eff_step_max: T,
    pub eff_step_l1: T,
    pub x_norm: T,
}

/// Streaming observer bound to a single run.
#[derive(Debug, Clone)]
pub struct Monitor<T> {
    variant: Variant,
    epsilon: T,
    declared_h: Option<T>,
    records: Vec<MonitorRecord<T>>,
}

impl<T: Scalar> Monitor<T> {
    pub fn new(variant: Variant, epsilon: T, declared_h: Option<T>) -> Self {
        Self {
            variant,
            epsilon,
            declared_h,
            records: Vec::new(),
        }
    }

    /// Records the transition `prev -> next` driven by gradient `g`.
    pub fn observe(
        &mut self,
        prev: &OptimizerState<T>,
        next: &OptimizerState<T>,
        g: &Vector<T>,
        problem: Option<&dyn Problem<T>>,
    ) -> &MonitorRecord<T> {
        let record = observe(prev, next, g, problem, self.gamma_bound(next.alpha));
        self.records.push(record);
        self.records.last().expect("record just pushed")
    }

    fn gamma_bound(&self, alpha: T) -> Option<T> {
        if self.variant.is_unweighted() {
            return Some(alpha / (T::one() + self.epsilon));
        }
        self.declared_h.map(|h| alpha / (h + self.epsilon))
    }

    pub fn records(&self) -> &[MonitorRecord<T>] {
        &self.records
    }

    pub fn into_records(self) -> Vec<MonitorRecord<T>> {
        self.records
    }
}

/// Stateless form of [`Monitor::observe`].
///
/// `prev` and `next` must be consecutive states.
pub fn observe<T: Scalar>(
    prev: &OptimizerState<T>,
    next: &OptimizerState<T>,
    g: &Vector<T>,
    problem: Option<&dyn Problem<T>>,
    gamma_lower_bound: Option<T>,
) -> MonitorRecord<T> {
    debug_assert_eq!(next.t, prev.t + 1, "monitor needs consecutive states");
    let x = &prev.x;
    let (f_x, grad_norm_sq, surrogate) = match problem {
        Some(p) => (Some(p.value(x)), p.full_gradient(x).norm_sq(), false),
        None => (None, g.norm_sq(), true),
    };
    let eff = &next.eff_step;
    let term_a_inc = eff.hadamard(g).norm_sq();
    let (term_b_inc, term_c_inc, max_oscillation) = if next.t >= 2 {
        let diff = (eff - &prev.eff_step).abs();
        (diff.sum(), diff.norm_sq(), diff.max_entry())
    } else {
        (T::zero(), T::zero(), T::zero())
    };
    MonitorRecord {
        t: next.t,
        f_x,
        grad_norm_sq,
        surrogate,
        term_a_inc,
        term_b_inc,
        term_c_inc,
        max_oscillation,
        gamma_t: eff.min_entry(),
        gamma_lower_bound,
        eff_step_min: eff.min_entry(),
        eff_step_max: eff.max_entry(),
        eff_step_l1: eff.l1_norm(),
        x_norm: x.norm(),
    }
}

/// Inputs for the closed-form constants of the convergence bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryInputs<T> {
    pub h: T,
    pub l: T,
    /// Bound on `||alpha_t m_t / sqrt(vhat_t)||`.
    pub g: T,
    pub beta1: T,
    pub d: usize,
    /// Lower bound on `min_j sqrt(vhat_1)_j`; enables the rate constants.
    pub c: Option<T>,
    pub f_star: Option<T>,
    pub rate_form: Option<RateForm>,
}

/// Which corollary supplies `Q1`, `Q2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateForm {
    AmsGrad,
    AdaFom,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryConstants<T> {
    pub c1: T,
    pub c2: T,
    pub c3: T,
    pub c4: Option<T>,
    pub q1: Option<T>,
    pub q2: Option<T>,
}

impl<T: Scalar> TheoryConstants<T> {
    /// `f_x1` is `f(x_1)` (which equals `f(z_1)`), `eff1_l1` is `||alpha_1 / sqrt(vhat_1)||_1`.
    pub fn evaluate(inputs: &TheoryInputs<T>, f_x1: Option<T>, eff1_l1: T) -> Self {
        let one = T::one();
        let two = T::lit(2.0);
        let TheoryInputs {
            h, l, g, beta1, d, ..
        } = *inputs;
        let kappa = beta1 / (one - beta1);
        let inv = one / (one - beta1);
        let h2 = h * h;
        let c1 = T::lit(1.5) * l + T::lit(0.5) + l * l * kappa * inv * inv;
        let c2 = h2 * kappa + two * h2;
        let c3 = (one + l * l * inv * inv * kappa) * h2 * kappa * kappa;
        let c4 = match (inputs.f_star, f_x1) {
            (Some(f_star), Some(f1)) => Some(
                kappa * (h2 + g * g) + kappa * kappa * g * g + two * h2 * eff1_l1 + (f1 - f_star),
            ),
            _ => None,
        };
        let dd = T::from_usize_lossy(d);
        let (q1, q2) = match (inputs.c, c4, inputs.rate_form) {
            (Some(c), Some(c4), Some(form)) => {
                let tail = c2 * dd / c + c3 * dd / (c * c) + c4;
                let (lead, slope) = match form {
                    RateForm::AmsGrad => (h2 / (c * c), h2 / (c * c)),
                    RateForm::AdaFom => (dd * (one - (c * c).ln() + two * h.ln()), dd),
                };
                (Some(h * (c1 * lead + tail)), Some(h * c1 * slope))
            }
            _ => (None, None),
        };
        Self {
            c1,
            c2,
            c3,
            c4,
            q1,
            q2,
        }
    }
}

/// Log-log growth rates of the cumulative series over the last half of the run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Slopes<T> {
    pub term_a: T,
    pub term_b: T,
    pub term_c: T,
    pub gamma: T,
}

impl<T: Scalar> Slopes<T> {
    /// Fastest-growing of the Term A/B/C series.
    pub fn s1(&self) -> T {
        self.term_a.max(self.term_b).max(self.term_c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport<T> {
    pub iterations: usize,
    pub term_a_cum: Vec<T>,
    pub term_b_cum: Vec<T>,
    pub term_c_cum: Vec<T>,
    pub gamma_cum: Vec<T>,
    /// Cumulative analytic lower bound on `gamma_t`, when available for every step.
    pub gamma_lower_bound_cum: Option<Vec<T>>,
    pub min_grad_sq_running: Vec<T>,
    /// `(A + B + C + C4) / sum gamma`, with `C4 = 0` unless theory constants supply it.
    pub ratio_series: Vec<T>,
    pub slopes: Slopes<T>,
    pub theory_constants: Option<TheoryConstants<T>>,
    pub grad_is_surrogate: bool,
}

impl<T: Scalar> ConvergenceReport<T> {
    fn last(series: &[T]) -> T {
        *series.last().expect("report series are non-empty")
    }

    pub fn final_term_a(&self) -> T {
        Self::last(&self.term_a_cum)
    }

    pub fn final_term_b(&self) -> T {
        Self::last(&self.term_b_cum)
    }

    pub fn final_term_c(&self) -> T {
        Self::last(&self.term_c_cum)
    }

    pub fn final_gamma(&self) -> T {
        Self::last(&self.gamma_cum)
    }

    pub fn final_min_grad_sq(&self) -> T {
        Self::last(&self.min_grad_sq_running)
    }

    pub fn final_ratio(&self) -> T {
        Self::last(&self.ratio_series)
    }
}

/// Minimum number of points in the slope-fitting window.
pub const MIN_FIT_POINTS: usize = 50;

/// Least-squares slope of `log y` against `log t` over the last half of the
/// series (at least [`MIN_FIT_POINTS`] points when available). Non-positive
/// values are skipped; fewer than two usable points give slope 0.
pub fn growth_slope<T: Scalar>(series: &[T]) -> T {
    let n = series.len();
    let start = (n / 2).min(n.saturating_sub(MIN_FIT_POINTS));
    let points: Vec<(f64, f64)> = series[start..]
        .iter()
        .enumerate()
        .filter(|(_, y)| **y > T::zero())
        .map(|(k, y)| (((start + k + 1) as f64).ln(), y.to_f64_lossy().ln()))
        .collect();
    if points.len() < 2 {
        return T::zero();
    }
    let m = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / m;
    let (sxy, sxx) = points.iter().fold((0.0, 0.0), |(sxy, sxx), &(x, y)| {
        (
            sxy + (x - mean_x) * (y - mean_y),
            sxx + (x - mean_x) * (x - mean_x),
        )
    });
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    // Flat series fit to rounding noise around zero.
    T::lit(if slope.abs() < 1e-9 { 0.0 } else { slope })
}

fn prefix_sums<T: Scalar>(values: impl Iterator<Item = T>) -> Vec<T> {
    values
        .scan(T::zero(), |acc, v| {
            *acc = *acc + v;
            Some(*acc)
        })
        .collect()
}

/// Aggregates a run's records into cumulative series, growth slopes and
/// (optionally) the theory constants.
pub fn finalize<T: Scalar>(
    records: &[MonitorRecord<T>],
    theory: Option<&TheoryInputs<T>>,
) -> Result<ConvergenceReport<T>> {
    let first = records
        .first()
        .ok_or(Error::EmptyInput("monitor records"))?;
    if first.t != 1 || records.windows(2).any(|w| w[1].t != w[0].t + 1) {
        return Err(Error::input(
            "records must cover consecutive iterations starting at t = 1",
        ));
    }

    let term_a_cum = prefix_sums(records.iter().map(|r| r.term_a_inc));
    let term_b_cum = prefix_sums(records.iter().map(|r| r.term_b_inc));
    let term_c_cum = prefix_sums(records.iter().map(|r| r.term_c_inc));
    let gamma_cum = prefix_sums(records.iter().map(|r| r.gamma_t));
    let gamma_lower_bound_cum = records
        .iter()
        .map(|r| r.gamma_lower_bound)
        .collect::<Option<Vec<T>>>()
        .map(|lb| prefix_sums(lb.into_iter()));
    let min_grad_sq_running = records
        .iter()
        .scan(T::infinity(), |best, r| {
            *best = best.min(r.grad_norm_sq);
            Some(*best)
        })
        .collect();

    let theory_constants =
        theory.map(|inputs| TheoryConstants::evaluate(inputs, first.f_x, first.eff_step_l1));
    let offset = theory_constants.and_then(|c| c.c4).unwrap_or_else(T::zero);
    let ratio_series = (0..records.len())
        .map(|k| (term_a_cum[k] + term_b_cum[k] + term_c_cum[k] + offset) / gamma_cum[k])
        .collect();

    let slopes = Slopes {
        term_a: growth_slope(&term_a_cum),
        term_b: growth_slope(&term_b_cum),
        term_c: growth_slope(&term_c_cum),
        gamma: growth_slope(&gamma_cum),
    };

    Ok(ConvergenceReport {
        iterations: records.len(),
        term_a_cum,
        term_b_cum,
        term_c_cum,
        gamma_cum,
        gamma_lower_bound_cum,
        min_grad_sq_running,
        ratio_series,
        slopes,
        theory_constants,
        grad_is_surrogate: records.iter().any(|r| r.surrogate),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Converging,
    Suspect,
    Diverging,
}

/// Default slope margin for [`certify`].
pub const DEFAULT_THRESHOLD: f64 = 0.1;

/// Shortest run [`certify`] will classify as anything other than `Suspect`.
pub const MIN_CERTIFY_ITERATIONS: usize = 100;

/// Classifies a run from the growth rates of its cumulative series.
///
/// * `Converging`: every Term A/B/C slope is below the `sum gamma` slope by more than `threshold`.
/// * `Diverging`: the fastest Term slope reaches the `sum gamma` slope within
///   `threshold` (or exceeds it) and the Term ratio `(A + B + C) / sum gamma`
///   does not vanish over the last half: it stays positive and ends at least
///   half its mid-run value. The additive constant of `ratio_series` is left
///   out here because it decays like `1 / sum gamma` whatever the Terms do.
/// * `Suspect` otherwise, and for runs shorter than [`MIN_CERTIFY_ITERATIONS`].
pub fn certify<T: Scalar>(report: &ConvergenceReport<T>, threshold: T) -> Verdict {
    if report.iterations < MIN_CERTIFY_ITERATIONS {
        return Verdict::Suspect;
    }
    let s1 = report.slopes.s1();
    let s2 = report.slopes.gamma;
    if s1 < s2 - threshold {
        return Verdict::Converging;
    }
    let term_ratio = |k: usize| {
        (report.term_a_cum[k] + report.term_b_cum[k] + report.term_c_cum[k]) / report.gamma_cum[k]
    };
    let n = report.iterations;
    let half = n / 2;
    let positive = (half..n).all(|k| term_ratio(k) > T::zero());
    if positive && term_ratio(n - 1) >= T::lit(0.5) * term_ratio(half) {
        Verdict::Diverging
    } else {
        Verdict::Suspect
    }
}
