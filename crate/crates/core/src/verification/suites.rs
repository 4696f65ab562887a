//! Randomized property suites producing serializable verdicts.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::optimizer::{Beta1Schedule, Beta2Schedule, OptimizerConfig, StepSchedule, Variant};
use crate::problems::{finite_difference_gradient, Problem};
use crate::rng::SplitMix64;
use crate::scalar::Scalar;
use crate::verification::{check_seq_adagrad, check_seq_exp, check_z_identity, RunTrace, SeqCheck};

/// Outcome of one named property check: `holds` iff `lhs <= rhs` up to `tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckVerdict {
    pub name: String,
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
    pub tolerance: f64,
}

impl CheckVerdict {
    fn new(name: impl Into<String>, holds: bool, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            holds,
            lhs,
            rhs,
            tolerance,
        }
    }
}

pub const Z_IDENTITY_TOLERANCE: f64 = 1e-10;
pub const FD_TOLERANCE: f64 = 1e-4;
/// Finite-difference points closer than this to a kink are skipped.
pub const KINK_MARGIN: f64 = 1e-3;
pub const MC_SIGMAS: f64 = 3.0;
/// Relative rounding slack for checks that hold exactly in real arithmetic.
pub const ROUNDING_SLACK: f64 = 1e-12;

/// Sizes of the randomized suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteSizes {
    pub seq_instances: usize,
    pub z_steps: usize,
    pub fd_points: usize,
    pub mc_points: usize,
    pub mc_draws: usize,
    pub h_draws: usize,
    pub lipschitz_pairs: usize,
}

impl Default for SuiteSizes {
    fn default() -> Self {
        Self {
            seq_instances: 1000,
            z_steps: 200,
            fd_points: 100,
            mc_points: 3,
            mc_draws: 100_000,
            h_draws: 1_000_000,
            lipschitz_pairs: 10_000,
        }
    }
}

fn worst_instance(checks: impl Iterator<Item = SeqCheck<f64>>) -> (bool, f64, f64) {
    let mut holds = true;
    let mut worst = (f64::NEG_INFINITY, 0.0, 0.0);
    for c in checks {
        holds &= c.holds;
        let gap = if c.rhs > 0.0 {
            c.lhs / c.rhs
        } else if c.lhs > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        if gap > worst.0 {
            worst = (gap, c.lhs, c.rhs);
        }
    }
    (holds, worst.1, worst.2)
}

/// `count` random instances of the geometric-weight inequality; reports the
/// instance with the largest `lhs / rhs`.
pub fn seq_exp_suite(count: usize, seed: u64) -> Result<CheckVerdict> {
    let mut rng = SplitMix64::derive(seed, 0xE4);
    let checks = (0..count)
        .map(|_| {
            let len = 1 + rng.below(50) as usize;
            let beta = rng.next_f64();
            let scale = 10f64.powf(rng.uniform(-3.0, 3.0));
            let a: Vec<f64> = (0..len)
                .map(|_| {
                    if rng.below(8) == 0 {
                        0.0
                    } else {
                        scale * rng.next_f64()
                    }
                })
                .collect();
            check_seq_exp(&a, beta)
        })
        .collect::<Result<Vec<_>>>()?;
    let (holds, lhs, rhs) = worst_instance(checks.into_iter());
    Ok(CheckVerdict::new(
        "seq_exp",
        holds,
        lhs,
        rhs,
        super::SEQ_TOLERANCE,
    ))
}

/// `count` random sequences for the logarithmic prefix-sum inequality.
pub fn seq_adagrad_suite(count: usize, seed: u64) -> Result<CheckVerdict> {
    let mut rng = SplitMix64::derive(seed, 0xADA);
    let checks = (0..count)
        .map(|_| {
            let len = 1 + rng.below(100) as usize;
            let scale = 10f64.powf(rng.uniform(-4.0, 4.0));
            let a: Vec<f64> = (0..len)
                .map(|i| {
                    if i > 0 && rng.below(8) == 0 {
                        0.0
                    } else {
                        scale * (rng.next_f64() + f64::MIN_POSITIVE)
                    }
                })
                .collect();
            check_seq_adagrad(&a)
        })
        .collect::<Result<Vec<_>>>()?;
    let (holds, lhs, rhs) = worst_instance(checks.into_iter());
    Ok(CheckVerdict::new(
        "seq_adagrad",
        holds,
        lhs,
        rhs,
        super::SEQ_TOLERANCE,
    ))
}

/// The three momentum schedules exercised by the z-identity suite.
pub fn z_identity_beta1_schedules<T: Scalar>() -> Vec<(&'static str, Beta1Schedule<T>)> {
    vec![
        ("beta1_0", Beta1Schedule::zero()),
        ("beta1_0.9", Beta1Schedule::constant(T::lit(0.9))),
        (
            "beta1_geometric_0.9_to_0.5",
            Beta1Schedule::geometric(T::lit(0.9), T::lit(0.98), T::lit(0.5)),
        ),
    ]
}

/// z-identity over every variant and momentum schedule on each problem, with
/// `alpha_t = 0.01 / sqrt(t)`, `beta2 = 0.99`, `eps = 0`.
pub fn z_identity_suite(
    problems: &[&dyn Problem<f64>],
    steps: usize,
    seed: u64,
) -> Result<Vec<CheckVerdict>> {
    let mut verdicts = Vec::new();
    for (p_idx, problem) in problems.iter().enumerate() {
        for variant in Variant::ALL {
            for (label, beta1) in z_identity_beta1_schedules() {
                let mut config = OptimizerConfig::new(variant, problem.dim(), 0.0)
                    .with_alpha(StepSchedule::inverse_sqrt(0.01))
                    .with_beta1(beta1);
                if variant.uses_beta2() {
                    config = config.with_beta2(Beta2Schedule::constant(0.99));
                }
                let mut rng = SplitMix64::derive(seed, p_idx as u64);
                let trace = RunTrace::record(config, problem.default_start(), steps, |x| {
                    problem.stochastic_gradient(x, &mut rng)
                })?;
                let z = check_z_identity(&trace)?;
                verdicts.push(CheckVerdict::new(
                    format!("z_identity/{}/{}/{}", problem.name(), variant, label),
                    z.holds(Z_IDENTITY_TOLERANCE),
                    z.max_rel_residual,
                    0.0,
                    Z_IDENTITY_TOLERANCE,
                ));
            }
        }
    }
    Ok(verdicts)
}

/// Central-difference agreement at `points` samples of the declared region,
/// skipping samples near a kink. `lhs` is the largest relative error.
pub fn finite_difference_check(
    problem: &dyn Problem<f64>,
    points: usize,
    seed: u64,
) -> CheckVerdict {
    let mut rng = SplitMix64::derive(seed, 0xFD);
    let region = problem.region();
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    while checked < points {
        let x = region.sample(&mut rng);
        if problem.kink_distance(&x).is_some_and(|d| d < KINK_MARGIN) {
            continue;
        }
        let h = 1e-6 * (1.0 + x.norm());
        let fd = finite_difference_gradient(problem, &x, h);
        let g = problem.full_gradient(&x);
        let err = (&fd - &g).norm() / g.norm().max(1e-8);
        worst = worst.max(err);
        checked += 1;
    }
    CheckVerdict::new(
        format!("finite_difference/{}", problem.name()),
        worst <= FD_TOLERANCE,
        worst,
        FD_TOLERANCE,
        0.0,
    )
}

/// Sample mean of `draws` stochastic gradients against the full gradient at
/// `points` region samples. `lhs` is the largest coordinate deviation in units
/// of its standard error; deterministic oracles must match to rounding.
pub fn monte_carlo_check(
    problem: &dyn Problem<f64>,
    points: usize,
    draws: usize,
    seed: u64,
) -> CheckVerdict {
    let mut rng = SplitMix64::derive(seed, 0x3C);
    let region = problem.region();
    let d = problem.dim();
    let mut worst: f64 = 0.0;
    for _ in 0..points {
        let x = region.sample(&mut rng);
        let g = problem.full_gradient(&x);
        let mut sum = vec![0.0; d];
        let mut sum_sq = vec![0.0; d];
        for _ in 0..draws {
            let s = problem.stochastic_gradient(&x, &mut rng);
            for j in 0..d {
                sum[j] += s[j];
                sum_sq[j] += s[j] * s[j];
            }
        }
        let n = draws as f64;
        for j in 0..d {
            let mean = sum[j] / n;
            let var = (sum_sq[j] / n - mean * mean).max(0.0) * n / (n - 1.0).max(1.0);
            let se = (var / n).sqrt();
            let floor = ROUNDING_SLACK * (1.0 + g[j].abs());
            let dev = (mean - g[j]).abs();
            let score = if se > floor {
                dev / se
            } else if dev <= floor {
                0.0
            } else {
                f64::INFINITY
            };
            worst = worst.max(score);
        }
    }
    CheckVerdict::new(
        format!("monte_carlo/{}", problem.name()),
        worst <= MC_SIGMAS,
        worst,
        MC_SIGMAS,
        0.0,
    )
}

/// `||g|| <= H` and `||grad f|| <= H` over `draws` points of the declared region.
pub fn gradient_bound_check(
    problem: &dyn Problem<f64>,
    draws: usize,
    seed: u64,
) -> Option<CheckVerdict> {
    let h = problem.constants().h?;
    let mut rng = SplitMix64::derive(seed, 0xB0);
    let region = problem.region();
    let mut worst: f64 = 0.0;
    for _ in 0..draws {
        let x = region.sample(&mut rng);
        let s = problem.stochastic_gradient(&x, &mut rng).norm();
        worst = worst.max(s).max(problem.full_gradient(&x).norm());
    }
    Some(CheckVerdict::new(
        format!("gradient_bound/{}", problem.name()),
        worst <= h * (1.0 + ROUNDING_SLACK),
        worst,
        h,
        ROUNDING_SLACK,
    ))
}

/// `||grad f(x) - grad f(y)|| <= L ||x - y||` over `pairs` region samples;
/// `lhs` is the largest observed difference quotient.
pub fn lipschitz_check(
    problem: &dyn Problem<f64>,
    pairs: usize,
    seed: u64,
) -> Option<CheckVerdict> {
    let l = problem.constants().l?;
    let mut rng = SplitMix64::derive(seed, 0x11);
    let region = problem.region();
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let x = region.sample(&mut rng);
        let y = region.sample(&mut rng);
        let dist = (&x - &y).norm();
        if dist == 0.0 {
            continue;
        }
        let diff = (&problem.full_gradient(&x) - &problem.full_gradient(&y)).norm();
        worst = worst.max(diff / dist);
    }
    Some(CheckVerdict::new(
        format!("lipschitz/{}", problem.name()),
        worst <= l * (1.0 + ROUNDING_SLACK),
        worst,
        l,
        ROUNDING_SLACK,
    ))
}

/// Both sequence inequalities plus the z-identity sweep.
pub fn lemma_suite(
    problems: &[&dyn Problem<f64>],
    sizes: &SuiteSizes,
    seed: u64,
) -> Result<Vec<CheckVerdict>> {
    let mut verdicts = vec![
        seq_exp_suite(sizes.seq_instances, seed)?,
        seq_adagrad_suite(sizes.seq_instances, seed)?,
    ];
    verdicts.extend(z_identity_suite(problems, sizes.z_steps, seed)?);
    Ok(verdicts)
}

/// Finite-difference, unbiasedness, gradient-bound and Lipschitz checks for each problem.
pub fn gradient_suite(
    problems: &[&dyn Problem<f64>],
    sizes: &SuiteSizes,
    seed: u64,
) -> Vec<CheckVerdict> {
    let mut verdicts = Vec::new();
    for problem in problems {
        verdicts.push(finite_difference_check(*problem, sizes.fd_points, seed));
        verdicts.push(monte_carlo_check(
            *problem,
            sizes.mc_points,
            sizes.mc_draws,
            seed,
        ));
        verdicts.extend(gradient_bound_check(*problem, sizes.h_draws, seed));
        verdicts.extend(lipschitz_check(*problem, sizes.lipschitz_pairs, seed));
    }
    verdicts
}
