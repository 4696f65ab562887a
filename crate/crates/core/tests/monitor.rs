use adamtype::monitor::{finalize, Monitor};
use adamtype::problems::{Problem, SyntheticFiniteSum};
use adamtype::{
    init, step_in_place, Beta1Schedule, Beta2Schedule, OptimizerConfig, SplitMix64, StepSchedule,
    Variant, Vector,
};
use proptest::prelude::*;

/// Runs `iters` steps on the synthetic finite sum, recording the monitor stream.
fn monitored(
    variant: Variant,
    alpha: StepSchedule<f64>,
    beta1: f64,
    iters: usize,
    seed: u64,
) -> (Monitor<f64>, Vec<f64>) {
    let problem = SyntheticFiniteSum::<f64>::new(16, 3, seed).unwrap();
    let mut cfg = OptimizerConfig::new(variant, 3, 0.0)
        .with_alpha(alpha)
        .with_beta1(Beta1Schedule::constant(beta1));
    if variant.uses_beta2() {
        cfg = cfg.with_beta2(Beta2Schedule::constant(0.99));
    }
    let mut state = init(&cfg, problem.default_start()).unwrap();
    let mut monitor = Monitor::new(variant, 0.0, problem.constants().h);
    let mut rng = SplitMix64::new(seed);
    let mut grad_norms = Vec::new();
    for _ in 0..iters {
        let g = problem.stochastic_gradient(&state.x, &mut rng);
        let prev = state.clone();
        step_in_place(&mut state, &g, &cfg).unwrap();
        grad_norms.push(g.norm());
        monitor.observe(&prev, &state, &g, Some(&problem));
    }
    (monitor, grad_norms)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn record_invariants(seed in 0u64..1000, variant_idx in 0usize..7, beta1 in 0.0f64..0.95) {
        let variant = Variant::ALL[variant_idx];
        let (monitor, _) = monitored(variant, StepSchedule::inverse_sqrt(0.1), beta1, 300, seed);
        for r in monitor.records() {
            prop_assert!(r.term_a_inc >= 0.0 && r.term_b_inc >= 0.0 && r.term_c_inc >= 0.0);
            prop_assert!(r.term_c_inc <= r.term_b_inc * r.max_oscillation * (1.0 + 1e-12));
            prop_assert!(r.gamma_t > 0.0 && r.gamma_t <= r.eff_step_max);
            prop_assert!(!r.surrogate);
        }
        let report = finalize(monitor.records(), None).unwrap();
        for series in [&report.term_a_cum, &report.term_b_cum, &report.term_c_cum, &report.gamma_cum] {
            prop_assert!(series.windows(2).all(|w| w[1] >= w[0]));
        }
        prop_assert!(report.min_grad_sq_running.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn amsgrad_effective_step_lower_bound(seed in 0u64..1000) {
        let (monitor, norms) = monitored(Variant::AmsGrad, StepSchedule::inverse_sqrt(1.0), 0.9, 500, seed);
        let h = norms.iter().cloned().fold(0.0, f64::max);
        for r in monitor.records() {
            prop_assert!(r.gamma_t >= 1.0 / (h * (r.t as f64).sqrt()) * (1.0 - 1e-12));
        }
    }
}

#[test]
fn cumulative_term_c_dominated_by_oscillation_times_term_b() {
    let (monitor, _) = monitored(Variant::Adam, StepSchedule::constant(0.01), 0.9, 2000, 4);
    let records = monitor.records();
    let report = finalize(records, None).unwrap();
    let max_osc = records
        .iter()
        .map(|r| r.max_oscillation)
        .fold(0.0, f64::max);
    assert!(report.final_term_c() <= max_osc * report.final_term_b() * (1.0 + 1e-12));
}

#[test]
fn declared_gamma_bound_is_reported() {
    let (monitor, _) = monitored(
        Variant::AmsGrad,
        StepSchedule::inverse_sqrt(1.0),
        0.0,
        10,
        1,
    );
    let h = SyntheticFiniteSum::<f64>::new(16, 3, 1)
        .unwrap()
        .constants()
        .h
        .unwrap();
    for r in monitor.records() {
        let lb = r.gamma_lower_bound.unwrap();
        assert!((lb - 1.0 / (h * (r.t as f64).sqrt())).abs() <= 1e-15 * lb.max(1.0));
    }
}

/// `f(x) = 0.5 ||x||^2`, deterministic.
struct Bowl;

impl Problem<f64> for Bowl {
    fn name(&self) -> &str {
        "bowl"
    }
    fn dim(&self) -> usize {
        2
    }
    fn value(&self, x: &Vector<f64>) -> f64 {
        0.5 * x.norm_sq()
    }
    fn full_gradient(&self, x: &Vector<f64>) -> Vector<f64> {
        x.clone()
    }
    fn stochastic_gradient(&self, x: &Vector<f64>, _: &mut SplitMix64) -> Vector<f64> {
        x.clone()
    }
    fn constants(&self) -> adamtype::ProblemConstants<f64> {
        Default::default()
    }
    fn region(&self) -> adamtype::Region<f64> {
        adamtype::Region::symmetric(2, 1.0)
    }
    fn default_start(&self) -> Vector<f64> {
        Vector::new(vec![1.0, -0.5]).unwrap()
    }
}

#[test]
fn convergent_sgd_ratio_vanishes() {
    let cfg =
        OptimizerConfig::new(Variant::Sgd, 2, 0.0).with_alpha(StepSchedule::inverse_sqrt(0.5));
    let mut state = init(&cfg, Bowl.default_start()).unwrap();
    let mut monitor = Monitor::new(Variant::Sgd, 0.0, None);
    let mut rng = SplitMix64::new(0);
    for _ in 0..10_000 {
        let g = Bowl.stochastic_gradient(&state.x, &mut rng);
        let prev = state.clone();
        step_in_place(&mut state, &g, &cfg).unwrap();
        monitor.observe(&prev, &state, &g, Some(&Bowl));
    }
    let report = finalize(monitor.records(), None).unwrap();
    assert!(report.final_ratio() < report.ratio_series[0] / 10.0);
}

#[test]
fn surrogate_flag_without_problem() {
    let cfg = OptimizerConfig::new(Variant::Sgd, 1, 0.1);
    let s0 = init(&cfg, Vector::new(vec![1.0]).unwrap()).unwrap();
    let g = Vector::new(vec![3.0]).unwrap();
    let mut s1 = s0.clone();
    step_in_place(&mut s1, &g, &cfg).unwrap();
    let mut monitor = Monitor::new(Variant::Sgd, 0.0, None);
    let r = monitor.observe(&s0, &s1, &g, None).clone();
    assert!(r.surrogate && r.f_x.is_none());
    assert_eq!(r.grad_norm_sq, 9.0);
    assert!(finalize(monitor.records(), None).unwrap().grad_is_surrogate);
}
