use adamtype::harness::shipped_problems;
use adamtype::problems::{FiniteSum, Problem, TermBCounterexample};
use adamtype::verification::suites::{
    gradient_bound_check, lipschitz_check, seq_adagrad_suite, seq_exp_suite,
};
use adamtype::verification::{
    check_seq_adagrad, check_seq_exp, check_z_identity, fit_rate, RunTrace,
};
use adamtype::{
    Beta1Schedule, Beta2Schedule, OptimizerConfig, SplitMix64, StepSchedule, Variant, Vector,
};
use proptest::prelude::*;

/// `sum_i b_i^2` with the summation order swapped:
/// `b_i = sum_{l=2}^{i} a_l sum_{k=1}^{l-1} beta^(i-k)`.
fn swapped_order_lhs(a: &[f64], beta: f64) -> f64 {
    (1..=a.len())
        .map(|i| {
            let b: f64 = (2..=i)
                .map(|l| a[l - 1] * (1..l).map(|k| beta.powi((i - k) as i32)).sum::<f64>())
                .sum();
            b * b
        })
        .sum()
}

proptest! {
    #[test]
    fn seq_exp_holds_and_matches_swapped_sum(
        a in prop::collection::vec(0.0f64..100.0, 1..40),
        beta in 0.0f64..0.999,
    ) {
        let c = check_seq_exp(&a, beta).unwrap();
        prop_assert!(c.holds, "{c:?}");
        let oracle = swapped_order_lhs(&a, beta);
        prop_assert!((c.lhs - oracle).abs() <= 1e-9 * oracle.max(1e-300));
    }

    #[test]
    fn seq_adagrad_holds(first in 1e-6f64..100.0, rest in prop::collection::vec(0.0f64..100.0, 0..80)) {
        let mut a = vec![first];
        a.extend(rest);
        let c = check_seq_adagrad(&a).unwrap();
        prop_assert!(c.holds, "{c:?}");
    }

    #[test]
    fn z_identity_on_random_streams(
        raw in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 2), 1..100),
        beta1 in 0.0f64..0.99,
        variant_idx in 0usize..7,
    ) {
        let variant = Variant::ALL[variant_idx];
        let mut cfg = OptimizerConfig::new(variant, 2, 0.0)
            .with_alpha(StepSchedule::inverse_sqrt(0.1))
            .with_beta1(Beta1Schedule::constant(beta1))
            .with_epsilon(1e-8);
        if variant.uses_beta2() {
            cfg = cfg.with_beta2(Beta2Schedule::constant(0.9));
        }
        let mut k = 0;
        let trace = RunTrace::record(cfg, Vector::zeros(2), raw.len(), |_| {
            k += 1;
            Vector::new(raw[k - 1].clone()).unwrap()
        })
        .unwrap();
        prop_assert!(check_z_identity(&trace).unwrap().holds(1e-10));
    }
}

#[test]
fn constant_momentum_drops_schedule_difference_term() {
    let cfg = OptimizerConfig::new(Variant::AmsGrad, 1, 0.0)
        .with_alpha(StepSchedule::inverse_sqrt(0.01))
        .with_beta1(Beta1Schedule::constant(0.9))
        .with_beta2(Beta2Schedule::constant(0.9));
    let trace = RunTrace::record(cfg, Vector::new(vec![5.0]).unwrap(), 100, |x| {
        x.scale(200.0)
    })
    .unwrap();
    let z = check_z_identity(&trace).unwrap();
    assert!(z.holds(1e-10), "{}", z.max_rel_residual);
}

#[test]
fn randomized_sequence_suites_hold() {
    assert!(seq_exp_suite(1000, 11).unwrap().holds);
    assert!(seq_adagrad_suite(1000, 11).unwrap().holds);
}

#[test]
fn declared_constants_hold_on_shipped_problems() {
    for p in shipped_problems() {
        let h = gradient_bound_check(p.as_ref(), 200_000, 5).unwrap();
        assert!(h.holds, "{h:?}");
        let l = lipschitz_check(p.as_ref(), 10_000, 5).unwrap();
        assert!(l.holds, "{l:?}");
    }
}

#[test]
fn term_b_component_gradients_respect_bound() {
    let p = TermBCounterexample;
    let mut rng = SplitMix64::new(3);
    for _ in 0..10_000 {
        let x = p.region().sample(&mut rng);
        let n = FiniteSum::<f64>::num_components(&p) as f64;
        for i in 0..11 {
            let gi = FiniteSum::<f64>::component_gradient(&p, i, &x)[0];
            assert!((n * gi).abs() <= 121.0);
        }
    }
}

#[test]
fn envelope_over_faster_than_bound_decay() {
    let pts: Vec<(f64, f64)> = (0..31)
        .map(|k| {
            let t = 10f64.powf(2.0 + k as f64 / 10.0);
            (t, 7.0 / t + 0.01 / t.sqrt())
        })
        .collect();
    let fit = fit_rate(&pts).unwrap();
    assert!(fit.dominates(&pts));
    assert!(pts.iter().all(|&(t, y)| fit.envelope(t) >= y));
}
