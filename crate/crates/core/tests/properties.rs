use proptest::prelude::*;

use sbm_core::ladder::{sandwich_bounds, LadderObjects};
use sbm_core::montecarlo::{mean_exit_times, path_rng, Domain, PathConfig, SubordinatorSampler};
use sbm_core::Cbf;

fn any_phi() -> impl Strategy<Value = Cbf> {
    let a = 0.2f64..1.8;
    prop_oneof![
        a.clone().prop_map(|a| Cbf::stable(a).unwrap()),
        (a.clone(), 0.1f64..5.0).prop_map(|(a, m)| Cbf::relativistic(a, m).unwrap()),
        (a.clone(), 0.0f64..1.0).prop_map(|(a, f)| Cbf::sum_of_stables(a, f * a).unwrap()),
        (a.clone(), 0.01f64..0.99).prop_map(|(a, f)| Cbf::log_up(a, f * (2.0 - a)).unwrap()),
        (a.clone(), 0.0f64..1.0).prop_map(|(a, f)| Cbf::log_down(a, f * a).unwrap()),
        a.prop_map(|a| Cbf::stable(a).unwrap().killed(0.5).unwrap()),
    ]
}

fn lambda() -> impl Strategy<Value = f64> {
    (-4.0f64..6.0).prop_map(|e| 10f64.powf(e))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scaling_is_subadditive(phi in any_phi(), l in lambda(), c in 1.0f64..50.0) {
        let lhs = phi.eval(c * l).unwrap();
        let rhs = c * phi.eval(l).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12), "{lhs} > {rhs}");
    }

    #[test]
    fn increasing_and_concave(phi in any_phi(), l in lambda(), h in 0.01f64..1.0) {
        let (a, b) = (l, l * (1.0 + h));
        let (fa, fm, fb) = (
            phi.eval(a).unwrap(),
            phi.eval(0.5 * (a + b)).unwrap(),
            phi.eval(b).unwrap(),
        );
        prop_assert!(fa <= fb);
        prop_assert!(fm >= 0.5 * (fa + fb) * (1.0 - 1e-12));
    }

    #[test]
    fn conjugate_is_an_involution(phi in any_phi(), l in lambda()) {
        let back = phi.conjugate().unwrap().conjugate().unwrap();
        let (x, y) = (phi.eval(l).unwrap(), back.eval(l).unwrap());
        prop_assert!((x - y).abs() <= 1e-12 * x);
    }

    #[test]
    fn conjugate_product_is_lambda(phi in any_phi(), l in lambda()) {
        let c = phi.conjugate().unwrap();
        let p = phi.eval(l).unwrap() * c.eval(l).unwrap();
        prop_assert!((p / l - 1.0).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip(phi in any_phi()) {
        prop_assert_eq!(Cbf::from_json(&phi.to_json()).unwrap(), phi);
    }

    #[test]
    fn levy_tail_decreases(phi in any_phi(), e in -4.0f64..0.0) {
        let t = 10f64.powf(e);
        prop_assert!(phi.levy_tail(2.0 * t).unwrap() <= phi.levy_tail(t).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn chi_inside_sandwich(phi in any_phi(), l in lambda()) {
        let ladder = LadderObjects::new(phi.clone());
        let ratio = ladder.chi(l).unwrap() / phi.eval(l * l).unwrap().sqrt();
        let (lo, hi) = sandwich_bounds();
        prop_assert!(ratio >= lo - 1e-9 && ratio <= hi + 1e-9, "{ratio}");
    }

    #[test]
    fn chi_is_increasing(phi in any_phi(), l in lambda()) {
        let ladder = LadderObjects::new(phi);
        prop_assert!(ladder.chi(l).unwrap() <= ladder.chi(1.5 * l).unwrap());
    }

    #[test]
    fn path_streams_are_reproducible(seed in any::<u64>(), i in 0u64..1000) {
        use rand::Rng;
        let a: u64 = path_rng(seed, i).random();
        let b: u64 = path_rng(seed, i).random();
        let c: u64 = path_rng(seed, i + 1).random();
        prop_assert_eq!(a, b);
        prop_assert_ne!(a, c);
    }
}

#[test]
fn monte_carlo_is_deterministic() {
    let phi = Cbf::relativistic(1.0, 1.0).unwrap();
    let cfg = PathConfig::for_radius(&phi, 1.0, 300, 11).unwrap();
    let s = SubordinatorSampler::new(&phi, cfg.epsilon).unwrap();
    let dom = Domain::ball(&[0.0, 0.0], 1.0);
    let starts = [[0.0; 3], [0.3, 0.2, 0.0]];
    let a = mean_exit_times(&s, 2, &dom, &starts, &cfg).unwrap();
    let b = mean_exit_times(&s, 2, &dom, &starts, &cfg).unwrap();
    assert_eq!(a, b);
    let other = PathConfig { seed: 12, ..cfg };
    assert_ne!(a, mean_exit_times(&s, 2, &dom, &starts, &other).unwrap());
}

#[test]
fn truncation_refinement_is_consistent() {
    // Mean exit time changes by less than the Monte Carlo noise when ε shrinks.
    let phi = Cbf::stable(1.0).unwrap();
    let dom = Domain::Interval { lo: -1.0, hi: 1.0 };
    let mut means = Vec::new();
    for eps in [1e-2, 1e-3] {
        let cfg = PathConfig {
            epsilon: eps,
            ..PathConfig::for_radius(&phi, 1.0, 20_000, 5).unwrap()
        };
        let s = SubordinatorSampler::truncated(&phi, eps).unwrap();
        means.push(mean_exit_times(&s, 1, &dom, &[[0.0; 3]], &cfg).unwrap()[0].0);
    }
    let se = (means[0].std_error.powi(2) + means[1].std_error.powi(2)).sqrt();
    assert!(
        (means[0].mean - means[1].mean).abs() < 4.0 * se,
        "{means:?}"
    );
    assert!(
        (means[1].mean - 1.0).abs() < 4.0 * means[1].std_error,
        "{means:?}"
    );
}
