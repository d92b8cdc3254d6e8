//! Stable-process closed forms, computed independently of the library.

use std::f64::consts::PI;

use approx::assert_relative_eq;
use sbm_core::densities::DensityEvaluator;
use sbm_core::kernels::KernelEvaluator;
use sbm_core::ladder::LadderObjects;
use sbm_core::Cbf;
use statrs::function::gamma::gamma;

fn riesz_green(d: f64, alpha: f64, r: f64) -> f64 {
    gamma((d - alpha) / 2.0) / (2f64.powf(alpha) * PI.powf(d / 2.0) * gamma(alpha / 2.0))
        * r.powf(alpha - d)
}

fn stable_jump(d: f64, alpha: f64, r: f64) -> f64 {
    alpha * 2f64.powf(alpha - 1.0) * gamma((d + alpha) / 2.0)
        / (PI.powf(d / 2.0) * gamma(1.0 - alpha / 2.0))
        * r.powf(-d - alpha)
}

#[test]
fn green_and_jump_match_stable_kernels() {
    for alpha in [0.5, 1.0, 1.5] {
        let phi = Cbf::stable(alpha).unwrap();
        let ev = KernelEvaluator::new(phi, 3);
        for r in [0.01, 0.1, 1.0] {
            assert_relative_eq!(
                ev.green(r).unwrap(),
                riesz_green(3.0, alpha, r),
                max_relative = 1e-3
            );
            assert_relative_eq!(
                ev.jump(r).unwrap(),
                stable_jump(3.0, alpha, r),
                max_relative = 1e-3
            );
        }
    }
}

#[test]
fn one_dimensional_jump_kernel() {
    let ev = KernelEvaluator::new(Cbf::stable(1.0).unwrap(), 1);
    for r in [0.5, 1.0, 2.0] {
        assert_relative_eq!(ev.jump(r).unwrap(), 1.0 / (PI * r * r), max_relative = 1e-3);
    }
}

#[test]
fn potential_density_is_a_power() {
    for alpha in [0.5, 1.0, 1.5] {
        let ev = DensityEvaluator::new(Cbf::stable(alpha).unwrap());
        for t in [1e-3f64, 0.1, 1.0, 5.0] {
            let exact = t.powf(alpha / 2.0 - 1.0) / gamma(alpha / 2.0);
            assert_relative_eq!(ev.u(t).unwrap(), exact, max_relative = 1e-6);
        }
    }
}

#[test]
fn levy_density_of_stable_subordinator() {
    for alpha in [0.5, 1.0, 1.5] {
        let phi = Cbf::stable(alpha).unwrap();
        let a = alpha / 2.0;
        for t in [1e-3f64, 0.3, 2.0] {
            let exact = a / gamma(1.0 - a) * t.powf(-1.0 - a);
            assert_relative_eq!(phi.levy_density(t).unwrap(), exact, max_relative = 1e-6);
        }
    }
}

#[test]
fn ladder_quantities_of_stable_exponent() {
    for alpha in [0.5, 1.0, 1.5] {
        let l = LadderObjects::new(Cbf::stable(alpha).unwrap());
        for t in [0.1f64, 1.0, 3.0] {
            let v = t.powf(alpha / 2.0 - 1.0) / gamma(alpha / 2.0);
            let big_v = t.powf(alpha / 2.0) / gamma(1.0 + alpha / 2.0);
            assert_relative_eq!(l.v(t).unwrap(), v, max_relative = 1e-6);
            assert_relative_eq!(l.renewal(t).unwrap(), big_v, max_relative = 1e-6);
        }
    }
}

#[test]
fn cauchy_halfline_green_function() {
    // α = 1: G(x, y) = (1/π) ln((√x + √y) / |√x - √y|)
    let l = LadderObjects::new(Cbf::stable(1.0).unwrap());
    for (x, y) in [(1.0, 2.0), (0.5, 3.0), (2.5, 0.2)] {
        let (a, b): (f64, f64) = (f64::sqrt(x), f64::sqrt(y));
        let exact = ((a + b) / (a - b).abs()).ln() / PI;
        assert_relative_eq!(l.halfline_green(x, y).unwrap(), exact, max_relative = 1e-4);
    }
}

#[test]
fn relativistic_reduces_to_stable_at_high_frequency() {
    let phi = Cbf::relativistic(1.0, 1.0).unwrap();
    let l = 1e8;
    assert_relative_eq!(phi.eval(l).unwrap() / l.sqrt(), 1.0, max_relative = 1e-3);
}
