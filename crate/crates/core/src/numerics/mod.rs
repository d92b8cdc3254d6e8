//! Numerical building blocks shared by the potential-theory modules.

pub mod monotone;
pub mod quad;
pub mod special;
pub mod talbot;

pub use monotone::{check_complete_monotonicity, MonotoneMode, MonotonicityReport};
pub use quad::{Integrator, QuadResult};
pub use talbot::{gaver_stehfest, talbot, InversionMode, Inverter};

/// `n` log-spaced points from `a` to `b` inclusive.
pub fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(a > 0.0 && b >= a, "log_grid needs 0 < a <= b");
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let (la, lb) = (a.ln(), b.ln());
            let step = (lb - la) / (n - 1) as f64;
            (0..n)
                .map(|i| {
                    if i == 0 {
                        a
                    } else if i == n - 1 {
                        b
                    } else {
                        (la + step * i as f64).exp()
                    }
                })
                .collect()
        }
    }
}

/// Grid with twice the resolution of `log_grid(a, b, n)` that contains its points.
pub fn refine_log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    log_grid(a, b, 2 * n - 1)
}

/// Smallest and largest value of a nonempty slice.
pub fn min_max(values: &[f64]) -> (f64, f64) {
    values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        })
}

/// Pairwise summation, deterministic for a given ordering.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 16 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}
