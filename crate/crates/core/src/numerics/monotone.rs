//! Numerical certification of complete monotonicity by divided differences.

use serde::Serialize;

use crate::error::{Error, Result};

/// Which sign pattern to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonotoneMode {
    /// `(-1)^k f^(k) >= 0` for `k = 0..=order`.
    CompletelyMonotone,
    /// `f >= 0` and `f'` completely monotone up to `order`.
    Bernstein,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub pass: bool,
    /// Some grid points could not be certified because of cancellation.
    pub inconclusive: bool,
    pub checked: usize,
    pub skipped: usize,
    /// First `(lambda, order)` at which the sign pattern was violated.
    pub first_failure: Option<(f64, usize)>,
}

const REL_STEP: f64 = 1e-2;

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Centred k-th difference (undivided) and the largest |f| on the stencil.
fn centred_difference<F: Fn(f64) -> f64>(f: &F, x: f64, h: f64, k: usize) -> (f64, f64) {
    let mut diff = 0.0;
    let mut scale: f64 = 0.0;
    for j in 0..=k {
        let xj = x + (k as f64 / 2.0 - j as f64) * h;
        let fj = f(xj);
        scale = scale.max(fj.abs());
        let c = binomial(k, j);
        diff += if j % 2 == 0 { c * fj } else { -c * fj };
    }
    (diff, scale)
}

/// Check the sign alternation of derivatives of `f` up to `order` on `grid`.
///
/// Derivatives are estimated by centred differences with relative step
/// `1e-2` and one Richardson step. A point whose undivided difference sits
/// below `1e3·ε·|f|` is skipped and marks the report inconclusive.
pub fn check_complete_monotonicity<F>(
    f: F,
    order: usize,
    grid: &[f64],
    mode: MonotoneMode,
) -> Result<MonotonicityReport>
where
    F: Fn(f64) -> f64,
{
    if order == 0 || order > 4 {
        return Err(Error::Domain {
            what: "monotonicity check",
            name: "order",
            value: order as f64,
        });
    }
    let mut report = MonotonicityReport {
        pass: true,
        inconclusive: false,
        checked: 0,
        skipped: 0,
        first_failure: None,
    };
    for &x in grid {
        if !(x > 0.0) {
            return Err(Error::Domain {
                what: "monotonicity check",
                name: "grid point",
                value: x,
            });
        }
        let fx = f(x);
        if fx < 0.0 {
            report.pass = false;
            report.first_failure.get_or_insert((x, 0));
            continue;
        }
        for k in 1..=order {
            let h = REL_STEP * x;
            let (d1, scale) = centred_difference(&f, x, h, k);
            let (d2, _) = centred_difference(&f, x, h / 2.0, k);
            if d2.abs() < 1e3 * f64::EPSILON * scale {
                report.skipped += 1;
                report.inconclusive = true;
                continue;
            }
            let est1 = d1 / h.powi(k as i32);
            let est2 = d2 / (h / 2.0).powi(k as i32);
            let deriv = (4.0 * est2 - est1) / 3.0;
            let sign_ok = match mode {
                MonotoneMode::CompletelyMonotone => {
                    if k % 2 == 0 {
                        deriv >= 0.0
                    } else {
                        deriv <= 0.0
                    }
                }
                MonotoneMode::Bernstein => {
                    if k % 2 == 1 {
                        deriv >= 0.0
                    } else {
                        deriv <= 0.0
                    }
                }
            };
            report.checked += 1;
            if !sign_ok {
                report.pass = false;
                report.first_failure.get_or_insert((x, k));
            }
        }
    }
    Ok(report)
}
