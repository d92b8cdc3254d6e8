//! Numerical inversion of Laplace transforms.
//!
//! The fixed Talbot contour needs the transform off the negative real axis,
//! which is where Stieltjes functions and complete Bernstein functions are
//! analytic. Gaver–Stehfest only samples the positive real axis and serves
//! as an independent cross-check.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fixed Talbot inversion of `transform` at `t > 0` using `nodes` contour points.
pub fn talbot<F>(transform: F, t: f64, nodes: usize) -> f64
where
    F: Fn(Complex64) -> Complex64,
{
    let m = nodes as f64;
    let r = 2.0 * m / (5.0 * t);
    let mut acc = 0.5 * (transform(Complex64::new(r, 0.0)) * (r * t).exp()).re;
    for k in 1..nodes {
        let theta = k as f64 * PI / m;
        let cot = theta.cos() / theta.sin();
        let s = Complex64::new(r * theta * cot, r * theta);
        let sigma = theta + (theta * cot - 1.0) * cot;
        let term = (s * t).exp() * transform(s) * Complex64::new(1.0, sigma);
        if term.re.is_finite() {
            acc += term.re;
        }
    }
    acc * r / m
}

fn stehfest_weights(n: usize) -> Vec<f64> {
    let half = n / 2;
    let fact = |k: usize| -> f64 { (1..=k).map(|i| i as f64).product() };
    (1..=n)
        .map(|k| {
            let lo = k.div_ceil(2);
            let hi = k.min(half);
            let sum: f64 = (lo..=hi)
                .map(|j| {
                    (j as f64).powi(half as i32) * fact(2 * j)
                        / (fact(half - j) * fact(j) * fact(j - 1) * fact(k - j) * fact(2 * j - k))
                })
                .sum();
            if (k + half).is_multiple_of(2) {
                sum
            } else {
                -sum
            }
        })
        .collect()
}

/// Gaver–Stehfest inversion with `terms` (even) real samples of the transform.
pub fn gaver_stehfest<F>(transform: F, t: f64, terms: usize) -> f64
where
    F: Fn(f64) -> f64,
{
    let weights = stehfest_weights(terms);
    let a = LN_2 / t;
    weights
        .iter()
        .enumerate()
        .map(|(i, w)| w * transform(a * (i + 1) as f64))
        .sum::<f64>()
        * a
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InversionMode {
    ClosedForm,
    TalbotContour,
    GaverStehfest,
}

/// Inversion settings with a residual estimate from two node counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inverter {
    pub nodes: usize,
    pub check_nodes: usize,
    pub stehfest_terms: usize,
    pub threshold: f64,
    /// Invert `F(s - shift)` and multiply by `e^{-shift t}`. Useful when the
    /// singularities of `F` lie left of `-shift` and `f` decays like `e^{-shift t}`.
    pub shift: f64,
}

impl Default for Inverter {
    fn default() -> Self {
        Self {
            nodes: 32,
            check_nodes: 24,
            stehfest_terms: 14,
            threshold: 1e-6,
            shift: 0.0,
        }
    }
}

impl Inverter {
    /// Talbot value at `nodes` and relative residual against `check_nodes`.
    pub fn talbot_with_residual<F>(&self, transform: F, t: f64) -> (f64, f64)
    where
        F: Fn(Complex64) -> Complex64,
    {
        let c = self.shift;
        let shifted = |s: Complex64| transform(s - c);
        let damp = (-c * t).exp();
        let value = talbot(shifted, t, self.nodes) * damp;
        let check = talbot(shifted, t, self.check_nodes) * damp;
        let residual = if value == check {
            0.0
        } else {
            (value - check).abs() / value.abs().max(check.abs())
        };
        (value, residual)
    }

    pub fn talbot_checked<F>(&self, transform: F, t: f64) -> Result<f64>
    where
        F: Fn(Complex64) -> Complex64,
    {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Domain {
                what: "Laplace inversion",
                name: "t",
                value: t,
            });
        }
        let (value, residual) = self.talbot_with_residual(transform, t);
        if !value.is_finite() || !(residual <= self.threshold) {
            return Err(Error::InversionAccuracy {
                t,
                residual,
                threshold: self.threshold,
            });
        }
        Ok(value)
    }

    pub fn with_shift(self, shift: f64) -> Self {
        Self { shift, ..self }
    }

    pub fn stehfest<F>(&self, transform: F, t: f64) -> f64
    where
        F: Fn(f64) -> f64,
    {
        gaver_stehfest(transform, t, self.stehfest_terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn talbot_inverts_exponential_shift() {
        // L[e^{-2t}] = 1/(s+2)
        for &t in &[0.1, 1.0, 3.0] {
            let f = talbot(|s| 1.0 / (s + 2.0), t, 32);
            assert!((f - (-2.0 * t).exp()).abs() < 1e-10, "t={t} f={f}");
        }
    }

    #[test]
    fn talbot_inverts_branch_point_at_origin() {
        // L[t^{-1/2}/Γ(1/2)] = s^{-1/2}
        let pi_sqrt = PI.sqrt();
        for &t in &[1e-6, 1e-2, 1.0, 1e3] {
            let f = talbot(|s| 1.0 / s.sqrt(), t, 32);
            let exact = 1.0 / (pi_sqrt * t.sqrt());
            assert!(((f - exact) / exact).abs() < 1e-9, "t={t}");
        }
    }

    #[test]
    fn shift_handles_exponential_decay() {
        // L[e^{-3t} t^{-1/2}/Γ(1/2)] = (s+3)^{-1/2}
        let inv = Inverter::default().with_shift(3.0);
        let t = 8.0;
        let f = inv.talbot_checked(|s| 1.0 / (s + 3.0).sqrt(), t).unwrap();
        let exact = (-3.0 * t).exp() / (PI * t).sqrt();
        assert!(((f - exact) / exact).abs() < 1e-9);
    }

    #[test]
    fn stehfest_cross_check() {
        let f = gaver_stehfest(|s| 1.0 / (s + 1.0), 1.0, 14);
        assert!((f - (-1.0f64).exp()).abs() < 1e-4);
    }

    #[test]
    fn stehfest_weights_sum_to_zero() {
        let w = stehfest_weights(14);
        let s: f64 = w.iter().sum();
        assert!(s.abs() < 1e-6 * w.iter().map(|x| x.abs()).fold(0.0, f64::max));
    }

    #[test]
    fn residual_flags_bad_transform() {
        let inv = Inverter::default();
        // discontinuous in s: not a Laplace transform of anything smooth
        let err = inv
            .talbot_checked(|s| if s.im > 0.0 { s } else { -s }, 1.0)
            .unwrap_err();
        assert!(matches!(err, Error::InversionAccuracy { .. }));
    }
}
