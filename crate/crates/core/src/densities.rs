//! Potential density `u` of the subordinator and its comparison with `φ`.
//!
//! `u` is the inverse Laplace transform of `1/φ`. Stable exponents and the
//! geometric example have closed forms; everything else uses a 32-node fixed
//! Talbot contour with a 24-node residual check.

use std::f64::consts::E;

use serde::Serialize;

use crate::bernstein::{Cbf, Kind};
use crate::error::{Error, Result};
use crate::numerics::special::gamma;
use crate::numerics::{log_grid, min_max, talbot, InversionMode, Inverter};

/// `(1 - e^{-1})^{-1}`, the constant in the upper bound `u(t) ≤ C t⁻¹ φ(1/t)⁻¹`.
pub const ZAHLE_CONSTANT: f64 = 1.0 / (1.0 - 1.0 / E);

#[derive(Debug, Clone)]
pub struct DensityEvaluator {
    phi: Cbf,
    inverter: Inverter,
    mode: InversionMode,
}

impl DensityEvaluator {
    /// Closed form when the catalog has one, Talbot otherwise.
    pub fn new(phi: Cbf) -> Self {
        let mode = if closed_form_u(&phi, 1.0).is_some() {
            InversionMode::ClosedForm
        } else {
            InversionMode::TalbotContour
        };
        Self {
            phi,
            inverter: Inverter::default(),
            mode,
        }
    }

    pub fn with_mode(mut self, mode: InversionMode) -> Result<Self> {
        if mode == InversionMode::ClosedForm && closed_form_u(&self.phi, 1.0).is_none() {
            return Err(Error::Unsupported {
                what: "closed-form potential density",
            });
        }
        self.mode = mode;
        Ok(self)
    }

    pub fn with_inverter(mut self, inverter: Inverter) -> Self {
        self.inverter = inverter;
        self
    }

    pub fn phi(&self) -> &Cbf {
        &self.phi
    }

    pub fn mode(&self) -> InversionMode {
        self.mode
    }

    /// Potential density `u(t)`.
    pub fn u(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Domain {
                what: "potential density",
                name: "t",
                value: t,
            });
        }
        let phi = &self.phi;
        let v = match self.mode {
            InversionMode::ClosedForm => closed_form_u(phi, t).expect("checked at construction"),
            InversionMode::TalbotContour => {
                self.inverter.talbot_checked(|s| phi.eval_c(s).inv(), t)?
            }
            InversionMode::GaverStehfest => self.inverter.stehfest(|l| 1.0 / phi.value(l), t),
        };
        if !v.is_finite() {
            return Err(Error::NonFinite {
                what: "potential density",
                at: t,
                value: v,
            });
        }
        Ok(v)
    }

    /// `u(t)` without the residual check, for quadrature inner loops.
    pub(crate) fn u_fast(&self, t: f64) -> f64 {
        match self.mode {
            InversionMode::ClosedForm => closed_form_u(&self.phi, t).expect("checked"),
            _ => talbot(|s| self.phi.eval_c(s).inv(), t, self.inverter.nodes),
        }
    }
}

fn closed_form_u(phi: &Cbf, t: f64) -> Option<f64> {
    match phi.kind() {
        Kind::Stable { alpha } => Some(t.powf(alpha / 2.0 - 1.0) / gamma(alpha / 2.0)),
        Kind::RelativisticStable { alpha, m } if *m == 0.0 => {
            Some(t.powf(alpha / 2.0 - 1.0) / gamma(alpha / 2.0))
        }
        Kind::GeometricLikeExample { alpha, n } => Some(
            (1..=*n)
                .map(|k| {
                    let k = k as f64;
                    k.exp2() * (-(2.0 * k / alpha).exp2() * t).exp()
                })
                .sum(),
        ),
        _ => None,
    }
}

pub fn potential_density_u(ev: &DensityEvaluator, t: f64) -> Result<f64> {
    ev.u(t)
}

/// Spread of a dimensionless ratio over a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioSpread {
    pub min: f64,
    pub max: f64,
}

impl RatioSpread {
    pub fn from_values(values: &[f64]) -> Result<Self> {
        let (min, max) = min_max(values);
        if !(min > 0.0) || !max.is_finite() {
            return Err(Error::NonFinite {
                what: "asymptotic ratio",
                at: f64::NAN,
                value: if min > 0.0 { max } else { min },
            });
        }
        Ok(Self { min, max })
    }

    pub fn spread(&self) -> f64 {
        self.max / self.min
    }
}

/// Default 50-point small-time window `[1e-6, 1]`.
pub fn default_small_t_grid() -> Vec<f64> {
    log_grid(1e-6, 1.0, 50)
}

/// `max u(t) · t · φ(1/t)` over the grid; bounded by [`ZAHLE_CONSTANT`].
pub fn zahle_upper_check(ev: &DensityEvaluator, t_grid: &[f64]) -> Result<f64> {
    Ok(u_products(ev, t_grid)?.into_iter().fold(0.0, f64::max))
}

fn u_products(ev: &DensityEvaluator, t_grid: &[f64]) -> Result<Vec<f64>> {
    t_grid
        .iter()
        .map(|&t| Ok(ev.u(t)? * t * ev.phi.eval(1.0 / t)?))
        .collect()
}

/// Range of `u(t) · t · φ(1/t)` over `t_grid ⊂ (0, 1]`.
pub fn u_asymptotic_ratio(ev: &DensityEvaluator, t_grid: &[f64]) -> Result<RatioSpread> {
    RatioSpread::from_values(&u_products(ev, t_grid)?)
}

/// Range of `μ(t) · t / φ(1/t)` over `t_grid ⊂ (0, 1]`.
pub fn mu_asymptotic_ratio(phi: &Cbf, t_grid: &[f64]) -> Result<RatioSpread> {
    let values = t_grid
        .iter()
        .map(|&t| Ok(phi.levy_density(t)? * t / phi.eval(1.0 / t)?))
        .collect::<Result<Vec<_>>>()?;
    RatioSpread::from_values(&values)
}

/// Candidate constants for the lower scaling condition `φ(λt) ≥ a λ^δ φ(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingWitness {
    pub delta: f64,
    pub a_const: f64,
    pub s0: f64,
}

/// `(λ, t)` pairs: `λ` on `[1, 10^4]`, `t` on `[1/s₀, 10^4/s₀]`.
pub fn scaling_grid(s0: f64) -> (Vec<f64>, Vec<f64>) {
    (log_grid(1.0, 1e4, 17), log_grid(1.0 / s0, 1e4 / s0, 17))
}

fn scaling_ratios(phi: &Cbf, delta: f64, lambdas: &[f64], ts: &[f64]) -> f64 {
    let mut worst = f64::INFINITY;
    for &l in lambdas {
        for &t in ts {
            worst = worst.min(phi.value(l * t) / (l.powf(delta) * phi.value(t)));
        }
    }
    worst
}

/// Whether the witness satisfies the scaling inequality on the grid pairs.
pub fn verify_scaling_condition(
    phi: &Cbf,
    candidate: &ScalingWitness,
    lambdas: &[f64],
    ts: &[f64],
) -> Result<bool> {
    if !(candidate.delta > 0.0 && candidate.delta < 1.0) {
        return Err(Error::Domain {
            what: "scaling witness",
            name: "delta",
            value: candidate.delta,
        });
    }
    let lambdas: Vec<f64> = lambdas.iter().copied().filter(|&l| l >= 1.0).collect();
    let ts: Vec<f64> = ts
        .iter()
        .copied()
        .filter(|&t| t >= 1.0 / candidate.s0)
        .collect();
    Ok(scaling_ratios(phi, candidate.delta, &lambdas, &ts) >= candidate.a_const)
}

/// Largest `a` making the scaling inequality hold on the default grid.
pub fn fit_scaling_constant(phi: &Cbf, delta: f64, s0: f64) -> f64 {
    let (lambdas, ts) = scaling_grid(s0);
    scaling_ratios(phi, delta, &lambdas, &ts)
}

/// Max relative gap between `μ(t, ∞)` and the inverse transform of `φ(λ)/λ`.
pub fn tail_vs_conjugate_potential(phi: &Cbf, t_grid: &[f64]) -> Result<f64> {
    if phi.killing() > 0.0 {
        return Err(Error::Unsupported {
            what: "tail/conjugate comparison for a killed exponent",
        });
    }
    let inv = Inverter::default().with_shift(phi.spectral_gap());
    let mut worst: f64 = 0.0;
    for &t in t_grid {
        let tail = phi.levy_tail(t)?;
        let v = inv.talbot_checked(|s| phi.eval_c(s) / s, t)?;
        worst = worst.max((tail - v).abs() / tail.abs());
    }
    Ok(worst)
}

/// One row of the density table; columns match the CSV header.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityRow {
    pub t: f64,
    pub u: f64,
    pub mu: f64,
    pub tail: f64,
    pub u_ratio: f64,
    pub mu_ratio: f64,
}

pub const DENSITY_CSV_HEADER: [&str; 6] = ["t", "u", "mu", "tail", "u_ratio", "mu_ratio"];

impl DensityRow {
    pub fn values(&self) -> [f64; 6] {
        [
            self.t,
            self.u,
            self.mu,
            self.tail,
            self.u_ratio,
            self.mu_ratio,
        ]
    }
}

pub fn density_table(ev: &DensityEvaluator, ts: &[f64]) -> Result<Vec<DensityRow>> {
    ts.iter()
        .map(|&t| {
            let u = ev.u(t)?;
            let mu = ev.phi.levy_density(t)?;
            let tail = ev.phi.levy_tail(t)?;
            let phi_inv = ev.phi.eval(1.0 / t)?;
            Ok(DensityRow {
                t,
                u,
                mu,
                tail,
                u_ratio: u * t * phi_inv,
                mu_ratio: mu * t / phi_inv,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Integrator;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn stable_closed_form_values() {
        let ev = DensityEvaluator::new(Cbf::stable(1.0).unwrap());
        assert_eq!(ev.mode(), InversionMode::ClosedForm);
        assert_relative_eq!(ev.u(1.0).unwrap(), 1.0 / PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(ev.u(4.0).unwrap(), 0.5 / PI.sqrt(), max_relative = 1e-14);
        assert!(ev.u(1.0).unwrap() >= ev.u(2.0).unwrap());
        assert!(ev.u(0.0).is_err());
    }

    #[test]
    fn talbot_and_stehfest_reproduce_closed_form() {
        let phi = Cbf::stable(1.0).unwrap();
        let tal = DensityEvaluator::new(phi.clone())
            .with_mode(InversionMode::TalbotContour)
            .unwrap();
        let gs = DensityEvaluator::new(phi)
            .with_mode(InversionMode::GaverStehfest)
            .unwrap();
        for &t in &[1e-4f64, 0.1, 1.0, 4.0] {
            let exact = t.powf(-0.5) / PI.sqrt();
            assert_relative_eq!(tal.u(t).unwrap(), exact, max_relative = 1e-9);
            assert_relative_eq!(gs.u(t).unwrap(), exact, max_relative = 1e-3);
        }
    }

    #[test]
    fn closed_form_mode_needs_closed_form() {
        let ev = DensityEvaluator::new(Cbf::log_up(1.0, 0.5).unwrap());
        assert_eq!(ev.mode(), InversionMode::TalbotContour);
        assert!(ev.with_mode(InversionMode::ClosedForm).is_err());
    }

    #[test]
    fn geometric_closed_form_agrees_with_inversion() {
        let ev = DensityEvaluator::new(Cbf::geometric_example(1.0, 30).unwrap());
        assert_eq!(ev.mode(), InversionMode::ClosedForm);
        let tal = ev.clone().with_mode(InversionMode::TalbotContour).unwrap();
        for &t in &[1e-5, 1e-2, 0.5] {
            assert_relative_eq!(ev.u(t).unwrap(), tal.u(t).unwrap(), max_relative = 1e-7);
        }
    }

    #[test]
    fn zahle_examples() {
        let grid = log_grid(1e-6, 1.0, 50);
        let ev = DensityEvaluator::new(Cbf::stable(1.0).unwrap());
        let m = zahle_upper_check(&ev, &grid).unwrap();
        assert_relative_eq!(m, 1.0 / PI.sqrt(), max_relative = 1e-12);
        let ev = DensityEvaluator::new(Cbf::stable(0.5).unwrap());
        let m = zahle_upper_check(&ev, &grid).unwrap();
        assert_relative_eq!(m, 1.0 / gamma(0.25), max_relative = 1e-12);
        assert!(m <= ZAHLE_CONSTANT);
        // the product is scale free for the stable exponent
        let scaled: Vec<f64> = grid.iter().map(|t| t * 7.0).collect();
        assert_relative_eq!(
            zahle_upper_check(&ev, &scaled).unwrap(),
            m,
            max_relative = 1e-12
        );
    }

    #[test]
    fn relativistic_u_ratio_spread() {
        let ev = DensityEvaluator::new(Cbf::relativistic(1.0, 1.0).unwrap());
        let r = u_asymptotic_ratio(&ev, &default_small_t_grid()).unwrap();
        assert!(r.spread() < 10.0, "{r:?}");
        let s = DensityEvaluator::new(Cbf::sum_of_stables(1.0, 0.5).unwrap());
        assert!(u_asymptotic_ratio(&s, &default_small_t_grid()).unwrap().min > 0.0);
    }

    #[test]
    fn mu_ratio_stable_constant() {
        let r = mu_asymptotic_ratio(&Cbf::stable(1.0).unwrap(), &default_small_t_grid()).unwrap();
        assert_relative_eq!(r.min, 0.5 / PI.sqrt(), max_relative = 1e-12);
        assert_relative_eq!(r.spread(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn mu_ratio_log_up_refinement() {
        let phi = Cbf::log_up(1.0, 0.5).unwrap();
        let a = mu_asymptotic_ratio(&phi, &log_grid(1e-6, 1.0, 25)).unwrap();
        let b = mu_asymptotic_ratio(&phi, &log_grid(1e-6, 1.0, 49)).unwrap();
        assert!(a.spread().is_finite());
        assert!((b.spread() / a.spread() - 1.0).abs() < 0.05);
    }

    #[test]
    fn scaling_condition_examples() {
        let phi = Cbf::stable(1.0).unwrap();
        let (l, t) = scaling_grid(1.0);
        let ok = ScalingWitness {
            delta: 0.4,
            a_const: 1.0,
            s0: 1.0,
        };
        let bad = ScalingWitness {
            delta: 0.6,
            a_const: 1.0,
            s0: 1.0,
        };
        assert!(verify_scaling_condition(&phi, &ok, &l, &t).unwrap());
        assert!(!verify_scaling_condition(&phi, &bad, &l, &t).unwrap());

        let ld = Cbf::log_down(1.0, 0.5).unwrap();
        let a = fit_scaling_constant(&ld, 0.4, 1.0);
        assert!(a > 0.0 && a < 1.0, "{a}");
        let w = ScalingWitness {
            delta: 0.4,
            a_const: a,
            s0: 1.0,
        };
        assert!(verify_scaling_condition(&ld, &w, &l, &t).unwrap());
        let too_big = ScalingWitness { a_const: 1.0, ..w };
        assert!(!verify_scaling_condition(&ld, &too_big, &l, &t).unwrap());
    }

    #[test]
    fn tail_matches_conjugate_potential() {
        let grid = log_grid(0.01, 10.0, 12);
        let d = tail_vs_conjugate_potential(&Cbf::stable(1.0).unwrap(), &grid).unwrap();
        assert!(d < 1e-4, "{d}");
        let d = tail_vs_conjugate_potential(&Cbf::relativistic(1.0, 1.0).unwrap(), &grid).unwrap();
        assert!(d < 1e-3, "{d}");
        let half = Cbf::stable(0.5).unwrap();
        assert_relative_eq!(
            half.levy_tail(1.0).unwrap(),
            1.0 / gamma(0.75),
            max_relative = 1e-12
        );
        let conj = Inverter::default()
            .talbot_checked(|s| half.eval_c(s) / s, 1.0)
            .unwrap();
        assert_relative_eq!(conj, 0.816_049, max_relative = 1e-5);
    }

    #[test]
    fn forward_transform_reproduces_reciprocal() {
        // Laplace transform of the inverted u, by quadrature in log time.
        for phi in [
            Cbf::relativistic(1.0, 1.0).unwrap(),
            Cbf::log_up(1.0, 0.5).unwrap(),
        ] {
            let ev = DensityEvaluator::new(phi.clone());
            for &lambda in &[1.0f64, 30.0, 1e3] {
                let q = Integrator::new(1e-14, 1e-8)
                    .with_max_evals(20_000)
                    .integrate(
                        |y| {
                            let t = y.exp();
                            (-lambda * t).exp() * ev.u_fast(t) * t
                        },
                        -40.0,
                        (60.0 / lambda).ln(),
                    )
                    .unwrap();
                let exact = 1.0 / phi.value(lambda);
                assert_relative_eq!(q.value, exact, max_relative = 1e-5);
            }
        }
    }

    #[test]
    fn u_is_monotone_and_convex() {
        for phi in [
            Cbf::relativistic(1.0, 1.0).unwrap(),
            Cbf::log_down(1.0, 0.5).unwrap(),
        ] {
            let ev = DensityEvaluator::new(phi);
            let grid = log_grid(1e-4, 10.0, 30);
            let u: Vec<f64> = grid.iter().map(|&t| ev.u(t).unwrap()).collect();
            for i in 1..u.len() {
                assert!(u[i] <= u[i - 1]);
            }
            for i in 1..u.len() - 1 {
                // convexity on a nonuniform grid
                let (t0, t1, t2) = (grid[i - 1], grid[i], grid[i + 1]);
                let interp = u[i - 1] + (u[i + 1] - u[i - 1]) * (t1 - t0) / (t2 - t0);
                assert!(u[i] <= interp * (1.0 + 1e-9));
            }
        }
    }
}
