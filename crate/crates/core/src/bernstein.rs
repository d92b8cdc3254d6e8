//! Complete Bernstein functions used as subordinator Laplace exponents.
//!
//! Every catalog entry is a closed-form function analytic off the negative
//! real axis, so it can be evaluated at complex arguments for contour-based
//! Laplace inversion. Lévy densities come from closed forms when known and
//! otherwise from inverting `φ'`, which is the Laplace transform of `t μ(t)`.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::special::{cpow, expm1_c, gamma, ln1p_c};
use crate::numerics::{log_grid, talbot, Integrator, Inverter};

/// Catalog parameters. `alpha` is always the parameter named in the catalog;
/// the regular-variation index of the function is given by [`Cbf::alpha`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Kind {
    /// `λ^{α/2}`
    Stable { alpha: f64 },
    /// `(λ + m^{2/α})^{α/2} - m`
    #[serde(rename = "relativistic")]
    RelativisticStable { alpha: f64, m: f64 },
    /// `λ^{α/2} + λ^{β/2}`
    #[serde(rename = "sum")]
    SumOfStables { alpha: f64, beta: f64 },
    /// `λ^{α/2} (log(1+λ))^{γ/2}`
    #[serde(rename = "log_up")]
    LogPerturbedUp { alpha: f64, gamma: f64 },
    /// `λ^{α/2} (log(1+λ))^{-β/2}`
    #[serde(rename = "log_down")]
    LogPerturbedDown { alpha: f64, beta: f64 },
    /// `1 / Σ_{n≤N} 2^n / (λ + 2^{2n/α})`, a function comparable to but not
    /// regularly varying like `λ^{1-α/2}`.
    #[serde(rename = "geometric_example")]
    GeometricLikeExample { alpha: f64, n: u32 },
    /// `λ / φ(λ)`
    #[serde(rename = "conjugate")]
    ConjugateOf { inner: Box<Cbf> },
    /// `a + φ(λ)`
    #[serde(rename = "killed")]
    KilledShift { inner: Box<Cbf>, a: f64 },
}

/// A validated complete Bernstein function without drift.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Kind", into = "Kind")]
pub struct Cbf {
    kind: Kind,
    // (weight, pole) pairs of the truncated Stieltjes sum; empty otherwise.
    stieltjes: Vec<(f64, f64)>,
}

impl TryFrom<Kind> for Cbf {
    type Error = Error;
    fn try_from(kind: Kind) -> Result<Self> {
        Cbf::new(kind)
    }
}

impl From<Cbf> for Kind {
    fn from(c: Cbf) -> Kind {
        c.kind
    }
}

impl fmt::Display for Cbf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Stable { alpha } => write!(f, "stable(alpha={alpha})"),
            Kind::RelativisticStable { alpha, m } => {
                write!(f, "relativistic(alpha={alpha}, m={m})")
            }
            Kind::SumOfStables { alpha, beta } => write!(f, "sum(alpha={alpha}, beta={beta})"),
            Kind::LogPerturbedUp { alpha, gamma } => {
                write!(f, "log_up(alpha={alpha}, gamma={gamma})")
            }
            Kind::LogPerturbedDown { alpha, beta } => {
                write!(f, "log_down(alpha={alpha}, beta={beta})")
            }
            Kind::GeometricLikeExample { alpha, n } => {
                write!(f, "geometric_example(alpha={alpha}, n={n})")
            }
            Kind::ConjugateOf { inner } => write!(f, "conjugate({inner})"),
            Kind::KilledShift { inner, a } => write!(f, "killed({inner}, a={a})"),
        }
    }
}

fn check(ok: bool, kind: &'static str, reason: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Construction {
            kind,
            reason: reason.to_string(),
        })
    }
}

fn in_open_0_2(a: f64) -> bool {
    a > 0.0 && a < 2.0
}

/// Relative size of the dropped Stieltjes tail at which truncation stops.
const GEOMETRIC_TAIL_TOL: f64 = 1e-8;

/// Largest series index whose pole `2^{2n/α}` stays well inside `f64`.
fn geometric_max_terms(alpha: f64) -> u32 {
    (495.0 * alpha).floor() as u32
}

impl Cbf {
    pub fn new(kind: Kind) -> Result<Self> {
        let mut stieltjes = Vec::new();
        match &kind {
            Kind::Stable { alpha } => {
                check(in_open_0_2(*alpha), "stable", "alpha must lie in (0, 2)")?
            }
            Kind::RelativisticStable { alpha, m } => {
                check(
                    in_open_0_2(*alpha),
                    "relativistic",
                    "alpha must lie in (0, 2)",
                )?;
                check(*m >= 0.0 && m.is_finite(), "relativistic", "m must be >= 0")?;
            }
            Kind::SumOfStables { alpha, beta } => {
                check(in_open_0_2(*alpha), "sum", "alpha must lie in (0, 2)")?;
                check(
                    *beta >= 0.0 && beta < alpha,
                    "sum",
                    "need 0 <= beta < alpha",
                )?;
            }
            Kind::LogPerturbedUp { alpha, gamma } => {
                check(in_open_0_2(*alpha), "log_up", "alpha must lie in (0, 2)")?;
                check(
                    *gamma > 0.0 && *gamma < 2.0 - alpha,
                    "log_up",
                    "need 0 < gamma < 2 - alpha",
                )?;
            }
            Kind::LogPerturbedDown { alpha, beta } => {
                check(in_open_0_2(*alpha), "log_down", "alpha must lie in (0, 2)")?;
                check(
                    *beta >= 0.0 && beta < alpha,
                    "log_down",
                    "need 0 <= beta < alpha",
                )?;
            }
            Kind::GeometricLikeExample { alpha, n } => {
                check(
                    in_open_0_2(*alpha),
                    "geometric_example",
                    "alpha must lie in (0, 2)",
                )?;
                check(
                    *n >= 1 && *n <= geometric_max_terms(*alpha),
                    "geometric_example",
                    "truncation n must be >= 1 and keep 2^{2n/alpha} finite",
                )?;
                stieltjes = (1..=*n)
                    .map(|k| {
                        let k = k as f64;
                        (k.exp2(), (2.0 * k / alpha).exp2())
                    })
                    .collect();
            }
            Kind::ConjugateOf { inner } => {
                check(
                    inner.has_infinite_mass(),
                    "conjugate",
                    "inner function must have infinite Lévy mass and no drift",
                )?;
            }
            Kind::KilledShift { a, .. } => {
                check(
                    *a >= 0.0 && a.is_finite(),
                    "killed",
                    "killing rate must be >= 0",
                )?;
            }
        }
        Ok(Self { kind, stieltjes })
    }

    pub fn stable(alpha: f64) -> Result<Self> {
        Self::new(Kind::Stable { alpha })
    }

    pub fn relativistic(alpha: f64, m: f64) -> Result<Self> {
        Self::new(Kind::RelativisticStable { alpha, m })
    }

    pub fn sum_of_stables(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(Kind::SumOfStables { alpha, beta })
    }

    pub fn log_up(alpha: f64, gamma: f64) -> Result<Self> {
        Self::new(Kind::LogPerturbedUp { alpha, gamma })
    }

    pub fn log_down(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(Kind::LogPerturbedDown { alpha, beta })
    }

    pub fn geometric_example(alpha: f64, n: u32) -> Result<Self> {
        Self::new(Kind::GeometricLikeExample { alpha, n })
    }

    /// Geometric example truncated at [`geometric_truncation`] terms.
    pub fn geometric_example_auto(alpha: f64) -> Result<Self> {
        Self::geometric_example(alpha, geometric_truncation(alpha)?)
    }

    pub fn killed(self, a: f64) -> Result<Self> {
        Self::new(Kind::KilledShift {
            inner: Box::new(self),
            a,
        })
    }

    /// Attach a linear drift. Only `b = 0` is admissible.
    pub fn with_drift(self, b: f64) -> Result<Self> {
        check(
            b == 0.0,
            "drift",
            "complete subordinators here carry no drift",
        )?;
        Ok(self)
    }

    pub fn from_json(s: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("catalog values serialize")
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    /// Regular-variation index `α` of `φ(λ) ≍ λ^{α/2} ℓ(λ)` at infinity.
    pub fn alpha(&self) -> f64 {
        match &self.kind {
            Kind::Stable { alpha }
            | Kind::RelativisticStable { alpha, .. }
            | Kind::SumOfStables { alpha, .. }
            | Kind::LogPerturbedUp { alpha, .. }
            | Kind::LogPerturbedDown { alpha, .. } => *alpha,
            Kind::GeometricLikeExample { alpha, .. } => 2.0 - alpha,
            Kind::ConjugateOf { inner } => 2.0 - inner.alpha(),
            Kind::KilledShift { inner, .. } => inner.alpha(),
        }
    }

    /// Killing rate `φ(0+)`.
    pub fn killing(&self) -> f64 {
        match &self.kind {
            Kind::SumOfStables { beta, .. } if *beta == 0.0 => 1.0,
            Kind::GeometricLikeExample { .. } => {
                1.0 / self.stieltjes.iter().map(|(w, c)| w / c).sum::<f64>()
            }
            Kind::ConjugateOf { inner } => {
                if inner.killing() > 0.0 {
                    0.0
                } else {
                    1.0 / inner.deriv_at_zero()
                }
            }
            Kind::KilledShift { inner, a } => inner.killing() + a,
            _ => 0.0,
        }
    }

    /// Linear drift `lim φ(λ)/λ`. Zero except for the truncated geometric
    /// example, where the finite Stieltjes sum leaves `1/Σ 2^n`.
    pub fn drift(&self) -> f64 {
        match &self.kind {
            Kind::GeometricLikeExample { .. } => {
                1.0 / self.stieltjes.iter().map(|(w, _)| w).sum::<f64>()
            }
            Kind::KilledShift { inner, .. } => inner.drift(),
            _ => 0.0,
        }
    }

    /// `φ(∞) = ∞` without a drift term, so `λ/φ(λ)` is unbounded.
    pub fn has_infinite_mass(&self) -> bool {
        match &self.kind {
            Kind::GeometricLikeExample { .. } => false,
            Kind::KilledShift { inner, .. } => inner.has_infinite_mass(),
            _ => true,
        }
    }

    /// Exponent `κ` with `φ(λ) ≍ λ^κ` as `λ → 0`, when the catalog knows it.
    pub fn small_lambda_exponent(&self) -> Option<f64> {
        match &self.kind {
            Kind::Stable { alpha } => Some(alpha / 2.0),
            Kind::RelativisticStable { alpha, m } => Some(if *m > 0.0 { 1.0 } else { alpha / 2.0 }),
            Kind::SumOfStables { beta, .. } => Some(beta / 2.0),
            Kind::LogPerturbedUp { alpha, gamma } => Some((alpha + gamma) / 2.0),
            Kind::LogPerturbedDown { alpha, beta } => Some((alpha - beta) / 2.0),
            Kind::GeometricLikeExample { .. } | Kind::KilledShift { .. } => Some(0.0),
            Kind::ConjugateOf { .. } => None,
        }
    }

    /// Distance from the origin to the nearest singularity of `φ` on the
    /// negative axis, other than a branch point at `0`.
    pub fn spectral_gap(&self) -> f64 {
        match &self.kind {
            Kind::RelativisticStable { alpha, m } if *m > 0.0 => m.powf(2.0 / alpha),
            Kind::GeometricLikeExample { .. } => self.stieltjes[0].1,
            Kind::KilledShift { inner, .. } => inner.spectral_gap(),
            _ => 0.0,
        }
    }

    /// `φ'(0+)`, possibly infinite.
    pub fn deriv_at_zero(&self) -> f64 {
        match &self.kind {
            Kind::RelativisticStable { alpha, m } if *m > 0.0 => {
                let c = m.powf(2.0 / alpha);
                alpha / 2.0 * c.powf(alpha / 2.0 - 1.0)
            }
            Kind::GeometricLikeExample { .. } => {
                let g0: f64 = self.stieltjes.iter().map(|(w, c)| w / c).sum();
                let dg0: f64 = self.stieltjes.iter().map(|(w, c)| w / (c * c)).sum();
                dg0 / (g0 * g0)
            }
            Kind::KilledShift { inner, .. } => inner.deriv_at_zero(),
            Kind::ConjugateOf { inner } => {
                let a = inner.killing();
                if a > 0.0 {
                    1.0 / a
                } else if inner.deriv_at_zero().is_finite() {
                    let h = 1e-6;
                    (self.value(h) - self.killing()) / h
                } else {
                    f64::INFINITY
                }
            }
            _ => f64::INFINITY,
        }
    }

    /// `φ(λ)` for `λ > 0` without argument checks.
    pub fn value(&self, lambda: f64) -> f64 {
        match &self.kind {
            Kind::Stable { alpha } => lambda.powf(alpha / 2.0),
            Kind::RelativisticStable { alpha, m } => {
                if *m == 0.0 {
                    return lambda.powf(alpha / 2.0);
                }
                let c = m.powf(2.0 / alpha);
                m * (alpha / 2.0 * (lambda / c).ln_1p()).exp_m1()
            }
            Kind::SumOfStables { alpha, beta } => {
                lambda.powf(alpha / 2.0) + lambda.powf(beta / 2.0)
            }
            Kind::LogPerturbedUp { alpha, gamma } => {
                lambda.powf(alpha / 2.0) * lambda.ln_1p().powf(gamma / 2.0)
            }
            Kind::LogPerturbedDown { alpha, beta } => {
                lambda.powf(alpha / 2.0) * lambda.ln_1p().powf(-beta / 2.0)
            }
            Kind::GeometricLikeExample { .. } => {
                1.0 / self
                    .stieltjes
                    .iter()
                    .map(|(w, c)| w / (lambda + c))
                    .sum::<f64>()
            }
            Kind::ConjugateOf { inner } => lambda / inner.value(lambda),
            Kind::KilledShift { inner, a } => a + inner.value(lambda),
        }
    }

    /// `φ(λ)` with domain and finiteness checks.
    pub fn eval(&self, lambda: f64) -> Result<f64> {
        if !(lambda > 0.0) || lambda.is_nan() {
            return Err(Error::Domain {
                what: "phi",
                name: "lambda",
                value: lambda,
            });
        }
        let v = self.value(lambda);
        if !v.is_finite() {
            return Err(Error::NonFinite {
                what: "phi",
                at: lambda,
                value: v,
            });
        }
        Ok(v)
    }

    /// `φ'(λ)` on the positive axis.
    pub fn deriv(&self, lambda: f64) -> f64 {
        self.deriv_c(Complex64::new(lambda, 0.0)).re
    }

    /// Analytic continuation of `φ` to `ℂ \ (-∞, 0]`.
    pub fn eval_c(&self, s: Complex64) -> Complex64 {
        match &self.kind {
            Kind::Stable { alpha } => cpow(s, alpha / 2.0),
            Kind::RelativisticStable { alpha, m } => {
                if *m == 0.0 {
                    return cpow(s, alpha / 2.0);
                }
                let c = m.powf(2.0 / alpha);
                expm1_c(ln1p_c(s / c) * (alpha / 2.0)) * *m
            }
            Kind::SumOfStables { alpha, beta } => {
                cpow(s, alpha / 2.0) + cpow(s, beta / 2.0).fix_zero_power(*beta)
            }
            Kind::LogPerturbedUp { alpha, gamma } => {
                cpow(s, alpha / 2.0) * cpow(ln1p_c(s), gamma / 2.0)
            }
            Kind::LogPerturbedDown { alpha, beta } => {
                cpow(s, alpha / 2.0) / cpow(ln1p_c(s), beta / 2.0).fix_zero_power(*beta)
            }
            Kind::GeometricLikeExample { .. } => {
                let g: Complex64 = self.stieltjes.iter().map(|(w, c)| *w / (s + c)).sum();
                g.inv()
            }
            Kind::ConjugateOf { inner } => s / inner.eval_c(s),
            Kind::KilledShift { inner, a } => inner.eval_c(s) + a,
        }
    }

    /// Analytic continuation of `φ'`.
    pub fn deriv_c(&self, s: Complex64) -> Complex64 {
        match &self.kind {
            Kind::Stable { alpha } => cpow(s, alpha / 2.0 - 1.0) * (alpha / 2.0),
            Kind::RelativisticStable { alpha, m } => {
                let c = if *m == 0.0 { 0.0 } else { m.powf(2.0 / alpha) };
                cpow(s + c, alpha / 2.0 - 1.0) * (alpha / 2.0)
            }
            Kind::SumOfStables { alpha, beta } => {
                let mut d = cpow(s, alpha / 2.0 - 1.0) * (alpha / 2.0);
                if *beta > 0.0 {
                    d += cpow(s, beta / 2.0 - 1.0) * (beta / 2.0);
                }
                d
            }
            Kind::LogPerturbedUp { alpha, gamma } => {
                log_perturbed_deriv(s, alpha / 2.0, gamma / 2.0)
            }
            Kind::LogPerturbedDown { alpha, beta } => {
                log_perturbed_deriv(s, alpha / 2.0, -beta / 2.0)
            }
            Kind::GeometricLikeExample { .. } => {
                let (g, dg) = self.stieltjes.iter().fold(
                    (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)),
                    |(g, dg), (w, c)| {
                        let q = (s + c).inv();
                        (g + q * w, dg + q * q * w)
                    },
                );
                dg / (g * g)
            }
            Kind::ConjugateOf { inner } => {
                let f = inner.eval_c(s);
                (f - s * inner.deriv_c(s)) / (f * f)
            }
            Kind::KilledShift { inner, .. } => inner.deriv_c(s),
        }
    }

    /// The conjugate exponent `ψ(λ) = λ/φ(λ)`.
    pub fn conjugate(&self) -> Result<Cbf> {
        Cbf::new(Kind::ConjugateOf {
            inner: Box::new(self.clone()),
        })
    }

    /// How the Lévy density of this function is obtained.
    pub fn levy_spec(&self) -> LevyDensitySpec {
        match &self.kind {
            Kind::Stable { .. } | Kind::RelativisticStable { .. } | Kind::SumOfStables { .. } => {
                LevyDensitySpec::ClosedForm
            }
            Kind::KilledShift { inner, .. } => inner.levy_spec(),
            _ => LevyDensitySpec::DerivativeInversion,
        }
    }

    fn closed_form_levy(&self, t: f64) -> Option<f64> {
        let stable =
            |alpha: f64| alpha / 2.0 / gamma(1.0 - alpha / 2.0) * t.powf(-1.0 - alpha / 2.0);
        match &self.kind {
            Kind::Stable { alpha } => Some(stable(*alpha)),
            Kind::RelativisticStable { alpha, m } => {
                let c = if *m == 0.0 { 0.0 } else { m.powf(2.0 / alpha) };
                Some(stable(*alpha) * (-c * t).exp())
            }
            Kind::SumOfStables { alpha, beta } => {
                Some(stable(*alpha) + if *beta > 0.0 { stable(*beta) } else { 0.0 })
            }
            Kind::KilledShift { inner, .. } => inner.closed_form_levy(t),
            _ => None,
        }
    }

    fn closed_form_tail(&self, t: f64) -> Option<f64> {
        let stable = |alpha: f64| t.powf(-alpha / 2.0) / gamma(1.0 - alpha / 2.0);
        match &self.kind {
            Kind::Stable { alpha } => Some(stable(*alpha)),
            Kind::RelativisticStable { alpha, m } if *m == 0.0 => Some(stable(*alpha)),
            Kind::SumOfStables { alpha, beta } => {
                Some(stable(*alpha) + if *beta > 0.0 { stable(*beta) } else { 0.0 })
            }
            Kind::KilledShift { inner, .. } => inner.closed_form_tail(t),
            _ => None,
        }
    }

    /// `t μ(t)` from the inverse Laplace transform of `φ'` (drift removed).
    fn t_mu_by_inversion(&self, t: f64, nodes: usize) -> f64 {
        let b = self.drift();
        talbot(|s| self.deriv_c(s) - b, t, nodes)
    }

    /// Lévy density `μ(t)`.
    pub fn levy_density(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Domain {
                what: "Lévy density",
                name: "t",
                value: t,
            });
        }
        if let Some(v) = self.closed_form_levy(t) {
            return Ok(v);
        }
        let b = self.drift();
        Inverter::default()
            .talbot_checked(|s| self.deriv_c(s) - b, t)
            .map(|v| v / t)
    }

    /// `μ(t)` without residual checks, for use inside quadrature loops.
    pub(crate) fn levy_density_fast(&self, t: f64) -> f64 {
        self.closed_form_levy(t)
            .unwrap_or_else(|| self.t_mu_by_inversion(t, 32) / t)
    }

    /// Tail `μ(t, ∞)`: closed form when known, otherwise the inverse transform
    /// of `(φ(λ) - κ - bλ)/λ`, with quadrature of `μ` as a fallback.
    pub fn levy_tail(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Domain {
                what: "Lévy tail",
                name: "t",
                value: t,
            });
        }
        if let Some(v) = self.closed_form_tail(t) {
            return Ok(v);
        }
        let (k, b) = (self.killing(), self.drift());
        let inverted = Inverter::default()
            .with_shift(self.spectral_gap())
            .talbot_checked(|s| (self.eval_c(s) - k - b * s) / s, t);
        if let Ok(v) = inverted {
            return Ok(v);
        }
        // substitute s = t e^y so the integrand is s μ(s)
        Integrator::new(1e-14, 1e-8)
            .with_max_evals(20_000)
            .integrate_to_inf(
                |y| {
                    let s = t * y.exp();
                    s * self.levy_density_fast(s)
                },
                0.0,
            )
            .map(|q| q.value)
    }

    /// `∫_s^t μ` by quadrature, for finite `0 < s < t`.
    pub fn levy_mass_between(&self, s: f64, t: f64) -> Result<f64> {
        Integrator::new(1e-14, 1e-9)
            .integrate(
                |y| {
                    let x = y.exp();
                    x * self.levy_density_fast(x)
                },
                s.ln(),
                t.ln(),
            )
            .map(|q| q.value)
    }

    /// Mean of the small jumps, `∫_0^ε s μ(s) ds`.
    pub fn small_jump_mean(&self, eps: f64) -> Result<f64> {
        match &self.kind {
            Kind::Stable { alpha } => {
                let h = alpha / 2.0;
                Ok(h / gamma(1.0 - h) * eps.powf(1.0 - h) / (1.0 - h))
            }
            Kind::SumOfStables { alpha, beta } if *beta > 0.0 => {
                let part = |a: f64| {
                    let h = a / 2.0;
                    h / gamma(1.0 - h) * eps.powf(1.0 - h) / (1.0 - h)
                };
                Ok(part(*alpha) + part(*beta))
            }
            _ => {
                // ∫_0^ε g(s) ds has transform G(λ)/λ where G = φ' - b.
                let b = self.drift();
                Inverter::default().talbot_checked(|s| (self.deriv_c(s) - b) / s, eps)
            }
        }
    }

    /// Profile against the canonical slowly varying part `ℓ = φ/λ^{α/2}`.
    pub fn reg_var_profile(&self) -> RegVarProfile {
        RegVarProfile {
            alpha: self.alpha(),
            c_h: 1.0,
            phi: self.clone(),
        }
    }

    /// Profile measuring the comparability constant against a reference `ℓ_ref`
    /// on a log grid over `[1, 10^8]`.
    pub fn reg_var_profile_against<F: Fn(f64) -> f64>(&self, ell_ref: F) -> RegVarProfile {
        let alpha = self.alpha();
        let (lo, hi) =
            log_grid(1.0, 1e8, 321)
                .into_iter()
                .fold((f64::INFINITY, 0.0f64), |(lo, hi), l| {
                    let r = self.value(l) / (l.powf(alpha / 2.0) * ell_ref(l));
                    (lo.min(r), hi.max(r))
                });
        RegVarProfile {
            alpha,
            c_h: hi.max(1.0 / lo),
            phi: self.clone(),
        }
    }
}

trait FixZeroPower {
    fn fix_zero_power(self, exponent: f64) -> Self;
}

impl FixZeroPower for Complex64 {
    // cpow(z, 0) is 1 even at z = 0
    fn fix_zero_power(self, exponent: f64) -> Self {
        if exponent == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            self
        }
    }
}

fn log_perturbed_deriv(s: Complex64, a: f64, g: f64) -> Complex64 {
    let l = ln1p_c(s);
    let phi = cpow(s, a) * cpow(l, g);
    phi * (a / s + g / ((s + 1.0) * l))
}

/// Truncation `N₀(α)` for the geometric example: the dropped tail of
/// `Σ 2^{n(1-2/α)}` is below `1e-8 · g_N(1)`.
pub fn geometric_truncation(alpha: f64) -> Result<u32> {
    check(
        in_open_0_2(alpha),
        "geometric_example",
        "alpha must lie in (0, 2)",
    )?;
    let q = (1.0 - 2.0 / alpha).exp2();
    let max = geometric_max_terms(alpha);
    let mut g1 = 0.0;
    for n in 1..=max {
        let nf = n as f64;
        g1 += nf.exp2() / (1.0 + (2.0 * nf / alpha).exp2());
        let tail = q.powf(nf + 1.0) / (1.0 - q);
        if tail < GEOMETRIC_TAIL_TOL * g1 {
            return Ok(n);
        }
    }
    Err(Error::Construction {
        kind: "geometric_example",
        reason: format!("alpha={alpha} needs more terms than double precision allows"),
    })
}

/// Source of the Lévy density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LevyDensitySpec {
    ClosedForm,
    /// `μ(t) = L⁻¹[φ'](t) / t`, i.e. `μ` as a Laplace transform of its Bernstein measure.
    DerivativeInversion,
}

/// Regular variation data of `φ` at infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct RegVarProfile {
    pub alpha: f64,
    /// Comparability constant on `[1, ∞)`.
    pub c_h: f64,
    phi: Cbf,
}

impl RegVarProfile {
    /// Canonical slowly varying part `φ(λ) / λ^{α/2}`.
    pub fn ell(&self, lambda: f64) -> f64 {
        self.phi.value(lambda) / lambda.powf(self.alpha / 2.0)
    }
}

/// Max of `μ(t)/μ(t+1)` over `t_grid ⊂ (1, ∞)`.
pub fn check_levy_shift_bound(phi: &Cbf, t_grid: &[f64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &t in t_grid {
        if !(t > 1.0) {
            return Err(Error::Domain {
                what: "Lévy shift bound",
                name: "t",
                value: t,
            });
        }
        let ratio = phi.levy_density(t)? / phi.levy_density(t + 1.0)?;
        if !ratio.is_finite() {
            return Err(Error::NonFinite {
                what: "Lévy shift ratio",
                at: t,
                value: ratio,
            });
        }
        worst = worst.max(ratio);
    }
    Ok(worst)
}

/// One representative of each catalog kind, used by the property suites.
pub fn standard_catalog() -> Vec<Cbf> {
    vec![
        Cbf::stable(0.5).unwrap(),
        Cbf::stable(1.0).unwrap(),
        Cbf::stable(1.5).unwrap(),
        Cbf::relativistic(1.0, 1.0).unwrap(),
        Cbf::sum_of_stables(1.0, 0.5).unwrap(),
        Cbf::log_up(1.0, 0.5).unwrap(),
        Cbf::log_down(1.0, 0.5).unwrap(),
        Cbf::geometric_example(1.0, 64).unwrap(),
    ]
}
