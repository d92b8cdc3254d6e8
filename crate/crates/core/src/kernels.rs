//! Green function and jump kernel of `X_t = B_{S_t}` in `ℝ^d`.
//!
//! Both are subordination integrals `∫ p(t, r) w(t) dt` of the heat kernel
//! against the potential density (`w = u`) or the Lévy density (`w = μ`).
//! The integral is split at `t = r²` where the integrand peaks.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::bernstein::Cbf;
use crate::densities::{DensityEvaluator, RatioSpread};
use crate::error::{Error, Result};
use crate::numerics::special::gamma;
use crate::numerics::{log_grid, Integrator};

/// Gaussian kernel of `B` with generator `Δ`: `(4πt)^{-d/2} e^{-r²/(4t)}`.
pub fn heat_kernel(d: usize, t: f64, r: f64) -> f64 {
    (4.0 * PI * t).powf(-(d as f64) / 2.0) * (-r * r / (4.0 * t)).exp()
}

/// Whether `∫_{0+} λ^{d/2-1}/φ(λ) dλ < ∞`.
///
/// With `gamma` given, `d ≤ 2` is decided by `γ < d/2` together with
/// `liminf φ(λ)/λ^γ > 0`, read off the log-slope of `φ` on `[1e-8, 1e-6]`
/// and the ratio on `[1e-8, 1]`. Without it the catalog's small-`λ`
/// exponent is used.
pub fn transience_check(phi: &Cbf, d: usize, gamma: Option<f64>) -> Result<bool> {
    if d == 0 {
        return Err(Error::Domain {
            what: "transience check",
            name: "d",
            value: 0.0,
        });
    }
    if d >= 3 {
        return Ok(true);
    }
    let half_d = d as f64 / 2.0;
    if let Some(g) = gamma {
        if !(g >= 0.0 && g < half_d) {
            return Ok(false);
        }
        return Ok(liminf_condition(phi, g));
    }
    if phi.killing() > 0.0 {
        return Ok(true);
    }
    match phi.small_lambda_exponent() {
        Some(kappa) => Ok(kappa < half_d),
        None => Err(Error::Undecidable {
            dim: d,
            reason: "no tail exponent declared and none known for this kind".into(),
        }),
    }
}

fn liminf_condition(phi: &Cbf, g: f64) -> bool {
    let (lo, hi) = (1e-8_f64, 1e-6_f64);
    let slope = (phi.value(hi).ln() - phi.value(lo).ln()) / (hi / lo).ln();
    let ratios: Vec<f64> = log_grid(lo, 1.0, 33)
        .into_iter()
        .map(|l| phi.value(l) / l.powf(g))
        .collect();
    slope <= g + 1e-3 && ratios.iter().all(|&q| q > 0.0 && q.is_finite())
}

/// `∫₀^∞ (4πt)^{-d/2} e^{-r²/(4t)} w(t) dt` for a decreasing `w`.
///
/// In `d ≤ 2` the caller must declare `γ < d/2` with `w(t) ≤ c t^{γ-1}` at
/// infinity; otherwise the integral need not converge.
pub fn subordination_integral<W>(
    w: W,
    d: usize,
    r: f64,
    tail_gamma: Option<f64>,
    integrator: &Integrator,
) -> Result<f64>
where
    W: Fn(f64) -> f64,
{
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain {
            what: "subordination integral",
            name: "r",
            value: r,
        });
    }
    if d <= 2 {
        match tail_gamma {
            Some(g) if g < d as f64 / 2.0 => {}
            Some(g) => {
                return Err(Error::Domain {
                    what: "subordination integral tail bound",
                    name: "gamma",
                    value: g,
                })
            }
            None => {
                return Err(Error::Undecidable {
                    dim: d,
                    reason: "a tail exponent gamma < d/2 must be declared".into(),
                })
            }
        }
    }
    let r2 = r * r;
    let half_d = d as f64 / 2.0;
    // rough peak magnitude, so that the absolute tolerance is meaningful
    let scale = heat_kernel(d, r2, r) * w(r2) * r2;
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::NonFinite {
            what: "subordination integrand",
            at: r,
            value: scale,
        });
    }
    // t = r²/(4s), s ∈ [1/4, ∞)
    let head = integrator.integrate_to_inf(
        |s| {
            let e = (-s).exp();
            if e == 0.0 {
                return 0.0;
            }
            let t = r2 / (4.0 * s);
            (s / (PI * r2)).powf(half_d) * e * w(t) * r2 / (4.0 * s * s) / scale
        },
        0.25,
    )?;
    // t = r² e^y, y ∈ [0, ∞)
    let tail = integrator.integrate_to_inf(
        |y| {
            let t = r2 * y.exp();
            let p = heat_kernel(d, t, r);
            if p == 0.0 || !t.is_finite() {
                return 0.0;
            }
            p * w(t) * t / scale
        },
        0.0,
    )?;
    Ok((head.value + tail.value) * scale)
}

/// `Γ(d/2+β-1) / (4^{1-β} π^{d/2})`: the value of `I(r) r^{d+2β-2}` for `w = t^{-β}`.
pub fn subordination_limit_constant(d: usize, beta: f64) -> Result<f64> {
    let a = d as f64 / 2.0 + beta - 1.0;
    if !(a > 0.0) {
        return Err(Error::Domain {
            what: "subordination limit constant",
            name: "beta",
            value: beta,
        });
    }
    Ok(gamma(a) / (4f64.powf(1.0 - beta) * PI.powf(d as f64 / 2.0)))
}

/// `G` and `j` for one exponent in one dimension.
#[derive(Debug, Clone)]
pub struct KernelEvaluator {
    density: DensityEvaluator,
    d: usize,
    gamma: Option<f64>,
    integrator: Integrator,
}

impl KernelEvaluator {
    pub fn new(phi: Cbf, d: usize) -> Self {
        Self {
            density: DensityEvaluator::new(phi),
            d,
            gamma: None,
            integrator: Integrator::default(),
        }
    }

    /// Declare the liminf exponent used for transience and the tail bound in `d ≤ 2`.
    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = Some(gamma);
        self
    }

    pub fn with_integrator(mut self, integrator: Integrator) -> Self {
        self.integrator = integrator;
        self
    }

    pub fn phi(&self) -> &Cbf {
        self.density.phi()
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn is_transient(&self) -> Result<bool> {
        transience_check(self.phi(), self.d, self.gamma)
    }

    /// Green function `G(r)`.
    pub fn green(&self, r: f64) -> Result<f64> {
        if !self.is_transient()? {
            return Err(Error::Recurrent { dim: self.d });
        }
        let tail_gamma = self.gamma.or_else(|| {
            if self.phi().killing() > 0.0 {
                Some(0.0)
            } else {
                self.phi().small_lambda_exponent()
            }
        });
        let ev = &self.density;
        subordination_integral(|t| ev.u_fast(t), self.d, r, tail_gamma, &self.integrator)
    }

    /// Jump kernel `j(r)`.
    pub fn jump(&self, r: f64) -> Result<f64> {
        let phi = self.phi();
        // t μ(t) is bounded at infinity for every Lévy density
        subordination_integral(
            |t| phi.levy_density_fast(t),
            self.d,
            r,
            Some(0.0),
            &self.integrator,
        )
    }
}

pub fn green_function(phi: &Cbf, d: usize, r: f64) -> Result<f64> {
    KernelEvaluator::new(phi.clone(), d).green(r)
}

pub fn jump_kernel(phi: &Cbf, d: usize, r: f64) -> Result<f64> {
    KernelEvaluator::new(phi.clone(), d).jump(r)
}

/// Tabulated `G` and `j` on a radial grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialKernelTable {
    pub d: usize,
    pub radii: Vec<f64>,
    pub g_values: Vec<f64>,
    pub j_values: Vec<f64>,
    pub phi: Cbf,
}

impl RadialKernelTable {
    pub fn build(ev: &KernelEvaluator, radii: &[f64]) -> Result<Self> {
        let g_values = radii
            .par_iter()
            .map(|&r| ev.green(r))
            .collect::<Result<Vec<_>>>()?;
        let j_values = radii
            .par_iter()
            .map(|&r| ev.jump(r))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            d: ev.d,
            radii: radii.to_vec(),
            g_values,
            j_values,
            phi: ev.phi().clone(),
        })
    }

    /// Both columns strictly decreasing along increasing radii.
    pub fn is_strictly_decreasing(&self) -> bool {
        let dec = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
        dec(&self.g_values) && dec(&self.j_values)
    }

    pub fn rows(&self) -> Result<Vec<KernelRow>> {
        let phi = &self.phi;
        let d = self.d as i32;
        self.radii
            .iter()
            .zip(self.g_values.iter().zip(&self.j_values))
            .map(|(&r, (&g, &j))| {
                let p = phi.eval(1.0 / (r * r))?;
                Ok(KernelRow {
                    r,
                    g,
                    j,
                    g_ratio: g * r.powi(d) * p,
                    j_ratio: j * r.powi(d) / p,
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelRow {
    pub r: f64,
    pub g: f64,
    pub j: f64,
    pub g_ratio: f64,
    pub j_ratio: f64,
}

pub const KERNEL_CSV_HEADER: [&str; 5] = ["r", "G", "J", "g_ratio", "j_ratio"];

impl KernelRow {
    pub fn values(&self) -> [f64; 5] {
        [self.r, self.g, self.j, self.g_ratio, self.j_ratio]
    }
}

/// Default small-radius window `[1e-3, 1]`.
pub fn default_r_grid(points: usize) -> Vec<f64> {
    log_grid(1e-3, 1.0, points)
}

/// Range of `G(r) r^d φ(r⁻²)` over `r_grid`.
pub fn g_asymptotic_ratio(ev: &KernelEvaluator, r_grid: &[f64]) -> Result<RatioSpread> {
    let d = ev.d as i32;
    let values = r_grid
        .par_iter()
        .map(|&r| Ok(ev.green(r)? * r.powi(d) * ev.phi().eval(1.0 / (r * r))?))
        .collect::<Result<Vec<_>>>()?;
    RatioSpread::from_values(&values)
}

/// Range of `j(r) r^d / φ(r⁻²)` over `r_grid`.
pub fn j_asymptotic_ratio(ev: &KernelEvaluator, r_grid: &[f64]) -> Result<RatioSpread> {
    let d = ev.d as i32;
    let values = r_grid
        .par_iter()
        .map(|&r| Ok(ev.jump(r)? * r.powi(d) / ev.phi().eval(1.0 / (r * r))?))
        .collect::<Result<Vec<_>>>()?;
    RatioSpread::from_values(&values)
}

/// Max of `j(r)/j(2r)` on `(0, K)` and of `j(r)/j(r+1)` on `(1, 10K)` for any kernel.
pub fn doubling_and_shift<J>(j: J, k: f64) -> Result<(f64, f64)>
where
    J: Fn(f64) -> Result<f64> + Sync,
{
    if !(k > 0.0) {
        return Err(Error::Domain {
            what: "doubling check",
            name: "K",
            value: k,
        });
    }
    let small = log_grid(1e-3 * k, k, 25);
    let c4 = small
        .par_iter()
        .map(|&r| Ok(j(r)? / j(2.0 * r)?))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let hi = (10.0 * k).max(2.0);
    let large = log_grid(1.0, hi, 25);
    let c5 = large
        .par_iter()
        .map(|&r| Ok(j(r)? / j(r + 1.0)?))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok((c4, c5))
}

/// Measured `(C₄, C₅)` for the jump kernel of `ev`.
pub fn j_doubling_and_shift(ev: &KernelEvaluator, k: f64) -> Result<(f64, f64)> {
    doubling_and_shift(|r| ev.jump(r), k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn heat_kernel_values() {
        assert_relative_eq!(
            heat_kernel(1, 1.0 / (4.0 * PI), 0.0),
            1.0,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            heat_kernel(3, 1.0, 0.0),
            0.022_448_390_265_645_8,
            max_relative = 1e-12
        );
        let mass = Integrator::new(1e-12, 1e-12)
            .integrate(|x| 2.0 * heat_kernel(1, 1.0, x), 0.0, 40.0)
            .unwrap();
        assert!((mass.value - 1.0).abs() < 1e-8);
    }

    #[test]
    fn transience_examples() {
        let s1 = Cbf::stable(1.0).unwrap();
        assert!(transience_check(&s1, 3, None).unwrap());
        assert!(!transience_check(&s1, 1, Some(0.4)).unwrap());
        assert!(!transience_check(&s1, 1, None).unwrap());
        let s05 = Cbf::stable(0.5).unwrap();
        assert!(transience_check(&s05, 1, Some(0.3)).unwrap());
        let conj = Cbf::stable(1.0).unwrap().conjugate().unwrap();
        assert!(matches!(
            transience_check(&conj, 2, None),
            Err(Error::Undecidable { .. })
        ));
        assert!(transience_check(&conj, 3, None).unwrap());
    }

    #[test]
    fn limit_constant_examples() {
        let int = Integrator::default();
        let c = subordination_limit_constant(3, 0.5).unwrap();
        assert_relative_eq!(c, 1.0 / (2.0 * PI.powf(1.5)), max_relative = 1e-12);
        let r = 1e-3;
        let i = subordination_integral(|t| t.powf(-0.5), 3, r, None, &int).unwrap();
        assert!((i * r.powf(2.0) - c).abs() < 1e-3 * c);

        let c = subordination_limit_constant(1, 1.5).unwrap();
        assert_relative_eq!(c, 2.0 / PI.sqrt(), max_relative = 1e-12);
        let i = subordination_integral(|t| t.powf(-1.5), 1, r, Some(0.0), &int).unwrap();
        assert!((i * r.powf(2.0) - c).abs() < 1e-3 * c);
    }

    #[test]
    fn compact_support_decays() {
        let int = Integrator::default();
        let w = |t: f64| if t < 1.0 { 1.0 - t } else { 1e-300 };
        let a = subordination_integral(w, 3, 1.0, None, &int).unwrap();
        let b = subordination_integral(w, 3, 10.0, None, &int).unwrap();
        assert!(b < 1e-3 * a);
    }

    #[test]
    fn low_dimension_needs_declared_tail() {
        let int = Integrator::default();
        assert!(subordination_integral(|t| 1.0 / t, 2, 1.0, None, &int).is_err());
        assert!(subordination_integral(|t| 1.0 / t, 2, 1.0, Some(1.0), &int).is_err());
    }

    #[test]
    fn stable_green_and_jump_oracles() {
        let s = Cbf::stable(1.0).unwrap();
        let g = green_function(&s, 3, 1.0).unwrap();
        assert_relative_eq!(g, 1.0 / (2.0 * PI * PI), max_relative = 1e-6);
        let g2 = green_function(&s, 3, 0.5).unwrap();
        assert_relative_eq!(g2, 4.0 / (2.0 * PI * PI), max_relative = 1e-6);
        let j = jump_kernel(&s, 1, 1.0).unwrap();
        assert_relative_eq!(j, 1.0 / PI, max_relative = 1e-6);
        assert_relative_eq!(
            jump_kernel(&s, 1, 2.0).unwrap(),
            0.25 / PI,
            max_relative = 1e-6
        );
        assert!(matches!(
            green_function(&s, 1, 1.0),
            Err(Error::Recurrent { dim: 1 })
        ));
    }

    #[test]
    fn stable_doubling_is_exact() {
        let ev = KernelEvaluator::new(Cbf::stable(1.0).unwrap(), 1);
        let (c4, c5) = j_doubling_and_shift(&ev, 1.0).unwrap();
        assert!((c4 - 4.0).abs() < 1e-6, "{c4}");
        assert_relative_eq!(c5, 4.0, max_relative = 1e-6);
        let scaled = doubling_and_shift(|r| Ok(7.0 * ev.jump(r)?), 1.0).unwrap();
        assert_relative_eq!(scaled.0, c4, max_relative = 1e-12);
        assert_relative_eq!(scaled.1, c5, max_relative = 1e-12);
    }

    #[test]
    fn table_is_decreasing() {
        let ev = KernelEvaluator::new(Cbf::relativistic(1.0, 1.0).unwrap(), 3);
        let t = RadialKernelTable::build(&ev, &log_grid(0.01, 2.0, 8)).unwrap();
        assert!(t.is_strictly_decreasing());
        assert_eq!(t.rows().unwrap().len(), 8);
    }
}
