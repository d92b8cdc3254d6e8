//! Ladder-height exponent `χ` of the one-dimensional process, its renewal
//! density `v` and function `V`, and the Green function of the half-line.
//!
//! `χ(λ) = exp((1/π) ∫₀^∞ log φ(λ²θ²) / (1+θ²) dθ)`. With `θ = e^x` the weight
//! becomes `1/(2 cosh x)` and the integrand is analytic in a strip, so the
//! trapezoid rule converges geometrically. Factoring out `λ^{α/2}` keeps the
//! integrand bounded for extreme `λ`. The same substitution, shifted by
//! `arg(s)/2` into the complex plane, continues `χ` off the negative axis for
//! contour inversion of `1/χ`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::bernstein::{Cbf, Kind};
use crate::error::{Error, Result};
use crate::numerics::special::gamma;
use crate::numerics::{
    check_complete_monotonicity, min_max, talbot, Integrator, Inverter, MonotoneMode,
    MonotonicityReport,
};

const HALF_WIDTH: f64 = 40.0;
const REAL_NODES: usize = 257;

#[derive(Debug, Clone)]
pub struct LadderObjects {
    phi: Cbf,
    alpha: f64,
    inverter: Inverter,
    stable: Option<f64>,
}

impl LadderObjects {
    pub fn new(phi: Cbf) -> Self {
        let stable = match phi.kind() {
            Kind::Stable { alpha } => Some(*alpha),
            Kind::RelativisticStable { alpha, m } if *m == 0.0 => Some(*alpha),
            _ => None,
        };
        Self {
            alpha: phi.alpha(),
            phi,
            inverter: Inverter::default(),
            stable,
        }
    }

    pub fn phi(&self) -> &Cbf {
        &self.phi
    }

    /// `χ(λ)` by quadrature, for every kind including the stable ones.
    pub fn chi(&self, lambda: f64) -> Result<f64> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::Domain {
                what: "ladder exponent",
                name: "lambda",
                value: lambda,
            });
        }
        let v = self.chi_real(lambda);
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::NonFinite {
                what: "ladder exponent",
                at: lambda,
                value: v,
            });
        }
        Ok(v)
    }

    fn chi_real(&self, lambda: f64) -> f64 {
        let a = self.alpha / 2.0;
        let l2 = lambda * lambda;
        let h = 2.0 * HALF_WIDTH / (REAL_NODES - 1) as f64;
        let mut acc = 0.0;
        for k in 0..REAL_NODES {
            let x = -HALF_WIDTH + k as f64 * h;
            let z = l2 * (2.0 * x).exp();
            let g = self.phi.value(z).ln() - a * z.ln();
            acc += g / (2.0 * x.cosh());
        }
        lambda.powf(a) * (acc * h / PI).exp()
    }

    /// Continuation of `χ` to `ℂ \ (-∞, 0]`.
    ///
    /// `required_digits` (natural-log units) sets the trapezoid step against
    /// the distance of the shifted contour to the nearest singularity.
    pub fn chi_c(&self, s: Complex64, required_digits: f64) -> Complex64 {
        let a = self.alpha / 2.0;
        let theta = s.arg();
        let modulus2 = s.norm_sqr();
        let rot = Complex64::from_polar(1.0, theta);
        let gap = (PI - theta.abs()) / 2.0;
        let h = (2.0 * PI * gap / required_digits.max(5.0)).min(0.3);
        let n = (2.0 * HALF_WIDTH / h).ceil() as usize;
        let h = 2.0 * HALF_WIDTH / n as f64;
        let shift = Complex64::new(0.0, theta / 2.0);
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..=n {
            let x = -HALF_WIDTH + k as f64 * h;
            let z = rot * (modulus2 * (2.0 * x).exp());
            let g = self.phi.eval_c(z).ln() - a * z.ln();
            acc += g / (2.0 * (x - shift).cosh());
        }
        // s^{α/2} with the principal branch
        (s.ln() * a + acc * (h / PI)).exp()
    }

    fn talbot_digits(&self, s: Complex64, t: f64) -> f64 {
        let r = 2.0 * self.inverter.nodes as f64 / (5.0 * t);
        35.0 + (s.re - r) * t
    }

    /// Renewal density `v(t)`, the inverse transform of `1/χ`.
    pub fn v(&self, t: f64) -> Result<f64> {
        check_t(t)?;
        if let Some(alpha) = self.stable {
            return Ok(t.powf(alpha / 2.0 - 1.0) / gamma(alpha / 2.0));
        }
        self.inverter
            .talbot_checked(|s| self.chi_c(s, self.talbot_digits(s, t)).inv(), t)
    }

    fn v_fast(&self, t: f64) -> f64 {
        if let Some(alpha) = self.stable {
            return t.powf(alpha / 2.0 - 1.0) / gamma(alpha / 2.0);
        }
        talbot(
            |s| self.chi_c(s, self.talbot_digits(s, t)).inv(),
            t,
            self.inverter.nodes,
        )
    }

    /// Renewal function `V(t) = ∫₀ᵗ v`, inverted from `1/(λ χ(λ))`.
    pub fn renewal(&self, t: f64) -> Result<f64> {
        check_t(t)?;
        if let Some(alpha) = self.stable {
            return Ok(t.powf(alpha / 2.0) / gamma(1.0 + alpha / 2.0));
        }
        self.inverter
            .talbot_checked(|s| (s * self.chi_c(s, self.talbot_digits(s, t))).inv(), t)
    }

    /// Green function of the half-line `(0, ∞)`.
    ///
    /// `∫₀^{x∧y} v(z) v(|y-x| + z) dz`, which is the two-case formula with
    /// the `x > y` branch rewritten by `z ↦ z - (x-y)`. On the diagonal the
    /// integrand behaves like `z^{α-2}` and the value is `+∞` for `α ≤ 1`.
    pub fn halfline_green(&self, x: f64, y: f64) -> Result<f64> {
        if !(x > 0.0 && y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::Domain {
                what: "half-line Green function",
                name: "x, y",
                value: if x > 0.0 { y } else { x },
            });
        }
        let gap = (y - x).abs();
        if gap == 0.0 && self.alpha <= 1.0 {
            return Ok(f64::INFINITY);
        }
        let m = x.min(y);
        let p = (2.0 / self.alpha).max(2.0);
        // z = m s^p absorbs the z^{α/2-1} singularity of v at 0
        let f = |s: f64| {
            if s == 0.0 {
                return 0.0;
            }
            let z = m * s.powf(p);
            self.v_fast(z) * self.v_fast(gap + z) * p * m * s.powf(p - 1.0)
        };
        let q = Integrator::new(1e-12, 1e-9)
            .with_max_evals(20_000)
            .integrate(f, 0.0, 1.0)?;
        Ok(q.value)
    }
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain {
            what: "renewal density",
            name: "t",
            value: t,
        });
    }
    Ok(())
}

pub fn ladder_exponent_chi(phi: &Cbf, lambda: f64) -> Result<f64> {
    LadderObjects::new(phi.clone()).chi(lambda)
}

pub fn renewal_function_v(phi: &Cbf, t: f64) -> Result<f64> {
    LadderObjects::new(phi.clone()).renewal(t)
}

pub fn halfline_green(phi: &Cbf, x: f64, y: f64) -> Result<f64> {
    LadderObjects::new(phi.clone()).halfline_green(x, y)
}

/// `e^{-π/2}` and `e^{π/2}`.
pub fn sandwich_bounds() -> (f64, f64) {
    ((-FRAC_PI_2).exp(), FRAC_PI_2.exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SandwichReport {
    pub min: f64,
    pub max: f64,
    pub pass: bool,
}

/// Range of `χ(λ)/√φ(λ²)`; passes inside `[e^{-π/2}, e^{π/2}]` up to `1e-9`.
pub fn chi_sandwich_check(ladder: &LadderObjects, lambda_grid: &[f64]) -> Result<SandwichReport> {
    let ratios = lambda_grid
        .iter()
        .map(|&l| Ok(ladder.chi(l)? / ladder.phi.eval(l * l)?.sqrt()))
        .collect::<Result<Vec<_>>>()?;
    let (min, max) = min_max(&ratios);
    let (lo, hi) = sandwich_bounds();
    Ok(SandwichReport {
        min,
        max,
        pass: min >= lo - 1e-9 && max <= hi + 1e-9,
    })
}

/// Complete monotonicity of `λ ↦ χ(λ)/λ` to order 3.
pub fn chi_is_cbf_check(ladder: &LadderObjects, grid: &[f64]) -> Result<MonotonicityReport> {
    cbf_check_of(|l| ladder.chi_real(l), grid)
}

/// The same test for any candidate exponent.
pub fn cbf_check_of<F: Fn(f64) -> f64>(f: F, grid: &[f64]) -> Result<MonotonicityReport> {
    check_complete_monotonicity(|l| f(l) / l, 3, grid, MonotoneMode::CompletelyMonotone)
}

/// Range of `V(t) φ(t⁻²)^{1/2}` over `t_grid ⊂ (0, 1]`.
pub fn renewal_asymptotic_ratio(ladder: &LadderObjects, t_grid: &[f64]) -> Result<(f64, f64)> {
    let values = t_grid
        .iter()
        .map(|&t| Ok(ladder.renewal(t)? * ladder.phi.eval(1.0 / (t * t))?.sqrt()))
        .collect::<Result<Vec<_>>>()?;
    Ok(min_max(&values))
}

/// Upper bounds for `∫ G_{(0,r)}(x, y) dy`, i.e. for the mean exit time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntervalGreenBounds {
    /// `2 V(x) V(r)`
    pub plain: f64,
    /// `2 V(r) (V(x) ∧ V(r-x))`
    pub min_form: f64,
    /// `2 V(2r) (V(r+x) ∧ V(r-x))`, with `x` read as the offset from the
    /// centre of an interval of half-length `r`.
    pub symmetric: f64,
}

pub fn interval_green_mass_bound(
    ladder: &LadderObjects,
    r: f64,
    x: f64,
) -> Result<IntervalGreenBounds> {
    if !(x > 0.0 && x < r) {
        return Err(Error::Domain {
            what: "interval Green bound",
            name: "x",
            value: x,
        });
    }
    let v = |t: f64| ladder.renewal(t);
    let (vx, vr, vrx) = (v(x)?, v(r)?, v(r - x)?);
    Ok(IntervalGreenBounds {
        plain: 2.0 * vx * vr,
        min_form: 2.0 * vr * vx.min(vrx),
        symmetric: 2.0 * v(2.0 * r)? * v(r + x)?.min(vrx),
    })
}

/// `2 V(2r) V(r - |offset|)`, the mean exit time bound for a ball of radius `r`.
pub fn exit_time_upper_bound(ladder: &LadderObjects, r: f64, offset: f64) -> Result<f64> {
    let d = r - offset.abs();
    if !(d > 0.0) {
        return Ok(0.0);
    }
    Ok(2.0 * ladder.renewal(2.0 * r)? * ladder.renewal(d)?)
}

pub const CHI_CSV_HEADER: [&str; 4] = ["lambda", "chi", "sqrt_phi_lambda2", "ratio"];
pub const RENEWAL_CSV_HEADER: [&str; 3] = ["t", "v_ladder", "V"];
pub const GREEN_CSV_HEADER: [&str; 3] = ["x", "y", "G_halfline"];

pub fn chi_rows(ladder: &LadderObjects, lambdas: &[f64]) -> Result<Vec<[f64; 4]>> {
    lambdas
        .iter()
        .map(|&l| {
            let c = ladder.chi(l)?;
            let s = ladder.phi.eval(l * l)?.sqrt();
            Ok([l, c, s, c / s])
        })
        .collect()
}

pub fn renewal_rows(ladder: &LadderObjects, ts: &[f64]) -> Result<Vec<[f64; 3]>> {
    ts.iter()
        .map(|&t| Ok([t, ladder.v(t)?, ladder.renewal(t)?]))
        .collect()
}

pub fn green_rows(ladder: &LadderObjects, xs: &[f64], ys: &[f64]) -> Result<Vec<[f64; 3]>> {
    let mut rows = Vec::with_capacity(xs.len() * ys.len());
    for &x in xs {
        for &y in ys {
            rows.push([x, y, ladder.halfline_green(x, y)?]);
        }
    }
    Ok(rows)
}
