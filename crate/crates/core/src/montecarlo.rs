//! Monte Carlo simulation of `X_t = B_{S_t}` with `B` generated by `Δ`.
//!
//! Given the subordinator increment `ΔS`, the spatial increment is
//! `√(2ΔS) · N(0, I)`. Stable subordinators are sampled exactly; other
//! exponents use jumps above `ε` from a tabulated quantile function plus the
//! compensating drift `∫₀^ε s μ(s) ds`.
//!
//! Each path draws from its own ChaCha8 stream `(seed, path index)`, and
//! estimates are reduced in path order, so results do not depend on the
//! number of worker threads. Several start points can share one path of
//! increments (the process is translation invariant), which gives common
//! random numbers across a grid of starts.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::bernstein::{Cbf, Kind};
use crate::error::{Error, Result};
use crate::numerics::special::gamma;
use crate::numerics::{log_grid, pairwise_sum};

/// A point of `ℝ^d` for `d ≤ 3`; unused coordinates stay zero.
pub type Point = [f64; 3];

pub const MAX_DIM: usize = 3;
const QUANTILE_KNOTS: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathConfig {
    /// Small-jump truncation level.
    pub epsilon: f64,
    pub horizon: f64,
    pub step: f64,
    pub seed: u64,
    pub paths: usize,
}

impl PathConfig {
    /// Step `1e-3` and horizon `100` in units of the exit time scale
    /// `1/φ(R⁻²)`; `ε = 1e-4 R²` keeps the small-jump bias scale free.
    pub fn for_radius(phi: &Cbf, radius: f64, paths: usize, seed: u64) -> Result<Self> {
        let scale = 1.0 / phi.eval(1.0 / (radius * radius))?;
        Ok(Self {
            epsilon: 1e-4 * (radius * radius).min(1.0),
            horizon: 100.0 * scale,
            step: 1e-3 * scale,
            seed,
            paths,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Simulation(format!(
                "epsilon {} must lie in (0, 1)",
                self.epsilon
            )));
        }
        if !(self.step > 0.0 && self.step <= self.horizon && self.horizon.is_finite()) {
            return Err(Error::Simulation(format!(
                "need 0 < step ({}) <= horizon ({})",
                self.step, self.horizon
            )));
        }
        if self.paths == 0 {
            return Err(Error::Simulation("paths must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: usize,
    pub seed: u64,
}

impl McEstimate {
    /// Sample mean and `sd/√n`, with pairwise summation in the given order.
    pub fn from_values(values: &[f64], seed: u64) -> Self {
        let n = values.len();
        if n == 0 {
            return Self {
                mean: f64::NAN,
                std_error: f64::NAN,
                n: 0,
                seed,
            };
        }
        let mean = pairwise_sum(values) / n as f64;
        let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
        let var = if n > 1 {
            pairwise_sum(&sq) / (n - 1) as f64
        } else {
            0.0
        };
        Self {
            mean,
            std_error: (var / n as f64).sqrt(),
            n,
            seed,
        }
    }

    pub fn relative_error(&self) -> f64 {
        self.std_error / self.mean.abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExitSample {
    pub tau: f64,
    pub exit_position: Point,
    pub exited_by_jump: bool,
    /// No exit before the horizon; `tau` is the horizon.
    pub censored: bool,
}

/// How subordinator increments are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerMode {
    ExactStable,
    Truncated,
}

#[derive(Debug, Clone)]
pub struct SubordinatorSampler {
    mode: SamplerMode,
    epsilon: f64,
    stable_rho: f64,
    /// `μ(ε, ∞)`
    rate: f64,
    /// `∫₀^ε s μ(s) ds`
    drift: f64,
    /// `(ln μ(s_k, ∞), ln s_k)` on a log grid of `s_k ≥ ε`.
    table: Vec<(f64, f64)>,
}

fn stable_index(phi: &Cbf) -> Option<f64> {
    match phi.kind() {
        Kind::Stable { alpha } => Some(*alpha),
        Kind::RelativisticStable { alpha, m } if *m == 0.0 => Some(*alpha),
        _ => None,
    }
}

fn check_simulable(phi: &Cbf) -> Result<()> {
    if phi.killing() > 0.0 || phi.drift() > 0.0 {
        return Err(Error::Simulation(format!(
            "{phi} is killed or has drift; only conservative driftless subordinators are simulated"
        )));
    }
    Ok(())
}

impl SubordinatorSampler {
    /// Exact sampling for stable exponents, truncation at `ε` otherwise.
    pub fn new(phi: &Cbf, epsilon: f64) -> Result<Self> {
        check_simulable(phi)?;
        match stable_index(phi) {
            Some(alpha) => Ok(Self {
                mode: SamplerMode::ExactStable,
                epsilon,
                stable_rho: alpha / 2.0,
                rate: 0.0,
                drift: 0.0,
                table: Vec::new(),
            }),
            None => Self::truncated(phi, epsilon),
        }
    }

    /// Compound Poisson jumps above `ε` plus drift compensation, for any kind.
    pub fn truncated(phi: &Cbf, epsilon: f64) -> Result<Self> {
        check_simulable(phi)?;
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::Simulation(format!(
                "epsilon {epsilon} must lie in (0, 1)"
            )));
        }
        let rate = phi.levy_tail(epsilon)?;
        let drift = phi.small_jump_mean(epsilon)?;
        // extend the table until the tail has dropped by 1e-12
        let mut top = 2.0 * epsilon;
        while phi.levy_tail(top)? > 1e-12 * rate && top < epsilon * 1e30 {
            top *= 10.0;
        }
        let table = log_grid(epsilon, top, QUANTILE_KNOTS)
            .into_par_iter()
            .map(|s| Ok((phi.levy_tail(s)?.ln(), s.ln())))
            .collect::<Result<Vec<_>>>()?;
        if table.windows(2).any(|w| !(w[1].0 < w[0].0)) {
            return Err(Error::NonFinite {
                what: "jump quantile table",
                at: epsilon,
                value: f64::NAN,
            });
        }
        Ok(Self {
            mode: SamplerMode::Truncated,
            epsilon,
            stable_rho: 0.0,
            rate,
            drift,
            table,
        })
    }

    pub fn mode(&self) -> SamplerMode {
        self.mode
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Jump rate `μ(ε, ∞)` and drift `∫₀^ε s μ` of the truncated scheme.
    pub fn truncation(&self) -> (f64, f64) {
        (self.rate, self.drift)
    }

    /// `S₁` for `E e^{-λ S₁} = e^{-λ^ρ}` (Kanter's representation).
    fn stable_unit<R: Rng>(&self, rng: &mut R) -> f64 {
        let rho = self.stable_rho;
        let u = PI * rng.random::<f64>();
        let e: f64 = rng.sample(Exp1);
        let a = (rho * u).sin() / u.sin().powf(1.0 / rho);
        let b = ((1.0 - rho) * u).sin() / e;
        a * b.powf((1.0 - rho) / rho)
    }

    /// One jump of size `> ε`, by inverting the tabulated tail.
    pub fn sample_jump<R: Rng>(&self, rng: &mut R) -> f64 {
        let u: f64 = 1.0 - rng.random::<f64>();
        let target = self.table[0].0 + u.ln();
        let idx = self.table.partition_point(|&(lt, _)| lt >= target);
        let (lo, hi) = if idx == 0 {
            return self.epsilon;
        } else if idx >= self.table.len() {
            // beyond the table: extend the last segment's power law
            let n = self.table.len();
            (self.table[n - 2], self.table[n - 1])
        } else {
            (self.table[idx - 1], self.table[idx])
        };
        let w = (target - lo.0) / (hi.0 - lo.0);
        (lo.1 + w * (hi.1 - lo.1)).exp()
    }

    /// `S_{t+dt} - S_t` in law.
    pub fn increment<R: Rng>(&self, dt: f64, rng: &mut R) -> f64 {
        if dt <= 0.0 {
            return 0.0;
        }
        match self.mode {
            SamplerMode::ExactStable => dt.powf(1.0 / self.stable_rho) * self.stable_unit(rng),
            SamplerMode::Truncated => {
                let mut s = self.drift * dt;
                let mut clock: f64 = rng.sample::<f64, _>(Exp1) / self.rate;
                while clock < dt {
                    s += self.sample_jump(rng);
                    clock += rng.sample::<f64, _>(Exp1) / self.rate;
                }
                s
            }
        }
    }
}

/// Free-function form of [`SubordinatorSampler::increment`].
pub fn sample_subordinator_increment<R: Rng>(
    sampler: &SubordinatorSampler,
    dt: f64,
    rng: &mut R,
) -> f64 {
    sampler.increment(dt, rng)
}

/// The generator for path `index` under `seed`.
pub fn path_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Domain {
    Ball {
        center: Point,
        radius: f64,
    },
    Interval {
        lo: f64,
        hi: f64,
    },
    /// `{|x - center| < radius, x₂ > center₂}` in the plane.
    HalfDisk {
        center: Point,
        radius: f64,
    },
    Empty,
}

impl Domain {
    pub fn ball(center: &[f64], radius: f64) -> Self {
        Domain::Ball {
            center: to_point(center),
            radius,
        }
    }

    pub fn contains(&self, x: &Point) -> bool {
        match self {
            Domain::Ball { center, radius } => dist2(x, center) < radius * radius,
            Domain::Interval { lo, hi } => x[0] > *lo && x[0] < *hi,
            Domain::HalfDisk { center, radius } => {
                dist2(x, center) < radius * radius && x[1] > center[1]
            }
            Domain::Empty => false,
        }
    }

    /// Lebesgue measure in dimension `d`.
    pub fn volume(&self, d: usize) -> f64 {
        match self {
            Domain::Ball { radius, .. } => unit_ball_volume(d) * radius.powi(d as i32),
            Domain::Interval { lo, hi } => hi - lo,
            Domain::HalfDisk { radius, .. } => 0.5 * PI * radius * radius,
            Domain::Empty => 0.0,
        }
    }
}

pub fn unit_ball_volume(d: usize) -> f64 {
    PI.powf(d as f64 / 2.0) / gamma(d as f64 / 2.0 + 1.0)
}

pub fn to_point(x: &[f64]) -> Point {
    let mut p = [0.0; 3];
    for (dst, src) in p.iter_mut().zip(x) {
        *dst = *src;
    }
    p
}

fn dist2(a: &Point, b: &Point) -> f64 {
    (0..3).map(|i| (a[i] - b[i]) * (a[i] - b[i])).sum()
}

fn add(a: &Point, b: &Point) -> Point {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

/// Exit of every start point along one path of increments.
///
/// `watch` is an optional target set: the returned flags say whether each
/// start visited it (on the skeleton) before exiting.
fn simulate_path(
    sampler: &SubordinatorSampler,
    d: usize,
    domain: &Domain,
    starts: &[Point],
    watch: Option<&Domain>,
    cfg: &PathConfig,
    index: u64,
) -> (Vec<ExitSample>, Vec<bool>) {
    let mut rng = path_rng(cfg.seed, index);
    let mut out: Vec<Option<ExitSample>> = starts
        .iter()
        .map(|x| {
            (!domain.contains(x)).then_some(ExitSample {
                tau: 0.0,
                exit_position: *x,
                exited_by_jump: false,
                censored: false,
            })
        })
        .collect();
    let mut hit: Vec<bool> = starts
        .iter()
        .map(|x| watch.is_some_and(|a| a.contains(x)))
        .collect();
    let mut alive = out.iter().filter(|o| o.is_none()).count();
    let mut pos: Point = [0.0; 3];
    let mut t = 0.0;
    let mut next_jump = match sampler.mode {
        SamplerMode::Truncated => rng.sample::<f64, _>(Exp1) / sampler.rate,
        SamplerMode::ExactStable => f64::INFINITY,
    };

    let advance = |pos: &mut Point, ds: f64, rng: &mut ChaCha8Rng| {
        let sd = (2.0 * ds).sqrt();
        for c in pos.iter_mut().take(d) {
            *c += sd * rng.sample::<f64, _>(StandardNormal);
        }
    };

    while alive > 0 && t < cfg.horizon {
        // evaluation points: the grid and the jump epochs in between
        let mut events: [(f64, bool); 2] = [(0.0, false); 2];
        let mut n_events = 0;
        let grid_t = (t + cfg.step).min(cfg.horizon);
        if next_jump < grid_t {
            events[0] = (next_jump, false);
            events[1] = (next_jump, true);
            n_events = 2;
        } else {
            events[0] = (grid_t, false);
            n_events += 1;
        }
        for &(te, is_jump) in &events[..n_events] {
            let by_jump = match sampler.mode {
                SamplerMode::ExactStable => {
                    let ds = sampler.increment(te - t, &mut rng);
                    advance(&mut pos, ds, &mut rng);
                    ds > sampler.epsilon
                }
                SamplerMode::Truncated => {
                    if is_jump {
                        let j = sampler.sample_jump(&mut rng);
                        advance(&mut pos, j, &mut rng);
                        next_jump += rng.sample::<f64, _>(Exp1) / sampler.rate;
                        true
                    } else {
                        advance(&mut pos, sampler.drift * (te - t), &mut rng);
                        false
                    }
                }
            };
            t = te;
            for (i, x0) in starts.iter().enumerate() {
                if out[i].is_some() {
                    continue;
                }
                let x = add(x0, &pos);
                if !domain.contains(&x) {
                    out[i] = Some(ExitSample {
                        tau: t,
                        exit_position: x,
                        exited_by_jump: by_jump,
                        censored: false,
                    });
                    alive -= 1;
                } else if let Some(a) = watch {
                    if !hit[i] && a.contains(&x) {
                        hit[i] = true;
                    }
                }
            }
        }
    }
    let samples = out
        .into_iter()
        .zip(starts)
        .map(|(o, x0)| {
            o.unwrap_or(ExitSample {
                tau: cfg.horizon,
                exit_position: add(x0, &pos),
                exited_by_jump: false,
                censored: true,
            })
        })
        .collect();
    (samples, hit)
}

fn check_setup(d: usize, cfg: &PathConfig, domain: &Domain) -> Result<()> {
    cfg.validate()?;
    if d == 0 || d > MAX_DIM {
        return Err(Error::Simulation(format!(
            "dimension {d} not in 1..={MAX_DIM}"
        )));
    }
    let ok = match domain {
        Domain::Interval { lo, hi } => d == 1 && lo < hi,
        Domain::HalfDisk { radius, .. } => d == 2 && *radius > 0.0,
        Domain::Ball { radius, .. } => *radius > 0.0,
        Domain::Empty => true,
    };
    if !ok {
        return Err(Error::Simulation(format!(
            "domain {domain:?} not valid in dimension {d}"
        )));
    }
    Ok(())
}

/// Exit samples indexed `[start][path]`; all starts share each path.
pub fn sample_exit(
    sampler: &SubordinatorSampler,
    d: usize,
    domain: &Domain,
    starts: &[Point],
    cfg: &PathConfig,
) -> Result<Vec<Vec<ExitSample>>> {
    check_setup(d, cfg, domain)?;
    let per_path: Vec<Vec<ExitSample>> = (0..cfg.paths as u64)
        .into_par_iter()
        .map(|i| simulate_path(sampler, d, domain, starts, None, cfg, i).0)
        .collect();
    Ok(transpose(per_path, starts.len()))
}

fn transpose<T: Copy>(rows: Vec<Vec<T>>, width: usize) -> Vec<Vec<T>> {
    (0..width)
        .map(|k| rows.iter().map(|r| r[k]).collect())
        .collect()
}

/// Estimate of `E[f(sample)]` over uncensored samples, and the censored count.
pub fn estimate_over<F: Fn(&ExitSample) -> f64>(
    samples: &[ExitSample],
    seed: u64,
    f: F,
) -> (McEstimate, usize) {
    let values: Vec<f64> = samples.iter().filter(|s| !s.censored).map(f).collect();
    (
        McEstimate::from_values(&values, seed),
        samples.len() - values.len(),
    )
}

/// Mean exit time from each start, excluding censored paths.
pub fn mean_exit_times(
    sampler: &SubordinatorSampler,
    d: usize,
    domain: &Domain,
    starts: &[Point],
    cfg: &PathConfig,
) -> Result<Vec<(McEstimate, usize)>> {
    Ok(sample_exit(sampler, d, domain, starts, cfg)?
        .iter()
        .map(|s| estimate_over(s, cfg.seed, |e| e.tau))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExceedanceRow {
    pub t: f64,
    pub estimate: McEstimate,
    /// `estimate / (φ(r⁻²) t)`
    pub ratio: f64,
}

/// `P(sup_{s≤t} |X_s - X_0| > r)` for each `t`, from one set of paths.
pub fn exceedance_probability(
    sampler: &SubordinatorSampler,
    phi: &Cbf,
    d: usize,
    r: f64,
    ts: &[f64],
    cfg: &PathConfig,
) -> Result<Vec<ExceedanceRow>> {
    let t_max = ts.iter().copied().fold(0.0, f64::max);
    if t_max <= 0.0 {
        return Ok(ts
            .iter()
            .map(|&t| ExceedanceRow {
                t,
                estimate: McEstimate {
                    mean: 0.0,
                    std_error: 0.0,
                    n: cfg.paths,
                    seed: cfg.seed,
                },
                ratio: 0.0,
            })
            .collect());
    }
    let cfg = PathConfig {
        horizon: t_max,
        step: cfg.step.min(t_max),
        ..*cfg
    };
    let domain = Domain::Ball {
        center: [0.0; 3],
        radius: r,
    };
    let samples = sample_exit(sampler, d, &domain, &[[0.0; 3]], &cfg)?.remove(0);
    let scale = phi.eval(1.0 / (r * r))?;
    Ok(ts
        .iter()
        .map(|&t| {
            let values: Vec<f64> = samples
                .iter()
                .map(|s| if !s.censored && s.tau <= t { 1.0 } else { 0.0 })
                .collect();
            let estimate = McEstimate::from_values(&values, cfg.seed);
            let ratio = if t > 0.0 {
                estimate.mean / (scale * t)
            } else {
                0.0
            };
            ExceedanceRow { t, estimate, ratio }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExitTimeRow {
    pub r: f64,
    pub offset: f64,
    pub estimate: McEstimate,
    pub censored: usize,
    /// `E_x[τ] φ(r⁻²)`
    pub scaled: f64,
    /// `2 V(2r) V(r - |x|)`
    pub bound: f64,
    /// `mean ≤ bound + 3 SE`
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExitTimeReport {
    pub rows: Vec<ExitTimeRow>,
    /// Range of the scaled centre values across radii.
    pub window: (f64, f64),
    pub pass: bool,
}

/// Mean exit times from `B(0, r)` at offsets `x·e₁` against `2V(2r)V(r-|x|)`.
///
/// `offsets` are fractions of `r`. `bound` supplies `2V(2r)V(r-|x|)`.
#[allow(clippy::too_many_arguments)]
pub fn exit_time_bounds_check<B>(
    sampler: &SubordinatorSampler,
    phi: &Cbf,
    d: usize,
    r_grid: &[f64],
    offsets: &[f64],
    paths: usize,
    seed: u64,
    bound: B,
) -> Result<ExitTimeReport>
where
    B: Fn(f64, f64) -> Result<f64>,
{
    let mut rows = Vec::new();
    let mut centre = Vec::new();
    for &r in r_grid {
        let cfg = PathConfig::for_radius(phi, r, paths, seed)?;
        let domain = Domain::Ball {
            center: [0.0; 3],
            radius: r,
        };
        let starts: Vec<Point> = offsets.iter().map(|&f| [f * r, 0.0, 0.0]).collect();
        let est = mean_exit_times(sampler, d, &domain, &starts, &cfg)?;
        let scale = phi.eval(1.0 / (r * r))?;
        for (&f, (e, censored)) in offsets.iter().zip(est) {
            let b = bound(r, f * r)?;
            if f == 0.0 {
                centre.push(e.mean * scale);
            }
            rows.push(ExitTimeRow {
                r,
                offset: f * r,
                estimate: e,
                censored,
                scaled: e.mean * scale,
                bound: b,
                pass: e.mean <= b + 3.0 * e.std_error,
            });
        }
    }
    let window = if centre.is_empty() {
        (f64::NAN, f64::NAN)
    } else {
        crate::numerics::min_max(&centre)
    };
    let pass = rows.iter().all(|r| r.pass) && (centre.is_empty() || window.0 > 0.0);
    Ok(ExitTimeReport { rows, window, pass })
}

/// `E_x[τ_{B(0,r)}]` for the isotropic stable process with `φ(λ) = λ^{α/2}`.
pub fn stable_ball_mean_exit_time(d: usize, alpha: f64, r: f64, x_norm: f64) -> f64 {
    let df = d as f64;
    let c =
        gamma(df / 2.0) / (2f64.powf(alpha) * gamma(1.0 + alpha / 2.0) * gamma((df + alpha) / 2.0));
    c * (r * r - x_norm * x_norm).max(0.0).powf(alpha / 2.0)
}

/// Exit density from `B(0, r)` at `y` (`|y| > r`) started at `x`, stable case.
pub fn stable_ball_poisson_kernel(d: usize, alpha: f64, r: f64, x: &[f64], y: &[f64]) -> f64 {
    let df = d as f64;
    let c = gamma(df / 2.0) * PI.powf(-df / 2.0 - 1.0) * (PI * alpha / 2.0).sin();
    let n2 = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>();
    let (x2, y2) = (n2(x), n2(y));
    if y2 <= r * r || x2 >= r * r {
        return 0.0;
    }
    let xy: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
    c * ((r * r - x2) / (y2 - r * r)).powf(alpha / 2.0) * xy.powf(-df / 2.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExitHistogram {
    pub edges: Vec<f64>,
    /// Empirical density per bin.
    pub density: Vec<f64>,
    pub std_error: Vec<f64>,
    pub counts: Vec<usize>,
    pub n: usize,
    pub censored: usize,
}

impl ExitHistogram {
    pub fn bin_mass(&self, k: usize) -> f64 {
        self.density[k] * (self.edges[k + 1] - self.edges[k])
    }
}

/// Histogram of a scalar function of the exit position (the coordinate in
/// `d = 1`, the radius otherwise), normalized by all uncensored paths.
pub fn exit_distribution_histogram(
    sampler: &SubordinatorSampler,
    d: usize,
    domain: &Domain,
    x0: &Point,
    edges: &[f64],
    cfg: &PathConfig,
) -> Result<ExitHistogram> {
    if edges.len() < 2 || edges.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Simulation("histogram edges must increase".into()));
    }
    let samples = sample_exit(sampler, d, domain, &[*x0], cfg)?.remove(0);
    let kept: Vec<&ExitSample> = samples.iter().filter(|s| !s.censored).collect();
    let n = kept.len();
    let bins = edges.len() - 1;
    let mut counts = vec![0usize; bins];
    for s in &kept {
        let y = if d == 1 {
            s.exit_position[0]
        } else {
            dist2(&s.exit_position, &[0.0; 3]).sqrt()
        };
        if y >= edges[0] && y < edges[bins] {
            let k = edges.partition_point(|&e| e <= y) - 1;
            counts[k] += 1;
        }
    }
    let (density, std_error) = counts
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            let w = edges[k + 1] - edges[k];
            let p = c as f64 / n as f64;
            (p / w, (p * (1.0 - p) / n as f64).sqrt() / w)
        })
        .unzip();
    Ok(ExitHistogram {
        edges: edges.to_vec(),
        density,
        std_error,
        counts,
        n,
        censored: samples.len() - n,
    })
}

/// `P_y(T_A < τ_B)` on the skeleton, for each start `y`.
pub fn hitting_before_exit(
    sampler: &SubordinatorSampler,
    d: usize,
    target: &Domain,
    enclosing: &Domain,
    starts: &[Point],
    cfg: &PathConfig,
) -> Result<Vec<McEstimate>> {
    check_setup(d, cfg, enclosing)?;
    let flags: Vec<Vec<bool>> = (0..cfg.paths as u64)
        .into_par_iter()
        .map(|i| simulate_path(sampler, d, enclosing, starts, Some(target), cfg, i).1)
        .collect();
    Ok(transpose(flags, starts.len())
        .iter()
        .map(|f| {
            let v: Vec<f64> = f.iter().map(|&h| if h { 1.0 } else { 0.0 }).collect();
            McEstimate::from_values(&v, cfg.seed)
        })
        .collect())
}
