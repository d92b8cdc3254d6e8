//! Monte Carlo harmonic functions and the Harnack, Carleson and boundary
//! Harnack comparisons built on them.
//!
//! A probe is `u(x) = E_x[f(X_τ)]` for data `f` supported off the domain, so
//! it is regular harmonic there. All probes of a family are evaluated on the
//! same paths, and all grid points share each path.

use std::f64::consts::PI;

use serde::Serialize;

use crate::bernstein::Cbf;
use crate::error::{Error, Result};
use crate::montecarlo::{
    estimate_over, sample_exit, to_point, Domain, McEstimate, PathConfig, Point,
    SubordinatorSampler,
};

/// Boundary data on `ℝ^d`, vanishing inside the probe's domain.
pub type BoundaryData<'a> = &'a (dyn Fn(&Point) -> f64 + Sync);

/// Owned boundary data.
pub type BoxedData = Box<dyn Fn(&Point) -> f64 + Sync>;

pub struct HarmonicProbe<'a> {
    pub domain: Domain,
    pub grid: Vec<Point>,
    pub data: Vec<BoundaryData<'a>>,
}

/// `u(x)` estimates indexed `[data][grid point]`, plus the censored count.
pub fn mc_harmonic(
    sampler: &SubordinatorSampler,
    d: usize,
    probe: &HarmonicProbe<'_>,
    cfg: &PathConfig,
) -> Result<(Vec<Vec<McEstimate>>, usize)> {
    if let Some(x) = probe.grid.iter().find(|x| !probe.domain.contains(x)) {
        return Err(Error::Simulation(format!(
            "grid point {x:?} lies outside the domain"
        )));
    }
    let samples = sample_exit(sampler, d, &probe.domain, &probe.grid, cfg)?;
    let censored = samples
        .iter()
        .map(|s| s.iter().filter(|e| e.censored).count())
        .max();
    let est = probe
        .data
        .iter()
        .map(|f| {
            samples
                .iter()
                .map(|s| estimate_over(s, cfg.seed, |e| f(&e.exit_position)).0)
                .collect()
        })
        .collect();
    Ok((est, censored.unwrap_or(0)))
}

/// Witness-ball data for the domains used in boundary comparisons.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FatnessSpec {
    pub kappa: f64,
    pub big_r: f64,
}

/// `(0, 1)` with `Q = 0`, or the upper half of the unit disk with `Q = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryDomain {
    Interval,
    HalfDisk,
}

impl BoundaryDomain {
    pub fn dim(&self) -> usize {
        match self {
            BoundaryDomain::Interval => 1,
            BoundaryDomain::HalfDisk => 2,
        }
    }

    pub fn domain(&self) -> Domain {
        match self {
            BoundaryDomain::Interval => Domain::Interval { lo: 0.0, hi: 1.0 },
            BoundaryDomain::HalfDisk => Domain::HalfDisk {
                center: [0.0; 3],
                radius: 1.0,
            },
        }
    }

    /// `κ = 1/2`, `R = 1/4`.
    pub fn fatness(&self) -> FatnessSpec {
        FatnessSpec {
            kappa: 0.5,
            big_r: 0.25,
        }
    }

    /// `A_r(Q)`, the centre of a ball of radius `κ r` inside `D ∩ B(Q, r)`.
    pub fn witness(&self, r: f64) -> Point {
        match self {
            BoundaryDomain::Interval => [r / 2.0, 0.0, 0.0],
            BoundaryDomain::HalfDisk => [0.0, r / 2.0, 0.0],
        }
    }

    /// Points of `D ∩ B(Q, r/2)`; `level` doubles the resolution.
    pub fn inner_grid(&self, r: f64, level: u32) -> Vec<Point> {
        let n = 3 * 2usize.pow(level);
        let h = r / 2.0 / (n + 1) as f64;
        match self {
            BoundaryDomain::Interval => (1..=n).map(|k| [k as f64 * h, 0.0, 0.0]).collect(),
            BoundaryDomain::HalfDisk => {
                let mut pts = Vec::new();
                for k in 1..=n {
                    let rho = k as f64 * h;
                    for a in 1..=n {
                        let th = PI * a as f64 / (n + 1) as f64;
                        pts.push([rho * th.cos(), rho * th.sin(), 0.0]);
                    }
                }
                pts
            }
        }
    }

    /// Exit far through the outer boundary.
    pub fn far_probe(&self) -> impl Fn(&Point) -> f64 + Sync {
        let kind = *self;
        move |y: &Point| {
            let far = match kind {
                BoundaryDomain::Interval => y[0] >= 1.0,
                BoundaryDomain::HalfDisk => y[0] * y[0] + y[1] * y[1] >= 1.0,
            };
            if far {
                1.0
            } else {
                0.0
            }
        }
    }

    /// Exit below the flat side at depth at least `2r`.
    pub fn deep_probe(&self, r: f64) -> impl Fn(&Point) -> f64 + Sync {
        let kind = *self;
        move |y: &Point| {
            let c = match kind {
                BoundaryDomain::Interval => y[0],
                BoundaryDomain::HalfDisk => y[1],
            };
            if c <= -2.0 * r {
                1.0
            } else {
                0.0
            }
        }
    }
}

fn boundary_config(phi: &Cbf, r: f64, paths: usize, seed: u64) -> Result<PathConfig> {
    let near = PathConfig::for_radius(phi, r, paths, seed)?;
    let far = PathConfig::for_radius(phi, 1.0, paths, seed)?;
    Ok(PathConfig {
        horizon: far.horizon.max(near.horizon),
        ..near
    })
}

/// Relative difference `|b - a| / a`.
pub fn refinement_delta(a: f64, b: f64) -> f64 {
    (b - a).abs() / a.abs()
}

fn max_min_ratio(values: &[f64]) -> f64 {
    let (lo, hi) = crate::numerics::min_max(values);
    if lo > 0.0 {
        hi / lo
    } else {
        f64::INFINITY
    }
}

/// Grid in the closed ball `B(0, r)`: radii `k r / 2^level`, and in the
/// plane `8·2^{level-1}` angles per ring.
pub fn ball_grid(d: usize, r: f64, level: u32) -> Vec<Point> {
    let n = 2usize.pow(level.max(1));
    match d {
        1 => (0..=2 * n)
            .map(|k| [r * (k as f64 / n as f64 - 1.0), 0.0, 0.0])
            .collect(),
        _ => {
            let angles = 4 * n;
            let mut pts = vec![[0.0; 3]];
            for k in 1..=n {
                let rho = r * k as f64 / n as f64;
                for a in 0..angles {
                    let th = 2.0 * PI * (a as f64 + 0.5) / angles as f64;
                    pts.push([rho * th.cos(), rho * th.sin(), 0.0]);
                }
            }
            pts
        }
    }
}

/// Indicators of the sectors (half-lines in `d = 1`, quadrants in the
/// plane) crossed with the radial bands `[17r, 34r)` and `[34r, ∞)`.
pub fn sector_family(d: usize, r: f64) -> Vec<BoxedData> {
    let sectors = if d == 1 { 2 } else { 4 };
    let mut out: Vec<BoxedData> = Vec::new();
    for s in 0..sectors {
        for band in 0..2 {
            let (lo, hi) = if band == 0 {
                (17.0 * r, 34.0 * r)
            } else {
                (34.0 * r, f64::INFINITY)
            };
            out.push(Box::new(move |y: &Point| {
                let rho = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
                let sector = if d == 1 {
                    usize::from(y[0] < 0.0)
                } else {
                    let th = y[1].atan2(y[0]).rem_euclid(2.0 * PI);
                    ((th / (PI / 2.0)) as usize).min(3)
                };
                if sector == s && rho >= lo && rho < hi {
                    1.0
                } else {
                    0.0
                }
            }));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarnackReport {
    pub r: f64,
    /// Largest sup/inf ratio over the family.
    pub ratio: f64,
    pub per_probe: Vec<f64>,
    pub grid_points: usize,
    pub paths: usize,
    pub censored: usize,
}

/// Sup/inf over the `B(0, r)` grid of probes harmonic in `B(0, 17r)`.
#[allow(clippy::too_many_arguments)]
pub fn harnack_ratio(
    sampler: &SubordinatorSampler,
    phi: &Cbf,
    d: usize,
    r: f64,
    level: u32,
    paths: usize,
    seed: u64,
    scale_data: f64,
) -> Result<HarnackReport> {
    let family = sector_family(d, r);
    let scaled: Vec<BoxedData> = family
        .into_iter()
        .map(|f| Box::new(move |y: &Point| scale_data * f(y)) as BoxedData)
        .collect();
    let probe = HarmonicProbe {
        domain: Domain::Ball {
            center: [0.0; 3],
            radius: 17.0 * r,
        },
        grid: ball_grid(d, r, level),
        data: scaled.iter().map(|b| b.as_ref() as BoundaryData).collect(),
    };
    let cfg = PathConfig::for_radius(phi, 17.0 * r, paths, seed)?;
    let (est, censored) = mc_harmonic(sampler, d, &probe, &cfg)?;
    let per_probe: Vec<f64> = est
        .iter()
        .map(|row| max_min_ratio(&row.iter().map(|e| e.mean).collect::<Vec<_>>()))
        .collect();
    Ok(HarnackReport {
        r,
        ratio: per_probe.iter().copied().fold(0.0, f64::max),
        per_probe,
        grid_points: probe.grid.len(),
        paths,
        censored,
    })
}

/// A measured quantity at base resolution, with `paths × 4` and `grid × 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stability {
    pub base: f64,
    pub more_paths: f64,
    pub finer_grid: f64,
    pub delta_paths: f64,
    pub delta_grid: f64,
}

impl Stability {
    pub fn new(base: f64, more_paths: f64, finer_grid: f64) -> Self {
        Self {
            base,
            more_paths,
            finer_grid,
            delta_paths: refinement_delta(base, more_paths),
            delta_grid: refinement_delta(base, finer_grid),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.base.is_finite() && self.more_paths.is_finite() && self.finer_grid.is_finite()
    }

    /// Finite at all three resolutions and both changes below `tol`.
    pub fn is_stable(&self, tol: f64) -> bool {
        self.is_finite() && self.delta_paths < tol && self.delta_grid < tol
    }
}

pub fn harnack_stability(
    sampler: &SubordinatorSampler,
    phi: &Cbf,
    d: usize,
    r: f64,
    paths: usize,
    seed: u64,
) -> Result<Stability> {
    let base = harnack_ratio(sampler, phi, d, r, 1, paths, seed, 1.0)?.ratio;
    let more = harnack_ratio(sampler, phi, d, r, 1, 4 * paths, seed, 1.0)?.ratio;
    let finer = harnack_ratio(sampler, phi, d, r, 2, paths, seed, 1.0)?.ratio;
    Ok(Stability::new(base, more, finer))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BhpReport {
    pub domain: BoundaryDomain,
    pub r: f64,
    /// max/min over the grid of `(u/v)(x) · (v/u)(A_r)`.
    pub spread: f64,
    pub u_at_witness: McEstimate,
    pub v_at_witness: McEstimate,
    pub grid_points: usize,
    pub censored: usize,
}

/// Boundary Harnack spread for a probe pair `(u, v)`.
#[allow(clippy::too_many_arguments)]
pub fn bhp_ratio_with(
    sampler: &SubordinatorSampler,
    phi: &Cbf,
    kind: BoundaryDomain,
    r: f64,
    u: BoundaryData<'_>,
    v: BoundaryData<'_>,
    level: u32,
    paths: usize,
    seed: u64,
) -> Result<BhpReport> {
    let fat = kind.fatness();
    if !(r > 0.0 && r <= fat.big_r) {
        return Err(Error::Simulation(format!(
            "r = {r} must lie in (0, {}]",
            fat.big_r
        )));
    }
    let mut grid = vec![kind.witness(r)];
    grid.extend(kind.inner_grid(r, level));
    let probe = HarmonicProbe {
        domain: kind.domain(),
        grid,
        data: vec![u, v],
    };
    let cfg = boundary_config(phi, r, paths, seed)?;
    let (est, censored) = mc_harmonic(sampler, kind.dim(), &probe, &cfg)?;
    let (ua, va) = (est[0][0], est[1][0]);
    let q: Vec<f64> = est[0][1..]
        .iter()
        .zip(&est[1][1..])
        .map(|(a, b)| (a.mean / b.mean) * (va.mean / ua.mean))
        .collect();
    let spread = if q.iter().all(|x| x.is_finite() && *x > 0.0) {
        max_min_ratio(&q)
    } else {
        f64::INFINITY
    };
    Ok(BhpReport {
        domain: kind,
        r,
        spread,
        u_at_witness: ua,
        v_at_witness: va,
        grid_points: q.len(),
        censored,
    })
}

/// Spread for the default pair: far exit against deep exit below `Q`.
pub fn bhp_ratio_check(
    sampler: &SubordinatorSampler,
    phi: &Cbf,
    kind: BoundaryDomain,
    r: f64,
    level: u32,
    paths: usize,
    seed: u64,
) -> Result<BhpReport> {
    let u = kind.far_probe();
    let v = kind.deep_probe(r);
    bhp_ratio_with(sampler, phi, kind, r, &u, &v, level, paths, seed)
}

pub fn bhp_stability(
    sampler: &SubordinatorSampler,
    phi: &Cbf,
    kind: BoundaryDomain,
    r: f64,
    paths: usize,
    seed: u64,
) -> Result<Stability> {
    let base = bhp_ratio_check(sampler, phi, kind, r, 0, paths, seed)?.spread;
    let more = bhp_ratio_check(sampler, phi, kind, r, 0, 4 * paths, seed)?.spread;
    let finer = bhp_ratio_check(sampler, phi, kind, r, 1, paths, seed)?.spread;
    Ok(Stability::new(base, more, finer))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CarlesonReport {
    pub r: f64,
    /// `min_x u(A_r)/u(x)` over `x ∈ (0, r)`.
    pub floor: f64,
    pub max_relative_error: f64,
    pub status: CheckStatus,
}

/// Carleson comparison on `(0, 1)` at `Q = 0` for the far-exit probe.
///
/// Estimates whose relative standard error exceeds `max_rel_se` make the
/// report inconclusive rather than failed.
pub fn carleson_check(
    sampler: &SubordinatorSampler,
    phi: &Cbf,
    r: f64,
    paths: usize,
    seed: u64,
    max_rel_se: f64,
) -> Result<CarlesonReport> {
    let kind = BoundaryDomain::Interval;
    let mut grid = vec![kind.witness(r)];
    grid.extend((1..=8).map(|k| to_point(&[r * k as f64 / 9.0])));
    let u = kind.far_probe();
    let probe = HarmonicProbe {
        domain: kind.domain(),
        grid,
        data: vec![&u],
    };
    let cfg = boundary_config(phi, r, paths, seed)?;
    let (est, _) = mc_harmonic(sampler, 1, &probe, &cfg)?;
    let row = &est[0];
    let ua = row[0].mean;
    let floor = row[1..]
        .iter()
        .map(|e| ua / e.mean)
        .fold(f64::INFINITY, f64::min);
    let max_relative_error = row
        .iter()
        .map(|e| {
            if e.mean > 0.0 {
                e.relative_error()
            } else {
                f64::INFINITY
            }
        })
        .fold(0.0, f64::max);
    let status = if max_relative_error > max_rel_se {
        CheckStatus::Inconclusive
    } else if floor > 0.0 && floor.is_finite() {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    };
    Ok(CarlesonReport {
        r,
        floor,
        max_relative_error,
        status,
    })
}
