use serde_json::json;

use sbm_core::densities::{
    default_small_t_grid, density_table, mu_asymptotic_ratio, u_asymptotic_ratio,
    zahle_upper_check, DensityEvaluator, DENSITY_CSV_HEADER, ZAHLE_CONSTANT,
};
use sbm_core::harnack::{
    bhp_ratio_check, bhp_stability, harnack_ratio, harnack_stability, BoundaryDomain,
};
use sbm_core::kernels::{
    default_r_grid, g_asymptotic_ratio, j_asymptotic_ratio, j_doubling_and_shift, KernelEvaluator,
    RadialKernelTable, KERNEL_CSV_HEADER,
};
use sbm_core::ladder::{
    chi_rows, chi_sandwich_check, green_rows, renewal_rows, sandwich_bounds, LadderObjects,
    CHI_CSV_HEADER, GREEN_CSV_HEADER, RENEWAL_CSV_HEADER,
};
use sbm_core::montecarlo::{
    estimate_over, sample_exit, to_point, Domain, PathConfig, SubordinatorSampler, MAX_DIM,
};
use sbm_core::numerics::{log_grid, refine_log_grid};
use sbm_core::Cbf;

use crate::args::*;
use crate::error::CliError;
use crate::output::{fmt_f64, Output, Table};

type Res<T> = Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> Res<T> {
    Err(CliError::Usage(msg.into()))
}

fn need(v: Option<f64>, flag: &str, kind: &str) -> Res<f64> {
    v.ok_or_else(|| CliError::Usage(format!("--kind {kind} needs --{flag}")))
}

pub fn build_phi(a: &PhiArgs) -> Res<Cbf> {
    let mut phi = match (&a.phi, a.kind) {
        (Some(json), _) => {
            Cbf::from_json(json).map_err(|e| CliError::Usage(format!("malformed --phi: {e}")))?
        }
        (None, Some(kind)) => {
            let alpha = need(a.alpha, "alpha", "any")?;
            match kind {
                KindArg::Stable => Cbf::stable(alpha)?,
                KindArg::Relativistic => Cbf::relativistic(alpha, need(a.m, "m", "relativistic")?)?,
                KindArg::Sum => Cbf::sum_of_stables(alpha, need(a.beta, "beta", "sum")?)?,
                KindArg::LogUp => Cbf::log_up(alpha, need(a.gamma, "gamma", "log_up")?)?,
                KindArg::LogDown => Cbf::log_down(alpha, need(a.beta, "beta", "log_down")?)?,
                KindArg::GeometricExample => match a.n {
                    Some(n) => Cbf::geometric_example(alpha, n)?,
                    None => Cbf::geometric_example_auto(alpha)?,
                },
            }
        }
        (None, None) => return usage("one of --kind or --phi is required"),
    };
    if a.conjugate {
        phi = phi.conjugate()?;
    }
    if let Some(k) = a.kill {
        phi = phi.killed(k)?;
    }
    Ok(phi)
}

fn grid(single: Option<f64>, lo: f64, hi: f64, points: usize) -> Res<Vec<f64>> {
    if let Some(x) = single {
        return Ok(vec![x]);
    }
    if !(lo > 0.0 && hi >= lo && points >= 1) || (points == 1 && hi != lo) {
        return usage(format!("bad grid: [{lo}, {hi}] with {points} points"));
    }
    Ok(log_grid(lo, hi, points))
}

fn check_dim(d: usize) -> Res<()> {
    if (1..=MAX_DIM).contains(&d) {
        Ok(())
    } else {
        usage(format!("--dim must lie in 1..={MAX_DIM}"))
    }
}

fn rows<const N: usize>(r: Vec<[f64; N]>) -> Vec<Vec<f64>> {
    r.into_iter().map(|a| a.to_vec()).collect()
}

/// Seed recorded in the manifest, if the command has one.
pub fn seed_of(cmd: &Command) -> Option<u64> {
    match cmd {
        Command::Check {
            which: CheckCommand::Harnack { mc, .. } | CheckCommand::Bhp { mc, .. },
        }
        | Command::Simulate {
            which: SimulateCommand::Exit { mc, .. },
        } => Some(mc.seed),
        _ => None,
    }
}

pub fn name_of(cmd: &Command) -> &'static str {
    match cmd {
        Command::Phi { .. } => "phi",
        Command::Density { .. } => "density",
        Command::Kernel { .. } => "kernel",
        Command::Ladder { which } => match which {
            LadderCommand::Chi { .. } => "ladder chi",
            LadderCommand::Renewal { .. } => "ladder renewal",
            LadderCommand::Green { .. } => "ladder green",
        },
        Command::Check { which } => match which {
            CheckCommand::Sandwich { .. } => "check sandwich",
            CheckCommand::Zahle { .. } => "check zahle",
            CheckCommand::Asymptotic { .. } => "check asymptotic",
            CheckCommand::Doubling { .. } => "check doubling",
            CheckCommand::Harnack { .. } => "check harnack",
            CheckCommand::Bhp { .. } => "check bhp",
        },
        Command::Simulate { .. } => "simulate exit",
        Command::Rerun { .. } => "rerun",
    }
}

pub fn run(cmd: &Command) -> Res<Output> {
    match cmd {
        Command::Phi { phi, grid: g } => {
            let phi = build_phi(phi)?;
            let profile = phi.reg_var_profile();
            let rows = grid(g.lambda, g.lmin, g.lmax, g.points)?
                .into_iter()
                .map(|l| Ok(vec![l, phi.eval(l)?, phi.eval(l * l)?, profile.ell(l)]))
                .collect::<Res<_>>()?;
            Ok(Output::Table(Table::new(
                &["lambda", "phi", "psi", "ell"],
                rows,
            )))
        }
        Command::Density { phi, grid: g } => {
            let ev = DensityEvaluator::new(build_phi(phi)?);
            let ts = grid(g.t, g.tmin, g.tmax, g.points)?;
            let rows = density_table(&ev, &ts)?
                .iter()
                .map(|r| r.values().to_vec())
                .collect();
            Ok(Output::Table(Table::new(&DENSITY_CSV_HEADER, rows)))
        }
        Command::Kernel {
            phi,
            grid: g,
            dim,
            transience_gamma,
        } => {
            check_dim(*dim)?;
            let ev = kernel_evaluator(build_phi(phi)?, *dim, *transience_gamma);
            let radii = grid(g.r, g.rmin, g.rmax, g.points)?;
            let rows = RadialKernelTable::build(&ev, &radii)?
                .rows()?
                .iter()
                .map(|r| r.values().to_vec())
                .collect();
            Ok(Output::Table(Table::new(&KERNEL_CSV_HEADER, rows)))
        }
        Command::Ladder { which } => ladder(which),
        Command::Check { which } => check(which),
        Command::Simulate { which } => simulate(which),
        Command::Rerun { .. } => unreachable!("rerun is resolved before dispatch"),
    }
}

fn kernel_evaluator(phi: Cbf, d: usize, gamma: Option<f64>) -> KernelEvaluator {
    let ev = KernelEvaluator::new(phi, d);
    match gamma {
        Some(g) => ev.with_gamma(g),
        None => ev,
    }
}

fn ladder(which: &LadderCommand) -> Res<Output> {
    match which {
        LadderCommand::Chi { phi, grid: g } => {
            let l = LadderObjects::new(build_phi(phi)?);
            let lambdas = grid(g.lambda, g.lmin, g.lmax, g.points)?;
            Ok(Output::Table(Table::new(
                &CHI_CSV_HEADER,
                rows(chi_rows(&l, &lambdas)?),
            )))
        }
        LadderCommand::Renewal { phi, grid: g } => {
            let l = LadderObjects::new(build_phi(phi)?);
            let ts = grid(g.t, g.tmin, g.tmax, g.points)?;
            Ok(Output::Table(Table::new(
                &RENEWAL_CSV_HEADER,
                rows(renewal_rows(&l, &ts)?),
            )))
        }
        LadderCommand::Green { phi, x, y } => {
            let l = LadderObjects::new(build_phi(phi)?);
            if x.iter().chain(y).any(|v| !(*v > 0.0)) {
                return usage("--x and --y must be positive");
            }
            Ok(Output::Table(Table::new(
                &GREEN_CSV_HEADER,
                rows(green_rows(&l, x, y)?),
            )))
        }
    }
}

fn report(body: serde_json::Value, pass: bool) -> Res<Output> {
    Ok(Output::Report {
        body,
        pass: Some(pass),
    })
}

/// Relative change of a spread under refinement.
fn change(a: f64, b: f64) -> f64 {
    (b - a).abs() / a
}

fn check(which: &CheckCommand) -> Res<Output> {
    match which {
        CheckCommand::Sandwich { phi, grid: g } => {
            let phi = build_phi(phi)?;
            let l = LadderObjects::new(phi.clone());
            let rep = chi_sandwich_check(&l, &grid(g.lambda, g.lmin, g.lmax, g.points)?)?;
            let (lo, hi) = sandwich_bounds();
            report(
                json!({"phi": phi.to_string(), "min": rep.min, "max": rep.max,
                       "lower": lo, "upper": hi, "pass": rep.pass}),
                rep.pass,
            )
        }
        CheckCommand::Zahle { phi, tmin, points } => {
            let phi = build_phi(phi)?;
            let ev = DensityEvaluator::new(phi.clone());
            let max = zahle_upper_check(&ev, &grid(None, *tmin, 1.0, *points)?)?;
            let pass = max <= ZAHLE_CONSTANT + 1e-6;
            report(
                json!({"phi": phi.to_string(), "max": max, "bound": ZAHLE_CONSTANT, "pass": pass}),
                pass,
            )
        }
        CheckCommand::Asymptotic {
            phi,
            dim,
            points,
            transience_gamma,
        } => {
            check_dim(*dim)?;
            if *points < 2 {
                return usage("--points must be at least 2");
            }
            let phi = build_phi(phi)?;
            let ev = DensityEvaluator::new(phi.clone());
            let kev = kernel_evaluator(phi.clone(), *dim, *transience_gamma);
            let t = default_small_t_grid();
            let t2 = refine_log_grid(1e-6, 1.0, t.len());
            let r = default_r_grid(*points);
            let r2 = refine_log_grid(1e-3, 1.0, *points);
            let pairs = [
                (
                    "u",
                    u_asymptotic_ratio(&ev, &t)?.spread(),
                    u_asymptotic_ratio(&ev, &t2)?.spread(),
                ),
                (
                    "mu",
                    mu_asymptotic_ratio(&phi, &t)?.spread(),
                    mu_asymptotic_ratio(&phi, &t2)?.spread(),
                ),
                (
                    "G",
                    g_asymptotic_ratio(&kev, &r)?.spread(),
                    g_asymptotic_ratio(&kev, &r2)?.spread(),
                ),
                (
                    "J",
                    j_asymptotic_ratio(&kev, &r)?.spread(),
                    j_asymptotic_ratio(&kev, &r2)?.spread(),
                ),
            ];
            let mut pass = true;
            let mut body = serde_json::Map::new();
            body.insert("phi".into(), json!(phi.to_string()));
            for (name, s, s2) in pairs {
                let delta = change(s, s2);
                let ok = s < 1e3 && s2 < 1e3 && delta < 0.05;
                pass &= ok;
                body.insert(
                    name.into(),
                    json!({"spread": s, "refined_spread": s2, "refinement_delta": delta, "pass": ok}),
                );
            }
            body.insert("pass".into(), json!(pass));
            report(body.into(), pass)
        }
        CheckCommand::Doubling { phi, dim, k } => {
            check_dim(*dim)?;
            let phi = build_phi(phi)?;
            let ev = KernelEvaluator::new(phi.clone(), *dim);
            let (c4, c5) = j_doubling_and_shift(&ev, *k)?;
            let pass = c4.is_finite() && c5.is_finite() && c4 >= 1.0 && c5 >= 1.0;
            report(
                json!({"phi": phi.to_string(), "doubling": c4, "shift": c5, "pass": pass}),
                pass,
            )
        }
        CheckCommand::Harnack { phi, dim, r, mc } => {
            check_dim(*dim)?;
            let phi = build_phi(phi)?;
            let cfg = PathConfig::for_radius(&phi, 17.0 * r, mc.paths as usize, mc.seed)?;
            let sampler = SubordinatorSampler::new(&phi, cfg.epsilon)?;
            let st = harnack_stability(&sampler, &phi, *dim, *r, mc.paths as usize, mc.seed)?;
            let base = harnack_ratio(&sampler, &phi, *dim, *r, 1, mc.paths as usize, mc.seed, 1.0)?;
            let pass = st.is_stable(0.2);
            report(
                json!({"phi": phi.to_string(), "ratio": st.base,
                       "refinement_delta": st.delta_paths.max(st.delta_grid),
                       "stability": st, "per_probe": base.per_probe,
                       "censored": base.censored, "pass": pass}),
                pass,
            )
        }
        CheckCommand::Bhp { phi, domain, r, mc } => {
            let phi = build_phi(phi)?;
            let kind = match domain {
                DomainArg::Interval => BoundaryDomain::Interval,
                DomainArg::Halfdisk => BoundaryDomain::HalfDisk,
            };
            let cfg = PathConfig::for_radius(&phi, *r, mc.paths as usize, mc.seed)?;
            let sampler = SubordinatorSampler::new(&phi, cfg.epsilon)?;
            let st = bhp_stability(&sampler, &phi, kind, *r, mc.paths as usize, mc.seed)?;
            let base = bhp_ratio_check(&sampler, &phi, kind, *r, 0, mc.paths as usize, mc.seed)?;
            let pass = st.is_stable(0.2) && st.base < 10.0;
            report(
                json!({"phi": phi.to_string(), "ratio": st.base,
                       "refinement_delta": st.delta_paths.max(st.delta_grid),
                       "stability": st, "u_at_witness": base.u_at_witness,
                       "v_at_witness": base.v_at_witness, "censored": base.censored,
                       "pass": pass}),
                pass,
            )
        }
    }
}

fn simulate(which: &SimulateCommand) -> Res<Output> {
    let SimulateCommand::Exit {
        phi,
        dim,
        radius,
        x0,
        mc,
        eps,
        step,
        sampler,
        dump,
    } = which;
    check_dim(*dim)?;
    if !(*radius > 0.0) {
        return usage("--radius must be positive");
    }
    let start = match x0.len() {
        0 => vec![0.0; *dim],
        n if n == *dim => x0.clone(),
        n => return usage(format!("--x0 has {n} coordinates, --dim is {dim}")),
    };
    let phi = build_phi(phi)?;
    let mut cfg = PathConfig::for_radius(&phi, *radius, mc.paths as usize, mc.seed)?;
    if let Some(e) = eps {
        cfg.epsilon = *e;
    }
    if let Some(s) = step {
        cfg.step = *s;
    }
    cfg.validate().or_else(|e| usage(e.to_string()))?;
    let domain = Domain::ball(&vec![0.0; *dim], *radius);
    if !domain.contains(&to_point(&start)) {
        return usage("--x0 must lie inside the ball");
    }
    let s = match sampler {
        SamplerArg::Auto => SubordinatorSampler::new(&phi, cfg.epsilon)?,
        SamplerArg::Truncated => SubordinatorSampler::truncated(&phi, cfg.epsilon)?,
    };
    let samples = sample_exit(&s, *dim, &domain, &[to_point(&start)], &cfg)?;
    let samples = &samples[0];
    let (est, censored) = estimate_over(samples, cfg.seed, |e| e.tau);
    if let Some(path) = dump {
        let mut w = csv::Writer::from_path(path)?;
        let mut header = vec!["path".to_string(), "tau".to_string()];
        header.extend((1..=*dim).map(|k| format!("exit_{k}")));
        header.extend(["by_jump".to_string(), "censored".to_string()]);
        w.write_record(&header)?;
        for (i, e) in samples.iter().enumerate() {
            let mut rec = vec![i.to_string(), fmt_f64(e.tau)];
            rec.extend(e.exit_position[..*dim].iter().map(|&x| fmt_f64(x)));
            rec.push(u8::from(e.exited_by_jump).to_string());
            rec.push(u8::from(e.censored).to_string());
            w.write_record(&rec)?;
        }
        w.flush()?;
    }
    Ok(Output::Report {
        body: json!({"mean": est.mean, "std_error": est.std_error, "n": est.n,
                     "censored": censored}),
        pass: None,
    })
}
