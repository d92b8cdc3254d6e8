use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "sbm",
    version,
    about = "Potential theory of subordinate Brownian motions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format for tables and reports.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Write output here instead of stdout; a manifest is written next to it.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Manifest path, overriding the default `<output>.manifest.json`.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,

    /// Worker threads.
    #[arg(long, global = true, env = "SBM_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate φ, ψ(ξ) = φ(ξ²) and ℓ(λ) = φ(λ)/λ^{α/2}.
    Phi {
        #[command(flatten)]
        phi: PhiArgs,
        #[command(flatten)]
        grid: LambdaGrid,
    },
    /// Potential density, Lévy density and tail.
    Density {
        #[command(flatten)]
        phi: PhiArgs,
        #[command(flatten)]
        grid: TimeGrid,
    },
    /// Green function and jump kernel of the subordinate Brownian motion.
    Kernel {
        #[command(flatten)]
        phi: PhiArgs,
        #[command(flatten)]
        grid: RadiusGrid,
        #[arg(long, default_value_t = 3)]
        dim: usize,
        /// Small-λ exponent used for the transience test in d ≤ 2.
        #[arg(long)]
        transience_gamma: Option<f64>,
    },
    /// One-dimensional ladder height quantities.
    Ladder {
        #[command(subcommand)]
        which: LadderCommand,
    },
    /// Pass/fail checks; exit code 1 on failure.
    Check {
        #[command(subcommand)]
        which: CheckCommand,
    },
    /// Monte Carlo experiments.
    Simulate {
        #[command(subcommand)]
        which: SimulateCommand,
    },
    /// Re-run the command recorded in a manifest.
    Rerun {
        /// Manifest written by an earlier run.
        from: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum LadderCommand {
    /// χ(λ) against √φ(λ²).
    Chi {
        #[command(flatten)]
        phi: PhiArgs,
        #[command(flatten)]
        grid: LambdaGrid,
    },
    /// Renewal density v and renewal function V.
    Renewal {
        #[command(flatten)]
        phi: PhiArgs,
        #[command(flatten)]
        grid: TimeGrid,
    },
    /// Green function of the half-line, on the product of `--x` and `--y`.
    Green {
        #[command(flatten)]
        phi: PhiArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        x: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        y: Vec<f64>,
    },
}

#[derive(Debug, Subcommand)]
pub enum CheckCommand {
    /// χ(λ)/√φ(λ²) within [e^{-π/2}, e^{π/2}].
    Sandwich {
        #[command(flatten)]
        phi: PhiArgs,
        #[command(flatten)]
        grid: LambdaGrid,
    },
    /// u(t) t φ(1/t) ≤ (1 - 1/e)⁻¹.
    Zahle {
        #[command(flatten)]
        phi: PhiArgs,
        #[arg(long, default_value_t = 1e-6)]
        tmin: f64,
        #[arg(long, default_value_t = 50)]
        points: usize,
    },
    /// Spreads of the four small-scale products and their refinement change.
    Asymptotic {
        #[command(flatten)]
        phi: PhiArgs,
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long, default_value_t = 25)]
        points: usize,
        #[arg(long)]
        transience_gamma: Option<f64>,
    },
    /// Doubling constant of j on (0, K) and shift constant on (1, 10K).
    Doubling {
        #[command(flatten)]
        phi: PhiArgs,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long, default_value_t = 1.0)]
        k: f64,
    },
    /// Harnack ratio of sector probes and its refinement stability.
    Harnack {
        #[command(flatten)]
        phi: PhiArgs,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 0.05)]
        r: f64,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Boundary Harnack spread and its refinement stability.
    Bhp {
        #[command(flatten)]
        phi: PhiArgs,
        #[arg(long, value_enum, default_value_t = DomainArg::Interval)]
        domain: DomainArg,
        #[arg(long, default_value_t = 0.25)]
        r: f64,
        #[command(flatten)]
        mc: McArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DomainArg {
    Interval,
    Halfdisk,
}

#[derive(Debug, Subcommand)]
pub enum SimulateCommand {
    /// Mean exit time from a ball.
    Exit {
        #[command(flatten)]
        phi: PhiArgs,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        /// Start point, comma separated; the centre by default.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        x0: Vec<f64>,
        #[command(flatten)]
        mc: McArgs,
        /// Small-jump truncation level.
        #[arg(long)]
        eps: Option<f64>,
        /// Grid step of the skeleton.
        #[arg(long)]
        step: Option<f64>,
        #[arg(long, value_enum, default_value_t = SamplerArg::Auto)]
        sampler: SamplerArg,
        /// Per-path CSV dump.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SamplerArg {
    /// Exact for stable exponents, truncated otherwise.
    Auto,
    Truncated,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct McArgs {
    #[arg(long, default_value_t = 4000, value_parser = clap::value_parser!(u64).range(1..))]
    pub paths: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Stable,
    Relativistic,
    Sum,
    LogUp,
    LogDown,
    GeometricExample,
}

#[derive(Debug, Clone, Args)]
pub struct PhiArgs {
    #[arg(
        long,
        value_enum,
        required_unless_present = "phi",
        conflicts_with = "phi"
    )]
    pub kind: Option<KindArg>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub m: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Number of terms of the geometric example; chosen automatically if absent.
    #[arg(long)]
    pub n: Option<u32>,
    /// Replace φ by its conjugate λ/φ(λ).
    #[arg(long)]
    pub conjugate: bool,
    /// Add a killing constant.
    #[arg(long)]
    pub kill: Option<f64>,
    /// Full JSON description, e.g. '{"kind":"stable","alpha":1}'.
    #[arg(long)]
    pub phi: Option<String>,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct LambdaGrid {
    /// Single point; overrides the grid.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, default_value_t = 1e-2)]
    pub lmin: f64,
    #[arg(long, default_value_t = 1e4)]
    pub lmax: f64,
    #[arg(long, default_value_t = 40)]
    pub points: usize,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct TimeGrid {
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long, default_value_t = 1e-6)]
    pub tmin: f64,
    #[arg(long, default_value_t = 1.0)]
    pub tmax: f64,
    #[arg(long, default_value_t = 50)]
    pub points: usize,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct RadiusGrid {
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long, default_value_t = 1e-3)]
    pub rmin: f64,
    #[arg(long, default_value_t = 1.0)]
    pub rmax: f64,
    #[arg(long, default_value_t = 25)]
    pub points: usize,
}
