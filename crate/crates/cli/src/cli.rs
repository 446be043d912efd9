use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{parse_complex, RunConfig};
use crate::error::CliResult;

#[derive(Debug, Parser)]
#[command(name = "qdybe", version, about = "Verify dynamical Yang-Baxter machinery numerically")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags mirroring the run configuration. Complex values take `[re, im]`,
/// `re,im` or a bare real.
#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Flat `key = value` file with the same keys as the flags
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Rank n of gl_n (default 2)
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Modular parameter τ as re,im with Im τ > 0 (default 0,2)
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub tau: Option<String>,
    /// Step γ as re,im (default 0.31,0.07)
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub gamma: Option<String>,
    /// q for the explicit 2-form and the crossing fixture (default 0.6)
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub q: Option<String>,
    /// κ for the explicit 2-form (default 3)
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub kappa: Option<String>,
    /// Number of random samples (default 100)
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Seed for all random draws (default 0)
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Residuals at or below this pass (default 1e-9)
    #[arg(long, global = true)]
    pub tol_pass: Option<f64>,
    /// Residuals at or above this fail (default 1e-6)
    #[arg(long, global = true)]
    pub tol_fail: Option<f64>,
    /// Truncation order of power series (default 8)
    #[arg(long, global = true)]
    pub order: Option<usize>,
    /// Write the JSON report here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Include wall time in the JSON report (breaks byte-identical reruns)
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// QDYBE residual of Felder's R-matrix, or of a matrix sampled in a grid file
    VerifyQdybe {
        /// Grid file with `triples` (see `export-samples --closed`)
        #[arg(long)]
        grid_file: Option<PathBuf>,
    },
    /// Apply a gauge move to Felder's R-matrix and re-verify
    Gauge {
        #[command(subcommand)]
        action: GaugeAction,
    },
    /// Solve f(pz) = G(f(z)) as a power series
    SolveDifference(SolveArgs),
    /// Tabulate Felder's R-matrix on a (u, λ) grid; the grid file goes to --out
    ExportSamples {
        #[arg(long, default_value_t = 5)]
        grid_u: usize,
        #[arg(long, default_value_t = 5)]
        grid_lambda: usize,
        /// Instead of a product grid, record every point a QDYBE check at
        /// `--samples` random triples needs, together with the triples
        #[arg(long)]
        closed: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormKind {
    /// The explicit q-Gamma 2-form (needs --q, --kappa)
    Explicit,
    /// d_γ of a random diagonal 1-form
    RandomExact,
    /// A form that is not closed, to exercise the precondition
    NonClosed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScaleFn {
    /// c(u) = θ₁(u − γ)/θ₁(u)
    Theta,
    /// c(u) = 2
    Two,
    /// c(u) = 1
    One,
}

#[derive(Debug, Subcommand)]
pub enum GaugeAction {
    /// Multiply the α entries by a 2-form
    Twist {
        #[arg(long, value_enum, default_value_t = FormKind::RandomExact)]
        form: FormKind,
    },
    /// R(u, λ) ↦ R(au, bλ + μ), step γ/b
    Reparam {
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        a: String,
        #[arg(long, default_value = "2", allow_hyphen_values = true)]
        b: String,
        /// Semicolon-separated complex entries, one per coordinate (default 0)
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<String>,
    },
    /// R(u, λ) ↦ c(u) R(u, λ)
    Scale {
        #[arg(long, value_enum, default_value_t = ScaleFn::Theta)]
        scale_fn: ScaleFn,
    },
    /// Exactness witness identity for the explicit 2-form
    CheckExact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Fixture {
    /// G(y) = p y + y² on ℂ (default p = 3)
    Scalar,
    /// Quadratic map on ℂ² with p an eigenvalue of g₁ (default p = 4)
    Matrix2,
    /// Trigonometric gl₂ R-matrix against the crossing equation (uses --q)
    CrossingGl2,
    /// g₁ = diag(p, p²), resonant at order 2 (default p = 2)
    Resonant,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, value_enum, default_value_t = Fixture::Scalar, conflicts_with = "input")]
    pub fixture: Fixture,
    /// Series R(z) (JSON, from z^0) to check against the crossing equation
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Dilation factor for the scalar, matrix2 and resonant fixtures
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<String>,
    /// Comma-separated ⟨ρ, weight⟩ for the basis of V (crossing input)
    #[arg(long, allow_hyphen_values = true)]
    pub rho: Option<String>,
    /// Dual Coxeter number h∨ (crossing input)
    #[arg(long, default_value_t = 2)]
    pub hvee: u32,
    /// Ratio m of squared root lengths (crossing input)
    #[arg(long, default_value_t = 1)]
    pub mfactor: u32,
    /// Write the solved series here (JSON)
    #[arg(long)]
    pub series_out: Option<PathBuf>,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::VerifyQdybe { .. } => "verify-qdybe",
            Command::Gauge { action } => match action {
                GaugeAction::Twist { .. } => "gauge twist",
                GaugeAction::Reparam { .. } => "gauge reparam",
                GaugeAction::Scale { .. } => "gauge scale",
                GaugeAction::CheckExact => "gauge check-exact",
            },
            Command::SolveDifference(_) => "solve-difference",
            Command::ExportSamples { .. } => "export-samples",
        }
    }
}

impl CommonArgs {
    /// Defaults, then the config file, then explicit flags.
    pub fn resolve(&self, command: &str) -> CliResult<RunConfig> {
        let mut cfg = RunConfig::defaults(command);
        if let Some(path) = &self.config {
            cfg.load_file(path)?;
        }
        if let Some(v) = self.n {
            cfg.n = v;
        }
        for (flag, slot) in [
            (&self.tau, &mut cfg.tau),
            (&self.gamma, &mut cfg.gamma),
            (&self.q, &mut cfg.q),
            (&self.kappa, &mut cfg.kappa),
        ] {
            if let Some(text) = flag {
                *slot = parse_complex(text)?;
            }
        }
        if let Some(v) = self.samples {
            cfg.samples = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.tol_pass {
            cfg.tol_pass = v;
        }
        if let Some(v) = self.tol_fail {
            cfg.tol_fail = v;
        }
        if let Some(v) = self.order {
            cfg.order = v;
        }
        if let Some(v) = &self.out {
            cfg.out = Some(v.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
