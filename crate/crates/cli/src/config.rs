use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mzi_duality::duality::{DEFAULT_GRID, MIN_GRID};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "mzi",
    version,
    about = "Which-way / which-phase duality simulations for a Mach-Zehnder interferometer"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Predictive and retrodictive duality quantities for one configuration.
    Report {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        detector: DetectorArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Exit-port probability as the arm-B phase is scanned.
    Fringe {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        detector: DetectorArgs,
        /// Number of phase samples in [0, 2π).
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Retrodictive (P_WW, P_WP) pairs over an efficiency sweep.
    Frontier {
        #[command(flatten)]
        input: InputArgs,
        /// Number of equally spaced efficiencies in [0, 1].
        #[arg(long, default_value_t = 101)]
        points: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Seeded Monte Carlo run of a guessing game.
    Game {
        #[arg(value_enum)]
        protocol: GameKind,
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        detector: DetectorArgs,
        /// Number of trials.
        #[arg(long, default_value_t = 100_000)]
        n: u64,
        #[arg(long, env = "SIM_SEED", default_value_t = 0)]
        seed: u64,
        /// Alternative game: guess both bits every run.
        #[arg(long)]
        averaged: bool,
        /// Also write one CSV row per trial to this path.
        #[arg(long)]
        trials_csv: Option<PathBuf>,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GameKind {
    PredictiveWw,
    PredictiveWp,
    Retrodictive,
    Alternative,
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Which-way tilt α of the input family, radians (see --degrees).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha: f64,
    /// Which-phase angle φ of the input family, radians (see --degrees).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi: f64,
    /// Read every angle flag in degrees.
    #[arg(long)]
    pub degrees: bool,
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct DetectorArgs {
    /// Detector efficiency E in [0, 1].
    #[arg(long = "E", visible_alias = "efficiency")]
    pub efficiency: Option<f64>,
    /// Polarization rotation β; converted to E = |sin β|.
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Destination file; standard output if omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// Input echo, always in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Input {
    pub alpha: f64,
    pub phi: f64,
    /// Present only when the detector was given as a rotation angle.
    pub beta: Option<f64>,
    pub efficiency: Option<f64>,
}

/// A rejected parameter; reported as a usage error.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn finite(name: &str, x: f64) -> Result<f64, UsageError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(UsageError(format!("--{name} must be finite, got {x}")))
    }
}

fn in_range(name: &str, x: f64, lo: f64, hi: f64) -> Result<f64, UsageError> {
    let x = finite(name, x)?;
    if (lo..=hi).contains(&x) {
        Ok(x)
    } else {
        Err(UsageError(format!("--{name} = {x} is outside [{lo}, {hi}]")))
    }
}

impl InputArgs {
    fn angle(&self, x: f64) -> f64 {
        if self.degrees {
            x.to_radians()
        } else {
            x
        }
    }

    /// Validated `(α, φ)` in radians.
    pub fn family(&self) -> Result<(f64, f64), UsageError> {
        use std::f64::consts::{FRAC_PI_2, PI};
        let alpha = in_range("alpha", self.angle(finite("alpha", self.alpha)?), 0.0, FRAC_PI_2)?;
        let phi = in_range("phi", self.angle(finite("phi", self.phi)?), 0.0, PI)?;
        Ok((alpha, phi))
    }

    pub fn resolve(&self, detector: Option<&DetectorArgs>) -> Result<Input, UsageError> {
        let (alpha, phi) = self.family()?;
        let (beta, efficiency) = match detector {
            None => (None, None),
            Some(d) => match (d.efficiency, d.beta) {
                (Some(e), None) => (None, Some(in_range("E", e, 0.0, 1.0)?)),
                (None, Some(b)) => {
                    let beta = self.angle(finite("beta", b)?);
                    (Some(beta), Some(beta.sin().abs()))
                }
                _ => return Err(UsageError("exactly one of --E and --beta is required".into())),
            },
        };
        Ok(Input {
            alpha,
            phi,
            beta,
            efficiency,
        })
    }
}

pub fn check_grid(grid: usize) -> Result<usize, UsageError> {
    if grid >= MIN_GRID {
        Ok(grid)
    } else {
        Err(UsageError(format!("--grid must be at least {MIN_GRID}, got {grid}")))
    }
}

pub fn check_positive(name: &str, n: u64) -> Result<u64, UsageError> {
    if n >= 1 {
        Ok(n)
    } else {
        Err(UsageError(format!("--{name} must be at least 1")))
    }
}
