//! Command-line argument definitions for the `shellrecon` binary.

use clap::{Args, Parser, Subcommand, ValueEnum};
use shellrecon::Dimension;
use std::path::PathBuf;

/// Parse `2` or `3` into a [`Dimension`].
pub fn parse_dimension(s: &str) -> Result<Dimension, String> {
    match s.trim() {
        "2" => Ok(Dimension::Two),
        "3" => Ok(Dimension::Three),
        other => Err(format!("dimension must be 2 or 3, got `{other}`")),
    }
}

/// Neumann-to-Dirichlet maps for core-shell media: forward solves, symbol
/// tables, coefficient recovery, indistinguishable pairs, and
/// self-verification.
#[derive(Debug, Parser)]
#[command(name = "shellrecon", version, max_term_width = 100)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Apply a configuration's ND map to Neumann boundary data
    Forward(ForwardArgs),
    /// Emit per-mode multiplier symbols, or difference-norm sweeps, as CSV
    Ndmap(NdmapArgs),
    /// Recover the core coefficient from one boundary measurement
    Invert(InvertArgs),
    /// Find core coefficients indistinguishable from a reference on one mode
    Nonuniq(NonuniqArgs),
    /// Run the numerical verification suites and print a pass/fail table
    Verify(VerifyArgs),
}

/// What the `forward` subcommand writes to its main output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    /// The Dirichlet trace alone
    Trace,
    /// The full measurement: applied Neumann data plus recorded trace
    Measurement,
}

#[derive(Debug, Args)]
pub struct ForwardArgs {
    /// Spatial dimension (2 or 3)
    #[arg(long = "dim", visible_alias = "dimension", value_parser = parse_dimension, default_value = "2")]
    pub dim: Dimension,
    /// Core radius, strictly inside (0, 1)
    #[arg(long)]
    pub r1: f64,
    /// Core coefficient (the shell coefficient is 1)
    #[arg(long)]
    pub sigma1: f64,
    /// Neumann boundary data: inline JSON, a file path, or `-` for stdin
    #[arg(long = "g", visible_alias = "neumann", value_name = "JSON|PATH|-")]
    pub g: String,
    /// What to write: the Dirichlet trace or the full measurement
    #[arg(long, value_enum, default_value_t = Emit::Trace)]
    pub emit: Emit,
    /// Output path (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write interior wave samples as CSV to this path
    #[arg(long)]
    pub samples_out: Option<PathBuf>,
    /// Resolution of the sample grid (N radial x N angular points)
    #[arg(long, default_value_t = 16)]
    pub samples: u32,
}

#[derive(Debug, Args)]
pub struct NdmapArgs {
    /// Spatial dimension (2 or 3)
    #[arg(long = "dim", visible_alias = "dimension", value_parser = parse_dimension, default_value = "2")]
    pub dim: Dimension,
    /// Core radius; required unless sweeping `r1`
    #[arg(long)]
    pub r1: Option<f64>,
    /// Core coefficient; required unless sweeping `sigma1`
    #[arg(long)]
    pub sigma1: Option<f64>,
    /// Largest mode index in the symbol table (and sweep norm cap)
    #[arg(long = "nmax", visible_alias = "n-max", default_value_t = 64)]
    pub nmax: u32,
    /// Sweep an axis instead of printing the symbol table: `sigma1:2,1.5,...`
    /// or `r1:0.4,0.2,...`; the values may also be given via --points
    #[arg(long, value_name = "AXIS[:V1,V2,...]")]
    pub sweep: Option<String>,
    /// Sweep values for --sweep when not given inline
    #[arg(long, value_name = "V1,V2,...")]
    pub points: Option<String>,
    /// Output path (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InvertArgs {
    /// Spatial dimension the measurement must carry (2 or 3)
    #[arg(long = "dim", visible_alias = "dimension", value_parser = parse_dimension, default_value = "2")]
    pub dim: Dimension,
    /// Interface radius of the measured configuration
    #[arg(long)]
    pub r1: f64,
    /// Full measurement JSON: inline, a file path, or `-` for stdin
    #[arg(long = "meas", visible_alias = "measurement", value_name = "JSON|PATH|-")]
    pub meas: Option<String>,
    /// Neumann data (use together with --trace instead of --meas)
    #[arg(long = "g", visible_alias = "neumann", value_name = "JSON|PATH|-")]
    pub g: Option<String>,
    /// Dirichlet trace data (use together with --g instead of --meas)
    #[arg(long, visible_alias = "dirichlet", value_name = "JSON|PATH|-")]
    pub trace: Option<String>,
    /// Perturb the Dirichlet data multiplicatively by this Gaussian noise
    /// level before inverting
    #[arg(long)]
    pub noise: Option<f64>,
    /// RNG seed for --noise (logged to stderr)
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest tolerated relative spread between per-mode estimates
    #[arg(long)]
    pub consistency_tol: Option<f64>,
    /// Answer from the strongest mode without cross-validating the others
    #[arg(long)]
    pub no_cross_validate: bool,
    /// Output path (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NonuniqArgs {
    /// Spatial dimension (2 or 3)
    #[arg(long = "dim", visible_alias = "dimension", value_parser = parse_dimension, default_value = "2")]
    pub dim: Dimension,
    /// Core radius of the reference configuration
    #[arg(long)]
    pub r1: f64,
    /// Core coefficient of the reference configuration
    #[arg(long)]
    pub sigma1: f64,
    /// Core radius of the partner configuration
    #[arg(long)]
    pub r2: f64,
    /// Mode degree on which the two ND maps must agree
    #[arg(long)]
    pub n: u32,
    /// Search interval for the partner coefficient, as `LO,HI`
    #[arg(long = "sigma2-range", value_name = "LO,HI")]
    pub sigma2_range: Option<String>,
    /// Number of logarithmically spaced scan points
    #[arg(long)]
    pub scan_points: Option<usize>,
    /// Output path (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Verification suite names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteName {
    /// Cross-product identity residuals over random order/argument triples
    CrossProducts,
    /// Scaled Wronskian and analytic-vs-central derivative checks
    Wronskian,
    /// Bessel-ratio lower bound and recovery-map monotonicity grids
    Monotonicity,
    /// Finite-difference oracle agreement and convergence order
    Oracle,
}

impl SuiteName {
    /// Every suite, in canonical execution order.
    pub const ALL: [SuiteName; 4] = [
        SuiteName::CrossProducts,
        SuiteName::Wronskian,
        SuiteName::Monotonicity,
        SuiteName::Oracle,
    ];
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Run reduced grids (the default; finishes in seconds)
    #[arg(long, conflicts_with = "full")]
    pub quick: bool,
    /// Run the full grids
    #[arg(long)]
    pub full: bool,
    /// Run a single suite instead of all four
    #[arg(long, value_enum)]
    pub suite: Option<SuiteName>,
    /// Seed for the randomized suites (logged to stderr)
    #[arg(long, default_value_t = 2026)]
    pub seed: u64,
}
