use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Precession-protocol toolkit: bounds, scores, probability spaces.
#[derive(Debug, Parser)]
#[command(name = "precess", version)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub tol: Tolerances,

    /// Worker threads for direction sweeps (default: all cores).
    #[arg(long, global = true, env = "PRECESS_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct Tolerances {
    /// Eigenvalues within zero_tol·max(1, ‖M‖) of zero count as zero.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub zero_tol: f64,
    /// Tolerance of the violation and saturation flags.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub score_tol: f64,
    /// Bracket tolerance of ray maximization.
    #[arg(long, global = true, default_value_t = 1e-4)]
    pub ray_tol: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spectrum-dependent upper bound on the score.
    Bound(BoundArgs),
    /// Score a state.
    Score(ScoreArgs),
    /// Sample the boundary of the quantum probability space to CSV.
    Probspace(ProbspaceArgs),
    /// Check precession, vanishing mean sum, spectrum and embeddings.
    Verify(VerifyArgs),
    /// Energy-level dimension witness.
    Witness(FamilyArgs),
    /// Run the reproduction table.
    Repro(ReproArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyKind {
    #[value(name = "four_level")]
    FourLevel,
    Spin,
    Clock,
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EmbedKind {
    Real,
    Grassmann,
}

#[derive(Debug, Clone, Args)]
pub struct FamilyArgs {
    #[arg(long, value_enum)]
    pub family: Option<FamilyKind>,
    #[arg(long = "x-plus")]
    pub x_plus: Option<f64>,
    #[arg(long = "x-minus")]
    pub x_minus: Option<f64>,
    /// Spin quantum number.
    #[arg(long)]
    pub j: Option<f64>,
    /// Clock divisions.
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// Clock hand length.
    #[arg(long)]
    pub l: Option<f64>,
    /// JSON family description (required for raw).
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Encode the pair in a real or Grassmannian Hilbert space.
    #[arg(long, value_enum)]
    pub embed: Option<EmbedKind>,
    /// Multiplicity of the Grassmannian embedding.
    #[arg(long, default_value_t = 2)]
    pub grassmann_n: usize,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Zero is a possible outcome (with --x-plus/--x-minus).
    #[arg(long)]
    pub has_zero: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StateKind {
    Optimal,
    Mixed,
    Random,
    File,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, value_enum, default_value = "optimal")]
    pub state: StateKind,
    /// JSON state vector or density matrix for --state file.
    #[arg(long)]
    pub state_file: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write the selected (unembedded) state as JSON.
    #[arg(long)]
    pub save_state: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ProbspaceArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, default_value_t = 500)]
    pub directions: usize,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Seed of the random states used by the mean-sum check.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub states: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReproFormat {
    Json,
    Table,
}

#[derive(Debug, Args)]
pub struct ReproArgs {
    /// Run a single criterion.
    #[arg(long)]
    pub only: Option<u8>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: ReproFormat,
}
