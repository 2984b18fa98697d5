use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "herd", version, about = "Leaky-coaxial low-pass filter design toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coax impedance, single-mode limit, corner frequency and aperture modes.
    Modes(ModesArgs),
    /// Predicted S-parameters over a frequency range, with band metrics.
    Analyze(AnalyzeArgs),
    /// Corner frequency and in-band loss while sweeping one aperture dimension.
    Sweep(SweepArgs),
    /// Stopband attenuation against section count.
    Sections(SectionsArgs),
    /// Filter geometry from performance targets.
    Synthesize(SynthesizeArgs),
    /// Check a measured .s2p file against claims and the model.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
    Touchstone,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    A,
    B,
    D,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::A => "a",
            SweepParam::B => "b",
            SweepParam::D => "d",
        }
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the main output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RangeArgs {
    /// Start frequency, Hz.
    #[arg(long)]
    pub fstart: Option<f64>,
    /// Stop frequency, Hz.
    #[arg(long)]
    pub fstop: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Logarithmic spacing (default when the range reaches the stopband).
    #[arg(long)]
    pub log: bool,
    /// Linear spacing.
    #[arg(long, conflicts_with = "log")]
    pub linear: bool,
}

#[derive(Debug, Args)]
pub struct ModesArgs {
    #[arg(long)]
    pub design: Option<PathBuf>,
    /// Impedance for the coax radius solve, ohms.
    #[arg(long, requires = "single_mode")]
    pub z0: Option<f64>,
    /// Single-mode limit for the coax radius solve, Hz.
    #[arg(long, requires = "z0")]
    pub single_mode: Option<f64>,
    /// Relative permittivity of the coax fill for the radius solve.
    #[arg(long, default_value_t = 1.0)]
    pub coax_eps_r: f64,
    /// Highest aperture mode cutoff to list, Hz (default: twice the corner).
    #[arg(long)]
    pub fmax: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub design: PathBuf,
    /// Override the section count of the design file.
    #[arg(long)]
    pub sections: Option<u32>,
    #[command(flatten)]
    pub range: RangeArgs,
    /// Claim profile to check: `default` or `strict12`.
    #[arg(long)]
    pub claims: Option<String>,
    /// Check the `default` claim profile (unless --claims names another).
    #[arg(long)]
    pub require_claims: bool,
    /// Add a constant port reflection at this return loss, dB (e.g. -20).
    #[arg(long, allow_hyphen_values = true)]
    pub mismatch: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub design: PathBuf,
    #[arg(long, value_enum)]
    pub param: SweepParam,
    /// First value, metres.
    #[arg(long)]
    pub from: f64,
    /// Last value, metres.
    #[arg(long)]
    pub to: f64,
    #[arg(long, default_value_t = 11)]
    pub steps: usize,
    /// Frequency of the in-band loss column, Hz.
    #[arg(long, default_value_t = 10e9)]
    pub fref: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SectionsArgs {
    #[arg(long)]
    pub design: PathBuf,
    /// Comma-separated frequencies, Hz.
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    pub freqs: Vec<f64>,
    #[arg(long, default_value_t = 8)]
    pub max_sections: u32,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SynthesizeArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Measured Touchstone v1 .s2p file.
    #[arg(long)]
    pub measured: PathBuf,
    #[arg(long)]
    pub design: PathBuf,
    #[arg(long, default_value = "default")]
    pub claims: String,
    #[command(flatten)]
    pub output: OutputArgs,
}
