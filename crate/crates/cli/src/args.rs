//! Flags, their JSON config-file mirror and the merge of the two.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "mim", version, about = "Spectrum, modes and field dynamics of a cavity with a movable dielectric slab")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact and first-order frequencies at one slab position.
    Spectrum(SpectrumArgs),
    /// Position-independent frequencies and their slab widths.
    Structural(StructuralArgs),
    /// Explicit roots for a centred slab.
    Midpoint(MidpointArgs),
    /// Frequencies over a grid of slab positions (long format).
    Sweep(SweepArgs),
    /// Sampled normalised mode profiles.
    Modes(ModesArgs),
    /// Coupling matrices at one slab position.
    Couplings(CouplingsArgs),
    /// Field evolution for a moving slab: norms and potential profiles.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Exact,
    Thin,
}

/// Options shared by every subcommand.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct CommonArgs {
    /// JSON file with option values; flags given on the command line win.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Output file (standard output when absent).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Significant digits of numeric output.
    #[arg(long)]
    pub digits: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct CavityArgs {
    /// Cavity length.
    #[arg(long)]
    pub xi_l: Option<f64>,
    /// Slab width.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Refractive factor sqrt(1 + 4 pi chi0); give this or --chi0.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Slab susceptibility; give this or --alpha.
    #[arg(long)]
    pub chi0: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct PositionArgs {
    /// Left-edge position as a fraction of the cavity length; give this or --q0.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Slab centre; give this or --beta.
    #[arg(long)]
    pub q0: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct SpectrumArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub cavity: CavityArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub position: PositionArgs,
    /// Number of frequencies.
    #[arg(long)]
    pub count: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct StructuralArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub cavity: CavityArgs,
    /// Vacuum index of a single structural frequency (with --k).
    #[arg(long)]
    pub n: Option<u32>,
    /// Slab index of a single structural frequency (with --n).
    #[arg(long)]
    pub k: Option<u32>,
    /// Largest vacuum index when enumerating.
    #[arg(long)]
    pub n_max: Option<u32>,
    /// Largest slab index when enumerating.
    #[arg(long)]
    pub k_max: Option<u32>,
    /// Check each frequency is a root at every grid position.
    #[arg(long)]
    pub verify: bool,
    /// Slab positions used by --verify.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Residual tolerance used by --verify.
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct MidpointArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub cavity: CavityArgs,
    /// Largest family index.
    #[arg(long)]
    pub n_max: Option<u32>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct SweepArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub cavity: CavityArgs,
    /// Slab positions in the grid.
    #[arg(long)]
    pub points: Option<usize>,
    /// Frequencies per position.
    #[arg(long)]
    pub count: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct ModesArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub cavity: CavityArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub position: PositionArgs,
    /// Number of modes.
    #[arg(long)]
    pub count: Option<usize>,
    /// Sample points across the cavity.
    #[arg(long)]
    pub points: Option<usize>,
    /// Also emit the first-order thin-slab modes.
    #[arg(long)]
    pub thin: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct CouplingsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub cavity: CavityArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub position: PositionArgs,
    /// Truncation size of the matrices.
    #[arg(long)]
    pub count: Option<usize>,
    /// Finite-difference step in the slab position.
    #[arg(long)]
    pub step: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub cavity: CavityArgs,
    /// Centre of the slab oscillation.
    #[arg(long)]
    pub center: Option<f64>,
    /// Amplitude of the slab oscillation (0 holds the slab still).
    #[arg(long)]
    pub amplitude: Option<f64>,
    /// Angular frequency of the slab oscillation.
    #[arg(long)]
    pub frequency: Option<f64>,
    /// Mode excited at the start.
    #[arg(long)]
    pub mode: Option<usize>,
    /// Initial amplitude of the excited mode.
    #[arg(long)]
    pub g0: Option<f64>,
    /// Initial rate of the excited mode.
    #[arg(long)]
    pub g1: Option<f64>,
    /// Modes reported and used in the norms.
    #[arg(long)]
    pub m_track: Option<usize>,
    /// Modes integrated in the coefficient equations.
    #[arg(long)]
    pub m_series: Option<usize>,
    /// Frequencies driving the coefficient equations.
    #[arg(long, value_enum)]
    pub model: Option<Model>,
    /// Times at which norms are reported.
    #[arg(long, value_delimiter = ',')]
    pub times: Option<Vec<f64>>,
    /// Times at which potential profiles are emitted.
    #[arg(long, value_delimiter = ',')]
    pub profile_times: Option<Vec<f64>>,
    /// Sample points of each profile.
    #[arg(long)]
    pub points: Option<usize>,
    /// CSV file for the profiles (CSV output only).
    #[arg(long)]
    pub profiles: Option<PathBuf>,
    #[arg(long)]
    pub rtol: Option<f64>,
    #[arg(long)]
    pub atol: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
}

/// Overlays the flags given on the command line onto the config file.
pub fn merge_config<T>(cli: &T, config: Option<&Path>) -> Result<T, CliError>
where
    T: Serialize + DeserializeOwned,
{
    let flags = serde_json::to_value(cli).map_err(|e| CliError::Usage(e.to_string()))?;
    let Some(path) = config else {
        return serde_json::from_value(flags).map_err(|e| CliError::Usage(e.to_string()));
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let file: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
    let (Value::Object(mut merged), Value::Object(flags)) = (file, flags) else {
        return Err(CliError::Usage(format!("config {} must hold a JSON object", path.display())));
    };
    if let Some(key) = merged.keys().find(|k| !flags.contains_key(*k)) {
        return Err(CliError::Usage(format!("unknown option {key:?} in {}", path.display())));
    }
    for (key, value) in flags {
        if !matches!(value, Value::Null | Value::Bool(false)) {
            merged.insert(key, value);
        }
    }
    serde_json::from_value(Value::Object(merged))
        .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
}
