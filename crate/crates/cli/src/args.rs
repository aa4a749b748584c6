use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "stressforge", version, about = "Generate, split, score and render von Mises stress datasets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a dataset family into a new directory.
    Generate(GenerateArgs),
    /// Solve a single case described in a JSON file.
    Solve(SolveArgs),
    /// Add a named train/test split to a dataset manifest.
    Split(SplitArgs),
    /// Score a prediction file against a dataset.
    Evaluate(EvaluateArgs),
    /// Render record channels as PNG heatmaps.
    Render(RenderArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Fine,
    Coarse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormalizeArg {
    Unit,
    Passthrough,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long)]
    pub seed: u64,
    /// Output directory; must not already hold a dataset.
    #[arg(long)]
    pub out: PathBuf,
    /// Dataset name stored in the manifest (defaults to the family name).
    #[arg(long)]
    pub name: Option<String>,
    /// Load normalization (default: unit for fine, passthrough for coarse).
    #[arg(long, value_enum)]
    pub normalize: Option<NormalizeArg>,
    /// Keep only the first N cases of the enumeration.
    #[arg(long)]
    pub limit: Option<usize>,
    #[arg(long)]
    pub mesh_size: Option<usize>,
    #[arg(long)]
    pub geometries: Option<usize>,
    #[arg(long)]
    pub bc_patterns: Option<usize>,
    #[arg(long)]
    pub load_patterns: Option<usize>,
    /// Solver threads (default: all logical cores).
    #[arg(long, env = "STRESSFORGE_WORKERS")]
    pub workers: Option<usize>,
    /// Write the manifest only, without solving or writing records.
    #[arg(long)]
    pub manifest_only: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ColormapArg {
    Viridis,
    Gray,
}

#[derive(Debug, Args)]
pub struct RenderOptions {
    #[arg(long, value_enum, default_value = "viridis")]
    pub colormap: ColormapArg,
    /// Pixels per element.
    #[arg(long, default_value_t = 4)]
    pub scale: u32,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Case description (JSON).
    #[arg(long)]
    pub case: PathBuf,
    /// Record file to create.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub case_id: u64,
    /// Also render all four channels into this directory.
    #[arg(long)]
    pub render: Option<PathBuf>,
    #[command(flatten)]
    pub render_options: RenderOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SplitModeArg {
    Random,
    CrossContour,
    CrossOpening,
    CrossOrientation,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    /// Dataset directory holding manifest.json.
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long)]
    pub name: String,
    #[arg(long, value_enum)]
    pub mode: SplitModeArg,
    /// Training fraction for random splits.
    #[arg(long, default_value_t = 0.8)]
    pub ratio: f64,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Dataset directory.
    #[arg(long)]
    pub dataset: PathBuf,
    /// One-channel record file with predicted von Mises fields.
    #[arg(long)]
    pub predictions: PathBuf,
    /// Score only the test side of this split.
    #[arg(long)]
    pub split: Option<String>,
    /// Directory for metrics.json and metrics.csv.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChannelArg {
    GeomBc,
    LoadX,
    LoadY,
    VonMises,
}

impl ChannelArg {
    pub const ALL: [ChannelArg; 4] = [
        ChannelArg::GeomBc,
        ChannelArg::LoadX,
        ChannelArg::LoadY,
        ChannelArg::VonMises,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn file_stem(self) -> &'static str {
        match self {
            ChannelArg::GeomBc => "geom_bc",
            ChannelArg::LoadX => "load_x",
            ChannelArg::LoadY => "load_y",
            ChannelArg::VonMises => "von_mises",
        }
    }
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// Record file (dataset or prediction).
    #[arg(long)]
    pub records: PathBuf,
    #[arg(long)]
    pub case_id: u64,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Channels to render (default: all channels in the file).
    #[arg(long, value_enum, value_delimiter = ',')]
    pub channels: Vec<ChannelArg>,
    #[command(flatten)]
    pub render_options: RenderOptions,
}
