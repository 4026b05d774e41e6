use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use h2e_core::scan::{DEFAULT_FAR_POINT, DEFAULT_POINTS, DEFAULT_R_MAX, DEFAULT_R_MIN};

#[derive(Debug, Parser)]
#[command(
    name = "h2e",
    version,
    about = "H2 electron correlation, orbital entanglement and CHSH tools"
)]
pub struct Cli {
    /// Directory searched for `<basis>.g94` files before the built-in sets.
    #[arg(long, global = true, env = "H2E_BASIS_DIR")]
    pub basis_dir: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dissociation-curve scan written as CSV or JSON.
    Scan(ScanArgs),
    /// Single bond length: HF, FCI, correlation energy, entropy, occupations.
    Point(PointArgs),
    /// Maximal CHSH value of a two-spin state.
    Bell(BellArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Unit {
    Bohr,
    Angstrom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StateName {
    Singlet,
    Product,
    Dissociation,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Built-in name (sto-3g, 6-31gss) or path to a Gaussian94 file.
    #[arg(long, default_value = "sto-3g")]
    pub basis: String,
    #[arg(long, default_value_t = DEFAULT_R_MIN)]
    pub rmin: f64,
    #[arg(long, default_value_t = DEFAULT_R_MAX)]
    pub rmax: f64,
    #[arg(long, default_value_t = DEFAULT_POINTS)]
    pub points: usize,
    /// Geometric spacing instead of linear.
    #[arg(long)]
    pub log_grid: bool,
    /// Unit of --rmin/--rmax; output is always in Bohr.
    #[arg(long, value_enum, default_value_t = Unit::Bohr)]
    pub unit: Unit,
    /// Extra far point in Bohr appended beyond --rmax.
    #[arg(long, default_value_t = DEFAULT_FAR_POINT, conflicts_with = "no_far_point")]
    pub far_point: f64,
    #[arg(long)]
    pub no_far_point: bool,
    /// Add an entropy column scaled to the correlation energy at the largest R.
    #[arg(long)]
    pub rescale: bool,
    /// Output file; `-` writes to stdout.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct PointArgs {
    /// Bond length.
    #[arg(short = 'R', long = "distance", allow_negative_numbers = true)]
    pub distance: f64,
    #[arg(long, default_value = "sto-3g")]
    pub basis: String,
    #[arg(long, value_enum, default_value_t = Unit::Bohr)]
    pub unit: Unit,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct BellArgs {
    #[arg(long, value_enum)]
    pub state: StateName,
    /// Final angular step of the search, degrees.
    #[arg(long, default_value_t = 0.5)]
    pub resolution: f64,
    #[arg(long)]
    pub json: bool,
}
