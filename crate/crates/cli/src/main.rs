//! `sphere-bounds`: frame potentials, Riesz energies, Thomson minimization,
//! spherical Voronoi diagnostics and lattice windows from the command line.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use output::{emit, manifest_path, pretty, Format};

/// Seed used whenever `--seed` is not given.
pub const DEFAULT_SEED: u64 = 20_160_101;

#[derive(Debug, Parser, Serialize)]
#[command(name = "sphere-bounds", version, about = "Frame-potential bounds and Thomson-problem diagnostics on spheres")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output file; stdout when absent. A manifest is written next to it.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Frame potentials against their lower bounds.
    Fp(FpArgs),
    /// Antisymmetric frame potentials against the uniform value and upper bound.
    Afp(AfpArgs),
    /// Expansion coefficients and the triple-product table.
    Coeffs(CoeffsArgs),
    /// Coulomb energy, its lower bounds and the regularized series.
    Riesz(RieszArgs),
    /// Local minimization of the Riesz energy.
    Minimize(MinimizeArgs),
    /// Perturb-and-reminimize ensemble with strain and energy frame potentials.
    Ensemble(EnsembleArgs),
    /// Spherical Voronoi diagram, charges, strain and cell energies.
    Voronoi(VoronoiArgs),
    /// Lattice observation windows.
    Window(WindowArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Solid {
    Tetrahedron,
    Octahedron,
    Cube,
    Icosahedron,
}

/// Where the point configuration comes from.
#[derive(Debug, Args, Serialize)]
pub struct InputArgs {
    /// Configuration file: one point per line, `#` comments.
    #[arg(long, conflicts_with_all = ["solid", "points"])]
    pub input: Option<PathBuf>,
    /// A built-in configuration.
    #[arg(long, conflicts_with = "points")]
    pub solid: Option<Solid>,
    /// Uniform random configuration of this many points.
    #[arg(long)]
    pub points: Option<usize>,
    /// Ambient dimension of a random configuration.
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct FpArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Weights file: one scalar or one vector per line.
    #[arg(long)]
    pub weights: Option<PathBuf>,
    #[arg(long = "ell", default_values_t = [2])]
    pub ell: Vec<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct AfpArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long = "ell", default_values_t = [2])]
    pub ell: Vec<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct CoeffsArgs {
    #[arg(long = "ell", default_values_t = [0, 1, 2, 3, 4, 5, 6, 7, 8])]
    pub ell: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    /// Emit the triple-product table instead.
    #[arg(long)]
    pub kappa: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct RieszArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Report bounds for this many points without a configuration.
    #[arg(long)]
    pub count: Option<usize>,
    /// Regularization for the series diagnostic (default: the optimal one).
    #[arg(long)]
    pub delta: Option<f64>,
    /// Truncation degree of the series diagnostic.
    #[arg(long, default_value_t = 60)]
    pub lmax: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct SolverArgs {
    /// Riesz exponent.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub s: f64,
    #[arg(long, default_value_t = 50_000)]
    pub max_iters: usize,
    /// Gradient tolerance (default 1e-10 N).
    #[arg(long)]
    pub grad_tol: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct MinimizeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Write the minimized configuration here.
    #[arg(long)]
    pub config_out: Option<PathBuf>,
    /// Also emit the energy after every accepted step.
    #[arg(long)]
    pub trace: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StrainChoice {
    #[default]
    Projected,
    Raw,
}

#[derive(Debug, Args, Serialize)]
pub struct EnsembleArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Number of perturbed copies.
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    /// Gaussian perturbation scale per coordinate.
    #[arg(long, default_value_t = 0.05)]
    pub sigma: f64,
    /// Order of the strain and energy frame potentials.
    #[arg(long = "ell", default_value_t = 2)]
    pub ell: usize,
    #[arg(long, value_enum, default_value_t = StrainChoice::Projected)]
    pub strain_mode: StrainChoice,
    /// Directory for the minimized configurations.
    #[arg(long)]
    pub config_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightKind {
    Defect,
    Strain,
    Energy,
    StrainVector,
}

#[derive(Debug, Args, Serialize)]
pub struct VoronoiArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value_t = StrainChoice::Projected)]
    pub strain_mode: StrainChoice,
    /// Write per-cell weights for `fp --weights` here.
    #[arg(long)]
    pub weights_out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = WeightKind::Defect)]
    pub weight_kind: WeightKind,
}

#[derive(Debug, Args, Serialize)]
pub struct WindowArgs {
    /// 2 for the hexagonal lattice, 3 for the cubic one.
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Nearest-neighbour distance.
    #[arg(long, default_value_t = 1.0)]
    pub spacing: f64,
    /// Window radius (default 4 spacings).
    #[arg(long)]
    pub radius: Option<f64>,
    /// Weight exponents (default 0, 0.5, 1, 2).
    #[arg(long = "gamma")]
    pub gamma: Vec<f64>,
    #[arg(long = "ell", default_values_t = [1, 2, 3, 4, 5, 6])]
    pub ell: Vec<usize>,
    /// Scan this many random centres in the unit cell instead of the
    /// symmetric placement.
    #[arg(long, default_value_t = 0)]
    pub centers: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Lib(#[from] sphere_bounds::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use sphere_bounds::Error as E;
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Lib(E::InvalidArgument(_) | E::Parse { .. } | E::UnsupportedDimension { .. }) => 2,
            CliError::Lib(_) => 3,
        }
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    subcommand: &'a str,
    parameters: &'a Cli,
    version: &'a str,
    threads: usize,
    output: Option<&'a PathBuf>,
    extra_outputs: Vec<PathBuf>,
    wall_time_seconds: f64,
}

fn subcommand_name(c: &Command) -> &'static str {
    match c {
        Command::Fp(_) => "fp",
        Command::Afp(_) => "afp",
        Command::Coeffs(_) => "coeffs",
        Command::Riesz(_) => "riesz",
        Command::Minimize(_) => "minimize",
        Command::Ensemble(_) => "ensemble",
        Command::Voronoi(_) => "voronoi",
        Command::Window(_) => "window",
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let start = Instant::now();
    let result = commands::dispatch(&cli.command)?;
    emit(&result.output.render(cli.format)?, cli.out.as_deref())?;
    if let Some(out) = &cli.out {
        let manifest = Manifest {
            subcommand: subcommand_name(&cli.command),
            parameters: cli,
            version: env!("CARGO_PKG_VERSION"),
            threads: rayon::current_num_threads(),
            output: Some(out),
            extra_outputs: result.extra_outputs,
            wall_time_seconds: start.elapsed().as_secs_f64(),
        };
        emit(&pretty(&manifest)?, Some(&manifest_path(out)))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
