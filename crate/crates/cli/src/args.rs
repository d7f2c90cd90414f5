use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use umbilic_core::convexbody::SupportBody;
use umbilic_core::scan::{Region, Residual};
use umbilic_core::Family;

#[derive(Debug, Parser)]
#[command(name = "umbilic", version, about = "Curvature fields, umbilics and inversion of graph surfaces")]
pub struct Cli {
    /// File of `key = value` lines used as defaults for the subcommand's flags.
    /// Flags given on the command line take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Registry of built-in fields
    Fields {
        #[command(subcommand)]
        action: FieldsCommand,
    },
    /// Sampled curvature quantities
    Curvature {
        #[command(subcommand)]
        action: CurvatureCommand,
    },
    /// Umbilic search on a rectangle
    Umbilic {
        #[command(subcommand)]
        action: UmbilicCommand,
    },
    /// Smallest normalized umbilic-system residual on a grid
    #[command(args_override_self = true)]
    Floor(FloorArgs),
    /// Inversion through the origin
    Invert {
        #[command(subcommand)]
        action: InvertCommand,
    },
    /// Divergence-theorem checks of the integral identities
    Verify {
        #[command(subcommand)]
        action: VerifyCommand,
    },
    /// Umbilic blow-up of a convex body
    Pipeline {
        #[command(subcommand)]
        action: PipelineCommand,
    },
    /// Zero-level polylines of a sampled residual
    #[command(args_override_self = true)]
    Contour(ContourArgs),
    /// Uniform-decay profile of a field
    #[command(args_override_self = true)]
    Decay(DecayArgs),
}

#[derive(Debug, Subcommand)]
pub enum FieldsCommand {
    #[command(args_override_self = true)]
    List(OutputArgs),
}

#[derive(Debug, Subcommand)]
pub enum CurvatureCommand {
    #[command(args_override_self = true)]
    Map(MapArgs),
}

#[derive(Debug, Subcommand)]
pub enum UmbilicCommand {
    #[command(args_override_self = true)]
    Scan(ScanArgs),
}

#[derive(Debug, Subcommand)]
pub enum InvertCommand {
    #[command(args_override_self = true)]
    Graph(InvertArgs),
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    #[command(args_override_self = true)]
    Thm2(Thm2Args),
    #[command(args_override_self = true)]
    Thm3(Thm3Args),
    #[command(args_override_self = true)]
    Divergence(DivergenceArgs),
}

#[derive(Debug, Subcommand)]
pub enum PipelineCommand {
    #[command(args_override_self = true)]
    Thm1(PipelineArgs),
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// CSV destination; standard output when omitted
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FieldArg {
    /// Field as `name` or `name:key=value,...`
    #[arg(long, value_parser = parse_family)]
    pub field: Family,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Rectangle `x0,y0,x1,y1`
    #[arg(long, value_parser = parse_region, default_value = "-3,-3,3,3", allow_hyphen_values = true)]
    pub region: Region,
    #[arg(long, default_value_t = 101)]
    pub nx: usize,
    #[arg(long, default_value_t = 101)]
    pub ny: usize,
}

#[derive(Debug, Args)]
pub struct DirectionArgs {
    /// Angle of the first direction X, radians
    #[arg(long = "X", visible_alias = "x-angle", default_value_t = 0.0, allow_hyphen_values = true)]
    pub x: f64,
    /// Angle of the second direction Y, radians
    #[arg(long = "Y", visible_alias = "y-angle", default_value_t = std::f64::consts::FRAC_PI_2, allow_hyphen_values = true)]
    pub y: f64,
    /// Base angle θ₀ for `dk_dtheta`, radians
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub theta0: f64,
}

#[derive(Debug, Args)]
pub struct SchemeArgs {
    /// Gauss–Legendre nodes per unit annulus
    #[arg(long, default_value_t = 16)]
    pub n_r: usize,
    /// Uniform angular nodes
    #[arg(long, default_value_t = 128)]
    pub n_theta: usize,
}

#[derive(Debug, Args)]
pub struct MapArgs {
    #[command(flatten)]
    pub field: FieldArg,
    #[arg(long, value_parser = parse_residual, default_value = "delta_k")]
    pub residual: Residual,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub dirs: DirectionArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Heatmap destination
    #[arg(long, value_name = "PATH")]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ContourArgs {
    #[command(flatten)]
    pub field: FieldArg,
    #[arg(long, value_parser = parse_residual, default_value = "delta_k")]
    pub residual: Residual,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub dirs: DirectionArgs,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub level: f64,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Heatmap with contour paths
    #[arg(long, value_name = "PATH")]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub field: FieldArg,
    #[arg(long, value_parser = parse_region, default_value = "-2,-2,2,2", allow_hyphen_values = true)]
    pub region: Region,
    /// Samples per side
    #[arg(long, default_value_t = 101)]
    pub n: usize,
    /// Candidate threshold on D/(1+q)³
    #[arg(long, default_value_t = umbilic_core::scan::DEFAULT_SEARCH_TOL)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct FloorArgs {
    #[command(flatten)]
    pub field: FieldArg,
    #[arg(long, value_parser = parse_region, default_value = "-20,-20,20,20", allow_hyphen_values = true)]
    pub region: Region,
    #[arg(long, default_value_t = 401)]
    pub n: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct InvertArgs {
    #[command(flatten)]
    pub field: FieldArg,
    /// Radius of the inverted disk
    #[arg(long)]
    pub r0: f64,
    /// Rescale so the vertex curvature is 2
    #[arg(long)]
    pub normalize: bool,
    /// Ladder of r̄ at which the exterior graph is measured
    #[arg(long, value_parser = parse_list, default_value = "10,100,1000")]
    pub radii: Ladder,
    /// Angular samples per ladder radius
    #[arg(long, default_value_t = 256)]
    pub n_theta: usize,
    /// When positive, emit this many random (r̄, θ) samples instead of the ladder
    #[arg(long, default_value_t = 0)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct Thm2Args {
    #[command(flatten)]
    pub field: FieldArg,
    #[command(flatten)]
    pub dirs: DirectionArgs,
    #[arg(long, value_parser = parse_list, default_value = "2,4,8,16")]
    pub radii: Ladder,
    #[command(flatten)]
    pub scheme: SchemeArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct Thm3Args {
    #[command(flatten)]
    pub field: FieldArg,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub theta0: f64,
    #[arg(long, value_parser = parse_list, default_value = "2,4,8,16")]
    pub radii: Ladder,
    #[command(flatten)]
    pub scheme: SchemeArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VectorFieldKind {
    /// Curvature-difference field for directions X, Y
    Thm2,
    /// Principal-angle field at θ₀
    Thm3,
}

#[derive(Debug, Args)]
pub struct DivergenceArgs {
    #[command(flatten)]
    pub field: FieldArg,
    #[arg(long, value_enum, default_value_t = VectorFieldKind::Thm2)]
    pub kind: VectorFieldKind,
    #[command(flatten)]
    pub dirs: DirectionArgs,
    #[arg(long, value_parser = parse_list, default_value = "2,4,8")]
    pub radii: Ladder,
    #[command(flatten)]
    pub scheme: SchemeArgs,
    /// Largest accepted |area integral − flux|
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    /// `round[:radius]`, `axial[:eps]` or `triaxial:a,b,c`
    #[arg(long, value_parser = parse_body, default_value = "axial:0.05")]
    pub body: SupportBody,
    /// Parallel offset; ten times the largest support value when omitted
    #[arg(long)]
    pub offset: Option<f64>,
    #[arg(long, value_parser = parse_list, default_value = "10,100,1000")]
    pub bins: Ladder,
    #[arg(long, default_value_t = 512)]
    pub n_azimuth: usize,
    /// Latitude rows of the umbilic search lattice
    #[arg(long, default_value_t = 48)]
    pub grid_n: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct DecayArgs {
    #[command(flatten)]
    pub field: FieldArg,
    #[arg(long, value_parser = parse_list, default_value = "2,4,8,16")]
    pub radii: Ladder,
    #[arg(long, default_value_t = 256)]
    pub n_theta: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: umbilic_core::Error| e.to_string())
}

fn parse_region(s: &str) -> Result<Region, String> {
    s.parse().map_err(|e: umbilic_core::Error| e.to_string())
}

fn parse_residual(s: &str) -> Result<Residual, String> {
    s.parse().map_err(|e: umbilic_core::Error| e.to_string())
}

fn parse_body(s: &str) -> Result<SupportBody, String> {
    s.parse().map_err(|e: umbilic_core::Error| e.to_string())
}

/// Comma-separated list of numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct Ladder(pub Vec<f64>);

fn parse_list(s: &str) -> Result<Ladder, String> {
    let v = s
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    if v.is_empty() {
        return Err("empty list".into());
    }
    Ok(Ladder(v))
}
